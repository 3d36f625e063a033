// Individual information on the input particle against correlation
// information on the swapped pair, as Victor's basis goes from product to Bell.

use swapinfo::cli::{sweep_grid, sweep_row};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>7} {:>8} {:>8} {:>8}", "alpha", "I_ind", "I_corr", "sum");
    for alpha in sweep_grid(11, true) {
        let row = sweep_row(alpha)?;
        println!(
            "{:>7.4} {:>8.5} {:>8.5} {:>8.5}",
            row.alpha, row.i_ind, row.i_corr, row.complementarity_sum
        );
        assert!((row.complementarity_sum - 2.0).abs() < 1e-10);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
