// Rewrites the two-singlet source state in Victor's α-basis and checks the
// four terms add back up to it.

use swapinfo::qstate::PureState;
use swapinfo::swapkit::{make_total_state, swap_decomposition, OUTCOME_NAMES};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let alpha = 0.6;
    let total = make_total_state();
    let terms = swap_decomposition(alpha)?;
    let mut sum = vec![num_complex::Complex64::new(0.0, 0.0); 16];
    for (k, term) in terms.iter().enumerate() {
        let product = term.product().permuted(total.labels())?;
        for (s, a) in sum.iter_mut().zip(product.amps()) {
            *s += term.coefficient * a;
        }
        println!(
            "{:>4}: coefficient {:+.2}",
            OUTCOME_NAMES[k], term.coefficient
        );
    }
    let rebuilt = PureState::new(total.labels().to_vec(), sum)?;
    let err = rebuilt
        .amps()
        .iter()
        .zip(total.amps())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!("alpha = {alpha}: reconstruction error {err:.1e}");
    assert!(err < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
