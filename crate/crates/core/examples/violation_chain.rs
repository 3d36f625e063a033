// From a measured Bell parameter to a bound on teleportation fidelity.

use swapinfo::estimator::ViolationReport;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let r = ViolationReport::from_measurement(2.421, 0.091)?;
    println!("S = {} ± {}", r.s, r.s_error);
    println!(
        "violation: {:.1} standard deviations above 2",
        r.sigmas_above_local_bound
    );
    println!("I_corr = S²/4 = {:.3}", r.i_corr);
    println!("I_ind <= {:.3}", r.i_ind_bound);
    println!(
        "f <= {:.3} (classical limit {:.4})",
        r.f_bound, r.f_classical
    );
    assert!(r.below_classical_limit);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
