// Victor's measurement used as a state estimator for the input particle.

use swapinfo::estimator::{
    analytic_fidelity, average_fidelity_with, Estimator, CLASSICAL_FIDELITY_LIMIT,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for alpha in [0.0, 0.25, std::f64::consts::FRAC_1_SQRT_2, 0.9, 1.0] {
        for estimator in [Estimator::NormalizedElement, Estimator::MaxEigenvector] {
            let r = average_fidelity_with(alpha, 100_000, 11, estimator)?;
            println!(
                "alpha {alpha:.4} {estimator:?}: f = {:.5} ± {:.5} (analytic {:.5})",
                r.f_montecarlo,
                r.stderr,
                analytic_fidelity(alpha, estimator)?
            );
        }
    }
    println!("classical limit {CLASSICAL_FIDELITY_LIMIT:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
