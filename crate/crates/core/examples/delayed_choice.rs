// Alice and Bob record first; Victor chooses and measures 50 ns later.
// Sorting the early records by Victor's outcome reveals the correlations.

use swapinfo::delayed::{
    conditional_correlation, expected_conditional_correlation, run_experiment,
    unconditioned_correlation, ExperimentConfig, VictorMode,
};
use swapinfo::qstate::Direction;
use swapinfo::swapkit::OUTCOME_NAMES;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for mode in [VictorMode::GeneralizedBasis, VictorMode::SeparableZ] {
        let config = ExperimentConfig::new(std::f64::consts::FRAC_1_SQRT_2, 40_000, 7)
            .with_directions(Direction::x(), Direction::x())
            .with_mode(mode);
        let log = run_experiment(&config)?;
        println!("victor mode {mode:?}");
        for (k, name) in OUTCOME_NAMES.iter().enumerate() {
            let e = conditional_correlation(&log, k)?;
            let expected = expected_conditional_correlation(&config, k)?;
            println!(
                "  {name:>4}: E = {:+.4} ± {:.4} (expected {expected:+.4}, n = {})",
                e.e_hat, e.stderr, e.n
            );
        }
        let all = unconditioned_correlation(&log)?;
        println!("  unsorted: E = {:+.4} ± {:.4}", all.e_hat, all.stderr);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
