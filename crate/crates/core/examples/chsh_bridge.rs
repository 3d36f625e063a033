// `I_corr = S²/4`: the correlation measure and the maximal Bell parameter
// agree on random two-qubit states.

use swapinfo::chsh::chsh_max;
use swapinfo::infometrics::{i_corr, Method};
use swapinfo::qstate::haar_random_state;
use swapinfo::rng::RngStream;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = RngStream::new(2024, 0);
    for i in 0..8 {
        let state = haar_random_state(&mut rng, vec![0, 3])?;
        let info = i_corr(&state, Method::Analytic)?.i_corr;
        let s = chsh_max(&state, Method::Numeric)?.s_value;
        let verdict = if s > 2.0 { "violates" } else { "local" };
        println!(
            "state {i}: I_corr = {info:.6}  S = {s:.6}  S²/4 = {:.6}  {verdict}",
            s * s / 4.0
        );
        assert!((s * s / 4.0 - info).abs() < 1e-6);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
