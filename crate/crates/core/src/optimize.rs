//! Derivative-free maximization used by the numeric routes.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;

struct Negated<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Negated<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, argmin::core::Error> {
        Ok(-(self.0)(p))
    }
}

/// Maximizes `f` with Nelder–Mead from `start`, restarting from the incumbent
/// with a shrinking simplex until a restart gains less than `tol`.
pub fn maximize<F>(f: F, start: &[f64], step: f64, tol: f64) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let objective = Negated(f);
    let mut best = start.to_vec();
    let mut best_val = (objective.0)(&best);
    let mut step = step;
    for _ in 0..50 {
        let mut simplex = vec![best.clone()];
        for i in 0..best.len() {
            let mut v = best.clone();
            v[i] += step;
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(1e-15)
            .expect("positive tolerance");
        let Ok(res) = Executor::new(Negated(&objective.0), solver)
            .configure(|s| s.max_iters(4000))
            .run()
        else {
            break;
        };
        let state = res.state();
        let (Some(param), cost) = (state.get_best_param(), state.get_best_cost()) else {
            break;
        };
        let val = -cost;
        let gain = val - best_val;
        if val > best_val {
            best = param.clone();
            best_val = val;
        }
        if gain < tol {
            break;
        }
        step = (step * 0.5).max(1e-4);
    }
    (best, best_val)
}
