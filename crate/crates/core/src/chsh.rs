//! CHSH Bell parameter for two-qubit states.
//!
//! `S = |E(a,b) + E(a,b') + E(a',b) - E(a',b')|`, bounded by 2 for local
//! hidden-variable models and by `2√2` in quantum mechanics.

use nalgebra::{Matrix3, Vector3};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infometrics::{correlation_tensor, sorted_svd, Method};
use crate::qstate::{Direction, PureState};
use crate::rng::RngStream;

pub const LOCAL_BOUND: f64 = 2.0;
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

const NUMERIC_STARTS: usize = 16;
const NUMERIC_SEED: u64 = 0xC45A;
const REFINE_TOL: f64 = 1e-13;
const REFINE_MAX_ROUNDS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub a: Direction,
    pub a_prime: Direction,
    pub b: Direction,
    pub b_prime: Direction,
}

impl Settings {
    /// Settings reaching `2√2` on the singlet.
    pub fn singlet_optimal() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a: Direction::z(),
            a_prime: Direction::x(),
            b: Direction::from_xyz(-r, 0.0, -r).expect("nonzero"),
            b_prime: Direction::from_xyz(r, 0.0, -r).expect("nonzero"),
        }
    }

    /// The four `(first, second)` setting pairs in sign order `+ + + -`.
    pub fn pairs(&self) -> [(Direction, Direction); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }
}

pub const PAIR_SIGNS: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub settings: Settings,
    pub s_value: f64,
}

/// Combines four correlations in setting-pair order into `S`.
pub fn combine(correlations: [f64; 4]) -> f64 {
    correlations
        .iter()
        .zip(PAIR_SIGNS)
        .map(|(e, s)| e * s)
        .sum::<f64>()
        .abs()
}

pub fn chsh_value(state: &PureState, settings: &Settings) -> Result<ChshResult> {
    if state.num_qubits() != 2 {
        return Err(Error::InvalidParameter(format!(
            "expected a two-qubit state, got {} qubits",
            state.num_qubits()
        )));
    }
    let (la, lb) = (state.labels()[0], state.labels()[1]);
    let mut e = [0.0; 4];
    for (slot, (x, y)) in e.iter_mut().zip(settings.pairs()) {
        *slot = state.expectation(&[(la, x), (lb, y)])?;
    }
    Ok(ChshResult {
        settings: *settings,
        s_value: combine(e),
    })
}

fn unit_or(v: Vector3<f64>, fallback: Vector3<f64>) -> Vector3<f64> {
    let n = v.norm();
    if n > 1e-300 {
        v / n
    } else {
        fallback
    }
}

fn signed_s(
    t: &Matrix3<f64>,
    a: &Vector3<f64>,
    ap: &Vector3<f64>,
    b: &Vector3<f64>,
    bp: &Vector3<f64>,
) -> f64 {
    a.dot(&(t * (b + bp))) + ap.dot(&(t * (b - bp)))
}

/// Block-coordinate ascent: with one side fixed the other side's optimum is
/// `a ∝ T(b+b')`, `a' ∝ T(b-b')` (and the transpose for `b, b'`).
fn refine(t: &Matrix3<f64>, mut v: [Vector3<f64>; 4]) -> (f64, [Vector3<f64>; 4]) {
    let tt = t.transpose();
    let mut last = signed_s(t, &v[0], &v[1], &v[2], &v[3]);
    for _ in 0..REFINE_MAX_ROUNDS {
        v[0] = unit_or(t * (v[2] + v[3]), v[0]);
        v[1] = unit_or(t * (v[2] - v[3]), v[1]);
        v[2] = unit_or(tt * (v[0] + v[1]), v[2]);
        v[3] = unit_or(tt * (v[0] - v[1]), v[3]);
        let s = signed_s(t, &v[0], &v[1], &v[2], &v[3]);
        let done = s - last < REFINE_TOL;
        last = s;
        if done {
            break;
        }
    }
    (last, v)
}

fn random_unit(rng: &mut RngStream) -> Vector3<f64> {
    loop {
        let mut g = || -> f64 { StandardNormal.sample(rng) };
        let v = Vector3::new(g(), g(), g());
        if v.norm() > 1e-6 {
            return v / v.norm();
        }
    }
}

fn numeric_settings(t: &Matrix3<f64>) -> Settings {
    let mut rng = RngStream::new(NUMERIC_SEED, 0);
    let mut best: Option<(f64, [Vector3<f64>; 4])> = None;
    for _ in 0..NUMERIC_STARTS {
        let start = [(); 4].map(|_| random_unit(&mut rng));
        let (s, v) = refine(t, start);
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, v));
        }
    }
    let (_, [a, ap, b, bp]) = best.expect("at least one start");
    let d = |v: Vector3<f64>| Direction::new(v).expect("unit vector");
    Settings {
        a: d(a),
        a_prime: d(ap),
        b: d(b),
        b_prime: d(bp),
    }
}

fn analytic_settings(t: &Matrix3<f64>) -> (f64, Settings) {
    let [(s1, u1, v1), (s2, u2, v2), _] = sorted_svd(t);
    let theta = s2.atan2(s1);
    let d = |v: Vector3<f64>, fallback: Direction| Direction::new(v).unwrap_or(fallback);
    let settings = Settings {
        a: d(u1, Direction::z()),
        a_prime: d(u2, Direction::x()),
        b: d(v1 * theta.cos() + v2 * theta.sin(), Direction::z()),
        b_prime: d(v1 * theta.cos() - v2 * theta.sin(), Direction::x()),
    };
    (2.0 * (s1 * s1 + s2 * s2).sqrt(), settings)
}

/// Maximum of `S` over all settings, with settings that attain it.
pub fn chsh_max(state: &PureState, method: Method) -> Result<ChshResult> {
    let t = correlation_tensor(state)?;
    match method {
        Method::Analytic => {
            let (s_value, settings) = analytic_settings(&t);
            Ok(ChshResult { settings, s_value })
        }
        Method::Numeric => chsh_value(state, &numeric_settings(&t)),
    }
}

/// `I_corr = S²/4` for `0 ≤ S ≤ 2√2`.
pub fn i_corr_from_s(s: f64) -> Result<f64> {
    if !(0.0..=TSIRELSON_BOUND + 1e-9).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "Bell parameter must lie in [0, 2√2], got {s}"
        )));
    }
    Ok(s * s / 4.0)
}
