//! Information measures on spin-measurement statistics.
//!
//! For two particles measured along `(a, b)`, `I = (p+ - p-)²` where `p+`
//! (`p-`) is the probability that the outcomes are equal (opposite). `I_corr`
//! adds the zz and xx measures and maximizes over local frames. `I_ind` is the
//! same squared bias for one particle.

use nalgebra::{Matrix3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize;
use crate::qstate::{born_distribution, DensityMatrix, Direction, PureState, ALGEBRAIC_TOL};
use crate::swapkit::{self, Alpha};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationProbs {
    /// Probability that both outcomes are equal.
    pub p_plus: f64,
    /// Probability that the outcomes are opposite.
    pub p_minus: f64,
    pub axis_pair: (Direction, Direction),
}

/// A pair of orthonormal local axes `(z', x')` for one particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalFrame {
    pub z: Direction,
    pub x: Direction,
}

impl LocalFrame {
    pub fn lab() -> Self {
        Self {
            z: Direction::z(),
            x: Direction::x(),
        }
    }

    fn from_rotation(r: &Rotation3<f64>) -> Self {
        Self {
            z: Direction::new(r * Vector3::z()).expect("rotated unit vector"),
            x: Direction::new(r * Vector3::x()).expect("rotated unit vector"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoMeasures {
    /// zz measure in the lab frame.
    pub i_zz: f64,
    /// xx measure in the lab frame.
    pub i_xx: f64,
    /// zz + xx maximized over local frames.
    pub i_corr: f64,
    /// Maximizing frames for the first and second particle.
    pub frame: (LocalFrame, LocalFrame),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndividualInfo {
    pub i_ind: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Closed form from the singular values of the correlation tensor.
    Analytic,
    /// Direct numerical search over measurement settings.
    Numeric,
}

fn require_two_qubits(state: &PureState) -> Result<()> {
    if state.num_qubits() != 2 {
        return Err(Error::InvalidParameter(format!(
            "expected a two-qubit state, got {} qubits",
            state.num_qubits()
        )));
    }
    Ok(())
}

pub fn correlation_probs(
    state: &PureState,
    dir_a: Direction,
    dir_b: Direction,
) -> Result<CorrelationProbs> {
    require_two_qubits(state)?;
    let (la, lb) = (state.labels()[0], state.labels()[1]);
    let dist = born_distribution(state, &[&dir_a.eigenbasis(la), &dir_b.eigenbasis(lb)])?;
    let p_plus = dist[&vec![0, 0]] + dist[&vec![1, 1]];
    let p_minus = dist[&vec![0, 1]] + dist[&vec![1, 0]];
    Ok(CorrelationProbs {
        p_plus,
        p_minus,
        axis_pair: (dir_a, dir_b),
    })
}

pub fn info_measure(probs: &CorrelationProbs) -> f64 {
    (probs.p_plus - probs.p_minus).powi(2)
}

/// Chains measures of three consecutive pairs into one for the outer pair by multiplication.
pub fn info_chain(i01: f64, i12: f64, i23: f64) -> Result<f64> {
    let mut product = 1.0;
    for (name, v) in [("i01", i01), ("i12", i12), ("i23", i23)] {
        // rounding may push a measure just past 1
        if !(-ALGEBRAIC_TOL..=1.0 + ALGEBRAIC_TOL).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "{name} must lie in [0, 1], got {v}"
            )));
        }
        product *= v.clamp(0.0, 1.0);
    }
    Ok(product)
}

/// `T_ij = <σ_i ⊗ σ_j>` with rows for the first particle.
pub fn correlation_tensor(state: &PureState) -> Result<Matrix3<f64>> {
    require_two_qubits(state)?;
    let (la, lb) = (state.labels()[0], state.labels()[1]);
    let axes = [Direction::x(), Direction::y(), Direction::z()];
    let mut t = Matrix3::zeros();
    for (i, a) in axes.iter().enumerate() {
        for (j, b) in axes.iter().enumerate() {
            t[(i, j)] = state.expectation(&[(la, *a), (lb, *b)])?;
        }
    }
    Ok(t)
}

/// Singular values of `t` in descending order with matching left/right vectors.
pub(crate) fn sorted_svd(t: &Matrix3<f64>) -> [(f64, Vector3<f64>, Vector3<f64>); 3] {
    let svd = t.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let mut idx = [0, 1, 2];
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    idx.map(|k| {
        (
            svd.singular_values[k],
            u.column(k).into_owned(),
            v_t.row(k).transpose(),
        )
    })
}

fn frame_from_vectors(z: Vector3<f64>, x: Vector3<f64>) -> LocalFrame {
    let z = Direction::new(z).unwrap_or(Direction::z());
    let x = Direction::new(x).unwrap_or(Direction::x());
    LocalFrame { z, x }
}

fn frame_objective(t: &Matrix3<f64>, a: &LocalFrame, b: &LocalFrame) -> f64 {
    let zz = a.z.vector().dot(&(t * b.z.vector()));
    let xx = a.x.vector().dot(&(t * b.x.vector()));
    zz * zz + xx * xx
}

fn euler(p: &[f64]) -> Rotation3<f64> {
    Rotation3::from_euler_angles(p[0], p[1], p[2])
}

fn frames_from_params(p: &[f64]) -> (LocalFrame, LocalFrame) {
    (
        LocalFrame::from_rotation(&euler(&p[..3])),
        LocalFrame::from_rotation(&euler(&p[3..])),
    )
}

/// Maximizes `I_zz' + I_xx'` over both particles' local frames.
///
/// Coarse grid over the six Euler angles, then Nelder–Mead refinement of the
/// best few grid points.
fn numeric_max_frame(t: &Matrix3<f64>) -> (f64, (LocalFrame, LocalFrame)) {
    let objective = |p: &[f64]| {
        let (a, b) = frames_from_params(p);
        frame_objective(t, &a, &b)
    };
    let ticks = [-2.0, 0.0, 2.0];
    let mut grid: Vec<(f64, Vec<f64>)> = Vec::with_capacity(729);
    for i in 0..729usize {
        let p: Vec<f64> = (0..6).map(|d| ticks[(i / 3usize.pow(d)) % 3]).collect();
        grid.push((objective(&p), p));
    }
    grid.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut best = (f64::NEG_INFINITY, vec![0.0; 6]);
    for (_, start) in grid.iter().take(6) {
        let (p, v) = optimize::maximize(objective, start, 0.6, 1e-8);
        if v > best.0 {
            best = (v, p);
        }
    }
    let (p, v) = optimize::maximize(objective, &best.1, 0.05, 1e-14);
    let (p, v) = if v > best.0 { (p, v) } else { (best.1, best.0) };
    (v, frames_from_params(&p))
}

pub fn i_corr(state: &PureState, method: Method) -> Result<InfoMeasures> {
    let i_zz = info_measure(&correlation_probs(state, Direction::z(), Direction::z())?);
    let i_xx = info_measure(&correlation_probs(state, Direction::x(), Direction::x())?);
    let t = correlation_tensor(state)?;
    let (i_corr, frame) = match method {
        Method::Analytic => {
            let [(s1, u1, v1), (s2, u2, v2), _] = sorted_svd(&t);
            (
                s1 * s1 + s2 * s2,
                (frame_from_vectors(u1, u2), frame_from_vectors(v1, v2)),
            )
        }
        Method::Numeric => numeric_max_frame(&t),
    };
    Ok(InfoMeasures {
        i_zz,
        i_xx,
        i_corr,
        frame,
    })
}

/// `(p+ - p-)²` for one qubit along `direction`, defaulting to the Bloch
/// direction of the state (the maximizing choice).
pub fn i_ind(state: &DensityMatrix, direction: Option<Direction>) -> Result<IndividualInfo> {
    let bloch = state.bloch_vector()?;
    let direction = match direction {
        Some(d) => d,
        None => Direction::new(bloch).unwrap_or(Direction::z()),
    };
    let (p_plus, p_minus) = state.spin_probabilities(&direction)?;
    Ok(IndividualInfo {
        i_ind: (p_plus - p_minus).powi(2),
        direction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complementarity {
    pub i_ind1: f64,
    pub i_corr03: f64,
    pub sum: f64,
}

/// Individual information of particle 1 and correlation information of pair
/// 0–3, both read off the state after Victor's outcome `outcome`.
pub fn complementarity_for_outcome(alpha: f64, outcome: usize) -> Result<Complementarity> {
    let basis = swapkit::make_alpha_basis(alpha, swapkit::VICTOR.0, swapkit::VICTOR.1)?;
    let proj = swapkit::make_total_state().project(basis.projective(), outcome)?;
    let marginal = proj.post_state.reduced_density(&[swapkit::VICTOR.0])?;
    let i_ind1 = i_ind(&marginal, None)?.i_ind;
    let pair = proj.remainder.expect("qubits 0 and 3 remain");
    let i_corr03 = i_corr(&pair, Method::Analytic)?.i_corr;
    Ok(Complementarity {
        i_ind1,
        i_corr03,
        sum: i_ind1 + i_corr03,
    })
}

/// [`complementarity_for_outcome`] for Victor's `ψ-` outcome.
pub fn complementarity(alpha: f64) -> Result<Complementarity> {
    complementarity_for_outcome(alpha, swapkit::PSI_MINUS)
}

/// Closed forms for `(I_ind, I_corr)`: `((β²-α²)², 1 + 4α²β²)`.
pub fn complementarity_closed_form(alpha: f64) -> Result<(f64, f64)> {
    let a = Alpha::new(alpha)?;
    let (a2, b2) = (a.alpha().powi(2), a.beta().powi(2));
    Ok(((b2 - a2).powi(2), 1.0 + a.entangling_power()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    /// Product of the 0–1, 1–2 and 2–3 measures.
    pub chained: f64,
    /// Measure of the simulated 0–3 state.
    pub direct: f64,
}

/// Compares the multiplicative chain along `direction` with direct simulation
/// of the conditional 0–3 state for Victor's `outcome`.
pub fn chain_rule_check(
    victor_alpha: f64,
    outcome: usize,
    direction: Direction,
) -> Result<ChainCheck> {
    let measure =
        |s: &PureState| correlation_probs(s, direction, direction).map(|p| info_measure(&p));
    let i01 = measure(&swapkit::make_singlet(0, 1)?)?;
    let basis = swapkit::make_alpha_basis(victor_alpha, swapkit::VICTOR.0, swapkit::VICTOR.1)?;
    let i12 = measure(basis.state(outcome)?)?;
    let i23 = measure(&swapkit::make_singlet(2, 3)?)?;
    let direct = measure(&swapkit::conditional_state(victor_alpha, outcome)?)?;
    Ok(ChainCheck {
        chained: info_chain(i01, i12, i23)?,
        direct,
    })
}
