//! Classical teleportation through Victor's measurement.
//!
//! Particle 2 enters Victor's measurement as half of a singlet, so its state is
//! maximally mixed. Victor's outcome `k` then acts on particle 1 as the
//! effective element `E_k = Tr_2[|b_k><b_k| (I ⊗ I/2)]`. An estimate
//! `ρ_k` is guessed for each outcome and the fidelity
//! `Σ_k <ψ|E_k|ψ> <ψ|ρ_k|ψ>` is averaged over Haar-random inputs `|ψ>`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chsh::{i_corr_from_s, LOCAL_BOUND, TSIRELSON_BOUND};
use crate::error::{Error, Result};
use crate::qstate::{haar_random_qubit, DensityMatrix, ALGEBRAIC_TOL};
use crate::rng::RngStream;
use crate::swapkit::{make_alpha_basis, Alpha, VICTOR};

/// Fidelity reachable by measure-and-prepare schemes on a qubit.
pub const CLASSICAL_FIDELITY_LIMIT: f64 = 2.0 / 3.0;

const SHARD: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveElement {
    pub outcome_index: usize,
    pub operator: Matrix2<Complex64>,
}

impl EffectiveElement {
    fn weight(&self, psi: &[Complex64]) -> f64 {
        quadratic_form(&self.operator, psi)
    }
}

fn quadratic_form(m: &Matrix2<Complex64>, psi: &[Complex64]) -> f64 {
    let (a, b) = (psi[0], psi[1]);
    (a.conj() * (m[(0, 0)] * a + m[(0, 1)] * b) + b.conj() * (m[(1, 0)] * a + m[(1, 1)] * b)).re
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// `ρ_k = E_k / Tr E_k`.
    #[default]
    NormalizedElement,
    /// Projector onto the eigenvector of `E_k` with the largest eigenvalue.
    MaxEigenvector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    pub alpha: f64,
    pub f_analytic: f64,
    pub f_montecarlo: f64,
    pub stderr: f64,
    pub samples: u64,
}

pub fn effective_elements(alpha: f64) -> Result<Vec<EffectiveElement>> {
    let basis = make_alpha_basis(alpha, VICTOR.0, VICTOR.1)?;
    basis
        .projective()
        .states()
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let m = b.reduced_density(&[VICTOR.0])?.matrix().clone() * Complex64::new(0.5, 0.0);
            Ok(EffectiveElement {
                outcome_index: k,
                operator: Matrix2::from_iterator(m.iter().copied()),
            })
        })
        .collect()
}

pub fn estimate_state(element: &EffectiveElement, estimator: Estimator) -> Result<DensityMatrix> {
    let trace = element.operator.trace().re;
    if trace <= ALGEBRAIC_TOL {
        return Err(Error::InvalidParameter(format!(
            "effective element {} has zero trace",
            element.outcome_index
        )));
    }
    let rho = match estimator {
        Estimator::NormalizedElement => element.operator / Complex64::new(trace, 0.0),
        Estimator::MaxEigenvector => {
            let eig = element.operator.symmetric_eigen();
            let top = eig.eigenvalues.imax();
            let v = eig.eigenvectors.column(top).into_owned();
            v * v.adjoint()
        }
    };
    DensityMatrix::new(
        vec![VICTOR.0],
        DMatrix::from_iterator(2, 2, rho.iter().copied()),
    )
}

/// Closed-form average fidelity for the given estimator.
pub fn analytic_fidelity(alpha: f64, estimator: Estimator) -> Result<f64> {
    let a = Alpha::new(alpha)?;
    let (a2, b2) = (a.alpha().powi(2), a.beta().powi(2));
    Ok(match estimator {
        Estimator::NormalizedElement => 2.0 / 3.0 * (1.0 - a2 * b2),
        Estimator::MaxEigenvector => 1.0 / 3.0 + a2.max(b2) / 3.0,
    })
}

pub fn average_fidelity(alpha: f64, samples: u64, seed: u64) -> Result<FidelityResult> {
    average_fidelity_with(alpha, samples, seed, Estimator::NormalizedElement)
}

pub fn average_fidelity_with(
    alpha: f64,
    samples: u64,
    seed: u64,
    estimator: Estimator,
) -> Result<FidelityResult> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let elements = effective_elements(alpha)?;
    let estimates: Vec<Matrix2<Complex64>> = elements
        .iter()
        .map(|e| {
            estimate_state(e, estimator).map(|d| Matrix2::from_iterator(d.matrix().iter().copied()))
        })
        .collect::<Result<_>>()?;

    let samples_usize = usize::try_from(samples)
        .map_err(|_| Error::InvalidParameter(format!("too many samples: {samples}")))?;
    let shards = samples_usize.div_ceil(SHARD);
    let partial: Vec<(f64, f64)> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = RngStream::keyed(seed, 0, shard as u32);
            let count = SHARD.min(samples_usize - shard * SHARD);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let psi = haar_random_qubit(&mut rng, VICTOR.0);
                let f: f64 = elements
                    .iter()
                    .zip(&estimates)
                    .map(|(e, rho)| e.weight(psi.amps()) * quadratic_form(rho, psi.amps()))
                    .sum();
                sum += f;
                sum_sq += f * f;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(FidelityResult {
        alpha,
        f_analytic: analytic_fidelity(alpha, estimator)?,
        f_montecarlo: mean,
        stderr: (var / n).sqrt(),
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityBound {
    /// Largest individual information compatible with the observed violation.
    pub i_ind_bound: f64,
    pub f_bound: f64,
}

/// Bounds on input information and teleportation fidelity implied by a Bell parameter `s`.
pub fn fidelity_bound_from_chsh(s: f64) -> Result<FidelityBound> {
    if !(LOCAL_BOUND..=TSIRELSON_BOUND + 1e-9).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "Bell parameter must lie in [2, 2√2], got {s}"
        )));
    }
    let i_ind_bound = (2.0 - i_corr_from_s(s)?).max(0.0);
    Ok(FidelityBound {
        i_ind_bound,
        f_bound: 0.5 + i_ind_bound / 6.0,
    })
}

/// What a measured Bell parameter with statistical error implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub s: f64,
    pub s_error: f64,
    /// Distance above the local bound in units of `s_error`.
    pub sigmas_above_local_bound: f64,
    pub i_corr: f64,
    pub i_ind_bound: f64,
    pub f_bound: f64,
    pub f_classical: f64,
    pub below_classical_limit: bool,
}

impl ViolationReport {
    pub fn from_measurement(s: f64, s_error: f64) -> Result<Self> {
        if s_error.is_nan() || s_error <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "statistical error must be positive, got {s_error}"
            )));
        }
        let bound = fidelity_bound_from_chsh(s)?;
        Ok(Self {
            s,
            s_error,
            sigmas_above_local_bound: (s - LOCAL_BOUND) / s_error,
            i_corr: i_corr_from_s(s)?,
            i_ind_bound: bound.i_ind_bound,
            f_bound: bound.f_bound,
            f_classical: CLASSICAL_FIDELITY_LIMIT,
            below_classical_limit: bound.f_bound < CLASSICAL_FIDELITY_LIMIT,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infometrics::i_ind;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn grid() -> Vec<f64> {
        (0..=100).map(|i| i as f64 / 100.0).collect()
    }

    fn close(m: &Matrix2<Complex64>, diag: (f64, f64)) -> bool {
        (m - Matrix2::new(
            Complex64::new(diag.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(diag.1, 0.0),
        ))
        .camax()
            < 1e-12
    }

    #[test]
    fn bell_measurement_elements_are_uniform() {
        for e in effective_elements(FRAC_1_SQRT_2).unwrap() {
            assert!(close(&e.operator, (0.25, 0.25)));
            let rho = estimate_state(&e, Estimator::NormalizedElement).unwrap();
            assert!((rho.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_measurement_elements() {
        let e = effective_elements(1.0).unwrap();
        assert!(close(&e[0].operator, (0.5, 0.0)));
        assert!(close(&e[1].operator, (0.0, 0.5)));
        assert!(close(&e[2].operator, (0.5, 0.0)));
        assert!(close(&e[3].operator, (0.0, 0.5)));
        let rho = estimate_state(&e[0], Estimator::NormalizedElement).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn elements_are_complete_and_positive() {
        for a in grid() {
            let els = effective_elements(a).unwrap();
            let sum: Matrix2<Complex64> = els.iter().map(|e| e.operator).sum();
            assert!((sum - Matrix2::identity()).camax() < 1e-12);
            for e in &els {
                let ev = e.operator.symmetric_eigen().eigenvalues;
                assert!(ev.iter().all(|&x| x >= -1e-15));
                let rho = estimate_state(e, Estimator::NormalizedElement).unwrap();
                assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_trace_element_is_rejected() {
        let e = EffectiveElement {
            outcome_index: 0,
            operator: Matrix2::zeros(),
        };
        assert!(estimate_state(&e, Estimator::NormalizedElement).is_err());
    }

    #[test]
    fn closed_forms_agree() {
        for a in grid() {
            let marginal = make_alpha_basis(a, 1, 2)
                .unwrap()
                .state(crate::swapkit::PSI_MINUS)
                .unwrap()
                .reduced_density(&[1])
                .unwrap();
            let ind = i_ind(&marginal, None).unwrap().i_ind;
            let f = analytic_fidelity(a, Estimator::NormalizedElement).unwrap();
            assert!((f - (0.5 + ind / 6.0)).abs() < 1e-12);
        }
        assert!(
            (analytic_fidelity(1.0, Estimator::NormalizedElement).unwrap() - 2.0 / 3.0).abs()
                < 1e-12
        );
        assert!(
            (analytic_fidelity(FRAC_1_SQRT_2, Estimator::NormalizedElement).unwrap() - 0.5).abs()
                < 1e-12
        );
        assert!(
            (analytic_fidelity(0.5, Estimator::NormalizedElement).unwrap() - 2.0 / 3.0 * 0.8125)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn fidelity_decreases_with_entangling_power() {
        let mut pts: Vec<(f64, f64)> = grid()
            .into_iter()
            .map(|a| {
                (
                    Alpha::new(a).unwrap().entangling_power(),
                    analytic_fidelity(a, Estimator::NormalizedElement).unwrap(),
                )
            })
            .collect();
        pts.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in pts.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-15);
        }
    }

    #[test]
    fn monte_carlo_matches_both_estimators() {
        for est in [Estimator::NormalizedElement, Estimator::MaxEigenvector] {
            for a in [0.0, 0.5, 0.9] {
                let r = average_fidelity_with(a, 200_000, 17, est).unwrap();
                assert!(
                    (r.f_montecarlo - r.f_analytic).abs() < 3.0 * r.stderr + 1e-12,
                    "{est:?} {a}: {} vs {} ± {}",
                    r.f_montecarlo,
                    r.f_analytic,
                    r.stderr
                );
            }
        }
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let a = average_fidelity(0.3, 100_000, 5).unwrap();
        let b = average_fidelity(0.3, 100_000, 5).unwrap();
        assert_eq!(a, b);
        assert!(average_fidelity(0.3, 0, 5).is_err());
    }

    #[test]
    fn bounds_from_bell_parameter() {
        let b = fidelity_bound_from_chsh(2.421).unwrap();
        assert!((b.i_ind_bound - 0.535).abs() < 0.002);
        assert!((b.f_bound - 0.589).abs() < 0.002);
        let b = fidelity_bound_from_chsh(TSIRELSON_BOUND).unwrap();
        assert!(b.i_ind_bound.abs() < 1e-12 && (b.f_bound - 0.5).abs() < 1e-12);
        let b = fidelity_bound_from_chsh(2.0).unwrap();
        assert!((b.i_ind_bound - 1.0).abs() < 1e-15 && (b.f_bound - 2.0 / 3.0).abs() < 1e-15);
        assert!(fidelity_bound_from_chsh(1.9).is_err());
        assert!(fidelity_bound_from_chsh(2.9).is_err());
    }

    #[test]
    fn violation_report_chain() {
        let r = ViolationReport::from_measurement(2.421, 0.091).unwrap();
        assert!((r.i_corr - 1.465).abs() < 0.002);
        assert!((r.sigmas_above_local_bound - 4.6).abs() < 0.05);
        assert!(r.below_classical_limit);
        assert!(ViolationReport::from_measurement(2.421, 0.0).is_err());
    }
}
