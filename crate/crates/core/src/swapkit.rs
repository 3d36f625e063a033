//! The states and bases of the swapping protocol.
//!
//! Pair 0–1 and pair 2–3 each start in the singlet. Victor measures qubits 1
//! and 2 in the one-parameter family of orthonormal states
//!
//! ```text
//! ψ+(α) = α|+-> + β|-+>      ψ-(α) = β|+-> - α|-+>
//! φ+(α) = α|++> + β|-->      φ-(α) = β|++> - α|-->
//! ```
//!
//! with real `α ∈ [0, 1]` and `β = +√(1-α²)`. Outcome indices are fixed to
//! `(ψ+, ψ-, φ+, φ-) = (0, 1, 2, 3)` everywhere in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{Label, ProjectiveBasis, PureState};

pub const PSI_PLUS: usize = 0;
pub const PSI_MINUS: usize = 1;
pub const PHI_PLUS: usize = 2;
pub const PHI_MINUS: usize = 3;

pub const OUTCOME_NAMES: [&str; 4] = ["psi+", "psi-", "phi+", "phi-"];

/// Labels of the four particles: Alice holds 0, Victor 1 and 2, Bob 3.
pub const ALICE: Label = 0;
pub const VICTOR: (Label, Label) = (1, 2);
pub const BOB: Label = 3;

/// Measurement parameter `α` with its nonnegative partner `β = √(1-α²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        Ok(Self(alpha))
    }

    /// The parameter value where the family is the standard Bell basis.
    pub fn bell() -> Self {
        Self(std::f64::consts::FRAC_1_SQRT_2)
    }

    pub fn alpha(&self) -> f64 {
        self.0
    }

    pub fn beta(&self) -> f64 {
        (1.0 - self.0 * self.0).max(0.0).sqrt()
    }

    /// The partner parameter, `α ↦ β`.
    pub fn swapped(&self) -> Self {
        Self(self.beta())
    }

    /// `4α²β²`, the xx-information carried by every state of the family.
    pub fn entangling_power(&self) -> f64 {
        4.0 * self.0 * self.0 * self.beta() * self.beta()
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(a: f64) -> Result<Self> {
        Self::new(a)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

/// The four states `ψ+, ψ-, φ+, φ-` for one value of `α`, on an ordered qubit pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaBellBasis {
    alpha: Alpha,
    basis: ProjectiveBasis,
}

impl AlphaBellBasis {
    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn targets(&self) -> (Label, Label) {
        let t = self.basis.targets();
        (t[0], t[1])
    }

    pub fn state(&self, outcome: usize) -> Result<&PureState> {
        self.basis
            .states()
            .get(outcome)
            .ok_or(Error::OutcomeOutOfRange { outcome, count: 4 })
    }

    pub fn projective(&self) -> &ProjectiveBasis {
        &self.basis
    }
}

/// Amplitudes of the outcome-`k` state in `|++>, |+->, |-+>, |-->` order.
fn family_amplitudes(alpha: Alpha, outcome: usize) -> [f64; 4] {
    let (a, b) = (alpha.alpha(), alpha.beta());
    match outcome {
        PSI_PLUS => [0.0, a, b, 0.0],
        PSI_MINUS => [0.0, b, -a, 0.0],
        PHI_PLUS => [a, 0.0, 0.0, b],
        PHI_MINUS => [b, 0.0, 0.0, -a],
        _ => unreachable!("outcome index checked by callers"),
    }
}

/// Outcome-`k` state of the family on `(first, second)`.
pub fn family_state(
    alpha: Alpha,
    outcome: usize,
    first: Label,
    second: Label,
) -> Result<PureState> {
    if outcome > PHI_MINUS {
        return Err(Error::OutcomeOutOfRange { outcome, count: 4 });
    }
    PureState::from_real(vec![first, second], &family_amplitudes(alpha, outcome))
}

pub fn make_singlet(first: Label, second: Label) -> Result<PureState> {
    if first == second {
        return Err(Error::Labeling(vec![first, second]));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::from_real(vec![first, second], &[0.0, s, -s, 0.0])
}

/// `|ψ->_01 ⊗ |ψ->_23` on labels `[0, 1, 2, 3]`.
pub fn make_total_state() -> PureState {
    make_singlet(0, 1)
        .and_then(|a| a.tensor(&make_singlet(2, 3)?))
        .expect("fixed labels are distinct")
}

pub fn make_alpha_basis(alpha: f64, first: Label, second: Label) -> Result<AlphaBellBasis> {
    let alpha = Alpha::new(alpha)?;
    let states = (0..4)
        .map(|k| family_state(alpha, k, first, second))
        .collect::<Result<Vec<_>>>()?;
    Ok(AlphaBellBasis {
        alpha,
        basis: ProjectiveBasis::new(vec![first, second], states)?,
    })
}

/// One term `coefficient · |state03> ⊗ |state12>` of the swap decomposition.
#[derive(Debug, Clone)]
pub struct SwapTerm {
    pub coefficient: f64,
    pub state03: PureState,
    pub state12: PureState,
}

impl SwapTerm {
    /// The term as a 4-qubit vector on labels `[0, 1, 2, 3]` (not normalized by the coefficient).
    pub fn product(&self) -> PureState {
        self.state03
            .tensor(&self.state12)
            .and_then(|s| s.permuted(&[0, 1, 2, 3]))
            .expect("pairs 0-3 and 1-2 are disjoint")
    }
}

/// Coefficients of the four terms, outcome-indexed.
pub const SWAP_COEFFICIENTS: [f64; 4] = [0.5, -0.5, -0.5, 0.5];

/// Expansion of the total state in products of family states, where the
/// 0–3 state carries parameter `α` and the 1–2 state carries `β`.
pub fn swap_decomposition(alpha: f64) -> Result<Vec<SwapTerm>> {
    let alpha = Alpha::new(alpha)?;
    let partner = alpha.swapped();
    (0..4)
        .map(|k| {
            Ok(SwapTerm {
                coefficient: SWAP_COEFFICIENTS[k],
                state03: family_state(alpha, k, 0, 3)?,
                state12: family_state(partner, k, 1, 2)?,
            })
        })
        .collect()
}

/// State of particles 0 and 3 after Victor finds `outcome` in the family with
/// parameter `victor_alpha`, obtained by projecting the total state.
pub fn conditional_state(victor_alpha: f64, outcome: usize) -> Result<PureState> {
    let basis = make_alpha_basis(victor_alpha, VICTOR.0, VICTOR.1)?;
    let proj = make_total_state().project(basis.projective(), outcome)?;
    Ok(proj.remainder.expect("qubits 0 and 3 remain unmeasured"))
}

/// Closed-form conditional state: the same outcome with `α` and `β` exchanged.
pub fn conditional_state_closed_form(victor_alpha: f64, outcome: usize) -> Result<PureState> {
    family_state(Alpha::new(victor_alpha)?.swapped(), outcome, ALICE, BOB)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::Direction;
    use nalgebra::Matrix2;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn grid() -> Vec<f64> {
        (0..=100).map(|i| i as f64 / 100.0).collect()
    }

    #[test]
    fn singlet_layout_and_correlations() {
        let s = make_singlet(0, 1).unwrap();
        let amps: Vec<f64> = s.amps().iter().map(|z| z.re).collect();
        assert_eq!(amps, vec![0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]);
        for d in [Direction::x(), Direction::y(), Direction::z()] {
            let e = s.expectation(&[(0, d), (1, d)]).unwrap();
            assert!((e + 1.0).abs() < 1e-12);
        }
        assert!(make_singlet(2, 2).is_err());
    }

    #[test]
    fn singlet_invariant_under_identical_rotations() {
        let s = make_singlet(0, 1).unwrap();
        // exp(-i θ n·σ / 2) for a generic axis
        let n = Direction::from_spherical(0.8, 2.1);
        let theta = 1.3f64;
        let u = Matrix2::identity() * Complex64::new((theta / 2.0).cos(), 0.0)
            - n.sigma() * Complex64::new(0.0, (theta / 2.0).sin());
        let r = s
            .apply_unitary(0, &u)
            .unwrap()
            .apply_unitary(1, &u)
            .unwrap();
        assert!(r.approx_eq_up_to_phase(&s, 1e-12));
    }

    #[test]
    fn total_state_layout() {
        let t = make_total_state();
        assert_eq!(t.labels(), &[0, 1, 2, 3]);
        let mut nz = vec![];
        for (i, a) in t.amps().iter().enumerate() {
            if a.norm() > 1e-15 {
                assert!((a.norm() - 0.5).abs() < 1e-15);
                nz.push(i);
            }
        }
        assert_eq!(nz, vec![0b0101, 0b0110, 0b1001, 0b1010]);
        let r = t.reduced_density(&[0, 3]).unwrap();
        let quarter = nalgebra::DMatrix::<Complex64>::identity(4, 4) * Complex64::new(0.25, 0.0);
        assert!((r.matrix() - quarter).camax() < 1e-15);
        assert!((t.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_basis_endpoints() {
        let b = make_alpha_basis(FRAC_1_SQRT_2, 1, 2).unwrap();
        assert!(b
            .state(PSI_MINUS)
            .unwrap()
            .approx_eq_up_to_phase(&make_singlet(1, 2).unwrap(), 1e-12));

        let b = make_alpha_basis(1.0, 1, 2).unwrap();
        let product = PureState::basis_state(vec![1, 2], 0b01).unwrap();
        assert_eq!(b.state(PSI_PLUS).unwrap(), &product);

        assert!(make_alpha_basis(1.01, 1, 2).is_err());
        assert!(make_alpha_basis(-0.1, 1, 2).is_err());
        assert!(make_alpha_basis(f64::NAN, 1, 2).is_err());
    }

    #[test]
    fn alpha_basis_is_orthonormal_on_grid() {
        for a in grid() {
            let b = make_alpha_basis(a, 1, 2).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let g = b.state(i).unwrap().inner(b.state(j).unwrap()).unwrap();
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g.re - e).abs() < 1e-12 && g.im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn coefficients_are_overlaps_with_total_state() {
        let t = make_total_state();
        for a in [0.0, 0.3, FRAC_1_SQRT_2, 0.9, 1.0] {
            for term in swap_decomposition(a).unwrap() {
                let overlap = term.product().inner(&t).unwrap();
                assert!((overlap.re - term.coefficient).abs() < 1e-12);
                assert!(overlap.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn decomposition_reconstructs_total_state() {
        let t = make_total_state();
        for a in grid().into_iter().chain([0.3, FRAC_1_SQRT_2, 0.9]) {
            let mut sum = vec![Complex64::new(0.0, 0.0); 16];
            for term in swap_decomposition(a).unwrap() {
                for (acc, z) in sum.iter_mut().zip(term.product().amps()) {
                    *acc += z * term.coefficient;
                }
            }
            let err = sum
                .iter()
                .zip(t.amps())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "alpha {a}: {err}");
        }
    }

    #[test]
    fn bell_point_decomposes_into_bell_states() {
        let bell = make_alpha_basis(FRAC_1_SQRT_2, 0, 3).unwrap();
        for (k, term) in swap_decomposition(FRAC_1_SQRT_2)
            .unwrap()
            .iter()
            .enumerate()
        {
            assert!(term
                .state03
                .approx_eq_up_to_phase(bell.state(k).unwrap(), 1e-12));
        }
    }

    #[test]
    fn conditional_states_match_closed_form() {
        for a in grid() {
            for k in 0..4 {
                let sim = conditional_state(a, k).unwrap();
                let closed = conditional_state_closed_form(a, k).unwrap();
                assert!(
                    sim.approx_eq_up_to_phase(&closed, 1e-12),
                    "alpha {a} outcome {k}"
                );
            }
        }
    }

    #[test]
    fn separable_victor_gives_product_conditional_state() {
        let s = conditional_state(1.0, PSI_PLUS).unwrap();
        let expected = PureState::basis_state(vec![0, 3], 0b10).unwrap();
        assert!(s.approx_eq_up_to_phase(&expected, 1e-12));
    }

    #[test]
    fn victor_outcomes_are_uniform() {
        let t = make_total_state();
        for a in grid() {
            let b = make_alpha_basis(a, 1, 2).unwrap();
            for k in 0..4 {
                let p = t.project(b.projective(), k).unwrap().probability;
                assert!((p - 0.25).abs() < 1e-12);
            }
        }
    }
}
