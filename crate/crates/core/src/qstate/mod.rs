//! Dense pure-state engine for a handful of labeled qubits.
//!
//! Basis index convention: for labels `[l_0, .., l_{n-1}]` the amplitude of
//! `|b_0 .. b_{n-1}>` lives at index `Σ b_k 2^(n-1-k)`, so the first label is
//! the most significant bit. Bit 0 is `|z+>`, bit 1 is `|z->`.

mod basis;
mod density;
mod direction;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

pub use basis::ProjectiveBasis;
pub use density::DensityMatrix;
pub use direction::Direction;

use crate::error::{Error, Result};
use crate::rng::RngStream;

pub type Label = usize;

/// Tolerance for algebraic identities (norms, orthonormality, exact decompositions).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for quantities accumulated over many floating-point operations.
pub const NUMERIC_TOL: f64 = 1e-10;
/// Outcomes below this probability have no defined post-measurement state.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-14;
pub const MAX_QUBITS: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn check_labels(labels: &[Label]) -> Result<()> {
    if labels.len() > MAX_QUBITS {
        return Err(Error::TooManyQubits(labels.len()));
    }
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::Labeling(labels.to_vec()));
        }
    }
    Ok(())
}

/// Extracts the bits at `positions` (MSB-first positions in an n-qubit index)
/// and packs them MSB-first.
fn gather(index: usize, n: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .fold(0, |acc, &p| (acc << 1) | ((index >> (n - 1 - p)) & 1))
}

/// Normalized pure state over an ordered list of distinct qubit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    labels: Vec<Label>,
    amps: Vec<Complex64>,
}

/// Result of a projective measurement outcome.
#[derive(Debug, Clone)]
pub struct Projection {
    pub probability: f64,
    /// Renormalized post-measurement state on all original labels.
    pub post_state: PureState,
    /// State of the unmeasured qubits, or `None` when every qubit was measured.
    pub remainder: Option<PureState>,
}

impl PureState {
    /// Validates labels, dimension, finiteness and unit norm.
    pub fn new(labels: Vec<Label>, amps: Vec<Complex64>) -> Result<Self> {
        check_labels(&labels)?;
        let dim = 1usize << labels.len();
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: amps.len(),
            });
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::NotNormalized(norm.sqrt()));
        }
        Ok(Self { labels, amps })
    }

    /// Like [`PureState::new`] but rescales `amps` to unit norm first.
    pub fn normalized(labels: Vec<Label>, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        if norm < 1e-300 {
            return Err(Error::NotNormalized(norm));
        }
        for z in &mut amps {
            *z /= norm;
        }
        Self::new(labels, amps)
    }

    pub fn from_real(labels: Vec<Label>, amps: &[f64]) -> Result<Self> {
        Self::new(
            labels,
            amps.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        )
    }

    pub fn basis_state(labels: Vec<Label>, index: usize) -> Result<Self> {
        let dim = 1usize << labels.len();
        if index >= dim {
            return Err(Error::OutcomeOutOfRange {
                outcome: index,
                count: dim,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(labels, amps)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    fn position(&self, label: Label) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::UnknownLabel(label))
    }

    fn positions(&self, labels: &[Label]) -> Result<Vec<usize>> {
        labels.iter().map(|&l| self.position(l)).collect()
    }

    /// Tensor product; labels of `other` are appended after those of `self`.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut labels = self.labels.clone();
        for &l in &other.labels {
            if labels.contains(&l) {
                return Err(Error::Labeling(
                    self.labels.iter().chain(&other.labels).copied().collect(),
                ));
            }
            labels.push(l);
        }
        check_labels(&labels)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(PureState { labels, amps })
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.labels != other.labels {
            return Err(Error::LabelMismatch {
                left: self.labels.clone(),
                right: other.labels.clone(),
            });
        }
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &PureState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Same state with qubits reordered to `order` (a permutation of the labels).
    pub fn permuted(&self, order: &[Label]) -> Result<PureState> {
        if order.len() != self.labels.len() {
            return Err(Error::LabelMismatch {
                left: self.labels.clone(),
                right: order.to_vec(),
            });
        }
        check_labels(order)?;
        let positions = self.positions(order)?;
        let n = self.labels.len();
        let mut amps = vec![ZERO; self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            amps[gather(i, n, &positions)] = *a;
        }
        Ok(PureState {
            labels: order.to_vec(),
            amps,
        })
    }

    /// Applies a 2×2 matrix to one qubit. The result is not renormalized, so
    /// this is only a state map for unitaries; see [`PureState::apply_unitary`].
    fn apply_1q_raw(&self, label: Label, m: &Matrix2<Complex64>) -> Result<Vec<Complex64>> {
        let pos = self.position(label)?;
        let n = self.labels.len();
        let bit = 1usize << (n - 1 - pos);
        let mut out = self.amps.clone();
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                out[i] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
                out[i | bit] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
            }
        }
        Ok(out)
    }

    pub fn apply_unitary(&self, label: Label, u: &Matrix2<Complex64>) -> Result<PureState> {
        let amps = self.apply_1q_raw(label, u)?;
        PureState::new(self.labels.clone(), amps)
    }

    /// Equality up to a global phase, aligning on the largest-magnitude amplitude.
    pub fn approx_eq_up_to_phase(&self, other: &PureState, tol: f64) -> bool {
        if self.labels != other.labels {
            return false;
        }
        let (k, _) = self
            .amps
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, z)| {
                if z.norm() > best.1 {
                    (i, z.norm())
                } else {
                    best
                }
            });
        if other.amps[k].norm() < 1e-300 {
            return false;
        }
        let phase = (self.amps[k] / other.amps[k]).unscale((self.amps[k] / other.amps[k]).norm());
        self.amps
            .iter()
            .zip(&other.amps)
            .all(|(a, b)| (a - phase * b).norm() <= tol)
    }

    /// Projects onto outcome `outcome` of `basis`, returning the Born probability
    /// and the renormalized post-measurement state.
    pub fn project(&self, basis: &ProjectiveBasis, outcome: usize) -> Result<Projection> {
        let target = basis
            .states()
            .get(outcome)
            .ok_or(Error::OutcomeOutOfRange {
                outcome,
                count: basis.len(),
            })?;
        let tpos = self.positions(basis.targets())?;
        let rest_labels: Vec<Label> = self
            .labels
            .iter()
            .copied()
            .filter(|l| !basis.targets().contains(l))
            .collect();
        let rpos = self.positions(&rest_labels)?;
        let n = self.labels.len();

        let mut rest = vec![ZERO; 1 << rest_labels.len()];
        for (i, a) in self.amps.iter().enumerate() {
            rest[gather(i, n, &rpos)] += target.amps()[gather(i, n, &tpos)].conj() * a;
        }
        let probability: f64 = rest.iter().map(|z| z.norm_sqr()).sum();
        if probability < MIN_OUTCOME_PROBABILITY {
            return Err(Error::ImpossibleOutcome {
                outcome,
                probability,
            });
        }
        let scale = probability.sqrt();
        for z in &mut rest {
            *z /= scale;
        }

        let post_amps = (0..self.amps.len())
            .map(|i| target.amps()[gather(i, n, &tpos)] * rest[gather(i, n, &rpos)])
            .collect();
        let post_state = PureState::normalized(self.labels.clone(), post_amps)?;
        let remainder = if rest_labels.is_empty() {
            None
        } else {
            Some(PureState::normalized(rest_labels, rest)?)
        };
        Ok(Projection {
            probability,
            post_state,
            remainder,
        })
    }

    /// `<⊗ n_i·σ>` over the listed qubits.
    pub fn expectation(&self, observables: &[(Label, Direction)]) -> Result<f64> {
        let labels: Vec<Label> = observables.iter().map(|(l, _)| *l).collect();
        check_labels(&labels)?;
        let mut applied = self.clone();
        for (label, dir) in observables {
            applied.amps = applied.apply_1q_raw(*label, &dir.sigma())?;
        }
        Ok(self.inner_unchecked(&applied).re)
    }

    /// Partial trace onto `keep`, in the order given.
    pub fn reduced_density(&self, keep: &[Label]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter("keep set is empty".into()));
        }
        check_labels(keep)?;
        let kpos = self.positions(keep)?;
        let traced: Vec<Label> = self
            .labels
            .iter()
            .copied()
            .filter(|l| !keep.contains(l))
            .collect();
        let tpos = self.positions(&traced)?;
        let n = self.labels.len();
        let (kd, td) = (1usize << keep.len(), 1usize << traced.len());

        let mut block = DMatrix::<Complex64>::zeros(kd, td);
        for (i, a) in self.amps.iter().enumerate() {
            block[(gather(i, n, &kpos), gather(i, n, &tpos))] = *a;
        }
        let rho = &block * block.adjoint();
        DensityMatrix::new(keep.to_vec(), rho)
    }
}

/// Joint Born distribution for measuring each basis on its own qubits.
///
/// Keys list one outcome per basis, in the order the bases are given. Every
/// outcome tuple is present, impossible ones with probability 0.
pub fn born_distribution(
    state: &PureState,
    bases: &[&ProjectiveBasis],
) -> Result<BTreeMap<Vec<usize>, f64>> {
    let all: Vec<Label> = bases
        .iter()
        .flat_map(|b| b.targets().iter().copied())
        .collect();
    check_labels(&all)?;
    for &l in &all {
        state.position(l)?;
    }

    let mut out = BTreeMap::new();
    let mut keys: Vec<Vec<usize>> = vec![vec![]];
    for b in bases {
        keys = keys
            .into_iter()
            .flat_map(|k| {
                (0..b.len()).map(move |o| {
                    let mut k = k.clone();
                    k.push(o);
                    k
                })
            })
            .collect();
    }
    for k in keys {
        out.insert(k, 0.0);
    }

    fn descend(
        state: &PureState,
        bases: &[&ProjectiveBasis],
        prefix: &mut Vec<usize>,
        weight: f64,
        out: &mut BTreeMap<Vec<usize>, f64>,
    ) -> Result<()> {
        let Some((first, rest)) = bases.split_first() else {
            out.insert(prefix.clone(), weight);
            return Ok(());
        };
        for outcome in 0..first.len() {
            let proj = match state.project(first, outcome) {
                Ok(p) => p,
                Err(Error::ImpossibleOutcome { .. }) => continue,
                Err(e) => return Err(e),
            };
            prefix.push(outcome);
            let w = weight * proj.probability;
            match (&proj.remainder, rest.is_empty()) {
                (_, true) => {
                    out.insert(prefix.clone(), w);
                }
                (Some(r), false) => descend(r, rest, prefix, w, out)?,
                (None, false) => unreachable!("disjoint bases leave qubits unmeasured"),
            }
            prefix.pop();
        }
        Ok(())
    }

    if !bases.is_empty() {
        descend(state, bases, &mut Vec::new(), 1.0, &mut out)?;
    }
    Ok(out)
}

/// Haar-random single-qubit pure state: a normalized pair of standard complex Gaussians.
pub fn haar_random_qubit(rng: &mut RngStream, label: Label) -> PureState {
    loop {
        let mut draw = || Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
        let amps = vec![draw(), draw()];
        if let Ok(s) = PureState::normalized(vec![label], amps) {
            return s;
        }
    }
}

/// Haar-random pure state on `labels` (same Gaussian construction in `2^n` dimensions).
pub fn haar_random_state(rng: &mut RngStream, labels: Vec<Label>) -> Result<PureState> {
    check_labels(&labels)?;
    let dim = 1usize << labels.len();
    loop {
        let amps = (0..dim)
            .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        match PureState::normalized(labels.clone(), amps) {
            Ok(s) => return Ok(s),
            Err(Error::NotNormalized(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}
