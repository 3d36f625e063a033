use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Label, PureState, ALGEBRAIC_TOL};
use crate::error::{Error, Result};

/// A complete orthonormal measurement basis on a subset of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveBasis {
    targets: Vec<Label>,
    states: Vec<PureState>,
}

impl ProjectiveBasis {
    pub fn new(targets: Vec<Label>, states: Vec<PureState>) -> Result<Self> {
        super::check_labels(&targets)?;
        let dim = 1usize << targets.len();
        if states.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: states.len(),
            });
        }
        for s in &states {
            if s.labels() != targets.as_slice() {
                return Err(Error::LabelMismatch {
                    left: targets.clone(),
                    right: s.labels().to_vec(),
                });
            }
        }

        let mut gram_dev = 0.0f64;
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                let g = a.inner_unchecked(b);
                gram_dev = gram_dev.max((g - Complex64::new(expected, 0.0)).norm());
            }
        }
        let mut resolution = DMatrix::<Complex64>::zeros(dim, dim);
        for s in &states {
            let v = nalgebra::DVector::from_column_slice(s.amps());
            resolution += &v * v.adjoint();
        }
        let completeness_dev = (resolution - DMatrix::identity(dim, dim)).camax();
        let dev = gram_dev.max(completeness_dev);
        if dev > ALGEBRAIC_TOL {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self { targets, states })
    }

    /// The computational (z) basis on `targets`.
    pub fn computational(targets: Vec<Label>) -> Result<Self> {
        let dim = 1usize << targets.len();
        let states = (0..dim)
            .map(|i| PureState::basis_state(targets.clone(), i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(targets, states)
    }

    pub fn targets(&self) -> &[Label] {
        &self.targets
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}
