use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;

use super::{Direction, Label, ALGEBRAIC_TOL};
use crate::error::{Error, Result};

const EIGEN_FLOOR: f64 = -1e-10;

/// Hermitian, unit-trace, positive semidefinite matrix over labeled qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<Label>,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(labels: Vec<Label>, matrix: DMatrix<Complex64>) -> Result<Self> {
        super::check_labels(&labels)?;
        let dim = 1usize << labels.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: matrix.len(),
            });
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let herm_dev = (&matrix - matrix.adjoint()).camax();
        if herm_dev > ALGEBRAIC_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "not Hermitian (deviation {herm_dev:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > ALGEBRAIC_TOL {
            return Err(Error::NotDensityMatrix(format!("trace {trace} != 1")));
        }
        let dm = Self { labels, matrix };
        let min_eig = dm.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < EIGEN_FLOOR {
            return Err(Error::NotDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(dm)
    }

    pub fn maximally_mixed(labels: Vec<Label>) -> Result<Self> {
        let dim = 1usize << labels.len();
        let m = DMatrix::<Complex64>::identity(dim, dim) / Complex64::new(dim as f64, 0.0);
        Self::new(labels, m)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `Tr(ρ O)`, real part.
    pub fn expectation(&self, observable: &DMatrix<Complex64>) -> f64 {
        (&self.matrix * observable).trace().re
    }

    /// Bloch vector `r_i = Tr(ρ σ_i)` of a one-qubit state.
    pub fn bloch_vector(&self) -> Result<Vector3<f64>> {
        if self.labels.len() != 1 {
            return Err(Error::InvalidParameter(format!(
                "Bloch vector needs one qubit, got {}",
                self.labels.len()
            )));
        }
        let m = &self.matrix;
        Ok(Vector3::new(
            2.0 * m[(1, 0)].re,
            2.0 * m[(1, 0)].im,
            (m[(0, 0)] - m[(1, 1)]).re,
        ))
    }

    /// Outcome probabilities `(p+, p-)` for measuring `n·σ` on a one-qubit state.
    pub fn spin_probabilities(&self, direction: &Direction) -> Result<(f64, f64)> {
        let mean = self.bloch_vector()?.dot(&direction.vector());
        Ok(((1.0 + mean) / 2.0, (1.0 - mean) / 2.0))
    }
}
