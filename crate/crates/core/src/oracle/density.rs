use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{max_abs, CMatrix};

/// A density matrix in a fixed finite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn from_matrix(m: CMatrix) -> Self {
        assert!(m.is_square(), "density matrix must be square");
        Self(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim) / Complex64::from(dim as f64))
    }

    /// Pure state |k⟩⟨k|.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    /// Column-stacked vector, as acted on by [`super::Liouvillian`].
    pub fn to_vector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(self.0.as_slice())
    }

    pub fn from_vector(v: &DVector<Complex64>, dim: usize) -> Self {
        Self(DMatrix::from_column_slice(dim, dim, v.as_slice()))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Tr(ρ A).
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        (&self.0 * op).trace()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.0[(k, k)].re).collect()
    }

    pub fn max_offdiagonal(&self) -> f64 {
        let n = self.dim();
        let mut m = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.0[(i, j)].norm());
                }
            }
        }
        m
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.0 - self.0.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn scale(&mut self, s: Complex64) {
        self.0 *= s;
    }

    pub(crate) fn hermitize(&mut self) {
        self.0 = (&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
    }

    /// Checks Hermiticity, unit trace and positivity.
    pub fn check_invariants(&self, hermitian_tol: f64, trace_tol: f64, positivity_tol: f64) -> Result<(), String> {
        let h = self.hermiticity_defect();
        if h > hermitian_tol {
            return Err(format!("not Hermitian: defect {h:e}"));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > trace_tol {
            return Err(format!("trace {tr} differs from 1"));
        }
        let e = self.min_eigenvalue();
        if e < -positivity_tol {
            return Err(format!("negative eigenvalue {e:e}"));
        }
        Ok(())
    }

    /// Largest elementwise distance.
    pub fn distance(&self, other: &Self) -> f64 {
        max_abs(&(&self.0 - &other.0))
    }
}
