use nalgebra::DVector;
use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};
use crate::params::{DoubleDressedFrame, DressedFrame};

/// Largest emitter number accepted by [`build_liouvillian_dicke`].
pub const DICKE_CAPACITY: usize = 12;

/// Which master equation a [`Liouvillian`] was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// Single emitter, first dressed frame.
    SingleDressed { pump: f64, detuning_bar: f64, theta: f64 },
    /// N emitters in the symmetric subspace, double-dressed frame.
    Dicke { emitters: usize, splitting: f64, ratio: f64 },
}

/// Collective ladder operators on the Dicke states |s⟩, s = 0..=N excitations.
///
/// For N = 1 these are R⁺ = |2⟩⟨1|, R⁻ and Rz with eigenvalues ±1, basis
/// order (lower, upper).
#[derive(Debug, Clone)]
pub struct DickeOperators {
    pub raise: CMatrix,
    pub lower: CMatrix,
    /// Σ R̃zⱼ, eigenvalues 2s − N.
    pub inversion: CMatrix,
}

impl DickeOperators {
    pub fn new(n: usize) -> Self {
        let dim = n + 1;
        let mut raise = CMatrix::zeros(dim, dim);
        for s in 0..n {
            // spin-N/2 matrix element √((J − m)(J + m + 1)) with m = s − N/2
            raise[(s + 1, s)] = Complex64::from((((s + 1) * (n - s)) as f64).sqrt());
        }
        let lower = raise.adjoint();
        let diag = DVector::from_iterator(dim, (0..dim).map(|s| Complex64::from(2.0 * s as f64 - n as f64)));
        Self { raise, lower, inversion: CMatrix::from_diagonal(&diag) }
    }
}

/// Dense generator acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub matrix: CMatrix,
    /// Hilbert-space dimension D; the superoperator is D² × D².
    pub dim: usize,
    pub generator: Generator,
    norm: f64,
}

impl Liouvillian {
    /// Wraps an arbitrary D² × D² generator.
    pub fn from_matrix(matrix: CMatrix, dim: usize, generator: Generator) -> Self {
        assert_eq!(matrix.nrows(), dim * dim);
        assert!(matrix.is_square());
        let norm = matrix.singular_values().max();
        Self { matrix, dim, generator, norm }
    }

    /// Spectral norm ‖L‖₂.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// max over columns of |Σ_k L[(k,k), col]|: zero iff the trace
    /// functional is a left null vector.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        (0..d * d)
            .map(|col| (0..d).map(|k| self.matrix[(k * d + k, col)]).sum::<Complex64>().norm())
            .fold(0.0, f64::max)
    }

    /// Applies L to a column-stacked density matrix.
    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.matrix * v
    }
}

/// vec(A X) = (I ⊗ A) vec(X)
fn left(a: &CMatrix) -> CMatrix {
    CMatrix::identity(a.nrows(), a.nrows()).kronecker(a)
}

/// vec(X B) = (Bᵀ ⊗ I) vec(X)
fn right(b: &CMatrix) -> CMatrix {
    b.transpose().kronecker(&CMatrix::identity(b.nrows(), b.nrows()))
}

/// −i[H, ·]
fn commutator(h: &CMatrix) -> CMatrix {
    (left(h) - right(h)) * Complex64::new(0.0, -1.0)
}

/// ρ ↦ −rate([A, Bρ] + H.c.) = −rate(ABρ − BρA + ρB†A† − A†ρB†).
fn damping(rate: f64, a: &CMatrix, b: &CMatrix) -> CMatrix {
    let ab = a * b;
    let ad = a.adjoint();
    let bd = b.adjoint();
    let term = left(&ab) - left(b) * right(a) + right(&(&bd * &ad)) - left(&ad) * right(&bd);
    term * Complex64::from(-rate)
}

/// Generator of the single-emitter dressed master equation
///
/// ```text
/// ρ̇ = −i[Δ̄Rz − Ḡ(R⁺ + R⁻), ρ] − (γ₀/4)sin²2θ[Rz, Rzρ]
///      − γ₊cos⁴θ[R⁺, R⁻ρ] − γ₋sin⁴θ[R⁻, R⁺ρ] + H.c.
/// ```
///
/// with γ₀ = γ± = 1.
pub fn build_liouvillian_single(f: &DressedFrame) -> Liouvillian {
    let ops = DickeOperators::new(1);
    let h = &ops.inversion * Complex64::from(f.detuning_bar) - (&ops.raise + &ops.lower) * Complex64::from(f.pump);
    let (s, c) = f.theta.sin_cos();
    let s2t = (2.0 * f.theta).sin();
    let matrix = commutator(&h)
        + damping(s2t * s2t / 4.0, &ops.inversion, &ops.inversion)
        + damping(c.powi(4), &ops.raise, &ops.lower)
        + damping(s.powi(4), &ops.lower, &ops.raise);
    Liouvillian::from_matrix(
        matrix,
        2,
        Generator::SingleDressed { pump: f.pump, detuning_bar: f.detuning_bar, theta: f.theta },
    )
}

/// Generator of the collective double-dressed master equation
///
/// ```text
/// ρ̇ = −iḠ_R[R̃z, ρ] − Γ̄₀[R̃z, R̃zρ] − Γ̄₊[R̃⁺, R̃⁻ρ] − Γ̄₋[R̃⁻, R̃⁺ρ] + H.c.
/// ```
///
/// on the N + 1 symmetric Dicke states.
pub fn build_liouvillian_dicke(g: &DoubleDressedFrame, n: usize) -> Result<Liouvillian> {
    if n == 0 {
        return Err(Error::InvalidParameter { name: "N", reason: "must be >= 1".into() });
    }
    if n > DICKE_CAPACITY {
        return Err(Error::Capacity { requested: n, max: DICKE_CAPACITY });
    }
    let ops = DickeOperators::new(n);
    let h = &ops.inversion * Complex64::from(g.splitting);
    let matrix = commutator(&h)
        + damping(g.gamma_zero, &ops.inversion, &ops.inversion)
        + damping(g.gamma_plus, &ops.raise, &ops.lower)
        + damping(g.gamma_minus, &ops.lower, &ops.raise);
    Ok(Liouvillian::from_matrix(
        matrix,
        n + 1,
        Generator::Dicke { emitters: n, splitting: g.splitting, ratio: g.ratio },
    ))
}
