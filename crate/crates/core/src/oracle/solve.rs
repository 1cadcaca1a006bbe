use nalgebra::DVector;
use num_complex::Complex64;

use super::{CMatrix, DensityMatrix, Liouvillian};
use crate::error::{Error, Result};

/// Relative singular-value gap below which the null space is treated as
/// possibly degenerate.
const GAP_THRESHOLD: f64 = 1e-6;
const AGREEMENT_TOL: f64 = 1e-6;
const TRACE_DRIFT_TOL: f64 = 1e-9;
const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePath {
    NullSpace,
    Propagation,
}

#[derive(Debug, Clone)]
pub struct Stationary {
    pub rho: DensityMatrix,
    pub path: SolvePath,
    /// Second-smallest singular value over ‖L‖.
    pub gap: f64,
}

fn normalized(v: &DVector<Complex64>, dim: usize) -> DensityMatrix {
    let mut rho = DensityMatrix::from_vector(v, dim);
    let tr = rho.trace();
    rho.scale(tr.inv());
    rho.hermitize();
    rho
}

/// Steady state of `l` from the right singular vector of its smallest
/// singular value; falls back to long-time propagation when the singular
/// value gap does not certify a unique null vector.
pub fn steady_state(l: &Liouvillian) -> Result<Stationary> {
    let norm = l.norm();
    if norm == 0.0 {
        return Err(Error::ZeroGenerator);
    }
    let svd = l.matrix.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^H");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let null = v_t.row(order[0]).adjoint();
    let null_state = normalized(&null, l.dim);
    let gap = svd.singular_values[order[1]] / norm;
    if gap > GAP_THRESHOLD {
        return Ok(Stationary { rho: null_state, path: SolvePath::NullSpace, gap });
    }

    // Relax for many multiples of the slowest resolved time scale.
    let slowest = svd.singular_values[order[1]].max(GAP_THRESHOLD * norm);
    let t = 60.0 / slowest;
    let propagated = propagate(l, &DensityMatrix::maximally_mixed(l.dim), t)?;
    let diff = propagated.distance(&null_state);
    if diff > AGREEMENT_TOL {
        return Err(Error::DegenerateSteadyState(diff));
    }
    Ok(Stationary { rho: propagated, path: SolvePath::Propagation, gap })
}

/// One classical RK4 step for ρ̇ = Lρ, which for a linear generator is the
/// matrix polynomial I + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24.
pub(crate) fn rk4_step_matrix(l: &CMatrix, h: f64) -> CMatrix {
    let n = l.nrows();
    let hl = l * Complex64::from(h);
    // Horner form of the degree-4 Taylor polynomial.
    let id = CMatrix::identity(n, n);
    let mut p = &id + &hl * Complex64::from(0.25);
    p = &id + (&hl * p) * Complex64::from(1.0 / 3.0);
    p = &id + (&hl * p) * Complex64::from(0.5);
    &id + &hl * p
}

/// Number of fixed RK4 steps used to reach time `t` with h ≤ 0.01/‖L‖.
pub(crate) fn step_count(l: &Liouvillian, t: f64) -> usize {
    let h_max = 0.01 / l.norm();
    (t / h_max).ceil().max(1.0) as usize
}

/// Fixed-step RK4 evolution of `rho0` for a time `t`.
///
/// The step is h = t/n with n the smallest count giving h ≤ 0.01/‖L‖. For a
/// linear generator n identical RK4 steps equal the n-th power of the
/// one-step matrix, which is applied by repeated squaring.
pub fn propagate(l: &Liouvillian, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Propagation(format!("duration must be finite and >= 0, got {t}")));
    }
    if t == 0.0 || l.norm() == 0.0 {
        return Ok(rho0.clone());
    }
    let steps = step_count(l, t);
    let h = t / steps as f64;
    let mut power = rk4_step_matrix(&l.matrix, h);
    let mut v = rho0.to_vector();
    let mut k = steps;
    while k > 0 {
        if k & 1 == 1 {
            v = &power * v;
        }
        k >>= 1;
        if k > 0 {
            power = &power * &power;
        }
    }
    let mut rho = DensityMatrix::from_vector(&v, l.dim);
    let drift = (rho.trace() - rho0.trace()).norm();
    if drift > TRACE_DRIFT_TOL {
        return Err(Error::Propagation(format!("trace drift {drift:e} exceeds {TRACE_DRIFT_TOL:e}")));
    }
    let tr = rho.trace();
    rho.scale(rho0.trace() / tr);
    let e = rho.min_eigenvalue();
    if e < -POSITIVITY_TOL {
        return Err(Error::Propagation(format!("positivity violated: eigenvalue {e:e}; step too large")));
    }
    Ok(rho)
}
