//! Double-dressed steady state: the exponential density matrix
//! ρ ∝ exp(−ηR̃z), the collective inversion ⟨R̃z⟩ of N emitters in the
//! symmetric subspace, and the bare inversion that follows from it.

use crate::error::{Error, Result};
use crate::oracle::{build_liouvillian_dicke, steady_state, DickeOperators};
use crate::params::{DoubleDressedFrame, DressedFrame, SystemParams};

/// Below this value of (N+1)|ln x| the collective inversion is evaluated by
/// its Taylor series in ln x instead of the closed form.
pub const SERIES_SWITCH: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveState {
    /// ⟨R̃z⟩ ∈ [−N, N].
    pub rz_tilde: f64,
    /// ⟨Sz⟩/N.
    pub sz_per_emitter: f64,
    /// x = Γ̄₊/Γ̄₋.
    pub ratio: f64,
}

/// How frequencies quoted "in units of Nγ" are mapped onto the internal
/// γ-based units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CollectiveScaling {
    /// Ω/(Nγ) and ω/(Nγ) as written: Ω and ω are multiplied by N, G is not.
    #[default]
    Literal,
    /// Every frequency, G included, is in units of Nγ.
    CollectiveUnit,
}

impl std::str::FromStr for CollectiveScaling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "literal" => Ok(Self::Literal),
            "collective_unit" | "collective-unit" => Ok(Self::CollectiveUnit),
            other => Err(format!("expected `literal` or `collective_unit`, got `{other}`")),
        }
    }
}

impl std::fmt::Display for CollectiveScaling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Literal => "literal",
            Self::CollectiveUnit => "collective_unit",
        })
    }
}

/// Rescales reference parameters (Ω, ω, G quoted per Nγ) for N emitters.
/// Δ/(2Ω) is preserved.
pub fn apply_collective_scaling(p: &SystemParams, scaling: CollectiveScaling) -> SystemParams {
    let n = p.emitters as f64;
    let mut q = *p;
    q.rabi *= n;
    q.detuning *= n;
    q.drive_freq *= n;
    if scaling == CollectiveScaling::CollectiveUnit {
        q.dipole_coupling *= n;
    }
    q
}

/// `1/expm1(a)` without overflow for large positive `a`.
fn inv_expm1(a: f64) -> f64 {
    if a > 0.0 {
        let e = (-a).exp();
        e / -(-a).exp_m1()
    } else {
        1.0 / a.exp_m1()
    }
}

/// Closed form −N + [(x^{N+1} − 1) − (N+1)(x − 1)] / [(x − 1)(x^{N+1} − 1)/2],
/// rewritten as −N + 2/(x − 1) − 2(N+1)/(x^{N+1} − 1) in ε = ln x.
///
/// Loses accuracy as x → 1; see [`collective_inversion_series`].
pub fn collective_inversion_closed(x: f64, n: usize) -> f64 {
    let eps = x.ln();
    let m = n as f64 + 1.0;
    -(n as f64) + 2.0 * inv_expm1(eps) - 2.0 * m * inv_expm1(m * eps)
}

/// Four-term expansion in ε = ln x about x = 1, built from the even
/// cumulants κ₂ₖ = B₂ₖ((N+1)^{2k} − 1)/(2k) of the uniform distribution on
/// {0, …, N}.
pub fn collective_inversion_series(x: f64, n: usize) -> f64 {
    let eps = x.ln();
    let m = n as f64 + 1.0;
    let m2 = m * m;
    let k2 = (m2 - 1.0) / 12.0;
    let k4 = -(m2 * m2 - 1.0) / 120.0;
    let k6 = (m2 * m2 * m2 - 1.0) / 252.0;
    let k8 = -(m2 * m2 * m2 * m2 - 1.0) / 240.0;
    let e2 = eps * eps;
    -2.0 * eps * (k2 + e2 * (k4 / 6.0 + e2 * (k6 / 120.0 + e2 * k8 / 5040.0)))
}

/// Steady collective inversion ⟨R̃z⟩ of N emitters for the rate ratio x.
pub fn collective_inversion(x: f64, n: usize) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::NonPositiveRatio(x));
    }
    if n == 0 {
        return Err(Error::InvalidParameter { name: "N", reason: "must be >= 1".into() });
    }
    if x.is_infinite() {
        return Ok(-(n as f64));
    }
    let scaled = (n as f64 + 1.0) * x.ln().abs();
    Ok(if scaled < SERIES_SWITCH { collective_inversion_series(x, n) } else { collective_inversion_closed(x, n) })
}

/// Populations p_s ∝ exp[−η(2s − N)] of the Dicke levels s = 0..=N.
pub fn dd_partition_state(eta: f64, n: usize) -> Vec<f64> {
    let nf = n as f64;
    let logw: Vec<f64> = (0..=n).map(|s| -eta * (2.0 * s as f64 - nf)).collect();
    let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

/// cos[2(θ − φ)].
pub fn frame_overlap(f: &DressedFrame, g: &DoubleDressedFrame) -> f64 {
    f.cos2theta * g.cos2phi + f.sin2theta * g.sin2phi
}

/// Total bare inversion ⟨Sz⟩ = cos[2(θ − φ)]⟨R̃z⟩/2 of N emitters.
pub fn bare_inversion_collective(f: &DressedFrame, g: &DoubleDressedFrame, n: usize) -> Result<f64> {
    Ok(0.5 * frame_overlap(f, g) * collective_inversion(g.ratio, n)?)
}

pub fn collective_state(f: &DressedFrame, g: &DoubleDressedFrame, n: usize) -> Result<CollectiveState> {
    let rz_tilde = collective_inversion(g.ratio, n)?;
    Ok(CollectiveState { rz_tilde, sz_per_emitter: 0.5 * frame_overlap(f, g) * rz_tilde / n as f64, ratio: g.ratio })
}

/// Largest |⟨R̃±⟩| in the numerically solved steady state of the collective
/// master equation.
pub fn dd_offdiagonal_check(g: &DoubleDressedFrame, n: usize) -> Result<f64> {
    let l = build_liouvillian_dicke(g, n)?;
    let rho = steady_state(&l)?.rho;
    let ops = DickeOperators::new(n);
    Ok(rho.expectation(&ops.raise).norm().max(rho.expectation(&ops.lower).norm()))
}
