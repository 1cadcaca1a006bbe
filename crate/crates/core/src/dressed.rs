//! Closed-form single-emitter steady state in the first dressed frame.

use num_complex::Complex64;

use crate::params::DressedFrame;

/// Steady-state observables of one emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// ⟨Rz⟩ ∈ [−1, 1].
    pub inversion: f64,
    /// ⟨R⁺⟩; ⟨R⁻⟩ is its conjugate.
    pub coherence: Complex64,
    /// Bare inversion ⟨Sz⟩ ∈ [−1/2, 1/2].
    pub bare_inversion: f64,
}

fn lorentz_denominator(f: &DressedFrame) -> f64 {
    f.gamma * f.gamma + 4.0 * f.detuning_bar * f.detuning_bar
}

/// ⟨Rz⟩ = 2Γ₋ / [2Γ₊ + (2Ḡ)²Γ/(Γ² + (2Δ̄)²)].
pub fn steady_inversion_dressed(f: &DressedFrame) -> f64 {
    let pump2 = 4.0 * f.pump * f.pump;
    2.0 * f.gamma_minus / (2.0 * f.gamma_plus + pump2 * f.gamma / lorentz_denominator(f))
}

/// ⟨R⁺⟩ = iḠ⟨Rz⟩ / (Γ − 2iΔ̄).
pub fn steady_coherence(f: &DressedFrame) -> Complex64 {
    let rz = steady_inversion_dressed(f);
    Complex64::new(0.0, f.pump * rz) / Complex64::new(f.gamma, -2.0 * f.detuning_bar)
}

/// ⟨Sz⟩ = cos2θ⟨Rz⟩/2 − sin2θ(⟨R⁺⟩ + ⟨R⁻⟩)/2, from the dressed observables.
pub fn bare_inversion_single(f: &DressedFrame) -> f64 {
    let rz = steady_inversion_dressed(f);
    let rp = steady_coherence(f);
    0.5 * f.cos2theta * rz - f.sin2theta * rp.re
}

/// ⟨Sz⟩ = (cos2θ + 4Δ̄Ḡ sin2θ/[Γ² + (2Δ̄)²])⟨Rz⟩/2, with the coherence
/// eliminated.
pub fn bare_inversion_combined(f: &DressedFrame) -> f64 {
    let rz = steady_inversion_dressed(f);
    let factor = f.cos2theta + 4.0 * f.detuning_bar * f.pump * f.sin2theta / lorentz_denominator(f);
    0.5 * factor * rz
}

pub fn steady_state(f: &DressedFrame) -> SteadyState {
    SteadyState {
        inversion: steady_inversion_dressed(f),
        coherence: steady_coherence(f),
        bare_inversion: bare_inversion_single(f),
    }
}

/// Contribution −sin2θ·Re⟨R⁺⟩ of the dressed coherences to ⟨Sz⟩.
pub fn coherence_contribution(f: &DressedFrame, s: &SteadyState) -> f64 {
    -f.sin2theta * s.coherence.re
}

/// Time derivatives of (⟨Rz⟩, ⟨R⁺⟩).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDerivative {
    pub inversion: f64,
    pub coherence: Complex64,
}

/// Right-hand sides of the dressed Bloch equations:
///
/// ```text
/// d⟨Rz⟩/dt = −2iḠ(⟨R⁻⟩ − ⟨R⁺⟩) − 2Γ₊⟨Rz⟩ + 2Γ₋
/// d⟨R⁺⟩/dt = (2iΔ̄ − Γ)⟨R⁺⟩ + iḠ⟨Rz⟩
/// ```
pub fn bloch_rhs(f: &DressedFrame, inversion: f64, coherence: Complex64) -> BlochDerivative {
    let i = Complex64::i();
    let d_rz =
        -2.0 * i * f.pump * (coherence.conj() - coherence) - 2.0 * f.gamma_plus * inversion + 2.0 * f.gamma_minus;
    let d_rp = Complex64::new(-f.gamma, 2.0 * f.detuning_bar) * coherence + i * f.pump * inversion;
    BlochDerivative { inversion: d_rz.re, coherence: d_rp }
}

/// Classical RK4 on [`bloch_rhs`], `steps` steps of size `dt`.
pub fn integrate_bloch(
    f: &DressedFrame,
    mut inversion: f64,
    mut coherence: Complex64,
    dt: f64,
    steps: usize,
) -> (f64, Complex64) {
    for _ in 0..steps {
        let k1 = bloch_rhs(f, inversion, coherence);
        let k2 = bloch_rhs(f, inversion + 0.5 * dt * k1.inversion, coherence + 0.5 * dt * k1.coherence);
        let k3 = bloch_rhs(f, inversion + 0.5 * dt * k2.inversion, coherence + 0.5 * dt * k2.coherence);
        let k4 = bloch_rhs(f, inversion + dt * k3.inversion, coherence + dt * k3.coherence);
        inversion += dt / 6.0 * (k1.inversion + 2.0 * k2.inversion + 2.0 * k3.inversion + k4.inversion);
        coherence += dt / 6.0 * (k1.coherence + 2.0 * k2.coherence + 2.0 * k3.coherence + k4.coherence);
    }
    (inversion, coherence)
}
