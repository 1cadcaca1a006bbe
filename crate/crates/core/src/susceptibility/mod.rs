//! Weak-probe susceptibility: the closed-form six-line spectrum, the
//! refractive index and recovery of the permanent-dipole difference from the
//! splitting of the central pair of lines.

mod analysis;
mod extract;

pub use analysis::{fit_lorentzians, hilbert_real_part, local_extrema, Extremum, ExtremumKind, LorentzianFit};
pub use extract::{extract_dipole_difference, invert_splitting, measure_splitting, DipoleEstimate};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::double_dressed::collective_inversion;
use crate::error::{Error, Result};
use crate::params::{DoubleDressedFrame, DressedFrame, PhysicalParams, DEBYE, HBAR};

/// Which steady inversion ⟨R̃z⟩ multiplies the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InversionSource {
    /// One emitter, (1 − x)/(1 + x).
    #[default]
    Single,
    /// Collective ⟨R̃z⟩ of N emitters divided by N.
    CollectivePerEmitter,
}

impl std::str::FromStr for InversionSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(Self::Single),
            "collective" | "collective_per_emitter" => Ok(Self::CollectivePerEmitter),
            other => Err(format!("expected `single` or `collective`, got `{other}`")),
        }
    }
}

impl std::fmt::Display for InversionSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Single => "single",
            Self::CollectivePerEmitter => "collective",
        })
    }
}

/// χ sampled on a probe-detuning grid, in units of N̄d²/(ħγ).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Δp = ν − ω_L, strictly increasing.
    pub detunings: Vec<f64>,
    pub chi: Vec<Complex64>,
    /// N̄d²/(ħγ) in Gaussian units, when physical parameters were given.
    pub prefactor: Option<f64>,
    pub inversion_source: InversionSource,
}

impl Spectrum {
    pub fn imag(&self) -> Vec<f64> {
        self.chi.iter().map(|z| z.im).collect()
    }

    pub fn real(&self) -> Vec<f64> {
        self.chi.iter().map(|z| z.re).collect()
    }

    /// max |χ| over the grid.
    pub fn peak(&self) -> f64 {
        self.chi.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `points` equally spaced values from `min` to `max` inclusive.
pub fn probe_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !min.is_finite() || !max.is_finite() || max <= min {
        return Err(Error::InvalidGrid(format!(
            "need finite min < max and at least 2 points, got [{min}, {max}] with {points}"
        )));
    }
    Ok(crate::linspace(min, max, points))
}

/// Δp/γ ∈ [−250, 250] with 10001 points.
pub fn default_probe_grid() -> Vec<f64> {
    crate::linspace(-250.0, 250.0, 10001)
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 points, got {}", grid.len())));
    }
    if let Some(v) = grid.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite detuning {v}")));
    }
    if let Some(w) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!("not strictly increasing at index {}", w + 1)));
    }
    Ok(())
}

/// Closed-form χ at one probe detuning.
pub fn chi_at(f: &DressedFrame, g: &DoubleDressedFrame, rz_tilde: f64, probe: f64) -> Complex64 {
    let lorentz = |u: f64| Complex64::new(g.width, -(probe + u)).inv();
    let two_gr = 2.0 * g.splitting;
    let omega = f.drive_freq;
    let central = 0.25 * (f.sin2theta * g.sin2phi).powi(2);
    let terms = (lorentz(two_gr) - lorentz(-two_gr)) * central
        + (lorentz(two_gr - omega) * g.sin4() - lorentz(-two_gr - omega) * g.cos4()) * f.cos4()
        + (lorentz(two_gr + omega) * g.cos4() - lorentz(-two_gr + omega) * g.sin4()) * f.sin4();
    Complex64::new(0.0, rz_tilde) * terms
}

/// Closed-form χ over `grid`: six complex Lorentzians of width Γ̄s at
/// ±2Ḡ_R, ω ± 2Ḡ_R and −ω ± 2Ḡ_R scaled by i⟨R̃z⟩.
pub fn chi_closed_form(f: &DressedFrame, g: &DoubleDressedFrame, rz_tilde: f64, grid: &[f64]) -> Result<Spectrum> {
    validate_grid(grid)?;
    let chi = grid.par_iter().map(|&dp| chi_at(f, g, rz_tilde, dp)).collect();
    Ok(Spectrum { detunings: grid.to_vec(), chi, prefactor: None, inversion_source: InversionSource::Single })
}

/// The ⟨R̃z⟩ that multiplies the spectrum.
pub fn inversion_for_spectrum(g: &DoubleDressedFrame, emitters: usize, source: InversionSource) -> Result<f64> {
    match source {
        InversionSource::Single => collective_inversion(g.ratio, 1),
        InversionSource::CollectivePerEmitter => Ok(collective_inversion(g.ratio, emitters)? / emitters as f64),
    }
}

/// Centers of the six lines, sorted, duplicates kept.
pub fn line_centers(g: &DoubleDressedFrame, omega: f64) -> [f64; 6] {
    let two_gr = 2.0 * g.splitting;
    let mut c = [-two_gr, two_gr, omega - two_gr, omega + two_gr, -omega + two_gr, -omega - two_gr];
    c.sort_by(f64::total_cmp);
    c
}

/// N̄d²/(ħγ) in Gaussian units: d in Debye, N̄ in cm⁻³, γ in s⁻¹.
pub fn susceptibility_prefactor(phys: &PhysicalParams, gamma_ref: f64) -> f64 {
    let d = phys.dipole * DEBYE;
    phys.density * d * d / (HBAR * gamma_ref)
}

/// 4π N̄d²/(ħγ): the coefficient of χ in the Gaussian dielectric function
/// ε = 1 + 4πχ.
pub fn dielectric_scale(phys: &PhysicalParams, gamma_ref: f64) -> f64 {
    4.0 * std::f64::consts::PI * susceptibility_prefactor(phys, gamma_ref)
}

/// n = √(1 + scale·χ′).
pub fn refractive_index(chi_real: f64, scale: f64) -> Result<f64> {
    let radicand = 1.0 + scale * chi_real;
    if radicand.is_nan() || radicand <= 0.0 {
        return Err(Error::RefractionBreakdown(radicand));
    }
    Ok(radicand.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_frames, SystemParams};

    fn reference_frames(ratio: f64) -> (DressedFrame, DoubleDressedFrame) {
        derive_frames(&SystemParams::reference(16.0, ratio)).unwrap()
    }

    #[test]
    fn zero_inversion_is_silent() {
        let (f, g) = reference_frames(0.43);
        let s = chi_closed_form(&f, &g, 0.0, &default_probe_grid()).unwrap();
        assert!(s.chi.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn centers_sorted_with_duplicates() {
        let (_, mut g) = reference_frames(0.43);
        g.splitting = 10.0;
        assert_eq!(line_centers(&g, 100.0), [-120.0, -80.0, -20.0, 20.0, 80.0, 120.0]);
        assert_eq!(line_centers(&g, 40.0), [-60.0, -20.0, -20.0, 20.0, 20.0, 60.0]);
    }

    #[test]
    fn gain_and_absorption_at_outer_lines() {
        let (f, g) = reference_frames(0.43);
        let rz = inversion_for_spectrum(&g, 1, InversionSource::Single).unwrap();
        assert!(rz > 0.0);
        let outer = f.drive_freq + 2.0 * g.splitting;
        assert!(chi_at(&f, &g, rz, outer).im < 0.0);
        assert!(chi_at(&f, &g, rz, -outer).im > 0.0);
        // opposite inversion flips both
        assert!(chi_at(&f, &g, -rz, outer).im > 0.0);
    }

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&[0.0]).is_err());
        assert!(validate_grid(&[0.0, 0.0]).is_err());
        assert!(validate_grid(&[0.0, f64::NAN]).is_err());
        assert!(probe_grid(1.0, -1.0, 5).is_err());
        assert_eq!(probe_grid(-1.0, 1.0, 3).unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(default_probe_grid().len(), 10001);
    }

    #[test]
    fn prefactor_for_reference_protein() {
        let phys = PhysicalParams::gamma_globulin();
        let pre = susceptibility_prefactor(&phys, 2.6e6);
        // 1e17 · (1e-18)² / (1.054571817e-27 · 2.6e6)
        assert!((pre - 36.471_236_801_066_97).abs() < 1e-9, "{pre}");
    }

    #[test]
    fn refraction_edges() {
        assert_eq!(refractive_index(0.0, 40.0).unwrap(), 1.0);
        assert!(refractive_index(0.1, 80.0).unwrap() > refractive_index(0.1, 40.0).unwrap());
        assert!(matches!(refractive_index(-0.5, 4.0), Err(Error::RefractionBreakdown(_))));
    }
}
