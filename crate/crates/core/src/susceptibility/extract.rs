use super::{local_extrema, validate_grid, Spectrum};
use crate::error::{Error, Result};
use crate::params::{derive_dressed, SystemParams, DEBYE, HBAR};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleEstimate {
    /// Separation S of the extrema of Im χ that bracket Δp = 0.
    pub s_measured: f64,
    /// Ḡ_R = S/4.
    pub splitting: f64,
    /// Recovered G in units of γ.
    pub coupling: f64,
    /// |d₂₂ − d₁₁| in Debye.
    pub dipole_difference: f64,
}

/// Distance between the nearest extrema of Im χ below and above Δp = 0,
/// searched within |Δp| < `window`.
pub fn measure_splitting(spec: &Spectrum, window: f64) -> Result<f64> {
    validate_grid(&spec.detunings)?;
    let extrema = local_extrema(&spec.detunings, &spec.imag());
    let near: Vec<f64> = extrema.iter().map(|e| e.position).filter(|x| x.abs() < window).collect();
    let below =
        near.iter().copied().filter(|&x| x < 0.0).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let above =
        near.iter().copied().filter(|&x| x > 0.0).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.min(x))));
    match (below, above) {
        (Some(b), Some(a)) => Ok(a - b),
        _ => Err(Error::TooFewExtrema { found: below.is_some() as usize + above.is_some() as usize }),
    }
}

/// Ḡ and G from a measured splitting Ḡ_R, given the driving configuration
/// in `p`. Returns (Ḡ, G).
///
/// Without the Stark shift Ḡ² = Ḡ_R² − Δ̄². With it Δ̄ depends on Ḡ through
/// Ḡ²/(2ω), and u = Ḡ² solves u²/(4ω²) + u(Δ̄₀/ω + 1) + Δ̄₀² − Ḡ_R² = 0; the
/// smallest positive root is taken.
pub fn invert_splitting(splitting: f64, p: &SystemParams) -> Result<(f64, f64)> {
    let mut bare = *p;
    bare.dipole_coupling = 0.0;
    let f = derive_dressed(&bare)?;
    let d0 = f.detuning_bar;
    let no_root = || Error::NoRealSolution { splitting, detuning: d0.abs() };
    let u = if p.stark_shift {
        let w = p.drive_freq;
        let a = 1.0 / (4.0 * w * w);
        let b = d0 / w + 1.0;
        let c = d0 * d0 - splitting * splitting;
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Err(no_root());
        }
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        [q / a, c / q]
            .into_iter()
            .filter(|r| r.is_finite() && *r > 0.0)
            .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.min(r))))
            .ok_or_else(no_root)?
    } else {
        splitting * splitting - d0 * d0
    };
    if u.is_nan() || u <= 0.0 {
        return Err(no_root());
    }
    let pump = u.sqrt();
    Ok((pump, 4.0 * pump / f.sin2theta))
}

/// |d₂₂ − d₁₁| from the splitting of the central pair of lines, Ḡ_R = S/4,
/// and G = (d₂₂ − d₁₁)E₂/ħ.
pub fn extract_dipole_difference(spec: &Spectrum, p: &SystemParams) -> Result<DipoleEstimate> {
    let phys = p.physical.ok_or(Error::MissingPhysical("dipole extraction"))?;
    let s_measured = measure_splitting(spec, 0.5 * p.drive_freq)?;
    let splitting = 0.25 * s_measured;
    let (_, coupling) = invert_splitting(splitting, p)?;
    let dipole_difference = HBAR * coupling * p.gamma_ref / phys.second_field / DEBYE;
    Ok(DipoleEstimate { s_measured, splitting, coupling, dipole_difference })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_frames, PhysicalParams};
    use crate::susceptibility::{chi_closed_form, default_probe_grid, inversion_for_spectrum, InversionSource};

    fn target(coupling: f64, ratio: f64) -> (SystemParams, Spectrum) {
        let p = SystemParams::reference(coupling, ratio).with_physical(PhysicalParams::gamma_globulin());
        let (f, g) = derive_frames(&p).unwrap();
        let rz = inversion_for_spectrum(&g, 1, InversionSource::Single).unwrap();
        (p, chi_closed_form(&f, &g, rz, &default_probe_grid()).unwrap())
    }

    #[test]
    fn reference_protein_round_trip() {
        // G = 16 at the reference field corresponds to 100 Debye
        let (p, spec) = target(16.0, 0.43);
        let est = extract_dipole_difference(&spec, &p).unwrap();
        assert!((est.dipole_difference / 100.0 - 1.0).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn unpumped_spectrum_has_no_central_pair() {
        let (p, spec) = target(0.0, 0.43);
        assert!(matches!(extract_dipole_difference(&spec, &p), Err(Error::TooFewExtrema { .. })));
    }

    #[test]
    fn splitting_at_detuning_has_no_solution() {
        let p = SystemParams::reference(16.0, 0.43);
        let (f, _) = derive_frames(&p).unwrap();
        let d0 = f.detuning_bar.abs();
        assert!(matches!(invert_splitting(d0, &p), Err(Error::NoRealSolution { .. })));
        assert!(matches!(invert_splitting(0.5 * d0, &p), Err(Error::NoRealSolution { .. })));
    }

    #[test]
    fn inversion_is_exact_on_model_splitting() {
        for stark in [false, true] {
            let mut p = SystemParams::reference(21.0, -0.2);
            p.stark_shift = stark;
            let (f, g) = derive_frames(&p).unwrap();
            let (pump, coupling) = invert_splitting(g.splitting, &p).unwrap();
            assert!((pump - f.pump).abs() < 1e-10, "stark={stark}");
            assert!((coupling - 21.0).abs() < 1e-9, "stark={stark}");
        }
    }

    #[test]
    fn requires_physical_block() {
        let (mut p, spec) = target(16.0, 0.43);
        p.physical = None;
        assert_eq!(extract_dipole_difference(&spec, &p), Err(Error::MissingPhysical("dipole extraction")));
    }
}
