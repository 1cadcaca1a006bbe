//! Input parameters, the two dressing transformations and the
//! validity-regime checker.
//!
//! All frequencies and rates are stored in units of the reference
//! spontaneous rate `gamma_ref`, so the single-emitter rate is exactly `1.0`
//! internally. Conversion to s⁻¹ happens only in [`spontaneous_rate`], the
//! susceptibility prefactor and the dipole extraction.

use crate::error::{Error, Result};

/// Reduced Planck constant, erg·s.
pub const HBAR: f64 = 1.054_571_817e-27;
/// Speed of light, cm/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e10;
/// One Debye in statC·cm.
pub const DEBYE: f64 = 1.0e-18;
/// Spontaneous rate of the gamma-globulin example, s⁻¹.
pub const GAMMA_GLOBULIN_RATE: f64 = 2.6e6;
/// Default "much greater than" factor used by [`check_regime`].
pub const DEFAULT_REGIME_FACTOR: f64 = 10.0;

/// How the double-dressed sideband rates γ(ω̃) are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateModel {
    /// Every γ(ω̃) equals the reference rate.
    #[default]
    Equal,
    /// γ(ω̃) ∝ ω̃³ evaluated by [`spontaneous_rate`]; needs [`PhysicalParams`].
    Cubic,
}

impl std::str::FromStr for RateModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "equal" => Ok(Self::Equal),
            "cubic" => Ok(Self::Cubic),
            other => Err(format!("expected `equal` or `cubic`, got `{other}`")),
        }
    }
}

impl std::fmt::Display for RateModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Equal => "equal",
            Self::Cubic => "cubic",
        })
    }
}

/// Dimensionful inputs (Gaussian units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Transition dipole `d`, Debye.
    pub dipole: f64,
    /// Bare transition angular frequency ω₂₁, s⁻¹.
    pub transition_freq: f64,
    /// First-laser angular frequency ω_L, s⁻¹.
    pub laser_freq: f64,
    /// Number density N̄, cm⁻³.
    pub density: f64,
    /// Second-laser field amplitude E₂, statV/cm.
    pub second_field: f64,
}

impl PhysicalParams {
    /// Gamma-globulin values: d = 1 D, ω₂₁ = 4.8×10¹⁵ s⁻¹, N̄ = 10¹⁷ cm⁻³,
    /// and E₂ chosen so that G = 16 γ corresponds to |d₂₂ − d₁₁| = 100 D.
    pub fn gamma_globulin() -> Self {
        Self {
            dipole: 1.0,
            transition_freq: 4.8e15,
            laser_freq: 4.8e15,
            density: 1.0e17,
            second_field: HBAR * 16.0 * GAMMA_GLOBULIN_RATE / (100.0 * DEBYE),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Rabi frequency Ω of the first laser.
    pub rabi: f64,
    /// Detuning Δ = ω₂₁ − ω_L.
    pub detuning: f64,
    /// Permanent-dipole coupling G = (d₂₂ − d₁₁)E₂/ħ.
    pub dipole_coupling: f64,
    /// Second-laser frequency ω.
    pub drive_freq: f64,
    /// Number of emitters in the symmetric collective state.
    pub emitters: usize,
    /// Reference spontaneous rate, s⁻¹.
    pub gamma_ref: f64,
    pub rate_model: RateModel,
    /// Keep the Ḡ²/(2ω) term in Δ̄ instead of Δ̄ = Ω̄ − ω/2.
    pub stark_shift: bool,
    pub physical: Option<PhysicalParams>,
}

impl SystemParams {
    pub fn new(rabi: f64, detuning: f64, dipole_coupling: f64, drive_freq: f64) -> Self {
        Self {
            rabi,
            detuning,
            dipole_coupling,
            drive_freq,
            emitters: 1,
            gamma_ref: GAMMA_GLOBULIN_RATE,
            rate_model: RateModel::Equal,
            stark_shift: false,
            physical: None,
        }
    }

    /// Ω = 45, ω = 100 with the given G and Δ/(2Ω).
    pub fn reference(dipole_coupling: f64, detuning_ratio: f64) -> Self {
        Self::new(45.0, 0.0, dipole_coupling, 100.0).with_detuning_ratio(detuning_ratio)
    }

    pub fn with_emitters(mut self, n: usize) -> Self {
        self.emitters = n;
        self
    }

    pub fn with_physical(mut self, physical: PhysicalParams) -> Self {
        self.physical = Some(physical);
        self
    }

    /// Sets Δ from the scaled detuning Δ/(2Ω).
    pub fn with_detuning_ratio(mut self, ratio: f64) -> Self {
        self.detuning = 2.0 * self.rabi * ratio;
        self
    }

    pub fn detuning_ratio(&self) -> f64 {
        self.detuning / (2.0 * self.rabi)
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(name: &'static str, reason: impl Into<String>) -> Result<()> {
            Err(Error::InvalidParameter { name, reason: reason.into() })
        }
        let finite = [
            ("Omega", self.rabi),
            ("Delta", self.detuning),
            ("G", self.dipole_coupling),
            ("omega", self.drive_freq),
            ("gamma_ref", self.gamma_ref),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return bad(name, format!("must be finite, got {v}"));
            }
        }
        if self.rabi < 0.0 {
            return bad("Omega", "must be >= 0");
        }
        if self.dipole_coupling < 0.0 {
            return bad("G", "must be >= 0");
        }
        if self.drive_freq <= 0.0 {
            return bad("omega", "must be > 0");
        }
        if self.emitters == 0 {
            return bad("N", "must be >= 1");
        }
        if self.gamma_ref <= 0.0 {
            return bad("gamma_ref", "must be > 0");
        }
        if let Some(ph) = &self.physical {
            for (name, v) in [
                ("d", ph.dipole),
                ("omega21", ph.transition_freq),
                ("omegaL", ph.laser_freq),
                ("Nbar", ph.density),
                ("E2", ph.second_field),
            ] {
                if !(v.is_finite() && v > 0.0) {
                    return bad(name, format!("must be finite and > 0, got {v}"));
                }
            }
        }
        Ok(())
    }
}

/// Quantities of the first (laser-molecule) dressed frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedFrame {
    /// Mixing angle θ ∈ (0, π/2), tan 2θ = 2Ω/Δ.
    pub theta: f64,
    pub sin2theta: f64,
    pub cos2theta: f64,
    /// Generalized Rabi frequency Ω̄.
    pub rabi_bar: f64,
    /// Dressed pump Ḡ = (G/4) sin 2θ.
    pub pump: f64,
    /// Dressed detuning Δ̄.
    pub detuning_bar: f64,
    /// Γ₊ = γ(sin⁴θ + cos⁴θ).
    pub gamma_plus: f64,
    /// Γ₋ = γ(sin⁴θ − cos⁴θ); may be negative.
    pub gamma_minus: f64,
    /// Γ = Γ₊ + γ sin²2θ.
    pub gamma: f64,
    /// Second-laser frequency ω carried along for the spectrum.
    pub drive_freq: f64,
}

impl DressedFrame {
    pub fn cos4(&self) -> f64 {
        let c2 = 0.5 * (1.0 + self.cos2theta);
        c2 * c2
    }

    pub fn sin4(&self) -> f64 {
        let s2 = 0.5 * (1.0 - self.cos2theta);
        s2 * s2
    }
}

pub fn derive_dressed(p: &SystemParams) -> Result<DressedFrame> {
    p.validate()?;
    if p.rabi == 0.0 {
        return Err(Error::ZeroRabi);
    }
    let two_rabi = 2.0 * p.rabi;
    let theta = 0.5 * two_rabi.atan2(p.detuning);
    // Exact algebraic forms keep Δ = 0 at sin2θ = 1, cos2θ = 0 without
    // trigonometric round-off.
    let split = two_rabi.hypot(p.detuning);
    let sin2theta = two_rabi / split;
    let cos2theta = p.detuning / split;
    let rabi_bar = 0.5 * split;
    let pump = 0.25 * p.dipole_coupling * sin2theta;
    let mut detuning_bar = rabi_bar - 0.5 * p.drive_freq;
    if p.stark_shift {
        detuning_bar += pump * pump / (2.0 * p.drive_freq);
    }
    let gamma_plus = 1.0 - 0.5 * sin2theta * sin2theta;
    let gamma_minus = -cos2theta;
    let gamma = gamma_plus + sin2theta * sin2theta;
    Ok(DressedFrame {
        theta,
        sin2theta,
        cos2theta,
        rabi_bar,
        pump,
        detuning_bar,
        gamma_plus,
        gamma_minus,
        gamma,
        drive_freq: p.drive_freq,
    })
}

/// Quantities of the second (double-dressed) frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDressedFrame {
    /// Second mixing angle φ ∈ (0, π/2), cot 2φ = Δ̄/Ḡ.
    pub phi: f64,
    pub sin2phi: f64,
    pub cos2phi: f64,
    /// Double-dressed splitting Ḡ_R = √(Δ̄² + Ḡ²).
    pub splitting: f64,
    /// Γ̄₀, dephasing coefficient of R̃z.
    pub gamma_zero: f64,
    /// Γ̄₊, coefficient of the lowering channel R̃⁻.
    pub gamma_plus: f64,
    /// Γ̄₋, coefficient of the raising channel R̃⁺.
    pub gamma_minus: f64,
    /// x = Γ̄₊/Γ̄₋.
    pub ratio: f64,
    /// η = ln(x)/2.
    pub eta: f64,
    /// Γ̄s = 4Γ̄₀ + Γ̄₊ + Γ̄₋.
    pub width: f64,
}

impl DoubleDressedFrame {
    pub fn cos4(&self) -> f64 {
        let c2 = 0.5 * (1.0 + self.cos2phi);
        c2 * c2
    }

    pub fn sin4(&self) -> f64 {
        let s2 = 0.5 * (1.0 - self.cos2phi);
        s2 * s2
    }
}

/// Sideband rate γ(ω_L + offset) in units of `gamma_ref`, `offset` in the
/// same units.
fn sideband_rate(p: &SystemParams, offset: f64) -> Result<f64> {
    match p.rate_model {
        RateModel::Equal => Ok(1.0),
        RateModel::Cubic => {
            let ph = p.physical.as_ref().ok_or(Error::MissingPhysical("the cubic rate model"))?;
            let freq = ph.laser_freq + offset * p.gamma_ref;
            if freq <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: "omegaL",
                    reason: format!("sideband frequency {freq:e} s^-1 is not positive"),
                });
            }
            Ok(spontaneous_rate(freq, ph.dipole) / p.gamma_ref)
        }
    }
}

pub fn derive_double_dressed(f: &DressedFrame, p: &SystemParams) -> Result<DoubleDressedFrame> {
    let splitting = f.detuning_bar.hypot(f.pump);
    if splitting == 0.0 {
        return Err(Error::ZeroSplitting);
    }
    let phi = 0.5 * f.pump.atan2(f.detuning_bar);
    let sin2phi = f.pump / splitting;
    let cos2phi = f.detuning_bar / splitting;

    let w = f.drive_freq;
    let two_gr = 2.0 * splitting;
    let rate = |offset: f64| sideband_rate(p, offset);

    let s2t2 = f.sin2theta * f.sin2theta;
    let s2p2 = sin2phi * sin2phi;
    let (c4t, s4t) = (f.cos4(), f.sin4());
    let c2p = 0.5 * (1.0 + cos2phi);
    let s2p = 0.5 * (1.0 - cos2phi);
    let (c4p, s4p) = (c2p * c2p, s2p * s2p);

    let gamma_zero = rate(0.0)? * s2t2 * cos2phi * cos2phi / 4.0 + s2p2 * (rate(w)? * c4t + rate(-w)? * s4t) / 4.0;
    let gamma_plus = rate(two_gr)? * s2p2 * s2t2 / 4.0 + rate(w + two_gr)? * c4p * c4t + rate(-w + two_gr)? * s4t * s4p;
    let gamma_minus =
        rate(-two_gr)? * s2p2 * s2t2 / 4.0 + rate(w - two_gr)? * c4t * s4p + rate(-w - two_gr)? * s4t * c4p;

    if gamma_minus == 0.0 {
        return Err(Error::VanishingRate { name: "Gamma_minus_bar" });
    }
    if gamma_plus == 0.0 {
        return Err(Error::VanishingRate { name: "Gamma_plus_bar" });
    }
    let ratio = gamma_plus / gamma_minus;
    Ok(DoubleDressedFrame {
        phi,
        sin2phi,
        cos2phi,
        splitting,
        gamma_zero,
        gamma_plus,
        gamma_minus,
        ratio,
        eta: 0.5 * ratio.ln(),
        width: 4.0 * gamma_zero + gamma_plus + gamma_minus,
    })
}

/// Both frames at once.
pub fn derive_frames(p: &SystemParams) -> Result<(DressedFrame, DoubleDressedFrame)> {
    let f = derive_dressed(p)?;
    let g = derive_double_dressed(&f, p)?;
    Ok((f, g))
}

/// Single-molecule spontaneous rate γ(ω̃) = 2d²ω̃³/(3ħc³) in s⁻¹, Gaussian
/// units, for `omega_tilde` in s⁻¹ and `dipole` in Debye.
pub fn spontaneous_rate(omega_tilde: f64, dipole: f64) -> f64 {
    let d = dipole * DEBYE;
    2.0 * d * d * omega_tilde.powi(3) / (3.0 * HBAR * SPEED_OF_LIGHT.powi(3))
}

/// One validity inequality `lhs ≥ required`, evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeCheck {
    pub condition: &'static str,
    pub lhs: f64,
    pub required: f64,
    pub holds: bool,
}

impl RegimeCheck {
    /// lhs / required; below 1 means violated.
    pub fn margin(&self) -> f64 {
        self.lhs / self.required
    }
}

/// Evaluates every validity inequality; `factor` operationalizes "≫".
///
/// Never fails: degenerate parameters simply produce violated checks.
pub fn regime_report(p: &SystemParams, factor: f64) -> Vec<RegimeCheck> {
    let rabi_bar = p.rabi.hypot(0.5 * p.detuning);
    let split = (2.0 * p.rabi).hypot(p.detuning);
    let sin2theta = if split > 0.0 { 2.0 * p.rabi / split } else { 0.0 };
    let pump = 0.25 * p.dipole_coupling * sin2theta;
    let mut detuning_bar = rabi_bar - 0.5 * p.drive_freq;
    if p.stark_shift && p.drive_freq > 0.0 {
        detuning_bar += pump * pump / (2.0 * p.drive_freq);
    }
    let splitting = detuning_bar.hypot(pump);
    // Largest double-dressed sideband rate; 1 unless the cubic model applies.
    let offsets =
        [0.0, p.drive_freq, -p.drive_freq].into_iter().flat_map(|o| [o, o + 2.0 * splitting, o - 2.0 * splitting]);
    let dd_rate = offsets.filter_map(|o| sideband_rate(p, o).ok()).fold(1.0_f64, f64::max);

    let check = |condition, lhs: f64, required: f64, strict: bool| RegimeCheck {
        condition,
        lhs,
        required,
        holds: if strict { lhs > required } else { lhs >= required },
    };
    vec![
        check("Omega_bar >> gamma", rabi_bar, factor, false),
        check("Omega_bar > G", rabi_bar, p.dipole_coupling, true),
        check("omega >> G_bar", p.drive_freq, factor * pump, false),
        check("omega >> gamma", p.drive_freq, factor, false),
        check("G_R >> gamma", splitting, factor * dd_rate, false),
    ]
}

/// Violated inequalities only; empty means the parameters are inside the
/// regime where the dressed-state master equations apply.
pub fn check_regime(p: &SystemParams, factor: f64) -> Vec<RegimeCheck> {
    regime_report(p, factor).into_iter().filter(|c| !c.holds).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn resonance_frame() {
        let f = derive_dressed(&SystemParams::new(45.0, 0.0, 16.0, 100.0)).unwrap();
        assert_eq!(f.theta, FRAC_PI_4);
        assert_eq!(f.rabi_bar, 45.0);
        assert_eq!(f.pump, 4.0);
        assert_eq!(f.detuning_bar, -5.0);
        assert_eq!(f.gamma_minus, 0.0);
    }

    #[test]
    fn detuned_frame_matches_definitions() {
        let f = derive_dressed(&SystemParams::new(45.0, 38.7, 16.0, 100.0)).unwrap();
        let rabi_bar = (45.0f64 * 45.0 + 19.35 * 19.35).sqrt();
        let theta = 0.5 * 90.0f64.atan2(38.7);
        assert!((f.rabi_bar - rabi_bar).abs() < 1e-13);
        assert!((f.theta - theta).abs() < 1e-15);
        assert!(((2.0 * f.theta).tan() * 38.7 - 90.0).abs() < 1e-12);
        assert!((f.pump - 4.0 * (2.0 * theta).sin()).abs() < 1e-14);
        assert!((f.detuning_bar - (rabi_bar - 50.0)).abs() < 1e-13);
        let (s, c) = theta.sin_cos();
        assert!((f.gamma_plus - (s.powi(4) + c.powi(4))).abs() < 1e-15);
        assert!((f.gamma_minus - (s.powi(4) - c.powi(4))).abs() < 1e-15);
        assert!((f.gamma - (f.gamma_plus + (2.0 * theta).sin().powi(2))).abs() < 1e-15);
    }

    #[test]
    fn no_pump_without_dipoles() {
        let f = derive_dressed(&SystemParams::new(45.0, 0.0, 0.0, 100.0)).unwrap();
        assert_eq!(f.pump, 0.0);
        assert_eq!(f.gamma_minus, 0.0);
    }

    #[test]
    fn zero_rabi_rejected() {
        let err = derive_dressed(&SystemParams::new(0.0, 1.0, 16.0, 100.0)).unwrap_err();
        assert_eq!(err, Error::ZeroRabi);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(derive_dressed(&SystemParams::new(45.0, 0.0, 16.0, 0.0)).is_err());
        assert!(derive_dressed(&SystemParams::new(45.0, 0.0, -1.0, 100.0)).is_err());
        assert!(derive_dressed(&SystemParams::new(45.0, 0.0, 1.0, 100.0).with_emitters(0)).is_err());
    }

    #[test]
    fn stark_shift_flag() {
        let mut p = SystemParams::new(45.0, 0.0, 16.0, 100.0);
        p.stark_shift = true;
        let f = derive_dressed(&p).unwrap();
        assert!((f.detuning_bar - (-5.0 + 16.0 / 200.0)).abs() < 1e-14);
    }

    #[test]
    fn quarter_angles_balance_the_rates() {
        // Ω̄ = ω/2 puts Δ̄ = 0 and φ = π/4.
        let p = SystemParams::new(45.0, 0.0, 16.0, 90.0);
        let (f, g) = derive_frames(&p).unwrap();
        assert_eq!(f.detuning_bar, 0.0);
        assert_eq!(g.phi, FRAC_PI_4);
        // cos2φ = 0 removes the first term; sin²2φ(cos⁴θ + sin⁴θ)/4 = 1/8 remains
        assert!((g.gamma_zero - 0.125).abs() < 1e-15);
        assert!((g.gamma_plus - 0.375).abs() < 1e-15);
        assert!((g.gamma_minus - 0.375).abs() < 1e-15);
        assert!((g.ratio - 1.0).abs() < 1e-15);
        assert!(g.eta.abs() < 1e-15);
    }

    #[test]
    fn width_identity() {
        for r in [-0.9, -0.43, 0.1, 0.43, 0.8] {
            let (f, g) = derive_frames(&SystemParams::reference(16.0, r)).unwrap();
            assert_eq!(g.width, 4.0 * g.gamma_zero + g.gamma_plus + g.gamma_minus);
            let gr2 = f.detuning_bar.powi(2) + f.pump.powi(2);
            assert!((g.splitting.powi(2) - gr2).abs() < 1e-12 * gr2);
            assert!(((2.0 * g.phi).cos() / (2.0 * g.phi).sin() * f.pump - f.detuning_bar).abs() < 1e-12);
            assert!(g.phi > 0.0 && g.phi < FRAC_PI_2);
        }
    }

    #[test]
    fn zero_splitting_rejected() {
        let p = SystemParams::new(45.0, 0.0, 0.0, 90.0);
        assert_eq!(derive_frames(&p).unwrap_err(), Error::ZeroSplitting);
    }

    #[test]
    fn cubic_rates_need_physical_block() {
        let mut p = SystemParams::reference(16.0, 0.43);
        p.rate_model = RateModel::Cubic;
        assert!(matches!(derive_frames(&p), Err(Error::MissingPhysical(_))));
        let p = p.with_physical(PhysicalParams::gamma_globulin());
        let (_, g) = derive_frames(&p).unwrap();
        // Sideband offsets are ~10⁻⁷ of ω_L, so the cubic rates are all
        // spontaneous_rate(ω_L)/γ_ref ≈ 0.998.
        let base = spontaneous_rate(4.8e15, 1.0) / GAMMA_GLOBULIN_RATE;
        let mut q = p;
        q.rate_model = RateModel::Equal;
        let (_, ge) = derive_frames(&q).unwrap();
        assert!((g.gamma_plus / ge.gamma_plus - base).abs() < 1e-5);
        assert!((g.ratio - ge.ratio).abs() < 1e-5);
    }

    #[test]
    fn spontaneous_rate_anchor_and_scaling() {
        let g = spontaneous_rate(4.8e15, 1.0);
        assert!((g / 2.6e6 - 1.0).abs() < 0.05, "{g}");
        assert!((spontaneous_rate(9.6e15, 1.0) / g - 8.0).abs() < 1e-12);
        assert!((spontaneous_rate(4.8e15, 2.0) / g - 4.0).abs() < 1e-12);
    }

    #[test]
    fn regime_fixture_at_reference_resonance() {
        let p = SystemParams::new(45.0, 0.0, 16.0, 100.0);
        let v = check_regime(&p, DEFAULT_REGIME_FACTOR);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].condition, "G_R >> gamma");
        assert!((v[0].lhs - 41f64.sqrt()).abs() < 1e-12);
        assert!((v[0].margin() - 0.6403124237432849).abs() < 1e-12);
    }

    #[test]
    fn weak_rabi_flagged() {
        let p = SystemParams::new(0.5, 0.0, 0.0, 100.0);
        let v = check_regime(&p, DEFAULT_REGIME_FACTOR);
        assert!(v.iter().any(|c| c.condition == "Omega_bar >> gamma"));
    }

    #[test]
    fn unit_factor_passes() {
        let p = SystemParams::new(45.0, 0.0, 16.0, 100.0);
        assert!(check_regime(&p, 1.0).is_empty());
    }
}
