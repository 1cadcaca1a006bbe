//! Steady states and weak-probe susceptibility of two-level emitters with
//! permanent dipole moments driven by a strong resonant laser and a second,
//! low-frequency field.
//!
//! The crate has two independent halves. The closed-form half
//! ([`params`], [`dressed`], [`double_dressed`], [`susceptibility`])
//! evaluates analytic steady states and spectra in the dressed and
//! double-dressed frames. The [`oracle`] builds the same master equations
//! as dense Liouvillians and solves them numerically, so every closed form
//! can be checked against a brute-force computation.
//!
//! All frequencies are in units of the reference spontaneous rate γ.
//!
//! ```
//! use bichromatic::{derive_frames, dressed, SystemParams};
//!
//! let p = SystemParams::reference(16.0, 0.43);
//! let (f, _) = derive_frames(&p).unwrap();
//! let s = dressed::steady_state(&f);
//! assert!(s.bare_inversion > 0.0);
//! ```

pub mod double_dressed;
pub mod dressed;
pub mod error;
pub mod oracle;
pub mod params;
pub mod susceptibility;

pub use double_dressed::{
    apply_collective_scaling, bare_inversion_collective, collective_inversion, collective_state, dd_offdiagonal_check,
    dd_partition_state, CollectiveScaling, CollectiveState,
};
pub use dressed::{bloch_rhs, SteadyState};
pub use error::{Error, Result};
pub use oracle::DensityMatrix;
pub use params::{
    check_regime, derive_double_dressed, derive_dressed, derive_frames, regime_report, spontaneous_rate,
    DoubleDressedFrame, DressedFrame, PhysicalParams, RateModel, RegimeCheck, SystemParams,
};
pub use susceptibility::{chi_closed_form, line_centers, refractive_index, InversionSource, Spectrum};

/// `points` equally spaced values from `start` to `end`, both included.
pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (points - 1) as f64;
            (0..points).map(|i| if i == points - 1 { end } else { start + step * i as f64 }).collect()
        }
    }
}

/// Δ/(2Ω) ∈ [−1, 1] with 801 points.
pub fn default_detuning_grid() -> Vec<f64> {
    linspace(-1.0, 1.0, 801)
}
