use num_complex::Complex64;
use rayon::prelude::*;

#[cfg(test)]
use super::max_abs;
use super::solve::{rk4_step_matrix, step_count};
use super::{build_liouvillian_dicke, steady_state, CMatrix, Liouvillian};
use crate::error::{Error, Result};
use crate::params::{DoubleDressedFrame, DressedFrame};
use crate::susceptibility::{validate_grid, InversionSource, Spectrum};

/// Upper integration limit of the Fourier integral in units of 1/Γ̄s.
pub const CUTOFF_WIDTHS: f64 = 50.0;
/// Allowed change of any spectral point, relative to the peak |χ|, when the
/// cutoff is doubled.
const CUTOFF_TOL: f64 = 1e-4;
/// Propagation steps per stored correlation sample.
const STEPS_PER_SAMPLE: usize = 2;

/// One frequency component of the lowering operator, with the sign k of its
/// carrier e^{−ikωτ}.
struct Component {
    carrier: f64,
    op: CMatrix,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Bare lowering operator |lower⟩⟨upper| carried into the double-dressed
/// basis and split into its three secular components.
fn lowering_components(f: &DressedFrame, g: &DoubleDressedFrame) -> [Component; 3] {
    let (s, co) = f.theta.sin_cos();
    // U S⁻ Uᵀ with U = [[cosθ, −sinθ], [sinθ, cosθ]]: (sin2θ/2)Rz + cos²θR⁻ − sin²θR⁺
    let dressed = CMatrix::from_row_slice(2, 2, &[c(-co * s), c(co * co), c(-s * s), c(s * co)]);
    let (sp, cp) = g.phi.sin_cos();
    let v = CMatrix::from_row_slice(2, 2, &[c(cp), c(sp), c(-sp), c(cp)]);
    let rotate = |m: &CMatrix| &v * m * v.transpose();

    let mut diag = CMatrix::zeros(2, 2);
    diag[(0, 0)] = dressed[(0, 0)];
    diag[(1, 1)] = dressed[(1, 1)];
    let mut lower = CMatrix::zeros(2, 2);
    lower[(0, 1)] = dressed[(0, 1)];
    let mut raise = CMatrix::zeros(2, 2);
    raise[(1, 0)] = dressed[(1, 0)];
    [
        Component { carrier: 0.0, op: rotate(&diag) },
        Component { carrier: 1.0, op: rotate(&lower) },
        Component { carrier: -1.0, op: rotate(&raise) },
    ]
}

/// Tr(A X) for column-stacked X.
fn trace_product(a: &CMatrix, x: &[Complex64], dim: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            acc += a[(i, j)] * x[i * dim + j];
        }
    }
    acc
}

/// Sampled two-time commutators C(τ) = Tr(A e^{Lτ}[A†, ρ]) for each component,
/// on a uniform grid of spacing `dt` from 0 to `2·samples_half·dt`.
struct Correlations {
    dt: f64,
    samples: Vec<Vec<Complex64>>,
    carriers: [f64; 3],
}

fn correlations(l: &Liouvillian, rho: &CMatrix, comps: &[Component; 3], horizon: f64) -> Correlations {
    let samples_needed = step_count(l, horizon).div_ceil(STEPS_PER_SAMPLE);
    // an even count so that the first half ends exactly at horizon/2
    let n_samples = samples_needed + samples_needed % 2;
    let steps = n_samples * STEPS_PER_SAMPLE;
    let h = horizon / steps as f64;
    let step = rk4_step_matrix(&l.matrix, h);
    let dim = l.dim;
    let samples = comps
        .iter()
        .map(|comp| {
            let ad = comp.op.adjoint();
            let x0 = &ad * rho - rho * &ad;
            let mut v = nalgebra::DVector::from_column_slice(x0.as_slice());
            let mut out = Vec::with_capacity(n_samples + 1);
            out.push(trace_product(&comp.op, v.as_slice(), dim));
            for _ in 0..n_samples {
                for _ in 0..STEPS_PER_SAMPLE {
                    v = &step * v;
                }
                out.push(trace_product(&comp.op, v.as_slice(), dim));
            }
            out
        })
        .collect();
    Correlations {
        dt: h * STEPS_PER_SAMPLE as f64,
        samples,
        carriers: [comps[0].carrier, comps[1].carrier, comps[2].carrier],
    }
}

/// ∫₀¹ e^{iθu} du and ∫₀¹ u e^{iθu} du.
fn filon_moments(theta: f64) -> (Complex64, Complex64) {
    let it = Complex64::new(0.0, theta);
    if theta.abs() < 0.05 {
        // Σ (iθ)ⁿ/(n+1)! and Σ (iθ)ⁿ/((n+2)·n!)
        let mut e0 = Complex64::new(0.0, 0.0);
        let mut e1 = Complex64::new(0.0, 0.0);
        let mut pow_over_fact = Complex64::new(1.0, 0.0);
        for n in 0..10 {
            let nf = n as f64;
            e0 += pow_over_fact / (nf + 1.0);
            e1 += pow_over_fact / (nf + 2.0);
            pow_over_fact *= it / (nf + 1.0);
        }
        (e0, e1)
    } else {
        let e = it.exp();
        let e0 = (e - 1.0) / it;
        (e0, e / it - e0 / it)
    }
}

/// Piecewise-linear (Filon) quadrature of ∫₀^{Mδ} e^{iwτ} g(τ) dτ over samples
/// g₀..g_M.
fn filon(samples: &[Complex64], dt: f64, w: f64) -> Complex64 {
    let m = samples.len() - 1;
    let theta = w * dt;
    let z = Complex64::from_polar(1.0, theta);
    let mut horner = Complex64::new(0.0, 0.0);
    for g in samples.iter().rev() {
        horner = horner * z + g;
    }
    let zm = Complex64::from_polar(1.0, theta * m as f64);
    let s_a = horner - zm * samples[m];
    let s_b = (horner - samples[0]) * z.conj();
    let (e0, e1) = filon_moments(theta);
    (s_a * (e0 - e1) + s_b * e1) * dt
}

fn spectrum_from(corr: &Correlations, upto: usize, omega: f64, grid: &[f64]) -> Vec<Complex64> {
    grid.par_iter()
        .map(|&dp| {
            let mut total = Complex64::new(0.0, 0.0);
            for (samples, &k) in corr.samples.iter().zip(&corr.carriers) {
                total += filon(&samples[..=upto], corr.dt, dp - k * omega);
            }
            Complex64::i() * total
        })
        .collect()
}

fn peak(chi: &[Complex64]) -> f64 {
    chi.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Probe susceptibility of a single emitter from the regression theorem:
/// χ(Δp) = i Σ_k ∫₀^T e^{i(Δp − kω)τ} Tr(A_k e^{Lτ}[A_k†, ρ]) dτ, with L the
/// N = 1 double-dressed generator, ρ its numerical steady state and A_k the
/// secular components of the bare lowering operator.
///
/// The integral is cut at T = 50/Γ̄s. If ∫_T^{2T} Σ|C_k| exceeds 10⁻⁴ of the
/// peak |χ|, the spectrum is recomputed with 2T and rejected when the two
/// differ by more than that.
pub fn regression_spectrum(f: &DressedFrame, g: &DoubleDressedFrame, grid: &[f64]) -> Result<Spectrum> {
    validate_grid(grid)?;
    let l = build_liouvillian_dicke(g, 1)?;
    let rho = steady_state(&l)?.rho;
    let comps = lowering_components(f, g);
    let cutoff = CUTOFF_WIDTHS / g.width;
    let corr = correlations(&l, rho.matrix(), &comps, 2.0 * cutoff);
    let last = corr.samples[0].len() - 1;
    let half = last / 2;

    let chi = spectrum_from(&corr, half, f.drive_freq, grid);
    let top = peak(&chi);
    let tail: f64 = (half..last)
        .map(|j| {
            let a: f64 = corr.samples.iter().map(|s| s[j].norm()).sum();
            let b: f64 = corr.samples.iter().map(|s| s[j + 1].norm()).sum();
            0.5 * (a + b) * corr.dt
        })
        .sum();
    let chi = if tail <= CUTOFF_TOL * top {
        chi
    } else {
        let longer = spectrum_from(&corr, last, f.drive_freq, grid);
        let change = chi.iter().zip(&longer).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let rel = change / peak(&longer).max(f64::MIN_POSITIVE);
        if rel > CUTOFF_TOL {
            return Err(Error::CutoffConvergence(rel));
        }
        longer
    };
    Ok(Spectrum { detunings: grid.to_vec(), chi, prefactor: None, inversion_source: InversionSource::Single })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::DickeOperators;
    use crate::params::{derive_frames, SystemParams};

    #[test]
    fn filon_is_exact_for_linear_integrands() {
        // ∫₀¹ τ e^{iwτ} dτ on ten samples
        for w in [0.0, 0.3, 7.0] {
            let samples: Vec<Complex64> = (0..=10).map(|j| c(j as f64 / 10.0)).collect();
            let got = filon(&samples, 0.1, w);
            let exact = if w == 0.0 {
                c(0.5)
            } else {
                let iw = Complex64::new(0.0, w);
                iw.exp() / iw - (iw.exp() - 1.0) / (iw * iw)
            };
            assert!((got - exact).norm() < 1e-14, "w={w}");
        }
    }

    #[test]
    fn moment_branches_meet() {
        let (a0, a1) = filon_moments(0.0499999);
        let (b0, b1) = filon_moments(0.0500001);
        assert!((a0 - b0).norm() < 1e-7 && (a1 - b1).norm() < 1e-7);
    }

    #[test]
    fn rotation_diagonalises_the_pump() {
        let (f, g) = derive_frames(&SystemParams::reference(16.0, 0.43)).unwrap();
        let ops = DickeOperators::new(1);
        let h = &ops.inversion * c(f.detuning_bar) - (&ops.raise + &ops.lower) * c(f.pump);
        let (sp, cp) = g.phi.sin_cos();
        let v = CMatrix::from_row_slice(2, 2, &[c(cp), c(sp), c(-sp), c(cp)]);
        let rotated = &v * h * v.transpose();
        assert!(max_abs(&(rotated - &ops.inversion * c(g.splitting))) < 1e-12);
    }

    #[test]
    fn components_reassemble_lowering_operator() {
        let (f, g) = derive_frames(&SystemParams::reference(24.0, -0.3)).unwrap();
        let comps = lowering_components(&f, &g);
        let sum = &comps[0].op + &comps[1].op + &comps[2].op;
        let (sp, cp) = g.phi.sin_cos();
        let v = CMatrix::from_row_slice(2, 2, &[c(cp), c(sp), c(-sp), c(cp)]);
        let (s, co) = f.theta.sin_cos();
        let u = CMatrix::from_row_slice(2, 2, &[c(co), c(-s), c(s), c(co)]);
        let mut bare = CMatrix::zeros(2, 2);
        bare[(0, 1)] = c(1.0);
        let expected = &v * (&u * bare * u.transpose()) * v.transpose();
        assert!(max_abs(&(sum - expected)) < 1e-14);
    }

    #[test]
    fn balanced_rates_give_no_response() {
        // Δ̄ = 0 ⇒ x = 1 ⇒ ⟨R̃z⟩ = 0
        let p = SystemParams::new(45.0, 0.0, 16.0, 90.0);
        let (f, g) = derive_frames(&p).unwrap();
        let grid: Vec<f64> = (0..201).map(|i| -150.0 + 1.5 * i as f64).collect();
        let s = regression_spectrum(&f, &g, &grid).unwrap();
        assert!(s.chi.iter().all(|z| z.norm() < 1e-9));
    }
}
