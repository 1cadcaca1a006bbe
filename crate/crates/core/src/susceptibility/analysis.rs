use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::validate_grid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Vertex of the parabola through the three neighbouring samples.
    pub position: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

/// Vertex of the parabola through (x0,y0), (x1,y1), (x2,y2).
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d12 - d01) / (x[2] - x[0]);
    if curv == 0.0 {
        return (x[1], y[1]);
    }
    // y = y1 + b(t − x1) + a(t − x1)(t − x0 + t − x2)/..., written in Newton form
    let b = d01 + curv * (x[1] - x[0]);
    let xv = x[1] - b / (2.0 * curv);
    let yv = y[1] - b * b / (4.0 * curv);
    (xv, yv)
}

/// Interior samples that are not smaller (larger) than both neighbours, with
/// strict inequality on the left, refined by a three-point parabola.
pub fn local_extrema(x: &[f64], y: &[f64]) -> Vec<Extremum> {
    assert_eq!(x.len(), y.len());
    let mut out = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        let kind = if y[i] > y[i - 1] && y[i] >= y[i + 1] {
            ExtremumKind::Maximum
        } else if y[i] < y[i - 1] && y[i] <= y[i + 1] {
            ExtremumKind::Minimum
        } else {
            continue;
        };
        let (position, value) = parabola_vertex([x[i - 1], x[i], x[i + 1]], [y[i - 1], y[i], y[i + 1]]);
        out.push(Extremum { position, value, kind });
    }
    out
}

/// Real part of a causal response from its imaginary part on a uniform grid,
/// Re χ(wᵢ) = (1/π) P∫ Im χ(w)/(w − wᵢ) dw, by Maclaurin's rule: only samples
/// an odd number of steps away contribute, with weight 2h.
pub fn hilbert_real_part(grid: &[f64], imag: &[f64]) -> Result<Vec<f64>> {
    validate_grid(grid)?;
    if grid.len() != imag.len() {
        return Err(Error::InvalidGrid(format!("{} detunings but {} values", grid.len(), imag.len())));
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    let uneven = grid.iter().enumerate().map(|(i, v)| (v - (grid[0] + h * i as f64)).abs()).fold(0.0, f64::max);
    if uneven > 1e-9 * h.max(grid[0].abs()) {
        return Err(Error::InvalidGrid("Hilbert transform needs a uniform grid".into()));
    }
    let n = grid.len();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let start = if i % 2 == 0 { 1 } else { 0 };
            let sum: f64 = (start..n).step_by(2).map(|j| imag[j] / (grid[j] - grid[i])).sum();
            2.0 * h * sum / std::f64::consts::PI
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LorentzianFit {
    /// Complex weight a_j of each i/(Γ − i(Δp − c_j)).
    pub amplitudes: Vec<Complex64>,
    /// max |χ − fit| over the samples.
    pub max_residual: f64,
}

/// Least-squares fit of Σ_j a_j·i/(Γ − i(Δp − c_j)) with fixed centers and a
/// common width.
pub fn fit_lorentzians(grid: &[f64], chi: &[Complex64], centers: &[f64], width: f64) -> Result<LorentzianFit> {
    validate_grid(grid)?;
    if grid.len() != chi.len() || centers.is_empty() || grid.len() < centers.len() {
        return Err(Error::InvalidGrid("fit needs one value per detuning and more samples than lines".into()));
    }
    let basis = DMatrix::from_fn(grid.len(), centers.len(), |r, k| {
        Complex64::i() / Complex64::new(width, -(grid[r] - centers[k]))
    });
    let rhs = DVector::from_column_slice(chi);
    let svd = basis.clone().svd(true, true);
    let amps = svd.solve(&rhs, 1e-13).map_err(|e| Error::InvalidGrid(format!("Lorentzian fit failed: {e}")))?;
    let residual = (&basis * &amps - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(LorentzianFit { amplitudes: amps.iter().copied().collect(), max_residual: residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_recovers_vertex() {
        let f = |t: f64| 3.0 - 2.0 * (t - 0.37).powi(2);
        let (xv, yv) = parabola_vertex([0.0, 0.5, 1.5], [f(0.0), f(0.5), f(1.5)]);
        assert!((xv - 0.37).abs() < 1e-14 && (yv - 3.0).abs() < 1e-14);
    }

    #[test]
    fn extrema_of_a_sine() {
        let x = crate::linspace(0.0, 10.0, 1001);
        let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let e = local_extrema(&x, &y);
        assert_eq!(e.len(), 3);
        assert_eq!(e[0].kind, ExtremumKind::Maximum);
        assert!((e[0].position - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
        assert_eq!(e[1].kind, ExtremumKind::Minimum);
    }

    #[test]
    fn hilbert_of_single_lorentzian() {
        let grid = crate::linspace(-400.0, 400.0, 16001);
        let chi: Vec<Complex64> = grid.iter().map(|&w| Complex64::i() / Complex64::new(1.0, -w)).collect();
        let im: Vec<f64> = chi.iter().map(|z| z.im).collect();
        let re = hilbert_real_part(&grid, &im).unwrap();
        let err = grid
            .iter()
            .zip(&re)
            .zip(&chi)
            .filter(|((w, _), _)| w.abs() < 100.0)
            .map(|((_, r), z)| (r - z.re).abs())
            .fold(0.0, f64::max);
        assert!(err < 5e-3, "{err}");
    }

    #[test]
    fn fit_recovers_weights() {
        let grid = crate::linspace(-50.0, 50.0, 2001);
        let centers = [-10.0, 3.0];
        let truth = [Complex64::new(0.4, 0.0), Complex64::new(-1.2, 0.0)];
        let chi: Vec<Complex64> = grid
            .iter()
            .map(|&w| centers.iter().zip(&truth).map(|(c, a)| a * Complex64::i() / Complex64::new(0.8, -(w - c))).sum())
            .collect();
        let fit = fit_lorentzians(&grid, &chi, &centers, 0.8).unwrap();
        assert!(fit.max_residual < 1e-12);
        assert!((fit.amplitudes[1] - truth[1]).norm() < 1e-10);
    }
}
