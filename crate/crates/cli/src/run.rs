//! Mode execution. Each mode produces a [`Table`]; numerical failures at a
//! single point land in that row's `error` column instead of aborting.

use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use bichromatic::dressed;
use bichromatic::oracle::{
    build_liouvillian_dicke, build_liouvillian_single, random_regime_params, regression_spectrum, steady_state,
    DickeOperators, DICKE_CAPACITY,
};
use bichromatic::susceptibility::{
    chi_closed_form, dielectric_scale, extract_dipole_difference, inversion_for_spectrum, refractive_index, Spectrum,
};
use bichromatic::{
    apply_collective_scaling, collective_inversion, collective_state, derive_dressed, derive_frames, Error,
    SystemParams,
};

use crate::config::{Mode, RunConfig};
use crate::output::{fmt_num, Table};

/// Failure that stops a whole run.
#[derive(Debug)]
pub enum RunError {
    Input(String),
    Model(Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Input(m) => f.write_str(m),
            Self::Model(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        Self::Model(e)
    }
}

/// Result of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    /// Set when an oracle check exceeded its tolerance.
    pub tolerance_failed: bool,
}

/// Runs `cfg` on a pool of `cfg.threads` workers (0 means rayon's default).
pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| RunError::Input(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(cfg))
}

fn dispatch(cfg: &RunConfig) -> Result<Report, RunError> {
    let table = match cfg.mode {
        Mode::InversionSweep => sweep(cfg, &["Rz", "Re_Rplus", "Im_Rplus", "Sz"], inversion_row),
        Mode::CoherenceSweep => sweep(cfg, &["Re_Rplus", "Im_Rplus", "Rz_tilde"], coherence_row),
        Mode::CollectiveSweep => sweep(cfg, &["x", "Rz_tilde", "Sz_per_N"], |p| {
            collective_row(&apply_collective_scaling(p, cfg.collective_scaling))
        }),
        Mode::Spectrum => spectrum(cfg),
        Mode::OracleCheck => {
            let table = oracle_check(cfg);
            let failed = table.series[0].1.iter().any(|r| r.last().map(String::as_str) != Some("true"));
            return Ok(Report { table, tolerance_failed: failed });
        }
        Mode::Extract => extract(cfg)?,
    };
    Ok(Report { table, tolerance_failed: false })
}

/// One row of values, or the reason there is none.
type RowResult = Result<Vec<f64>, Error>;

fn finish_row(lead: f64, width: usize, r: RowResult) -> Vec<String> {
    let mut row = vec![fmt_num(lead)];
    match r {
        Ok(vals) => {
            row.extend(vals.into_iter().map(fmt_num));
            row.push(String::new());
        }
        Err(e) => {
            row.extend(std::iter::repeat_n(String::new(), width));
            row.push(e.to_string());
        }
    }
    row
}

fn series_label(cfg: &RunConfig, i: usize) -> Option<String> {
    (cfg.couplings.len() > 1).then(|| format!("G = {}", cfg.couplings[i]))
}

fn sweep(cfg: &RunConfig, cols: &[&str], eval: impl Fn(&SystemParams) -> RowResult + Sync) -> Table {
    let mut columns = vec![cfg.sweep_param.name().to_string()];
    columns.extend(cols.iter().map(|c| c.to_string()));
    columns.push("error".into());
    let axis = cfg.sweep.values();
    let series = (0..cfg.couplings.len())
        .map(|i| {
            let base = cfg.series_params(i);
            let rows = axis
                .par_iter()
                .map(|&v| {
                    let mut p = base;
                    cfg.sweep_param.apply(&mut p, v);
                    finish_row(v, cols.len(), p.validate().and_then(|_| eval(&p)))
                })
                .collect();
            (series_label(cfg, i), rows)
        })
        .collect();
    Table { columns, series }
}

fn inversion_row(p: &SystemParams) -> RowResult {
    let s = dressed::steady_state(&derive_dressed(p)?);
    Ok(vec![s.inversion, s.coherence.re, s.coherence.im, s.bare_inversion])
}

fn coherence_row(p: &SystemParams) -> RowResult {
    let (f, g) = derive_frames(p)?;
    let rp = dressed::steady_coherence(&f);
    Ok(vec![rp.re, rp.im, collective_inversion(g.ratio, 1)?])
}

fn collective_row(p: &SystemParams) -> RowResult {
    let (f, g) = derive_frames(p)?;
    let s = collective_state(&f, &g, p.emitters)?;
    Ok(vec![s.ratio, s.rz_tilde, s.sz_per_emitter])
}

fn spectrum_of(cfg: &RunConfig, p: &SystemParams, grid: &[f64]) -> Result<Spectrum, Error> {
    let (f, g) = derive_frames(p)?;
    let rz = inversion_for_spectrum(&g, p.emitters, cfg.chi_inversion)?;
    chi_closed_form(&f, &g, rz, grid)
}

fn spectrum(cfg: &RunConfig) -> Table {
    let columns = ["delta_p", "re_chi", "im_chi", "n", "error"].map(String::from).to_vec();
    let grid = cfg.probe.values();
    let series = (0..cfg.couplings.len())
        .map(|i| {
            let p = cfg.series_params(i);
            let scale = p.physical.map(|ph| dielectric_scale(&ph, p.gamma_ref));
            let rows = match spectrum_of(cfg, &p, &grid) {
                Ok(s) => s.detunings.par_iter().zip(&s.chi).map(|(&dp, &z)| spectrum_row(dp, z, scale)).collect(),
                Err(e) => grid.iter().map(|&dp| finish_row(dp, 3, Err(e.clone()))).collect(),
            };
            (series_label(cfg, i), rows)
        })
        .collect();
    Table { columns, series }
}

fn spectrum_row(dp: f64, z: Complex64, scale: Option<f64>) -> Vec<String> {
    let (n, err) = match scale.map(|s| refractive_index(z.re, s)) {
        None => (String::new(), String::new()),
        Some(Ok(n)) => (fmt_num(n), String::new()),
        Some(Err(e)) => (String::new(), e.to_string()),
    };
    vec![fmt_num(dp), fmt_num(z.re), fmt_num(z.im), n, err]
}

/// Relative error, measured against `scale`·√ε when the reference itself is
/// that small (balanced rates give an exactly zero inversion).
fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / b.abs().max(scale * f64::EPSILON.sqrt())
}

/// Worst error of one check, or the error that stopped it.
type Check = Result<f64, Error>;

fn check_single(cfg: &RunConfig) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ops = DickeOperators::new(1);
    let mut worst = 0.0_f64;
    for _ in 0..cfg.draws {
        let p = random_regime_params(&mut rng);
        let (f, _) = derive_frames(&p)?;
        let rho = steady_state(&build_liouvillian_single(&f))?.rho;
        let rz = rho.expectation(&ops.inversion).re;
        let rp = rho.expectation(&ops.raise);
        worst = worst
            .max(rel(dressed::steady_inversion_dressed(&f), rz, 1.0))
            .max((dressed::steady_coherence(&f) - rp).norm() / rp.norm().max(1e-300));
    }
    Ok(worst)
}

/// Worst relative inversion error and worst off-diagonal element of the
/// Dicke steady state over every series, N = 1..=min(N, capacity).
fn check_collective(cfg: &RunConfig) -> Result<(f64, f64), Error> {
    let top = cfg.params.emitters.clamp(1, DICKE_CAPACITY);
    let mut worst = (0.0_f64, 0.0_f64);
    for i in 0..cfg.couplings.len() {
        let (_, g) = derive_frames(&cfg.series_params(i))?;
        for n in 1..=top {
            let rho = steady_state(&build_liouvillian_dicke(&g, n)?)?.rho;
            let rz = rho.expectation(&DickeOperators::new(n).inversion).re;
            worst.0 = worst.0.max(rel(collective_inversion(g.ratio, n)?, rz, n as f64));
            worst.1 = worst.1.max(rho.max_offdiagonal());
        }
    }
    Ok(worst)
}

/// Worst pointwise |Δχ| between regression and closed form, relative to peak.
fn check_spectrum(cfg: &RunConfig) -> Check {
    let grid = cfg.probe.values();
    let mut worst = 0.0_f64;
    for i in 0..cfg.couplings.len() {
        let mut p = cfg.series_params(i);
        p.emitters = 1;
        let (f, g) = derive_frames(&p)?;
        let closed = chi_closed_form(&f, &g, collective_inversion(g.ratio, 1)?, &grid)?;
        let numeric = regression_spectrum(&f, &g, &grid)?;
        let peak = closed.peak();
        if peak == 0.0 {
            continue;
        }
        let diff = closed.chi.iter().zip(&numeric.chi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        worst = worst.max(diff / peak);
    }
    Ok(worst)
}

fn oracle_check(cfg: &RunConfig) -> Table {
    let columns = ["check", "max_error", "tolerance", "pass"].map(String::from).to_vec();
    let t = cfg.tolerances;
    let (single, (collective, spectrum)) =
        rayon::join(|| check_single(cfg), || rayon::join(|| check_collective(cfg), || check_spectrum(cfg)));
    let (collective, offdiagonal) = match collective {
        Ok((a, b)) => (Ok(a), Ok(b)),
        Err(e) => (Err(e.clone()), Err(e)),
    };
    let rows = [
        ("single_steady_state", single, t.single),
        ("collective_inversion", collective, t.collective),
        ("collective_offdiagonal", offdiagonal, t.offdiagonal),
        ("regression_spectrum", spectrum, t.spectrum),
    ]
    .into_iter()
    .map(|(name, r, tol)| {
        let (err, pass) = match r {
            Ok(e) => (fmt_num(e), e <= tol),
            Err(e) => (e.to_string(), false),
        };
        vec![name.to_string(), err, fmt_num(tol), pass.to_string()]
    })
    .collect();
    Table { columns, series: vec![(None, rows)] }
}

/// Reads `delta_p, re_chi, im_chi` columns from a spectrum CSV.
pub fn read_spectrum(path: &Path) -> Result<Spectrum, RunError> {
    let bad = |m: String| RunError::Input(format!("{}: {m}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| bad(format!("no `{name}` column")));
    let (c_dp, c_re, c_im) = (col("delta_p")?, col("re_chi")?, col("im_chi")?);
    let mut detunings = Vec::new();
    let mut chi = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |c: usize| {
            rec.get(c)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| bad(format!("row {}: unreadable value in column {}", i + 1, &headers[c])))
        };
        let dp = field(c_dp)?;
        if detunings.last().is_some_and(|&last| dp <= last) {
            return Err(bad(format!("row {}: delta_p must increase (one series per file)", i + 1)));
        }
        detunings.push(dp);
        chi.push(Complex64::new(field(c_re)?, field(c_im)?));
    }
    Ok(Spectrum { detunings, chi, prefactor: None, inversion_source: Default::default() })
}

fn extract(cfg: &RunConfig) -> Result<Table, RunError> {
    let columns = ["G_input", "S_measured", "G_R", "G", "d_diff_debye", "error"].map(String::from).to_vec();
    let row = |g_in: Option<f64>, r: Result<_, Error>| {
        let mut row = vec![g_in.map(fmt_num).unwrap_or_default()];
        match r {
            Ok(bichromatic::susceptibility::DipoleEstimate { s_measured, splitting, coupling, dipole_difference }) => {
                row.extend([s_measured, splitting, coupling, dipole_difference].map(fmt_num));
                row.push(String::new());
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 4));
                row.push(e.to_string());
            }
        }
        row
    };
    let rows = match &cfg.spectrum_in {
        Some(path) => {
            let spec = read_spectrum(path)?;
            vec![row(None, extract_dipole_difference(&spec, &cfg.params))]
        }
        None => {
            let grid = cfg.probe.values();
            (0..cfg.couplings.len())
                .into_par_iter()
                .map(|i| {
                    let p = cfg.series_params(i);
                    let r = spectrum_of(cfg, &p, &grid).and_then(|s| extract_dipole_difference(&s, &p));
                    row(Some(p.dipole_coupling), r)
                })
                .collect()
        }
    };
    Ok(Table { columns, series: vec![(None, rows)] })
}
