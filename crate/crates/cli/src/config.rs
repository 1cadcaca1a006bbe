//! Flat `key = value` run configuration.
//!
//! Keys mirror the physical parameter names. Every key may also be given on
//! the command line as `--<key> <value>`, which overrides the file.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use bichromatic::double_dressed::CollectiveScaling;
use bichromatic::params::{PhysicalParams, RateModel, SystemParams, DEFAULT_REGIME_FACTOR, GAMMA_GLOBULIN_RATE};
use bichromatic::susceptibility::InversionSource;

/// Every accepted key, in the order used for the header echo.
pub const KEYS: &[&str] = &[
    "mode",
    "Omega",
    "Delta",
    "G",
    "omega",
    "N",
    "gamma_ref",
    "rate_model",
    "stark_shift",
    "d",
    "omega21",
    "omegaL",
    "Nbar",
    "E2",
    "sweep_param",
    "sweep_min",
    "sweep_max",
    "sweep_points",
    "dp_min",
    "dp_max",
    "dp_points",
    "chi_inversion",
    "collective_scaling",
    "regime_factor",
    "seed",
    "draws",
    "threads",
    "tol_single",
    "tol_collective",
    "tol_offdiagonal",
    "tol_spectrum",
    "spectrum_in",
];

const REQUIRED: &[&str] = &["mode", "Omega", "G", "omega"];
const PHYSICAL: &[&str] = &["d", "omega21", "omegaL", "Nbar", "E2"];

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// A problem tied to one line of the file, or to a command-line flag when
    /// `line` is `None`.
    At {
        line: Option<usize>,
        message: String,
    },
    Missing(Vec<String>),
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::At { line: Some(n), message } => write!(f, "line {n}: {message}"),
            Self::At { line: None, message } => write!(f, "command line: {message}"),
            Self::Missing(keys) => write!(f, "missing required keys: {}", keys.join(", ")),
            Self::Invalid(message) => f.write_str(message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    InversionSweep,
    CoherenceSweep,
    CollectiveSweep,
    Spectrum,
    OracleCheck,
    Extract,
}

pub const MODES: &[&str] =
    &["inversion-sweep", "coherence-sweep", "collective-sweep", "spectrum", "oracle-check", "extract"];

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "inversion-sweep" => Self::InversionSweep,
            "coherence-sweep" => Self::CoherenceSweep,
            "collective-sweep" => Self::CollectiveSweep,
            "spectrum" => Self::Spectrum,
            "oracle-check" => Self::OracleCheck,
            "extract" => Self::Extract,
            other => return Err(format!("unknown mode `{other}`; expected one of {}", MODES.join(", "))),
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::InversionSweep => "inversion-sweep",
            Self::CoherenceSweep => "coherence-sweep",
            Self::CollectiveSweep => "collective-sweep",
            Self::Spectrum => "spectrum",
            Self::OracleCheck => "oracle-check",
            Self::Extract => "extract",
        })
    }
}

/// Parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Δ/(2Ω) at fixed Ω.
    DetuningRatio,
    Delta,
    Omega,
    Coupling,
    DriveFreq,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::DetuningRatio => "delta_over_2omega",
            Self::Delta => "Delta",
            Self::Omega => "Omega",
            Self::Coupling => "G",
            Self::DriveFreq => "omega",
        }
    }

    pub fn apply(self, p: &mut SystemParams, value: f64) {
        match self {
            Self::DetuningRatio => p.detuning = 2.0 * p.rabi * value,
            Self::Delta => p.detuning = value,
            Self::Omega => p.rabi = value,
            Self::Coupling => p.dipole_coupling = value,
            Self::DriveFreq => p.drive_freq = value,
        }
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "delta_over_2omega" => Self::DetuningRatio,
            "Delta" => Self::Delta,
            "Omega" => Self::Omega,
            "G" => Self::Coupling,
            "omega" => Self::DriveFreq,
            other => {
                return Err(format!(
                    "unknown sweep parameter `{other}`; expected delta_over_2omega, Delta, Omega, G or omega"
                ))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        bichromatic::linspace(self.min, self.max, self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub single: f64,
    pub collective: f64,
    pub offdiagonal: f64,
    pub spectrum: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { single: 1e-8, collective: 1e-6, offdiagonal: 1e-8, spectrum: 1e-3 }
    }
}

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    /// Parameters of the first series; `couplings` lists G for every series.
    pub params: SystemParams,
    pub couplings: Vec<f64>,
    pub sweep_param: SweepParam,
    pub sweep: Axis,
    pub probe: Axis,
    pub chi_inversion: InversionSource,
    pub collective_scaling: CollectiveScaling,
    pub regime_factor: f64,
    pub seed: u64,
    pub draws: usize,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    pub tolerances: Tolerances,
    pub spectrum_in: Option<PathBuf>,
    /// Every effective setting, defaults included, in [`KEYS`] order.
    pub echo: Vec<(String, String)>,
}

impl RunConfig {
    /// Parameters of series `i`.
    pub fn series_params(&self, i: usize) -> SystemParams {
        let mut p = self.params;
        p.dipole_coupling = self.couplings[i];
        p
    }
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: Option<usize>,
}

/// Nearest known key by edit distance, if reasonably close.
pub fn suggest_key(unknown: &str) -> Option<&'static str> {
    KEYS.iter()
        .map(|k| (strsim::levenshtein(unknown, k), *k))
        .min_by_key(|(d, _)| *d)
        .filter(|(d, k)| *d <= 2.max(k.len() / 3))
        .map(|(_, k)| k)
}

fn unknown_key(key: &str, line: Option<usize>) -> ConfigError {
    let hint = suggest_key(key).map(|k| format!("; did you mean `{k}`?")).unwrap_or_default();
    ConfigError::At { line, message: format!("unknown key `{key}`{hint}") }
}

fn lex(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::At { line: Some(line), message: format!("expected `key = value`, got `{body}`") });
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(unknown_key(key, Some(line)));
        }
        if value.is_empty() {
            return Err(ConfigError::At { line: Some(line), message: format!("`{key}` has no value") });
        }
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            return Err(ConfigError::At {
                line: Some(line),
                message: format!("`{key}` already set on line {}", prev.line.unwrap_or(0)),
            });
        }
        out.push(Entry { key: key.to_string(), value: value.to_string(), line: Some(line) });
    }
    Ok(out)
}

struct Table(Vec<Entry>);

impl Table {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.0.iter().find(|e| e.key == key)
    }

    fn has(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    fn parse<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, ConfigError> {
        let Some(e) = self.get(key) else { return Ok(None) };
        e.value.parse::<T>().map(Some).map_err(|_| ConfigError::At {
            line: e.line,
            message: format!("`{key}` expects {what}, got `{}`", e.value),
        })
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let v = self.parse::<f64>(key, "a number")?;
        if let Some(x) = v {
            if !x.is_finite() {
                let e = self.get(key).unwrap();
                return Err(ConfigError::At {
                    line: e.line,
                    message: format!("`{key}` must be finite, got `{}`", e.value),
                });
            }
        }
        Ok(v)
    }

    fn number_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    fn count_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.parse::<usize>(key, "a non-negative integer")?.unwrap_or(default))
    }

    fn choice<T: FromStr<Err = String>>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        let Some(e) = self.get(key) else { return Ok(None) };
        e.value.parse::<T>().map(Some).map_err(|m| ConfigError::At { line: e.line, message: format!("`{key}`: {m}") })
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(e) = self.get(key) else { return Ok(None) };
        let parts: Result<Vec<f64>, _> =
            e.value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse::<f64>).collect();
        match parts {
            Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(Some(v)),
            _ => Err(ConfigError::At {
                line: e.line,
                message: format!("`{key}` expects a number or a comma-separated list, got `{}`", e.value),
            }),
        }
    }

    fn flag(&self, key: &str) -> Result<bool, ConfigError> {
        let Some(e) = self.get(key) else { return Ok(false) };
        match e.value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" | "on" => Ok(true),
            "false" | "no" | "0" | "off" => Ok(false),
            _ => Err(ConfigError::At {
                line: e.line,
                message: format!("`{key}` expects true or false, got `{}`", e.value),
            }),
        }
    }
}

/// Parses configuration text with no command-line overrides.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, &[])
}

/// Parses configuration text, then applies `overrides` (key, value) on top.
pub fn parse_config_with(text: &str, overrides: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let mut entries = lex(text)?;
    for (key, value) in overrides {
        if !KEYS.contains(&key.as_str()) {
            return Err(unknown_key(key, None));
        }
        entries.retain(|e| &e.key != key);
        entries.push(Entry { key: key.clone(), value: value.trim().to_string(), line: None });
    }
    build(Table(entries))
}

fn build(t: Table) -> Result<RunConfig, ConfigError> {
    let missing: Vec<String> = REQUIRED.iter().filter(|k| !t.has(k)).map(|k| k.to_string()).collect();
    if !missing.is_empty() {
        return Err(ConfigError::Missing(missing));
    }
    let mode: Mode = t.choice("mode")?.unwrap();
    let rabi = t.number("Omega")?.unwrap();
    let couplings = t.list("G")?.unwrap();
    let drive = t.number("omega")?.unwrap();
    let detuning = t.number_or("Delta", 0.0)?;

    let mut params = SystemParams::new(rabi, detuning, couplings[0], drive);
    params.emitters = t.count_or("N", 1)?;
    params.gamma_ref = t.number_or("gamma_ref", GAMMA_GLOBULIN_RATE)?;
    params.rate_model = t.choice::<RateModel>("rate_model")?.unwrap_or_default();
    params.stark_shift = t.flag("stark_shift")?;

    let given: Vec<&str> = PHYSICAL.iter().copied().filter(|k| t.has(k)).collect();
    let needs_physical = mode == Mode::Extract || params.rate_model == RateModel::Cubic;
    if !given.is_empty() || needs_physical {
        let absent: Vec<String> = PHYSICAL.iter().filter(|k| !t.has(k)).map(|k| k.to_string()).collect();
        if !absent.is_empty() {
            let why = if mode == Mode::Extract {
                "mode extract needs the physical block"
            } else if params.rate_model == RateModel::Cubic {
                "rate_model = cubic needs the physical block"
            } else {
                "the physical block is incomplete"
            };
            return Err(ConfigError::Invalid(format!("{why}; missing keys: {}", absent.join(", "))));
        }
        params.physical = Some(PhysicalParams {
            dipole: t.number("d")?.unwrap(),
            transition_freq: t.number("omega21")?.unwrap(),
            laser_freq: t.number("omegaL")?.unwrap(),
            density: t.number("Nbar")?.unwrap(),
            second_field: t.number("E2")?.unwrap(),
        });
    }
    for &g in &couplings {
        let mut p = params;
        p.dipole_coupling = g;
        p.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    }

    let sweep_param = t.choice::<SweepParam>("sweep_param")?.unwrap_or(SweepParam::DetuningRatio);
    if sweep_param == SweepParam::Coupling && couplings.len() > 1 {
        return Err(ConfigError::Invalid("sweep_param = G cannot be combined with a list of G values".into()));
    }
    let sweep = Axis {
        min: t.number_or("sweep_min", -1.0)?,
        max: t.number_or("sweep_max", 1.0)?,
        points: t.count_or("sweep_points", 801)?,
    };
    let probe = Axis {
        min: t.number_or("dp_min", -250.0)?,
        max: t.number_or("dp_max", 250.0)?,
        points: t.count_or("dp_points", 10001)?,
    };
    for (name, axis) in [("sweep", sweep), ("dp", probe)] {
        if axis.points < 2 || axis.max <= axis.min {
            return Err(ConfigError::Invalid(format!(
                "{name} axis needs {name}_min < {name}_max and {name}_points >= 2, got [{}, {}] with {}",
                axis.min, axis.max, axis.points
            )));
        }
    }

    let tolerances = Tolerances {
        single: t.number_or("tol_single", Tolerances::default().single)?,
        collective: t.number_or("tol_collective", Tolerances::default().collective)?,
        offdiagonal: t.number_or("tol_offdiagonal", Tolerances::default().offdiagonal)?,
        spectrum: t.number_or("tol_spectrum", Tolerances::default().spectrum)?,
    };
    let regime_factor = t.number_or("regime_factor", DEFAULT_REGIME_FACTOR)?;
    if regime_factor <= 0.0 {
        return Err(ConfigError::Invalid(format!("regime_factor must be positive, got {regime_factor}")));
    }

    let mut cfg = RunConfig {
        mode,
        params,
        couplings,
        sweep_param,
        sweep,
        probe,
        chi_inversion: t.choice("chi_inversion")?.unwrap_or_default(),
        collective_scaling: t.choice("collective_scaling")?.unwrap_or_default(),
        regime_factor,
        seed: t.parse::<u64>("seed", "a non-negative integer")?.unwrap_or(42),
        draws: t.count_or("draws", 100)?,
        threads: t.count_or("threads", 0)?,
        tolerances,
        spectrum_in: t.get("spectrum_in").map(|e| PathBuf::from(&e.value)),
        echo: Vec::new(),
    };
    cfg.echo = effective(&cfg);
    Ok(cfg)
}

/// Shortest round-trip form, in exponent notation outside [1e-3, 1e6).
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-3..1e6).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Every effective setting, defaults included, as `key = value` pairs.
fn effective(c: &RunConfig) -> Vec<(String, String)> {
    let p = &c.params;
    let g: Vec<String> = c.couplings.iter().map(|&g| num(g)).collect();
    let mut out = vec![
        ("mode", c.mode.to_string()),
        ("Omega", num(p.rabi)),
        ("Delta", num(p.detuning)),
        ("G", g.join(", ")),
        ("omega", num(p.drive_freq)),
        ("N", p.emitters.to_string()),
        ("gamma_ref", num(p.gamma_ref)),
        ("rate_model", p.rate_model.to_string()),
        ("stark_shift", p.stark_shift.to_string()),
    ];
    if let Some(ph) = &p.physical {
        out.extend([
            ("d", num(ph.dipole)),
            ("omega21", num(ph.transition_freq)),
            ("omegaL", num(ph.laser_freq)),
            ("Nbar", num(ph.density)),
            ("E2", num(ph.second_field)),
        ]);
    }
    out.extend([
        ("sweep_param", c.sweep_param.name().to_string()),
        ("sweep_min", num(c.sweep.min)),
        ("sweep_max", num(c.sweep.max)),
        ("sweep_points", c.sweep.points.to_string()),
        ("dp_min", num(c.probe.min)),
        ("dp_max", num(c.probe.max)),
        ("dp_points", c.probe.points.to_string()),
        ("chi_inversion", c.chi_inversion.to_string()),
        ("collective_scaling", c.collective_scaling.to_string()),
        ("regime_factor", num(c.regime_factor)),
        ("seed", c.seed.to_string()),
        ("draws", c.draws.to_string()),
        ("threads", c.threads.to_string()),
        ("tol_single", num(c.tolerances.single)),
        ("tol_collective", num(c.tolerances.collective)),
        ("tol_offdiagonal", num(c.tolerances.offdiagonal)),
        ("tol_spectrum", num(c.tolerances.spectrum)),
    ]);
    if let Some(path) = &c.spectrum_in {
        out.push(("spectrum_in", path.display().to_string()));
    }
    out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
