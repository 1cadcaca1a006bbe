use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Arg, ArgAction, Command};

use bichromatic::check_regime;
use bichromatic_cli::{meta_lines, parse_config_with, render_csv, render_meta, run, KEYS};

const EXIT_INPUT: u8 = 1;
const EXIT_TOLERANCE: u8 = 2;

fn command() -> Command {
    let mut cmd = Command::new("sim")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Steady states, probe spectra and oracle checks for dipolar two-level emitters")
        .arg(
            Arg::new("mode")
                .help("inversion-sweep | coherence-sweep | collective-sweep | spectrum | oracle-check | extract")
                .index(1),
        )
        .arg(Arg::new("config").long("config").short('c').value_name("FILE").help("key = value file"))
        .arg(Arg::new("out").long("out").short('o').value_name("CSV").required(true).help("output CSV path"));
    for &key in KEYS.iter().filter(|k| **k != "mode") {
        cmd = cmd.arg(
            Arg::new(key)
                .long(key)
                .value_name("VALUE")
                .action(ArgAction::Set)
                .allow_hyphen_values(true)
                .help(format!("override `{key}`")),
        );
    }
    cmd
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT)
}

fn main() -> ExitCode {
    let m = match command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    let text = match m.get_one::<String>("config") {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(format!("{path}: {e}")),
        },
        None => String::new(),
    };
    let mut overrides = Vec::new();
    for &key in KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            overrides.push((key.to_string(), v.clone()));
        }
    }
    let cfg = match parse_config_with(&text, &overrides) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    for i in 0..cfg.couplings.len() {
        for c in check_regime(&cfg.series_params(i), cfg.regime_factor) {
            eprintln!(
                "warning: G = {}: regime condition `{}` fails ({:.3} vs {:.3})",
                cfg.couplings[i], c.condition, c.lhs, c.required
            );
        }
    }

    let start = Instant::now();
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let elapsed = start.elapsed().as_secs_f64();

    let out = PathBuf::from(m.get_one::<String>("out").expect("required"));
    let csv = match render_csv(&cfg, &report.table) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    if let Err(e) = std::fs::write(&out, csv) {
        return fail(format!("{}: {e}", out.display()));
    }
    let mut meta_path = out.into_os_string();
    meta_path.push(".meta.jsonl");
    let meta = render_meta(&meta_lines(&cfg, &report.table, elapsed, report.tolerance_failed));
    if let Err(e) = std::fs::write(&meta_path, meta) {
        return fail(format!("{}: {e}", PathBuf::from(meta_path).display()));
    }
    if report.tolerance_failed {
        eprintln!("oracle check failed: see the pass column");
        return ExitCode::from(EXIT_TOLERANCE);
    }
    ExitCode::SUCCESS
}
