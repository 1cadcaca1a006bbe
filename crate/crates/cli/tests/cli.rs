//! End-to-end runs of the `sim` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bichromatic_cli::{parse_config, read_spectrum, Mode};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sim")).args(args).output().expect("sim runs")
}

fn run_ok(args: &[&str], out: &Path) -> String {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--out", out.to_str().unwrap()]);
    let o = sim(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn example_configs_parse() {
    let mut modes = Vec::new();
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        modes.push(cfg.mode);
    }
    for m in [
        Mode::InversionSweep,
        Mode::CoherenceSweep,
        Mode::CollectiveSweep,
        Mode::Spectrum,
        Mode::OracleCheck,
        Mode::Extract,
    ] {
        assert!(modes.contains(&m), "no example config for {m}");
    }
}

#[test]
fn coherence_sweep_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("coherence.cfg");
    let text = run_ok(&["--config", cfg.to_str().unwrap(), "--sweep_points", "9"], &dir.path().join("c.csv"));
    let golden = include_str!("golden/coherence.csv");
    let header = |t: &str| {
        t.lines().filter(|l| l.starts_with('#') || l.starts_with("delta")).map(String::from).collect::<Vec<_>>()
    };
    assert_eq!(header(&text), header(golden));
    let (got, want) = (data_rows(&text), data_rows(golden));
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(&want) {
        for (a, b) in g.iter().zip(w) {
            if b.is_empty() {
                assert!(a.is_empty());
                continue;
            }
            let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-3), "{a} vs {b}");
        }
    }
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("spectrum.cfg");
    let base = ["--config", cfg.to_str().unwrap(), "--dp_points", "2001"];
    let one = run_ok(&[&base[..], &["--threads", "1"]].concat(), &dir.path().join("a.csv"));
    let again = run_ok(&[&base[..], &["--threads", "1"]].concat(), &dir.path().join("b.csv"));
    let four = run_ok(&[&base[..], &["--threads", "4"]].concat(), &dir.path().join("c.csv"));
    assert_eq!(one, again);
    // only the echoed thread count differs
    assert_eq!(one.replace("# threads = 1", "# threads = 4"), four);
}

#[test]
fn sidecar_records_parameters_regime_and_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    run_ok(&["inversion-sweep", "--Omega", "45", "--G", "16,24", "--omega", "100", "--sweep_points", "11"], &out);
    let meta = std::fs::read_to_string(dir.path().join("s.csv.meta.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = meta.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let kinds: Vec<&str> = lines.iter().map(|v| v["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["params", "regime", "regime", "run"]);
    assert_eq!(lines[0]["params"]["G"], "16, 24");
    assert_eq!(lines[2]["G"], 24.0);
    assert_eq!(lines[3]["rows"], 22);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();

    let missing = sim(&["--out", out]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing required keys: mode, Omega, G, omega"));

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "mode = spectrum\nOmga = 45\n").unwrap();
    let typo = sim(&["--config", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(typo.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&typo.stderr).contains("line 2: unknown key `Omga`; did you mean `Omega`?"));

    assert_eq!(sim(&["--no-such-flag", "--out", out]).status.code(), Some(1));

    let oracle = configs().join("oracle.cfg");
    let tight = sim(&[
        "--config",
        oracle.to_str().unwrap(),
        "--draws",
        "2",
        "--N",
        "2",
        "--dp_points",
        "201",
        "--tol_spectrum",
        "1e-12",
        "--out",
        out,
    ]);
    assert_eq!(tight.status.code(), Some(2));
    let table = std::fs::read_to_string(out).unwrap();
    assert!(table.contains("regression_spectrum,") && table.trim_end().ends_with("false"));

    let ok =
        sim(&["--config", oracle.to_str().unwrap(), "--draws", "5", "--N", "3", "--dp_points", "1001", "--out", out]);
    assert_eq!(ok.status.code(), Some(0), "{}", std::fs::read_to_string(out).unwrap());
}

#[test]
fn dipole_recovered_from_written_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.csv");
    let cfg = configs().join("spectrum.cfg");
    run_ok(&["--config", cfg.to_str().unwrap()], &spec);
    assert_eq!(read_spectrum(&spec).unwrap().detunings.len(), 10001);

    let extract = configs().join("extract.cfg");
    let text = run_ok(
        &["--config", extract.to_str().unwrap(), "--Delta", "-38.7", "--spectrum_in", spec.to_str().unwrap()],
        &dir.path().join("e.csv"),
    );
    let row = &data_rows(&text)[0];
    let debye: f64 = row[4].parse().unwrap();
    assert!((debye - 100.0).abs() < 1.0, "{row:?}");
    assert!(row[5].is_empty());
}
