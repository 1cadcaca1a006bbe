//! CSV rendering and the JSON-lines metadata sidecar.

use serde_json::{json, Value};

use bichromatic::regime_report;

use crate::config::RunConfig;

/// Rows grouped into series, each optionally labelled.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub series: Vec<(Option<String>, Vec<Vec<String>>)>,
}

impl Table {
    pub fn rows(&self) -> usize {
        self.series.iter().map(|(_, r)| r.len()).sum()
    }
}

/// Full-precision scientific notation, so output round-trips exactly.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text: a `#` header echoing every effective setting, the column row,
/// then each series preceded by a `# series:` line when labelled.
pub fn render_csv(cfg: &RunConfig, table: &Table) -> Result<String, csv::Error> {
    let mut out = String::new();
    out.push_str(&format!("# bichromatic {} {}\n", env!("CARGO_PKG_VERSION"), cfg.mode));
    for (k, v) in &cfg.echo {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    out.push_str(&record(&table.columns)?);
    for (label, rows) in &table.series {
        if let Some(label) = label {
            out.push_str(&format!("# series: {label}\n"));
        }
        for row in rows {
            out.push_str(&record(row)?);
        }
    }
    Ok(out)
}

fn record(fields: &[String]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(fields)?;
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
}

/// Sidecar lines: effective parameters, the regime report of each series,
/// and a run summary with timing.
pub fn meta_lines(cfg: &RunConfig, table: &Table, elapsed_s: f64, tolerance_failed: bool) -> Vec<Value> {
    let params: serde_json::Map<String, Value> =
        cfg.echo.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    let mut lines = vec![json!({ "kind": "params", "params": params })];
    for i in 0..cfg.couplings.len() {
        let p = cfg.series_params(i);
        let checks: Vec<Value> = regime_report(&p, cfg.regime_factor)
            .iter()
            .map(|c| json!({ "condition": c.condition, "lhs": c.lhs, "required": c.required, "holds": c.holds }))
            .collect();
        lines.push(json!({ "kind": "regime", "G": p.dipole_coupling, "factor": cfg.regime_factor, "checks": checks }));
    }
    lines.push(json!({
        "kind": "run",
        "version": env!("CARGO_PKG_VERSION"),
        "mode": cfg.mode.to_string(),
        "rows": table.rows(),
        "tolerance_failed": tolerance_failed,
        "elapsed_s": elapsed_s,
    }));
    lines
}

pub fn render_meta(lines: &[Value]) -> String {
    lines.iter().map(|v| format!("{v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 2.6e6, f64::MIN_POSITIVE] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let cfg = parse_config("mode = spectrum\nOmega = 45\nomega = 100\nG = 16, 24\n").unwrap();
        let table = Table {
            columns: vec!["a".into(), "error".into()],
            series: vec![
                (Some("G = 16".into()), vec![vec!["1".into(), "".into()]]),
                (Some("G = 24".into()), vec![vec!["2".into(), "bad, very".into()]]),
            ],
        };
        let text = render_csv(&cfg, &table).unwrap();
        assert!(text.contains("# G = 16, 24\n"));
        assert!(text.ends_with("a,error\n# series: G = 16\n1,\n# series: G = 24\n2,\"bad, very\"\n"));
        let meta = meta_lines(&cfg, &table, 0.0, false);
        assert_eq!(meta.len(), 4);
        assert_eq!(meta[3]["rows"], 2);
    }
}
