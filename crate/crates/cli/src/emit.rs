use crate::{CliError, Report, Timing};
use nucont_core::sets::fmt17;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

/// Pretty JSON with a trailing newline. Floats use the shortest
/// representation that round-trips, so the text is exact and stable.
pub fn to_json(r: &Report) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

/// `scenario,checker,n,quantity,value`, values with 17 significant digits.
pub fn to_csv(r: &Report) -> String {
    let mut out = String::from("scenario,checker,n,quantity,value\n");
    for c in &r.checks {
        for row in &c.trace {
            let _ = writeln!(out, "{},{},{},{},{}", r.scenario, c.checker, row.n, row.quantity, fmt17(row.value));
        }
    }
    out
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, CliError> {
    std::fs::write(&path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

/// Writes `<scenario>.json` / `<scenario>.csv` and `<scenario>.timing.json`
/// into `dir`, returning the written paths.
pub fn emit_report(r: &Report, timing: &Timing, formats: &[Format], dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for f in formats {
        out.push(match f {
            Format::Json => write(dir.join(format!("{}.json", r.scenario)), &to_json(r))?,
            Format::Csv => write(dir.join(format!("{}.csv", r.scenario)), &to_csv(r))?,
        });
    }
    let t = serde_json::to_string_pretty(timing).expect("timing serializes");
    out.push(write(dir.join(format!("{}.timing.json", r.scenario)), &t)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{parse_scenario, run_scenario, RunOptions};

    #[test]
    fn csv_and_json_agree() {
        let text = r#"{
            "name": "diag",
            "family": {"kind": "perturbation",
                       "limit": {"variant": "diagonal", "prefix": [], "tail": {"rule": "harmonic", "scale": [1, 0]}},
                       "direction": {"variant": "diagonal", "prefix": [], "tail": {"rule": "harmonic", "scale": [1, 0]}},
                       "rate": {"rate": "harmonic"}},
            "n_range": [1, 64],
            "tolerances": {"classification": 0.1},
            "checkers": [{"checker": "commuting-case", "tol": 0.1}]
        }"#;
        let s = parse_scenario(text).unwrap();
        let (r, _) = run_scenario(&s, RunOptions::default()).unwrap();
        assert!(!r.checks[0].trace.is_empty(), "{:?}", r.checks[0]);
        let csv = to_csv(&r);
        let json: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
        let trace = json["checks"][0]["trace"].as_array().unwrap();
        let lines: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(lines.len(), trace.len());
        for (line, row) in lines.iter().zip(trace) {
            let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert_eq!(v, row["value"].as_f64().unwrap());
        }
        let first: Vec<&str> = lines[0].split(',').collect();
        assert_eq!(&first[..2], &["diag", "commuting-case"]);
        assert_eq!(first[3], "hausdorff_distance");
        let v: f64 = first[4].parse().unwrap();
        assert!(v.is_finite() && v >= 0.0);
    }
}
