//! CSV and JSON export of risk reports.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::BenchReport;
use crate::error::{Error, Result};
use crate::io::{read_json, write_json};

pub const CSV_HEADER: [&str; 7] = ["trial", "n", "s", "sigma", "mode", "mse", "converged"];

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes one row per trial. Failed trials leave the `mse` cell empty.
pub fn export_csv_to<W: Write>(report: &BenchReport, out: W, path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err(path))?;
    for r in &report.reports {
        for t in &r.trials {
            let mse = t.mse.map(|m| m.to_string()).unwrap_or_default();
            w.write_record([
                t.trial.to_string(),
                r.n.to_string(),
                r.s.to_string(),
                r.sigma.to_string(),
                r.mode.clone(),
                mse,
                t.converged.to_string(),
            ])
            .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn export_csv(report: &BenchReport, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    export_csv_to(report, file, path)
}

pub fn export_json(report: &BenchReport, path: &Path) -> Result<()> {
    write_json(path, report)
}

pub fn import_json(path: &Path) -> Result<BenchReport> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{RiskReport, TrialRecord};

    fn report(trials: usize) -> BenchReport {
        let trials = (0..trials)
            .map(|i| TrialRecord {
                trial: i,
                mse: (i != 1).then_some(0.125 * i as f64),
                converged: i != 1,
                error: (i == 1).then(|| "boom".to_string()),
                alternative: None,
                statistic: None,
                reject: None,
            })
            .collect();
        BenchReport {
            reports: vec![RiskReport {
                n: 27,
                s: 2,
                sigma: 0.1,
                mode: "core".into(),
                delta: 0.1,
                trials,
                empirical_delta_risk: Some(0.25),
                failures: 1,
                type1_errors: None,
                type2_errors: None,
                wall_clock_secs: 1.5,
            }],
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        export_csv_to(&report(3), &mut buf, Path::new("mem")).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "trial,n,s,sigma,mode,mse,converged\n0,27,2,0.1,core,0,true\n1,27,2,0.1,core,,false\n2,27,2,0.1,core,0.25,true\n"
        );
        let mut empty = Vec::new();
        export_csv_to(&BenchReport::default(), &mut empty, Path::new("mem")).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().lines().count(), 1);
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let r = report(4);
        export_json(&r, &path).unwrap();
        assert_eq!(import_json(&path).unwrap(), r);
        let csv_path = dir.path().join("r.csv");
        export_csv(&r, &csv_path).unwrap();
        assert_eq!(std::fs::read_to_string(&csv_path).unwrap().lines().count(), 5);
        assert!(export_csv(&r, &dir.path().join("missing/r.csv")).is_err());
    }
}
