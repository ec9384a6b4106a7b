use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::scenario::ScenarioReport;
use crate::error::Result;
use crate::Scalar;

pub const REPORT_COLUMNS: [&str; 10] = [
    "scenario",
    "method",
    "n0",
    "n1",
    "p",
    "true_roc",
    "mean_est",
    "mean_width",
    "coverage",
    "failures",
];

/// Writes the CSV report (header always present, LF line endings).
pub fn write_report<T: Scalar, W: Write>(reports: &[ScenarioReport<T>], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(REPORT_COLUMNS)?;
    for report in reports {
        for r in &report.records {
            w.write_record([
                report.scenario.clone(),
                r.method.name().to_string(),
                report.n0.to_string(),
                report.n1.to_string(),
                r.p.to_string(),
                r.true_roc.to_string(),
                r.mean_estimate.to_string(),
                r.mean_width.to_string(),
                r.coverage.to_string(),
                r.failures.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn export_report<T: Scalar>(reports: &[ScenarioReport<T>], path: &Path) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    write_report(reports, file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::{run_scenario, Dgm, Scenario, SimMethod};

    fn scenario(grid: Vec<f64>) -> Scenario<f64> {
        Scenario {
            dgm: Dgm::NormNorm { mu0: 5.5, sd0: 1.0, mu1: 4.0, sd1: 1.0 },
            n0: 30,
            n1: 30,
            methods: vec![SimMethod::Empirical, SimMethod::Wilson],
            p_grid: grid,
            replicates: 3,
            bootstrap: 100,
            level: 0.95,
            seed: 2,
        }
    }

    fn csv_of(reports: &[ScenarioReport<f64>]) -> String {
        let mut buf = Vec::new();
        write_report(reports, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_grid_is_header_only() {
        let r = run_scenario(&scenario(vec![])).unwrap();
        assert_eq!(
            csv_of(&[r]),
            "scenario,method,n0,n1,p,true_roc,mean_est,mean_width,coverage,failures\n"
        );
    }

    #[test]
    fn table_layout_and_reexport() {
        let grid = vec![0.0027, 0.0670, 0.1016, 0.2013, 0.4140];
        let a = run_scenario(&scenario(grid.clone())).unwrap();
        let b = run_scenario(&Scenario { n0: 60, n1: 60, ..scenario(grid) }).unwrap();
        let text = csv_of(&[a.clone(), b.clone()]);
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(rows.iter().filter(|l| l.contains(",empirical,")).count(), 10);
        assert_eq!(rows.iter().filter(|l| l.contains(",wilson,")).count(), 10);
        assert!(!text.contains('\r'));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        export_report(&[a.clone(), b.clone()], &path).unwrap();
        let first = std::fs::read(&path).unwrap();
        export_report(&[a, b], &path).unwrap();
        assert_eq!(first, std::fs::read(&path).unwrap());
        assert_eq!(first, text.into_bytes());
    }
}
