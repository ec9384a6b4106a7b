use std::fmt::Write;

use rocband::simulation::{summary_p_grid, Dgm, SimMethod};
use rocband::{Mechanism, Report, Scenario};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DgmKind {
    /// Exponential reference and comparator.
    Exp,
    /// Normal reference and comparator.
    Norm,
    /// Normal reference, comparator giving a biexponential curve.
    NormBiexp,
    /// Exponential reference, comparator giving a binormal curve.
    ExpBinorm,
}

#[derive(Debug, Clone, Default)]
pub struct DgmParams {
    pub lambda0: Option<f64>,
    pub lambda1: Option<f64>,
    pub mu0: Option<f64>,
    pub sd0: Option<f64>,
    pub mu1: Option<f64>,
    pub sd1: Option<f64>,
    pub alpha: Option<f64>,
    pub beta0: Option<f64>,
    pub beta1: Option<f64>,
}

pub fn build_dgm(kind: DgmKind, p: &DgmParams) -> Result<Mechanism, CliError> {
    let dgm = match kind {
        DgmKind::Exp => Dgm::ExpExp {
            lambda0: p.lambda0.unwrap_or(1.0),
            lambda1: p.lambda1.unwrap_or(4.0),
        },
        DgmKind::Norm => Dgm::NormNorm {
            mu0: p.mu0.unwrap_or(5.5),
            sd0: p.sd0.unwrap_or(1.0),
            mu1: p.mu1.unwrap_or(4.0),
            sd1: p.sd1.unwrap_or(1.0),
        },
        DgmKind::NormBiexp => Dgm::NormRefBiexp {
            mu0: p.mu0.unwrap_or(0.0),
            sd0: p.sd0.unwrap_or(1.0),
            alpha: p.alpha.unwrap_or(4.0),
        },
        DgmKind::ExpBinorm => Dgm::ExpRefBinorm {
            lambda0: p.lambda0.unwrap_or(1.0),
            beta0: p.beta0.unwrap_or(1.5),
            beta1: p.beta1.unwrap_or(1.0),
        },
    };
    dgm.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(dgm)
}

pub fn parse_methods(list: &str) -> Result<Vec<SimMethod>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            SimMethod::parse(name)
                .ok_or_else(|| CliError::Usage(format!("unknown method \"{name}\"")))
        })
        .collect()
}

pub fn parse_grid(list: Option<&str>) -> Result<Vec<f64>, CliError> {
    let Some(list) = list else {
        return Ok(summary_p_grid());
    };
    let mut grid = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("invalid FPR value \"{t}\"")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

pub fn validate(scenario: &Scenario) -> Result<(), CliError> {
    scenario
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Fixed-width text table of a report.
pub fn summary_table(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} (n0={}, n1={}, M={})",
        report.scenario, report.n0, report.n1, report.replicates
    );
    let _ = writeln!(
        s,
        "{:<13} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "method", "p", "true", "mean", "width", "CP", "failed"
    );
    for r in &report.records {
        let _ = writeln!(
            s,
            "{:<13} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.3} {:>8}",
            r.method.name(),
            r.p,
            r.true_roc,
            r.mean_estimate,
            r.mean_width,
            r.coverage,
            r.failures
        );
    }
    s
}
