use rocband::bootstrap::{bootstrap_band, BandConfig, EmpiricalEstimator};
use rocband::empirical::{empirical_auc, empirical_roc, ks_test, mann_whitney_test};
use rocband::model::{default_fpr_grid, Method, NullKind};
use rocband::parametric::{
    biexp_auc, biexp_curve, binorm_auc, binorm_curve, exponential_lrt, fit_biexponential,
    fit_binormal, normal_lrt, welch_t_test,
};
use rocband::semiparametric::{semi_inference, SemiFamily, SemiParams};
use rocband::{Curve, Outcome, Sample};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::num;

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub level: f64,
    pub bootstrap: usize,
    pub grid: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Params {
    pub alpha: Option<f64>,
    pub beta0: Option<f64>,
    pub beta1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutput {
    pub method: Method,
    pub params: Params,
    pub auc: f64,
    /// Point estimates on the FPR grid with the pointwise band.
    pub curve: Curve,
    /// Full staircase, for the empirical method.
    pub staircase: Option<Curve>,
    pub weak: Outcome,
    pub strong: Outcome,
    pub warnings: Vec<String>,
}

pub fn is_stochastic(method: Method) -> bool {
    !matches!(method, Method::ParamBiexp | Method::ParamBinorm)
}

fn band_config(opts: &FitOptions) -> Result<BandConfig<f64>, CliError> {
    let seed = opts
        .seed
        .ok_or_else(|| CliError::Usage("--seed is required for bootstrap methods".into()))?;
    Ok(BandConfig::new(opts.bootstrap, opts.level, default_fpr_grid(opts.grid), seed)?)
}

pub fn run_fit(sample: &Sample, method: Method, opts: &FitOptions) -> Result<FitOutput, CliError> {
    let grid = default_fpr_grid(opts.grid);
    let out = match method {
        Method::Empirical => {
            let band = bootstrap_band(sample, &EmpiricalEstimator, &band_config(opts)?)?;
            FitOutput {
                method,
                params: Params::default(),
                auc: empirical_auc(sample),
                curve: band.curve,
                staircase: Some(empirical_roc(sample)),
                weak: mann_whitney_test(sample),
                strong: ks_test(sample),
                warnings: band.warnings,
            }
        }
        Method::ParamBiexp => {
            let fit = fit_biexponential(sample)?;
            let lrt = exponential_lrt(sample)?;
            FitOutput {
                method,
                params: Params {
                    alpha: Some(fit.alpha),
                    ..Params::default()
                },
                auc: biexp_auc(&fit),
                curve: biexp_curve(&fit, &grid, opts.level)?,
                staircase: None,
                weak: lrt.as_null(NullKind::Weak),
                strong: lrt,
                warnings: Vec::new(),
            }
        }
        Method::ParamBinorm => {
            let fit = fit_binormal(sample)?;
            FitOutput {
                method,
                params: Params {
                    alpha: None,
                    beta0: Some(fit.beta0),
                    beta1: Some(fit.beta1),
                },
                auc: binorm_auc(&fit)?,
                curve: binorm_curve(&fit, &grid, opts.level)?,
                staircase: None,
                weak: welch_t_test(sample)?,
                strong: normal_lrt(sample)?,
                warnings: Vec::new(),
            }
        }
        Method::SemiBiexp | Method::SemiBinorm => {
            let family = if method == Method::SemiBiexp {
                SemiFamily::Biexp
            } else {
                SemiFamily::Binorm
            };
            let inf = semi_inference(sample, family, &band_config(opts)?)?;
            let params = match inf.fit.params {
                SemiParams::Biexp { alpha } => Params {
                    alpha: Some(alpha),
                    ..Params::default()
                },
                SemiParams::Binorm { beta0, beta1 } => Params {
                    alpha: None,
                    beta0: Some(beta0),
                    beta1: Some(beta1),
                },
            };
            FitOutput {
                method,
                params,
                auc: inf.auc,
                curve: inf.curve,
                staircase: None,
                weak: inf.weak,
                strong: inf.strong,
                warnings: inf.warnings,
            }
        }
    };
    Ok(out)
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

fn test_json(t: &Outcome) -> Value {
    json!({
        "statistic": num(t.statistic),
        "p_value": num(t.p_value),
        "null": t.null_kind.label(),
        "reference": t.reference_distribution,
    })
}

fn curve_json(curve: &Curve) -> Value {
    let band = curve.band();
    let rows: Vec<Value> = curve
        .points()
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let (lo, hi) = band.map_or((Value::Null, Value::Null), |b| {
                (num(b.intervals[k].lower), num(b.intervals[k].upper))
            });
            json!({ "fpr": num(p.fpr), "tpr": num(p.tpr), "lo": lo, "hi": hi })
        })
        .collect();
    Value::Array(rows)
}

/// Document for one method. Every key is always present.
pub fn fit_json(
    sample: &Sample,
    method: Method,
    level: f64,
    result: &Result<FitOutput, CliError>,
) -> Value {
    let head = json!({
        "method": method.name(),
        "convention": sample.orientation().label(),
        "n0": sample.n0(),
        "n1": sample.n1(),
        "level": num(level),
    });
    let mut doc = match result {
        Ok(out) => json!({
            "params": {
                "alpha": opt(out.params.alpha),
                "beta0": opt(out.params.beta0),
                "beta1": opt(out.params.beta1),
            },
            "auc": num(out.auc),
            "curve": curve_json(&out.curve),
            "tests": { "weak": test_json(&out.weak), "strong": test_json(&out.strong) },
            "warnings": out.warnings,
            "error": null,
        }),
        Err(e) => json!({
            "params": { "alpha": null, "beta0": null, "beta1": null },
            "auc": null,
            "curve": null,
            "tests": { "weak": null, "strong": null },
            "warnings": [],
            "error": e.to_json(),
        }),
    };
    let (Value::Object(target), Value::Object(extra)) = (&mut doc, head) else {
        unreachable!()
    };
    for (k, v) in extra {
        target.insert(k, v);
    }
    doc
}
