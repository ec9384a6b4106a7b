use std::fmt;

use rayon::prelude::*;

use super::dgm::Dgm;
use crate::bootstrap::{bootstrap_band, BandConfig, EmpiricalEstimator, MIN_REPLICATES};
use crate::empirical::{wilson_interval, EmpiricalDistribution};
use crate::error::{Result, RocError};
use crate::model::TwoGroupSample;
use crate::numerics::{derive_seed, RngStream};
use crate::parametric::{biexp_curve_ci, binorm_curve_ci, fit_biexponential, fit_binormal};
use crate::semiparametric::{semi_inference, SemiFamily};
use crate::Scalar;

/// Interval methods compared in a scenario. `Wilson` is the naive binomial
/// interval that treats the estimated reference quantile as fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimMethod {
    Empirical,
    Wilson,
    ParamBiexp,
    ParamBinorm,
    SemiBiexp,
    SemiBinorm,
}

impl SimMethod {
    pub const ALL: [SimMethod; 6] = [
        SimMethod::Empirical,
        SimMethod::Wilson,
        SimMethod::ParamBiexp,
        SimMethod::ParamBinorm,
        SimMethod::SemiBiexp,
        SimMethod::SemiBinorm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SimMethod::Empirical => "empirical",
            SimMethod::Wilson => "wilson",
            SimMethod::ParamBiexp => "param-biexp",
            SimMethod::ParamBinorm => "param-binorm",
            SimMethod::SemiBiexp => "semi-biexp",
            SimMethod::SemiBinorm => "semi-binorm",
        }
    }

    pub fn parse(s: &str) -> Option<SimMethod> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }

    pub fn uses_bootstrap(self) -> bool {
        matches!(
            self,
            SimMethod::Empirical | SimMethod::SemiBiexp | SimMethod::SemiBinorm
        )
    }
}

impl fmt::Display for SimMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// FPR values used for summary tables.
pub fn summary_p_grid<T: Scalar>() -> Vec<T> {
    (1..=9).map(|k| T::of(k as f64 / 10.0)).collect()
}

/// 99 equally spaced interior FPR values for curve plots.
pub fn curve_p_grid<T: Scalar>() -> Vec<T> {
    (1..=99).map(|k| T::of(k as f64 / 100.0)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub dgm: Dgm<T>,
    pub n0: usize,
    pub n1: usize,
    pub methods: Vec<SimMethod>,
    pub p_grid: Vec<T>,
    /// Monte-Carlo replicates M.
    pub replicates: usize,
    /// Bootstrap replicates B per Monte-Carlo replicate.
    pub bootstrap: usize,
    pub level: T,
    pub seed: u64,
}

impl<T: Scalar> Scenario<T> {
    pub fn validate(&self) -> Result<()> {
        self.dgm.validate()?;
        if self.n0 < 2 || self.n1 < 2 {
            return Err(RocError::Validation("each group needs at least 2 draws".into()));
        }
        if self.replicates == 0 {
            return Err(RocError::Validation("at least one Monte-Carlo replicate".into()));
        }
        if self.methods.is_empty() {
            return Err(RocError::Validation("no methods requested".into()));
        }
        if self.p_grid.iter().any(|&p| !(p > T::zero() && p < T::one())) {
            return Err(RocError::Validation("grid values must lie strictly inside (0,1)".into()));
        }
        if self.p_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RocError::Validation("grid must be strictly increasing".into()));
        }
        if !(self.level > T::of(0.5) && self.level < T::one()) {
            return Err(RocError::Validation(format!("level {} outside (0.5, 1)", self.level)));
        }
        if self.methods.iter().any(|m| m.uses_bootstrap()) && self.bootstrap < MIN_REPLICATES {
            return Err(RocError::Validation(format!(
                "at least {MIN_REPLICATES} bootstrap replicates required, got {}",
                self.bootstrap
            )));
        }
        Ok(())
    }
}

/// Aggregates for one (method, p) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRecord<T> {
    pub method: SimMethod,
    pub p: T,
    pub true_roc: T,
    pub mean_estimate: T,
    pub mean_width: T,
    pub coverage: T,
    /// Replicates in which the method failed (shared across its p cells).
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport<T> {
    pub scenario: String,
    pub n0: usize,
    pub n1: usize,
    pub replicates: usize,
    pub records: Vec<ScenarioRecord<T>>,
    /// Methods that failed in more than 10% of replicates.
    pub flagged: Vec<SimMethod>,
}

impl<T: Scalar> ScenarioReport<T> {
    pub fn record(&self, method: SimMethod, p: T) -> Option<&ScenarioRecord<T>> {
        self.records
            .iter()
            .find(|r| r.method == method && (r.p - p).abs() <= T::epsilon() * T::of(4.0))
    }
}

/// (estimate, lower, upper) per grid point.
type Cells<T> = Vec<(T, T, T)>;

fn banded_cells<T: Scalar>(curve: &crate::model::RocCurveEstimate<T>) -> Cells<T> {
    let points = curve.points();
    let band = curve.band().expect("banded curve");
    // Drop the fixed (0,0) and (1,1) end points.
    points[1..points.len() - 1]
        .iter()
        .zip(&band.intervals[1..band.intervals.len() - 1])
        .map(|(pt, iv)| (pt.tpr, iv.lower, iv.upper))
        .collect()
}

fn evaluate_method<T: Scalar>(
    method: SimMethod,
    sample: &TwoGroupSample<T>,
    scenario: &Scenario<T>,
    boot_seed: u64,
) -> Result<Cells<T>> {
    let grid = &scenario.p_grid;
    let level = scenario.level;
    let band_config = || BandConfig::new(scenario.bootstrap, level, grid.clone(), boot_seed);
    match method {
        SimMethod::Empirical => {
            let band = bootstrap_band(sample, &EmpiricalEstimator, &band_config()?)?;
            Ok(banded_cells(&band.curve))
        }
        SimMethod::Wilson => {
            let s = sample.canonical();
            let f0 = EmpiricalDistribution::new(s.reference())?;
            let f1 = EmpiricalDistribution::new(s.comparator())?;
            grid.iter()
                .map(|&p| {
                    let k = f1.count_le(f0.quantile(p)?);
                    let (lo, hi) = wilson_interval(k, s.n1(), level)?;
                    Ok((T::of_usize(k) / T::of_usize(s.n1()), lo, hi))
                })
                .collect()
        }
        SimMethod::ParamBiexp => {
            let fit = fit_biexponential(sample)?;
            grid.iter()
                .map(|&p| {
                    let (lo, pt, hi) = biexp_curve_ci(&fit, p, level, fit.n0, fit.n1)?;
                    Ok((pt, lo, hi))
                })
                .collect()
        }
        SimMethod::ParamBinorm => {
            let fit = fit_binormal(sample)?;
            grid.iter()
                .map(|&p| {
                    let (lo, pt, hi) = binorm_curve_ci(&fit, p, level, fit.n0, fit.n1)?;
                    Ok((pt, lo, hi))
                })
                .collect()
        }
        SimMethod::SemiBiexp | SimMethod::SemiBinorm => {
            let family = if method == SimMethod::SemiBiexp {
                SemiFamily::Biexp
            } else {
                SemiFamily::Binorm
            };
            let inf = semi_inference(sample, family, &band_config()?)?;
            Ok(banded_cells(&inf.curve))
        }
    }
}

/// Runs M replicates. Replicate m draws its data from stream m of `seed`
/// and seeds its bootstraps with `derive_seed(seed, m)`, so the report does
/// not depend on scheduling.
pub fn run_scenario<T: Scalar>(scenario: &Scenario<T>) -> Result<ScenarioReport<T>> {
    scenario.validate()?;
    let per_replicate: Vec<Vec<Option<Cells<T>>>> = (0..scenario.replicates)
        .into_par_iter()
        .map(|m| {
            let mut rng = RngStream::new(scenario.seed, m as u64);
            let sample = scenario.dgm.sample(scenario.n0, scenario.n1, &mut rng);
            let boot_seed = derive_seed(scenario.seed, m as u64);
            scenario
                .methods
                .iter()
                .map(|&method| {
                    let sample = sample.as_ref().ok()?;
                    evaluate_method(method, sample, scenario, boot_seed).ok()
                })
                .collect()
        })
        .collect();

    let k = scenario.p_grid.len();
    let mut records = Vec::with_capacity(scenario.methods.len() * k);
    let mut flagged = Vec::new();
    for (mi, &method) in scenario.methods.iter().enumerate() {
        let done: Vec<&Cells<T>> = per_replicate.iter().filter_map(|r| r[mi].as_ref()).collect();
        let failures = scenario.replicates - done.len();
        if failures * 10 > scenario.replicates {
            flagged.push(method);
        }
        for (j, &p) in scenario.p_grid.iter().enumerate() {
            let truth = scenario.dgm.true_roc(p);
            let (mut est, mut width, mut covered) = (T::zero(), T::zero(), 0usize);
            for cells in &done {
                let (e, lo, hi) = cells[j];
                est = est + e;
                width = width + (hi - lo);
                if lo <= truth && truth <= hi {
                    covered += 1;
                }
            }
            let n = T::of_usize(done.len());
            let avg = |s: T| if done.is_empty() { T::nan() } else { s / n };
            records.push(ScenarioRecord {
                method,
                p,
                true_roc: truth,
                mean_estimate: avg(est),
                mean_width: avg(width),
                coverage: avg(T::of_usize(covered)),
                failures,
            });
        }
    }
    Ok(ScenarioReport {
        scenario: scenario.dgm.label(),
        n0: scenario.n0,
        n1: scenario.n1,
        replicates: scenario.replicates,
        records,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal_scenario(methods: Vec<SimMethod>, replicates: usize) -> Scenario<f64> {
        Scenario {
            dgm: Dgm::NormNorm { mu0: 5.5, sd0: 1.0, mu1: 4.0, sd1: 1.0 },
            n0: 30,
            n1: 30,
            methods,
            p_grid: vec![0.0670, 0.4140],
            replicates,
            bootstrap: 200,
            level: 0.95,
            seed: 17,
        }
    }

    #[test]
    fn single_replicate() {
        let r = run_scenario(&normal_scenario(vec![SimMethod::Empirical, SimMethod::Wilson], 1)).unwrap();
        assert_eq!(r.records.len(), 4);
        for rec in &r.records {
            assert!(rec.coverage == 0.0 || rec.coverage == 1.0);
            assert_eq!(rec.failures, 0);
        }
    }

    #[test]
    fn wilson_uses_the_comparator_count() {
        let mut rng = RngStream::new(17, 0);
        let sc = normal_scenario(vec![SimMethod::Wilson], 1);
        let s = sc.dgm.sample(30, 30, &mut rng).unwrap();
        let cells = evaluate_method(SimMethod::Wilson, &s, &sc, 0).unwrap();
        let emp = crate::empirical::empirical_roc_at(&s, &sc.p_grid).unwrap();
        for ((e, lo, hi), want) in cells.iter().zip(emp) {
            assert_eq!(*e, want);
            let (wl, wh) = wilson_interval((want * 30.0).round() as usize, 30, 0.95).unwrap();
            assert_eq!((*lo, *hi), (wl, wh));
        }
    }

    #[test]
    fn independent_of_worker_count() {
        let sc = normal_scenario(vec![SimMethod::Empirical, SimMethod::ParamBinorm], 12);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_scenario(&sc).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn failures_are_counted_and_flagged() {
        // Normal data with negative values break the exponential fit.
        let sc = Scenario {
            dgm: Dgm::NormNorm { mu0: 0.0, sd0: 1.0, mu1: 0.0, sd1: 1.0 },
            methods: vec![SimMethod::ParamBiexp, SimMethod::ParamBinorm],
            ..normal_scenario(vec![], 20)
        };
        let r = run_scenario(&sc).unwrap();
        assert_eq!(r.record(SimMethod::ParamBiexp, 0.067).unwrap().failures, 20);
        assert_eq!(r.flagged, vec![SimMethod::ParamBiexp]);
        assert_eq!(r.record(SimMethod::ParamBinorm, 0.067).unwrap().failures, 0);
    }

    #[test]
    fn validation() {
        let mut sc = normal_scenario(vec![SimMethod::Empirical], 1);
        sc.bootstrap = 10;
        assert!(run_scenario(&sc).is_err());
        sc.methods = vec![SimMethod::Wilson];
        assert!(run_scenario(&sc).is_ok());
        sc.p_grid = vec![0.5, 0.2];
        assert!(run_scenario(&sc).is_err());
    }

    #[test]
    fn misspecified_models_show_their_flaws() {
        let grid: Vec<f64> = vec![0.1, 0.2, 0.3, 0.5, 0.7];
        let exp = Scenario {
            dgm: Dgm::ExpExp { lambda0: 1.0, lambda1: 4.0 },
            n0: 60,
            n1: 60,
            methods: vec![SimMethod::ParamBinorm],
            p_grid: grid.clone(),
            replicates: 400,
            bootstrap: 100,
            level: 0.95,
            seed: 5,
        };
        let r = run_scenario(&exp).unwrap();
        assert!(r.records.iter().any(|rec| rec.coverage < 0.85));
        let norm = Scenario {
            dgm: Dgm::NormNorm { mu0: 5.5, sd0: 1.0, mu1: 4.0, sd1: 1.0 },
            methods: vec![SimMethod::ParamBiexp],
            ..exp
        };
        let r = run_scenario(&norm).unwrap();
        assert!(r.records.iter().any(|rec| (rec.mean_estimate - rec.true_roc).abs() > 0.1));
    }
}
