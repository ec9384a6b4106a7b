//! Stratified nonparametric bootstrap with percentile pointwise bands.
//!
//! Replicate `b` draws from `RngStream::new(seed, b)`; replicates run on the
//! rayon pool and are reduced in index order, so results do not depend on
//! the number of workers.

use rayon::prelude::*;

use crate::empirical::empirical_roc_at;
use crate::error::{Result, RocError};
use crate::model::{
    Band, BandAxis, BandInterval, Method, RocCurveEstimate, RocPoint, TwoGroupSample,
};
use crate::numerics::RngStream;
use crate::Scalar;

pub const DEFAULT_REPLICATES: usize = 3000;
pub const MIN_REPLICATES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct BandConfig<T> {
    replicates: usize,
    level: T,
    fpr_grid: Vec<T>,
    seed: u64,
    unconditional: bool,
}

impl<T: Scalar> BandConfig<T> {
    pub fn new(replicates: usize, level: T, fpr_grid: Vec<T>, seed: u64) -> Result<Self> {
        if replicates < MIN_REPLICATES {
            return Err(RocError::Validation(format!(
                "at least {MIN_REPLICATES} bootstrap replicates required, got {replicates}"
            )));
        }
        if !(level > T::of(0.5) && level < T::one()) {
            return Err(RocError::Validation(format!("level {level} outside (0.5, 1)")));
        }
        if fpr_grid.iter().any(|&p| !(p > T::zero() && p < T::one())) {
            return Err(RocError::Validation("grid values must lie strictly inside (0,1)".into()));
        }
        if fpr_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RocError::Validation("grid must be strictly increasing".into()));
        }
        Ok(Self {
            replicates,
            level,
            fpr_grid,
            seed,
            unconditional: false,
        })
    }

    /// Resample the pooled data instead of each group separately; group
    /// sizes then vary between replicates.
    pub fn unconditional(mut self, on: bool) -> Self {
        self.unconditional = on;
        self
    }

    pub fn replicates(&self) -> usize {
        self.replicates
    }

    pub fn level(&self) -> T {
        self.level
    }

    pub fn fpr_grid(&self) -> &[T] {
        &self.fpr_grid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_unconditional(&self) -> bool {
        self.unconditional
    }
}

fn draw<T: Scalar>(values: &[T], n: usize, rng: &mut RngStream) -> Vec<T> {
    (0..n).map(|_| values[rng.index(values.len())]).collect()
}

/// Full-size resample with replacement within each group.
pub fn stratified_resample<T: Scalar>(
    sample: &TwoGroupSample<T>,
    rng: &mut RngStream,
) -> TwoGroupSample<T> {
    let reference = draw(sample.reference(), sample.n0(), rng);
    let comparator = draw(sample.comparator(), sample.n1(), rng);
    TwoGroupSample::from_parts_unchecked(reference, comparator, sample.orientation())
}

/// Resample of the pooled labelled data; fails when a group ends up with
/// fewer than two observations.
pub fn unconditional_resample<T: Scalar>(
    sample: &TwoGroupSample<T>,
    rng: &mut RngStream,
) -> Result<TwoGroupSample<T>> {
    let n = sample.n();
    let mut reference = Vec::new();
    let mut comparator = Vec::new();
    for _ in 0..n {
        let k = rng.index(n);
        if k < sample.n0() {
            reference.push(sample.reference()[k]);
        } else {
            comparator.push(sample.comparator()[k - sample.n0()]);
        }
    }
    TwoGroupSample::new(reference, comparator, sample.orientation())
}

/// Outcome of running a statistic over all replicates.
#[derive(Debug, Clone)]
pub struct Replicates<R> {
    /// One entry per replicate index; `None` marks a failed replicate.
    pub results: Vec<Option<R>>,
    pub failures: usize,
}

impl<R> Replicates<R> {
    pub fn successes(&self) -> impl Iterator<Item = &R> {
        self.results.iter().flatten()
    }

    /// More than 1% of replicates failed.
    pub fn needs_warning(&self) -> bool {
        self.failures * 100 > self.results.len()
    }
}

/// Evaluates `statistic` on every bootstrap replicate. More than 10% failed
/// replicates is an error.
pub fn run_replicates<T, R, F>(
    sample: &TwoGroupSample<T>,
    config: &BandConfig<T>,
    statistic: F,
) -> Result<Replicates<R>>
where
    T: Scalar,
    R: Send,
    F: Fn(&TwoGroupSample<T>) -> Result<R> + Sync,
{
    let results: Vec<Option<R>> = (0..config.replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = RngStream::new(config.seed, b as u64);
            let resample = if config.unconditional {
                unconditional_resample(sample, &mut rng).ok()?
            } else {
                stratified_resample(sample, &mut rng)
            };
            statistic(&resample).ok()
        })
        .collect();
    let failures = results.iter().filter(|r| r.is_none()).count();
    if failures * 10 > config.replicates {
        return Err(RocError::Bootstrap {
            failed: failures,
            total: config.replicates,
        });
    }
    Ok(Replicates { results, failures })
}

/// Anything mapping a sample to TPR values on an FPR grid.
pub trait CurveEstimator<T: Scalar>: Sync {
    fn method(&self) -> Method;
    fn evaluate(&self, sample: &TwoGroupSample<T>, grid: &[T]) -> Result<Vec<T>>;
}

/// The empirical staircase evaluated as 𝔽₁(𝔽₀⁻¹(p)).
#[derive(Debug, Clone, Copy, Default)]
pub struct EmpiricalEstimator;

impl<T: Scalar> CurveEstimator<T> for EmpiricalEstimator {
    fn method(&self) -> Method {
        Method::Empirical
    }

    fn evaluate(&self, sample: &TwoGroupSample<T>, grid: &[T]) -> Result<Vec<T>> {
        empirical_roc_at(sample, grid)
    }
}

/// Percentile of sorted data with linear interpolation between order
/// statistics (R type 7).
pub fn quantile_sorted<T: Scalar>(sorted: &[T], q: T) -> T {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = q.max(T::zero()).min(T::one()) * T::of_usize(sorted.len() - 1);
    let i = pos.floor().to_usize().unwrap_or(0).min(sorted.len() - 1);
    let j = (i + 1).min(sorted.len() - 1);
    let frac = pos - T::of_usize(i);
    sorted[i] + (sorted[j] - sorted[i]) * frac
}

/// A banded curve together with replicate bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct BandEstimate<T> {
    pub curve: RocCurveEstimate<T>,
    pub failed_replicates: usize,
    pub warnings: Vec<String>,
}

/// Percentile band from per-replicate curve values (`rows[b][k]` = replicate
/// b at grid point k). The band is widened where needed so it always
/// contains the point estimate.
pub fn percentile_band<T: Scalar>(
    estimate: &[T],
    grid: &[T],
    rows: &[&Vec<T>],
    method: Method,
    level: T,
) -> Result<RocCurveEstimate<T>> {
    if rows.is_empty() {
        return Err(RocError::Bootstrap { failed: 0, total: 0 });
    }
    let alpha = (T::one() - level) / T::of(2.0);
    let clamp = |v: T| v.max(T::zero()).min(T::one());
    let mut points = vec![RocPoint::new(T::zero(), T::zero())];
    let mut intervals = vec![BandInterval {
        lower: T::zero(),
        upper: T::zero(),
    }];
    let mut column = Vec::with_capacity(rows.len());
    for (k, (&p, &est)) in grid.iter().zip(estimate).enumerate() {
        column.clear();
        column.extend(rows.iter().map(|r| r[k]));
        column.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite replicate value"));
        let est = clamp(est);
        let lower = clamp(quantile_sorted(&column, alpha)).min(est);
        let upper = clamp(quantile_sorted(&column, T::one() - alpha)).max(est);
        points.push(RocPoint::new(p, est));
        intervals.push(BandInterval { lower, upper });
    }
    points.push(RocPoint::new(T::one(), T::one()));
    intervals.push(BandInterval {
        lower: T::one(),
        upper: T::one(),
    });
    RocCurveEstimate::new(
        points,
        Some(Band {
            axis: BandAxis::Tpr,
            intervals,
        }),
        method,
        level,
    )
}

/// Point estimate from the original sample plus a pointwise percentile band
/// from `config.replicates` stratified resamples.
pub fn bootstrap_band<T: Scalar, E: CurveEstimator<T> + ?Sized>(
    sample: &TwoGroupSample<T>,
    estimator: &E,
    config: &BandConfig<T>,
) -> Result<BandEstimate<T>> {
    let grid = config.fpr_grid();
    let estimate = estimator.evaluate(sample, grid)?;
    let reps = run_replicates(sample, config, |s| estimator.evaluate(s, grid))?;
    let rows: Vec<&Vec<T>> = reps.successes().collect();
    let curve = percentile_band(&estimate, grid, &rows, estimator.method(), config.level())?;
    let mut warnings = Vec::new();
    if reps.needs_warning() {
        warnings.push(format!(
            "{} of {} bootstrap replicates failed",
            reps.failures,
            config.replicates()
        ));
    }
    Ok(BandEstimate {
        curve,
        failed_replicates: reps.failures,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Orientation;

    fn sample(r: &[f64], c: &[f64]) -> TwoGroupSample<f64> {
        TwoGroupSample::new(r.to_vec(), c.to_vec(), Orientation::LowerLessDesirable).unwrap()
    }

    fn normal_sample(n: usize, seed: u64) -> TwoGroupSample<f64> {
        let mut rng = RngStream::new(seed, 0);
        let r: Vec<f64> = (0..n).map(|_| 5.5 + rng.standard_normal()).collect();
        let c: Vec<f64> = (0..n).map(|_| 4.0 + rng.standard_normal()).collect();
        sample(&r, &c)
    }

    #[test]
    fn config_validation() {
        assert!(BandConfig::new(99, 0.95, vec![0.5], 1).is_err());
        assert!(BandConfig::new(100, 0.4, vec![0.5], 1).is_err());
        assert!(BandConfig::new(100, 0.95, vec![0.0, 0.5], 1).is_err());
        assert!(BandConfig::new(100, 0.95, vec![0.5, 0.2], 1).is_err());
        assert!(BandConfig::new(100, 0.95, vec![0.2, 0.5], 1).is_ok());
    }

    #[test]
    fn degenerate_resample_is_fixed() {
        let s = sample(&[5.0, 5.0, 5.0], &[7.0, 7.0]);
        let mut rng = RngStream::new(3, 11);
        let r = stratified_resample(&s, &mut rng);
        assert_eq!(r, s);
    }

    #[test]
    fn resample_sizes_and_determinism() {
        let s = normal_sample(17, 2);
        let a = stratified_resample(&s, &mut RngStream::new(8, 4));
        let b = stratified_resample(&s, &mut RngStream::new(8, 4));
        assert_eq!(a, b);
        assert_eq!((a.n0(), a.n1()), (17, 17));
        assert!(a.reference().iter().all(|v| s.reference().contains(v)));
    }

    #[test]
    fn constant_groups_give_zero_width() {
        let s = sample(&[2.0, 2.0, 2.0, 2.0], &[1.0, 1.0, 1.0]);
        let cfg = BandConfig::new(200, 0.95, vec![0.1, 0.5, 0.9], 5).unwrap();
        let band = bootstrap_band(&s, &EmpiricalEstimator, &cfg).unwrap();
        for iv in &band.curve.band().unwrap().intervals {
            assert_eq!(iv.lower, iv.upper);
        }
    }

    #[test]
    fn band_independent_of_worker_count() {
        let s = normal_sample(30, 1);
        let cfg = BandConfig::new(500, 0.95, crate::model::default_fpr_grid(19), 77).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| bootstrap_band(&s, &EmpiricalEstimator, &cfg).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn band_contains_median_and_is_ordered() {
        let s = normal_sample(25, 4);
        let grid = crate::model::default_fpr_grid(9);
        let cfg = BandConfig::new(400, 0.9, grid.clone(), 9).unwrap();
        let reps = run_replicates(&s, &cfg, |r| empirical_roc_at(r, &grid)).unwrap();
        let band = bootstrap_band(&s, &EmpiricalEstimator, &cfg).unwrap();
        let intervals = &band.curve.band().unwrap().intervals;
        for k in 0..grid.len() {
            let mut col: Vec<f64> = reps.successes().map(|r| r[k]).collect();
            col.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = quantile_sorted(&col, 0.5);
            let iv = intervals[k + 1];
            assert!(iv.lower <= median && median <= iv.upper);
            assert!(0.0 <= iv.lower && iv.upper <= 1.0);
        }
    }

    #[test]
    fn two_seeds_agree_within_monte_carlo_error() {
        let s = normal_sample(60, 12);
        let grid = crate::model::default_fpr_grid(19);
        let a = bootstrap_band(&s, &EmpiricalEstimator, &BandConfig::new(1000, 0.95, grid.clone(), 1).unwrap()).unwrap();
        let b = bootstrap_band(&s, &EmpiricalEstimator, &BandConfig::new(1000, 0.95, grid, 2).unwrap()).unwrap();
        let ia = &a.curve.band().unwrap().intervals;
        let ib = &b.curve.band().unwrap().intervals;
        let sup = ia
            .iter()
            .zip(ib)
            .map(|(x, y)| (x.lower - y.lower).abs().max((x.upper - y.upper).abs()))
            .fold(0.0, f64::max);
        assert!(sup < 0.05, "sup difference {sup}");
    }

    #[test]
    fn failure_policy() {
        use std::sync::atomic::{AtomicUsize, Ordering};
        let s = normal_sample(10, 3);
        let cfg = BandConfig::new(200, 0.95, vec![0.5], 1).unwrap();
        let calls = AtomicUsize::new(0);
        // 5 of 200 fail: warned, not fatal.
        let reps = run_replicates(&s, &cfg, |_| {
            if calls.fetch_add(1, Ordering::SeqCst) < 5 {
                Err(RocError::Degenerate("synthetic".into()))
            } else {
                Ok(())
            }
        })
        .unwrap();
        assert_eq!(reps.failures, 5);
        assert!(reps.needs_warning());
        let calls = AtomicUsize::new(0);
        let too_many = run_replicates(&s, &cfg, |_| {
            if calls.fetch_add(1, Ordering::SeqCst) < 21 {
                Err(RocError::Degenerate("synthetic".into()))
            } else {
                Ok(())
            }
        });
        assert_eq!(too_many.unwrap_err(), RocError::Bootstrap { failed: 21, total: 200 });
        let clean = run_replicates(&s, &cfg, |_| Ok(())).unwrap();
        assert!(!clean.needs_warning());
    }

    #[test]
    fn unconditional_resample_varies_sizes() {
        let s = normal_sample(20, 5);
        let sizes: Vec<usize> = (0..20)
            .filter_map(|b| unconditional_resample(&s, &mut RngStream::new(1, b)).ok())
            .map(|r| r.n0())
            .collect();
        assert!(sizes.iter().any(|&n| n != 20));
    }

    #[test]
    fn quantile_type7() {
        let v = [1.0_f64, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 4.0);
        assert!((quantile_sorted(&v, 0.5) - 2.5).abs() < 1e-15);
        assert!((quantile_sorted(&v, 0.25) - 1.75).abs() < 1e-15);
    }
}
