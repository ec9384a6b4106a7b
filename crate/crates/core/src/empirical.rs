//! Nonparametric estimation: empirical CDF and quantile, the staircase ROC
//! curve, rank-based AUC, the Wilson interval, and the Mann-Whitney and
//! Kolmogorov-Smirnov tests.

use std::cmp::Ordering;

use num_rational::Ratio;

use crate::error::{Result, RocError};
use crate::model::{
    Method, NullKind, Orientation, RocCurveEstimate, RocPoint, TestResult,
    TwoGroupSample,
};
use crate::numerics::{kolmogorov_sf, normal_cdf, normal_quantile};
use crate::Scalar;

fn total_cmp<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).expect("finite values")
}

pub(crate) fn sorted_copy<T: Scalar>(values: &[T]) -> Vec<T> {
    let mut v = values.to_vec();
    v.sort_unstable_by(total_cmp);
    v
}

/// Empirical distribution of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution<T> {
    sorted: Vec<T>,
}

impl<T: Scalar> EmpiricalDistribution<T> {
    pub fn new(values: &[T]) -> Result<Self> {
        if values.len() < 2 {
            return Err(RocError::Validation(
                "empirical distribution needs at least two values".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RocError::Validation("non-finite value".into()));
        }
        Ok(Self {
            sorted: sorted_copy(values),
        })
    }

    pub(crate) fn from_sorted_unchecked(sorted: Vec<T>) -> Self {
        Self { sorted }
    }

    pub fn sorted_values(&self) -> &[T] {
        &self.sorted
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    /// Number of values ≤ t.
    pub fn count_le(&self, t: T) -> usize {
        self.sorted.partition_point(|v| *v <= t)
    }

    /// Right-continuous ECDF 𝔽(t).
    pub fn ecdf(&self, t: T) -> T {
        T::of_usize(self.count_le(t)) / T::of_usize(self.n())
    }

    /// Generalized inverse inf{t : 𝔽(t) > p} (strict inequality), for 0 ≤ p < 1.
    pub fn quantile(&self, p: T) -> Result<T> {
        if !(p >= T::zero() && p < T::one()) {
            return Err(RocError::Domain(format!(
                "empirical quantile requires 0 <= p < 1, got {p}"
            )));
        }
        Ok(self.quantile_fast(p))
    }

    /// First index k with (k+1)/n > p, evaluated in the same arithmetic as `ecdf`.
    fn quantile_fast(&self, p: T) -> T {
        let n = T::of_usize(self.n());
        let (mut lo, mut hi) = (0usize, self.n());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if T::of_usize(mid + 1) / n > p {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        self.sorted[lo.min(self.n() - 1)]
    }
}

pub fn ecdf_eval<T: Scalar>(dist: &EmpiricalDistribution<T>, t: T) -> T {
    dist.ecdf(t)
}

pub fn empirical_quantile<T: Scalar>(dist: &EmpiricalDistribution<T>, p: T) -> Result<T> {
    dist.quantile(p)
}

/// Vertex of the empirical staircase, kept as exact group counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StaircaseVertex {
    /// Reference values ≤ threshold.
    pub reference_count: usize,
    /// Comparator values ≤ threshold.
    pub comparator_count: usize,
}

/// The empirical ROC staircase with one vertex per distinct pooled value.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalRoc<T> {
    n0: usize,
    n1: usize,
    thresholds: Vec<T>,
    vertices: Vec<StaircaseVertex>,
}

impl<T: Scalar> EmpiricalRoc<T> {
    /// Builds the staircase of a (canonicalized) sample.
    pub fn new(sample: &TwoGroupSample<T>) -> Self {
        let sample = sample.canonical();
        let r = sorted_copy(sample.reference());
        let c = sorted_copy(sample.comparator());
        let (mut i, mut j) = (0, 0);
        let mut thresholds = Vec::new();
        let mut vertices = vec![StaircaseVertex {
            reference_count: 0,
            comparator_count: 0,
        }];
        while i < r.len() || j < c.len() {
            let t = match (r.get(i), c.get(j)) {
                (Some(&a), Some(&b)) => a.min(b),
                (Some(&a), None) => a,
                (None, Some(&b)) => b,
                (None, None) => unreachable!(),
            };
            while i < r.len() && r[i] <= t {
                i += 1;
            }
            while j < c.len() && c[j] <= t {
                j += 1;
            }
            thresholds.push(t);
            vertices.push(StaircaseVertex {
                reference_count: i,
                comparator_count: j,
            });
        }
        Self {
            n0: r.len(),
            n1: c.len(),
            thresholds,
            vertices,
        }
    }

    /// Vertices including the leading (0,0).
    pub fn vertices(&self) -> &[StaircaseVertex] {
        &self.vertices
    }

    /// Exact trapezoid area, P(Y₀ > Y₁) + ½P(Y₀ = Y₁).
    pub fn area(&self) -> Ratio<u64> {
        let twice: u64 = self
            .vertices
            .windows(2)
            .map(|w| {
                let dx = (w[1].reference_count - w[0].reference_count) as u64;
                dx * (w[0].comparator_count + w[1].comparator_count) as u64
            })
            .sum();
        Ratio::new(twice, 2 * self.n0 as u64 * self.n1 as u64)
    }

    pub fn to_curve(&self) -> RocCurveEstimate<T> {
        let n0 = T::of_usize(self.n0);
        let n1 = T::of_usize(self.n1);
        let points = self
            .vertices
            .iter()
            .enumerate()
            .map(|(k, v)| RocPoint {
                fpr: T::of_usize(v.reference_count) / n0,
                tpr: T::of_usize(v.comparator_count) / n1,
                threshold: k.checked_sub(1).map(|i| self.thresholds[i]),
            })
            .collect();
        RocCurveEstimate::new(points, None, Method::Empirical, T::of(0.95))
            .expect("staircase satisfies curve invariants")
    }
}

/// Empirical ROC curve 𝔽₁(𝔽₀⁻¹(·)) as a staircase through (0,0) and (1,1).
/// Ties across groups produce a single diagonal segment.
pub fn empirical_roc<T: Scalar>(sample: &TwoGroupSample<T>) -> RocCurveEstimate<T> {
    EmpiricalRoc::new(sample).to_curve()
}

/// Evaluates 𝔽₁(𝔽₀⁻¹(p)) (right-continuous staircase) at each grid point.
pub fn empirical_roc_at<T: Scalar>(sample: &TwoGroupSample<T>, grid: &[T]) -> Result<Vec<T>> {
    let sample = sample.canonical();
    let f0 = EmpiricalDistribution::from_sorted_unchecked(sorted_copy(sample.reference()));
    let f1 = EmpiricalDistribution::from_sorted_unchecked(sorted_copy(sample.comparator()));
    grid.iter()
        .map(|&p| {
            if !(p >= T::zero() && p < T::one()) {
                return Err(RocError::Domain(format!("grid FPR {p} outside [0,1)")));
            }
            Ok(f1.ecdf(f0.quantile_fast(p)))
        })
        .collect()
}

/// Twice the Mann-Whitney U of the reference group, from average ranks:
/// 2U₀ = 2R − n₀(n₀+1) = 2·#{Y₀ > Y₁} + #{Y₀ = Y₁}.
fn twice_u_reference<T: Scalar>(sample: &TwoGroupSample<T>) -> u64 {
    let sample = sample.canonical();
    let mut pooled: Vec<(T, bool)> = sample
        .reference()
        .iter()
        .map(|&v| (v, true))
        .chain(sample.comparator().iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_unstable_by(|a, b| total_cmp(&a.0, &b.0));
    let mut twice_rank_sum: u64 = 0;
    let mut start = 0;
    while start < pooled.len() {
        let mut end = start + 1;
        while end < pooled.len() && pooled[end].0 == pooled[start].0 {
            end += 1;
        }
        // Ranks start+1..=end share the average (start+1+end)/2.
        let in_reference = pooled[start..end].iter().filter(|x| x.1).count() as u64;
        twice_rank_sum += in_reference * (start as u64 + 1 + end as u64);
        start = end;
    }
    let n0 = sample.n0() as u64;
    twice_rank_sum - n0 * (n0 + 1)
}

/// Unoriented θ = P(Y₀ > Y₁) + ½P(Y₀ = Y₁) as an exact fraction.
pub fn concordance_ratio<T: Scalar>(sample: &TwoGroupSample<T>) -> Ratio<u64> {
    let denom = 2 * sample.n0() as u64 * sample.n1() as u64;
    Ratio::new(twice_u_reference(sample), denom)
}

/// Rank-based AUC, oriented to [0.5, 1], as an exact fraction.
pub fn empirical_auc_ratio<T: Scalar>(sample: &TwoGroupSample<T>) -> Ratio<u64> {
    let theta = concordance_ratio(sample);
    let one = Ratio::from_integer(1);
    let complement = one - theta;
    theta.max(complement)
}

fn ratio_to<T: Scalar>(r: Ratio<u64>) -> T {
    T::of(*r.numer() as f64 / *r.denom() as f64)
}

/// Rank-based (Mann-Whitney) AUC with average ranks for ties, in [0.5, 1].
/// Orientation is applied to the exact fraction, so the result is the
/// correctly rounded pair-counting value.
pub fn empirical_auc<T: Scalar>(sample: &TwoGroupSample<T>) -> T {
    ratio_to(empirical_auc_ratio(sample))
}

/// The declared orientation, or for `auto` the one giving empirical AUC ≥ 0.5.
pub fn choose_orientation<T: Scalar>(
    reference: &[T],
    comparator: &[T],
) -> Result<Orientation> {
    let s = TwoGroupSample::new(
        reference.to_vec(),
        comparator.to_vec(),
        Orientation::LowerLessDesirable,
    )?;
    let theta = concordance_ratio(&s);
    Ok(if theta >= Ratio::new(1, 2) {
        Orientation::LowerLessDesirable
    } else {
        Orientation::HigherLessDesirable
    })
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval<T: Scalar>(successes: usize, trials: usize, level: T) -> Result<(T, T)> {
    if trials == 0 {
        return Err(RocError::Domain("Wilson interval needs at least one trial".into()));
    }
    if successes > trials {
        return Err(RocError::Domain("successes exceed trials".into()));
    }
    if !(level > T::zero() && level < T::one()) {
        return Err(RocError::Domain(format!("level {level} outside (0,1)")));
    }
    let z = normal_quantile(T::of(0.5) + level / T::of(2.0))?;
    let n = T::of_usize(trials);
    let x = T::of_usize(successes);
    let z2 = z * z;
    let center = (x + z2 / T::of(2.0)) / (n + z2);
    let half = z / (n + z2) * (x * (n - x) / n + z2 / T::of(4.0)).sqrt();
    let lower = if successes == 0 { T::zero() } else { (center - half).max(T::zero()) };
    let upper = if successes == trials { T::one() } else { (center + half).min(T::one()) };
    Ok((lower, upper))
}

/// Upper bound on n₀·n₁ for the exact Mann-Whitney null distribution.
pub const EXACT_MANN_WHITNEY_LIMIT: usize = 400;

/// Exact null distribution of U (counts of arrangements, normalized).
fn mann_whitney_exact_pmf(n0: usize, n1: usize) -> Vec<f64> {
    // f[a][b] over u, built by the recurrence f(a,b,u) = f(a-1,b,u-b) + f(a,b-1,u).
    let max_u = n0 * n1;
    let mut table: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); n1 + 1]; n0 + 1];
    for a in 0..=n0 {
        for b in 0..=n1 {
            let mut f = vec![0.0; a * b + 1];
            if a == 0 || b == 0 {
                f[0] = 1.0;
            } else {
                for (u, slot) in f.iter_mut().enumerate() {
                    let left = if u >= b { table[a - 1][b].get(u - b).copied().unwrap_or(0.0) } else { 0.0 };
                    let right = table[a][b - 1].get(u).copied().unwrap_or(0.0);
                    *slot = left + right;
                }
            }
            table[a][b] = f;
        }
    }
    let counts = &table[n0][n1];
    let total: f64 = counts.iter().sum();
    debug_assert_eq!(counts.len(), max_u + 1);
    counts.iter().map(|c| c / total).collect()
}

/// Two-sided Mann-Whitney test of the weak null AUC = 0.5. The statistic is
/// U for the reference group. Exact when n₀·n₁ ≤ 400 without ties; otherwise
/// the normal approximation with tie and continuity corrections.
pub fn mann_whitney_test<T: Scalar>(sample: &TwoGroupSample<T>) -> TestResult<T> {
    let sample = sample.canonical();
    let (n0, n1) = (sample.n0(), sample.n1());
    let twice_u = twice_u_reference(&sample);
    let u = twice_u as f64 / 2.0;

    let mut pooled: Vec<T> = sample.reference().iter().chain(sample.comparator()).copied().collect();
    pooled.sort_unstable_by(total_cmp);
    let mut tie_term = 0.0;
    let mut has_ties = false;
    let mut start = 0;
    while start < pooled.len() {
        let mut end = start + 1;
        while end < pooled.len() && pooled[end] == pooled[start] {
            end += 1;
        }
        let t = (end - start) as f64;
        if end - start > 1 {
            has_ties = true;
        }
        tie_term += t * t * t - t;
        start = end;
    }

    if !has_ties && n0 * n1 <= EXACT_MANN_WHITNEY_LIMIT {
        let pmf = mann_whitney_exact_pmf(n0, n1);
        let q = twice_u as usize / 2;
        let lower: f64 = pmf[..=q].iter().sum();
        let upper: f64 = pmf[q..].iter().sum();
        let p = (2.0 * lower.min(upper)).min(1.0);
        return TestResult::new(T::of(u), T::of(p), NullKind::Weak, "exact Mann-Whitney U");
    }

    let n = (n0 + n1) as f64;
    let (n0f, n1f) = (n0 as f64, n1 as f64);
    let centered = u - n0f * n1f / 2.0;
    let variance = n0f * n1f / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    let p = if variance <= 0.0 {
        1.0
    } else {
        let correction = 0.5 * centered.signum();
        let z = (centered - correction) / variance.sqrt();
        2.0 * normal_cdf(-z.abs())
    };
    TestResult::new(
        T::of(u),
        T::of(p.min(1.0)),
        NullKind::Weak,
        "normal approximation to Mann-Whitney U (tie and continuity corrected)",
    )
}

/// Two-sample Kolmogorov-Smirnov test of the strong null ROC(p) = p, with
/// the asymptotic Kolmogorov p-value at λ = √(n₀n₁/(n₀+n₁))·D.
pub fn ks_test<T: Scalar>(sample: &TwoGroupSample<T>) -> TestResult<T> {
    let stair = EmpiricalRoc::new(sample);
    let (n0, n1) = (stair.n0 as u64, stair.n1 as u64);
    // sup |𝔽₀ − 𝔽₁| over vertices, compared exactly as |c0·n1 − c1·n0|.
    let max_gap = stair
        .vertices
        .iter()
        .map(|v| (v.reference_count as u64 * n1).abs_diff(v.comparator_count as u64 * n0))
        .max()
        .unwrap_or(0);
    let d = max_gap as f64 / (n0 * n1) as f64;
    let ne = (n0 * n1) as f64 / (n0 + n1) as f64;
    let p = kolmogorov_sf(ne.sqrt() * d);
    TestResult::new(T::of(d), T::of(p), NullKind::Strong, "asymptotic Kolmogorov distribution")
}
