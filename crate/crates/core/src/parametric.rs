//! Maximum-likelihood biexponential and binormal ROC fits with closed-form
//! pointwise intervals, AUC and likelihood-ratio / Welch tests.

use crate::error::{Result, RocError};
use crate::model::{
    Band, BandAxis, BandInterval, Method, NullKind, RocCurveEstimate, RocPoint, TestResult,
    TwoGroupSample,
};
use crate::numerics::{
    chi2_sf, integrate_unit_interval, normal_cdf, normal_quantile, normal_quantile_unchecked,
    t_quantile, t_two_sided,
};
use crate::Scalar;

fn mean<T: Scalar>(v: &[T]) -> T {
    v.iter().copied().sum::<T>() / T::of_usize(v.len())
}

/// Σ(y − ȳ)².
fn sum_sq_dev<T: Scalar>(v: &[T], center: T) -> T {
    v.iter().map(|&y| (y - center) * (y - center)).sum()
}

fn check_p<T: Scalar>(p: T) -> Result<()> {
    if p > T::zero() && p < T::one() {
        Ok(())
    } else {
        Err(RocError::Domain(format!("FPR must lie in (0,1), got {p}")))
    }
}

fn two_sided_z<T: Scalar>(level: T) -> Result<T> {
    if !(level > T::zero() && level < T::one()) {
        return Err(RocError::Domain(format!("level {level} outside (0,1)")));
    }
    normal_quantile(T::of(0.5) + level / T::of(2.0))
}

/// Biexponential ROC 1 − (1 − p)^α.
pub fn biexp_roc<T: Scalar>(alpha: T, p: T) -> T {
    -(alpha * (-p).ln_1p()).exp_m1()
}

/// Binormal ROC Φ(β₀ + β₁Φ⁻¹(p)).
pub fn binorm_roc<T: Scalar>(beta0: T, beta1: T, p: T) -> T {
    if p <= T::zero() {
        return T::zero();
    }
    if p >= T::one() {
        return T::one();
    }
    normal_cdf(beta0 + beta1 * normal_quantile_unchecked(p))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiexpFit<T> {
    pub alpha: T,
    pub lambda0: T,
    pub lambda1: T,
    pub n0: usize,
    pub n1: usize,
}

impl<T: Scalar> BiexpFit<T> {
    pub fn roc(&self, p: T) -> T {
        biexp_roc(self.alpha, p)
    }
}

fn positive_support<T: Scalar>(sample: &TwoGroupSample<T>) -> Result<TwoGroupSample<T>> {
    let s = sample.canonical();
    if s.reference().iter().chain(s.comparator()).any(|&v| v <= T::zero()) {
        return Err(RocError::Domain(
            "exponential model requires positive support".into(),
        ));
    }
    Ok(s)
}

/// Rate MLEs λ̂ = 1/ȳ per group and α̂ = λ̂₁/λ̂₀.
pub fn fit_biexponential<T: Scalar>(sample: &TwoGroupSample<T>) -> Result<BiexpFit<T>> {
    let s = positive_support(sample)?;
    let lambda0 = mean(s.reference()).recip();
    let lambda1 = mean(s.comparator()).recip();
    Ok(BiexpFit {
        alpha: lambda1 / lambda0,
        lambda0,
        lambda1,
        n0: s.n0(),
        n1: s.n1(),
    })
}

/// Pointwise interval 1 − (1 − p)^exp(log α̂ ± z·√(1/n₀ + 1/n₁)), returned as
/// (lower, point, upper).
pub fn biexp_curve_ci<T: Scalar>(
    fit: &BiexpFit<T>,
    p: T,
    level: T,
    n0: usize,
    n1: usize,
) -> Result<(T, T, T)> {
    check_p(p)?;
    let z = two_sided_z(level)?;
    let se = (T::of_usize(n0).recip() + T::of_usize(n1).recip()).sqrt();
    let log_alpha = fit.alpha.ln();
    let clamp = |v: T| v.max(T::zero()).min(T::one());
    let lower = clamp(biexp_roc((log_alpha - z * se).exp(), p));
    let point = clamp(biexp_roc(fit.alpha, p));
    let upper = clamp(biexp_roc((log_alpha + z * se).exp(), p));
    Ok((lower.min(point), point, upper.max(point)))
}

/// AUC = 1 − 1/(α + 1).
pub fn biexp_auc<T: Scalar>(fit: &BiexpFit<T>) -> T {
    biexp_auc_from_alpha(fit.alpha)
}

pub fn biexp_auc_from_alpha<T: Scalar>(alpha: T) -> T {
    T::one() - (alpha + T::one()).recip()
}

/// Exponential likelihood-ratio test of α = 1 (the weak and strong nulls
/// coincide). The statistic is the deviance
/// 2(n₀ log λ̂₀ + n₁ log λ̂₁ − n log λ̂), referred to χ²₁.
pub fn exponential_lrt<T: Scalar>(sample: &TwoGroupSample<T>) -> Result<TestResult<T>> {
    let s = positive_support(sample)?;
    let n0 = T::of_usize(s.n0());
    let n1 = T::of_usize(s.n1());
    let sum0: T = s.reference().iter().copied().sum();
    let sum1: T = s.comparator().iter().copied().sum();
    let log_rate0 = (n0 / sum0).ln();
    let log_rate1 = (n1 / sum1).ln();
    let log_rate = ((n0 + n1) / (sum0 + sum1)).ln();
    let deviance = (T::of(2.0) * (n0 * log_rate0 + n1 * log_rate1 - (n0 + n1) * log_rate))
        .max(T::zero());
    let p = chi2_sf(deviance, 1)?;
    Ok(TestResult::new(
        deviance,
        p,
        NullKind::Strong,
        "chi-squared, 1 df (exponential likelihood ratio)",
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinormFit<T> {
    pub beta0: T,
    pub beta1: T,
    pub mu0: T,
    pub mu1: T,
    /// Sample standard deviations (divisor n − 1).
    pub s0: T,
    pub s1: T,
    pub welch_df: T,
    pub n0: usize,
    pub n1: usize,
}

impl<T: Scalar> BinormFit<T> {
    pub fn roc(&self, p: T) -> T {
        binorm_roc(self.beta0, self.beta1, p)
    }
}

/// Welch–Satterthwaite degrees of freedom from sample variances.
pub fn welch_df<T: Scalar>(var0: T, n0: usize, var1: T, n1: usize) -> T {
    let a = var0 / T::of_usize(n0);
    let b = var1 / T::of_usize(n1);
    (a + b) * (a + b) / (a * a / T::of_usize(n0 - 1) + b * b / T::of_usize(n1 - 1))
}

/// Group means and sample SDs; β̂₀ = (μ̂₀ − μ̂₁)/S₁, β̂₁ = S₀/S₁.
pub fn fit_binormal<T: Scalar>(sample: &TwoGroupSample<T>) -> Result<BinormFit<T>> {
    let s = sample.canonical();
    let (n0, n1) = (s.n0(), s.n1());
    let mu0 = mean(s.reference());
    let mu1 = mean(s.comparator());
    let var0 = sum_sq_dev(s.reference(), mu0) / T::of_usize(n0 - 1);
    let var1 = sum_sq_dev(s.comparator(), mu1) / T::of_usize(n1 - 1);
    if !(var0 > T::zero() && var1 > T::zero()) {
        return Err(RocError::Degenerate(
            "zero variance in a group; binormal model undefined".into(),
        ));
    }
    let s0 = var0.sqrt();
    let s1 = var1.sqrt();
    Ok(BinormFit {
        beta0: (mu0 - mu1) / s1,
        beta1: s0 / s1,
        mu0,
        mu1,
        s0,
        s1,
        welch_df: welch_df(var0, n0, var1, n1),
        n0,
        n1,
    })
}

/// Pointwise interval
/// Φ(((μ̂₀ − μ̂₁) + S₀Φ⁻¹(p) ± t·√(S₀²/n₀ + S₁²/n₁)) / S₁), with t on the
/// Welch df, returned as (lower, point, upper).
pub fn binorm_curve_ci<T: Scalar>(
    fit: &BinormFit<T>,
    p: T,
    level: T,
    n0: usize,
    n1: usize,
) -> Result<(T, T, T)> {
    check_p(p)?;
    if !(level > T::zero() && level < T::one()) {
        return Err(RocError::Domain(format!("level {level} outside (0,1)")));
    }
    let t = t_quantile(T::of(0.5) + level / T::of(2.0), fit.welch_df)?;
    let se = (fit.s0 * fit.s0 / T::of_usize(n0) + fit.s1 * fit.s1 / T::of_usize(n1)).sqrt();
    let center = (fit.mu0 - fit.mu1) + fit.s0 * normal_quantile(p)?;
    let clamp = |v: T| v.max(T::zero()).min(T::one());
    let lower = clamp(normal_cdf((center - t * se) / fit.s1));
    let point = clamp(fit.roc(p));
    let upper = clamp(normal_cdf((center + t * se) / fit.s1));
    Ok((lower.min(point), point, upper.max(point)))
}

/// ∫₀¹ Φ(β₀ + β₁Φ⁻¹(p)) dp by adaptive quadrature.
pub fn binorm_auc<T: Scalar>(fit: &BinormFit<T>) -> Result<T> {
    binorm_auc_from_params(fit.beta0, fit.beta1)
}

pub fn binorm_auc_from_params<T: Scalar>(beta0: T, beta1: T) -> Result<T> {
    integrate_unit_interval(|p| binorm_roc(beta0, beta1, p))
}

/// Two-sided unequal-variance t-test of μ₀ = μ₁ (weak null).
pub fn welch_t_test<T: Scalar>(sample: &TwoGroupSample<T>) -> Result<TestResult<T>> {
    let fit = fit_binormal(sample)?;
    let se = (fit.s0 * fit.s0 / T::of_usize(fit.n0) + fit.s1 * fit.s1 / T::of_usize(fit.n1)).sqrt();
    let t = (fit.mu0 - fit.mu1) / se;
    let p = t_two_sided(t, fit.welch_df)?;
    Ok(TestResult::new(
        t,
        p,
        NullKind::Weak,
        &format!("Student t, {:.4} Welch df", fit.welch_df.to_f64_lossy()),
    ))
}

/// Normal likelihood-ratio test of equal means and variances (strong null),
/// n log σ̂² − n₀ log σ̂₀² − n₁ log σ̂₁² with MLE variances, referred to χ²₂.
pub fn normal_lrt<T: Scalar>(sample: &TwoGroupSample<T>) -> Result<TestResult<T>> {
    let s = sample.canonical();
    let (n0, n1) = (T::of_usize(s.n0()), T::of_usize(s.n1()));
    let n = n0 + n1;
    let mu0 = mean(s.reference());
    let mu1 = mean(s.comparator());
    let var0 = sum_sq_dev(s.reference(), mu0) / n0;
    let var1 = sum_sq_dev(s.comparator(), mu1) / n1;
    if !(var0 > T::zero() && var1 > T::zero()) {
        return Err(RocError::Degenerate(
            "zero variance in a group; normal likelihood ratio undefined".into(),
        ));
    }
    let grand = (mu0 * n0 + mu1 * n1) / n;
    let pooled = (sum_sq_dev(s.reference(), grand) + sum_sq_dev(s.comparator(), grand)) / n;
    let stat = (n * pooled.ln() - n0 * var0.ln() - n1 * var1.ln()).max(T::zero());
    let p = chi2_sf(stat, 2)?;
    Ok(TestResult::new(
        stat,
        p,
        NullKind::Strong,
        "chi-squared, 2 df (normal likelihood ratio)",
    ))
}

fn banded_curve<T: Scalar>(
    grid: &[T],
    level: T,
    method: Method,
    ci: impl Fn(T) -> Result<(T, T, T)>,
) -> Result<RocCurveEstimate<T>> {
    let mut points = vec![RocPoint::new(T::zero(), T::zero())];
    let mut intervals = vec![BandInterval {
        lower: T::zero(),
        upper: T::zero(),
    }];
    for &p in grid {
        let (lower, point, upper) = ci(p)?;
        points.push(RocPoint::new(p, point));
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

/// Fitted biexponential curve with its pointwise band on `grid`.
pub fn biexp_curve<T: Scalar>(
    fit: &BiexpFit<T>,
    grid: &[T],
    level: T,
) -> Result<RocCurveEstimate<T>> {
    banded_curve(grid, level, Method::ParamBiexp, |p| {
        biexp_curve_ci(fit, p, level, fit.n0, fit.n1)
    })
}

/// Fitted binormal curve with its pointwise band on `grid`.
pub fn binorm_curve<T: Scalar>(
    fit: &BinormFit<T>,
    grid: &[T],
    level: T,
) -> Result<RocCurveEstimate<T>> {
    banded_curve(grid, level, Method::ParamBinorm, |p| {
        binorm_curve_ci(fit, p, level, fit.n0, fit.n1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Orientation;
    use crate::numerics::RngStream;

    fn sample(r: Vec<f64>, c: Vec<f64>) -> TwoGroupSample<f64> {
        TwoGroupSample::new(r, c, Orientation::LowerLessDesirable).unwrap()
    }

    fn exp_sample(rate0: f64, rate1: f64, n: usize, rng: &mut RngStream) -> TwoGroupSample<f64> {
        let r = (0..n).map(|_| rng.exp1() / rate0).collect();
        let c = (0..n).map(|_| rng.exp1() / rate1).collect();
        sample(r, c)
    }

    fn norm_sample(mu0: f64, mu1: f64, n: usize, rng: &mut RngStream) -> TwoGroupSample<f64> {
        let r = (0..n).map(|_| mu0 + rng.standard_normal()).collect();
        let c = (0..n).map(|_| mu1 + rng.standard_normal()).collect();
        sample(r, c)
    }

    #[test]
    fn biexp_fit_examples() {
        let fit = fit_biexponential(&sample(vec![0.5, 1.5], vec![0.2, 0.3])).unwrap();
        assert!((fit.alpha - 4.0).abs() < 1e-12);
        let fit = fit_biexponential(&sample(vec![1.0, 3.0], vec![2.0, 2.0])).unwrap();
        assert_eq!(fit.alpha, 1.0);
        assert!((fit.roc(0.3) - 0.3).abs() < 1e-15);
        let err = fit_biexponential(&sample(vec![1.0, 0.0], vec![2.0, 2.0])).unwrap_err();
        assert_eq!(err, RocError::Domain("exponential model requires positive support".into()));
    }

    #[test]
    fn biexp_ci_examples() {
        let unit: BiexpFit<f64> = BiexpFit { alpha: 1.0, lambda0: 1.0, lambda1: 1.0, n0: 10, n1: 12 };
        for p in [0.05, 0.5, 0.93] {
            let (lo, pt, hi) = biexp_curve_ci(&unit, p, 0.95, 10, 12).unwrap();
            assert!(lo <= p && p <= hi);
            assert!((pt - p).abs() < 1e-15);
        }
        let four: BiexpFit<f64> = BiexpFit { alpha: 4.0, lambda0: 1.0, lambda1: 4.0, n0: 30, n1: 30 };
        let (lo, pt, hi) = biexp_curve_ci(&four, 0.2, 0.95, 30, 30).unwrap();
        assert!((pt - 0.5904).abs() < 1e-12);
        let z: f64 = 1.959_963_984_540_054;
        let s = (1.0_f64 / 15.0).sqrt();
        assert!((lo - (1.0 - 0.8_f64.powf(4.0 * (-z * s).exp()))).abs() < 1e-12);
        assert!((hi - (1.0 - 0.8_f64.powf(4.0 * (z * s).exp()))).abs() < 1e-12);
        let widths: Vec<f64> = [30, 300, 3000]
            .iter()
            .map(|&n| {
                let (lo, _, hi) = biexp_curve_ci(&four, 0.2, 0.95, n, n).unwrap();
                hi - lo
            })
            .collect();
        assert!(widths[0] > widths[1] && widths[1] > widths[2]);
    }

    #[test]
    fn biexp_auc_examples() {
        assert_eq!(biexp_auc_from_alpha(1.0), 0.5);
        assert_eq!(biexp_auc_from_alpha(4.0), 0.8);
        assert!((biexp_auc_from_alpha(2.72_f64) - 0.731).abs() < 1e-3);
    }

    #[test]
    fn exponential_lrt_examples() {
        let t = exponential_lrt(&sample(vec![1.0, 3.0], vec![2.0, 2.0])).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.p_value, 1.0);
        let mut rng = RngStream::new(4, 0);
        let s = exp_sample(1.0, 2.0, 25, &mut rng);
        let a = exponential_lrt(&s).unwrap();
        let scaled = sample(
            s.reference().iter().map(|v| v * 37.5).collect(),
            s.comparator().iter().map(|v| v * 37.5).collect(),
        );
        let b = exponential_lrt(&scaled).unwrap();
        assert!((a.statistic - b.statistic).abs() < 1e-10);
    }

    #[test]
    fn exponential_lrt_power() {
        let m = 500;
        let rejections = (0..m)
            .filter(|&i| {
                let mut rng = RngStream::new(21, i);
                let s = exp_sample(1.0, 4.0, 60, &mut rng);
                exponential_lrt(&s).unwrap().p_value < 0.05
            })
            .count();
        assert!(rejections as f64 / m as f64 > 0.99, "{rejections}/{m}");
    }

    #[test]
    fn binormal_fit_examples() {
        // Means 2.5 and 1, both SDs 1.
        let fit = fit_binormal(&sample(vec![1.5, 2.5, 3.5], vec![0.0, 1.0, 2.0])).unwrap();
        assert!((fit.beta0 - 1.5).abs() < 1e-15);
        assert!((fit.beta1 - 1.0).abs() < 1e-15);
        assert!((welch_df(1.0_f64, 30, 1.0, 30) - 58.0).abs() < 1e-12);
        assert!(matches!(
            fit_binormal(&sample(vec![1.0, 1.0], vec![0.0, 1.0])),
            Err(RocError::Degenerate(_))
        ));
    }

    fn fixed_binorm(delta: f64) -> BinormFit<f64> {
        BinormFit { beta0: delta, beta1: 1.0, mu0: delta, mu1: 0.0, s0: 1.0, s1: 1.0, welch_df: 58.0, n0: 30, n1: 30 }
    }

    #[test]
    fn binorm_ci_examples() {
        let null = fixed_binorm(0.0);
        for p in [0.01, 0.3, 0.77] {
            let (lo, pt, hi) = binorm_curve_ci(&null, p, 0.95, 30, 30).unwrap();
            assert!((pt - p).abs() < 1e-12);
            assert!(lo < pt && pt < hi);
        }
        let f = fixed_binorm(1.5);
        let (_, pt, _) = binorm_curve_ci(&f, 0.0670, 0.95, 30, 30).unwrap();
        assert!((pt - 0.50).abs() < 0.01);
        let (_, pt, _) = binorm_curve_ci(&f, 0.0027, 0.95, 30, 30).unwrap();
        assert!((pt - 0.10).abs() < 0.01);
    }

    #[test]
    fn binorm_auc_examples() {
        assert!((binorm_auc_from_params(0.0_f64, 1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((binorm_auc_from_params(1.5_f64, 1.0).unwrap() - 0.8556).abs() < 1e-4);
        let closed = normal_cdf(1.70_f64 / (1.0 + 0.52_f64 * 0.52).sqrt());
        let quad = binorm_auc_from_params(1.70, 0.52).unwrap();
        assert!((quad - closed).abs() < 1e-6);
        assert!((quad - 0.934).abs() < 1e-3);
    }

    #[test]
    fn welch_examples() {
        let s = sample(vec![1.0, 2.0, 4.0], vec![1.0, 2.0, 4.0]);
        let t = welch_t_test(&s).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert!((t.p_value - 1.0).abs() < 1e-15);
        let a = sample(vec![1.0, 2.0, 4.5], vec![0.0, 0.5, 0.7, 2.0]);
        let b = sample(vec![0.0, 0.5, 0.7, 2.0], vec![1.0, 2.0, 4.5]);
        let (ta, tb) = (welch_t_test(&a).unwrap(), welch_t_test(&b).unwrap());
        assert!((ta.statistic + tb.statistic).abs() < 1e-14);
        assert!((ta.p_value - tb.p_value).abs() < 1e-14);
    }

    #[test]
    fn welch_power() {
        let m = 500;
        let rejections = (0..m)
            .filter(|&i| {
                let mut rng = RngStream::new(22, i);
                welch_t_test(&norm_sample(5.5, 4.0, 30, &mut rng)).unwrap().p_value < 0.05
            })
            .count();
        assert!(rejections as f64 / m as f64 > 0.99, "{rejections}/{m}");
    }

    #[test]
    fn normal_lrt_examples() {
        let s = sample(vec![1.0, 2.0, 4.0], vec![1.0, 2.0, 4.0]);
        let t = normal_lrt(&s).unwrap();
        assert!(t.statistic.abs() < 1e-12);
        assert!(t.p_value > 1.0 - 1e-12);
        let spread = sample(vec![-1.0, 0.0, 1.0], vec![-3.0, 0.0, 3.0]);
        assert!(normal_lrt(&spread).unwrap().statistic > 0.0);
    }

    #[test]
    fn normal_lrt_size() {
        let m = 1000;
        let rejections = (0..m)
            .filter(|&i| {
                let mut rng = RngStream::new(23, i);
                normal_lrt(&norm_sample(0.0, 0.0, 60, &mut rng)).unwrap().p_value < 0.05
            })
            .count();
        let rate = rejections as f64 / m as f64;
        assert!((0.03..=0.08).contains(&rate), "rate {rate}");
    }

    #[test]
    fn biexp_depends_only_on_alpha_and_sizes() {
        let mut rng = RngStream::new(5, 0);
        let s = exp_sample(1.0, 3.0, 40, &mut rng);
        let grid = crate::model::default_fpr_grid(9);
        let base = biexp_curve(&fit_biexponential(&s).unwrap(), &grid, 0.95).unwrap();
        // Power-of-two rescaling is exact in floating point.
        let scaled = sample(
            s.reference().iter().map(|v| v * 8.0).collect(),
            s.comparator().iter().map(|v| v * 8.0).collect(),
        );
        let again = biexp_curve(&fit_biexponential(&scaled).unwrap(), &grid, 0.95).unwrap();
        assert_eq!(base, again);
        let odd = sample(
            s.reference().iter().map(|v| v * 3.7).collect(),
            s.comparator().iter().map(|v| v * 3.7).collect(),
        );
        let odd = biexp_curve(&fit_biexponential(&odd).unwrap(), &grid, 0.95).unwrap();
        for (a, b) in base.band().unwrap().intervals.iter().zip(&odd.band().unwrap().intervals) {
            assert!((a.lower - b.lower).abs() < 1e-12 && (a.upper - b.upper).abs() < 1e-12);
        }
    }

    #[test]
    fn binorm_affine_invariance() {
        let mut rng = RngStream::new(6, 0);
        let s = norm_sample(1.0, 0.2, 25, &mut rng);
        let grid = crate::model::default_fpr_grid(9);
        let base = binorm_curve(&fit_binormal(&s).unwrap(), &grid, 0.9).unwrap();
        let moved = sample(
            s.reference().iter().map(|v| 2.5 * v - 7.0).collect(),
            s.comparator().iter().map(|v| 2.5 * v - 7.0).collect(),
        );
        let moved = binorm_curve(&fit_binormal(&moved).unwrap(), &grid, 0.9).unwrap();
        for (a, b) in base.points().iter().zip(moved.points()) {
            assert!((a.tpr - b.tpr).abs() < 1e-12);
        }
        for (a, b) in base.band().unwrap().intervals.iter().zip(&moved.band().unwrap().intervals) {
            assert!((a.lower - b.lower).abs() < 1e-12 && (a.upper - b.upper).abs() < 1e-12);
        }
    }

    #[test]
    fn curves_are_monotone_with_unit_endpoints() {
        let grid: Vec<f64> = (1..1000).map(|k| k as f64 / 1000.0).collect();
        let b = biexp_curve(&BiexpFit { alpha: 2.3, lambda0: 1.0, lambda1: 2.3, n0: 20, n1: 20 }, &grid, 0.95).unwrap();
        let n = binorm_curve(&BinormFit { beta0: 0.8, beta1: 0.6, mu0: 0.8, mu1: 0.0, s0: 0.6, s1: 1.0, welch_df: 30.0, n0: 20, n1: 20 }, &grid, 0.95).unwrap();
        for c in [&b, &n] {
            assert!(c.points().windows(2).all(|w| w[0].tpr <= w[1].tpr));
        }
        assert!(biexp_roc(2.3, 1e-12_f64) < 1e-10 && biexp_roc(2.3, 1.0 - 1e-12_f64) > 1.0 - 1e-10);
        assert!(binorm_roc(0.8, 0.6, 1e-12_f64) < 1e-3 && binorm_roc(0.8, 0.6, 1.0 - 1e-12_f64) > 1.0 - 1e-6);
    }

    #[test]
    fn biexp_ci_coverage_under_correct_model() {
        let m = 1000;
        for &p in &[0.1, 0.3, 0.5] {
            let truth = biexp_roc(4.0, p);
            let covered = (0..m)
                .filter(|&i| {
                    let mut rng = RngStream::new(24, i);
                    let fit = fit_biexponential(&exp_sample(1.0, 4.0, 60, &mut rng)).unwrap();
                    let (lo, _, hi) = biexp_curve_ci(&fit, p, 0.95, 60, 60).unwrap();
                    lo <= truth && truth <= hi
                })
                .count();
            let cp = covered as f64 / m as f64;
            assert!((cp - 0.95).abs() <= 0.03, "p = {p}: coverage {cp}");
        }
    }
}
