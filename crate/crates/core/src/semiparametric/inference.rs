use super::design::PairwiseDesign;
use super::solve::{fit_semi, refit_semi, semi_curve, SemiFamily, SemiFit, SemiParams};
use crate::bootstrap::{percentile_band, run_replicates, BandConfig};
use crate::error::{Result, RocError};
use crate::model::{NullKind, RocCurveEstimate, TestResult, TwoGroupSample};
use crate::numerics::{chi2_sf, normal_cdf};
use crate::parametric::{biexp_auc_from_alpha, binorm_auc_from_params};
use crate::Scalar;

/// Semiparametric fit with its bootstrap band and Wald tests.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiInference<T> {
    pub fit: SemiFit<T>,
    pub curve: RocCurveEstimate<T>,
    pub auc: T,
    pub weak: TestResult<T>,
    pub strong: TestResult<T>,
    pub failed_replicates: usize,
    pub warnings: Vec<String>,
}

fn mean<T: Scalar>(v: &[T]) -> T {
    v.iter().copied().sum::<T>() / T::of_usize(v.len())
}

fn covariance<T: Scalar>(a: &[T], b: &[T]) -> T {
    let (ma, mb) = (mean(a), mean(b));
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - ma) * (y - mb))
        .sum::<T>()
        / T::of_usize(a.len() - 1)
}

fn two_sided_normal<T: Scalar>(z: T) -> T {
    T::of(2.0) * normal_cdf(-z.abs())
}

fn wald_z<T: Scalar>(estimate: T, replicates: &[T], what: &str) -> Result<TestResult<T>> {
    let se = covariance(replicates, replicates).sqrt();
    if !(se > T::zero()) {
        return Err(RocError::Degenerate(format!(
            "bootstrap standard error of {what} is zero"
        )));
    }
    let z = estimate / se;
    Ok(TestResult::new(
        z,
        two_sided_normal(z),
        NullKind::Weak,
        &format!("standard normal (Wald on {what}, bootstrap SE)"),
    ))
}

/// Refits the model on every stratified resample (warm-started at the
/// original estimate) and returns the fit, percentile band and tests.
pub fn semi_inference<T: Scalar>(
    sample: &TwoGroupSample<T>,
    family: SemiFamily,
    config: &BandConfig<T>,
) -> Result<SemiInference<T>> {
    let design = PairwiseDesign::new(sample)?;
    let fit = fit_semi(&design, family)?;
    let grid = config.fpr_grid();
    let estimate: Vec<T> = grid.iter().map(|&p| semi_curve(&fit, p)).collect();

    let reps = run_replicates(sample, config, |s| {
        let d = PairwiseDesign::new(s)?;
        let f = refit_semi(&d, &fit.params)?;
        let curve: Vec<T> = grid.iter().map(|&p| semi_curve(&f, p)).collect();
        Ok((f.params.to_vec(), curve))
    })?;
    let rows: Vec<&Vec<T>> = reps.successes().map(|(_, c)| c).collect();
    let curve = percentile_band(&estimate, grid, &rows, family.method(), config.level())?;
    let params: Vec<&Vec<T>> = reps.successes().map(|(p, _)| p).collect();
    if params.len() < 2 {
        return Err(RocError::Bootstrap {
            failed: reps.failures,
            total: config.replicates(),
        });
    }

    let (auc, weak, strong) = match fit.params {
        SemiParams::Biexp { alpha } => {
            let logs: Vec<T> = params.iter().map(|p| p[0].ln()).collect();
            let weak = wald_z(alpha.ln(), &logs, "log alpha")?;
            let strong = weak.as_null(NullKind::Strong);
            (biexp_auc_from_alpha(alpha), weak, strong)
        }
        SemiParams::Binorm { beta0, beta1 } => {
            let b0: Vec<T> = params.iter().map(|p| p[0]).collect();
            let b1: Vec<T> = params.iter().map(|p| p[1]).collect();
            let weak = wald_z(beta0, &b0, "beta0")?;
            let (v00, v01, v11) = (covariance(&b0, &b0), covariance(&b0, &b1), covariance(&b1, &b1));
            let det = v00 * v11 - v01 * v01;
            if !(det > T::zero()) {
                return Err(RocError::Degenerate(
                    "bootstrap covariance of (beta0, beta1) is singular".into(),
                ));
            }
            let (d0, d1) = (beta0, beta1 - T::one());
            let w = (v11 * d0 * d0 - T::of(2.0) * v01 * d0 * d1 + v00 * d1 * d1) / det;
            let strong = TestResult::new(
                w,
                chi2_sf(w, 2)?,
                NullKind::Strong,
                "chi-squared, 2 df (Wald on (beta0, beta1) = (0, 1), bootstrap covariance)",
            );
            (binorm_auc_from_params(beta0, beta1)?, weak, strong)
        }
    };

    let mut warnings = fit.warnings.clone();
    if reps.needs_warning() {
        warnings.push(format!(
            "{} of {} bootstrap replicates failed",
            reps.failures,
            config.replicates()
        ));
    }
    Ok(SemiInference {
        fit,
        curve,
        auc,
        weak,
        strong,
        failed_replicates: reps.failures,
        warnings,
    })
}
