use std::fmt;

use crate::error::{Result, RocError};
use crate::model::{Orientation, TwoGroupSample};
use crate::numerics::{normal_quantile_unchecked, RngStream};
use crate::parametric::{biexp_roc, binorm_roc};
use crate::Scalar;

/// Data-generating mechanisms. Reference values sit above comparator values
/// when the groups separate, matching the canonical orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dgm<T> {
    /// Y₀ ~ Exp(λ₀), Y₁ ~ Exp(λ₁).
    ExpExp { lambda0: T, lambda1: T },
    /// Y₀ ~ N(μ₀, σ₀²), Y₁ ~ N(μ₁, σ₁²).
    NormNorm { mu0: T, sd0: T, mu1: T, sd1: T },
    /// Normal reference; comparator F₁(t) = 1 − (1 − Φ((t − μ₀)/σ₀))^α, so the
    /// curve is biexponential.
    NormRefBiexp { mu0: T, sd0: T, alpha: T },
    /// Exponential reference; comparator chosen so the curve is
    /// Φ(β₀ + β₁Φ⁻¹(p)).
    ExpRefBinorm { lambda0: T, beta0: T, beta1: T },
}

fn positive<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(RocError::Validation(format!("{name} must be positive, got {v}")))
    }
}

fn finite<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(RocError::Validation(format!("{name} must be finite")))
    }
}

impl<T: Scalar> Dgm<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Dgm::ExpExp { lambda0, lambda1 } => {
                positive("lambda0", lambda0)?;
                positive("lambda1", lambda1)
            }
            Dgm::NormNorm { mu0, sd0, mu1, sd1 } => {
                finite("mu0", mu0)?;
                finite("mu1", mu1)?;
                positive("sd0", sd0)?;
                positive("sd1", sd1)
            }
            Dgm::NormRefBiexp { mu0, sd0, alpha } => {
                finite("mu0", mu0)?;
                positive("sd0", sd0)?;
                positive("alpha", alpha)
            }
            Dgm::ExpRefBinorm { lambda0, beta0, beta1 } => {
                positive("lambda0", lambda0)?;
                finite("beta0", beta0)?;
                positive("beta1", beta1)
            }
        }
    }

    /// Analytic ROC(p) = F₁(F₀⁻¹(p)).
    pub fn true_roc(&self, p: T) -> T {
        match *self {
            Dgm::ExpExp { lambda0, lambda1 } => biexp_roc(lambda1 / lambda0, p),
            Dgm::NormNorm { mu0, sd0, mu1, sd1 } => {
                binorm_roc((mu0 - mu1) / sd1, sd0 / sd1, p)
            }
            Dgm::NormRefBiexp { alpha, .. } => biexp_roc(alpha, p),
            Dgm::ExpRefBinorm { beta0, beta1, .. } => binorm_roc(beta0, beta1, p),
        }
    }

    fn draw_reference(&self, rng: &mut RngStream) -> T {
        match *self {
            Dgm::ExpExp { lambda0, .. } | Dgm::ExpRefBinorm { lambda0, .. } => {
                T::of(rng.exp1()) / lambda0
            }
            Dgm::NormNorm { mu0, sd0, .. } | Dgm::NormRefBiexp { mu0, sd0, .. } => {
                mu0 + sd0 * T::of(rng.standard_normal())
            }
        }
    }

    fn draw_comparator(&self, rng: &mut RngStream) -> T {
        match *self {
            Dgm::ExpExp { lambda1, .. } => T::of(rng.exp1()) / lambda1,
            Dgm::NormNorm { mu1, sd1, .. } => mu1 + sd1 * T::of(rng.standard_normal()),
            Dgm::NormRefBiexp { mu0, sd0, alpha } => {
                // t = μ₀ + σ₀Φ⁻¹(1 − (1 − u)^{1/α})
                let v = (T::of(rng.open01()).ln() / alpha).exp();
                mu0 - sd0 * normal_quantile_unchecked(v)
            }
            Dgm::ExpRefBinorm { lambda0, beta0, beta1 } => {
                // t = −log(1 − Φ(w))/λ₀ with w = (Φ⁻¹(u) − β₀)/β₁
                let u = T::of(rng.open01());
                let w = (normal_quantile_unchecked(u) - beta0) / beta1;
                -crate::numerics::normal_cdf(-w).ln() / lambda0
            }
        }
    }

    /// Independent draws, reference group first.
    pub fn sample(&self, n0: usize, n1: usize, rng: &mut RngStream) -> Result<TwoGroupSample<T>> {
        self.validate()?;
        let reference = (0..n0).map(|_| self.draw_reference(rng)).collect();
        let comparator = (0..n1).map(|_| self.draw_comparator(rng)).collect();
        TwoGroupSample::new(reference, comparator, Orientation::LowerLessDesirable)
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl<T: Scalar> fmt::Display for Dgm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dgm::ExpExp { lambda0, lambda1 } => {
                write!(f, "exp(lambda0={lambda0};lambda1={lambda1})")
            }
            Dgm::NormNorm { mu0, sd0, mu1, sd1 } => {
                write!(f, "norm(mu0={mu0};sd0={sd0};mu1={mu1};sd1={sd1})")
            }
            Dgm::NormRefBiexp { mu0, sd0, alpha } => {
                write!(f, "norm-biexp(mu0={mu0};sd0={sd0};alpha={alpha})")
            }
            Dgm::ExpRefBinorm { lambda0, beta0, beta1 } => {
                write!(f, "exp-binorm(lambda0={lambda0};beta0={beta0};beta1={beta1})")
            }
        }
    }
}

pub fn sample_dgm<T: Scalar>(
    dgm: &Dgm<T>,
    n0: usize,
    n1: usize,
    rng: &mut RngStream,
) -> Result<TwoGroupSample<T>> {
    dgm.sample(n0, n1, rng)
}

pub fn true_roc<T: Scalar>(dgm: &Dgm<T>, p: T) -> T {
    dgm.true_roc(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirical::empirical_roc_at;

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    #[test]
    fn group_means() {
        let mut rng = RngStream::new(1, 0);
        let s = Dgm::ExpExp { lambda0: 1.0, lambda1: 4.0 }.sample(1000, 1000, &mut rng).unwrap();
        assert!((mean(s.reference()) - 1.0).abs() < 0.1);
        let s = Dgm::NormNorm { mu0: 5.5, sd0: 1.0, mu1: 4.0, sd1: 1.0 }
            .sample(1000, 1000, &mut rng)
            .unwrap();
        assert!((mean(s.comparator()) - 4.0).abs() < 0.1);
    }

    #[test]
    fn alpha_one_collapses_to_reference() {
        let mut rng = RngStream::new(2, 0);
        let s = Dgm::NormRefBiexp { mu0: 0.0, sd0: 1.0, alpha: 1.0 }
            .sample(4000, 4000, &mut rng)
            .unwrap();
        let c = s.comparator();
        let m = mean(c);
        let var = c.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (c.len() - 1) as f64;
        assert!(m.abs() < 0.06 && (var - 1.0).abs() < 0.08, "{m} {var}");
    }

    #[test]
    fn true_roc_examples() {
        let e: Dgm<f64> = Dgm::ExpExp { lambda0: 1.0, lambda1: 4.0 };
        assert!((e.true_roc(0.2) - 0.5904).abs() < 1e-12);
        let n = Dgm::NormNorm { mu0: 5.5, sd0: 1.0, mu1: 4.0, sd1: 1.0 };
        assert!((n.true_roc(0.0670_f64) - 0.50).abs() < 0.005);
        assert!((n.true_roc(0.4140_f64) - 0.90).abs() < 0.005);
    }

    #[test]
    fn crossed_dgms_follow_their_curves() {
        let grid = [0.1_f64, 0.3, 0.5, 0.7, 0.9];
        let dgms = [
            Dgm::NormRefBiexp { mu0: 2.0, sd0: 1.5, alpha: 3.0 },
            Dgm::ExpRefBinorm { lambda0: 2.0, beta0: 1.0, beta1: 0.7 },
        ];
        for (k, dgm) in dgms.iter().enumerate() {
            let mut rng = RngStream::new(3, k as u64);
            let s = dgm.sample(20000, 20000, &mut rng).unwrap();
            let est = empirical_roc_at(&s, &grid).unwrap();
            for (&p, e) in grid.iter().zip(est) {
                assert!((e - dgm.true_roc(p)).abs() < 0.02, "{dgm} at {p}: {e}");
            }
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(Dgm::ExpExp { lambda0: 0.0, lambda1: 1.0 }.validate().is_err());
        assert!(Dgm::NormNorm { mu0: 0.0, sd0: -1.0, mu1: 0.0, sd1: 1.0 }.validate().is_err());
        assert!(Dgm::ExpRefBinorm { lambda0: 1.0, beta0: 0.0, beta1: 0.0 }.validate().is_err());
    }
}
