use super::design::PairwiseDesign;
use crate::error::{Result, RocError};
use crate::numerics::{normal_cdf, normal_pdf, normal_quantile_unchecked};
use crate::parametric::{biexp_roc, binorm_roc};
use crate::Scalar;

pub const MAX_ITERATIONS: usize = 200;
/// Score tolerance per usable pair.
pub const SCORE_TOLERANCE: f64 = 1e-10;
/// Looser per-pair tolerance accepted once the iterate cannot move.
pub const STALL_TOLERANCE: f64 = 1e-8;
const DENOMINATOR_GUARD: f64 = 1e-12;
const MEAN_CLIP: f64 = 1e-10;
const ALPHA_BRACKET: (f64, f64) = (1e-6, 1e6);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiFamily {
    Biexp,
    Binorm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SemiParams<T> {
    Biexp { alpha: T },
    Binorm { beta0: T, beta1: T },
}

impl<T: Scalar> SemiParams<T> {
    pub fn family(&self) -> SemiFamily {
        match self {
            SemiParams::Biexp { .. } => SemiFamily::Biexp,
            SemiParams::Binorm { .. } => SemiFamily::Binorm,
        }
    }

    pub fn to_vec(&self) -> Vec<T> {
        match *self {
            SemiParams::Biexp { alpha } => vec![alpha],
            SemiParams::Binorm { beta0, beta1 } => vec![beta0, beta1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemiFit<T> {
    pub params: SemiParams<T>,
    pub converged: bool,
    pub iterations: usize,
    /// |𝔾| at the returned parameters.
    pub final_gradient_norm: T,
    /// The score tolerance that was met.
    pub tolerance: T,
    pub warnings: Vec<String>,
}

/// 1 − (1 − p)^α̂ or Φ(β̂₀ + β̂₁Φ⁻¹(p)).
pub fn semi_curve<T: Scalar>(fit: &SemiFit<T>, p: T) -> T {
    match fit.params {
        SemiParams::Biexp { alpha } => biexp_roc(alpha, p),
        SemiParams::Binorm { beta0, beta1 } => binorm_roc(beta0, beta1, p),
    }
}

fn separation_check<T: Scalar>(design: &PairwiseDesign<T>) -> Result<()> {
    let pairs = design.usable_pairs();
    let u: usize = design.rows().map(|(_, k)| k).sum();
    if u == 0 {
        return Err(RocError::Separation("every usable pair has U = 0".into()));
    }
    if u == pairs {
        return Err(RocError::Separation("every usable pair has U = 1".into()));
    }
    Ok(())
}

/// Per-row covariate log(1 − p̂), response Σⱼ V(i, j) and n₁.
struct BiexpRows<T> {
    x: Vec<T>,
    v: Vec<T>,
    n1: T,
}

impl<T: Scalar> BiexpRows<T> {
    fn new(design: &PairwiseDesign<T>) -> Self {
        let n0 = design.n0();
        let n1 = design.n1();
        let (x, v) = design
            .rows()
            .map(|(c, k)| {
                let q = T::of_usize(n0 - c) / T::of_usize(n0);
                (q.ln(), T::of_usize(n1 - k))
            })
            .unzip();
        Self {
            x,
            v,
            n1: T::of_usize(n1),
        }
    }

    /// 𝔾(α) = Σ log(1−p̂)/(1−(1−p̂)^α)·(V − (1−p̂)^α) and the expected
    /// information Σ n₁ log²(1−p̂)(1−p̂)^α/(1−(1−p̂)^α).
    fn score_and_information(&self, alpha: T) -> (T, T) {
        let guard = T::of(DENOMINATOR_GUARD);
        let mut g = T::zero();
        let mut info = T::zero();
        for (&x, &v) in self.x.iter().zip(&self.v) {
            let mu = (alpha * x).exp();
            let one_minus = (-(alpha * x).exp_m1()).max(guard);
            g = g + x / one_minus * (v - self.n1 * mu);
            info = info + self.n1 * x * x * mu / one_minus;
        }
        (g, info)
    }

    fn score(&self, alpha: T) -> T {
        self.score_and_information(alpha).0
    }
}

pub fn fit_semi_biexponential<T: Scalar>(design: &PairwiseDesign<T>) -> Result<SemiFit<T>> {
    fit_semi_biexponential_from(design, T::one())
}

/// Damped Gauss–Newton on 𝔾(α) = 0 inside a sign-change bracket, starting
/// from `start`.
pub fn fit_semi_biexponential_from<T: Scalar>(
    design: &PairwiseDesign<T>,
    start: T,
) -> Result<SemiFit<T>> {
    separation_check(design)?;
    let rows = BiexpRows::new(design);
    let pairs = T::of_usize(design.usable_pairs());
    let tol = T::of(SCORE_TOLERANCE) * pairs;
    let stall_tol = T::of(STALL_TOLERANCE) * pairs;

    let (mut lo, mut hi) = (T::of(ALPHA_BRACKET.0), T::of(ALPHA_BRACKET.1));
    if !(rows.score(lo) > T::zero() && rows.score(hi) < T::zero()) {
        return Err(RocError::Separation(format!(
            "biexponential score has no sign change on [{}, {}]",
            ALPHA_BRACKET.0, ALPHA_BRACKET.1
        )));
    }
    let mut alpha = if start > lo && start < hi { start } else { T::one() };
    let done = |alpha: T, g: T, iterations: usize, tolerance: T| SemiFit {
        params: SemiParams::Biexp { alpha },
        converged: true,
        iterations,
        final_gradient_norm: g.abs(),
        tolerance,
        warnings: Vec::new(),
    };
    let (mut g, mut info) = rows.score_and_information(alpha);
    for iter in 0..MAX_ITERATIONS {
        if g.abs() <= tol {
            return Ok(done(alpha, g, iter, tol));
        }
        if g > T::zero() {
            lo = alpha;
        } else {
            hi = alpha;
        }
        if hi / lo - T::one() <= T::epsilon() * T::of(16.0) {
            break;
        }
        // The score decreases in α, so the Newton step is +𝔾/J.
        let mut step = g / info;
        let mut next = None;
        for _ in 0..40 {
            let cand = alpha + step;
            if cand > lo && cand < hi {
                let (gc, ic) = rows.score_and_information(cand);
                if gc.abs() < g.abs() {
                    next = Some((cand, gc, ic));
                    break;
                }
            }
            step = step / T::of(2.0);
        }
        let (a, gn, i_n) = next.unwrap_or_else(|| {
            let mid = (lo * hi).sqrt();
            let (gm, im) = rows.score_and_information(mid);
            (mid, gm, im)
        });
        alpha = a;
        g = gn;
        info = i_n;
    }
    if g.abs() <= stall_tol {
        return Ok(done(alpha, g, MAX_ITERATIONS, stall_tol));
    }
    Err(RocError::Convergence {
        message: format!("biexponential score at alpha = {alpha}"),
        iterations: MAX_ITERATIONS,
        gradient_norm: g.abs().to_f64_lossy(),
    })
}

/// Per-row probit covariate Φ⁻¹(p̂), successes Σⱼ U(i, j) and n₁.
struct BinormRows<T> {
    x: Vec<T>,
    k: Vec<T>,
    n1: T,
}

struct BinormEval<T> {
    loglik: T,
    score: [T; 2],
    info: [[T; 2]; 2],
}

impl<T: Scalar> BinormRows<T> {
    fn new(design: &PairwiseDesign<T>) -> Self {
        let n0 = T::of_usize(design.n0());
        let (x, k) = design
            .rows()
            .map(|(c, k)| (normal_quantile_unchecked(T::of_usize(c) / n0), T::of_usize(k)))
            .unzip();
        Self {
            x,
            k,
            n1: T::of_usize(design.n1()),
        }
    }

    fn eval(&self, b0: T, b1: T) -> BinormEval<T> {
        let lo = T::of(MEAN_CLIP);
        let hi = T::one() - lo;
        let mut loglik = T::zero();
        let mut score = [T::zero(); 2];
        let mut info = [[T::zero(); 2]; 2];
        for (&x, &k) in self.x.iter().zip(&self.k) {
            let eta = b0 + b1 * x;
            let mu = normal_cdf(eta).max(lo).min(hi);
            let one_minus = normal_cdf(-eta).max(lo).min(hi);
            let dens = normal_pdf(eta);
            loglik = loglik + k * mu.ln() + (self.n1 - k) * one_minus.ln();
            let r = dens * (k - self.n1 * mu) / (mu * one_minus);
            let w = self.n1 * dens * dens / (mu * one_minus);
            score[0] = score[0] + r;
            score[1] = score[1] + r * x;
            info[0][0] = info[0][0] + w;
            info[0][1] = info[0][1] + w * x;
            info[1][1] = info[1][1] + w * x * x;
        }
        info[1][0] = info[0][1];
        BinormEval {
            loglik,
            score,
            info,
        }
    }
}

fn norm2<T: Scalar>(v: [T; 2]) -> T {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

pub fn fit_semi_binormal<T: Scalar>(design: &PairwiseDesign<T>) -> Result<SemiFit<T>> {
    fit_semi_binormal_from(design, (T::zero(), T::one()))
}

/// Probit Fisher scoring (IRLS) on the pairwise indicators with step halving
/// on the log-likelihood, starting from `start`.
pub fn fit_semi_binormal_from<T: Scalar>(
    design: &PairwiseDesign<T>,
    start: (T, T),
) -> Result<SemiFit<T>> {
    separation_check(design)?;
    if design.rows().all(|(_, k)| k == 0 || k == design.n1()) {
        return Err(RocError::Separation(
            "every usable row is all-zero or all-one; probit estimates diverge".into(),
        ));
    }
    let rows = BinormRows::new(design);
    if rows.x.iter().all(|&x| x == rows.x[0]) {
        return Err(RocError::Degenerate(
            "all usable rows share one placement value; slope not identified".into(),
        ));
    }
    let pairs = T::of_usize(design.usable_pairs());
    let tol = T::of(SCORE_TOLERANCE) * pairs;
    let stall_tol = T::of(STALL_TOLERANCE) * pairs;
    let divergence = T::of(1e4);

    let (mut b0, mut b1) = start;
    let mut cur = rows.eval(b0, b1);
    if !cur.loglik.is_finite() {
        b0 = T::zero();
        b1 = T::one();
        cur = rows.eval(b0, b1);
    }
    let finish = |b0: T, b1: T, g: T, iterations: usize, tolerance: T| {
        let mut warnings = Vec::new();
        if b1 <= T::zero() {
            warnings.push(format!(
                "fitted binormal slope {b1} is not positive; curve violates the ROC convention"
            ));
        }
        SemiFit {
            params: SemiParams::Binorm { beta0: b0, beta1: b1 },
            converged: true,
            iterations,
            final_gradient_norm: g,
            tolerance,
            warnings,
        }
    };
    for iter in 0..MAX_ITERATIONS {
        let g = norm2(cur.score);
        if g <= tol {
            return Ok(finish(b0, b1, g, iter, tol));
        }
        let [[a, b], [_, d]] = cur.info;
        let det = a * d - b * b;
        if !(det > T::zero()) || !det.is_finite() {
            return Err(RocError::Degenerate(
                "singular probit information matrix".into(),
            ));
        }
        let mut s0 = (d * cur.score[0] - b * cur.score[1]) / det;
        let mut s1 = (a * cur.score[1] - b * cur.score[0]) / det;
        let mut moved = false;
        for _ in 0..40 {
            let cand = rows.eval(b0 + s0, b1 + s1);
            // Near the root likelihood changes drop below rounding; a smaller
            // score is then accepted instead.
            let slack = T::epsilon() * T::of(64.0) * (cur.loglik.abs() + T::one());
            let better = cand.loglik > cur.loglik
                || (cand.loglik >= cur.loglik - slack && norm2(cand.score) < g);
            if cand.loglik.is_finite() && better {
                b0 = b0 + s0;
                b1 = b1 + s1;
                cur = cand;
                moved = true;
                break;
            }
            s0 = s0 / T::of(2.0);
            s1 = s1 / T::of(2.0);
        }
        if b0.abs() > divergence || b1.abs() > divergence {
            return Err(RocError::Separation(
                "probit coefficients diverge (quasi-complete separation)".into(),
            ));
        }
        if !moved {
            if g <= stall_tol {
                return Ok(finish(b0, b1, g, iter + 1, stall_tol));
            }
            return Err(RocError::Convergence {
                message: "probit step halving failed to increase the likelihood".into(),
                iterations: iter + 1,
                gradient_norm: g.to_f64_lossy(),
            });
        }
    }
    let g = norm2(cur.score);
    if g <= stall_tol {
        return Ok(finish(b0, b1, g, MAX_ITERATIONS, stall_tol));
    }
    Err(RocError::Convergence {
        message: format!("probit fit at ({b0}, {b1})"),
        iterations: MAX_ITERATIONS,
        gradient_norm: g.to_f64_lossy(),
    })
}

pub fn fit_semi<T: Scalar>(design: &PairwiseDesign<T>, family: SemiFamily) -> Result<SemiFit<T>> {
    match family {
        SemiFamily::Biexp => fit_semi_biexponential(design),
        SemiFamily::Binorm => fit_semi_binormal(design),
    }
}

/// Refit starting from earlier parameters.
pub fn refit_semi<T: Scalar>(design: &PairwiseDesign<T>, warm: &SemiParams<T>) -> Result<SemiFit<T>> {
    match *warm {
        SemiParams::Biexp { alpha } => fit_semi_biexponential_from(design, alpha),
        SemiParams::Binorm { beta0, beta1 } => fit_semi_binormal_from(design, (beta0, beta1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Orientation, TwoGroupSample};
    use crate::numerics::RngStream;
    use crate::parametric::fit_binormal;

    fn sample(r: Vec<f64>, c: Vec<f64>) -> TwoGroupSample<f64> {
        TwoGroupSample::new(r, c, Orientation::LowerLessDesirable).unwrap()
    }

    fn design(r: Vec<f64>, c: Vec<f64>) -> PairwiseDesign<f64> {
        PairwiseDesign::new(&sample(r, c)).unwrap()
    }

    fn exp_design(n: usize, rate1: f64, rng: &mut RngStream) -> PairwiseDesign<f64> {
        let r = (0..n).map(|_| rng.exp1()).collect();
        let c = (0..n).map(|_| rng.exp1() / rate1).collect();
        design(r, c)
    }

    fn normal_sample(n: usize, mu1: f64, rng: &mut RngStream) -> TwoGroupSample<f64> {
        let r = (0..n).map(|_| 5.5 + rng.standard_normal()).collect();
        let c = (0..n).map(|_| mu1 + rng.standard_normal()).collect();
        sample(r, c)
    }

    fn alpha_of(fit: &SemiFit<f64>) -> f64 {
        match fit.params {
            SemiParams::Biexp { alpha } => alpha,
            _ => unreachable!(),
        }
    }

    fn betas_of(fit: &SemiFit<f64>) -> (f64, f64) {
        match fit.params {
            SemiParams::Binorm { beta0, beta1 } => (beta0, beta1),
            _ => unreachable!(),
        }
    }

    /// 𝔾(α) as the double sum over every usable (i, j) pair.
    fn biexp_score_double_sum(d: &PairwiseDesign<f64>, alpha: f64) -> f64 {
        let mut g = 0.0;
        for i in (0..d.n0()).filter(|&i| d.is_included(i)) {
            let p = d.placement(i);
            let q = (1.0 - p).powf(alpha);
            for j in 0..d.n1() {
                let v = if d.indicator(i, j) { 0.0 } else { 1.0 };
                g += (1.0 - p).ln() / (1.0 - q) * (v - q);
            }
        }
        g
    }

    fn binorm_score_double_sum(d: &PairwiseDesign<f64>, b0: f64, b1: f64) -> f64 {
        let mut g = [0.0, 0.0];
        for i in (0..d.n0()).filter(|&i| d.is_included(i)) {
            let x = normal_quantile_unchecked(d.placement(i));
            let eta = b0 + b1 * x;
            let mu = normal_cdf(eta);
            let w = normal_pdf(eta) / (mu * (1.0 - mu));
            for j in 0..d.n1() {
                let u = if d.indicator(i, j) { 1.0 } else { 0.0 };
                g[0] += w * (u - mu);
                g[1] += w * (u - mu) * x;
            }
        }
        (g[0] * g[0] + g[1] * g[1]).sqrt()
    }

    #[test]
    fn self_paired_biexp_is_identity() {
        let v = vec![0.3, 1.2, 0.7, 2.2, 0.1, 1.9];
        let fit = fit_semi_biexponential(&design(v.clone(), v)).unwrap();
        assert!((alpha_of(&fit) - 1.0).abs() < 1e-12);
        assert_eq!(fit.iterations, 0);
    }

    #[test]
    fn self_paired_binorm_is_identity() {
        let mut rng = RngStream::new(3, 0);
        let v: Vec<f64> = (0..40).map(|_| rng.standard_normal()).collect();
        let d = design(v.clone(), v);
        assert!(binorm_score_double_sum(&d, 0.0, 1.0) < 1e-3);
        let fit = fit_semi_binormal(&d).unwrap();
        let (b0, b1) = betas_of(&fit);
        assert!(b0.abs() < 0.05 && (b1 - 1.0).abs() < 0.1, "({b0}, {b1})");
    }

    #[test]
    fn separation_errors() {
        // Every comparator below every reference value: all U = 1.
        let d = design(vec![5.0, 6.0, 7.0, 8.0], vec![1.0, 2.0]);
        assert!(matches!(fit_semi_biexponential(&d), Err(RocError::Separation(_))));
        assert!(matches!(fit_semi_binormal(&d), Err(RocError::Separation(_))));
        let d = design(vec![5.0, 6.0, 7.0, 8.0], vec![10.0, 20.0]);
        assert!(matches!(fit_semi_biexponential(&d), Err(RocError::Separation(_))));
        // Pure rows on both sides of a threshold.
        let d = design(vec![1.0, 2.0, 5.0, 6.0, 9.0], vec![3.0, 4.0]);
        assert!(matches!(fit_semi_binormal(&d), Err(RocError::Separation(_))));
    }

    #[test]
    fn biexp_consistency_large_sample() {
        let mut rng = RngStream::new(11, 0);
        let fit = fit_semi_biexponential(&exp_design(2000, 4.0, &mut rng)).unwrap();
        let a = alpha_of(&fit);
        assert!((a - 4.0).abs() < 0.4, "alpha {a}");
    }

    #[test]
    fn binorm_consistency_large_sample() {
        let mut rng = RngStream::new(12, 0);
        let d = PairwiseDesign::new(&normal_sample(2000, 4.0, &mut rng)).unwrap();
        let (b0, b1) = betas_of(&fit_semi_binormal(&d).unwrap());
        assert!((b0 - 1.5).abs() < 0.15 && (b1 - 1.0).abs() < 0.1, "({b0}, {b1})");
    }

    #[test]
    fn residuals_checked_against_double_sums() {
        for seed in 0..20 {
            let mut rng = RngStream::new(13, seed);
            let n = 10 + 7 * seed as usize;
            let d = exp_design(n, 2.5, &mut rng);
            if let Ok(fit) = fit_semi_biexponential(&d) {
                let g = biexp_score_double_sum(&d, alpha_of(&fit));
                assert!(g.abs() <= 1e-8 * d.usable_pairs() as f64, "seed {seed}: {g}");
                assert!(fit.final_gradient_norm <= fit.tolerance);
            }
            let d = PairwiseDesign::new(&normal_sample(n, 4.5, &mut rng)).unwrap();
            if let Ok(fit) = fit_semi_binormal(&d) {
                let (b0, b1) = betas_of(&fit);
                let g = binorm_score_double_sum(&d, b0, b1);
                assert!(g <= 1e-8 * d.usable_pairs() as f64, "seed {seed}: {g}");
            }
        }
    }

    /// Grid search for a sign change of the double-sum score, then bisection.
    fn bisection_oracle(d: &PairwiseDesign<f64>) -> Option<f64> {
        let grid: Vec<f64> = (0..=600).map(|k| 10f64.powf(-3.0 + k as f64 / 100.0)).collect();
        let pos = grid.windows(2).find(|w| {
            biexp_score_double_sum(d, w[0]) > 0.0 && biexp_score_double_sum(d, w[1]) <= 0.0
        })?;
        let (mut lo, mut hi) = (pos[0], pos[1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if biexp_score_double_sum(d, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    #[test]
    fn small_samples_match_bisection_oracle() {
        let mut checked = 0;
        for seed in 0..300 {
            let mut rng = RngStream::new(14, seed);
            let n0 = 4 + rng.index(3);
            let n1 = 2 + rng.index(5);
            let r: Vec<f64> = (0..n0).map(|_| rng.exp1()).collect();
            let c: Vec<f64> = (0..n1).map(|_| rng.exp1() / 2.0).collect();
            let Ok(d) = PairwiseDesign::new(&sample(r, c)) else { continue };
            match (fit_semi_biexponential(&d), bisection_oracle(&d)) {
                (Ok(fit), Some(want)) => {
                    if want > 1.001e-3 && want < 0.999e3 {
                        let got = alpha_of(&fit);
                        assert!((got - want).abs() <= 1e-6 * want.max(1.0), "seed {seed}: {got} vs {want}");
                        checked += 1;
                    }
                }
                (Err(RocError::Separation(_)), None) => {}
                (Ok(fit), None) if !(1e-3..=1e3).contains(&alpha_of(&fit)) => {}
                (got, want) => panic!("seed {seed}: solver {got:?}, oracle {want:?}"),
            }
        }
        assert!(checked > 150, "only {checked} comparable cases");
    }

    #[test]
    fn warm_start_reaches_same_fixed_point() {
        let mut rng = RngStream::new(15, 0);
        let d = exp_design(80, 3.0, &mut rng);
        let cold = alpha_of(&fit_semi_biexponential(&d).unwrap());
        let warm = alpha_of(&fit_semi_biexponential_from(&d, cold * 1.1).unwrap());
        assert!((cold - warm).abs() < 1e-8);
        let d = PairwiseDesign::new(&normal_sample(80, 4.2, &mut rng)).unwrap();
        let cold = fit_semi_binormal(&d).unwrap();
        let (b0, b1) = betas_of(&cold);
        let warm = betas_of(&fit_semi_binormal_from(&d, (b0 + 0.2, b1 * 0.9)).unwrap());
        assert!((warm.0 - b0).abs() < 1e-7 && (warm.1 - b1).abs() < 1e-7);
    }

    #[test]
    fn semi_binorm_approaches_parametric() {
        let mean_gap = |n: usize| {
            let reps = 30;
            (0..reps)
                .map(|m| {
                    let mut rng = RngStream::new(16, (n * 1000 + m) as u64);
                    let s = normal_sample(n, 4.0, &mut rng);
                    let semi = betas_of(&fit_semi_binormal(&PairwiseDesign::new(&s).unwrap()).unwrap()).0;
                    (semi - fit_binormal(&s).unwrap().beta0).abs()
                })
                .sum::<f64>()
                / reps as f64
        };
        let (small, large) = (mean_gap(200), mean_gap(2000));
        assert!(large < small, "{large} !< {small}");
    }

    #[test]
    fn curve_examples() {
        let fit = |params: SemiParams<f64>| SemiFit { params, converged: true, iterations: 0, final_gradient_norm: 0.0, tolerance: 0.0, warnings: vec![] };
        let id_b = fit(SemiParams::Biexp { alpha: 1.0 });
        let id_n = fit(SemiParams::Binorm { beta0: 0.0, beta1: 1.0 });
        for p in [0.1, 0.45, 0.9] {
            assert!((semi_curve(&id_b, p) - p).abs() < 1e-15);
            assert!((semi_curve(&id_n, p) - p).abs() < 1e-12);
        }
        let b = fit(SemiParams::Biexp { alpha: 4.48 });
        assert!((semi_curve(&b, 0.1) - 0.376).abs() < 1e-3);
    }
}
