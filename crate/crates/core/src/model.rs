//! Two-group samples, orientation conventions, ROC curve representations
//! and the convention-change reflection.

use std::fmt;

use crate::error::{Result, RocError};
use crate::Scalar;

/// Which direction of the measurement is considered less desirable.
///
/// The canonical convention is [`Orientation::LowerLessDesirable`], under
/// which ROC(p) = F₁(F₀⁻¹(p)) and AUC = P(Y₀ > Y₁).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    LowerLessDesirable,
    HigherLessDesirable,
}

impl Orientation {
    pub fn label(self) -> &'static str {
        match self {
            Orientation::LowerLessDesirable => "lower-less-desirable",
            Orientation::HigherLessDesirable => "higher-less-desirable",
        }
    }
}

/// Reference (Y₀) and comparator (Y₁) measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoGroupSample<T> {
    reference: Vec<T>,
    comparator: Vec<T>,
    orientation: Orientation,
}

impl<T: Scalar> TwoGroupSample<T> {
    /// Validates group sizes (at least two each) and finiteness.
    pub fn new(reference: Vec<T>, comparator: Vec<T>, orientation: Orientation) -> Result<Self> {
        if reference.len() < 2 {
            return Err(RocError::Validation("reference group too small".into()));
        }
        if comparator.len() < 2 {
            return Err(RocError::Validation("comparator group too small".into()));
        }
        if reference.iter().chain(&comparator).any(|v| !v.is_finite()) {
            return Err(RocError::Validation("non-finite value".into()));
        }
        Ok(Self {
            reference,
            comparator,
            orientation,
        })
    }

    /// Internal constructor for resamples of an already validated sample.
    pub(crate) fn from_parts_unchecked(
        reference: Vec<T>,
        comparator: Vec<T>,
        orientation: Orientation,
    ) -> Self {
        debug_assert!(reference.len() >= 2 && comparator.len() >= 2);
        Self {
            reference,
            comparator,
            orientation,
        }
    }

    pub fn reference(&self) -> &[T] {
        &self.reference
    }

    pub fn comparator(&self) -> &[T] {
        &self.comparator
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn n0(&self) -> usize {
        self.reference.len()
    }

    pub fn n1(&self) -> usize {
        self.comparator.len()
    }

    pub fn n(&self) -> usize {
        self.n0() + self.n1()
    }

    /// Maps the sample into the canonical (lower-less-desirable) convention
    /// by negating every value when needed. Idempotent.
    pub fn canonical(&self) -> Self {
        match self.orientation {
            Orientation::LowerLessDesirable => self.clone(),
            Orientation::HigherLessDesirable => Self {
                reference: self.reference.iter().map(|v| -*v).collect(),
                comparator: self.comparator.iter().map(|v| -*v).collect(),
                orientation: Orientation::LowerLessDesirable,
            },
        }
    }

    /// Same data, relabelled orientation.
    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        Self {
            orientation,
            ..self.clone()
        }
    }
}

pub fn validate_sample<T: Scalar>(
    reference: Vec<T>,
    comparator: Vec<T>,
    orientation: Orientation,
) -> Result<TwoGroupSample<T>> {
    TwoGroupSample::new(reference, comparator, orientation)
}

pub fn canonical_orientation<T: Scalar>(sample: &TwoGroupSample<T>) -> TwoGroupSample<T> {
    sample.canonical()
}

/// Forces the convention 0.5 ≤ AUC ≤ 1.
pub fn auc_orient<T: Scalar>(auc: T) -> T {
    auc.max(T::one() - auc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint<T> {
    pub fpr: T,
    pub tpr: T,
    /// Cut-off inducing the point, when one exists.
    pub threshold: Option<T>,
}

impl<T: Scalar> RocPoint<T> {
    pub fn new(fpr: T, tpr: T) -> Self {
        Self {
            fpr,
            tpr,
            threshold: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Empirical,
    ParamBiexp,
    ParamBinorm,
    SemiBiexp,
    SemiBinorm,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Empirical,
        Method::ParamBiexp,
        Method::ParamBinorm,
        Method::SemiBiexp,
        Method::SemiBinorm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Empirical => "empirical",
            Method::ParamBiexp => "param-biexp",
            Method::ParamBinorm => "param-binorm",
            Method::SemiBiexp => "semi-biexp",
            Method::SemiBinorm => "semi-binorm",
        }
    }

    pub fn parse(name: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == name)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Axis along which a pointwise band is measured. Bands are vertical (TPR at
/// fixed FPR) for every estimator; a convention reflection turns them into
/// horizontal (FPR at fixed TPR) bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandAxis {
    Tpr,
    Fpr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandInterval<T> {
    pub lower: T,
    pub upper: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Band<T> {
    pub axis: BandAxis,
    pub intervals: Vec<BandInterval<T>>,
}

/// A materialized ROC curve: ordered points with an optional pointwise band.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurveEstimate<T> {
    points: Vec<RocPoint<T>>,
    band: Option<Band<T>>,
    method: Method,
    level: T,
}

impl<T: Scalar> RocCurveEstimate<T> {
    /// Checks ordering, endpoints, unit-square containment and band containment.
    pub fn new(
        points: Vec<RocPoint<T>>,
        band: Option<Band<T>>,
        method: Method,
        level: T,
    ) -> Result<Self> {
        let curve = Self {
            points,
            band,
            method,
            level,
        };
        curve.check()?;
        Ok(curve)
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(RocError::Validation(format!("invalid ROC curve: {msg}")));
        let (first, last) = match (self.points.first(), self.points.last()) {
            (Some(f), Some(l)) if self.points.len() >= 2 => (f, l),
            _ => return bad("needs at least two points"),
        };
        if first.fpr != T::zero() || first.tpr != T::zero() {
            return bad("first point must be (0,0)");
        }
        if last.fpr != T::one() || last.tpr != T::one() {
            return bad("last point must be (1,1)");
        }
        let unit = |v: T| v >= T::zero() && v <= T::one();
        for w in self.points.windows(2) {
            if w[1].fpr < w[0].fpr || w[1].tpr < w[0].tpr {
                return bad("points must be nondecreasing in fpr and tpr");
            }
        }
        if self.points.iter().any(|p| !unit(p.fpr) || !unit(p.tpr)) {
            return bad("coordinates must lie in [0,1]");
        }
        if !(self.level > T::zero() && self.level < T::one()) {
            return bad("level must lie in (0,1)");
        }
        if let Some(band) = &self.band {
            if band.intervals.len() != self.points.len() {
                return bad("band length differs from point count");
            }
            for (p, iv) in self.points.iter().zip(&band.intervals) {
                let v = match band.axis {
                    BandAxis::Tpr => p.tpr,
                    BandAxis::Fpr => p.fpr,
                };
                if !(unit(iv.lower) && unit(iv.upper) && iv.lower <= v && v <= iv.upper) {
                    return bad("band must contain the point estimate within [0,1]");
                }
            }
        }
        Ok(())
    }

    pub fn points(&self) -> &[RocPoint<T>] {
        &self.points
    }

    pub fn band(&self) -> Option<&Band<T>> {
        self.band.as_ref()
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn level(&self) -> T {
        self.level
    }

    /// Trapezoid-rule area under the polyline through the points.
    pub fn trapezoid_auc(&self) -> T {
        self.points
            .windows(2)
            .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) * T::of(0.5))
            .sum()
    }
}

/// Reflects a curve about y = 1 − x, the composite of a direction change
/// and a group swap: (x, y) ↦ (1 − y, 1 − x). Bands switch axis and their
/// endpoints map to (1 − upper, 1 − lower). An involution.
pub fn convention_reflect<T: Scalar>(curve: &RocCurveEstimate<T>) -> RocCurveEstimate<T> {
    let points = curve
        .points
        .iter()
        .rev()
        .map(|p| RocPoint {
            fpr: T::one() - p.tpr,
            tpr: T::one() - p.fpr,
            threshold: p.threshold,
        })
        .collect();
    let band = curve.band.as_ref().map(|b| Band {
        axis: match b.axis {
            BandAxis::Tpr => BandAxis::Fpr,
            BandAxis::Fpr => BandAxis::Tpr,
        },
        intervals: b
            .intervals
            .iter()
            .rev()
            .map(|iv| BandInterval {
                lower: T::one() - iv.upper,
                upper: T::one() - iv.lower,
            })
            .collect(),
    });
    RocCurveEstimate {
        points,
        band,
        method: curve.method,
        level: curve.level,
    }
}

/// Default evaluation grid: `k` equally spaced points strictly inside (0,1).
pub fn default_fpr_grid<T: Scalar>(k: usize) -> Vec<T> {
    let denom = T::of_usize(k + 1);
    (1..=k).map(|i| T::of_usize(i) / denom).collect()
}

pub const DEFAULT_GRID_POINTS: usize = 199;

/// Kind of null hypothesis a test addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullKind {
    /// H₀: AUC = 0.5.
    Weak,
    /// H₀: ROC(p) = p for all p.
    Strong,
}

impl NullKind {
    pub fn label(self) -> &'static str {
        match self {
            NullKind::Weak => "weak",
            NullKind::Strong => "strong",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult<T> {
    pub statistic: T,
    pub p_value: T,
    pub null_kind: NullKind,
    pub reference_distribution: String,
}

impl<T: Scalar> TestResult<T> {
    pub(crate) fn new(statistic: T, p_value: T, null_kind: NullKind, reference: &str) -> Self {
        Self {
            statistic,
            p_value: p_value.max(T::zero()).min(T::one()),
            null_kind,
            reference_distribution: reference.to_string(),
        }
    }

    /// The same test relabelled for the other null (used when one test
    /// addresses both, as with the exponential deviance).
    pub fn as_null(&self, null_kind: NullKind) -> Self {
        Self {
            null_kind,
            ..self.clone()
        }
    }
}
