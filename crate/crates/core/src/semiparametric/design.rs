use crate::empirical::sorted_copy;
use crate::error::{Result, RocError};
use crate::model::TwoGroupSample;
use crate::Scalar;

/// Minimum number of reference rows left after masking.
pub const MIN_USABLE_ROWS: usize = 3;

/// Placement values and pairwise indicators U(i, j) = I(Y₁ⱼ ≤ Y₀ᵢ).
///
/// The placement p̂ᵢ = 𝔽₀(Y₀ᵢ) is constant along a row, so rows are stored
/// as (placement count, row sum of U) rather than as an n₀×n₁ matrix. Rows
/// with p̂ᵢ = 1 are masked.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseDesign<T> {
    reference: Vec<T>,
    comparator: Vec<T>,
    placement_count: Vec<usize>,
    successes: Vec<usize>,
    included: Vec<bool>,
}

impl<T: Scalar> PairwiseDesign<T> {
    pub fn new(sample: &TwoGroupSample<T>) -> Result<Self> {
        let s = sample.canonical();
        let sorted0 = sorted_copy(s.reference());
        let sorted1 = sorted_copy(s.comparator());
        let n0 = s.n0();
        let mut placement_count = Vec::with_capacity(n0);
        let mut successes = Vec::with_capacity(n0);
        let mut included = Vec::with_capacity(n0);
        for &y in s.reference() {
            let c = sorted0.partition_point(|&v| v <= y);
            placement_count.push(c);
            successes.push(sorted1.partition_point(|&v| v <= y));
            included.push(c < n0);
        }
        let usable = included.iter().filter(|&&b| b).count();
        if usable < MIN_USABLE_ROWS {
            return Err(RocError::InsufficientData(format!(
                "{usable} usable reference rows after masking the maximum; \
                 at least {MIN_USABLE_ROWS} are required"
            )));
        }
        Ok(Self {
            reference: s.reference().to_vec(),
            comparator: s.comparator().to_vec(),
            placement_count,
            successes,
            included,
        })
    }

    pub fn n0(&self) -> usize {
        self.reference.len()
    }

    pub fn n1(&self) -> usize {
        self.comparator.len()
    }

    /// p̂ᵢ = #{Y₀ₖ ≤ Y₀ᵢ}/n₀.
    pub fn placement(&self, i: usize) -> T {
        T::of_usize(self.placement_count[i]) / T::of_usize(self.n0())
    }

    pub fn placement_count(&self, i: usize) -> usize {
        self.placement_count[i]
    }

    pub fn indicator(&self, i: usize, j: usize) -> bool {
        self.comparator[j] <= self.reference[i]
    }

    /// Σⱼ U(i, j).
    pub fn row_successes(&self, i: usize) -> usize {
        self.successes[i]
    }

    pub fn is_included(&self, i: usize) -> bool {
        self.included[i]
    }

    pub fn usable_rows(&self) -> usize {
        self.included.iter().filter(|&&b| b).count()
    }

    pub fn masked_rows(&self) -> usize {
        self.n0() - self.usable_rows()
    }

    pub fn usable_pairs(&self) -> usize {
        self.usable_rows() * self.n1()
    }

    /// (placement count, row successes) for every unmasked row.
    pub(crate) fn rows(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n0())
            .filter(|&i| self.included[i])
            .map(|i| (self.placement_count[i], self.successes[i]))
    }
}

pub fn build_pairwise_design<T: Scalar>(sample: &TwoGroupSample<T>) -> Result<PairwiseDesign<T>> {
    PairwiseDesign::new(sample)
}
