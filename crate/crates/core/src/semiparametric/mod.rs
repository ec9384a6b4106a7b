//! Placement-value regression of the ROC curve: the log-link biexponential
//! and probit binormal estimating equations over all (reference, comparator)
//! pairs, with bootstrap bands and Wald tests.

mod design;
mod inference;
mod solve;

pub use design::{build_pairwise_design, PairwiseDesign, MIN_USABLE_ROWS};
pub use inference::{semi_inference, SemiInference};
pub use solve::{
    fit_semi, fit_semi_binormal, fit_semi_binormal_from, fit_semi_biexponential,
    fit_semi_biexponential_from, refit_semi, semi_curve, SemiFamily, SemiFit, SemiParams,
    MAX_ITERATIONS, SCORE_TOLERANCE, STALL_TOLERANCE,
};

use crate::model::Method;

impl SemiFamily {
    pub fn method(self) -> Method {
        match self {
            SemiFamily::Biexp => Method::SemiBiexp,
            SemiFamily::Binorm => Method::SemiBinorm,
        }
    }
}
