//! Special functions, quadrature and reproducible random streams.

pub mod quadrature;
pub mod rng;
pub mod special;

pub use quadrature::integrate_unit_interval;
pub use rng::{derive_seed, RngStream};
pub use special::{
    chi2_sf, erf, erfc, inc_beta, kolmogorov_sf, ln_gamma, normal_cdf, normal_pdf,
    normal_quantile, normal_quantile_unchecked, t_cdf, t_quantile, t_two_sided,
};
