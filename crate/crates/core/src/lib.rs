//! Wasserstein complexity penalization priors.

pub mod catalog;
pub mod geometry;
pub mod golden;
pub mod inference;
pub mod multivariate;
pub mod quad;
pub mod roots;
pub mod numeric1d;
pub mod numeric2d;
pub mod special;
pub mod tv;
pub mod wasserstein;
pub mod univariate;
pub mod validation;
