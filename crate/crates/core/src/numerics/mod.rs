//! Shared numerical kernels: deterministic reductions, quadrature rules and
//! the small dense / banded linear algebra the fitting and solver code needs.

pub mod band;
pub mod gauss;
pub mod linalg;
pub mod simpson;
pub mod sum;

pub use gauss::GaussLegendre;
pub use simpson::adaptive_simpson;
pub use sum::CompensatedSum;
