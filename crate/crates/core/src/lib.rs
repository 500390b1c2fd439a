//! Numerical laboratory for self-shrinking submanifolds of Euclidean space.
//!
//! The crate evaluates the Gaussian-weighted area functional and its
//! relatives on exact and discretized surfaces satisfying `H = -X^N / 2`,
//! verifies the associated monotonicity and rescaling identities, and
//! computes the curvature-integral quantities that enter quantitative
//! rigidity statements for such surfaces.
//!
//! Everything numeric is generic over the scalar type (see [`scalar::Real`]);
//! the concrete aliases below fix `f64`, which is what the command-line tool
//! and the verification suite use.

pub mod catalog;
pub mod cones;
pub mod error;
pub mod functionals;
pub mod geom;
pub mod graphs;
pub mod moment;
pub mod monotonicity;
pub mod numerics;
pub mod regularity;
pub mod scalar;
pub mod testfn;

pub use error::{Error, Result};
pub use scalar::Real;

/// Default `f64` surface type.
pub type Surface = geom::ShrinkerSurface<f64>;
/// Default `f64` pointwise geometry record.
pub type Sample = geom::GeometrySample<f64>;
/// Default `f64` quadrature controls.
pub type Quadrature = geom::QuadratureSpec<f64>;
/// Default `f64` homogeneous test function.
pub type TestFunction = testfn::HomogeneousTestFunction<f64>;
/// Default `f64` monotone mass function.
pub type MassFunction = moment::MomentFunction<f64>;
/// Default `f64` annulus graph function.
pub type Graph = graphs::GraphFunction<f64>;
