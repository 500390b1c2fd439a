//! Immersed submanifolds and their pointwise geometry, quadrature, boundary
//! integration, residuals and refinement.

pub mod boundary;
pub mod fit;
pub mod io;
pub mod quad;
pub mod refine;
pub mod residual;
pub mod sample;
pub mod surface;

pub use quad::{Integral, QuadratureSpec, Region, Weighting};
pub use refine::Refined;
pub use residual::{DriftResidual, ShrinkerResidual};
pub use sample::GeometrySample;
pub use surface::{Location, Projection, ShrinkerSurface, SurfaceKind};
