//! Graphical shrinkers over exterior planar domains: the quasilinear graph
//! equation, decay-constant measurement, a damped Newton solver producing
//! shrinker-graph fixtures, and the rescaled backward-heat system checks.

pub mod function;
pub mod io;
pub mod newton;
pub mod rescaled;

pub use function::{DecayConstants, GraphFunction, HeightFn, InterpJet, StencilKind};
pub use newton::{solve_graph_shrinker, NewtonOptions, NewtonReport};
pub use rescaled::{rescaled_heat_check, HeatCheckOptions, HeatCheckReport};
