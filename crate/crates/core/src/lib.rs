//! Finite element solver for stationary natural convection of a Cu–Al₂O₃/water
//! hybrid nanofluid in square, L-shaped and H-shaped enclosures.

pub mod bench;
pub mod error;
pub mod fem;
pub mod mesh;
pub mod mms;
pub mod post;
pub mod properties;
pub mod solver;

pub use error::{Error, Result};
pub use fem::{DofMap, TemperatureBoundary};
pub use mesh::{build_mesh, BoundaryTag, GeometrySpec, Mesh, Shape};
pub use properties::{compute_ratios, MixtureSpec, PropertyRatios};
pub use solver::{solve_stationary, SolutionFields, SolveReport, SolverConfig};
