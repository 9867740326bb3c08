//! Taylor–Hood P2/P1 discretization: quadrature, bases, dof numbering and assembly.

pub mod assembly;
pub mod dofs;
pub mod element;
pub mod newton;
pub mod quadrature;
pub mod sparse;

pub use assembly::{assemble_convection, assemble_linear_forms, assemble_thermal_advection, LinearForms};
pub use dofs::{DofMap, SystemLayout, TemperatureBoundary};
pub use newton::{assemble_newton_system, AssembledSystem, BlockNorms, Forcing, Linearization, NewtonAssembler, Physics};
pub use quadrature::QuadratureRule;
pub use sparse::SparseTriplets;
