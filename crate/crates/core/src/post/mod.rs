//! Wall heat fluxes, stream function and field export.

pub mod export;
pub mod nusselt;
pub mod stream;

pub use export::{export_fields, write_fields_csv, write_fields_vtk};
pub use nusselt::{
    energy_balance, energy_balance_with, global_nusselt, strictly_decreasing, strictly_increasing,
    variational_wall_flux, wall_flux, EnergyBalance, FluxMethod, NusseltReport, NusseltWeighting,
    ProfilePoint,
};
pub use stream::{stream_function, StreamFunctionField};
