//! Case runner, parameter sweeps, grid studies and table reproduction behind
//! the command-line front end.

pub mod case;
pub mod config;
pub mod sweep;
pub mod tables;

pub use case::{run_case, CaseOutcome, PreparedCase};
pub use config::{BenchConfig, CaseConfig, MmsSettings, OutputSelection, SweepAxes};
pub use sweep::{relative_change, run_grid_study, run_sweep, GridStudy, MonotonicityCheck, SweepTable};
pub use tables::{reproduce_tables, table_spec, TableReport, TableRow, TABLE_IDS};
