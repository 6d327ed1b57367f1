//! Scenario files, parameter sweeps and CSV output for the `qtt` command line.
//!
//! A [`Scenario`] names a device, base temperatures, one or two sweep axes and
//! the merits to compute; [`run_sweep`] evaluates the grid in parallel and
//! [`write_csv`] serializes it deterministically.

pub mod figures;
pub mod output;
pub mod scenario;
pub mod summary;
pub mod sweep;

pub use output::write_csv;
pub use scenario::{load_scenario, load_scenario_file, Scenario, ScenarioError};
pub use sweep::{run_sweep, SweepRow};
