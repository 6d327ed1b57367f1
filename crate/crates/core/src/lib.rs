//! Steady-state thermodynamics of a qubit–qutrit–qubit quantum thermal transistor.
//!
//! Two two-level systems (terminals `L` and `R`) couple longitudinally to a
//! qutrit (terminal `M`); each subsystem talks to its own bosonic bath with an
//! Ohmic spectral density. The coupled Hamiltonian is diagonal in the product
//! basis, so the global master equation reduces to a 12-state continuous-time
//! Markov chain over the populations.
//!
//! Module map:
//!
//! - [`model`]: device parameters, closed-form spectrum, Bohr frequencies,
//!   the catalog of bath-induced transitions and working-hypothesis checks.
//! - [`bath`]: spectral density, Bose occupation and decay rates.
//! - [`kinetics`]: rate generator, steady-state solvers and RK4 transients.
//! - [`energetics`]: per-transition and per-terminal heat currents.
//! - [`merits`]: sensitivity, amplification, rectification, switch points and
//!   stabilizer statistics.
//! - [`grid`]: inclusive 1-D grids shared by the merit scans and sweeps.
//!
//! Units follow `ħ = k_B = 1`. The crate is `no_std` and only needs `alloc`.
//!
//! ```
//! use qtt_core::{energetics, BathTemperatures, DeviceConfig, Terminal};
//!
//! let cfg = DeviceConfig::default();
//! let temps = BathTemperatures::new(10.0, 5.0, 0.2).unwrap();
//! let report = energetics::terminal_currents(&cfg, &temps).unwrap();
//! assert!(report.total(Terminal::L) > 0.0);
//! assert!(report.relative_imbalance() < 1e-10);
//! ```
#![cfg_attr(not(test), no_std)]
// NaN must fail range checks, hence `!(x > y)`; index loops read best in the matrix code
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod bath;
pub mod energetics;
mod error;
pub mod grid;
pub mod kinetics;
mod math;
pub mod merits;
pub mod model;

pub use error::{Error, Result};
pub use grid::Grid;
pub use kinetics::{Generator, PopulationVector};
pub use model::{
    BasisState, BathTemperatures, Channel, Channels, DeviceConfig, Level, PerTerminal, Spin,
    Terminal, Transition,
};
