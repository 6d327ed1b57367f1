//! Scenario documents shipped with the binary.

use crate::scenario::{load_scenario, Scenario, ScenarioError};

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../scenarios/", $name, ".json")))),*]
    };
}

/// `(name, JSON document)` for every bundled scenario.
pub const FIGURES: &[(&str, &str)] = bundled![
    "transistor",
    "transition_currents",
    "stabilizer_tm",
    "stabilizer_tr",
    "detuning_window",
    "detuning_snapshots",
    "switch",
    "recurrence_window",
    "recurrence_currents",
    "rectification_fixed_left",
    "rectification_mean_2",
    "rectification_mean_5",
    "rectification_symmetric",
    "high_temperature",
    "qubit_analog",
    "qubit_omega_window",
    "coupling_chi01",
    "coupling_chi02",
    "coupling_chi12",
];

pub fn names() -> impl Iterator<Item = &'static str> {
    FIGURES.iter().map(|(name, _)| *name)
}

pub fn document(name: &str) -> Option<&'static str> {
    FIGURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, doc)| *doc)
}

/// Loads a bundled scenario; `None` for an unknown name.
pub fn figure(name: &str) -> Option<Result<Scenario, ScenarioError>> {
    document(name).map(load_scenario)
}
