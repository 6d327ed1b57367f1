//! Heat currents.
//!
//! A current is positive when energy flows from the bath into the device.
//! Each transition contributes `𝒥 = ω Γ` with the net upward flux
//! `Γ = γ(-ω) P_from - γ(ω) P_to`; a terminal total sums every transition of
//! that terminal, all three qutrit levels included for both `L` and `R`.

use alloc::vec::Vec;

use crate::error::Result;
use crate::kinetics::{generator, steady_state, Generator, PopulationVector};
use crate::model::{BathTemperatures, DeviceConfig, PerTerminal, Terminal, Transition};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionCurrent {
    pub transition: Transition,
    /// Net jumps per unit time from `from` to `to`.
    pub flux: f64,
    /// `bohr * flux`.
    pub current: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurrentReport {
    pub populations: PopulationVector,
    /// One entry per non-inert catalog transition, in catalog order.
    pub transitions: Vec<TransitionCurrent>,
    pub totals: PerTerminal<f64>,
}

impl CurrentReport {
    pub fn total(&self, terminal: Terminal) -> f64 {
        self.totals[terminal]
    }

    /// `J_L + J_M + J_R`.
    pub fn balance(&self) -> f64 {
        self.totals.l + self.totals.m + self.totals.r
    }

    /// `|J_L + J_M + J_R| / max|J_α|`, zero when every current vanishes.
    pub fn relative_imbalance(&self) -> f64 {
        let scale = self
            .totals
            .to_array()
            .iter()
            .fold(0.0, |m: f64, j| m.max(j.abs()));
        if scale == 0.0 {
            0.0
        } else {
            self.balance().abs() / scale
        }
    }

    pub fn terminal(&self, terminal: Terminal) -> impl Iterator<Item = &TransitionCurrent> {
        self.transitions
            .iter()
            .filter(move |c| c.transition.terminal == terminal)
    }
}

/// Currents carried by the links of `gen` at populations `p`.
pub fn currents_from_generator(p: &PopulationVector, gen: &Generator) -> CurrentReport {
    let mut totals = PerTerminal::splat(0.0);
    let transitions = gen
        .links()
        .iter()
        .map(|link| {
            let t = link.transition;
            let flux = link.upward * p.get(t.from) - link.downward * p.get(t.to);
            let current = t.bohr * flux;
            totals[t.terminal] += current;
            TransitionCurrent {
                transition: t,
                flux,
                current,
            }
        })
        .collect();
    CurrentReport {
        populations: *p,
        transitions,
        totals,
    }
}

/// Currents for arbitrary populations.
pub fn transition_currents(
    p: &PopulationVector,
    cfg: &DeviceConfig,
    temps: &BathTemperatures,
) -> Result<CurrentReport> {
    Ok(currents_from_generator(p, &generator(cfg, temps)?))
}

/// Solves for the steady state and returns its currents.
pub fn terminal_currents(cfg: &DeviceConfig, temps: &BathTemperatures) -> Result<CurrentReport> {
    let gen = generator(cfg, temps)?;
    let p = steady_state(&gen)?;
    Ok(currents_from_generator(&p, &gen))
}
