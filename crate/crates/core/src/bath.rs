//! Ohmic baths: spectral density, Bose occupation and decay rates.

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::{exp, expm1};
use crate::model::{BathTemperatures, DeviceConfig, Terminal, DEGENERACY_TOL};

/// Rate `γ^α_ω` of a jump with Bohr frequency `ω` into bath `α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayRate {
    pub terminal: Terminal,
    pub bohr: f64,
    pub rate: f64,
}

/// `J(ξ) = ξ exp(-ξ/κ) / 2π`.
pub fn spectral_density(xi: f64, kappa: f64) -> f64 {
    xi * exp(-xi / kappa) / (2.0 * PI)
}

/// Bose–Einstein occupation `1 / (exp(ξ/T) - 1)`; negative for `ξ < 0`.
pub fn occupation(xi: f64, temperature: f64) -> Result<f64> {
    if xi == 0.0 {
        return Err(Error::ZeroFrequency { omega: xi });
    }
    Ok(1.0 / expm1(xi / temperature))
}

/// `γ_ω = μ² ω exp(-|ω|/κ) (1 + N̄(ω))`.
///
/// Written as `|ω| e^{-|ω|/κ} / (1 - e^{-β|ω|})` for emission and
/// `|ω| e^{-|ω|/κ} / (e^{β|ω|} - 1)` for absorption, which stays accurate at
/// both small `β|ω|` and very low temperature.
pub fn decay_rate(
    omega: f64,
    terminal: Terminal,
    cfg: &DeviceConfig,
    temps: &BathTemperatures,
) -> Result<DecayRate> {
    if !(omega.abs() > DEGENERACY_TOL) {
        return Err(Error::ZeroFrequency { omega });
    }
    let mu = cfg.mu[terminal];
    let magnitude = omega.abs();
    let x = magnitude / temps.get(terminal);
    let thermal = if omega > 0.0 {
        magnitude / -expm1(-x)
    } else {
        magnitude / expm1(x)
    };
    Ok(DecayRate {
        terminal,
        bohr: omega,
        rate: mu * mu * exp(-magnitude / cfg.kappa[terminal]) * thermal,
    })
}
