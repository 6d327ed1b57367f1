use core::fmt;

use crate::model::Terminal;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A device parameter is outside its admissible range.
    InvalidConfig {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// Bath temperatures must be strictly positive and finite.
    InvalidTemperature { terminal: Terminal, value: f64 },
    /// A Bohr frequency at (or within the degeneracy tolerance of) zero.
    ZeroFrequency { omega: f64 },
    /// The active communicating class is reducible or numerically singular.
    NonUniqueSteadyState { state: usize },
    /// A solved population is negative beyond the clamp threshold.
    NegativePopulation { state: usize, value: f64 },
    /// Population vector that does not sum to one.
    NotNormalized { sum: f64 },
    /// RK4 step violates `dt * max|X_ii| < 0.1`.
    StepTooLarge { dt: f64, limit: f64 },
    /// A finite difference indistinguishable from round-off.
    StepTooSmall {
        terminal: Terminal,
        difference: f64,
        scale: f64,
    },
    /// Non-positive or non-finite step, or a stencil that leaves `T > 0`.
    InvalidStep { step: f64 },
    /// `|J(Δ)| + |J(-Δ)|` vanishes, so the rectification factor is 0/0.
    DegenerateRectification { forward: f64, reverse: f64 },
    /// Empty or inverted range.
    InvalidRange { start: f64, stop: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidConfig {
                field,
                value,
                reason,
            } => write!(f, "invalid device parameter {field} = {value}: {reason}"),
            Error::InvalidTemperature { terminal, value } => {
                write!(f, "invalid temperature T_{terminal} = {value}: must be positive and finite")
            }
            Error::ZeroFrequency { omega } => {
                write!(f, "Bohr frequency {omega} is degenerate with zero")
            }
            Error::NonUniqueSteadyState { state } => write!(
                f,
                "steady state is not unique: state {state} does not communicate with the rest of the active class"
            ),
            Error::NegativePopulation { state, value } => {
                write!(f, "population of state {state} is negative ({value})")
            }
            Error::NotNormalized { sum } => write!(f, "populations sum to {sum}, expected 1"),
            Error::StepTooLarge { dt, limit } => {
                write!(f, "time step {dt} exceeds the RK4 stability limit {limit}")
            }
            Error::StepTooSmall {
                terminal,
                difference,
                scale,
            } => write!(
                f,
                "finite difference of J_{terminal} ({difference}) is below round-off for |J| = {scale}"
            ),
            Error::InvalidStep { step } => write!(f, "invalid step {step}"),
            Error::DegenerateRectification { forward, reverse } => write!(
                f,
                "rectification undefined: |J(+)| = {forward}, |J(-)| = {reverse}"
            ),
            Error::InvalidRange { start, stop } => write!(f, "invalid range [{start}, {stop}]"),
        }
    }
}

impl core::error::Error for Error {}
