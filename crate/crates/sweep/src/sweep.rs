//! Grid evaluation.
//!
//! Every point is a pure function of the scenario and its coordinates, so
//! points are spread over a rayon pool and collected back in grid order.

use qtt_core::energetics::currents_from_generator;
use qtt_core::kinetics::{generator, steady_state};
use qtt_core::merits::{rectification, sensitivities, Amplification, RectificationPoint};
use qtt_core::model::{transition_catalog, validate, STATE_COUNT};
use qtt_core::{Error, PerTerminal};
use rayon::prelude::*;

use crate::scenario::{Scenario, Variable};

/// Number of catalog transitions, inert ones included.
pub const TRANSITION_COUNT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Validity {
    pub secular_ok: bool,
    pub weak_coupling_ok: bool,
    pub degenerate: bool,
    pub conventional_gradient: bool,
    pub min_gap_separation: f64,
    pub max_decay_rate: f64,
}

/// Everything computed at one grid point; fields are `Some` exactly when the
/// scenario asked for them.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RowData {
    pub populations: Option<[f64; STATE_COUNT]>,
    pub currents: Option<PerTerminal<f64>>,
    /// `|J_L + J_M + J_R| / max|J_α|`, reported alongside the currents.
    pub imbalance: Option<f64>,
    /// Per-transition currents in catalog order; inert entries are zero.
    pub transitions: Option<[f64; TRANSITION_COUNT]>,
    pub sensitivity: Option<PerTerminal<f64>>,
    pub amplification: Option<Amplification>,
    pub validity: Option<Validity>,
    pub rectification: Option<RectificationPoint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    /// Outer coordinate, when the grid is 2-D.
    pub second: Option<f64>,
    pub value: f64,
    pub outcome: Result<RowData, Error>,
}

impl SweepRow {
    pub fn data(&self) -> Option<&RowData> {
        self.outcome.as_ref().ok()
    }
}

/// `(second, value)` pairs in row-major order, outer axis slowest.
pub fn points(scenario: &Scenario) -> Vec<(Option<f64>, f64)> {
    let inner: Vec<f64> = scenario.sweep.values().collect();
    match &scenario.second {
        None => inner.into_iter().map(|v| (None, v)).collect(),
        Some(outer) => outer
            .values()
            .flat_map(|o| inner.iter().map(move |&v| (Some(o), v)))
            .collect(),
    }
}

/// Evaluates one grid point.
pub fn evaluate(scenario: &Scenario, second: Option<f64>, value: f64) -> Result<RowData, Error> {
    let mut cfg = scenario.device;
    let mut temps = scenario.temperatures;
    let mut gradient = None;
    let axes = scenario
        .second
        .as_ref()
        .zip(second)
        .map(|(axis, v)| (axis.variable, v))
        .into_iter()
        .chain([(scenario.sweep.variable, value)]);
    for (variable, v) in axes {
        if variable == Variable::Gradient {
            gradient = Some(v);
        } else {
            variable.apply(v, &mut cfg, &mut temps);
        }
    }

    let merits = &scenario.merits;
    let mut row = RowData::default();
    if let (Some(delta), Some(mode)) = (gradient, scenario.rectification) {
        row.rectification = Some(rectification(&cfg, mode, temps.t_r, delta)?);
        return Ok(row);
    }

    let gen = generator(&cfg, &temps)?;
    let p = steady_state(&gen)?;
    let report = currents_from_generator(&p, &gen);
    if merits.populations {
        row.populations = Some(*p.as_array());
    }
    if merits.currents {
        row.currents = Some(report.totals);
        row.imbalance = Some(report.relative_imbalance());
    }
    if merits.transitions {
        let mut out = [0.0; TRANSITION_COUNT];
        for (slot, t) in out.iter_mut().zip(transition_catalog(&cfg)) {
            if let Some(c) = report.transitions.iter().find(|c| {
                c.transition.terminal == t.terminal
                    && c.transition.from == t.from
                    && c.transition.to == t.to
            }) {
                *slot = c.current;
            }
        }
        row.transitions = Some(out);
    }
    if merits.sensitivity || merits.amplification {
        let s = sensitivities(&cfg, &temps, scenario.sensitivity_step)?;
        if merits.sensitivity {
            row.sensitivity = Some(s.values);
        }
        if merits.amplification {
            row.amplification = Some(Amplification::from_sensitivities(s.values));
        }
    }
    if merits.validity {
        let checks = validate(&cfg, &temps);
        row.validity = Some(Validity {
            secular_ok: checks.secular_ok,
            weak_coupling_ok: checks.weak_coupling_ok,
            degenerate: checks.is_degenerate(),
            conventional_gradient: checks.conventional_gradient,
            min_gap_separation: checks.min_gap_separation,
            max_decay_rate: checks.max_decay_rate,
        });
    }
    Ok(row)
}

/// Runs every grid point. `threads = None` uses rayon's global pool.
pub fn run_sweep(
    scenario: &Scenario,
    threads: Option<usize>,
) -> Result<Vec<SweepRow>, rayon::ThreadPoolBuildError> {
    let grid = points(scenario);
    let work = || {
        grid.par_iter()
            .map(|&(second, value)| SweepRow {
                second,
                value,
                outcome: evaluate(scenario, second, value),
            })
            .collect()
    };
    match threads {
        None => Ok(work()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(work)),
    }
}

/// Short machine-readable tag for the `status` column.
pub fn error_code(error: &Error) -> &'static str {
    match error {
        Error::InvalidConfig { .. } => "invalid_config",
        Error::InvalidTemperature { .. } => "invalid_temperature",
        Error::ZeroFrequency { .. } => "zero_frequency",
        Error::NonUniqueSteadyState { .. } => "non_unique_steady_state",
        Error::NegativePopulation { .. } => "negative_population",
        Error::NotNormalized { .. } => "not_normalized",
        Error::StepTooLarge { .. } => "step_too_large",
        Error::StepTooSmall { .. } => "step_too_small",
        Error::InvalidStep { .. } => "invalid_step",
        Error::DegenerateRectification { .. } => "degenerate_rectification",
        Error::InvalidRange { .. } => "invalid_range",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::load_scenario;

    #[test]
    fn grid_is_row_major_in_outer_axis() {
        let s = load_scenario(
            r#"{"sweep": {"variable": "T_M", "values": [1, 2, 3]},
                "second": {"variable": "delta", "values": [4, 5]}}"#,
        )
        .unwrap();
        let pts = points(&s);
        assert_eq!(
            pts,
            [
                (Some(4.0), 1.0),
                (Some(4.0), 2.0),
                (Some(4.0), 3.0),
                (Some(5.0), 1.0),
                (Some(5.0), 2.0),
                (Some(5.0), 3.0)
            ]
        );
    }

    #[test]
    fn failing_points_do_not_abort() {
        // T_M = 0.005 leaves no room for the stencil; T_M = -1 is not a temperature
        let s =
            load_scenario(r#"{"sweep": {"variable": "T_M", "values": [-1, 0.005, 5]}}"#).unwrap();
        let rows = run_sweep(&s, Some(2)).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(matches!(
            rows[0].outcome,
            Err(Error::InvalidTemperature { .. })
        ));
        assert!(matches!(rows[1].outcome, Err(Error::InvalidStep { .. })));
        assert!(rows[2].outcome.is_ok());
    }

    #[test]
    fn inert_transitions_report_zero() {
        let s = load_scenario(
            r#"{"device": {"nu_02": 0, "nu_12": 0},
                "sweep": {"variable": "T_M", "values": [5]},
                "merits": ["transitions", "currents"]}"#,
        )
        .unwrap();
        let row = evaluate(&s, None, 5.0).unwrap();
        let t = row.transitions.unwrap();
        // middle block: channel 01 at 6..10, 02 at 10..14, 12 at 14..18
        assert!(t[6..10].iter().all(|&x| x != 0.0));
        assert!(t[10..18].iter().all(|&x| x == 0.0));
        let m: f64 = t[6..18].iter().sum();
        assert!((m - row.currents.unwrap().m).abs() <= 1e-20);
    }
}
