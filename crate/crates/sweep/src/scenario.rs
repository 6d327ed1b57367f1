//! Scenario documents: JSON in, validated [`Scenario`] out.
//!
//! See `docs/scenario.md` for the field-by-field schema.

use std::fmt;
use std::path::{Path, PathBuf};

use qtt_core::merits::{RectificationMode, DEFAULT_STEP};
use qtt_core::{BathTemperatures, DeviceConfig, Grid};
use serde::Deserialize;

/// The only schema version this build reads.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn invalid(field: impl Into<String>, message: impl fmt::Display) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.into(),
        message: message.to_string(),
    }
}

/// A quantity that a sweep axis can drive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
pub enum Variable {
    #[serde(rename = "T_L")]
    TempLeft,
    #[serde(rename = "T_M")]
    TempMiddle,
    #[serde(rename = "T_R")]
    TempRight,
    /// Rectification gradient `T_M - T_L`.
    #[serde(rename = "Delta")]
    Gradient,
    #[serde(rename = "delta")]
    Detuning,
    #[serde(rename = "Omega")]
    QutritGap,
    #[serde(rename = "omega_L")]
    LeftGap,
    #[serde(rename = "omega_R")]
    RightGap,
    #[serde(rename = "chi_L_01")]
    ChiL01,
    #[serde(rename = "chi_L_02")]
    ChiL02,
    #[serde(rename = "chi_L_12")]
    ChiL12,
    #[serde(rename = "chi_R_01")]
    ChiR01,
    #[serde(rename = "chi_R_02")]
    ChiR02,
    #[serde(rename = "chi_R_12")]
    ChiR12,
    #[serde(rename = "nu_01")]
    Nu01,
    #[serde(rename = "nu_02")]
    Nu02,
    #[serde(rename = "nu_12")]
    Nu12,
}

impl Variable {
    /// Column header and schema spelling.
    pub fn name(self) -> &'static str {
        match self {
            Variable::TempLeft => "T_L",
            Variable::TempMiddle => "T_M",
            Variable::TempRight => "T_R",
            Variable::Gradient => "Delta",
            Variable::Detuning => "delta",
            Variable::QutritGap => "Omega",
            Variable::LeftGap => "omega_L",
            Variable::RightGap => "omega_R",
            Variable::ChiL01 => "chi_L_01",
            Variable::ChiL02 => "chi_L_02",
            Variable::ChiL12 => "chi_L_12",
            Variable::ChiR01 => "chi_R_01",
            Variable::ChiR02 => "chi_R_02",
            Variable::ChiR12 => "chi_R_12",
            Variable::Nu01 => "nu_01",
            Variable::Nu02 => "nu_02",
            Variable::Nu12 => "nu_12",
        }
    }

    /// Writes `value` into the device or temperatures. The gradient is not
    /// a stored quantity and is handled by the rectification path.
    pub fn apply(self, value: f64, cfg: &mut DeviceConfig, temps: &mut BathTemperatures) {
        match self {
            Variable::TempLeft => temps.t_l = value,
            Variable::TempMiddle => temps.t_m = value,
            Variable::TempRight => temps.t_r = value,
            Variable::Gradient => {}
            Variable::Detuning => cfg.delta = value,
            Variable::QutritGap => cfg.big_omega = value,
            Variable::LeftGap => cfg.omega_l = value,
            Variable::RightGap => cfg.omega_r = value,
            Variable::ChiL01 => cfg.chi_l.c01 = value,
            Variable::ChiL02 => cfg.chi_l.c02 = value,
            Variable::ChiL12 => cfg.chi_l.c12 = value,
            Variable::ChiR01 => cfg.chi_r.c01 = value,
            Variable::ChiR02 => cfg.chi_r.c02 = value,
            Variable::ChiR12 => cfg.chi_r.c12 = value,
            Variable::Nu01 => cfg.nu.c01 = value,
            Variable::Nu02 => cfg.nu.c02 = value,
            Variable::Nu12 => cfg.nu.c12 = value,
        }
    }
}

/// Output column groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Merit {
    Populations,
    Currents,
    Transitions,
    Sensitivity,
    Amplification,
    Validity,
    Rectification,
}

/// Requested merits, in canonical column order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MeritSet {
    pub populations: bool,
    pub currents: bool,
    pub transitions: bool,
    pub sensitivity: bool,
    pub amplification: bool,
    pub validity: bool,
    pub rectification: bool,
}

impl MeritSet {
    fn from_list(list: &[Merit]) -> Self {
        let mut set = MeritSet::default();
        for merit in list {
            match merit {
                Merit::Populations => set.populations = true,
                Merit::Currents => set.currents = true,
                Merit::Transitions => set.transitions = true,
                Merit::Sensitivity => set.sensitivity = true,
                Merit::Amplification => set.amplification = true,
                Merit::Validity => set.validity = true,
                Merit::Rectification => set.rectification = true,
            }
        }
        set
    }

    fn steady(&self) -> bool {
        self.populations
            || self.currents
            || self.transitions
            || self.sensitivity
            || self.amplification
            || self.validity
    }
}

/// Points along one sweep axis.
#[derive(Clone, Debug, PartialEq)]
pub enum AxisPoints {
    Range(Grid),
    Values(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub variable: Variable,
    pub points: AxisPoints,
}

impl Axis {
    pub fn len(&self) -> usize {
        match &self.points {
            AxisPoints::Range(grid) => grid.len(),
            AxisPoints::Values(values) => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, i: usize) -> f64 {
        match &self.points {
            AxisPoints::Range(grid) => grid.value(i),
            AxisPoints::Values(values) => values[i],
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.value(i))
    }

    /// Replaces the step of a range axis; explicit value lists are kept.
    pub fn with_step(&self, step: f64) -> Result<Axis, ScenarioError> {
        match &self.points {
            AxisPoints::Range(grid) => Ok(Axis {
                variable: self.variable,
                points: AxisPoints::Range(
                    Grid::new(grid.start(), grid.stop(), step)
                        .map_err(|e| invalid("--step-override", e))?,
                ),
            }),
            AxisPoints::Values(_) => Ok(self.clone()),
        }
    }
}

/// A fully validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub device: DeviceConfig,
    pub temperatures: BathTemperatures,
    /// Inner (fastest-varying) axis.
    pub sweep: Axis,
    /// Optional outer axis for 2-D grids.
    pub second: Option<Axis>,
    pub merits: MeritSet,
    pub sensitivity_step: f64,
    pub rectification: Option<RectificationMode>,
    pub output: Option<PathBuf>,
}

impl Scenario {
    /// `true` when rows are rectification points rather than steady states.
    pub fn is_rectification(&self) -> bool {
        self.merits.rectification
    }

    pub fn point_count(&self) -> usize {
        self.sweep.len() * self.second.as_ref().map_or(1, Axis::len)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    schema_version: Option<u32>,
    name: Option<String>,
    description: Option<String>,
    #[serde(default)]
    device: DeviceDoc,
    #[serde(default)]
    temperatures: TemperatureDoc,
    sweep: AxisDoc,
    second: Option<AxisDoc>,
    merits: Option<Vec<Merit>>,
    sensitivity_step: Option<f64>,
    rectification: Option<RectificationDoc>,
    output: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeviceDoc {
    #[serde(rename = "omega_L")]
    omega_l: Option<f64>,
    #[serde(rename = "omega_R")]
    omega_r: Option<f64>,
    #[serde(rename = "Omega")]
    big_omega: Option<f64>,
    delta: Option<f64>,
    #[serde(rename = "chi_L_01")]
    chi_l_01: Option<f64>,
    #[serde(rename = "chi_L_02")]
    chi_l_02: Option<f64>,
    #[serde(rename = "chi_L_12")]
    chi_l_12: Option<f64>,
    #[serde(rename = "chi_R_01")]
    chi_r_01: Option<f64>,
    #[serde(rename = "chi_R_02")]
    chi_r_02: Option<f64>,
    #[serde(rename = "chi_R_12")]
    chi_r_12: Option<f64>,
    nu_01: Option<f64>,
    nu_02: Option<f64>,
    nu_12: Option<f64>,
    #[serde(rename = "mu_L")]
    mu_l: Option<f64>,
    #[serde(rename = "mu_M")]
    mu_m: Option<f64>,
    #[serde(rename = "mu_R")]
    mu_r: Option<f64>,
    #[serde(rename = "kappa_L")]
    kappa_l: Option<f64>,
    #[serde(rename = "kappa_M")]
    kappa_m: Option<f64>,
    #[serde(rename = "kappa_R")]
    kappa_r: Option<f64>,
}

impl DeviceDoc {
    fn build(&self) -> DeviceConfig {
        let mut cfg = DeviceConfig::reference();
        let slots: [(Option<f64>, &mut f64); 19] = [
            (self.omega_l, &mut cfg.omega_l),
            (self.omega_r, &mut cfg.omega_r),
            (self.big_omega, &mut cfg.big_omega),
            (self.delta, &mut cfg.delta),
            (self.chi_l_01, &mut cfg.chi_l.c01),
            (self.chi_l_02, &mut cfg.chi_l.c02),
            (self.chi_l_12, &mut cfg.chi_l.c12),
            (self.chi_r_01, &mut cfg.chi_r.c01),
            (self.chi_r_02, &mut cfg.chi_r.c02),
            (self.chi_r_12, &mut cfg.chi_r.c12),
            (self.nu_01, &mut cfg.nu.c01),
            (self.nu_02, &mut cfg.nu.c02),
            (self.nu_12, &mut cfg.nu.c12),
            (self.mu_l, &mut cfg.mu.l),
            (self.mu_m, &mut cfg.mu.m),
            (self.mu_r, &mut cfg.mu.r),
            (self.kappa_l, &mut cfg.kappa.l),
            (self.kappa_m, &mut cfg.kappa.m),
            (self.kappa_r, &mut cfg.kappa.r),
        ];
        for (value, slot) in slots {
            if let Some(v) = value {
                *slot = v;
            }
        }
        cfg
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TemperatureDoc {
    #[serde(rename = "T_L", default = "default_t_l")]
    t_l: f64,
    #[serde(rename = "T_M", default = "default_t_m")]
    t_m: f64,
    #[serde(rename = "T_R", default = "default_t_r")]
    t_r: f64,
}

fn default_t_l() -> f64 {
    10.0
}

fn default_t_m() -> f64 {
    5.0
}

fn default_t_r() -> f64 {
    0.2
}

impl Default for TemperatureDoc {
    fn default() -> Self {
        TemperatureDoc {
            t_l: default_t_l(),
            t_m: default_t_m(),
            t_r: default_t_r(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisDoc {
    variable: Variable,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
    values: Option<Vec<f64>>,
}

impl AxisDoc {
    fn build(&self, field: &str) -> Result<Axis, ScenarioError> {
        let points = match (self.start, self.stop, self.step, &self.values) {
            (None, None, None, Some(values)) => {
                if values.is_empty() {
                    return Err(invalid(format!("{field}.values"), "must not be empty"));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(invalid(format!("{field}.values"), "must be finite"));
                }
                AxisPoints::Values(values.clone())
            }
            (Some(start), Some(stop), Some(step), None) => {
                if !(step > 0.0 && step.is_finite()) {
                    return Err(invalid(format!("{field}.step"), "must be positive"));
                }
                if start.partial_cmp(&stop) != Some(std::cmp::Ordering::Less) {
                    return Err(invalid(
                        format!("{field}.start"),
                        format!("start ({start}) must be below stop ({stop})"),
                    ));
                }
                AxisPoints::Range(Grid::new(start, stop, step).map_err(|e| invalid(field, e))?)
            }
            _ => {
                return Err(invalid(
                    field,
                    "give either start, stop and step, or a values list",
                ))
            }
        };
        Ok(Axis {
            variable: self.variable,
            points,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RectificationDoc {
    mode: RectificationKind,
    anchor: f64,
}

#[derive(Clone, Copy, Deserialize)]
enum RectificationKind {
    #[serde(rename = "fixed_TL")]
    FixedLeft,
    #[serde(rename = "fixed_mean")]
    FixedMean,
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: Document = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        ScenarioError::Parse {
            path: if path == "." { "document".into() } else { path },
            message: e.into_inner().to_string(),
        }
    })?;
    build(doc)
}

pub fn load_scenario_file(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_scenario(&text)
}

fn build(doc: Document) -> Result<Scenario, ScenarioError> {
    let version = doc.schema_version.unwrap_or(SCHEMA_VERSION);
    if version != SCHEMA_VERSION {
        return Err(invalid(
            "schema_version",
            format!("unsupported version {version}, expected {SCHEMA_VERSION}"),
        ));
    }

    let device = doc.device.build();
    device.validate().map_err(|e| invalid("device", e))?;
    let t = &doc.temperatures;
    let temperatures =
        BathTemperatures::new(t.t_l, t.t_m, t.t_r).map_err(|e| invalid("temperatures", e))?;

    let sweep = doc.sweep.build("sweep")?;
    let second = doc.second.as_ref().map(|a| a.build("second")).transpose()?;
    if second
        .as_ref()
        .is_some_and(|s| s.variable == sweep.variable)
    {
        return Err(invalid(
            "second.variable",
            "must differ from sweep.variable",
        ));
    }

    let gradient = sweep.variable == Variable::Gradient
        || second
            .as_ref()
            .is_some_and(|s| s.variable == Variable::Gradient);
    let merits = match &doc.merits {
        Some(list) if list.is_empty() => return Err(invalid("merits", "must not be empty")),
        Some(list) => MeritSet::from_list(list),
        None if gradient => MeritSet::from_list(&[Merit::Rectification]),
        None => MeritSet::from_list(&[
            Merit::Currents,
            Merit::Sensitivity,
            Merit::Amplification,
            Merit::Validity,
        ]),
    };
    if merits.rectification != gradient {
        return Err(invalid(
            "merits",
            "the rectification merit goes with a Delta axis, and a Delta axis with it",
        ));
    }
    if merits.rectification && merits.steady() {
        return Err(invalid(
            "merits",
            "rectification cannot be combined with other merits",
        ));
    }

    let rectification = match (&doc.rectification, gradient) {
        (Some(r), true) => {
            if !(r.anchor > 0.0 && r.anchor.is_finite()) {
                return Err(invalid("rectification.anchor", "must be positive"));
            }
            Some(match r.mode {
                RectificationKind::FixedLeft => RectificationMode::FixedLeft { t_l: r.anchor },
                RectificationKind::FixedMean => RectificationMode::FixedMean { mean: r.anchor },
            })
        }
        (None, true) => return Err(invalid("rectification", "required when sweeping Delta")),
        (Some(_), false) => return Err(invalid("rectification", "only used when sweeping Delta")),
        (None, false) => None,
    };

    let sensitivity_step = doc.sensitivity_step.unwrap_or(DEFAULT_STEP);
    if !(sensitivity_step > 0.0 && sensitivity_step.is_finite()) {
        return Err(invalid("sensitivity_step", "must be positive"));
    }

    Ok(Scenario {
        name: doc.name.unwrap_or_else(|| "scenario".into()),
        description: doc.description.unwrap_or_default(),
        device,
        temperatures,
        sweep,
        second,
        merits,
        sensitivity_step,
        rectification,
        output: doc.output,
    })
}
