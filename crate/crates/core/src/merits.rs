//! Figures of merit built on steady-state currents.

use alloc::vec::Vec;

use crate::energetics::{terminal_currents, CurrentReport};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::math::sqrt;
use crate::model::{validate, BathTemperatures, DeviceConfig, PerTerminal, Terminal};

/// Default central-difference half-width in `T_M`.
pub const DEFAULT_STEP: f64 = 1e-2;

/// `S_M` counts as vanishing below this fraction of `max(|S_L|, |S_R|)`.
pub const DIVERGENCE_TOL: f64 = 1e-9;

/// Magnitude at which amplification factors are clipped in tables.
pub const AMPLIFICATION_CAP: f64 = 1e9;

/// Differences below this many machine epsilons of `|J|` are round-off.
const ROUNDOFF_FACTOR: f64 = 10.0;

/// Rectification is undefined when `|J(Δ)| + |J(-Δ)|` is below this.
pub const RECTIFICATION_FLOOR: f64 = 1e-14;

fn currents_at(cfg: &DeviceConfig, temps: &BathTemperatures) -> Result<PerTerminal<f64>> {
    Ok(terminal_currents(cfg, temps)?.totals)
}

fn stencil(
    cfg: &DeviceConfig,
    temps: &BathTemperatures,
    h: f64,
) -> Result<(PerTerminal<f64>, PerTerminal<f64>)> {
    if !(h > 0.0 && h.is_finite() && temps.t_m - h > 0.0) {
        return Err(Error::InvalidStep { step: h });
    }
    let plus = currents_at(cfg, &temps.with(Terminal::M, temps.t_m + h))?;
    let minus = currents_at(cfg, &temps.with(Terminal::M, temps.t_m - h))?;
    Ok((plus, minus))
}

fn difference_resolved(plus: f64, minus: f64) -> bool {
    let scale = plus.abs().max(minus.abs());
    (plus - minus).abs() >= ROUNDOFF_FACTOR * f64::EPSILON * scale
}

/// `S_α = ∂J_α/∂T_M` by the central difference `[J(T_M+h) - J(T_M-h)] / 2h`.
pub fn sensitivity(
    cfg: &DeviceConfig,
    temps: &BathTemperatures,
    terminal: Terminal,
    h: f64,
) -> Result<f64> {
    let (plus, minus) = stencil(cfg, temps, h)?;
    let (a, b) = (plus[terminal], minus[terminal]);
    if !difference_resolved(a, b) {
        return Err(Error::StepTooSmall {
            terminal,
            difference: a - b,
            scale: a.abs().max(b.abs()),
        });
    }
    Ok((a - b) / (2.0 * h))
}

/// All three sensitivities from one pair of solves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sensitivities {
    pub values: PerTerminal<f64>,
    /// `false` where the difference is at round-off level.
    pub resolved: PerTerminal<bool>,
}

pub fn sensitivities(
    cfg: &DeviceConfig,
    temps: &BathTemperatures,
    h: f64,
) -> Result<Sensitivities> {
    let (plus, minus) = stencil(cfg, temps, h)?;
    Ok(Sensitivities {
        values: PerTerminal {
            l: (plus.l - minus.l) / (2.0 * h),
            m: (plus.m - minus.m) / (2.0 * h),
            r: (plus.r - minus.r) / (2.0 * h),
        },
        resolved: PerTerminal {
            l: difference_resolved(plus.l, minus.l),
            m: difference_resolved(plus.m, minus.m),
            r: difference_resolved(plus.r, minus.r),
        },
    })
}

/// Amplification factors `α_{L,R} = S_{L,R} / S_M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplification {
    pub sensitivities: PerTerminal<f64>,
    /// Clipped to `±AMPLIFICATION_CAP`.
    pub alpha_l: f64,
    /// Clipped to `±AMPLIFICATION_CAP`.
    pub alpha_r: f64,
    /// `|S_M| < DIVERGENCE_TOL * max(|S_L|, |S_R|)`.
    pub divergent: bool,
}

impl Amplification {
    pub fn from_sensitivities(s: PerTerminal<f64>) -> Self {
        let outer = s.l.abs().max(s.r.abs());
        let divergent = s.m.abs() < DIVERGENCE_TOL * outer;
        let ratio = |num: f64| {
            let r = num / s.m;
            if r.is_nan() {
                0.0
            } else if r.abs() > AMPLIFICATION_CAP {
                AMPLIFICATION_CAP.copysign(r)
            } else {
                r
            }
        };
        Amplification {
            sensitivities: s,
            alpha_l: ratio(s.l),
            alpha_r: ratio(s.r),
            divergent,
        }
    }
}

pub fn amplification(
    cfg: &DeviceConfig,
    temps: &BathTemperatures,
    h: f64,
) -> Result<Amplification> {
    Ok(Amplification::from_sensitivities(
        sensitivities(cfg, temps, h)?.values,
    ))
}

/// Currents, sensitivities, amplification and hypothesis flags at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeritPoint {
    pub temperatures: BathTemperatures,
    pub currents: PerTerminal<f64>,
    pub relative_imbalance: f64,
    pub amplification: Amplification,
    pub sensitivity_resolved: PerTerminal<bool>,
    pub secular_ok: bool,
    pub weak_coupling_ok: bool,
    pub degenerate: bool,
}

pub fn merit_point(cfg: &DeviceConfig, temps: &BathTemperatures, h: f64) -> Result<MeritPoint> {
    let report: CurrentReport = terminal_currents(cfg, temps)?;
    let s = sensitivities(cfg, temps, h)?;
    let checks = validate(cfg, temps);
    Ok(MeritPoint {
        temperatures: *temps,
        currents: report.totals,
        relative_imbalance: report.relative_imbalance(),
        amplification: Amplification::from_sensitivities(s.values),
        sensitivity_resolved: s.resolved,
        secular_ok: checks.secular_ok,
        weak_coupling_ok: checks.weak_coupling_ok,
        degenerate: checks.is_degenerate(),
    })
}

/// How the `L`–`M` temperature pair moves with `Δ = T_M - T_L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RectificationMode {
    /// `T_L` held fixed, `T_M = T_L + Δ`.
    FixedLeft { t_l: f64 },
    /// `T̄ = (T_M + T_L)/2` held fixed, `T_{M,L} = T̄ ± Δ/2`.
    FixedMean { mean: f64 },
}

impl RectificationMode {
    pub fn anchor(&self) -> f64 {
        match *self {
            RectificationMode::FixedLeft { t_l } => t_l,
            RectificationMode::FixedMean { mean } => mean,
        }
    }

    /// `(T_L, T_M)` for a given `Δ`.
    pub fn temperatures(&self, delta: f64) -> (f64, f64) {
        match *self {
            RectificationMode::FixedLeft { t_l } => (t_l, t_l + delta),
            RectificationMode::FixedMean { mean } => (mean - delta / 2.0, mean + delta / 2.0),
        }
    }
}

/// `R(Δ) = (|J(Δ)| - |J(-Δ)|) / (|J(Δ)| + |J(-Δ)|)` with `J = J_M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RectificationPoint {
    pub delta: f64,
    pub mode: RectificationMode,
    pub forward: PerTerminal<f64>,
    pub reverse: PerTerminal<f64>,
    pub r: f64,
    /// `max(|J_R(Δ)|, |J_R(-Δ)|)`: current escaping through the third terminal.
    pub leakage: f64,
}

impl RectificationPoint {
    pub fn j_forward(&self) -> f64 {
        self.forward.m
    }

    pub fn j_reverse(&self) -> f64 {
        self.reverse.m
    }

    /// Leakage relative to the larger of the two middle currents.
    pub fn leakage_ratio(&self) -> f64 {
        self.leakage / self.forward.m.abs().max(self.reverse.m.abs())
    }
}

pub fn rectification(
    cfg: &DeviceConfig,
    mode: RectificationMode,
    t_r: f64,
    delta: f64,
) -> Result<RectificationPoint> {
    let solve = |d: f64| {
        let (t_l, t_m) = mode.temperatures(d);
        currents_at(cfg, &BathTemperatures::new(t_l, t_m, t_r)?)
    };
    let forward = solve(delta)?;
    let reverse = solve(-delta)?;
    let (a, b) = (forward.m.abs(), reverse.m.abs());
    if !(a + b >= RECTIFICATION_FLOOR) {
        return Err(Error::DegenerateRectification {
            forward: a,
            reverse: b,
        });
    }
    Ok(RectificationPoint {
        delta,
        mode,
        forward,
        reverse,
        r: (a - b) / (a + b),
        leakage: forward.r.abs().max(reverse.r.abs()),
    })
}

/// A zero of `J_M(T_M)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwitchPoint {
    pub t_m: f64,
    pub currents: PerTerminal<f64>,
    /// Grid cell in which the sign change was found.
    pub bracket: (f64, f64),
}

/// Sign changes of `J_M` over `grid` (in `T_M`), each refined by bisection
/// down to floating-point resolution. Points where the solver fails are
/// skipped and never bracket a zero.
pub fn find_switch_points(
    cfg: &DeviceConfig,
    base: &BathTemperatures,
    grid: &Grid,
) -> Vec<SwitchPoint> {
    let eval = |t_m: f64| currents_at(cfg, &base.with(Terminal::M, t_m)).ok();
    let samples: Vec<(f64, Option<PerTerminal<f64>>)> = grid.iter().map(|t| (t, eval(t))).collect();
    let mut out = Vec::new();
    for (i, &(t, j)) in samples.iter().enumerate() {
        let Some(j) = j else { continue };
        if j.m == 0.0 {
            out.push(SwitchPoint {
                t_m: t,
                currents: j,
                bracket: (t, t),
            });
            continue;
        }
        let Some(&(t_next, Some(j_next))) = samples.get(i + 1) else {
            continue;
        };
        if j_next.m == 0.0 || (j.m > 0.0) == (j_next.m > 0.0) {
            continue;
        }
        if let Some(point) = bisect(&eval, (t, j), (t_next, j_next)) {
            out.push(point);
        }
    }
    out
}

fn bisect(
    eval: &impl Fn(f64) -> Option<PerTerminal<f64>>,
    lo: (f64, PerTerminal<f64>),
    hi: (f64, PerTerminal<f64>),
) -> Option<SwitchPoint> {
    let bracket = (lo.0, hi.0);
    let (mut a, mut b) = (lo, hi);
    loop {
        let mid = 0.5 * (a.0 + b.0);
        if mid <= a.0 || mid >= b.0 {
            break;
        }
        let j = eval(mid)?;
        if j.m == 0.0 {
            return Some(SwitchPoint {
                t_m: mid,
                currents: j,
                bracket,
            });
        }
        if (j.m > 0.0) == (a.1.m > 0.0) {
            a = (mid, j);
        } else {
            b = (mid, j);
        }
    }
    let best = if a.1.m.abs() <= b.1.m.abs() { a } else { b };
    Some(SwitchPoint {
        t_m: best.0,
        currents: best.1,
        bracket,
    })
}

/// Per-terminal mean and population standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurrentStats {
    pub mean: PerTerminal<f64>,
    pub std_dev: PerTerminal<f64>,
    pub samples: usize,
    /// Grid points whose solve failed.
    pub skipped: usize,
}

impl CurrentStats {
    pub fn from_samples(samples: &[PerTerminal<f64>]) -> Self {
        let n = samples.len() as f64;
        let mut mean = PerTerminal::splat(0.0);
        let mut std_dev = PerTerminal::splat(0.0);
        if !samples.is_empty() {
            for terminal in Terminal::ALL {
                let m = samples.iter().map(|s| s[terminal]).sum::<f64>() / n;
                let var = samples
                    .iter()
                    .map(|s| (s[terminal] - m) * (s[terminal] - m))
                    .sum::<f64>()
                    / n;
                mean[terminal] = m;
                std_dev[terminal] = sqrt(var);
            }
        }
        CurrentStats {
            mean,
            std_dev,
            samples: samples.len(),
            skipped: 0,
        }
    }
}

/// Current statistics while the temperature of `swept` runs over `grid`.
pub fn stabilizer_stats(
    cfg: &DeviceConfig,
    base: &BathTemperatures,
    swept: Terminal,
    grid: &Grid,
) -> CurrentStats {
    let mut samples = Vec::with_capacity(grid.len());
    let mut skipped = 0;
    for t in grid.iter() {
        match currents_at(cfg, &base.with(swept, t)) {
            Ok(j) => samples.push(j),
            Err(_) => skipped += 1,
        }
    }
    CurrentStats {
        skipped,
        ..CurrentStats::from_samples(&samples)
    }
}

/// Closed interval `[start, stop]` of grid abscissae.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub stop: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.stop - self.start
    }

    pub fn contains(&self, x: f64) -> bool {
        self.start <= x && x <= self.stop
    }
}

/// Maximal runs of consecutive samples with `|value| >= threshold`. `NaN`
/// samples break a run.
pub fn threshold_intervals(samples: &[(f64, f64)], threshold: f64) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut current: Option<Interval> = None;
    for &(x, y) in samples {
        if y.abs() >= threshold {
            match current.as_mut() {
                Some(run) => run.stop = x,
                None => current = Some(Interval { start: x, stop: x }),
            }
        } else if let Some(run) = current.take() {
            out.push(run);
        }
    }
    out.extend(current);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_temps(t_m: f64) -> BathTemperatures {
        BathTemperatures::new(10.0, t_m, 0.2).unwrap()
    }

    #[test]
    fn sum_rule_at_regular_point() {
        let a = amplification(
            &DeviceConfig::reference(),
            &reference_temps(4.0),
            DEFAULT_STEP,
        )
        .unwrap();
        assert!(!a.divergent);
        assert!((a.alpha_l + a.alpha_r + 1.0).abs() < 1e-6);
    }

    #[test]
    fn invalid_stencil() {
        let cfg = DeviceConfig::reference();
        assert!(matches!(
            sensitivity(&cfg, &reference_temps(0.2), Terminal::L, 0.5),
            Err(Error::InvalidStep { .. })
        ));
        assert!(matches!(
            sensitivity(&cfg, &reference_temps(2.0), Terminal::L, 0.0),
            Err(Error::InvalidStep { .. })
        ));
    }

    #[test]
    fn unresolved_difference_is_reported() {
        let cfg = DeviceConfig::reference();
        let err = sensitivity(&cfg, &reference_temps(5.0), Terminal::L, 1e-15).unwrap_err();
        assert!(matches!(
            err,
            Error::StepTooSmall {
                terminal: Terminal::L,
                ..
            }
        ));
    }

    #[test]
    fn divergence_flag_and_cap() {
        let a = Amplification::from_sensitivities(PerTerminal {
            l: 1.0,
            m: 0.0,
            r: -1.0,
        });
        assert!(a.divergent);
        assert_eq!(a.alpha_l, AMPLIFICATION_CAP);
        assert_eq!(a.alpha_r, -AMPLIFICATION_CAP);
        let b = Amplification::from_sensitivities(PerTerminal {
            l: 2.0,
            m: -1.0,
            r: -1.0,
        });
        assert!(!b.divergent);
        assert_eq!((b.alpha_l, b.alpha_r), (-2.0, 1.0));
    }

    #[test]
    fn rectification_at_zero_is_undefined() {
        let mode = RectificationMode::FixedLeft { t_l: 10.0 };
        assert!(matches!(
            rectification(&DeviceConfig::reference(), mode, 10.0, 0.0),
            Err(Error::DegenerateRectification { .. })
        ));
    }

    #[test]
    fn rectification_is_antisymmetric() {
        let mut cfg = DeviceConfig::reference();
        cfg.chi_r.c01 = 0.0;
        cfg.chi_r.c02 = 0.2;
        for mode in [
            RectificationMode::FixedLeft { t_l: 10.0 },
            RectificationMode::FixedMean { mean: 5.0 },
        ] {
            for delta in [0.5, 2.0, 4.0] {
                let f = rectification(&cfg, mode, 0.2, delta).unwrap();
                let r = rectification(&cfg, mode, 0.2, -delta).unwrap();
                assert_eq!(f.r, -r.r);
                assert!((-1.0..=1.0).contains(&f.r));
            }
        }
    }

    #[test]
    fn mode_temperatures() {
        assert_eq!(
            RectificationMode::FixedLeft { t_l: 10.0 }.temperatures(-2.0),
            (10.0, 8.0)
        );
        assert_eq!(
            RectificationMode::FixedMean { mean: 2.0 }.temperatures(1.0),
            (1.5, 2.5)
        );
    }

    #[test]
    fn constant_samples_have_zero_spread() {
        let s = CurrentStats::from_samples(&[PerTerminal::splat(0.0); 7]);
        assert_eq!(s.mean, PerTerminal::splat(0.0));
        assert_eq!(s.std_dev, PerTerminal::splat(0.0));
        let s = CurrentStats::from_samples(&[PerTerminal::splat(1.0), PerTerminal::splat(3.0)]);
        assert_eq!(s.mean.l, 2.0);
        assert_eq!(s.std_dev.r, 1.0);
    }

    #[test]
    fn equilibrium_zero_is_a_switch_point() {
        // T_L = T_R = 3: J_M changes sign at T_M = 3
        let base = BathTemperatures::uniform(3.0).unwrap();
        let grid = Grid::new(2.05, 3.95, 0.1).unwrap();
        let zeros = find_switch_points(&DeviceConfig::reference(), &base, &grid);
        assert_eq!(zeros.len(), 1);
        assert!((zeros[0].t_m - 3.0).abs() < 1e-9, "{}", zeros[0].t_m);
    }

    #[test]
    fn intervals_from_samples() {
        let s = [
            (0.0, 1.0),
            (1.0, 200.0),
            (2.0, -300.0),
            (3.0, 5.0),
            (4.0, 1e9),
            (5.0, f64::NAN),
        ];
        let runs = threshold_intervals(&s, 100.0);
        assert_eq!(
            runs,
            [
                Interval {
                    start: 1.0,
                    stop: 2.0
                },
                Interval {
                    start: 4.0,
                    stop: 4.0
                }
            ]
        );
    }
}
