//! Plain-text digest of a finished sweep.

use qtt_core::merits::{threshold_intervals, CurrentStats};

use crate::scenario::Scenario;
use crate::sweep::SweepRow;

/// `|α_L|` level that marks a high-amplification window.
pub const AMPLIFICATION_THRESHOLD: f64 = 100.0;

fn format_intervals(samples: &[(f64, f64)]) -> String {
    let runs = threshold_intervals(samples, AMPLIFICATION_THRESHOLD);
    if runs.is_empty() {
        return "none".into();
    }
    runs.iter()
        .map(|r| format!("[{:.4}, {:.4}]", r.start, r.stop))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Abscissae of grid cells across which `J_M` changes sign.
fn sign_changes(samples: &[(f64, f64)]) -> Vec<(f64, f64)> {
    samples
        .windows(2)
        .filter(|w| w[0].1 * w[1].1 < 0.0)
        .map(|w| (w[0].0, w[1].0))
        .collect()
}

fn group_summary(scenario: &Scenario, rows: &[&SweepRow], out: &mut Vec<String>) {
    let var = scenario.sweep.variable.name();
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    out.push(format!("  points: {} ({} failed)", rows.len(), failed));
    let ok: Vec<_> = rows
        .iter()
        .filter_map(|r| r.data().map(|d| (r.value, d)))
        .collect();

    let currents: Vec<_> = ok
        .iter()
        .filter_map(|(x, d)| d.currents.map(|j| (*x, j)))
        .collect();
    if !currents.is_empty() {
        let stats = CurrentStats::from_samples(&currents.iter().map(|c| c.1).collect::<Vec<_>>());
        out.push(format!(
            "  mean J (L, M, R): {:.4e} {:.4e} {:.4e}",
            stats.mean.l, stats.mean.m, stats.mean.r
        ));
        out.push(format!(
            "  std J (L, M, R):  {:.4e} {:.4e} {:.4e}",
            stats.std_dev.l, stats.std_dev.m, stats.std_dev.r
        ));
        let zeros = sign_changes(&currents.iter().map(|(x, j)| (*x, j.m)).collect::<Vec<_>>());
        if !zeros.is_empty() {
            let cells: Vec<_> = zeros
                .iter()
                .map(|(a, b)| format!("({a:.4}, {b:.4})"))
                .collect();
            out.push(format!("  J_M sign changes in {var}: {}", cells.join(" ")));
        }
    }
    let sens: Vec<_> = ok
        .iter()
        .filter_map(|(x, d)| d.sensitivity.map(|s| (*x, s.m)))
        .collect();
    let crossings = sign_changes(&sens);
    if !crossings.is_empty() {
        let cells: Vec<_> = crossings
            .iter()
            .map(|(a, b)| format!("({a:.4}, {b:.4})"))
            .collect();
        out.push(format!("  S_M sign changes in {var}: {}", cells.join(" ")));
    }
    let alpha: Vec<_> = rows
        .iter()
        .filter_map(|r| match r.data() {
            Some(d) => d.amplification.map(|a| (r.value, a.alpha_l)),
            None => Some((r.value, f64::NAN)),
        })
        .collect();
    if ok.iter().any(|(_, d)| d.amplification.is_some()) {
        out.push(format!(
            "  |alpha_L| >= {AMPLIFICATION_THRESHOLD} in {var}: {}",
            format_intervals(&alpha)
        ));
    }
    let rect: Vec<f64> = ok
        .iter()
        .filter_map(|(_, d)| d.rectification.map(|r| r.r))
        .collect();
    if !rect.is_empty() {
        let lo = rect.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = rect.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        out.push(format!("  R range: [{lo:.6}, {hi:.6}]"));
    }
}

pub fn summarize(scenario: &Scenario, rows: &[SweepRow]) -> Vec<String> {
    let mut out = vec![format!("{}: {}", scenario.name, scenario.description)];
    match &scenario.second {
        None => group_summary(scenario, &rows.iter().collect::<Vec<_>>(), &mut out),
        Some(outer) => {
            let inner = scenario.sweep.len().max(1);
            for chunk in rows.chunks(inner) {
                let label = chunk[0].second.unwrap_or(f64::NAN);
                out.push(format!("{} = {}", outer.variable.name(), label));
                group_summary(scenario, &chunk.iter().collect::<Vec<_>>(), &mut out);
            }
        }
    }
    out
}
