//! CSV emission.
//!
//! Floats are written with 17 significant digits in scientific notation,
//! flags as `0`/`1`, and every numeric cell of a failed row as `NaN`.

use std::io::Write;

use qtt_core::merits::RectificationMode;
use qtt_core::model::transition_catalog;
use qtt_core::BasisState;

use crate::scenario::Scenario;
use crate::sweep::{error_code, SweepRow};

/// Header row for a scenario, in canonical group order.
pub fn columns(scenario: &Scenario) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(second) = &scenario.second {
        out.push(second.variable.name().to_string());
    }
    out.push(scenario.sweep.variable.name().to_string());
    out.push("status".into());
    let m = &scenario.merits;
    if m.populations {
        out.extend(BasisState::ALL.iter().map(|s| format!("P_{s}")));
    }
    if m.currents {
        out.extend(["J_L", "J_M", "J_R", "imbalance"].map(String::from));
    }
    if m.transitions {
        out.extend(
            transition_catalog(&scenario.device)
                .iter()
                .map(|t| format!("J_{}_{}_{}", t.terminal, t.from, t.to)),
        );
    }
    if m.sensitivity {
        out.extend(["S_L", "S_M", "S_R"].map(String::from));
    }
    if m.amplification {
        out.extend(["alpha_L", "alpha_R", "divergent"].map(String::from));
    }
    if m.validity {
        out.extend(
            [
                "secular_ok",
                "weak_coupling_ok",
                "degenerate",
                "conventional_gradient",
                "min_gap_separation",
                "max_decay_rate",
            ]
            .map(String::from),
        );
    }
    if m.rectification {
        out.extend(["T_L", "T_M", "J_forward", "J_reverse", "R", "J_R_leakage"].map(String::from));
    }
    out
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

/// Cells of one row, aligned with [`columns`].
pub fn cells(scenario: &Scenario, row: &SweepRow) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(second) = row.second {
        out.push(float(second));
    }
    out.push(float(row.value));
    let data = match &row.outcome {
        Ok(data) => data,
        Err(e) => {
            out.push(error_code(e).to_string());
            let width = columns(scenario).len() - out.len();
            out.extend(std::iter::repeat_n(float(f64::NAN), width));
            return out;
        }
    };
    out.push("ok".into());
    if let Some(p) = &data.populations {
        out.extend(p.iter().map(|&x| float(x)));
    }
    if let (Some(j), Some(imbalance)) = (data.currents, data.imbalance) {
        out.extend([j.l, j.m, j.r, imbalance].map(float));
    }
    if let Some(t) = &data.transitions {
        out.extend(t.iter().map(|&x| float(x)));
    }
    if let Some(s) = data.sensitivity {
        out.extend([s.l, s.m, s.r].map(float));
    }
    if let Some(a) = data.amplification {
        out.extend([float(a.alpha_l), float(a.alpha_r), flag(a.divergent)]);
    }
    if let Some(v) = data.validity {
        out.extend([
            flag(v.secular_ok),
            flag(v.weak_coupling_ok),
            flag(v.degenerate),
            flag(v.conventional_gradient),
            float(v.min_gap_separation),
            float(v.max_decay_rate),
        ]);
    }
    if let Some(r) = data.rectification {
        let (t_l, t_m) = r.mode.temperatures(r.delta);
        out.extend([t_l, t_m, r.j_forward(), r.j_reverse(), r.r, r.leakage].map(float));
    }
    out
}

/// Writes header and rows with LF line endings.
pub fn write_csv<W: Write>(scenario: &Scenario, rows: &[SweepRow], sink: W) -> csv::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    writer.write_record(columns(scenario))?;
    for row in rows {
        writer.write_record(cells(scenario, row))?;
    }
    writer.flush()?;
    Ok(())
}

/// Human-readable label for a rectification anchor.
pub fn describe_mode(mode: &RectificationMode) -> String {
    match mode {
        RectificationMode::FixedLeft { t_l } => format!("fixed_TL (T_L = {t_l})"),
        RectificationMode::FixedMean { mean } => format!("fixed_mean (mean = {mean})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::load_scenario;
    use crate::sweep::run_sweep;

    fn render(scenario: &Scenario, rows: &[SweepRow]) -> String {
        let mut buf = Vec::new();
        write_csv(scenario, rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_rows_give_header_only() {
        let s = load_scenario(r#"{"sweep": {"variable": "T_M", "values": [1]}}"#).unwrap();
        let text = render(&s, &[]);
        assert_eq!(
            text,
            "T_M,status,J_L,J_M,J_R,imbalance,S_L,S_M,S_R,alpha_L,alpha_R,divergent,\
             secular_ok,weak_coupling_ok,degenerate,conventional_gradient,min_gap_separation,max_decay_rate\n"
        );
    }

    #[test]
    fn rows_are_rectangular_and_round_trip() {
        let s = load_scenario(
            r#"{"sweep": {"variable": "T_M", "values": [-1, 3.3]},
                "merits": ["populations", "currents", "transitions", "sensitivity", "amplification", "validity"]}"#,
        )
        .unwrap();
        let rows = run_sweep(&s, Some(1)).unwrap();
        let text = render(&s, &rows);
        assert!(!text.contains('\r'));
        let width = columns(&s).len();
        assert_eq!(width, 2 + 12 + 4 + 24 + 3 + 3 + 6);
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(records.len(), 2);
        assert!(records.iter().all(|r| r.len() == width));
        assert_eq!(&records[0][1], "invalid_temperature");
        assert_eq!(&records[0][2], "NaN");
        assert_eq!(&records[1][1], "ok");
        let j_l: f64 = records[1][14].parse().unwrap();
        let data = rows[1].data().unwrap();
        assert_eq!(j_l, data.currents.unwrap().l);
    }

    #[test]
    fn headers_name_transitions_and_states() {
        let s = load_scenario(
            r#"{"sweep": {"variable": "T_M", "values": [1]}, "merits": ["populations", "transitions"]}"#,
        )
        .unwrap();
        let cols = columns(&s);
        assert_eq!(cols[2], "P_g0g");
        assert_eq!(cols[13], "P_e2e");
        assert_eq!(cols[14], "J_L_g0g_e0g");
        assert!(cols.contains(&"J_M_g0g_g1g".to_string()));
        assert_eq!(cols.last().unwrap(), "J_R_e2g_e2e");
    }
}
