use proptest::prelude::*;
use qtt_core::energetics::terminal_currents;
use qtt_core::kinetics::{generator, steady_state, steady_state_dense};
use qtt_core::merits::{amplification, sensitivity, DEFAULT_STEP};
use qtt_core::model::{
    bohr_frequencies, energy_spectrum, transition_catalog, BohrLabel, STATE_COUNT,
};
use qtt_core::{
    BasisState, BathTemperatures, Channels, DeviceConfig, Grid, PopulationVector, Spin, Terminal,
};

fn channels(range: f64) -> impl Strategy<Value = Channels> {
    (-range..range, -range..range, -range..range).prop_map(|(a, b, c)| Channels::new(a, b, c))
}

fn device(chi: f64) -> impl Strategy<Value = DeviceConfig> {
    (
        0.5f64..3.0,
        0.5f64..3.0,
        1.0f64..4.0,
        0.5f64..4.0,
        channels(chi),
        channels(chi),
    )
        .prop_map(
            |(omega_l, omega_r, big_omega, delta, chi_l, chi_r)| DeviceConfig {
                omega_l,
                omega_r,
                big_omega,
                delta,
                chi_l,
                chi_r,
                ..DeviceConfig::reference()
            },
        )
}

fn swap_sides(s: BasisState) -> BasisState {
    BasisState::new(s.right, s.level, s.left)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn bohr_table_matches_energy_differences(cfg in device(20.0)) {
        let levels = energy_spectrum(&cfg);
        let table = bohr_frequencies(&cfg);
        for t in transition_catalog(&cfg) {
            let diff = levels.energy(t.to) - levels.energy(t.from);
            prop_assert!((t.bohr - diff).abs() <= 1e-12 * t.bohr.abs().max(1.0), "{t}");
            prop_assert_eq!(t.bohr, table.get(t.label));
        }
    }

    #[test]
    fn spectrum_mirror_symmetry(cfg in device(20.0)) {
        let levels = energy_spectrum(&cfg);
        let mirrored = energy_spectrum(&cfg.mirrored());
        for s in BasisState::ALL {
            prop_assert!((levels.energy(s) - mirrored.energy(swap_sides(s))).abs() <= 1e-12);
        }
    }

    #[test]
    fn catalog_changes_one_subsystem(cfg in device(20.0)) {
        for t in transition_catalog(&cfg) {
            let changed = [
                t.from.left != t.to.left,
                t.from.level != t.to.level,
                t.from.right != t.to.right,
            ];
            prop_assert_eq!(changed.iter().filter(|&&c| c).count(), 1);
            let expected = match t.terminal {
                Terminal::L => 0,
                Terminal::M => 1,
                Terminal::R => 2,
            };
            prop_assert!(changed[expected]);
            prop_assert_eq!(t.label.terminal(), t.terminal);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn equilibrium_is_gibbs(cfg in device(2.0), t in prop::sample::select(vec![0.5, 2.0, 10.0])) {
        let temps = BathTemperatures::uniform(t).unwrap();
        let gen = generator(&cfg, &temps).unwrap();
        let p = steady_state(&gen).unwrap();
        let gibbs = PopulationVector::gibbs(&energy_spectrum(&cfg), t);
        for i in 0..STATE_COUNT {
            prop_assert!((p[i] - gibbs[i]).abs() <= 1e-9);
        }
        let report = terminal_currents(&cfg, &temps).unwrap();
        for c in &report.transitions {
            prop_assert!(c.flux.abs() <= 1e-9 * c.flux.abs().max(1e-6));
        }
        for terminal in Terminal::ALL {
            prop_assert!(report.total(terminal).abs() <= 1e-12);
        }
    }

    #[test]
    fn nonequilibrium_balance_and_solver_agreement(
        cfg in device(5.0),
        t_l in 0.5f64..10.0,
        t_m in 0.5f64..10.0,
        t_r in 0.5f64..10.0,
    ) {
        let temps = BathTemperatures::new(t_l, t_m, t_r).unwrap();
        let gen = generator(&cfg, &temps).unwrap();
        let p = steady_state(&gen).unwrap();
        let q = steady_state_dense(&gen).unwrap();
        prop_assert!(gen.residual(&p) <= 1e-12 * gen.norm());
        for i in 0..STATE_COUNT {
            prop_assert!((p[i] - q[i]).abs() <= 1e-10);
        }
        let report = terminal_currents(&cfg, &temps).unwrap();
        prop_assert!(report.relative_imbalance() <= 1e-10);
    }
}

#[test]
fn reference_sweep_balances_everywhere() {
    let cfg = DeviceConfig::reference();
    let grid = Grid::new(0.2, 10.0, 0.01).unwrap();
    let mut worst = 0.0_f64;
    for t_m in grid.iter() {
        let temps = BathTemperatures::new(10.0, t_m, 0.2).unwrap();
        let report = terminal_currents(&cfg, &temps).unwrap();
        worst = worst.max(report.relative_imbalance());
        let gen = generator(&cfg, &temps).unwrap();
        assert!(gen.column_sums().iter().all(|s| s.abs() <= 1e-13));
    }
    assert!(worst <= 1e-10, "worst relative imbalance {worst}");
}

#[test]
fn middle_upper_channel_is_negligible() {
    let cfg = DeviceConfig::reference();
    for t_m in [0.2, 1.0, 3.0, 5.0, 7.0, 9.0] {
        let temps = BathTemperatures::new(10.0, t_m, 0.2).unwrap();
        let report = terminal_currents(&cfg, &temps).unwrap();
        let scale = report.total(Terminal::L).abs();
        let upper: f64 = report
            .transitions
            .iter()
            .filter(|c| c.transition.terminal == Terminal::M)
            .filter(|c| {
                matches!(
                    c.transition.label,
                    BohrLabel::Qutrit {
                        channel: qtt_core::Channel::C12,
                        ..
                    }
                )
            })
            .map(|c| c.current.abs())
            .sum();
        assert!(upper < 2e-2 * scale, "T_M={t_m}: {upper} vs {scale}");
    }
}

#[test]
fn left_flux_from_excited_right_dominates() {
    let cfg = DeviceConfig::reference();
    let grid = Grid::new(0.5, 10.0, 0.5).unwrap();
    let g0e = BasisState::new(Spin::Ground, qtt_core::Level::Zero, Spin::Excited);
    let g0g = BasisState::new(Spin::Ground, qtt_core::Level::Zero, Spin::Ground);
    for t_m in grid.iter() {
        let report =
            terminal_currents(&cfg, &BathTemperatures::new(10.0, t_m, 0.2).unwrap()).unwrap();
        let flux = |from| {
            report
                .terminal(Terminal::L)
                .find(|c| c.transition.from == from)
                .unwrap()
                .flux
                .abs()
        };
        assert!(flux(g0e) > flux(g0g), "T_M={t_m}");
    }
}

#[test]
fn sensitivity_is_second_order() {
    let cfg = DeviceConfig::reference();
    let temps = BathTemperatures::new(10.0, 4.0, 0.2).unwrap();
    let reference = sensitivity(&cfg, &temps, Terminal::L, 1e-4).unwrap();
    let coarse = sensitivity(&cfg, &temps, Terminal::L, 1e-2).unwrap() - reference;
    let fine = sensitivity(&cfg, &temps, Terminal::L, 5e-3).unwrap() - reference;
    let ratio = coarse / fine;
    assert!((ratio - 4.0).abs() < 0.2, "error ratio {ratio}");
}

#[test]
fn sum_rule_over_regular_points() {
    let cfg = DeviceConfig::reference();
    for t_m in [0.5, 2.0, 4.0, 6.0, 8.0, 9.5] {
        let temps = BathTemperatures::new(10.0, t_m, 0.2).unwrap();
        let a = amplification(&cfg, &temps, DEFAULT_STEP).unwrap();
        if !a.divergent {
            assert!((a.alpha_l + a.alpha_r + 1.0).abs() < 1e-6, "T_M={t_m}");
        }
    }
}

#[test]
fn currents_switch_on_away_from_cold_end() {
    let cfg = DeviceConfig::reference();
    let j = |t_m: f64| {
        terminal_currents(&cfg, &BathTemperatures::new(10.0, t_m, 0.2).unwrap())
            .unwrap()
            .total(Terminal::L)
    };
    assert!(j(0.2).abs() < 1e-2 * j(5.0).abs());
    assert!(j(5.0) > 0.0);
}
