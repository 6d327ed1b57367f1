//! Population dynamics `dP/dt = X P`: generator assembly, steady state and
//! RK4 transients.
//!
//! `X[to][from]` holds the rate of `from → to`; columns sum to zero.

use alloc::vec::Vec;
use core::ops::Index;

use crate::bath::decay_rate;
use crate::error::{Error, Result};
use crate::math::exp;
use crate::model::{
    energy_spectrum, transition_catalog, BasisState, BathTemperatures, DeviceConfig, Spectrum,
    Transition, STATE_COUNT,
};

/// Entries above `-NEGATIVE_CLAMP` are treated as round-off and zeroed.
pub const NEGATIVE_CLAMP: f64 = 1e-14;

/// Tolerance on `|Σ P - 1|` accepted by [`PopulationVector::new`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// RK4 requires `dt * max|X_ii|` below this.
pub const RK4_STABILITY_LIMIT: f64 = 0.1;

type Matrix = [[f64; STATE_COUNT]; STATE_COUNT];

/// Populations `P_ljr` of the 12 basis states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PopulationVector([f64; STATE_COUNT]);

impl PopulationVector {
    /// Clamps round-off negatives and checks normalization.
    pub fn new(mut values: [f64; STATE_COUNT]) -> Result<Self> {
        clamp_negatives(&mut values)?;
        let sum: f64 = values.iter().sum();
        if !((sum - 1.0).abs() <= NORMALIZATION_TOL) {
            return Err(Error::NotNormalized { sum });
        }
        Ok(PopulationVector(values))
    }

    pub fn uniform() -> Self {
        PopulationVector([1.0 / STATE_COUNT as f64; STATE_COUNT])
    }

    /// All weight on one state.
    pub fn pure(state: BasisState) -> Self {
        let mut values = [0.0; STATE_COUNT];
        values[state.index()] = 1.0;
        PopulationVector(values)
    }

    /// Gibbs weights `exp(-E/T) / Z` of a spectrum at one temperature.
    pub fn gibbs(spectrum: &Spectrum, temperature: f64) -> Self {
        let e_min = spectrum
            .energies
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let weights = spectrum.energies.map(|e| exp(-(e - e_min) / temperature));
        let z: f64 = weights.iter().sum();
        PopulationVector(weights.map(|w| w / z))
    }

    pub fn get(&self, state: BasisState) -> f64 {
        self.0[state.index()]
    }

    pub fn as_array(&self) -> &[f64; STATE_COUNT] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl Index<usize> for PopulationVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

fn clamp_negatives(values: &mut [f64; STATE_COUNT]) -> Result<()> {
    for (state, v) in values.iter_mut().enumerate() {
        if !v.is_finite() || *v < -NEGATIVE_CLAMP {
            return Err(Error::NegativePopulation { state, value: *v });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

fn normalize(values: &mut [f64; STATE_COUNT]) -> Result<()> {
    let sum: f64 = values.iter().sum();
    if !(sum > 0.0 && sum.is_finite()) {
        return Err(Error::NotNormalized { sum });
    }
    for v in values.iter_mut() {
        *v /= sum;
    }
    Ok(())
}

/// A catalog transition with its two evaluated rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Link {
    pub transition: Transition,
    /// `from → to`: `ν² γ(-ω)`.
    pub upward: f64,
    /// `to → from`: `ν² γ(ω)`.
    pub downward: f64,
}

/// Rate matrix of the population Markov chain.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    matrix: Matrix,
    links: Vec<Link>,
    active: [bool; STATE_COUNT],
    /// States sorted so the last-eliminated (most stable) one comes first.
    order: [usize; STATE_COUNT],
}

/// Builds `X` from the transition catalog. Inert transitions contribute
/// nothing and are left out of [`Generator::links`].
pub fn generator(cfg: &DeviceConfig, temps: &BathTemperatures) -> Result<Generator> {
    cfg.validate()?;
    temps.validate()?;
    let mut links = Vec::with_capacity(24);
    for transition in transition_catalog(cfg) {
        if transition.is_inert() {
            continue;
        }
        let w2 = transition.weight * transition.weight;
        let down = decay_rate(transition.bohr, transition.terminal, cfg, temps)?;
        let up = decay_rate(-transition.bohr, transition.terminal, cfg, temps)?;
        links.push(Link {
            transition,
            upward: w2 * up.rate,
            downward: w2 * down.rate,
        });
    }
    let mut matrix = [[0.0; STATE_COUNT]; STATE_COUNT];
    for link in &links {
        let a = link.transition.from.index();
        let b = link.transition.to.index();
        matrix[b][a] += link.upward;
        matrix[a][b] += link.downward;
    }
    fill_diagonal(&mut matrix);

    let spectrum = energy_spectrum(cfg);
    let mut order: [usize; STATE_COUNT] = core::array::from_fn(|i| i);
    order.sort_by(|&a, &b| spectrum.energies[a].total_cmp(&spectrum.energies[b]));

    let adjacency = |a: usize, b: usize| {
        links.iter().any(|l| {
            let (f, t) = (l.transition.from.index(), l.transition.to.index());
            (f == a && t == b) || (f == b && t == a)
        })
    };
    let active = reachable_from_origin(adjacency);
    Ok(Generator {
        matrix,
        links,
        active,
        order,
    })
}

fn fill_diagonal(matrix: &mut Matrix) {
    for col in 0..STATE_COUNT {
        matrix[col][col] = 0.0;
        let outflow: f64 = (0..STATE_COUNT)
            .filter(|&row| row != col)
            .map(|row| matrix[row][col])
            .sum();
        matrix[col][col] = -outflow;
    }
}

/// States connected to `g0g` through links in either direction.
fn reachable_from_origin(connected: impl Fn(usize, usize) -> bool) -> [bool; STATE_COUNT] {
    let mut seen = [false; STATE_COUNT];
    let mut stack = Vec::with_capacity(STATE_COUNT);
    seen[0] = true;
    stack.push(0);
    while let Some(a) = stack.pop() {
        for b in 0..STATE_COUNT {
            if !seen[b] && connected(a, b) {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    seen
}

impl Generator {
    /// Wraps an arbitrary rate matrix (`X[to][from]`). Diagonals are
    /// recomputed from the off-diagonal entries, which must be nonnegative.
    pub fn from_matrix(mut matrix: Matrix) -> Result<Self> {
        for (to, row) in matrix.iter().enumerate() {
            for (from, &x) in row.iter().enumerate() {
                if to != from && !(x >= 0.0 && x.is_finite()) {
                    return Err(Error::InvalidConfig {
                        field: "rate",
                        value: x,
                        reason: "off-diagonal rates must be nonnegative and finite",
                    });
                }
            }
        }
        fill_diagonal(&mut matrix);
        let active = reachable_from_origin(|a, b| matrix[a][b] > 0.0 || matrix[b][a] > 0.0);
        Ok(Generator {
            matrix,
            links: Vec::new(),
            active,
            order: core::array::from_fn(|i| i),
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Rate of the jump `from → to`.
    pub fn rate(&self, from: BasisState, to: BasisState) -> f64 {
        self.matrix[to.index()][from.index()]
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Membership of the communicating class that contains `g0g`; states
    /// outside it are given zero steady-state population.
    pub fn active(&self) -> &[bool; STATE_COUNT] {
        &self.active
    }

    pub fn apply(&self, p: &[f64; STATE_COUNT]) -> [f64; STATE_COUNT] {
        core::array::from_fn(|i| self.matrix[i].iter().zip(p).map(|(x, p)| x * p).sum())
    }

    /// `‖X P‖∞`.
    pub fn residual(&self, p: &PopulationVector) -> f64 {
        self.apply(p.as_array())
            .iter()
            .fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    /// Infinity norm (largest absolute row sum).
    pub fn norm(&self) -> f64 {
        self.matrix
            .iter()
            .fold(0.0, |m, row| f64::max(m, row.iter().map(|x| x.abs()).sum()))
    }

    pub fn column_sums(&self) -> [f64; STATE_COUNT] {
        core::array::from_fn(|col| (0..STATE_COUNT).map(|row| self.matrix[row][col]).sum())
    }

    /// `max |X_ii|`, the fastest escape rate.
    pub fn max_diagonal(&self) -> f64 {
        (0..STATE_COUNT).fold(0.0, |m, i| f64::max(m, self.matrix[i][i].abs()))
    }
}

/// Stationary populations by Grassmann–Taksar–Heyman state reduction.
///
/// The elimination involves only additions, products and divisions of
/// nonnegative numbers, so small populations keep full relative accuracy even
/// when they span hundreds of orders of magnitude. States are eliminated from
/// the highest energy down so the ground state is kept to the end.
pub fn steady_state(generator: &Generator) -> Result<PopulationVector> {
    let states: Vec<usize> = generator
        .order
        .iter()
        .copied()
        .filter(|&s| generator.active[s])
        .collect();
    let n = states.len();
    // q[i][j]: rate from states[i] to states[j]
    let mut q: Vec<Vec<f64>> = states
        .iter()
        .map(|&a| {
            states
                .iter()
                .map(|&b| if a == b { 0.0 } else { generator.matrix[b][a] })
                .collect()
        })
        .collect();

    for k in (1..n).rev() {
        let s: f64 = q[k][..k].iter().sum();
        if !(s > 0.0) {
            return Err(Error::NonUniqueSteadyState { state: states[k] });
        }
        for i in 0..k {
            q[i][k] /= s;
        }
        for i in 0..k {
            let qik = q[i][k];
            if qik == 0.0 {
                continue;
            }
            for j in 0..k {
                if i != j {
                    q[i][j] += qik * q[k][j];
                }
            }
        }
    }

    let mut reduced = Vec::with_capacity(n);
    reduced.push(1.0);
    for k in 1..n {
        let pk: f64 = (0..k).map(|i| reduced[i] * q[i][k]).sum();
        reduced.push(pk);
    }
    let mut values = [0.0; STATE_COUNT];
    for (&s, p) in states.iter().zip(reduced) {
        values[s] = p;
    }
    normalize(&mut values)?;
    Ok(PopulationVector(values))
}

/// Stationary populations by replacing one balance equation with the
/// normalization row and solving with partially pivoted LU.
///
/// Kept as an independent cross-check of [`steady_state`]; its relative
/// residual degrades once populations span many orders of magnitude.
pub fn steady_state_dense(generator: &Generator) -> Result<PopulationVector> {
    let states: Vec<usize> = (0..STATE_COUNT).filter(|&s| generator.active[s]).collect();
    let n = states.len();
    let scale = generator.norm().max(f64::MIN_POSITIVE);
    let mut a: Vec<Vec<f64>> = states
        .iter()
        .map(|&r| states.iter().map(|&c| generator.matrix[r][c]).collect())
        .collect();
    let mut rhs = alloc::vec![0.0; n];
    a[n - 1].iter_mut().for_each(|x| *x = 1.0);
    rhs[n - 1] = 1.0;

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap_or(col);
        let row_scale = if pivot == n - 1 { 1.0 } else { scale };
        if !(a[pivot][col].abs() > 1e-300 * row_scale) {
            return Err(Error::NonUniqueSteadyState { state: states[col] });
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[row][c] -= factor * a[col][c];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = alloc::vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (rhs[row] - tail) / a[row][row];
    }

    let mut values = [0.0; STATE_COUNT];
    for (&s, v) in states.iter().zip(x) {
        values[s] = v;
    }
    clamp_negatives(&mut values)?;
    normalize(&mut values)?;
    Ok(PopulationVector(values))
}

/// Sampled RK4 trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PopulationVector>,
    /// Largest `|Σ P - 1|` seen before each renormalization.
    pub max_drift: f64,
}

impl Trajectory {
    pub fn last(&self) -> &PopulationVector {
        self.states
            .last()
            .expect("trajectory always holds the initial state")
    }
}

/// Fixed-step RK4 from `p0` to `t_final`, recording every step.
pub fn evolve(
    p0: PopulationVector,
    generator: &Generator,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    evolve_sampled(p0, generator, t_final, dt, 1)
}

/// As [`evolve`], but records only every `stride`-th step and the endpoint.
///
/// The step is shortened uniformly so the last one lands on `t_final`.
pub fn evolve_sampled(
    p0: PopulationVector,
    generator: &Generator,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep { step: dt });
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidRange {
            start: 0.0,
            stop: t_final,
        });
    }
    let limit = RK4_STABILITY_LIMIT / generator.max_diagonal();
    if !(dt < limit) {
        return Err(Error::StepTooLarge { dt, limit });
    }
    let stride = stride.max(1);
    let steps = if t_final == 0.0 {
        0
    } else {
        libm::ceil(t_final / dt - 1e-9).max(1.0) as usize
    };
    let h = if steps == 0 {
        0.0
    } else {
        t_final / steps as f64
    };

    let mut p = *p0.as_array();
    let mut times = alloc::vec![0.0];
    let mut states = alloc::vec![p0];
    let mut max_drift = 0.0_f64;
    let axpy = |p: &[f64; STATE_COUNT], k: &[f64; STATE_COUNT], c: f64| -> [f64; STATE_COUNT] {
        core::array::from_fn(|i| p[i] + c * k[i])
    };
    for step in 1..=steps {
        let k1 = generator.apply(&p);
        let k2 = generator.apply(&axpy(&p, &k1, h / 2.0));
        let k3 = generator.apply(&axpy(&p, &k2, h / 2.0));
        let k4 = generator.apply(&axpy(&p, &k3, h));
        for i in 0..STATE_COUNT {
            p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let sum: f64 = p.iter().sum();
        max_drift = max_drift.max((sum - 1.0).abs());
        for v in p.iter_mut() {
            *v /= sum;
        }
        if step % stride == 0 || step == steps {
            times.push(if step == steps {
                t_final
            } else {
                step as f64 * h
            });
            states.push(PopulationVector(p));
        }
    }
    Ok(Trajectory {
        times,
        states,
        max_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Level, Spin, Terminal};

    fn reference(t_m: f64) -> Generator {
        let temps = BathTemperatures::new(10.0, t_m, 0.2).unwrap();
        generator(&DeviceConfig::reference(), &temps).unwrap()
    }

    #[test]
    fn columns_sum_to_zero() {
        for t_m in [0.2, 1.0, 5.0, 10.0] {
            let gen = reference(t_m);
            for (col, s) in gen.column_sums().iter().enumerate() {
                assert!(s.abs() <= 1e-13, "T_M={t_m} column {col}: {s}");
            }
            for row in 0..STATE_COUNT {
                for col in 0..STATE_COUNT {
                    if row != col {
                        assert!(gen.matrix()[row][col] >= 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn sparsity_follows_catalog() {
        let gen = reference(5.0);
        let g0g = BasisState::new(Spin::Ground, Level::Zero, Spin::Ground);
        let e0g = BasisState::new(Spin::Excited, Level::Zero, Spin::Ground);
        let e1e = BasisState::new(Spin::Excited, Level::One, Spin::Excited);
        assert!(gen.rate(g0g, e0g) > 0.0);
        assert!(gen.rate(e0g, g0g) > 0.0);
        assert_eq!(gen.rate(g0g, e1e), 0.0);
        assert_eq!(gen.links().len(), 24);
        assert!(gen.active().iter().all(|&a| a));
    }

    #[test]
    fn qubit_analog_splits_off_level_two() {
        let mut cfg = DeviceConfig::reference().qubit_analog();
        cfg.chi_l.c01 = 33.1;
        cfg.chi_r.c01 = 31.1;
        let temps = BathTemperatures::new(10.0, 5.0, 0.2).unwrap();
        let gen = generator(&cfg, &temps).unwrap();
        for s in BasisState::ALL {
            assert_eq!(gen.active()[s.index()], s.level != Level::Two, "{s}");
            for t in BasisState::ALL {
                if (s.level == Level::Two) != (t.level == Level::Two) {
                    assert_eq!(gen.rate(s, t), 0.0);
                }
            }
        }
        let p = steady_state(&gen).unwrap();
        for s in BasisState::ALL.iter().filter(|s| s.level == Level::Two) {
            assert_eq!(p.get(*s), 0.0);
        }
        assert!((p.sum() - 1.0).abs() < 1e-15);
        assert!(gen.residual(&p) <= 1e-12 * gen.norm());
    }

    #[test]
    fn reference_steady_state_balances() {
        for t_m in [0.2, 0.5, 2.0, 6.96, 10.0] {
            let gen = reference(t_m);
            let p = steady_state(&gen).unwrap();
            assert!((p.sum() - 1.0).abs() <= 1e-12);
            assert!(p.as_array().iter().all(|&x| (0.0..=1.0).contains(&x)));
            assert!(gen.residual(&p) <= 1e-12 * gen.norm(), "T_M={t_m}");
        }
    }

    #[test]
    fn dense_solver_agrees() {
        for t_m in [0.5, 3.0, 8.0] {
            let gen = reference(t_m);
            let a = steady_state(&gen).unwrap();
            let b = steady_state_dense(&gen).unwrap();
            for i in 0..STATE_COUNT {
                assert!((a[i] - b[i]).abs() <= 1e-10, "T_M={t_m} state {i}");
            }
        }
    }

    #[test]
    fn gibbs_at_uniform_temperature() {
        let cfg = DeviceConfig::reference();
        for t in [0.5, 2.0, 10.0] {
            let temps = BathTemperatures::uniform(t).unwrap();
            let p = steady_state(&generator(&cfg, &temps).unwrap()).unwrap();
            let gibbs = PopulationVector::gibbs(&energy_spectrum(&cfg), t);
            for i in 0..STATE_COUNT {
                assert!((p[i] - gibbs[i]).abs() <= 1e-12, "T={t} state {i}");
            }
        }
    }

    #[test]
    fn reducible_chain_is_rejected() {
        // 1 → 0 only: state 1 is transient, unique NESS on {0}
        let mut m = [[0.0; STATE_COUNT]; STATE_COUNT];
        m[0][1] = 1.0;
        let gen = Generator::from_matrix(m).unwrap();
        let p = steady_state(&gen).unwrap();
        assert_eq!(p[0], 1.0);

        // 1 → 2 as well: two absorbing states
        m[2][1] = 1.0;
        let gen = Generator::from_matrix(m).unwrap();
        assert!(matches!(
            steady_state(&gen),
            Err(Error::NonUniqueSteadyState { .. })
        ));
        assert!(matches!(
            steady_state_dense(&gen),
            Err(Error::NonUniqueSteadyState { .. })
        ));
    }

    #[test]
    fn frozen_dynamics() {
        let gen = Generator::from_matrix([[0.0; STATE_COUNT]; STATE_COUNT]).unwrap();
        let p0 = PopulationVector::new(core::array::from_fn(|i| (i + 1) as f64 / 78.0)).unwrap();
        let traj = evolve(p0, &gen, 10.0, 0.5).unwrap();
        assert_eq!(traj.times.len(), 21);
        assert!(traj.states.iter().all(|p| *p == p0));
        assert_eq!(traj.max_drift, 0.0);
    }

    #[test]
    fn step_guard() {
        let gen = reference(5.0);
        let limit = RK4_STABILITY_LIMIT / gen.max_diagonal();
        assert!(matches!(
            evolve(PopulationVector::uniform(), &gen, 1.0, 1.5 * limit),
            Err(Error::StepTooLarge { .. })
        ));
        assert!(matches!(
            evolve(PopulationVector::uniform(), &gen, 1.0, 0.0),
            Err(Error::InvalidStep { .. })
        ));
    }

    #[test]
    fn endpoint_lands_on_final_time() {
        let gen = reference(5.0);
        let traj = evolve_sampled(PopulationVector::uniform(), &gen, 100.0, 3.0, 10).unwrap();
        assert_eq!(*traj.times.last().unwrap(), 100.0);
        assert_eq!(traj.times.len(), traj.states.len());
        assert_eq!(traj.times.len(), 5);
    }

    #[test]
    fn population_vector_validation() {
        let mut v = [0.0; STATE_COUNT];
        v[0] = 1.0 + 5e-15;
        v[1] = -5e-15;
        let p = PopulationVector::new(v).unwrap();
        assert_eq!(p[1], 0.0);
        v[1] = -1e-6;
        assert!(matches!(
            PopulationVector::new(v),
            Err(Error::NegativePopulation { state: 1, .. })
        ));
        assert!(matches!(
            PopulationVector::new([0.1; STATE_COUNT]),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn rates_match_bath_formula() {
        let cfg = DeviceConfig::reference();
        let temps = BathTemperatures::new(10.0, 5.0, 0.2).unwrap();
        let gen = generator(&cfg, &temps).unwrap();
        for link in gen.links() {
            let t = link.transition;
            let up = decay_rate(-t.bohr, t.terminal, &cfg, &temps).unwrap().rate;
            assert_eq!(gen.rate(t.from, t.to), up);
            if t.terminal == Terminal::L {
                assert_eq!(link.upward, up);
            }
        }
    }
}
