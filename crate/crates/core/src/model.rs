//! Device description: parameters, spectrum, Bohr frequencies and the
//! catalog of bath-induced transitions.
//!
//! The coupling `σ^z_L ⊗ χ_L + χ_R ⊗ σ^z_R` commutes with every local
//! Hamiltonian, so the 12 product states `|l⟩_L |j⟩ |r⟩_R` are exact
//! eigenstates. Each jump operator is then a single dyad between two of them,
//! and a [`Transition`] record carries everything the dynamics needs.
//!
//! Basis ordering is j-major: `g0g, g0e, e0g, e0e, g1g, …, e2e`, i.e. the flat
//! index of `(l, j, r)` is `4 j + 2 l + r` with `g = 0`, `e = 1`.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::bath;
use crate::error::{Error, Result};

/// Number of product basis states.
pub const STATE_COUNT: usize = 12;

/// Absolute tolerance (energy units) under which two Bohr frequencies, or a
/// Bohr frequency and zero, count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Secular validity requires `min gap separation > SECULAR_FACTOR * max rate`.
pub const SECULAR_FACTOR: f64 = 10.0;

/// Weak coupling requires `max rate < WEAK_COUPLING_FACTOR * min |ω|`.
pub const WEAK_COUPLING_FACTOR: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Terminal {
    L,
    M,
    R,
}

impl Terminal {
    pub const ALL: [Terminal; 3] = [Terminal::L, Terminal::M, Terminal::R];

    pub const fn index(self) -> usize {
        match self {
            Terminal::L => 0,
            Terminal::M => 1,
            Terminal::R => 2,
        }
    }

    pub const fn label(self) -> &'static str {
        match self {
            Terminal::L => "L",
            Terminal::M => "M",
            Terminal::R => "R",
        }
    }
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One value per terminal.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PerTerminal<T> {
    pub l: T,
    pub m: T,
    pub r: T,
}

impl<T: Copy> PerTerminal<T> {
    pub const fn splat(value: T) -> Self {
        PerTerminal {
            l: value,
            m: value,
            r: value,
        }
    }

    pub const fn from_array([l, m, r]: [T; 3]) -> Self {
        PerTerminal { l, m, r }
    }

    pub const fn to_array(self) -> [T; 3] {
        [self.l, self.m, self.r]
    }

    pub fn map<U: Copy>(self, mut f: impl FnMut(T) -> U) -> PerTerminal<U> {
        PerTerminal {
            l: f(self.l),
            m: f(self.m),
            r: f(self.r),
        }
    }
}

impl<T> Index<Terminal> for PerTerminal<T> {
    type Output = T;

    fn index(&self, terminal: Terminal) -> &T {
        match terminal {
            Terminal::L => &self.l,
            Terminal::M => &self.m,
            Terminal::R => &self.r,
        }
    }
}

impl<T> IndexMut<Terminal> for PerTerminal<T> {
    fn index_mut(&mut self, terminal: Terminal) -> &mut T {
        match terminal {
            Terminal::L => &mut self.l,
            Terminal::M => &mut self.m,
            Terminal::R => &mut self.r,
        }
    }
}

/// State of a two-level terminal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Ground,
    Excited,
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::Ground, Spin::Excited];

    pub const fn index(self) -> usize {
        match self {
            Spin::Ground => 0,
            Spin::Excited => 1,
        }
    }

    /// Eigenvalue of the `σ^z` entering the coupling: `+1` on `g`, `-1` on `e`.
    pub const fn sign(self) -> f64 {
        match self {
            Spin::Ground => 1.0,
            Spin::Excited => -1.0,
        }
    }

    const fn excitation(self) -> f64 {
        match self {
            Spin::Ground => 0.0,
            Spin::Excited => 1.0,
        }
    }

    pub const fn symbol(self) -> char {
        match self {
            Spin::Ground => 'g',
            Spin::Excited => 'e',
        }
    }
}

/// Qutrit level `|0⟩`, `|1⟩` or `|2⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Zero,
    One,
    Two,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Zero, Level::One, Level::Two];

    pub const fn index(self) -> usize {
        match self {
            Level::Zero => 0,
            Level::One => 1,
            Level::Two => 2,
        }
    }

    pub const fn symbol(self) -> char {
        match self {
            Level::Zero => '0',
            Level::One => '1',
            Level::Two => '2',
        }
    }
}

/// Qutrit transition channel `i ↔ j` with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    C01,
    C02,
    C12,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::C01, Channel::C02, Channel::C12];

    pub const fn lower(self) -> Level {
        match self {
            Channel::C01 | Channel::C02 => Level::Zero,
            Channel::C12 => Level::One,
        }
    }

    pub const fn upper(self) -> Level {
        match self {
            Channel::C01 => Level::One,
            Channel::C02 | Channel::C12 => Level::Two,
        }
    }

    pub const fn label(self) -> &'static str {
        match self {
            Channel::C01 => "01",
            Channel::C02 => "02",
            Channel::C12 => "12",
        }
    }
}

/// A value per qutrit channel: internal couplings `χ_ij` or bath weights `ν_ij`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Channels {
    pub c01: f64,
    pub c02: f64,
    pub c12: f64,
}

impl Channels {
    pub const fn new(c01: f64, c02: f64, c12: f64) -> Self {
        Channels { c01, c02, c12 }
    }

    pub const fn get(&self, channel: Channel) -> f64 {
        match channel {
            Channel::C01 => self.c01,
            Channel::C02 => self.c02,
            Channel::C12 => self.c12,
        }
    }

    pub fn set(&mut self, channel: Channel, value: f64) {
        match channel {
            Channel::C01 => self.c01 = value,
            Channel::C02 => self.c02 = value,
            Channel::C12 => self.c12 = value,
        }
    }

    /// Energy offsets `q_j = ⟨j|χ|j⟩` of the diagonal qutrit operator
    /// `χ = Σ_{i<j} χ_ij (|i⟩⟨i| - |j⟩⟨j|)`.
    pub const fn offsets(&self) -> [f64; 3] {
        [
            self.c01 + self.c02,
            self.c12 - self.c01,
            -self.c02 - self.c12,
        ]
    }
}

/// Static device parameters (`ħ = k_B = 1`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviceConfig {
    /// Left TLS gap `ω_L`.
    pub omega_l: f64,
    /// Right TLS gap `ω_R`.
    pub omega_r: f64,
    /// Qutrit first excited gap `Ω`.
    pub big_omega: f64,
    /// Detuning `δ` between the second and first excited qutrit levels.
    pub delta: f64,
    /// Left internal couplings `χ^L_ij`.
    pub chi_l: Channels,
    /// Right internal couplings `χ^R_ij`.
    pub chi_r: Channels,
    /// Qutrit–bath channel weights `ν_ij`.
    pub nu: Channels,
    /// System–bath coupling amplitudes `μ_α`.
    pub mu: PerTerminal<f64>,
    /// Spectral cutoffs `κ_α`.
    pub kappa: PerTerminal<f64>,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self::reference()
    }
}

impl DeviceConfig {
    /// Default bath coupling amplitude.
    pub const DEFAULT_MU: f64 = 0.01;
    /// Default spectral cutoff.
    pub const DEFAULT_KAPPA: f64 = 30.0;

    /// The reference transistor: `ω_L = 1, ω_R = 2, Ω = 3, δ = 3`,
    /// `χ^L = (15, 18, 0.1)`, `χ^R = (16, 15, 0.1)`, `μ = 0.01`, `κ = 30`.
    pub const fn reference() -> Self {
        DeviceConfig {
            omega_l: 1.0,
            omega_r: 2.0,
            big_omega: 3.0,
            delta: 3.0,
            chi_l: Channels::new(15.0, 18.0, 0.1),
            chi_r: Channels::new(16.0, 15.0, 0.1),
            nu: Channels::new(1.0, 1.0, 1.0),
            mu: PerTerminal::splat(Self::DEFAULT_MU),
            kappa: PerTerminal::splat(Self::DEFAULT_KAPPA),
        }
    }

    /// Reference device with the heat-stabilizer couplings
    /// `χ^L_01 = 20, χ^L_02 = 25, χ^R_02 = 20`.
    pub const fn stabilizer() -> Self {
        let mut cfg = Self::reference();
        cfg.chi_l.c01 = 20.0;
        cfg.chi_l.c02 = 25.0;
        cfg.chi_r.c02 = 20.0;
        cfg
    }

    /// Turns the qutrit into a qubit: level 2 is detached from both TLSs
    /// (`χ_02 = χ_12 = 0`) and from the middle bath (`ν_02 = ν_12 = 0`).
    pub const fn qubit_analog(mut self) -> Self {
        self.chi_l.c02 = 0.0;
        self.chi_l.c12 = 0.0;
        self.chi_r.c02 = 0.0;
        self.chi_r.c12 = 0.0;
        self.nu.c02 = 0.0;
        self.nu.c12 = 0.0;
        self
    }

    /// Swaps every left parameter with its right counterpart.
    pub const fn mirrored(self) -> Self {
        let mut out = self;
        out.omega_l = self.omega_r;
        out.omega_r = self.omega_l;
        out.chi_l = self.chi_r;
        out.chi_r = self.chi_l;
        out.mu.l = self.mu.r;
        out.mu.r = self.mu.l;
        out.kappa.l = self.kappa.r;
        out.kappa.r = self.kappa.l;
        out
    }

    pub fn chi(&self, terminal: Terminal) -> Option<&Channels> {
        match terminal {
            Terminal::L => Some(&self.chi_l),
            Terminal::R => Some(&self.chi_r),
            Terminal::M => None,
        }
    }

    /// Bare energy of qutrit level `j`: `0`, `Ω`, `Ω + δ`.
    pub fn level_energy(&self, level: Level) -> f64 {
        match level {
            Level::Zero => 0.0,
            Level::One => self.big_omega,
            Level::Two => self.big_omega + self.delta,
        }
    }

    /// Checks the parameter invariants; `χ` may be any finite real.
    pub fn validate(&self) -> Result<()> {
        fn positive(field: &'static str, value: f64) -> Result<()> {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig {
                    field,
                    value,
                    reason: "must be positive and finite",
                })
            }
        }
        fn finite(field: &'static str, value: f64) -> Result<()> {
            if value.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig {
                    field,
                    value,
                    reason: "must be finite",
                })
            }
        }

        positive("omega_L", self.omega_l)?;
        positive("omega_R", self.omega_r)?;
        positive("Omega", self.big_omega)?;
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::InvalidConfig {
                field: "delta",
                value: self.delta,
                reason: "must be non-negative and finite",
            });
        }
        finite("chi_L_01", self.chi_l.c01)?;
        finite("chi_L_02", self.chi_l.c02)?;
        finite("chi_L_12", self.chi_l.c12)?;
        finite("chi_R_01", self.chi_r.c01)?;
        finite("chi_R_02", self.chi_r.c02)?;
        finite("chi_R_12", self.chi_r.c12)?;
        finite("nu_01", self.nu.c01)?;
        finite("nu_02", self.nu.c02)?;
        finite("nu_12", self.nu.c12)?;
        positive("mu_L", self.mu.l)?;
        positive("mu_M", self.mu.m)?;
        positive("mu_R", self.mu.r)?;
        positive("kappa_L", self.kappa.l)?;
        positive("kappa_M", self.kappa.m)?;
        positive("kappa_R", self.kappa.r)?;
        Ok(())
    }
}

/// Temperatures of the three baths.
///
/// `T_L > T_R` is the usual orientation but is not enforced; see
/// [`BathTemperatures::is_conventional`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathTemperatures {
    pub t_l: f64,
    pub t_m: f64,
    pub t_r: f64,
}

impl BathTemperatures {
    pub fn new(t_l: f64, t_m: f64, t_r: f64) -> Result<Self> {
        let temps = BathTemperatures { t_l, t_m, t_r };
        temps.validate()?;
        Ok(temps)
    }

    pub fn uniform(t: f64) -> Result<Self> {
        Self::new(t, t, t)
    }

    pub fn validate(&self) -> Result<()> {
        for terminal in Terminal::ALL {
            let value = self.get(terminal);
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidTemperature { terminal, value });
            }
        }
        Ok(())
    }

    pub const fn get(&self, terminal: Terminal) -> f64 {
        match terminal {
            Terminal::L => self.t_l,
            Terminal::M => self.t_m,
            Terminal::R => self.t_r,
        }
    }

    pub fn set(&mut self, terminal: Terminal, value: f64) {
        match terminal {
            Terminal::L => self.t_l = value,
            Terminal::M => self.t_m = value,
            Terminal::R => self.t_r = value,
        }
    }

    pub fn with(mut self, terminal: Terminal, value: f64) -> Self {
        self.set(terminal, value);
        self
    }

    /// Inverse temperature `β_α`.
    pub fn beta(&self, terminal: Terminal) -> f64 {
        1.0 / self.get(terminal)
    }

    /// `true` when the hot bath sits on the left (`T_L > T_R`).
    pub fn is_conventional(&self) -> bool {
        self.t_l > self.t_r
    }
}

/// Product state `|l⟩_L |j⟩ |r⟩_R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub left: Spin,
    pub level: Level,
    pub right: Spin,
}

impl BasisState {
    /// All states in flat-index order.
    pub const ALL: [BasisState; STATE_COUNT] = {
        let mut out = [BasisState::new(Spin::Ground, Level::Zero, Spin::Ground); STATE_COUNT];
        let mut i = 0;
        while i < STATE_COUNT {
            out[i] = match BasisState::from_index(i) {
                Some(s) => s,
                None => unreachable!(),
            };
            i += 1;
        }
        out
    };

    pub const fn new(left: Spin, level: Level, right: Spin) -> Self {
        BasisState { left, level, right }
    }

    pub const fn index(self) -> usize {
        4 * self.level.index() + 2 * self.left.index() + self.right.index()
    }

    pub const fn from_index(index: usize) -> Option<Self> {
        if index >= STATE_COUNT {
            return None;
        }
        let level = match index / 4 {
            0 => Level::Zero,
            1 => Level::One,
            _ => Level::Two,
        };
        let left = if (index / 2).is_multiple_of(2) {
            Spin::Ground
        } else {
            Spin::Excited
        };
        let right = if index.is_multiple_of(2) {
            Spin::Ground
        } else {
            Spin::Excited
        };
        Some(BasisState { left, level, right })
    }

    /// Three-character label such as `g0e`.
    pub fn label(self) -> [char; 3] {
        [self.left.symbol(), self.level.symbol(), self.right.symbol()]
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.label();
        write!(f, "{a}{b}{c}")
    }
}

/// The 12 eigenenergies and the per-side offsets `q_j^α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectrum {
    pub energies: [f64; STATE_COUNT],
    pub offsets_left: [f64; 3],
    pub offsets_right: [f64; 3],
}

impl Spectrum {
    pub fn energy(&self, state: BasisState) -> f64 {
        self.energies[state.index()]
    }

    /// Index of the lowest-energy state.
    pub fn ground_index(&self) -> usize {
        let mut best = 0;
        for (i, &e) in self.energies.iter().enumerate() {
            if e < self.energies[best] {
                best = i;
            }
        }
        best
    }
}

/// `E_ljr = ε_j + [l=e] ω_L + [r=e] ω_R ± q_j^L ± q_j^R`, with `+` on `g`.
pub fn energy_spectrum(cfg: &DeviceConfig) -> Spectrum {
    let q_l = cfg.chi_l.offsets();
    let q_r = cfg.chi_r.offsets();
    let mut energies = [0.0; STATE_COUNT];
    for state in BasisState::ALL {
        let j = state.level.index();
        energies[state.index()] = cfg.level_energy(state.level)
            + state.left.excitation() * cfg.omega_l
            + state.right.excitation() * cfg.omega_r
            + state.left.sign() * q_l[j]
            + state.right.sign() * q_r[j];
    }
    Spectrum {
        energies,
        offsets_left: q_l,
        offsets_right: q_r,
    }
}

/// Name of one of the 18 distinct Bohr frequencies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BohrLabel {
    /// `ω_{ge,j}^α` for `α ∈ {L, R}`.
    Tls { terminal: Terminal, level: Level },
    /// `ω_{ij,lr}^M`.
    Qutrit {
        channel: Channel,
        left: Spin,
        right: Spin,
    },
}

impl BohrLabel {
    pub const fn terminal(self) -> Terminal {
        match self {
            BohrLabel::Tls { terminal, .. } => terminal,
            BohrLabel::Qutrit { .. } => Terminal::M,
        }
    }
}

impl fmt::Display for BohrLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BohrLabel::Tls { terminal, level } => {
                write!(f, "ge,{}^{}", level.symbol(), terminal)
            }
            BohrLabel::Qutrit {
                channel,
                left,
                right,
            } => write!(
                f,
                "{},{}{}^M",
                channel.label(),
                left.symbol(),
                right.symbol()
            ),
        }
    }
}

/// Closed-form Bohr frequencies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BohrTable {
    /// `ω_{ge,j}^L`, indexed by `j`.
    pub left: [f64; 3],
    /// `ω_{ge,j}^R`, indexed by `j`.
    pub right: [f64; 3],
    /// `ω_{ij,lr}^M`, indexed by channel then `2 l + r`.
    pub qutrit: [[f64; 4]; 3],
}

impl BohrTable {
    pub fn get(&self, label: BohrLabel) -> f64 {
        match label {
            BohrLabel::Tls {
                terminal: Terminal::R,
                level,
            } => self.right[level.index()],
            BohrLabel::Tls { level, .. } => self.left[level.index()],
            BohrLabel::Qutrit {
                channel,
                left,
                right,
            } => self.qutrit[channel as usize][2 * left.index() + right.index()],
        }
    }

    /// All 18 labels: `L` gaps, then `M` by channel and sector, then `R`.
    pub fn labels() -> impl Iterator<Item = BohrLabel> {
        let tls = |terminal| {
            Level::ALL
                .into_iter()
                .map(move |level| BohrLabel::Tls { terminal, level })
        };
        let qutrit = Channel::ALL.into_iter().flat_map(|channel| {
            Spin::ALL.into_iter().flat_map(move |left| {
                Spin::ALL.into_iter().map(move |right| BohrLabel::Qutrit {
                    channel,
                    left,
                    right,
                })
            })
        });
        tls(Terminal::L).chain(qutrit).chain(tls(Terminal::R))
    }

    pub fn iter(&self) -> impl Iterator<Item = (BohrLabel, f64)> + '_ {
        Self::labels().map(move |label| (label, self.get(label)))
    }
}

/// `ω_{ge,j}^α = ω_α - 2 q_j^α` and
/// `ω_{ij,lr}^M = (ε_j - ε_i) + s_l (q_j^L - q_i^L) + s_r (q_j^R - q_i^R)`
/// with `s_g = +1`, `s_e = -1`.
pub fn bohr_frequencies(cfg: &DeviceConfig) -> BohrTable {
    let q_l = cfg.chi_l.offsets();
    let q_r = cfg.chi_r.offsets();
    let left = q_l.map(|q| cfg.omega_l - 2.0 * q);
    let right = q_r.map(|q| cfg.omega_r - 2.0 * q);
    let mut qutrit = [[0.0; 4]; 3];
    for channel in Channel::ALL {
        let (i, j) = (channel.lower(), channel.upper());
        let bare = cfg.level_energy(j) - cfg.level_energy(i);
        let dq_l = q_l[j.index()] - q_l[i.index()];
        let dq_r = q_r[j.index()] - q_r[i.index()];
        for l in Spin::ALL {
            for r in Spin::ALL {
                qutrit[channel as usize][2 * l.index() + r.index()] =
                    bare + l.sign() * dq_l + r.sign() * dq_r;
            }
        }
    }
    BohrTable {
        left,
        right,
        qutrit,
    }
}

/// One bath-induced jump `from ↔ to`.
///
/// `from` is the state with the lower subsystem index (`g` before `e`, lower
/// qutrit level first), so `bohr = E_to - E_from` may be negative. The
/// `from → to` rate is `γ(-bohr)` and `to → from` is `γ(bohr)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub terminal: Terminal,
    pub from: BasisState,
    pub to: BasisState,
    pub label: BohrLabel,
    pub bohr: f64,
    /// Amplitude of the bath operator on this channel: `ν_ij` for `M`, 1 otherwise.
    pub weight: f64,
}

impl Transition {
    /// Zero-weight transitions stay in the catalog but never fire.
    pub fn is_inert(&self) -> bool {
        self.weight == 0.0
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}-{}", self.terminal, self.from, self.to)
    }
}

/// The 24 transitions: 6 for `L` (`j`-major, then `r`), 12 for `M` (channel,
/// then `l`, then `r`) and 6 for `R` (`j`-major, then `l`).
pub fn transition_catalog(cfg: &DeviceConfig) -> Vec<Transition> {
    let table = bohr_frequencies(cfg);
    let mut out = Vec::with_capacity(24);
    for level in Level::ALL {
        for right in Spin::ALL {
            let label = BohrLabel::Tls {
                terminal: Terminal::L,
                level,
            };
            out.push(Transition {
                terminal: Terminal::L,
                from: BasisState::new(Spin::Ground, level, right),
                to: BasisState::new(Spin::Excited, level, right),
                label,
                bohr: table.get(label),
                weight: 1.0,
            });
        }
    }
    for channel in Channel::ALL {
        for left in Spin::ALL {
            for right in Spin::ALL {
                let label = BohrLabel::Qutrit {
                    channel,
                    left,
                    right,
                };
                out.push(Transition {
                    terminal: Terminal::M,
                    from: BasisState::new(left, channel.lower(), right),
                    to: BasisState::new(left, channel.upper(), right),
                    label,
                    bohr: table.get(label),
                    weight: cfg.nu.get(channel),
                });
            }
        }
    }
    for level in Level::ALL {
        for left in Spin::ALL {
            let label = BohrLabel::Tls {
                terminal: Terminal::R,
                level,
            };
            out.push(Transition {
                terminal: Terminal::R,
                from: BasisState::new(left, level, Spin::Ground),
                to: BasisState::new(left, level, Spin::Excited),
                label,
                bohr: table.get(label),
                weight: 1.0,
            });
        }
    }
    out
}

/// Two Bohr frequencies of the same terminal closer than [`DEGENERACY_TOL`]
/// in absolute value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Degeneracy {
    pub terminal: Terminal,
    pub first: BohrLabel,
    pub second: BohrLabel,
    pub separation: f64,
}

/// Diagnostics for the weak-coupling, Markov and secular hypotheses.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    /// Smallest `||ω_a| - |ω_b||` over pairs of active Bohr frequencies of
    /// one terminal; `+∞` when no terminal has two.
    pub min_gap_separation: f64,
    /// Smallest active `|ω|`.
    pub min_abs_bohr: f64,
    /// Largest active decay rate `ν² γ(|ω|)`.
    pub max_decay_rate: f64,
    pub degeneracies: Vec<Degeneracy>,
    pub secular_ok: bool,
    pub weak_coupling_ok: bool,
    /// `T_L > T_R`.
    pub conventional_gradient: bool,
}

impl ValidationReport {
    pub fn is_degenerate(&self) -> bool {
        !self.degeneracies.is_empty() || self.min_abs_bohr <= DEGENERACY_TOL
    }

    /// No degeneracy and both approximations satisfied.
    pub fn all_ok(&self) -> bool {
        !self.is_degenerate() && self.secular_ok && self.weak_coupling_ok
    }
}

/// Checks the master-equation hypotheses. Warns only; never fails.
///
/// Frequencies are compared by absolute value within a terminal, since the
/// dissipator pairs every `ω` with `-ω`. Inert qutrit channels are skipped.
pub fn validate(cfg: &DeviceConfig, temps: &BathTemperatures) -> ValidationReport {
    let table = bohr_frequencies(cfg);
    let active: Vec<(BohrLabel, f64, f64)> = table
        .iter()
        .map(|(label, omega)| {
            let weight = match label {
                BohrLabel::Qutrit { channel, .. } => cfg.nu.get(channel),
                BohrLabel::Tls { .. } => 1.0,
            };
            (label, omega, weight)
        })
        .filter(|&(_, _, weight)| weight != 0.0)
        .collect();

    let mut degeneracies = Vec::new();
    let mut min_gap_separation = f64::INFINITY;
    for terminal in Terminal::ALL {
        let members: Vec<&(BohrLabel, f64, f64)> = active
            .iter()
            .filter(|(label, _, _)| label.terminal() == terminal)
            .collect();
        for (a, first) in members.iter().enumerate() {
            for second in &members[a + 1..] {
                let separation = (first.1.abs() - second.1.abs()).abs();
                min_gap_separation = min_gap_separation.min(separation);
                if separation < DEGENERACY_TOL {
                    degeneracies.push(Degeneracy {
                        terminal,
                        first: first.0,
                        second: second.0,
                        separation,
                    });
                }
            }
        }
    }

    let mut min_abs_bohr = f64::INFINITY;
    let mut max_decay_rate = 0.0_f64;
    for &(label, omega, weight) in &active {
        min_abs_bohr = min_abs_bohr.min(omega.abs());
        if let Ok(rate) = bath::decay_rate(omega.abs(), label.terminal(), cfg, temps) {
            max_decay_rate = max_decay_rate.max(weight * weight * rate.rate);
        }
    }

    ValidationReport {
        min_gap_separation,
        min_abs_bohr,
        max_decay_rate,
        degeneracies,
        secular_ok: min_gap_separation > SECULAR_FACTOR * max_decay_rate,
        weak_coupling_ok: max_decay_rate < WEAK_COUPLING_FACTOR * min_abs_bohr,
        conventional_gradient: temps.is_conventional(),
    }
}
