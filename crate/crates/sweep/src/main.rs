use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qtt_core::energetics::currents_from_generator;
use qtt_core::kinetics::{generator, steady_state};
use qtt_core::model::{bohr_frequencies, energy_spectrum, validate};
use qtt_core::{BasisState, Terminal};
use qtt_sweep::output::describe_mode;
use qtt_sweep::summary::summarize;
use qtt_sweep::{figures, load_scenario_file, run_sweep, write_csv, Scenario, ScenarioError};

const EXIT_SCHEMA: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qtt",
    version,
    about = "Qubit-qutrit-qubit thermal transistor simulator"
)]
struct Cli {
    /// Worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Replace the step of the primary sweep axis
    #[arg(long, global = true)]
    step_override: Option<f64>,
    /// Output format for single-point commands
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario and the master-equation hypotheses at its base point
    Validate { scenario: String },
    /// Print the 12 energy levels and 18 Bohr frequencies
    Spectrum { scenario: String },
    /// Print the steady-state populations at the base temperatures
    Steady { scenario: String },
    /// Print terminal and per-transition heat currents at the base temperatures
    Currents { scenario: String },
    /// Run the sweep and write CSV (stdout when -o is absent)
    Sweep {
        scenario: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a bundled scenario, writing <dir>/<name>.csv
    Figure {
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
        /// List bundled scenario names
        #[arg(long)]
        list: bool,
    },
}

enum Failure {
    Schema(String),
    Solver(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Schema(_) => EXIT_SCHEMA,
            Failure::Solver(_) => EXIT_SOLVER,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Schema(m) | Failure::Solver(m) | Failure::Io(m) => m,
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Io { .. } => Failure::Io(e.to_string()),
            _ => Failure::Schema(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// A file path, or failing that, the name of a bundled scenario.
fn resolve(arg: &str, step: Option<f64>) -> Result<Scenario, Failure> {
    let path = Path::new(arg);
    let mut scenario = if path.exists() {
        load_scenario_file(path)?
    } else if let Some(bundled) = figures::figure(arg) {
        bundled?
    } else {
        return Err(Failure::Io(format!(
            "{arg}: no such file or bundled scenario"
        )));
    };
    if let Some(step) = step {
        scenario.sweep = scenario.sweep.with_step(step)?;
    }
    Ok(scenario)
}

fn print_validation(scenario: &Scenario, out: &mut impl Write) -> io::Result<()> {
    let report = validate(&scenario.device, &scenario.temperatures);
    let t = &scenario.temperatures;
    writeln!(
        out,
        "scenario: {} ({} points)",
        scenario.name,
        scenario.point_count()
    )?;
    writeln!(
        out,
        "base temperatures: T_L={} T_M={} T_R={}",
        t.t_l, t.t_m, t.t_r
    )?;
    if let Some(mode) = &scenario.rectification {
        writeln!(out, "rectification: {}", describe_mode(mode))?;
    }
    writeln!(out, "min |omega|: {:.6e}", report.min_abs_bohr)?;
    writeln!(out, "min gap separation: {:.6e}", report.min_gap_separation)?;
    writeln!(out, "max decay rate: {:.6e}", report.max_decay_rate)?;
    for d in &report.degeneracies {
        writeln!(
            out,
            "warning: degenerate {} frequencies {} and {} (separation {:.3e})",
            d.terminal, d.first, d.second, d.separation
        )?;
    }
    writeln!(out, "secular_ok: {}", report.secular_ok)?;
    writeln!(out, "weak_coupling_ok: {}", report.weak_coupling_ok)?;
    writeln!(
        out,
        "conventional_gradient: {}",
        report.conventional_gradient
    )?;
    Ok(())
}

fn print_spectrum(scenario: &Scenario, format: Format, out: &mut impl Write) -> io::Result<()> {
    let spectrum = energy_spectrum(&scenario.device);
    let bohr = bohr_frequencies(&scenario.device);
    match format {
        Format::Csv => {
            writeln!(out, "kind,label,value")?;
            for s in BasisState::ALL {
                writeln!(out, "energy,{s},{:.16e}", spectrum.energy(s))?;
            }
            for (label, w) in bohr.iter() {
                writeln!(out, "bohr,{label},{w:.16e}")?;
            }
        }
        Format::Text => {
            writeln!(out, "energies:")?;
            for s in BasisState::ALL {
                writeln!(out, "  {s}  {:>14.6}", spectrum.energy(s))?;
            }
            writeln!(out, "bohr frequencies:")?;
            for (label, w) in bohr.iter() {
                writeln!(out, "  {label:<10} {w:>14.6}")?;
            }
        }
    }
    Ok(())
}

fn solve(scenario: &Scenario) -> Result<qtt_core::energetics::CurrentReport, Failure> {
    let gen = generator(&scenario.device, &scenario.temperatures)
        .map_err(|e| Failure::Solver(e.to_string()))?;
    let p = steady_state(&gen).map_err(|e| Failure::Solver(e.to_string()))?;
    Ok(currents_from_generator(&p, &gen))
}

fn print_steady(scenario: &Scenario, format: Format, out: &mut impl Write) -> Result<(), Failure> {
    let report = solve(scenario)?;
    let write = |out: &mut dyn Write| -> io::Result<()> {
        if format == Format::Csv {
            writeln!(out, "state,population")?;
        }
        for s in BasisState::ALL {
            let p = report.populations[s.index()];
            match format {
                Format::Csv => writeln!(out, "{s},{p:.16e}")?,
                Format::Text => writeln!(out, "{s}  {p:.10e}")?,
            }
        }
        Ok(())
    };
    write(out).map_err(|e| Failure::Io(e.to_string()))
}

fn print_currents(
    scenario: &Scenario,
    format: Format,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let report = solve(scenario)?;
    let write = |out: &mut dyn Write| -> io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "terminal,from,to,bohr,flux,current")?;
                for c in &report.transitions {
                    let t = &c.transition;
                    writeln!(
                        out,
                        "{},{},{},{:.16e},{:.16e},{:.16e}",
                        t.terminal, t.from, t.to, t.bohr, c.flux, c.current
                    )?;
                }
                for term in Terminal::ALL {
                    writeln!(out, "{term},,,,,{:.16e}", report.total(term))?;
                }
            }
            Format::Text => {
                for term in Terminal::ALL {
                    writeln!(out, "J_{term} = {:.10e}", report.total(term))?;
                }
                writeln!(out, "balance = {:.3e}", report.balance())?;
                for c in &report.transitions {
                    writeln!(
                        out,
                        "  {:<16} omega={:>9.4}  J={:.6e}",
                        c.transition.to_string(),
                        c.transition.bohr,
                        c.current
                    )?;
                }
            }
        }
        Ok(())
    };
    write(out).map_err(|e| Failure::Io(e.to_string()))
}

fn sweep_to(
    scenario: &Scenario,
    threads: Option<usize>,
    dest: Option<&Path>,
) -> Result<(), Failure> {
    let rows =
        run_sweep(scenario, threads).map_err(|e| Failure::Io(format!("thread pool: {e}")))?;
    match dest {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_failure(path, e))?;
            write_csv(scenario, &rows, BufWriter::new(file)).map_err(|e| io_failure(path, e))?;
        }
        None => write_csv(scenario, &rows, io::stdout().lock())
            .map_err(|e| Failure::Io(format!("stdout: {e}")))?,
    }
    for line in summarize(scenario, &rows) {
        eprintln!("{line}");
    }
    if !rows.is_empty() && rows.iter().all(|r| r.outcome.is_err()) {
        return Err(Failure::Solver(format!(
            "{}: every grid point failed",
            scenario.name
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let io_err = |e: io::Error| Failure::Io(format!("stdout: {e}"));
    match cli.command {
        Command::Validate { scenario } => {
            let s = resolve(&scenario, cli.step_override)?;
            print_validation(&s, &mut out).map_err(io_err)
        }
        Command::Spectrum { scenario } => {
            let s = resolve(&scenario, cli.step_override)?;
            print_spectrum(&s, cli.format, &mut out).map_err(io_err)
        }
        Command::Steady { scenario } => print_steady(
            &resolve(&scenario, cli.step_override)?,
            cli.format,
            &mut out,
        ),
        Command::Currents { scenario } => print_currents(
            &resolve(&scenario, cli.step_override)?,
            cli.format,
            &mut out,
        ),
        Command::Sweep { scenario, output } => {
            let s = resolve(&scenario, cli.step_override)?;
            drop(out);
            sweep_to(&s, cli.threads, output.as_deref())
        }
        Command::Figure { name, output, list } => {
            if list {
                for n in figures::names() {
                    writeln!(out, "{n}").map_err(io_err)?;
                }
                return Ok(());
            }
            let name = name.unwrap_or_default();
            let Some(bundled) = figures::figure(&name) else {
                return Err(Failure::Schema(format!(
                    "unknown figure {name:?}; see --list"
                )));
            };
            let mut s = bundled?;
            if let Some(step) = cli.step_override {
                s.sweep = s.sweep.with_step(step)?;
            }
            std::fs::create_dir_all(&output).map_err(|e| io_failure(&output, e))?;
            let file = s
                .output
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
            let dest = output.join(file);
            drop(out);
            sweep_to(&s, cli.threads, Some(&dest))?;
            eprintln!("wrote {}", dest.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
