//! `tcsolve`: spectra, dynamics, entanglement, crossings, and convergence
//! reports for two qubits coupled to a single bosonic mode without the
//! rotating-wave approximation. Inputs are in units of the mode frequency;
//! results are emitted as CSV or JSON tables.

mod config;
mod emit;
mod error;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tcsolve_core::analysis::{
    convergence_check, detect_crossings, sweep_spectrum, ParitySelection, SweepParameter, SweepSpec,
};
use tcsolve_core::dynamics::{
    coherent_observable, inversion, oracle_observable, revival_k_max, revival_p10, revival_series,
    tau_to_t, time_grid, CoherentPrep, DynamicsTrace, Observable, TraceMethod,
};
use tcsolve_core::entanglement::{
    concurrence_analytic_trace, concurrence_oracle_trace, oracle_cutoff, DEFAULT_M_CUTOFF,
};
use tcsolve_core::exact::{photon_cutoff_heuristic, Method};
use tcsolve_core::{ModelParams, ParitySector, Truncation};

use config::{parse_schedule, parse_sweep, Options};
use emit::{Cell, Table};
use error::CliError;

#[derive(Parser)]
#[command(name = "tcsolve", version, about)]
struct Cli {
    /// Flat JSON config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral sweep by exact diagonalization or a closed-form method.
    Spectrum(Options),
    /// Population dynamics of the displaced-coherent preparation.
    Dynamics(Options),
    /// Two-qubit concurrence of the Bell ⊗ coherent preparation.
    Concurrence(Options),
    /// Same-parity level-crossing detection over a sweep.
    Crossings(Options),
    /// Residual and spectrum-membership report of quasi-exact states.
    Verify(Options),
    /// Truncation convergence of the lowest levels.
    Converge(Options),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version on stdout with success
            if e.use_stderr() {
                eprint!("error[E_USAGE]: {e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file_opts = match &cli.config {
        Some(path) => Options::from_json(&std::fs::read_to_string(path)?)?,
        None => Options::default(),
    };
    match cli.command {
        Command::Spectrum(opts) => spectrum(opts.over(file_opts)),
        Command::Dynamics(opts) => dynamics(opts.over(file_opts)),
        Command::Concurrence(opts) => concurrence(opts.over(file_opts)),
        Command::Crossings(opts) => crossings(opts.over(file_opts)),
        Command::Verify(opts) => verify(opts.over(file_opts)),
        Command::Converge(opts) => converge(opts.over(file_opts)),
    }
}

fn require(value: Option<f64>, name: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{name} is required")))
}

fn model(opts: &Options) -> Result<ModelParams, CliError> {
    let omega1 = require(opts.omega1, "omega1")?;
    let omega2 = require(opts.omega2, "omega2")?;
    let g1 = opts.g1.unwrap_or(0.0);
    let g2 = opts.g2.unwrap_or(0.0);
    Ok(ModelParams::two_qubit(omega1, omega2, g1, g2)?)
}

fn truncation(opts: &Options) -> Result<Truncation, CliError> {
    let mut t = Truncation::default();
    if let Some(n) = opts.ntr {
        t.n_tr = n;
    }
    if let Some(tol) = opts.element_tol {
        t = Truncation::new(t.n_tr, tol)?;
    }
    Ok(t)
}

fn out_and_format(opts: &Options) -> (String, String) {
    (
        opts.out.clone().unwrap_or_else(|| "-".into()),
        opts.format.clone().unwrap_or_else(|| "csv".into()),
    )
}

/// Output energy scale; inputs are always in units of the mode frequency.
fn energy_scale(opts: &Options) -> f64 {
    opts.omega_c.unwrap_or(1.0)
}

fn sweep_spec(opts: &Options, default_method: Method) -> Result<SweepSpec, CliError> {
    let descriptor = opts
        .sweep
        .as_deref()
        .ok_or_else(|| CliError::Usage("--sweep param:lo:hi:steps is required".into()))?;
    let (param, lo, hi, steps) = parse_sweep(descriptor)?;
    let method = match opts.method.as_deref() {
        Some(m) => Method::parse(m)?,
        None => default_method,
    };
    let parity = match opts.parity.as_deref() {
        Some(p) => ParitySelection::parse(p)?,
        None => ParitySelection::Both,
    };
    Ok(SweepSpec {
        parameter: SweepParameter::parse(&param)?,
        lo,
        hi,
        steps,
        method,
        parity,
        levels: opts.levels.unwrap_or(8),
        homogeneous: opts.homogeneous.unwrap_or(false),
    })
}

fn spectrum(opts: Options) -> Result<(), CliError> {
    let params = model(&opts)?;
    let trunc = truncation(&opts)?;
    let spec = sweep_spec(&opts, Method::Ed)?;
    let scale = energy_scale(&opts);
    let table = sweep_spectrum(&params, &spec, &trunc)?;
    let mut out = Table::new(vec!["param", "parity", "level_index", "energy", "method"]);
    for row in &table.rows {
        for (kappa, energies) in &row.sectors {
            for (index, energy) in energies.iter().enumerate() {
                out.push(vec![
                    Cell::Float(row.value),
                    Cell::Text(kappa.label().into()),
                    Cell::Int(index as i64),
                    Cell::Float(energy * scale),
                    Cell::Text(spec.method.label()),
                ]);
            }
        }
    }
    let (path, format) = out_and_format(&opts);
    out.emit(&format, &path)
}

fn trace_table(trace: &DynamicsTrace) -> Table {
    let mut out = Table::new(vec!["t_over_2pi_omega1", "value", "observable", "method"]);
    for (tau, value) in trace.times.iter().zip(&trace.values) {
        out.push(vec![
            Cell::Float(*tau),
            Cell::Float(*value),
            Cell::Text(trace.observable.label().into()),
            Cell::Text(trace.method.label().into()),
        ]);
    }
    out
}

fn dynamics(opts: Options) -> Result<(), CliError> {
    let params = model(&opts)?;
    let observable = Observable::parse(
        opts.observable
            .as_deref()
            .ok_or_else(|| CliError::Usage("--observable is required".into()))?,
    )?;
    if observable == Observable::Concurrence {
        return Err(CliError::Usage("use the concurrence subcommand".into()));
    }
    let z = require(opts.z, "z")?;
    let tmax = require(opts.tmax, "tmax")?;
    let samples = opts.samples.unwrap_or(2048);
    let grid = time_grid(tmax, samples);
    let prep = CoherentPrep::new(z).with_m_cutoff(opts.m_cutoff.unwrap_or(30));
    let method = opts.method.as_deref().unwrap_or("zeroth");
    let trace = match method {
        "zeroth" => match observable {
            Observable::Inversion => inversion(&params, &prep, &grid)?,
            _ => coherent_observable(&params, &prep, observable, &grid)?,
        },
        "closed-form" => {
            let t_max = tau_to_t(&params, tmax)?;
            let values: Vec<f64> = match observable {
                Observable::P10 => {
                    let k_max = revival_k_max(&params, z, 2.0 * params.omega(1), t_max)?;
                    grid.iter()
                        .map(|&tau| revival_p10(&params, z, tau_to_t(&params, tau)?, k_max))
                        .collect::<Result<_, _>>()?
                }
                Observable::Inversion => {
                    let k_max = revival_k_max(&params, z, params.omega(1), t_max)?;
                    grid.iter()
                        .map(|&tau| {
                            revival_series(
                                &params,
                                z,
                                params.omega(1),
                                tau_to_t(&params, tau)?,
                                k_max,
                            )
                            .map(|s| -s)
                        })
                        .collect::<Result<_, _>>()?
                }
                _ => {
                    return Err(CliError::Usage(
                        "closed-form traces cover p10 and inversion".into(),
                    ))
                }
            };
            DynamicsTrace {
                times: grid.clone(),
                values,
                observable,
                method: TraceMethod::ClosedForm,
            }
        }
        "oracle" => {
            let cutoff = opts
                .photon_cutoff
                .unwrap_or_else(|| photon_cutoff_heuristic(&params, z));
            oracle_observable(&params, &prep, observable, &grid, cutoff)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown dynamics method '{other}'"
            )))
        }
    };
    let (path, format) = out_and_format(&opts);
    trace_table(&trace).emit(&format, &path)
}

fn concurrence(opts: Options) -> Result<(), CliError> {
    let params = model(&opts)?;
    let z = require(opts.z, "z")?;
    let tmax = require(opts.tmax, "tmax")?;
    let samples = opts.samples.unwrap_or(2048);
    let grid = time_grid(tmax, samples);
    let method = opts.method.as_deref().unwrap_or("analytic");
    let trace = match method {
        "analytic" => concurrence_analytic_trace(
            &params,
            z,
            opts.m_cutoff.unwrap_or(DEFAULT_M_CUTOFF),
            &grid,
        )?,
        "oracle" => {
            let cutoff = opts
                .photon_cutoff
                .unwrap_or_else(|| oracle_cutoff(&params, z));
            concurrence_oracle_trace(&params, z, &grid, cutoff)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown concurrence method '{other}'"
            )))
        }
    };
    let (path, format) = out_and_format(&opts);
    trace_table(&trace).emit(&format, &path)
}

fn crossings(opts: Options) -> Result<(), CliError> {
    let params = model(&opts)?;
    let trunc = truncation(&opts)?;
    let spec = sweep_spec(&opts, Method::Ed)?;
    let scale = energy_scale(&opts);
    let gap_tol = opts.gap_tol.unwrap_or(1e-6);
    let fid_tol = opts.fid_tol.unwrap_or(0.01);
    let table = sweep_spectrum(&params, &spec, &trunc)?;
    let mut out = Table::new(vec![
        "param",
        "parity",
        "level_low",
        "level_high",
        "min_gap",
        "fidelity",
        "classification",
        "refined",
    ]);
    for kappa in spec.parity.sectors() {
        for r in detect_crossings(&table, kappa, gap_tol, fid_tol)? {
            out.push(vec![
                Cell::Float(r.parameter),
                Cell::Text(r.parity.label().into()),
                Cell::Int(r.levels.0 as i64),
                Cell::Int(r.levels.1 as i64),
                Cell::Float(r.min_gap * scale),
                Cell::Float(r.fidelity),
                Cell::Text(r.classification.label().into()),
                Cell::Int(r.refined as i64),
            ]);
        }
    }
    let (path, format) = out_and_format(&opts);
    out.emit(&format, &path)
}

fn verify(opts: Options) -> Result<(), CliError> {
    let params = model(&opts)?;
    let trunc = truncation(&opts)?;
    let scale = energy_scale(&opts);
    let reports = tcsolve_core::analysis::verify_quasi_exact(&params, &trunc)?;
    let mut out = Table::new(vec![
        "condition",
        "energy",
        "q",
        "residual",
        "membership_gap",
    ]);
    for r in &reports {
        out.push(vec![
            Cell::Text(r.state.condition.label()),
            Cell::Float(r.state.energy * scale),
            match r.state.q {
                Some(q) => Cell::Float(q),
                None => Cell::Text(String::new()),
            },
            Cell::Float(r.residual * scale),
            Cell::Float(r.membership_gap * scale),
        ]);
    }
    let (path, format) = out_and_format(&opts);
    out.emit(&format, &path)
}

fn converge(opts: Options) -> Result<(), CliError> {
    let params = model(&opts)?;
    let schedule = parse_schedule(opts.schedule.as_deref().unwrap_or("8,16,24,32,40,48,56,64"))?;
    let k_levels = opts.levels.unwrap_or(12);
    let tol = opts.tol.unwrap_or(1e-8);
    let parity = match opts.parity.as_deref() {
        Some(p) => ParitySelection::parse(p)?,
        None => ParitySelection::Both,
    };
    let mut out = Table::new(vec!["parity", "converged_n_tr", "levels", "tol"]);
    for kappa in parity.sectors() {
        let n = convergence_check(&params, kappa, &schedule, k_levels, tol)?;
        out.push(vec![
            Cell::Text(ParitySector::label(&kappa).into()),
            Cell::Int(n as i64),
            Cell::Int(k_levels as i64),
            Cell::Float(tol),
        ]);
    }
    let (path, format) = out_and_format(&opts);
    out.emit(&format, &path)
}
