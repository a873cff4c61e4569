//! Flat run configuration: every knob of every subcommand in one optional
//! bundle. A JSON config file fills fields first, command-line flags
//! override, and defaults land last. Unknown keys in the file are rejected.

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    /// Splitting of qubit 1 in units of the mode frequency.
    #[arg(long)]
    pub omega1: Option<f64>,
    /// Splitting of qubit 2 in units of the mode frequency.
    #[arg(long)]
    pub omega2: Option<f64>,
    /// Coupling of qubit 1.
    #[arg(long)]
    pub g1: Option<f64>,
    /// Coupling of qubit 2.
    #[arg(long)]
    pub g2: Option<f64>,
    /// Output scale for energies and frequencies; inputs stay in mode-
    /// frequency units.
    #[arg(long)]
    pub omega_c: Option<f64>,
    /// Displaced-quantum truncation.
    #[arg(long)]
    pub ntr: Option<usize>,
    /// Neglect threshold for far off-diagonal coupling elements.
    #[arg(long)]
    pub element_tol: Option<f64>,
    /// Sweep descriptor `param:lo:hi:steps` with param one of
    /// g1, g2, beta1, omega1, omega2.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Keep g1 = g2 while sweeping beta1.
    #[arg(long)]
    pub homogeneous: Option<bool>,
    /// Spectrum method: ed, zeroth, first, block-<k>, fock-oracle; trace
    /// method: zeroth, closed-form, oracle, analytic.
    #[arg(long)]
    pub method: Option<String>,
    /// Parity sectors: even, odd, both.
    #[arg(long)]
    pub parity: Option<String>,
    /// Lowest levels per parity sector.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Trace observable: p11, p10, p01, p00, inversion.
    #[arg(long)]
    pub observable: Option<String>,
    /// Coherent amplitude of the oscillator preparation.
    #[arg(long)]
    pub z: Option<f64>,
    /// Trace window end in units of ω₁t/2π.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Samples on the trace grid.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Poisson cutoff of the analytic sums.
    #[arg(long)]
    pub m_cutoff: Option<usize>,
    /// Photon cutoff of the exact propagation (default: heuristic).
    #[arg(long)]
    pub photon_cutoff: Option<usize>,
    /// Gap threshold classifying a true crossing.
    #[arg(long)]
    pub gap_tol: Option<f64>,
    /// Fidelity threshold classifying a true crossing.
    #[arg(long)]
    pub fid_tol: Option<f64>,
    /// Comma-separated truncation schedule for convergence checks.
    #[arg(long)]
    pub schedule: Option<String>,
    /// Convergence tolerance on the lowest levels.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output path; "-" writes to standard output.
    #[arg(long)]
    pub out: Option<String>,
    /// Output format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

impl Options {
    /// Overlay `self` (command line) on top of `base` (config file).
    pub fn over(self, base: Options) -> Options {
        macro_rules! pick {
            ($($field:ident),*) => {
                Options { $($field: self.$field.or(base.$field)),* }
            };
        }
        pick!(
            omega1,
            omega2,
            g1,
            g2,
            omega_c,
            ntr,
            element_tol,
            sweep,
            homogeneous,
            method,
            parity,
            levels,
            observable,
            z,
            tmax,
            samples,
            m_cutoff,
            photon_cutoff,
            gap_tol,
            fid_tol,
            schedule,
            tol,
            out,
            format
        )
    }

    pub fn from_json(text: &str) -> Result<Options, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    #[cfg(test)]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("options serialize")
    }
}

/// A parsed `param:lo:hi:steps` descriptor.
pub fn parse_sweep(s: &str) -> Result<(String, f64, f64, usize), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(CliError::Usage(format!(
            "sweep '{s}' is not param:lo:hi:steps"
        )));
    }
    let lo = parts[1]
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("bad sweep lower bound '{}'", parts[1])))?;
    let hi = parts[2]
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("bad sweep upper bound '{}'", parts[2])))?;
    let steps = parts[3]
        .parse::<usize>()
        .map_err(|_| CliError::Usage(format!("bad sweep step count '{}'", parts[3])))?;
    Ok((parts[0].to_string(), lo, hi, steps))
}

pub fn parse_schedule(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad schedule entry '{p}'")))
        })
        .collect()
}
