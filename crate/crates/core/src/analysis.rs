//! Parameter sweeps, state fidelity, level-crossing detection and
//! refinement, quasi-exact verification, and truncation-convergence control.

use serde::{Deserialize, Serialize};

use crate::analytic::{
    block_truncated_spectrum, first_order_spectrum, hamiltonian_residual, quasi_exact_states,
    zeroth_spectrum, QuasiExactState,
};
use crate::error::{Error, Result};
use crate::exact::{solve_ed, to_fock_representation, Method};
use crate::model::{ModelParams, ParitySector, Truncation};
use crate::parallel::map_ordered;
use crate::state::{QuantumState, StateBasis};

/// Which model parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParameter {
    G1,
    G2,
    /// Total displacement `β₁ = (g₁+g₂)/ω_c`. By default `g₁` is held and
    /// `g₂` absorbs the sweep; with the homogeneous link both couplings
    /// move together (`g₁ = g₂ = β₁ω_c/2`).
    Beta1,
    Omega1,
    Omega2,
}

impl SweepParameter {
    pub fn label(&self) -> &'static str {
        match self {
            SweepParameter::G1 => "g1",
            SweepParameter::G2 => "g2",
            SweepParameter::Beta1 => "beta1",
            SweepParameter::Omega1 => "omega1",
            SweepParameter::Omega2 => "omega2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "g1" => Ok(SweepParameter::G1),
            "g2" => Ok(SweepParameter::G2),
            "beta1" => Ok(SweepParameter::Beta1),
            "omega1" => Ok(SweepParameter::Omega1),
            "omega2" => Ok(SweepParameter::Omega2),
            _ => Err(Error::InvalidParams(format!(
                "unknown sweep parameter '{s}'"
            ))),
        }
    }
}

/// Parity sectors included in a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParitySelection {
    Even,
    Odd,
    Both,
}

impl ParitySelection {
    pub fn sectors(&self) -> Vec<ParitySector> {
        match self {
            ParitySelection::Even => vec![ParitySector::Even],
            ParitySelection::Odd => vec![ParitySector::Odd],
            ParitySelection::Both => vec![ParitySector::Even, ParitySector::Odd],
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(ParitySelection::Even),
            "odd" => Ok(ParitySelection::Odd),
            "both" => Ok(ParitySelection::Both),
            _ => Err(Error::InvalidParams(format!(
                "unknown parity selection '{s}'"
            ))),
        }
    }
}

/// A one-parameter spectral sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub method: Method,
    pub parity: ParitySelection,
    /// Lowest levels retained per parity sector.
    pub levels: usize,
    /// Keep `g₁ = g₂` during β₁ sweeps.
    pub homogeneous: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lo >= self.hi || self.lo.is_nan() || self.hi.is_nan() {
            return Err(Error::InvalidParams(format!(
                "sweep range [{}, {}] must be increasing",
                self.lo, self.hi
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidParams("sweep needs at least 2 steps".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// Levels of one sweep point, grouped by parity sector (ascending within
/// each sector).
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub sectors: Vec<(ParitySector, Vec<f64>)>,
}

/// Deterministic sweep output plus the context needed to re-solve at
/// refined parameter values.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub base: ModelParams,
    pub spec: SweepSpec,
    pub trunc: Truncation,
    pub rows: Vec<SweepRow>,
}

/// The base parameters with one sweep value applied.
pub fn apply_parameter(
    base: &ModelParams,
    parameter: SweepParameter,
    homogeneous: bool,
    value: f64,
) -> Result<ModelParams> {
    let mut omegas = base.omegas().to_vec();
    let mut couplings = base.couplings().to_vec();
    if base.n_qubits() < 2 {
        return Err(Error::InvalidParams(
            "sweeps address two-qubit parameters".into(),
        ));
    }
    match parameter {
        SweepParameter::G1 => couplings[0] = value,
        SweepParameter::G2 => couplings[1] = value,
        SweepParameter::Omega1 => omegas[0] = value,
        SweepParameter::Omega2 => omegas[1] = value,
        SweepParameter::Beta1 => {
            if homogeneous {
                let g = 0.5 * value * base.omega_c();
                couplings[0] = g;
                couplings[1] = g;
            } else {
                couplings[1] = value * base.omega_c() - couplings[0];
            }
        }
    }
    ModelParams::new(base.omega_c(), omegas, couplings)
}

/// Lowest `levels` energies of one parity sector by the requested method.
pub fn method_energies(
    params: &ModelParams,
    kappa: ParitySector,
    method: Method,
    levels: usize,
    trunc: &Truncation,
) -> Result<Vec<f64>> {
    let energies = match method {
        Method::Ed => solve_ed(params, kappa, trunc)?.energies(),
        Method::FockOracle => {
            let cutoff = crate::exact::photon_cutoff_heuristic(params, 0.0).max(trunc.n_tr + 20);
            crate::exact::solve_fock_oracle(params, cutoff)?.sector_energies(kappa)
        }
        Method::Zeroth => {
            let mut e: Vec<f64> = zeroth_spectrum(params, kappa, levels + 8)?
                .iter()
                .map(|l| l.energy)
                .collect();
            e.sort_by(f64::total_cmp);
            e
        }
        Method::First => first_order_spectrum(params, kappa, (levels + 8).max(1))?
            .iter()
            .map(|l| l.energy)
            .collect(),
        Method::BlockK(k) => {
            block_truncated_spectrum(params, kappa, k, (levels + 8).max(k))?.energies()
        }
    };
    Ok(energies.into_iter().take(levels).collect())
}

fn sweep_row(
    base: &ModelParams,
    spec: &SweepSpec,
    trunc: &Truncation,
    value: f64,
) -> Result<SweepRow> {
    let params = apply_parameter(base, spec.parameter, spec.homogeneous, value)?;
    let mut sectors = Vec::new();
    for kappa in spec.parity.sectors() {
        sectors.push((
            kappa,
            method_energies(&params, kappa, spec.method, spec.levels, trunc)?,
        ));
    }
    Ok(SweepRow { value, sectors })
}

/// Run a sweep; points are evaluated in parallel with the `parallel`
/// feature but assembled in sweep order either way.
pub fn sweep_spectrum(
    base: &ModelParams,
    spec: &SweepSpec,
    trunc: &Truncation,
) -> Result<SweepTable> {
    spec.validate()?;
    let values = spec.values();
    let rows: Vec<Result<SweepRow>> = map_ordered(&values, |&v| sweep_row(base, spec, trunc, v));
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        base: base.clone(),
        spec: *spec,
        trunc: *trunc,
        rows,
    })
}

/// Sequential reference implementation of [`sweep_spectrum`]; the rayon
/// path must produce identical output.
pub fn sweep_spectrum_seq(
    base: &ModelParams,
    spec: &SweepSpec,
    trunc: &Truncation,
) -> Result<SweepTable> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.steps);
    for v in spec.values() {
        rows.push(sweep_row(base, spec, trunc, v)?);
    }
    Ok(SweepTable {
        base: base.clone(),
        spec: *spec,
        trunc: *trunc,
        rows,
    })
}

/// Squared overlap `|<a|b>|²` of two states in a common Fock
/// representation; normalization-insensitive, global-phase invariant.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    if a.basis() != StateBasis::Fock || b.basis() != StateBasis::Fock {
        return Err(Error::BasisMismatch(
            "fidelity requires both states in the Fock representation".into(),
        ));
    }
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::InvalidParams("fidelity of a null state".into()));
    }
    Ok(a.inner(b)?.norm_sqr() / (na * na * nb * nb))
}

/// Squared projection norm of `a` onto the span of an orthonormal set, for
/// fidelity against a degenerate subspace.
pub fn subspace_fidelity(a: &QuantumState, basis: &[QuantumState]) -> Result<f64> {
    let na = a.norm();
    if na == 0.0 {
        return Err(Error::InvalidParams("fidelity of a null state".into()));
    }
    let mut total = 0.0;
    for b in basis {
        total += fidelity(a, b)?;
    }
    Ok(total)
}

/// Crossing vs avoided-crossing classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CrossingClass {
    Crossing,
    Avoided,
    Ambiguous,
}

impl CrossingClass {
    pub fn label(&self) -> &'static str {
        match self {
            CrossingClass::Crossing => "crossing",
            CrossingClass::Avoided => "avoided",
            CrossingClass::Ambiguous => "ambiguous",
        }
    }
}

/// A refined gap minimum between two same-parity levels.
#[derive(Debug, Clone, Serialize)]
pub struct CrossingReport {
    /// Sweep-parameter value at the gap minimum.
    pub parameter: f64,
    pub parity: ParitySector,
    /// Adjacent level indices (ascending order within the sector).
    pub levels: (usize, usize),
    /// Minimal gap in units of ω_c.
    pub min_gap: f64,
    /// Fidelity between the lower states on the two sides of the minimum.
    pub fidelity: f64,
    pub classification: CrossingClass,
    /// False when the bracket was not unimodal and the point is reported
    /// at the raw sweep resolution.
    pub refined: bool,
}

/// Find and refine local gap minima between same-parity adjacent levels.
///
/// Minima are golden-section refined until the bracket collapses, so a true
/// crossing reports a gap at numerical-degeneracy level while an avoided
/// crossing reports its physical gap; the parameter is quoted well beyond
/// the 1e-4 reporting guarantee. Classification follows the fidelity of the
/// lower state across the minimum: `crossing` needs `fidelity < fid_tol`
/// and `min_gap < gap_tol`, fidelity ≥ 0.9 reads `avoided`, anything else
/// `ambiguous`.
pub fn detect_crossings(
    table: &SweepTable,
    parity: ParitySector,
    gap_tol: f64,
    fid_tol: f64,
) -> Result<Vec<CrossingReport>> {
    if !matches!(table.spec.method, Method::Ed | Method::First) {
        return Err(Error::InvalidParams(
            "crossing classification needs eigenvectors: sweep with method ed or first".into(),
        ));
    }
    let series: Vec<(f64, &Vec<f64>)> = table
        .rows
        .iter()
        .filter_map(|row| {
            row.sectors
                .iter()
                .find(|(k, _)| *k == parity)
                .map(|(_, energies)| (row.value, energies))
        })
        .collect();
    if series.len() < 3 {
        return Err(Error::InvalidParams(
            "sweep too short for crossing detection".into(),
        ));
    }
    let n_levels = series[0].1.len();
    let mut reports = Vec::new();
    for level in 0..n_levels.saturating_sub(1) {
        let gaps: Vec<f64> = series
            .iter()
            .map(|(_, e)| e[level + 1] - e[level])
            .collect();
        for j in 1..gaps.len() - 1 {
            if gaps[j] < gaps[j - 1] && gaps[j] <= gaps[j + 1] {
                reports.push(refine_crossing(
                    table,
                    parity,
                    level,
                    (series[j - 1].0, series[j].0, series[j + 1].0),
                    gaps[j],
                    gap_tol,
                    fid_tol,
                )?);
            }
        }
    }
    reports.sort_by(|a, b| a.parameter.total_cmp(&b.parameter));
    Ok(reports)
}

fn gap_at(table: &SweepTable, parity: ParitySector, level: usize, value: f64) -> Result<f64> {
    let params = apply_parameter(
        &table.base,
        table.spec.parameter,
        table.spec.homogeneous,
        value,
    )?;
    let e = method_energies(
        &params,
        parity,
        table.spec.method,
        table.spec.levels,
        &table.trunc,
    )?;
    Ok(e[level + 1] - e[level])
}

/// Fock representation of the `level`-th state of one sector at a sweep
/// value, by the table's own method.
fn state_at(
    table: &SweepTable,
    parity: ParitySector,
    level: usize,
    value: f64,
    n_quanta: usize,
) -> Result<QuantumState> {
    let params = apply_parameter(
        &table.base,
        table.spec.parameter,
        table.spec.homogeneous,
        value,
    )?;
    let coeffs = match table.spec.method {
        Method::Ed => {
            let ed = solve_ed(&params, parity, &table.trunc)?;
            ed.levels[level]
                .coeffs
                .clone()
                .expect("ed provides coefficients")
        }
        Method::First => {
            let kept = first_order_spectrum(&params, parity, (table.spec.levels + 8).max(1))?;
            crate::analytic::first_order_folded_coeffs(
                &params,
                &kept[level],
                table.trunc.n_quanta(),
            )?
        }
        _ => unreachable!("detect_crossings restricts the method"),
    };
    let folded = QuantumState::folded(&params, parity, crate::state::Frame::Rotated, &coeffs)?;
    to_fock_representation(&params, &folded, n_quanta)
}

fn refine_crossing(
    table: &SweepTable,
    parity: ParitySector,
    level: usize,
    bracket: (f64, f64, f64),
    raw_gap: f64,
    gap_tol: f64,
    fid_tol: f64,
) -> Result<CrossingReport> {
    let (mut a, mid, mut b) = bracket;
    // golden-section minimization of the gap
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = gap_at(table, parity, level, x1)?;
    let mut f2 = gap_at(table, parity, level, x2)?;
    for _ in 0..70 {
        if b - a < 1e-12 * (1.0 + mid.abs()) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = gap_at(table, parity, level, x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = gap_at(table, parity, level, x2)?;
        }
    }
    let parameter = 0.5 * (a + b);
    let min_gap = gap_at(table, parity, level, parameter)?;
    // non-unimodal bracket: refinement failed to improve on the raw grid
    let refined = min_gap <= raw_gap + 1e-12;
    let report_at = if refined { parameter } else { mid };

    // fidelity of the lower state across the minimum, in a common Fock grid
    let span = table.spec.hi - table.spec.lo;
    let step = span / (table.spec.steps - 1) as f64;
    let delta = (0.5 * step).clamp(1e-5, 2e-3);
    let params_at = |value: f64| {
        apply_parameter(
            &table.base,
            table.spec.parameter,
            table.spec.homogeneous,
            value,
        )
    };
    let beta_max = params_at(report_at - delta)?
        .beta_max()
        .max(params_at(report_at + delta)?.beta_max());
    let n_quanta = table.trunc.n_tr + (8.0 * beta_max).ceil() as usize + 21;
    let before = state_at(table, parity, level, report_at - delta, n_quanta)?;
    let after = state_at(table, parity, level, report_at + delta, n_quanta)?;
    let fid = fidelity(&before, &after)?;
    let classification = if fid < fid_tol && min_gap < gap_tol {
        CrossingClass::Crossing
    } else if fid >= 0.9 {
        CrossingClass::Avoided
    } else {
        CrossingClass::Ambiguous
    };
    Ok(CrossingReport {
        parameter: report_at,
        parity,
        levels: (level, level + 1),
        min_gap,
        fidelity: fid,
        classification,
        refined,
    })
}

/// A verified quasi-exact state: residual in its own frame and distance of
/// its energy to the nearest exact-diagonalization level of the matching
/// parity sector.
#[derive(Debug)]
pub struct QuasiExactReport {
    pub state: QuasiExactState,
    pub residual: f64,
    pub membership_gap: f64,
}

/// Verify every quasi-exact state the parameters support against both the
/// residual test and spectrum membership.
pub fn verify_quasi_exact(
    params: &ModelParams,
    trunc: &Truncation,
) -> Result<Vec<QuasiExactReport>> {
    let states = quasi_exact_states(params, trunc.n_tr)?;
    if states.is_empty() {
        return Ok(Vec::new());
    }
    let spectra = [
        solve_ed(params, ParitySector::Even, trunc)?,
        solve_ed(params, ParitySector::Odd, trunc)?,
    ];
    let mut reports = Vec::new();
    for qs in states {
        let residual = hamiltonian_residual(params, &qs.state, qs.energy)?;
        let sector = match qs.state.parity() {
            Some(ParitySector::Even) => &spectra[0],
            Some(ParitySector::Odd) => &spectra[1],
            None => unreachable!("quasi-exact states carry parity"),
        };
        let membership_gap = sector
            .energies()
            .iter()
            .map(|e| (e - qs.energy).abs())
            .fold(f64::MAX, f64::min);
        reports.push(QuasiExactReport {
            state: qs,
            residual,
            membership_gap,
        });
    }
    Ok(reports)
}

/// Smallest truncation in the schedule whose lowest `k_levels` levels move
/// less than `tol` against the next entry.
pub fn convergence_check(
    params: &ModelParams,
    kappa: ParitySector,
    schedule: &[usize],
    k_levels: usize,
    tol: f64,
) -> Result<usize> {
    if schedule.len() < 2 {
        return Err(Error::InvalidParams(
            "convergence schedule needs at least 2 entries".into(),
        ));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams(
            "convergence schedule must increase".into(),
        ));
    }
    let solve = |n_tr: usize| -> Result<Vec<f64>> {
        let trunc = Truncation {
            n_tr,
            element_tol: 1e-6,
        };
        Ok(solve_ed(params, kappa, &trunc)?
            .energies()
            .into_iter()
            .take(k_levels)
            .collect())
    };
    let mut prev = solve(schedule[0])?;
    for pair in schedule.windows(2) {
        let next = solve(pair[1])?;
        let moved = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if moved < tol {
            return Ok(pair[0]);
        }
        prev = next;
    }
    Err(Error::NoConvergence(format!(
        "lowest {k_levels} levels still move >= {tol:e} at n_tr = {}",
        schedule[schedule.len() - 1]
    )))
}
