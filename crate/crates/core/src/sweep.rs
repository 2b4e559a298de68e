//! Parameter sweeps over `(n, α, representation)` and reconciliation against
//! the published complexity table.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::genpoly::MomentumState;
use crate::levy::LevyIndex;
use crate::measures::{compose_measures, normalize, InfoMeasures, Representation, SampledDensity};
use crate::quad::Tolerance;
use crate::spectrum::{energy_level, Units};
use crate::transform::{inverse_fourier, GridSpec};

/// Regularization applied to non-normalizable cells of the reference table.
pub const TABLE_EPSILON: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Normalization {
    Normalized,
    Raw,
}

impl Normalization {
    pub fn label(self) -> &'static str {
        match self {
            Normalization::Normalized => "normalized",
            Normalization::Raw => "raw",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Numerical knobs shared by every point of a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointOptions {
    /// Excise `|k| < ε` from states that are otherwise not normalizable.
    pub epsilon: Option<f64>,
    pub grid_points: Option<usize>,
    pub k_max: Option<f64>,
    pub tol: Option<Tolerance>,
}

impl PointOptions {
    pub fn validate(&self) -> Result<()> {
        if let Some(eps) = self.epsilon {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")));
            }
        }
        if let Some(tol) = self.tol {
            tol.validate()?;
        }
        if let Some(k) = self.k_max {
            GridSpec::new(k, self.grid_points.unwrap_or(crate::transform::DEFAULT_POINTS))?;
        } else if let Some(p) = self.grid_points {
            GridSpec::new(1.0, p)?;
        }
        Ok(())
    }

    fn grid(&self, state: &MomentumState) -> GridSpec {
        let base = GridSpec::for_state(state);
        GridSpec {
            k_max: self.k_max.unwrap_or(base.k_max),
            points: self.grid_points.unwrap_or(base.points),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// Mass before normalization.
    pub norm_constant: Option<f64>,
    /// Position mass over momentum mass / 2π.
    pub parseval: Option<f64>,
    /// `|ψ|² ~ |x|^{−decay}` far from the origin.
    pub tail_decay: Option<f64>,
    /// Regularization cutoff, when applied.
    pub cutoff: Option<f64>,
    pub grid_points: Option<usize>,
    pub k_max: Option<f64>,
    /// `|φ|² ~ |k|^e` at the origin.
    pub density_exponent: f64,
    pub approximate: bool,
    pub divergent: Vec<&'static str>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointError {
    pub kind: &'static str,
    pub message: String,
}

impl PointError {
    fn from_error(e: &Error) -> Self {
        let kind = match e {
            Error::NonNormalizable { .. } => "non_normalizable",
            Error::DivergentMeasure { .. } => "divergent",
            Error::Domain { .. } | Error::InvalidArgument(_) => "invalid_argument",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::Quadrature(_) => "quadrature",
            _ => "numerical",
        };
        Self { kind, message: e.to_string() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointStatus {
    Ok,
    /// Some measures diverge.
    Flagged,
    Failed,
}

impl PointStatus {
    pub fn label(self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::Flagged => "flagged",
            PointStatus::Failed => "failed",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointRecord {
    pub n: u32,
    pub alpha: f64,
    pub representation: Representation,
    pub normalization: Normalization,
    pub energy: f64,
    pub measures: Option<InfoMeasures>,
    pub error: Option<PointError>,
    pub diagnostics: Diagnostics,
}

impl PointRecord {
    pub fn status(&self) -> PointStatus {
        match &self.measures {
            None => PointStatus::Failed,
            Some(m) if !m.divergent.is_empty() => PointStatus::Flagged,
            Some(_) => PointStatus::Ok,
        }
    }
}

/// Momentum state for `(n, α)`, regularized with `epsilon` only when it is
/// not normalizable.
pub fn prepare_state(n: u32, alpha: f64, epsilon: Option<f64>) -> Result<MomentumState> {
    let state = MomentumState::new(n, LevyIndex::inclusive(alpha)?);
    match epsilon {
        Some(eps) if !state.is_normalizable() => state.with_cutoff(eps),
        _ => {
            state.require_normalizable()?;
            Ok(state)
        }
    }
}

fn raw_density(state: &MomentumState, rep: Representation, opts: &PointOptions, diag: &mut Diagnostics) -> Result<SampledDensity> {
    let density = match rep {
        Representation::Momentum => SampledDensity::momentum(state)?,
        Representation::Position => {
            let grid = opts.grid(state);
            let grid = GridSpec::new(grid.k_max, grid.points)?;
            let pos = inverse_fourier(state, &grid)?;
            diag.parseval = Some(pos.norm_check());
            diag.tail_decay = pos.tail_decay();
            diag.grid_points = Some(grid.points);
            diag.k_max = Some(grid.k_max);
            SampledDensity::position(pos)?
        }
    };
    match opts.tol {
        Some(tol) => density.with_tolerance(tol),
        None => Ok(density),
    }
}

/// One record per requested normalization of a single `(n, α, rep)` point.
/// Failures are recorded in the records, never returned.
pub fn compute_point(
    n: u32,
    alpha: f64,
    rep: Representation,
    norms: &[Normalization],
    opts: &PointOptions,
) -> Vec<PointRecord> {
    let energy = energy_level(n, alpha, &Units::default()).unwrap_or(f64::NAN);
    let mut diag = Diagnostics {
        density_exponent: LevyIndex::inclusive(alpha)
            .map_or(f64::NAN, |l| MomentumState::new(n, l).density_exponent()),
        ..Default::default()
    };
    let density = prepare_state(n, alpha, opts.epsilon).and_then(|state| {
        diag.cutoff = state.cutoff();
        raw_density(&state, rep, opts, &mut diag)
    });
    norms
        .iter()
        .map(|&normalization| {
            let mut diagnostics = diag.clone();
            let result = density.as_ref().map_err(Clone::clone).and_then(|d| {
                diagnostics.norm_constant = Some(d.mass());
                let d = match normalization {
                    Normalization::Normalized => normalize(d)?,
                    Normalization::Raw => d.clone(),
                };
                compose_measures(&d)
            });
            let (measures, error) = match result {
                Ok(m) => {
                    diagnostics.approximate = m.approximate;
                    diagnostics.divergent = m.divergent.clone();
                    (Some(m), None)
                }
                Err(e) => (None, Some(PointError::from_error(&e))),
            };
            PointRecord { n, alpha, representation: rep, normalization, energy, measures, error, diagnostics }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub ns: Vec<u32>,
    pub alphas: Vec<f64>,
    pub representations: Vec<Representation>,
    pub normalization: Normalization,
    pub options: PointOptions,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        for &a in &self.alphas {
            LevyIndex::inclusive(a)?;
        }
        self.options.validate()
    }

    /// Distinct `(n, α, rep)` keys in sort order.
    pub fn points(&self) -> Vec<(u32, f64, Representation)> {
        let mut keys: Vec<(u32, f64, Representation)> = self
            .ns
            .iter()
            .flat_map(|&n| {
                self.alphas
                    .iter()
                    .flat_map(move |&a| self.representations.iter().map(move |&r| (n, a, r)))
            })
            .collect();
        keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
        keys.dedup();
        keys
    }
}

/// Evaluates every point in parallel; the result is ordered by `(n, α, rep)`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<PointRecord>> {
    config.validate()?;
    let norms = [config.normalization];
    Ok(config
        .points()
        .into_par_iter()
        .flat_map_iter(|(n, a, r)| compute_point(n, a, r, &norms, &config.options))
        .collect())
}

/// A published `(C, P)` pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableCell {
    pub n: u32,
    pub alpha: f64,
    pub complexity: f64,
    pub fisher_shannon: f64,
}

const fn cell(n: u32, alpha: f64, complexity: f64, fisher_shannon: f64) -> TableCell {
    TableCell { n, alpha, complexity, fisher_shannon }
}

/// Published LMC complexity and Fisher–Shannon product of the fractional
/// oscillator; the `n = 3` column starts at α = 1.25.
pub const REFERENCE_TABLE: [TableCell; 40] = [
    cell(0, 1.0, 2.7126, 0.0159),
    cell(0, 1.2, 2.5931, 0.0151),
    cell(0, 1.3, 2.5459, 0.0147),
    cell(0, 1.4, 2.5059, 0.0144),
    cell(0, 1.5, 2.4718, 0.0141),
    cell(0, 1.6, 2.4429, 0.0138),
    cell(0, 1.7, 2.4190, 0.0136),
    cell(0, 1.8, 2.3993, 0.0134),
    cell(0, 1.9, 2.3832, 0.0132),
    cell(0, 2.0, 2.3704, 0.0129),
    cell(1, 1.0, 1.8855, 0.0273),
    cell(1, 1.2, 1.5004, 0.0268),
    cell(1, 1.3, 1.2972, 0.0262),
    cell(1, 1.4, 1.1041, 0.0255),
    cell(1, 1.5, 0.9278, 0.0245),
    cell(1, 1.6, 0.7715, 0.0235),
    cell(1, 1.7, 0.6361, 0.0225),
    cell(1, 1.8, 0.5208, 0.0214),
    cell(1, 1.9, 0.4241, 0.0203),
    cell(1, 2.0, 0.3439, 0.0193),
    cell(2, 1.0, 2.8444e-5, 0.0001),
    cell(2, 1.2, 0.0108, 0.0024),
    cell(2, 1.3, 0.0215, 0.0040),
    cell(2, 1.4, 0.0288, 0.0054),
    cell(2, 1.5, 0.0313, 0.0057),
    cell(2, 1.6, 0.0300, 0.0063),
    cell(2, 1.7, 0.0264, 0.0066),
    cell(2, 1.8, 0.0218, 0.0069),
    cell(2, 1.9, 0.0171, 0.0070),
    cell(2, 2.0, 0.0129, 0.0070),
    cell(3, 1.25, 2.0319e-4, 0.0021),
    cell(3, 1.3, 9.3262e-6, 0.0005),
    cell(3, 1.35, 1.4391e-5, 0.0006),
    cell(3, 1.4, 1.9213e-5, 0.0007),
    cell(3, 1.5, 1.5892e-5, 0.0006),
    cell(3, 1.6, 1.7154e-5, 0.0007),
    cell(3, 1.7, 1.1981e-5, 0.0006),
    cell(3, 1.8, 7.0477e-6, 0.0005),
    cell(3, 1.9, 3.8307e-6, 0.0005),
    cell(3, 2.0, 1.9994e-6, 0.0003),
];

/// Candidate reading of the table: which density the functionals were
/// applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Convention {
    pub normalization: Normalization,
    pub representation: Representation,
}

impl Convention {
    pub const ALL: [Convention; 4] = [
        Convention { normalization: Normalization::Normalized, representation: Representation::Position },
        Convention { normalization: Normalization::Normalized, representation: Representation::Momentum },
        Convention { normalization: Normalization::Raw, representation: Representation::Position },
        Convention { normalization: Normalization::Raw, representation: Representation::Momentum },
    ];

    pub fn label(self) -> String {
        format!("{}-{}", self.normalization, self.representation)
    }
}

/// Computed values of one table cell under one convention.
#[derive(Clone, Debug, PartialEq)]
pub struct ConventionValue {
    pub convention: Convention,
    pub complexity: f64,
    pub fisher_shannon: f64,
    /// `|C − C_ref|/C_ref`; `NaN` when the point failed.
    pub complexity_residual: f64,
    pub fisher_shannon_residual: f64,
    pub approximate: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconciliationRow {
    pub cell: TableCell,
    pub values: Vec<ConventionValue>,
    /// The published complexity is below the LMC lower bound of 1.
    pub violates_lmc_bound: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConventionScore {
    pub convention: Convention,
    /// Mean of the finite `(C, P)` residuals.
    pub mean_residual: f64,
    /// Cells whose `(C, P)` pair was not finite.
    pub missing: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BestConvention {
    pub n: u32,
    pub scores: Vec<ConventionScore>,
    pub best: Convention,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconciliationReport {
    pub rows: Vec<ReconciliationRow>,
    pub best: Vec<BestConvention>,
    pub epsilon: f64,
}

impl ReconciliationReport {
    pub fn best_for(&self, n: u32) -> Option<Convention> {
        self.best.iter().find(|b| b.n == n).map(|b| b.best)
    }

    /// `(α, C)` of `n` under `convention`, in table order.
    pub fn complexity_series(&self, n: u32, convention: Convention) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.cell.n == n)
            .filter_map(|r| {
                r.values
                    .iter()
                    .find(|v| v.convention == convention)
                    .map(|v| (r.cell.alpha, v.complexity))
            })
            .collect()
    }
}

fn relative(computed: f64, target: f64) -> f64 {
    if computed.is_finite() {
        (computed - target).abs() / target.abs()
    } else {
        f64::NAN
    }
}

/// Residuals of every table cell whose `n` is in `ns` under all four
/// conventions. Cells that are not normalizable are regularized with
/// `options.epsilon` (default [`TABLE_EPSILON`]) and marked approximate.
pub fn reconcile_table(ns: &[u32], options: &PointOptions) -> Result<ReconciliationReport> {
    let mut opts = *options;
    let epsilon = *opts.epsilon.get_or_insert(TABLE_EPSILON);
    opts.validate()?;
    let cells: Vec<TableCell> = REFERENCE_TABLE.iter().copied().filter(|c| ns.contains(&c.n)).collect();
    let norms = [Normalization::Normalized, Normalization::Raw];
    let reps = [Representation::Position, Representation::Momentum];
    let jobs: Vec<(TableCell, Representation)> =
        cells.iter().flat_map(|&c| reps.iter().map(move |&r| (c, r))).collect();
    let records: Vec<Vec<PointRecord>> = jobs
        .par_iter()
        .map(|&(c, r)| compute_point(c.n, c.alpha, r, &norms, &opts))
        .collect();

    let rows: Vec<ReconciliationRow> = cells
        .iter()
        .enumerate()
        .map(|(i, &cell)| {
            let recs: Vec<&PointRecord> = records[2 * i].iter().chain(&records[2 * i + 1]).collect();
            let values = Convention::ALL
                .iter()
                .map(|&convention| {
                    let rec = recs
                        .iter()
                        .find(|r| r.normalization == convention.normalization && r.representation == convention.representation)
                        .expect("every convention is computed");
                    let (c, p) = rec
                        .measures
                        .as_ref()
                        .map_or((f64::NAN, f64::NAN), |m| (m.complexity, m.fisher_shannon));
                    ConventionValue {
                        convention,
                        complexity: c,
                        fisher_shannon: p,
                        complexity_residual: relative(c, cell.complexity),
                        fisher_shannon_residual: relative(p, cell.fisher_shannon),
                        approximate: rec.diagnostics.approximate,
                        error: rec.error.as_ref().map(|e| e.message.clone()),
                    }
                })
                .collect();
            ReconciliationRow { cell, values, violates_lmc_bound: cell.complexity < 1.0 }
        })
        .collect();

    let mut table_ns: Vec<u32> = cells.iter().map(|c| c.n).collect();
    table_ns.dedup();
    let best = table_ns.into_iter().map(|n| score(&rows, n)).collect();
    Ok(ReconciliationReport { rows, best, epsilon })
}

fn score(rows: &[ReconciliationRow], n: u32) -> BestConvention {
    let scores: Vec<ConventionScore> = Convention::ALL
        .iter()
        .map(|&convention| {
            let mut residuals = Vec::new();
            let mut missing = 0;
            for row in rows.iter().filter(|r| r.cell.n == n) {
                let v = row.values.iter().find(|v| v.convention == convention).expect("computed");
                let pair = [v.complexity_residual, v.fisher_shannon_residual];
                if pair.iter().all(|r| r.is_finite()) {
                    residuals.extend(pair);
                } else {
                    missing += 1;
                }
            }
            let mean_residual = if residuals.is_empty() {
                f64::INFINITY
            } else {
                residuals.iter().sum::<f64>() / residuals.len() as f64
            };
            ConventionScore { convention, mean_residual, missing }
        })
        .collect();
    // full coverage first, then the smallest mean residual
    let best = scores
        .iter()
        .min_by(|a, b| a.missing.cmp(&b.missing).then(a.mean_residual.total_cmp(&b.mean_residual)))
        .expect("four conventions")
        .convention;
    BestConvention { n, scores, best }
}
