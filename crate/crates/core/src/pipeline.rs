//! End-to-end runs: forward datasets, closed-loop verification and
//! asymptotic-order tables.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics::{
    delta_asymptotic, first_lattice_index, left_slope_candidates, mu_zero, node_series, Mode,
};
use crate::forward::{delta, nodal_sets, ForwardError, SolverOptions};
use crate::inverse::{
    index_nodes, reconstruct, select, FitOptions, InverseError, NodalDataset, NodalEntry,
    Provenance, ReconstructionOptions, ReconstructionResult,
};
use crate::io::FORMAT_VERSION;
use crate::model::{ProblemConfig, RawConfig};
use crate::numerics::{loglog_slope, poly_fit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("forward stage: {0}")]
    Forward(#[from] ForwardError),
    #[error("inverse stage: {0}")]
    Inverse(#[from] InverseError),
}

/// Nodal sets for every `n` in `ns`, as a dataset labelled by rank.
pub fn forward_dataset(
    config: &ProblemConfig,
    ns: &[i64],
    opts: &SolverOptions,
) -> Result<NodalDataset, ForwardError> {
    let entries = nodal_sets(config, ns, opts)?
        .into_iter()
        .map(|s| NodalEntry {
            n: s.n,
            mu_n: Some(s.mu_n),
            first_index: 0,
            nodes: s.nodes,
        })
        .collect();
    Ok(NodalDataset::new(Provenance::ForwardGenerated, entries)
        .expect("forward nodal sets satisfy the dataset invariants"))
}

/// Even indices from `n_min` to `n_max` inclusive.
pub fn even_range(n_min: i64, n_max: i64) -> Vec<i64> {
    let start = n_min.max(2) + n_min.max(2) % 2;
    (start..=n_max).step_by(2).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub potential: f64,
    pub theta: f64,
    pub mass: f64,
    pub drift: f64,
}

impl Thresholds {
    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::Consistent => Thresholds {
                potential: 5e-2,
                theta: 1e-2,
                mass: 1e-1,
                drift: 1e-2,
            },
            Mode::Paper => Thresholds {
                potential: 5e-2,
                theta: 1e-3,
                mass: 5e-2,
                drift: 1e-2,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    /// `max |V_hat - V|` over the reporting grid.
    pub potential: f64,
    pub theta: f64,
    pub mass: f64,
    pub drift: f64,
}

pub fn error_norms(config: &ProblemConfig, r: &ReconstructionResult) -> ErrorNorms {
    ErrorNorms {
        potential: r.potential_error(|x| config.v(x)),
        theta: (r.theta_hat - config.theta).abs(),
        mass: (r.m_hat - config.mass).abs(),
        drift: (r.c_hat - config.jump().c_even).abs(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, value: Option<f64>, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            threshold,
            pass: value.is_some_and(|v| v <= threshold),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionRow {
    pub n_max: i64,
    pub n_used: Vec<i64>,
    pub slope: f64,
    pub stderr: f64,
    pub best: String,
}

/// Which second-order `x` coefficient the left-half nodes follow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionReport {
    pub candidates: Vec<Candidate>,
    pub rows: Vec<ConventionRow>,
    pub best: String,
    pub stable: bool,
    /// Convention the reconstruction uses in the requested mode.
    pub pipeline: String,
    pub pipeline_matches: bool,
    /// Slope of the `n`-referenced residual (less its `c (rho + K)` part);
    /// it carries the extra `c^2 - d` from expanding `1/mu_n` in `1/n`.
    pub n_referenced_slope: Option<f64>,
}

const SLOPE_WINDOW: (f64, f64) = (PI / 16.0, FRAC_PI_2 - PI / 16.0);

/// Least-squares slope in `x` of per-node residuals on the left window.
fn window_slope(z: &[f64], r: &[f64]) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = z
        .iter()
        .zip(r)
        .filter(|(x, _)| **x >= SLOPE_WINDOW.0 && **x <= SLOPE_WINDOW.1)
        .map(|(x, y)| (*x, *y))
        .unzip();
    poly_fit(&xs, &ys, 2).map(|f| f.slope())
}

/// Per-entry slopes extrapolated to `n -> infinity` as `b + e/n`.
fn extrapolated_slope(entries: &[(i64, f64)], fit: &FitOptions) -> Option<(f64, f64, Vec<i64>)> {
    if entries.len() < 3 {
        return None;
    }
    let ns: Vec<i64> = entries.iter().map(|e| e.0).collect();
    let picked = select(&ns, fit);
    let u: Vec<f64> = picked.iter().map(|&i| 1.0 / ns[i] as f64).collect();
    let y: Vec<f64> = picked.iter().map(|&i| entries[i].1).collect();
    let f = poly_fit(&u, &y, 2)?;
    Some((
        f.intercept(),
        f.stderr[0],
        picked.iter().map(|&i| ns[i]).collect(),
    ))
}

/// Fits the `x`-coefficient of the left-half second-order nodal term.
///
/// For each entry the residual `mu (mu z - j pi - rho(z) - (theta - pi/2))`
/// is fitted linearly in `z` over `[pi/16, 7 pi/16]`; the slopes are then
/// extrapolated in `1/n`. Needs the eigenvalues in the dataset.
pub fn adjudicate_convention(
    config: &ProblemConfig,
    dataset: &NodalDataset,
    n_maxes: &[i64],
    mode: Mode,
) -> Option<ConventionReport> {
    if dataset.entries.iter().any(|e| e.mu_n.is_none()) {
        return None;
    }
    let cal = index_nodes(dataset).ok()?;
    let k = config.theta - FRAC_PI_2;
    let c = config.jump().c_even;
    let fit = FitOptions::default();
    let mut mu_slopes = Vec::new();
    let mut n_slopes = Vec::new();
    for e in &cal.dataset.entries {
        let mu = e.mu_n?;
        let nf = e.n as f64;
        let left: Vec<(f64, f64)> = e
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, z)| **z < FRAC_PI_2)
            .map(|(r, z)| (*z, (e.first_index + r as i64) as f64 * PI))
            .collect();
        let z: Vec<f64> = left.iter().map(|p| p.0).collect();
        let r_mu: Vec<f64> = left
            .iter()
            .map(|(z, jpi)| mu * (mu * z - jpi - config.rho_unchecked(*z) - k))
            .collect();
        let r_n: Vec<f64> = left
            .iter()
            .map(|(z, jpi)| {
                let xi = jpi / nf;
                let rho = config.rho_unchecked(*z);
                nf * nf * (z - xi - c * xi / nf - (rho + k) / nf) - c * (rho + k)
            })
            .collect();
        if let (Some(a), Some(b)) = (window_slope(&z, &r_mu), window_slope(&z, &r_n)) {
            mu_slopes.push((e.n, a));
            n_slopes.push((e.n, b));
        }
    }
    let candidates: Vec<Candidate> = left_slope_candidates(config.theta, config.mass)
        .iter()
        .map(|(name, value)| Candidate {
            name: name.to_string(),
            value: *value,
        })
        .collect();
    let closest = |slope: f64| -> String {
        candidates
            .iter()
            .min_by(|a, b| (a.value - slope).abs().total_cmp(&(b.value - slope).abs()))
            .expect("three candidates")
            .name
            .clone()
    };
    let mut rows = Vec::new();
    for &n_max in n_maxes {
        let sub: Vec<(i64, f64)> = mu_slopes.iter().copied().filter(|e| e.0 <= n_max).collect();
        if let Some((slope, stderr, n_used)) = extrapolated_slope(&sub, &fit) {
            rows.push(ConventionRow {
                n_max,
                n_used,
                slope,
                stderr,
                best: closest(slope),
            });
        }
    }
    let best = rows.last()?.best.clone();
    let stable = rows.iter().all(|r| r.best == best);
    let pipeline = match mode {
        Mode::Consistent => candidates[2].name.clone(),
        Mode::Paper => candidates[1].name.clone(),
    };
    Some(ConventionReport {
        pipeline_matches: pipeline == best,
        pipeline,
        candidates,
        best,
        stable,
        rows,
        n_referenced_slope: extrapolated_slope(&n_slopes, &fit).map(|s| s.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n_max: i64,
    pub errors: Option<ErrorNorms>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub version: u32,
    pub config: RawConfig,
    pub mode: Mode,
    pub n_max: i64,
    pub n_values: Vec<i64>,
    pub reconstruction: Option<ReconstructionResult>,
    pub failure: Option<String>,
    pub errors: Option<ErrorNorms>,
    pub thresholds: Thresholds,
    pub checks: Vec<Check>,
    pub all_pass: bool,
    pub convergence: Vec<ConvergenceRow>,
    pub convention: Option<ConventionReport>,
}

/// Even `n` used by `verify` for a given `n_max`.
pub fn verify_indices(n_max: i64) -> Vec<i64> {
    even_range(if n_max >= 14 { 8 } else { 2 }, n_max)
}

/// Forward-generates even-index nodal sets up to `n_max`, reconstructs and
/// compares with the config. Estimator failures are recorded in the report
/// rather than returned.
pub fn verify(
    config: &ProblemConfig,
    n_max: i64,
    mode: Mode,
    solver: &SolverOptions,
    ropts: &ReconstructionOptions,
) -> Result<VerifyReport, PipelineError> {
    let ns = verify_indices(n_max);
    let dataset = forward_dataset(config, &ns, solver)?;
    Ok(verify_dataset(config, &dataset, mode, ropts))
}

/// The comparison half of [`verify`] for an existing forward dataset.
pub fn verify_dataset(
    config: &ProblemConfig,
    dataset: &NodalDataset,
    mode: Mode,
    ropts: &ReconstructionOptions,
) -> VerifyReport {
    let n_max = dataset.n_max().unwrap_or(0);
    let thresholds = Thresholds::for_mode(mode);
    let (reconstruction, failure) = match reconstruct(dataset, mode, ropts) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let errors = reconstruction.as_ref().map(|r| error_norms(config, r));
    let checks = vec![
        Check::new(
            "potential",
            errors.map(|e| e.potential),
            thresholds.potential,
        ),
        Check::new("theta", errors.map(|e| e.theta), thresholds.theta),
        Check::new("mass", errors.map(|e| e.mass), thresholds.mass),
        Check::new("drift", errors.map(|e| e.drift), thresholds.drift),
    ];
    let mut levels: Vec<i64> = [32, 64, 128, 256, 512, 1024]
        .into_iter()
        .filter(|&m| m < n_max)
        .collect();
    levels.push(n_max);
    let convergence = levels
        .iter()
        .map(|&m| ConvergenceRow {
            n_max: m,
            errors: reconstruct(&dataset.truncated(m), mode, ropts)
                .ok()
                .map(|r| error_norms(config, &r)),
        })
        .collect();
    let mut convention_levels: Vec<i64> = [128, 256, 512]
        .into_iter()
        .filter(|&m| m <= n_max)
        .collect();
    if convention_levels.is_empty() {
        convention_levels.push(n_max);
    }
    VerifyReport {
        version: FORMAT_VERSION,
        config: config.to_raw(),
        mode,
        n_max,
        n_values: dataset.entries.iter().map(|e| e.n).collect(),
        all_pass: checks.iter().all(|c| c.pass),
        reconstruction,
        failure,
        errors,
        thresholds,
        checks,
        convergence,
        convention: adjudicate_convention(config, dataset, &convention_levels, mode),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptRow {
    pub n: i64,
    pub mu_n: f64,
    pub mu_zero: f64,
    /// `|mu_n - mu_n^0|`.
    pub eigenvalue_residual: f64,
    /// `max_j |x_n^j - series|` in consistent mode.
    pub node_residual_consistent: f64,
    /// Same in paper mode.
    pub node_residual_paper: f64,
    /// `|Delta - Delta_asymptotic|` at `mu_n^0 + 1/2`.
    pub delta_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptSlopes {
    pub eigenvalue: Option<f64>,
    pub node_consistent: Option<f64>,
    pub node_paper: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptReport {
    pub version: u32,
    pub config: RawConfig,
    pub rows: Vec<AsymptRow>,
    /// Log-log slopes against `n`; absent with fewer than three rows.
    pub slopes: AsymptSlopes,
}

/// Compares forward eigenvalues, nodes and `Delta` with their expansions.
pub fn asympt(
    config: &ProblemConfig,
    ns: &[i64],
    solver: &SolverOptions,
) -> Result<AsymptReport, PipelineError> {
    let sets = nodal_sets(config, ns, solver)?;
    let j0 = first_lattice_index(config);
    let mut rows = Vec::with_capacity(sets.len());
    for s in &sets {
        let mut worst = [0.0f64; 2];
        for (r, z) in s.nodes.iter().enumerate() {
            let j = j0 + r as i64;
            for (w, mode) in worst.iter_mut().zip([Mode::Consistent, Mode::Paper]) {
                let x = node_series(config, s.n, j, mode).map_err(InverseError::from)?;
                *w = w.max((x - z).abs());
            }
        }
        let mu0 = mu_zero(config, s.n);
        let probe = mu0 + 0.5;
        rows.push(AsymptRow {
            n: s.n,
            mu_n: s.mu_n,
            mu_zero: mu0,
            eigenvalue_residual: (s.mu_n - mu0).abs(),
            node_residual_consistent: worst[0],
            node_residual_paper: worst[1],
            delta_residual: (delta(config, probe, solver)? - delta_asymptotic(config, probe)).abs(),
        });
    }
    let col = |f: fn(&AsymptRow) -> f64| -> Option<f64> {
        let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let y: Vec<f64> = rows.iter().map(f).collect();
        loglog_slope(&x, &y)
    };
    let slopes = AsymptSlopes {
        eigenvalue: col(|r| r.eigenvalue_residual),
        node_consistent: col(|r| r.node_residual_consistent),
        node_paper: col(|r| r.node_residual_paper),
        delta: col(|r| r.delta_residual),
    };
    Ok(AsymptReport {
        version: FORMAT_VERSION,
        config: config.to_raw(),
        rows,
        slopes,
    })
}

/// Column-oriented view of a report table for CSV export.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl AsymptReport {
    pub fn table(&self) -> Table {
        Table {
            columns: vec![
                "n",
                "mu_n",
                "mu_zero",
                "eigenvalue_residual",
                "node_residual_consistent",
                "node_residual_paper",
                "delta_residual",
            ],
            rows: self
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n as f64,
                        r.mu_n,
                        r.mu_zero,
                        r.eigenvalue_residual,
                        r.node_residual_consistent,
                        r.node_residual_paper,
                        r.delta_residual,
                    ]
                })
                .collect(),
        }
    }
}

impl VerifyReport {
    pub fn table(&self) -> Table {
        Table {
            columns: vec!["n_max", "potential", "theta", "mass", "drift"],
            rows: self
                .convergence
                .iter()
                .map(|r| {
                    let e = r.errors;
                    vec![
                        r.n_max as f64,
                        e.map_or(f64::NAN, |e| e.potential),
                        e.map_or(f64::NAN, |e| e.theta),
                        e.map_or(f64::NAN, |e| e.mass),
                        e.map_or(f64::NAN, |e| e.drift),
                    ]
                })
                .collect(),
        }
    }
}
