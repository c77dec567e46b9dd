//! Reconstruction of `theta`, `V` and `m` from a dense set of nodal points
//! of even-indexed eigenfunctions.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics::{first_lattice_index, node_series_on, AsymptoticError, Mode};
use crate::model::ProblemConfig;
use crate::numerics::{cubic_interp, linear_extrapolate, median, poly_fit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InverseError {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("x = {x}: only {usable} usable entries (need 3)")]
    InsufficientData { x: f64, usable: usize },
    #[error("x = {x}: no entry has nodes on the same side of pi/2")]
    SideMismatch { x: f64 },
    #[error("no index shift gives a stable offset (spread {spread:.3})")]
    NoStableShift { spread: f64 },
    #[error("auxiliary estimates unusable: {0}")]
    AuxInconsistent(String),
    #[error("reconstructed theta = {0} is outside (0, pi)")]
    ThetaOutOfRange(f64),
    #[error("slope fallback gave m^2 = {0} < 0")]
    NegativeMassSquare(f64),
    #[error("x = {0} lies in an exclusion zone or outside (0, pi)")]
    BadPoint(f64),
    #[error(transparent)]
    Asymptotic(#[from] AsymptoticError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ForwardGenerated,
    SyntheticAsymptotic,
    ExternalFile,
}

/// Nodes of one eigenfunction. Node of rank `r` carries the lattice index
/// `first_index + r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalEntry {
    pub n: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_n: Option<f64>,
    #[serde(default)]
    pub first_index: i64,
    pub nodes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalDataset {
    pub provenance: Provenance,
    pub entries: Vec<NodalEntry>,
}

impl NodalDataset {
    /// Validates the entries and sorts them by `n`.
    pub fn new(provenance: Provenance, mut entries: Vec<NodalEntry>) -> Result<Self, InverseError> {
        entries.sort_by_key(|e| e.n);
        for w in entries.windows(2) {
            if w[0].n == w[1].n {
                return Err(InverseError::InvalidDataset(format!(
                    "duplicate n = {}",
                    w[0].n
                )));
            }
        }
        for e in &entries {
            if e.n < 1 {
                return Err(InverseError::InvalidDataset(format!("n = {} < 1", e.n)));
            }
            if e.nodes.len() as i64 != e.n {
                return Err(InverseError::InvalidDataset(format!(
                    "n = {} has {} nodes",
                    e.n,
                    e.nodes.len()
                )));
            }
            if e.nodes.iter().any(|z| !(*z > 0.0 && *z < PI)) {
                return Err(InverseError::InvalidDataset(format!(
                    "n = {}: node outside (0, pi)",
                    e.n
                )));
            }
            if e.nodes.windows(2).any(|w| w[1] <= w[0]) {
                return Err(InverseError::InvalidDataset(format!(
                    "n = {}: nodes not strictly increasing",
                    e.n
                )));
            }
        }
        Ok(NodalDataset {
            provenance,
            entries,
        })
    }

    pub fn n_max(&self) -> Option<i64> {
        self.entries.last().map(|e| e.n)
    }

    /// Keeps the entries with `n <= n_max`.
    pub fn truncated(&self, n_max: i64) -> NodalDataset {
        NodalDataset {
            provenance: self.provenance,
            entries: self
                .entries
                .iter()
                .filter(|e| e.n <= n_max)
                .cloned()
                .collect(),
        }
    }
}

/// Scaled deviations `s = n z - j pi` of the nodes on one side of `pi/2`.
#[derive(Debug, Clone, Default)]
struct Side {
    z: Vec<f64>,
    s: Vec<f64>,
    j: Vec<i64>,
}

#[derive(Debug, Clone)]
struct Prepared {
    n: i64,
    sides: [Side; 2],
}

/// Even-index entries with a fixed lattice labelling.
#[derive(Debug, Clone)]
pub struct CalibratedDataset {
    pub dataset: NodalDataset,
    pub shift_delta: i64,
    prepared: Vec<Prepared>,
}

const PROBE: f64 = PI / 4.0;
const SPREAD_LIMIT: f64 = 0.5;
const MIN_SIDE_NODES: usize = 4;

fn side_of(x: f64) -> usize {
    usize::from(x > FRAC_PI_2)
}

fn prepare(entry: &NodalEntry) -> Prepared {
    let mut sides: [Side; 2] = Default::default();
    let nf = entry.n as f64;
    for (r, &z) in entry.nodes.iter().enumerate() {
        let j = entry.first_index + r as i64;
        let xi = j as f64 * PI / nf;
        // A node whose lattice point sits across pi/2 belongs to neither
        // branch cleanly.
        if side_of(z) != side_of(xi) || xi == FRAC_PI_2 {
            continue;
        }
        let side = &mut sides[side_of(z)];
        side.z.push(z);
        side.s.push(nf * z - j as f64 * PI);
        side.j.push(j);
    }
    Prepared { n: entry.n, sides }
}

/// Assigns lattice indices `j = rank + first_index + delta` with one shift
/// `delta` in `-2..=2` for all even entries.
///
/// The spread of `n z - j pi` across `n` does not depend on `delta`, so it
/// only gates the data (it must stay below 0.5 at the probe `pi/4` over the
/// three largest `n`); `delta` is the shift that puts the offset at `x -> 0`
/// into `(-pi/2, pi/2]`. Applying this to an already calibrated dataset
/// returns `delta = 0`.
pub fn index_nodes(dataset: &NodalDataset) -> Result<CalibratedDataset, InverseError> {
    let even: Vec<&NodalEntry> = dataset.entries.iter().filter(|e| e.n % 2 == 0).collect();
    if even.len() < 3 {
        return Err(InverseError::InsufficientData {
            x: 0.0,
            usable: even.len(),
        });
    }
    let top = &even[even.len() - 3..];
    let probe: Vec<f64> = top
        .iter()
        .map(|e| {
            let r = nearest(&e.nodes, PROBE);
            e.n as f64 * e.nodes[r] - (e.first_index + r as i64) as f64 * PI
        })
        .collect();
    let spread = probe.iter().cloned().fold(f64::MIN, f64::max)
        - probe.iter().cloned().fold(f64::MAX, f64::min);
    if spread.is_nan() || spread >= SPREAD_LIMIT {
        return Err(InverseError::NoStableShift { spread });
    }
    let origin = top
        .iter()
        .map(|e| e.n as f64 * e.nodes[0] - e.first_index as f64 * PI)
        .sum::<f64>()
        / top.len() as f64;
    let delta = ((origin - FRAC_PI_2) / PI).ceil() as i64;
    if !(-2..=2).contains(&delta) {
        return Err(InverseError::NoStableShift { spread });
    }
    let entries: Vec<NodalEntry> = even
        .iter()
        .map(|e| NodalEntry {
            first_index: e.first_index + delta,
            ..(*e).clone()
        })
        .collect();
    let prepared = entries.iter().map(prepare).collect();
    Ok(CalibratedDataset {
        dataset: NodalDataset {
            provenance: dataset.provenance,
            entries,
        },
        shift_delta: delta,
        prepared,
    })
}

fn nearest(sorted: &[f64], x: f64) -> usize {
    let p = sorted.partition_point(|&v| v < x);
    if p == 0 {
        0
    } else if p == sorted.len() || x - sorted[p - 1] <= sorted[p] - x {
        p - 1
    } else {
        p
    }
}

/// Controls the extrapolation in `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// At most this many entries enter each fit.
    pub max_entries: usize,
    /// Entries come from `n >= n_max / 2^octaves` when that leaves at least
    /// three.
    pub octaves: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_entries: 8,
            octaves: 2.0,
        }
    }
}

/// Estimated limit at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub x: f64,
    pub value: f64,
    pub stderr: f64,
    pub n_used: Vec<i64>,
    pub shift_delta: i64,
}

/// Picks entries log-spaced over the top octaves of the usable `n`.
pub(crate) fn select(ns: &[i64], fit: &FitOptions) -> Vec<usize> {
    let k = fit.max_entries.max(3);
    let n_max = *ns.last().expect("caller checks non-empty") as f64;
    let floor = n_max / 2f64.powf(fit.octaves);
    let pool: Vec<usize> = (0..ns.len()).filter(|&i| ns[i] as f64 >= floor).collect();
    if pool.len() < 3 {
        return (ns.len().saturating_sub(k)..ns.len()).collect();
    }
    if pool.len() <= k {
        return pool;
    }
    let lo = (ns[pool[0]] as f64).ln();
    let hi = n_max.ln();
    let mut chosen = BTreeSet::new();
    for t in 0..k {
        let target = lo + (hi - lo) * t as f64 / (k - 1) as f64;
        let best = pool
            .iter()
            .copied()
            .min_by(|&a, &b| {
                let da = ((ns[a] as f64).ln() - target).abs();
                let db = ((ns[b] as f64).ln() - target).abs();
                da.total_cmp(&db)
            })
            .expect("pool is non-empty");
        chosen.insert(best);
    }
    chosen.into_iter().collect()
}

/// Interpolates a per-node quantity at `x` for every usable entry, then
/// extrapolates `value(n) = L + a/n (+ b/n^2)` to `n -> infinity`.
fn extrapolate<F>(
    cal: &CalibratedDataset,
    x: f64,
    fit: &FitOptions,
    per_node: F,
) -> Result<LimitEstimate, InverseError>
where
    F: Fn(i64, &Side, usize) -> f64,
{
    if !(x > 0.0 && x < PI) || x == FRAC_PI_2 {
        return Err(InverseError::BadPoint(x));
    }
    let side = side_of(x);
    let usable: Vec<&Prepared> = cal
        .prepared
        .iter()
        .filter(|p| p.sides[side].z.len() >= MIN_SIDE_NODES)
        .collect();
    if usable.is_empty() {
        return Err(InverseError::SideMismatch { x });
    }
    let ns: Vec<i64> = usable.iter().map(|p| p.n).collect();
    let picked = select(&ns, fit);
    if picked.len() < 3 {
        return Err(InverseError::InsufficientData {
            x,
            usable: picked.len(),
        });
    }
    let mut u = Vec::with_capacity(picked.len());
    let mut y = Vec::with_capacity(picked.len());
    for &i in &picked {
        let p = usable[i];
        let sd = &p.sides[side];
        let vals: Vec<f64> = (0..sd.z.len()).map(|k| per_node(p.n, sd, k)).collect();
        u.push(1.0 / p.n as f64);
        y.push(cubic_interp(&sd.z, &vals, x));
    }
    let terms = if picked.len() >= 5 { 3 } else { 2 };
    let f = poly_fit(&u, &y, terms).ok_or(InverseError::InsufficientData {
        x,
        usable: picked.len(),
    })?;
    Ok(LimitEstimate {
        x,
        value: f.intercept(),
        stderr: f.stderr[0],
        n_used: picked.iter().map(|&i| ns[i]).collect(),
        shift_delta: cal.shift_delta,
    })
}

/// First-order limit `Phi(x) = lim n (z_n - j pi / n)` from the node nearest
/// `x` on the same side, interpolated across neighbouring nodes.
pub fn estimate_phi(
    cal: &CalibratedDataset,
    x: f64,
    fit: &FitOptions,
) -> Result<LimitEstimate, InverseError> {
    extrapolate(cal, x, fit, |_, sd, k| sd.s[k])
}

/// First-order results needed by the second-order estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiAux {
    pub theta_hat: f64,
    pub c_hat: f64,
    /// `Phi` estimates on the left and right reporting grids.
    pub phi: [Vec<(f64, f64)>; 2],
}

impl PsiAux {
    fn phi_hat(&self, x: f64) -> f64 {
        let grid = &self.phi[side_of(x)];
        let xs: Vec<f64> = grid.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = grid.iter().map(|p| p.1).collect();
        cubic_interp(&xs, &ys, x)
    }

    fn check(&self, x: f64) -> Result<(), InverseError> {
        let grid = &self.phi[side_of(x)];
        if grid.len() < 4 || grid.iter().any(|p| !p.1.is_finite()) {
            return Err(InverseError::AuxInconsistent(format!(
                "Phi grid on the side of x = {x} has {} usable points",
                grid.len()
            )));
        }
        if !(self.theta_hat.is_finite() && self.c_hat.is_finite()) {
            return Err(InverseError::AuxInconsistent(
                "theta or c not finite".into(),
            ));
        }
        Ok(())
    }
}

/// Second-order limit
/// `Psi(x) = lim n^2 (z - j pi/n - c j pi/n^2 - (rho(p) + K)/n)`.
///
/// `rho + K` is taken from the estimated `Phi` minus `c x`, so the offset
/// `K` cancels. Paper mode evaluates it at the lattice point
/// `p = j pi / n`, consistent mode at the node `p = z`.
pub fn estimate_psi(
    cal: &CalibratedDataset,
    x: f64,
    aux: &PsiAux,
    mode: Mode,
    fit: &FitOptions,
) -> Result<LimitEstimate, InverseError> {
    aux.check(x)?;
    let c = aux.c_hat;
    extrapolate(cal, x, fit, |n, sd, k| {
        let nf = n as f64;
        let s = sd.s[k];
        match mode {
            Mode::Paper => {
                let xi = sd.j[k] as f64 * PI / nf;
                nf * (s - aux.phi_hat(xi))
            }
            Mode::Consistent => nf * (s - aux.phi_hat(sd.z[k])) + c * s,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionOptions {
    pub points_per_half: usize,
    /// Distance kept from 0, pi/2 and pi.
    pub exclusion: f64,
    /// Moving-average window applied to the derivative (odd, 1 disables).
    pub smoothing_window: usize,
    pub fit: FitOptions,
}

impl Default for ReconstructionOptions {
    fn default() -> Self {
        ReconstructionOptions {
            points_per_half: 64,
            exclusion: PI / 64.0,
            smoothing_window: 5,
            fit: FitOptions::default(),
        }
    }
}

impl ReconstructionOptions {
    /// Uniform reporting grids on `[e, pi/2 - e]` and `[pi/2 + e, pi - e]`.
    pub fn grid(&self) -> [Vec<f64>; 2] {
        let k = self.points_per_half.max(4);
        let e = self.exclusion;
        let line = |a: f64, b: f64| -> Vec<f64> {
            (0..k)
                .map(|i| a + (b - a) * i as f64 / (k - 1) as f64)
                .collect()
        };
        [line(e, FRAC_PI_2 - e), line(FRAC_PI_2 + e, PI - e)]
    }
}

/// One-sided limits of `Phi` and `Psi` at the ends of the half intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeLimits {
    pub phi1_0: f64,
    pub phi1_half: f64,
    pub phi2_half: f64,
    pub phi2_pi: f64,
    pub psi1_0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassRoute {
    Formula,
    SlopeFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub shift_delta: i64,
    pub limits: EdgeLimits,
    pub phi: Vec<LimitEstimate>,
    pub psi: Vec<LimitEstimate>,
    pub excluded_zones: Vec<(f64, f64)>,
    pub mass_route: MassRoute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub theta_hat: f64,
    pub c_hat: f64,
    pub m_hat: f64,
    pub v_hat: Vec<(f64, f64)>,
    pub mode: Mode,
    pub diagnostics: Diagnostics,
}

impl ReconstructionResult {
    /// Maximum of `|V_hat - V|` over the reporting grid.
    pub fn potential_error<F: Fn(f64) -> f64>(&self, v: F) -> f64 {
        self.v_hat
            .iter()
            .map(|(x, y)| (y - v(*x)).abs())
            .fold(0.0, f64::max)
    }
}

fn derivative(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h = xs[1] - xs[0];
    (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * ys[0] + 4.0 * ys[1] - ys[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * ys[n - 1] - 4.0 * ys[n - 2] + ys[n - 3]) / (2.0 * h)
            } else {
                (ys[i + 1] - ys[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

/// Centred moving average, shrinking symmetrically at the ends.
fn smooth(ys: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let n = ys.len();
    (0..n)
        .map(|i| {
            let w = half.min(i).min(n - 1 - i);
            let s = &ys[i - w..=i + w];
            s.iter().sum::<f64>() / s.len() as f64
        })
        .collect()
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

fn edge(grid: &[(f64, f64)], at_start: bool, x0: f64) -> f64 {
    let pts: Vec<&(f64, f64)> = if at_start {
        grid.iter().take(3).collect()
    } else {
        grid.iter().rev().take(3).collect()
    };
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    linear_extrapolate(&xs, &ys, x0)
}

fn estimate_grid<F>(grid: &[f64], f: F) -> Result<Vec<LimitEstimate>, InverseError>
where
    F: Fn(f64) -> Result<LimitEstimate, InverseError> + Sync,
{
    grid.par_iter().map(|&x| f(x)).collect()
}

/// Runs the full pipeline: index calibration, `Phi` on the grid, edge
/// limits, `c`, `theta`, `V`, then `Psi` and `m`.
pub fn reconstruct(
    dataset: &NodalDataset,
    mode: Mode,
    opts: &ReconstructionOptions,
) -> Result<ReconstructionResult, InverseError> {
    let cal = index_nodes(dataset)?;
    let grids = opts.grid();
    let fit = &opts.fit;

    let phi_est: Vec<Vec<LimitEstimate>> = grids
        .iter()
        .map(|g| estimate_grid(g, |x| estimate_phi(&cal, x, fit)))
        .collect::<Result<_, _>>()?;
    let phi: [Vec<(f64, f64)>; 2] =
        [0, 1].map(|s| phi_est[s].iter().map(|e| (e.x, e.value)).collect());

    let phi1_0 = edge(&phi[0], true, 0.0);
    let phi1_half = edge(&phi[0], false, FRAC_PI_2);
    let phi2_half = edge(&phi[1], true, FRAC_PI_2);
    let phi2_pi = edge(&phi[1], false, PI);
    let c_hat = (phi2_pi + phi1_half - phi2_half - phi1_0) / PI;

    let theta_hat = match mode {
        Mode::Paper => FRAC_PI_2 - (-phi1_0).atan(),
        Mode::Consistent => phi1_0 + FRAC_PI_2,
    };
    if !(theta_hat > 0.0 && theta_hat < PI) {
        return Err(InverseError::ThetaOutOfRange(theta_hat));
    }

    let mut xs_all = Vec::new();
    let mut v_all = Vec::new();
    let mut integral = 0.0;
    let mut length = 0.0;
    for side in &phi {
        let xs: Vec<f64> = side.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = side.iter().map(|p| p.1).collect();
        let dv: Vec<f64> = smooth(&derivative(&xs, &ys), opts.smoothing_window.max(1))
            .into_iter()
            .map(|d| d - c_hat)
            .collect();
        integral += trapezoid(&xs, &dv);
        length += xs[xs.len() - 1] - xs[0];
        xs_all.extend(xs);
        v_all.extend(dv);
    }
    let mean = integral / length;
    let v_hat: Vec<(f64, f64)> = xs_all
        .iter()
        .zip(&v_all)
        .map(|(x, v)| (*x, v - mean))
        .collect();

    let aux = PsiAux {
        theta_hat,
        c_hat,
        phi: phi.clone(),
    };
    let psi_est: Vec<Vec<LimitEstimate>> = grids
        .iter()
        .map(|g| estimate_grid(g, |x| estimate_psi(&cal, x, &aux, mode, fit)))
        .collect::<Result<_, _>>()?;
    let psi_left: Vec<(f64, f64)> = psi_est[0].iter().map(|e| (e.x, e.value)).collect();
    let psi1_0 = edge(&psi_left, true, 0.0);

    let (m_hat, mass_route) =
        mass_estimate(mode, theta_hat, c_hat, phi1_0, psi1_0, &psi_left, &v_hat)?;

    let e = opts.exclusion;
    Ok(ReconstructionResult {
        theta_hat,
        c_hat,
        m_hat,
        v_hat,
        mode,
        diagnostics: Diagnostics {
            shift_delta: cal.shift_delta,
            limits: EdgeLimits {
                phi1_0,
                phi1_half,
                phi2_half,
                phi2_pi,
                psi1_0,
            },
            phi: phi_est.concat(),
            psi: psi_est.concat(),
            excluded_zones: vec![(0.0, e), (FRAC_PI_2 - e, FRAC_PI_2 + e), (PI - e, PI)],
            mass_route,
        },
    })
}

fn mass_estimate(
    mode: Mode,
    theta_hat: f64,
    c_hat: f64,
    phi1_0: f64,
    psi1_0: f64,
    psi_left: &[(f64, f64)],
    v_hat: &[(f64, f64)],
) -> Result<(f64, MassRoute), InverseError> {
    let degenerate = theta_hat.cos().abs() < 0.05;
    if !degenerate {
        let m = match mode {
            Mode::Paper => (phi1_0 * PI * c_hat + PI * psi1_0) / (-PI * phi1_0),
            Mode::Consistent => {
                (psi1_0 - c_hat * (theta_hat - FRAC_PI_2)) / (theta_hat.sin() * theta_hat.cos())
            }
        };
        return Ok((m, MassRoute::Formula));
    }
    // m^2 / 2 is the x-slope of Psi_1 once the c V part is removed.
    let xs: Vec<f64> = psi_left.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = psi_left.iter().map(|p| p.1).collect();
    let slopes: Vec<f64> = derivative(&xs, &ys)
        .iter()
        .zip(v_hat)
        .map(|(d, (_, v))| d - c_hat * v)
        .collect();
    let m2 = 2.0 * median(&slopes);
    if m2 < 0.0 {
        return Err(InverseError::NegativeMassSquare(m2));
    }
    Ok((m2.sqrt(), MassRoute::SlopeFallback))
}

/// Nodes of `theta = 1`, `m = 2`, `V = -cos x` written directly as the
/// two-term series in `j pi / n`, with `j = 1..=n` for each even `n`.
///
/// Left of `pi/2` (in the lattice point `t = j pi / n`):
/// `t + (-sin t - cot 1)/n + (2 cot 1 + 2 t csc^2 1)/n^2`;
/// right of it the offset is `-4 cot 1` and the second-order term
/// `20 cot 1 + 12 cos 1 cot 1 + 12 pi cot^2 1 - 3 sin 1 - 3 pi + 8 t csc^2 1`.
///
/// For small `n` (up to 20) the truncated series pushes the last node past
/// `pi`; such `n` are left out of the dataset.
pub fn synthetic_cosine_dataset(ns: &[i64]) -> Result<NodalDataset, InverseError> {
    let cot = 1.0 / 1f64.tan();
    let csc2 = 1.0 / 1f64.sin().powi(2);
    let right_const =
        20.0 * cot + 12.0 * 1f64.cos() * cot + 12.0 * PI * cot * cot - 3.0 * 1f64.sin() - 3.0 * PI;
    let entries = ns
        .iter()
        .map(|&n| {
            let nf = n as f64;
            let nodes = (1..=n)
                .map(|j| {
                    let t = j as f64 * PI / nf;
                    if t < FRAC_PI_2 {
                        t + (-t.sin() - cot) / nf + (2.0 * cot + 2.0 * t * csc2) / (nf * nf)
                    } else {
                        t + (-t.sin() - 4.0 * cot) / nf + (right_const + 8.0 * t * csc2) / (nf * nf)
                    }
                })
                .collect();
            NodalEntry {
                n,
                mu_n: None,
                first_index: 1,
                nodes,
            }
        })
        .filter(|e| is_nodal_set(&e.nodes))
        .collect();
    NodalDataset::new(Provenance::SyntheticAsymptotic, entries)
}

fn is_nodal_set(nodes: &[f64]) -> bool {
    nodes.iter().all(|z| *z > 0.0 && *z < PI) && nodes.windows(2).all(|w| w[1] > w[0])
}

/// Nodes from the asymptotic series of `config` in the given mode.
///
/// Each half interval keeps the zeros of its own branch of the series, so
/// nodes near `pi/2` come from whichever branch actually lands on its side;
/// labels start at the first lattice index. Entries whose count comes out
/// different from `n` (the truncated series is too coarse at small `n`) are
/// left out.
pub fn synthetic_dataset(
    config: &ProblemConfig,
    ns: &[i64],
    mode: Mode,
) -> Result<NodalDataset, InverseError> {
    let j0 = first_lattice_index(config);
    let mut entries = Vec::new();
    for &n in ns {
        let mut nodes = Vec::with_capacity(n as usize);
        for j in j0 - 1..=j0 + n {
            let left = node_series_on(config, n, j, mode, false)?;
            if left > 0.0 && left < FRAC_PI_2 {
                nodes.push(left);
            }
        }
        for j in j0 - 1..=j0 + n {
            let right = node_series_on(config, n, j, mode, true)?;
            if right > FRAC_PI_2 && right < PI {
                nodes.push(right);
            }
        }
        if nodes.len() == n as usize && nodes.windows(2).all(|w| w[0] < w[1]) {
            entries.push(NodalEntry {
                n,
                mu_n: None,
                first_index: j0,
                nodes,
            });
        }
    }
    NodalDataset::new(Provenance::SyntheticAsymptotic, entries)
}
