//! Shooting solver: fixed-step RK4 on both half intervals with the jump
//! applied as an exact map at `pi/2`, the characteristic function, the
//! eigenvalues and the nodal points.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics::mu_zero;
use crate::model::{ComponentPair, ProblemConfig};

pub const DEFAULT_STEPS_PER_HALF: usize = 4096;

const SCAN_STEP: f64 = 0.01;
const INITIAL_HALF_WINDOW: f64 = 0.5;
const WINDOW_DOUBLINGS: usize = 3;
const ROOT_WIDTH: f64 = 1e-12;
const MAX_BISECTIONS: usize = 50;
/// Nodes closer than this to an endpoint are boundary zeros, not nodes.
const ENDPOINT_GUARD: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForwardError {
    #[error("solution overflowed at x = {x} for mu = {mu}")]
    NonFinite { mu: f64, x: f64 },
    #[error("no eigenvalue for n = {n} within {anchor} +/- {half_width}")]
    NoRootInWindow {
        n: i64,
        anchor: f64,
        half_width: f64,
    },
    #[error("n = {n}: roots {roots:?} are equidistant from the anchor")]
    MultipleRootsAmbiguous { n: i64, roots: Vec<f64> },
    #[error("n = {n}: expected {expected} nodes, found {found}")]
    NodeCountMismatch {
        n: i64,
        expected: usize,
        found: usize,
    },
    #[error("invalid index n = {0}")]
    InvalidIndex(i64),
    #[error("eigenvalues not increasing at n = {0}")]
    NotIncreasing(i64),
}

/// Integrator resolution.
///
/// The step on each half is `h = (pi/2) / N` with
/// `N = max(steps_per_half, |mu| (pi/2) / max_phase_step)` rounded up to an
/// even number, so the phase advance per step never exceeds
/// `max_phase_step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub steps_per_half: usize,
    pub max_phase_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            steps_per_half: DEFAULT_STEPS_PER_HALF,
            max_phase_step: 0.02,
        }
    }
}

impl SolverOptions {
    pub fn with_steps(steps_per_half: usize) -> Self {
        SolverOptions {
            steps_per_half,
            ..Default::default()
        }
    }

    pub fn steps_for(&self, mu: f64) -> usize {
        let by_phase = if self.max_phase_step > 0.0 {
            (mu.abs() * FRAC_PI_2 / self.max_phase_step).ceil() as usize
        } else {
            0
        };
        let n = self.steps_per_half.max(by_phase).max(2);
        n + n % 2
    }
}

/// Potential samples on the uniform grid of both halves.
struct Grid {
    steps: usize,
    h: f64,
    mass: f64,
    /// `V` at grid points, left half then right half.
    nodes: [Vec<f64>; 2],
    /// `V` at step midpoints.
    mids: [Vec<f64>; 2],
}

impl Grid {
    fn new(config: &ProblemConfig, steps: usize) -> Self {
        let h = FRAC_PI_2 / steps as f64;
        let sample = |base: f64, offset: f64, count: usize| -> Vec<f64> {
            (0..count)
                .map(|i| config.v(base + (i as f64 + offset) * h))
                .collect()
        };
        Grid {
            steps,
            h,
            mass: config.mass,
            nodes: [
                sample(0.0, 0.0, steps + 1),
                sample(FRAC_PI_2, 0.0, steps + 1),
            ],
            mids: [sample(0.0, 0.5, steps), sample(FRAC_PI_2, 0.5, steps)],
        }
    }

    fn x(&self, half: usize, i: usize) -> f64 {
        if half == 0 {
            i as f64 * self.h
        } else {
            FRAC_PI_2 + i as f64 * self.h
        }
    }
}

#[inline]
fn deriv(v: f64, m: f64, mu: f64, y: [f64; 2]) -> [f64; 2] {
    [(v - m - mu) * y[1], (mu - v - m) * y[0]]
}

/// One classical RK4 step of size `h` with `V` sampled at the start,
/// midpoint and end.
#[inline]
fn rk4_step(y: [f64; 2], h: f64, v0: f64, vm: f64, v1: f64, m: f64, mu: f64) -> [f64; 2] {
    let k1 = deriv(v0, m, mu, y);
    let k2 = deriv(vm, m, mu, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = deriv(vm, m, mu, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = deriv(v1, m, mu, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Exact transmission map at `pi/2`.
#[inline]
fn apply_jump(y: [f64; 2], sigma: f64) -> [f64; 2] {
    [sigma * y[0], y[1] / sigma]
}

fn initial(config: &ProblemConfig) -> [f64; 2] {
    [config.theta.cos(), -config.theta.sin()]
}

/// Sampled solution of the initial-value problem for one `mu`.
///
/// Samples `0..=N` cover `[0, pi/2]` (the last one is the left limit at
/// `pi/2`); samples `N+1..=2N+1` cover `[pi/2, pi]` starting with the right
/// limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mu: f64,
    pub steps_per_half: usize,
    pub grid: Vec<f64>,
    pub values: Vec<ComponentPair>,
}

impl Trajectory {
    pub fn step(&self) -> f64 {
        FRAC_PI_2 / self.steps_per_half as f64
    }

    /// Indices of the left-half samples.
    pub fn left_range(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.steps_per_half
    }

    /// Indices of the right-half samples.
    pub fn right_range(&self) -> std::ops::RangeInclusive<usize> {
        self.steps_per_half + 1..=2 * self.steps_per_half + 1
    }

    pub fn left_limit_at_jump(&self) -> ComponentPair {
        self.values[self.steps_per_half]
    }

    pub fn right_limit_at_jump(&self) -> ComponentPair {
        self.values[self.steps_per_half + 1]
    }

    pub fn at_pi(&self) -> ComponentPair {
        *self.values.last().expect("trajectory is never empty")
    }
}

fn integrate_on(config: &ProblemConfig, grid: &Grid, mu: f64) -> Result<Trajectory, ForwardError> {
    let n = grid.steps;
    let mut xs = Vec::with_capacity(2 * n + 2);
    let mut values = Vec::with_capacity(2 * n + 2);
    let mut y = initial(config);
    for half in 0..2 {
        if half == 1 {
            y = apply_jump(y, config.sigma);
        }
        xs.push(grid.x(half, 0));
        values.push(ComponentPair::new(y[0], y[1]));
        for i in 0..n {
            y = rk4_step(
                y,
                grid.h,
                grid.nodes[half][i],
                grid.mids[half][i],
                grid.nodes[half][i + 1],
                grid.mass,
                mu,
            );
            let x = grid.x(half, i + 1);
            if !(y[0].is_finite() && y[1].is_finite()) {
                return Err(ForwardError::NonFinite { mu, x });
            }
            xs.push(x);
            values.push(ComponentPair::new(y[0], y[1]));
        }
    }
    Ok(Trajectory {
        mu,
        steps_per_half: n,
        grid: xs,
        values,
    })
}

fn endpoint_on(config: &ProblemConfig, grid: &Grid, mu: f64) -> Result<[f64; 2], ForwardError> {
    let mut y = initial(config);
    for half in 0..2 {
        if half == 1 {
            y = apply_jump(y, config.sigma);
        }
        let (nodes, mids) = (&grid.nodes[half], &grid.mids[half]);
        for i in 0..grid.steps {
            y = rk4_step(y, grid.h, nodes[i], mids[i], nodes[i + 1], grid.mass, mu);
        }
        if !(y[0].is_finite() && y[1].is_finite()) {
            return Err(ForwardError::NonFinite {
                mu,
                x: if half == 0 { FRAC_PI_2 } else { PI },
            });
        }
    }
    Ok(y)
}

/// Solves the initial-value problem `psi(0) = (cos theta, -sin theta)`.
pub fn integrate(
    config: &ProblemConfig,
    mu: f64,
    opts: &SolverOptions,
) -> Result<Trajectory, ForwardError> {
    let grid = Grid::new(config, opts.steps_for(mu));
    integrate_on(config, &grid, mu)
}

fn delta_on(config: &ProblemConfig, grid: &Grid, mu: f64) -> Result<f64, ForwardError> {
    let y = endpoint_on(config, grid, mu)?;
    Ok(config.beta.sin() * y[0] + config.beta.cos() * y[1])
}

/// Characteristic function `sin(beta) psi1(pi) + cos(beta) psi2(pi)`.
pub fn delta(config: &ProblemConfig, mu: f64, opts: &SolverOptions) -> Result<f64, ForwardError> {
    let grid = Grid::new(config, opts.steps_for(mu));
    delta_on(config, &grid, mu)
}

fn bisect<F>(mut a: f64, mut b: f64, mut fa: f64, width: f64, f: F) -> Result<f64, ForwardError>
where
    F: Fn(f64) -> Result<f64, ForwardError>,
{
    for _ in 0..MAX_BISECTIONS {
        if b - a <= width {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Zeros of `Delta` in `[anchor - half_width, anchor + half_width]`.
fn roots_in_window(
    config: &ProblemConfig,
    grid: &Grid,
    anchor: f64,
    half_width: f64,
) -> Result<Vec<f64>, ForwardError> {
    let k = (half_width / SCAN_STEP).round() as i64;
    let mus: Vec<f64> = (-k..=k).map(|i| anchor + i as f64 * SCAN_STEP).collect();
    let values = mus
        .par_iter()
        .map(|&mu| delta_on(config, grid, mu))
        .collect::<Result<Vec<_>, _>>()?;
    let mut roots = Vec::new();
    for i in 0..mus.len() - 1 {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            roots.push(mus[i]);
        } else if (fa < 0.0) != (fb < 0.0) && fb != 0.0 {
            roots.push(bisect(mus[i], mus[i + 1], fa, ROOT_WIDTH, |mu| {
                delta_on(config, grid, mu)
            })?);
        }
    }
    if values[values.len() - 1] == 0.0 {
        roots.push(mus[mus.len() - 1]);
    }
    Ok(roots)
}

/// Counts the interior sign changes of `y1` on the sample grid.
fn count_sign_changes(traj: &Trajectory) -> usize {
    sign_change_intervals(traj).len()
}

/// Sample index pairs `(i, i+1)` within one half where `y1` changes sign.
fn sign_change_intervals(traj: &Trajectory) -> Vec<usize> {
    let mut out = Vec::new();
    for range in [traj.left_range(), traj.right_range()] {
        let (lo, hi) = (*range.start(), *range.end());
        for i in lo..hi {
            let a = traj.values[i].y1;
            let b = traj.values[i + 1].y1;
            let x_end = traj.grid[i + 1];
            if (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0) || (b == 0.0 && a != 0.0 && i + 1 < hi)
            {
                if traj.grid[i] < ENDPOINT_GUARD && a == 0.0 {
                    continue;
                }
                if PI - x_end < ENDPOINT_GUARD && b.abs() < 1e-9 {
                    continue;
                }
                out.push(i);
            }
        }
    }
    out
}

/// Eigenvalue with index `n`: the zero of `Delta` nearest the asymptotic
/// anchor `mu_n^0`.
///
/// The scan covers `mu_n^0 +/- 0.5` at step 0.01 and doubles the window up
/// to three times. For `n >= 1`, candidates whose first component does not
/// have exactly `n` nodes are passed over in favour of the nearest one that
/// does.
pub fn eigenvalue_near(
    config: &ProblemConfig,
    n: i64,
    opts: &SolverOptions,
) -> Result<f64, ForwardError> {
    if n == 0 {
        return Err(ForwardError::InvalidIndex(n));
    }
    let anchor = mu_zero(config, n);
    let max_half = INITIAL_HALF_WINDOW * (1 << WINDOW_DOUBLINGS) as f64;
    let grid = Grid::new(config, opts.steps_for(anchor.abs() + max_half));
    let mut half_width = INITIAL_HALF_WINDOW;
    let mut fallback: Option<f64> = None;
    for _ in 0..=WINDOW_DOUBLINGS {
        let mut roots = roots_in_window(config, &grid, anchor, half_width)?;
        roots.sort_by(|a, b| (a - anchor).abs().total_cmp(&(b - anchor).abs()));
        if !roots.is_empty() {
            if n < 1 {
                return pick_closest(n, anchor, &roots);
            }
            for &r in &roots {
                let traj = integrate_on(config, &grid, r)?;
                if count_sign_changes(&traj) == n as usize {
                    return Ok(r);
                }
            }
            if fallback.is_none() {
                fallback = Some(pick_closest(n, anchor, &roots)?);
            }
        }
        half_width *= 2.0;
    }
    fallback.ok_or(ForwardError::NoRootInWindow {
        n,
        anchor,
        half_width: half_width / 2.0,
    })
}

fn pick_closest(n: i64, anchor: f64, sorted: &[f64]) -> Result<f64, ForwardError> {
    if sorted.len() >= 2 {
        let d0 = (sorted[0] - anchor).abs();
        let d1 = (sorted[1] - anchor).abs();
        if (d1 - d0).abs() < 1e-9 {
            return Err(ForwardError::MultipleRootsAmbiguous {
                n,
                roots: sorted[..2].to_vec(),
            });
        }
    }
    Ok(sorted[0])
}

/// Eigenvalues for `n = 1..=n_max`.
pub fn spectrum(
    config: &ProblemConfig,
    n_max: i64,
    opts: &SolverOptions,
) -> Result<Vec<(i64, f64)>, ForwardError> {
    if n_max < 1 {
        return Err(ForwardError::InvalidIndex(n_max));
    }
    let out = (1..=n_max)
        .into_par_iter()
        .map(|n| eigenvalue_near(config, n, opts).map(|mu| (n, mu)))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(w) = out.windows(2).find(|w| w[1].1 <= w[0].1) {
        return Err(ForwardError::NotIncreasing(w[1].0));
    }
    Ok(out)
}

/// Eigenvalue and the zeros of the first eigenfunction component in `(0, pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalSet {
    pub n: i64,
    pub mu_n: f64,
    pub nodes: Vec<f64>,
}

/// Refines every grid sign change of `y1` by bisection on a partial RK4
/// step from the left sample.
fn refine_nodes(config: &ProblemConfig, traj: &Trajectory) -> Vec<f64> {
    let h = traj.step();
    let m = config.mass;
    let mu = traj.mu;
    let width = ROOT_WIDTH * PI;
    sign_change_intervals(traj)
        .into_iter()
        .map(|i| {
            let x0 = traj.grid[i];
            let y0 = [traj.values[i].y1, traj.values[i].y2];
            let v0 = config.v(x0);
            let y1_at = |tau: f64| {
                rk4_step(
                    y0,
                    tau,
                    v0,
                    config.v(x0 + 0.5 * tau),
                    config.v(x0 + tau),
                    m,
                    mu,
                )[0]
            };
            if traj.values[i + 1].y1 == 0.0 {
                return traj.grid[i + 1];
            }
            let (mut a, mut b) = (0.0, h);
            let fa = y0[0];
            for _ in 0..MAX_BISECTIONS {
                if b - a <= width {
                    break;
                }
                let mid = 0.5 * (a + b);
                let fm = y1_at(mid);
                if (fa < 0.0) == (fm < 0.0) && fm != 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            x0 + 0.5 * (a + b)
        })
        .collect()
}

/// Eigenvalue `mu_n` and its `n` nodes, with one automatic grid doubling
/// when the count comes out wrong.
pub fn nodal_set(
    config: &ProblemConfig,
    n: i64,
    opts: &SolverOptions,
) -> Result<NodalSet, ForwardError> {
    if n < 1 {
        return Err(ForwardError::InvalidIndex(n));
    }
    let mu = eigenvalue_near(config, n, opts)?;
    let mut steps = opts.steps_for(mu);
    let mut found = 0;
    for _ in 0..2 {
        let grid = Grid::new(config, steps);
        let traj = integrate_on(config, &grid, mu)?;
        let nodes = refine_nodes(config, &traj);
        if nodes.len() == n as usize {
            return Ok(NodalSet { n, mu_n: mu, nodes });
        }
        found = nodes.len();
        steps *= 2;
    }
    Err(ForwardError::NodeCountMismatch {
        n,
        expected: n as usize,
        found,
    })
}

/// Nodal sets for every index in `ns`, computed in parallel and returned in
/// the order given.
pub fn nodal_sets(
    config: &ProblemConfig,
    ns: &[i64],
    opts: &SolverOptions,
) -> Result<Vec<NodalSet>, ForwardError> {
    ns.par_iter().map(|&n| nodal_set(config, n, opts)).collect()
}

/// Maximum mismatch between a trajectory and the right-hand sides of the
/// Volterra integral equations it satisfies, per half interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResidual {
    pub left: f64,
    pub right: f64,
}

impl IntegralResidual {
    pub fn max(&self) -> f64 {
        self.left.max(self.right)
    }
}

/// Rotation by angle `a` applied to `v`.
#[inline]
fn rotate(a: f64, v: [f64; 2]) -> [f64; 2] {
    let (s, c) = a.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// Evaluates the integral equations by composite Simpson quadrature over the
/// trajectory samples and compares them with the samples at every even grid
/// index.
///
/// With `f = (q psi2, -p psi1)` the left-half equations read
/// `psi(x) = R(mu x) [psi(0) + int_0^x R(-mu t) f(t) dt]`, where `R` is the
/// plane rotation; expanded, these are the familiar
/// `cos(mu x - theta) - int sin mu(t-x) psi1 p + int cos mu(t-x) psi2 q` forms.
/// On the right half the free term and the left integral pass through
/// `sigma+ R(mu(x-t)) + sigma- R(mu(x+t-pi)) P`, `P = diag(1, -1)`.
pub fn integral_residual(config: &ProblemConfig, traj: &Trajectory) -> IntegralResidual {
    let n = traj.steps_per_half;
    let h = traj.step();
    let mu = traj.mu;
    let u0 = initial(config);
    let jump = config.jump();
    let (sp, sm) = (jump.sigma_plus, jump.sigma_minus);

    let integrand = |idx: usize, shift: f64| -> [f64; 2] {
        let x = traj.grid[idx];
        let ComponentPair { y1, y2 } = traj.values[idx];
        let f = [config.q(x) * y2, -config.p(x) * y1];
        rotate(-mu * (x - shift), f)
    };

    // Left half: cumulative G(x) = int_0^x R(-mu t) f dt.
    let mut left = 0.0f64;
    let mut g = [0.0, 0.0];
    let mut g_half = [0.0, 0.0];
    let check = |idx: usize, rhs: [f64; 2]| -> f64 {
        let v = traj.values[idx];
        (rhs[0] - v.y1).abs().max((rhs[1] - v.y2).abs())
    };
    for k in (0..=n).step_by(2) {
        if k > 0 {
            let (a, b, c) = (
                integrand(k - 2, 0.0),
                integrand(k - 1, 0.0),
                integrand(k, 0.0),
            );
            for d in 0..2 {
                g[d] += h / 3.0 * (a[d] + 4.0 * b[d] + c[d]);
            }
        }
        let x = traj.grid[k];
        let rhs = rotate(mu * x, [u0[0] + g[0], u0[1] + g[1]]);
        left = left.max(check(k, rhs));
        if k == n {
            g_half = g;
        }
    }

    // Right half.
    let w = [u0[0] + g_half[0], u0[1] + g_half[1]];
    let w_reflected = [w[0], -w[1]];
    let base = n + 1;
    let mut right = 0.0f64;
    let mut gr = [0.0, 0.0];
    for k in (0..=n).step_by(2) {
        if k > 0 {
            let (a, b, c) = (
                integrand(base + k - 2, 0.0),
                integrand(base + k - 1, 0.0),
                integrand(base + k, 0.0),
            );
            for d in 0..2 {
                gr[d] += h / 3.0 * (a[d] + 4.0 * b[d] + c[d]);
            }
        }
        let x = traj.grid[base + k];
        // R(mu(x+t-pi)) P = R(mu(x-pi)) P R(-mu t), so the sigma- part
        // carries the same left integral reflected.
        let direct = rotate(mu * x, w);
        let mirrored = rotate(mu * (x - PI), w_reflected);
        let tail = rotate(mu * x, gr);
        let rhs = [
            sp * direct[0] + sm * mirrored[0] + tail[0],
            sp * direct[1] + sm * mirrored[1] + tail[1],
        ];
        right = right.max(check(base + k, rhs));
    }
    IntegralResidual { left, right }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_config, PotentialSpec, RawConfig};
    use approx::assert_abs_diff_eq;

    fn t_config() -> ProblemConfig {
        validate_config(&RawConfig::new(1.0, 1.0, 1.0, 0.0, PotentialSpec::Zero)).unwrap()
    }

    fn d_config() -> ProblemConfig {
        validate_config(&RawConfig::new(
            1.0,
            0.5,
            2.0,
            2.0,
            PotentialSpec::cos(-1.0),
        ))
        .unwrap()
    }

    #[test]
    fn free_solution_is_a_rotation() {
        let traj = integrate(&t_config(), 3.0, &SolverOptions::default()).unwrap();
        for (x, v) in traj.grid.iter().zip(&traj.values) {
            assert_abs_diff_eq!(v.y1, (3.0 * x - 1.0).cos(), epsilon = 1e-9);
            assert_abs_diff_eq!(v.y2, (3.0 * x - 1.0).sin(), epsilon = 1e-9);
        }
        assert_eq!(traj.left_limit_at_jump(), traj.right_limit_at_jump());
        assert_eq!(
            traj.values[0],
            ComponentPair::new(1f64.cos(), -(1f64.sin()))
        );
    }

    #[test]
    fn jump_is_applied_exactly() {
        let c = d_config();
        let traj = integrate(&c, 5.0, &SolverOptions::default()).unwrap();
        let (l, r) = (traj.left_limit_at_jump(), traj.right_limit_at_jump());
        assert_eq!(r.y1, 2.0 * l.y1);
        assert_eq!(r.y2, l.y2 / 2.0);
        assert_abs_diff_eq!(r.y1 * r.y2, l.y1 * l.y2, epsilon = 1e-15);
        assert_eq!(traj.grid[traj.steps_per_half], FRAC_PI_2);
        assert_eq!(traj.grid[traj.steps_per_half + 1], FRAC_PI_2);
    }

    #[test]
    fn constant_case_delta() {
        let c = t_config();
        let o = SolverOptions::default();
        assert_abs_diff_eq!(delta(&c, 0.5, &o).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(delta(&c, 5.0, &o).unwrap(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn constant_case_eigenvalues_and_nodes() {
        let c = t_config();
        let o = SolverOptions::default();
        assert_abs_diff_eq!(eigenvalue_near(&c, 5, &o).unwrap(), 5.0, epsilon = 1e-8);
        assert_abs_diff_eq!(eigenvalue_near(&c, 12, &o).unwrap(), 12.0, epsilon = 1e-8);
        let s = spectrum(&c, 3, &o).unwrap();
        for (k, (n, mu)) in s.iter().enumerate() {
            assert_eq!(*n, k as i64 + 1);
            assert_abs_diff_eq!(*mu, *n as f64, epsilon = 1e-8);
        }
        assert!(matches!(
            spectrum(&c, 0, &o),
            Err(ForwardError::InvalidIndex(0))
        ));

        let set = nodal_set(&c, 3, &o).unwrap();
        let expect = [0.856_932, 1.904_130, 2.951_328];
        for (z, e) in set.nodes.iter().zip(expect) {
            assert_abs_diff_eq!(*z, e, epsilon = 1e-6);
        }
        let one = nodal_set(&c, 1, &o).unwrap();
        assert_eq!(one.nodes.len(), 1);
        assert_abs_diff_eq!(one.nodes[0], 1.0 + FRAC_PI_2, epsilon = 1e-8);
    }

    #[test]
    fn zero_index_rejected() {
        let o = SolverOptions::default();
        assert!(eigenvalue_near(&t_config(), 0, &o).is_err());
        assert!(nodal_set(&t_config(), 0, &o).is_err());
    }

    #[test]
    fn steps_scale_with_mu() {
        let o = SolverOptions::default();
        assert_eq!(o.steps_for(3.0), 4096);
        let big = o.steps_for(512.0);
        assert!(big % 2 == 0);
        assert!(512.0 * FRAC_PI_2 / big as f64 <= 0.02 + 1e-12);
    }

    #[test]
    fn residual_of_free_solution_is_tiny() {
        let c = t_config();
        let traj = integrate(&c, 3.0, &SolverOptions::default()).unwrap();
        assert!(integral_residual(&c, &traj).max() <= 1e-8);
    }
}
