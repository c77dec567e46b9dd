//! Closed-form large-`n` expansions: eigenvalue anchors, solution and
//! characteristic-function asymptotics, nodal series and the limit
//! functions `Phi` and `Psi` used by the inverse algorithm.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ComponentPair, ProblemConfig};

/// Which set of nodal constants to use.
///
/// `Paper` linearises the node condition `tan(mu x - rho) = R` as
/// `mu x - rho = R`, which gives the offset `-cot theta` and the
/// second-order pair `{m cot theta, m^2 x csc^2 theta / 2}`. `Consistent`
/// keeps the arctangent: offset `theta - pi/2` and `{m sin theta cos theta,
/// m^2 x / 2}`, plus the `1/n` drift of the eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Paper,
    Consistent,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Paper => "paper",
            Mode::Consistent => "consistent",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(Mode::Paper),
            "consistent" => Ok(Mode::Consistent),
            other => Err(format!(
                "unknown mode `{other}` (expected paper or consistent)"
            )),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticError {
    #[error("right-half denominator T1 vanishes ({0:e})")]
    DegenerateDenominator(f64),
    #[error("node index j = {j} out of range for n = {n}")]
    IndexOutOfRange { n: i64, j: i64 },
    #[error("x = {0} must lie in (0, pi) away from pi/2")]
    BadPoint(f64),
}

const DENOMINATOR_FLOOR: f64 = 1e-12;

fn parity(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Eigenvalue anchor `n - (beta - theta)/pi + (-1)^n arcsin(gamma)/pi`.
pub fn mu_zero(config: &ProblemConfig, n: i64) -> f64 {
    let j = config.jump();
    n as f64 - (config.beta - config.theta) / PI + parity(n) * j.arcsin_gamma / PI
}

/// Node drift `c_n = (beta - theta - (-1)^n arcsin gamma)/pi`, so that
/// `mu_n^0 = n - c_n`.
pub fn drift(config: &ProblemConfig, n: i64) -> f64 {
    (config.beta - config.theta - parity(n) * config.jump().arcsin_gamma) / PI
}

/// Two-term expansion of the normalised solution at `x != pi/2`.
pub fn psi_asymptotic(config: &ProblemConfig, x: f64, mu: f64) -> ComponentPair {
    let (theta, m) = (config.theta, config.mass);
    let phi = mu * x - config.rho_unchecked(x);
    let (st, ct) = theta.sin_cos();
    let a = phi - theta;
    let k = m / mu;
    let lm = m * m * x / (2.0 * mu);
    let left = ComponentPair::new(
        a.cos() + k * st * phi.sin() + lm * a.sin(),
        a.sin() - k * ct * phi.sin() - lm * a.cos(),
    );
    if x < FRAC_PI_2 {
        return left;
    }
    let j = config.jump();
    let (sp, sm) = (j.sigma_plus, j.sigma_minus);
    let chi = phi - mu * PI + 2.0 * config.rho_half();
    let b = chi + theta;
    let rm = m * m * (PI - x) / (2.0 * mu);
    ComponentPair::new(
        sp * left.y1 + sm * (b.cos() - k * st * chi.sin() - rm * b.sin()),
        sp * left.y2 + sm * (b.sin() + k * st * chi.sin() + rm * b.cos()),
    )
}

/// Characteristic function to first order in `1/mu`.
pub fn delta_asymptotic(config: &ProblemConfig, mu: f64) -> f64 {
    let j = config.jump();
    let (sp, sm) = (j.sigma_plus, j.sigma_minus);
    let (theta, beta, m) = (config.theta, config.beta, config.mass);
    let rh2 = 2.0 * config.rho_half();
    let main = mu * PI - theta + beta;
    sp * main.sin() + sm * (rh2 + theta + beta).sin()
        - sp * m / mu * (theta + beta).cos() * (mu * PI).sin()
        + sm * m / mu * (beta.cos() - theta.cos()) * theta.sin() * rh2.sin()
        - sp * m * m * PI / (2.0 * mu) * main.cos()
}

/// Right-half constants of the nodal series for the parity of `n`,
/// evaluated at node location `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarConstants {
    pub t1_star: f64,
    pub t2_star: f64,
    pub m_star: f64,
    /// First-order right offset `(-sigma+ cos theta - sigma- s cos a) / T1`.
    pub offset: f64,
}

/// `T1`, `T2(x)`, `M(x)` and the offset with `s = (-1)^n` and
/// `a = beta - s arcsin(gamma) + 2 rho(pi/2)`.
pub fn star_constants(
    config: &ProblemConfig,
    n: i64,
    x: f64,
) -> Result<StarConstants, AsymptoticError> {
    let j = config.jump();
    let (sp, sm) = (j.sigma_plus, j.sigma_minus);
    let s = parity(n);
    let (theta, m) = (config.theta, config.mass);
    let (st, ct) = theta.sin_cos();
    let arg = config.beta - s * j.arcsin_gamma + 2.0 * config.rho_half();
    let (sa, ca) = arg.sin_cos();
    let t1 = sp * st + sm * s * sa;
    if t1.abs() < DENOMINATOR_FLOOR {
        return Err(AsymptoticError::DegenerateDenominator(t1));
    }
    let m2 = m * m;
    let t2 = sp * m * st
        + sm * m * st * s * ca
        + 0.5 * sp * m2 * x * ct
        + 0.5 * sm * m2 * (PI - x) * s * ca;
    let m_star = s * sm * m * st * sa + 0.5 * sp * m2 * x * st + 0.5 * s * sm * m2 * (PI - x) * sa;
    Ok(StarConstants {
        t1_star: t1,
        t2_star: t2,
        m_star,
        offset: (-sp * ct - sm * s * ca) / t1,
    })
}

/// `F(a) = arctan(tan(a) / k)` continued across the poles of `tan`.
fn continued_atan(a: f64, k: f64) -> f64 {
    let turns = (a / PI).round();
    let b = a - turns * PI;
    (b.tan() / k).atan() + turns * PI
}

/// Second-order eigenvalue drift `d = lim n (mu_n - mu_n^0)`.
///
/// Obtained by matching the Prufer angle across the jump to first order in
/// `1/mu`: the left half contributes the `m` and `m^2` phase corrections
/// transported through `tan a -> tan a / sigma^2`, the right half adds its
/// own corrections up to the boundary angle `-beta`.
pub fn eigenvalue_shift(config: &ProblemConfig, n: i64) -> f64 {
    let (theta, beta, m) = (config.theta, config.beta, config.mass);
    let s2 = config.sigma * config.sigma;
    let a0 = mu_zero(config, n) * FRAC_PI_2 - config.rho_half() - theta;
    let (sa, ca) = a0.sin_cos();
    let jac = s2 / (s2 * s2 * ca * ca + sa * sa);
    let left = -0.5 * m * ((2.0 * a0).sin() + (2.0 * theta).sin()) - m * m * PI / 4.0;
    let right =
        0.5 * m * ((2.0 * beta).sin() + (2.0 * continued_atan(a0, s2)).sin()) - m * m * PI / 4.0;
    let mu_e = jac * left + right;
    let g = jac * FRAC_PI_2 + FRAC_PI_2;
    -mu_e / g
}

/// Lattice index `j` of the first node: 1 when `theta <= pi/2`, else 0
/// (the left offset `theta - pi/2` is then positive and `j = 0` already
/// lands inside `(0, pi)`).
pub fn first_lattice_index(config: &ProblemConfig) -> i64 {
    if config.theta > FRAC_PI_2 {
        0
    } else {
        1
    }
}

/// First-order offset of the nodes: `Phi(x) = rho(x) + c x + offset`.
pub fn first_order_offset(
    config: &ProblemConfig,
    n: i64,
    right: bool,
    mode: Mode,
) -> Result<f64, AsymptoticError> {
    let theta = config.theta;
    match (mode, right) {
        (Mode::Paper, false) => Ok(-1.0 / theta.tan()),
        (Mode::Paper, true) => Ok(star_constants(config, n, PI)?.offset),
        (Mode::Consistent, false) => Ok(theta - FRAC_PI_2),
        (Mode::Consistent, true) => {
            // Defined mod pi; the branch with c pi + K in (-pi, 0] keeps the
            // node with j = n inside (0, pi).
            let k = theta - FRAC_PI_2 + parity(n) * config.jump().arcsin_gamma;
            let last = first_lattice_index(config) - 1;
            let end = drift(config, n) * PI + k + last as f64 * PI;
            Ok(k - (end / PI).ceil() * PI)
        }
    }
}

/// Second-order term of the nodal series at `x`, excluding the drift
/// products `c (rho + offset)` and the `(c^2 - d) x` term.
fn second_order(
    config: &ProblemConfig,
    n: i64,
    x: f64,
    right: bool,
    mode: Mode,
) -> Result<f64, AsymptoticError> {
    let (theta, beta, m) = (config.theta, config.beta, config.mass);
    let m2 = m * m;
    match (mode, right) {
        (Mode::Paper, false) => {
            let cot = 1.0 / theta.tan();
            let csc2 = 1.0 / theta.sin().powi(2);
            Ok(m * cot + 0.5 * m2 * x * csc2)
        }
        (Mode::Paper, true) => {
            let s = star_constants(config, n, x)?;
            Ok((-s.offset * s.t2_star + s.m_star) / s.t1_star)
        }
        (Mode::Consistent, false) => Ok(m * theta.sin() * theta.cos() + 0.5 * m2 * x),
        (Mode::Consistent, true) => Ok(eigenvalue_shift(config, n) * PI
            + m * beta.sin() * beta.cos()
            - 0.5 * m2 * (PI - x)),
    }
}

/// Drift product `c (rho + offset)` of the series. In paper mode the left
/// half carries `+c cot theta`, as displayed for `Psi_1`.
fn drift_product(c: f64, rho: f64, offset: f64, right: bool, mode: Mode) -> f64 {
    match (mode, right) {
        (Mode::Paper, false) => c * (rho - offset),
        _ => c * (rho + offset),
    }
}

fn series(
    config: &ProblemConfig,
    n: i64,
    xi: f64,
    x: f64,
    mode: Mode,
    side: Option<bool>,
) -> Result<f64, AsymptoticError> {
    let right = side.unwrap_or(x > FRAC_PI_2);
    let nf = n as f64;
    let c = drift(config, n);
    let rho = config.rho_unchecked(x.clamp(0.0, PI));
    let k = first_order_offset(config, n, right, mode)?;
    let mut second =
        drift_product(c, rho, k, right, mode) + second_order(config, n, x, right, mode)?;
    if mode == Mode::Consistent {
        second += (c * c - eigenvalue_shift(config, n)) * xi;
    }
    Ok(xi + c * xi / nf + (rho + k) / nf + second / (nf * nf))
}

/// Asymptotic location of the `j`-th node of the `n`-th eigenfunction,
/// `j = 0..n-1`, with `x = j pi / n` as the lattice point.
///
/// The implicit dependence on the node itself (through `rho` and the
/// side of `pi/2`) is resolved by two fixed-point passes from `j pi / n`.
pub fn node_asymptotic(
    config: &ProblemConfig,
    n: i64,
    j: i64,
    mode: Mode,
) -> Result<f64, AsymptoticError> {
    if n < 1 || j < 0 || j >= n {
        return Err(AsymptoticError::IndexOutOfRange { n, j });
    }
    node_series(config, n, j, mode)
}

/// The nodal series at any integer `j`, without the range check.
pub fn node_series(
    config: &ProblemConfig,
    n: i64,
    j: i64,
    mode: Mode,
) -> Result<f64, AsymptoticError> {
    let xi = j as f64 * PI / n as f64;
    let mut x = xi;
    for _ in 0..2 {
        x = series(config, n, xi, x, mode, None)?;
    }
    Ok(x)
}

/// The nodal series with the half interval fixed (`right` selects
/// `(pi/2, pi)`), so the result may fall on the other side of `pi/2`.
pub fn node_series_on(
    config: &ProblemConfig,
    n: i64,
    j: i64,
    mode: Mode,
    right: bool,
) -> Result<f64, AsymptoticError> {
    let xi = j as f64 * PI / n as f64;
    let mut x = xi;
    for _ in 0..2 {
        x = series(config, n, xi, x, mode, Some(right))?;
    }
    Ok(x)
}

fn check_point(x: f64) -> Result<bool, AsymptoticError> {
    if !(0.0..=PI).contains(&x) || x == FRAC_PI_2 {
        return Err(AsymptoticError::BadPoint(x));
    }
    Ok(x > FRAC_PI_2)
}

/// First-order limit `Phi(x) = lim n (x_n^j - j pi / n)` over even `n`.
pub fn phi_closed(config: &ProblemConfig, x: f64, mode: Mode) -> Result<f64, AsymptoticError> {
    let right = check_point(x)?;
    let c = config.jump().c_even;
    Ok(config.rho_unchecked(x) + c * x + first_order_offset(config, 0, right, mode)?)
}

/// Second-order limit `Psi(x)` over even `n`.
///
/// `Psi = lim n^2 (x_n^j - j pi/n - c j pi/n^2 - (rho(x) + K)/n)` with `K`
/// the first-order offset of the mode. In consistent mode this includes the
/// `(c^2 - d) x` contribution of the eigenvalue drift.
pub fn psi_closed(config: &ProblemConfig, x: f64, mode: Mode) -> Result<f64, AsymptoticError> {
    let right = check_point(x)?;
    let c = config.jump().c_even;
    let rho = config.rho_unchecked(x);
    let k = first_order_offset(config, 0, right, mode)?;
    let mut out = drift_product(c, rho, k, right, mode) + second_order(config, 0, x, right, mode)?;
    if mode == Mode::Consistent {
        out += (c * c - eigenvalue_shift(config, 0)) * x;
    }
    Ok(out)
}

/// Candidate coefficients of `x` in the left-half second-order term:
/// `m^2 csc^2 theta`, `m^2 csc^2 theta / 2` and `m^2 / 2`.
pub fn left_slope_candidates(theta: f64, mass: f64) -> [(&'static str, f64); 3] {
    let m2 = mass * mass;
    let csc2 = 1.0 / theta.sin().powi(2);
    [
        ("m^2 csc^2 theta", m2 * csc2),
        ("m^2 csc^2 theta / 2", 0.5 * m2 * csc2),
        ("m^2 / 2", 0.5 * m2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_config, PotentialSpec, RawConfig};
    use approx::assert_abs_diff_eq;

    fn cfg(theta: f64, beta: f64, sigma: f64, m: f64, v: PotentialSpec) -> ProblemConfig {
        validate_config(&RawConfig::new(theta, beta, sigma, m, v)).unwrap()
    }

    fn t() -> ProblemConfig {
        cfg(1.0, 1.0, 1.0, 0.0, PotentialSpec::Zero)
    }

    fn d() -> ProblemConfig {
        cfg(1.0, 0.5, 2.0, 2.0, PotentialSpec::cos(-1.0))
    }

    fn e() -> ProblemConfig {
        cfg(1.0, 1.0, 2.0, 2.0, PotentialSpec::cos(-1.0))
    }

    fn cot(x: f64) -> f64 {
        1.0 / x.tan()
    }

    #[test]
    fn anchors() {
        assert_abs_diff_eq!(mu_zero(&t(), 7), 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mu_zero(&d(), 8), 8.252031, epsilon = 1e-6);
        assert_abs_diff_eq!(mu_zero(&d(), 9), 9.066279, epsilon = 1e-6);
        assert_abs_diff_eq!(mu_zero(&d(), 8), 8.0 - drift(&d(), 8), epsilon = 1e-14);
    }

    #[test]
    fn free_case_expansions_are_exact() {
        let p = psi_asymptotic(&t(), 1.0, 10.0);
        assert_abs_diff_eq!(p.y1, 9f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.y2, 9f64.sin(), epsilon = 1e-15);
        let r = psi_asymptotic(&t(), 2.5, 10.0);
        assert_abs_diff_eq!(r.y1, 24f64.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(delta_asymptotic(&t(), 0.5), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(delta_asymptotic(&t(), 6.0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn left_expansion_term_by_term() {
        let p = cfg(1.0, 1.0, 1.0, 2.0, PotentialSpec::cos(-1.0));
        let ph = 20.0 + 0.5f64.sin();
        let expect = (ph - 1.0).cos()
            + (2.0 * 1f64.sin() / 40.0) * ph.sin()
            + (4.0 * 0.5 / 80.0) * (ph - 1.0).sin();
        assert_abs_diff_eq!(psi_asymptotic(&p, 0.5, 40.0).y1, expect, epsilon = 1e-12);
    }

    #[test]
    fn node_series_examples() {
        let paper = node_asymptotic(&t(), 10, 3, Mode::Paper).unwrap();
        assert_abs_diff_eq!(paper, 0.3 * PI - cot(1.0) / 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(paper, 0.878269, epsilon = 1e-6);
        let cons = node_asymptotic(&t(), 10, 3, Mode::Consistent).unwrap();
        assert_abs_diff_eq!(cons, (1.0 + FRAC_PI_2 + 2.0 * PI) / 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cons, 0.885398, epsilon = 1e-6);
        assert!(node_asymptotic(&t(), 10, 10, Mode::Paper).is_err());
        assert!(node_asymptotic(&t(), 10, -1, Mode::Paper).is_err());
    }

    #[test]
    fn example_limit_functions() {
        let e = e();
        assert_abs_diff_eq!(e.jump().gamma, 0.0, epsilon = 1e-15);
        let l = phi_closed(&e, 0.0, Mode::Paper).unwrap();
        assert_abs_diff_eq!(l, -cot(1.0), epsilon = 1e-12);
        assert_abs_diff_eq!(l, -0.642093, epsilon = 1e-6);
        let r = phi_closed(&e, PI, Mode::Paper).unwrap();
        assert_abs_diff_eq!(r, -4.0 * cot(1.0), epsilon = 1e-12);
        for x in [0.3f64, 1.0, 2.0, 3.0] {
            let want = -x.sin()
                - if x < FRAC_PI_2 {
                    cot(1.0)
                } else {
                    4.0 * cot(1.0)
                };
            assert_abs_diff_eq!(
                phi_closed(&e, x, Mode::Paper).unwrap(),
                want,
                epsilon = 1e-12
            );
        }
        let csc2 = 1.0 / 1f64.sin().powi(2);
        assert_abs_diff_eq!(
            psi_closed(&e, 0.0, Mode::Paper).unwrap(),
            2.0 * cot(1.0),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            psi_closed(&e, 1.0, Mode::Paper).unwrap(),
            2.0 * cot(1.0) + 2.0 * csc2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            psi_closed(&e, 1.0, Mode::Paper).unwrap(),
            4.108751,
            epsilon = 1e-6
        );
        let (s1, c1) = 1f64.sin_cos();
        for x in [1.8, 2.5, 3.0] {
            let want = 20.0 * cot(1.0) + 12.0 * c1 * cot(1.0) + 12.0 * PI * cot(1.0).powi(2)
                - 3.0 * s1
                - 3.0 * PI
                + 8.0 * x * csc2;
            assert_abs_diff_eq!(
                psi_closed(&e, x, Mode::Paper).unwrap(),
                want,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn consistent_free_case() {
        for x in [0.2, 1.0, 2.0, 3.0] {
            assert_abs_diff_eq!(
                phi_closed(&t(), x, Mode::Consistent).unwrap(),
                1.0 - FRAC_PI_2,
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(
                psi_closed(&t(), x, Mode::Consistent).unwrap(),
                0.0,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn offsets_cancel_in_the_drift_bracket() {
        for cfgs in [d(), e(), t()] {
            for mode in [Mode::Paper, Mode::Consistent] {
                let f = |x| phi_closed(&cfgs, x, mode).unwrap();
                let h = FRAC_PI_2 - 1e-12;
                let bracket = f(PI) + f(h) - f(FRAC_PI_2 + 1e-12) - f(0.0);
                assert_abs_diff_eq!(bracket, PI * cfgs.jump().c_even, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn potential_recovered_from_phi() {
        let c = d();
        for mode in [Mode::Paper, Mode::Consistent] {
            for x in [0.4, 1.2, 2.0, 2.9] {
                let h = 1e-5;
                let dphi = (phi_closed(&c, x + h, mode).unwrap()
                    - phi_closed(&c, x - h, mode).unwrap())
                    / (2.0 * h);
                assert_abs_diff_eq!(dphi - c.jump().c_even, -x.cos(), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn drift_is_finite_and_smooth_in_parity_class() {
        let c = d();
        let d8 = eigenvalue_shift(&c, 8);
        let d10 = eigenvalue_shift(&c, 10);
        assert_abs_diff_eq!(d8, d10, epsilon = 1e-9);
        assert_abs_diff_eq!(d8, 1.7144, epsilon = 1e-3);
        assert_eq!(eigenvalue_shift(&t(), 4), 0.0);
    }

    #[test]
    fn star_constants_of_d() {
        let c = d();
        let arg = 0.5 - c.jump().arcsin_gamma - 2.0;
        let s = star_constants(&c, 8, 2.0).unwrap();
        assert_abs_diff_eq!(
            s.t1_star,
            1.25 * 1f64.sin() + 0.75 * arg.sin(),
            epsilon = 1e-14
        );
        let odd = star_constants(&c, 9, 2.0).unwrap();
        assert!((odd.t1_star - s.t1_star).abs() > 1e-3);
    }

    #[test]
    fn mode_parses() {
        assert_eq!("paper".parse::<Mode>().unwrap(), Mode::Paper);
        assert_eq!("Consistent".parse::<Mode>().unwrap(), Mode::Consistent);
        assert!("x".parse::<Mode>().is_err());
        assert_eq!(Mode::Consistent.to_string(), "consistent");
    }
}
