//! Problem data for the Dirac system with a midpoint jump.
//!
//! The system is `y1' = (q - mu) y2`, `y2' = (mu - p) y1` on `(0, pi)` with
//! `p = V + m`, `q = V - m`, the boundary angles `theta` (at 0) and `beta`
//! (at pi), and the transmission condition `y1(pi/2+) = sigma y1(pi/2-)`,
//! `y2(pi/2+) = y2(pi/2-) / sigma`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when checking that a table covers `[0, pi]`.
const COVER_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("theta = {0} must lie in the open interval (0, pi)")]
    ThetaOutOfRange(f64),
    #[error("beta = {0} must lie in the open interval (0, pi)")]
    BetaOutOfRange(f64),
    #[error("sigma = {0} must be positive")]
    NonPositiveSigma(f64),
    #[error("sin(theta) vanishes for theta = {0}")]
    SingularTheta(f64),
    #[error("non-finite value in field `{0}`")]
    NonFinite(&'static str),
    #[error("tabulated potential: {0}")]
    BadTable(String),
    #[error("x = {0} outside [0, pi]")]
    OutOfDomain(f64),
}

/// Potential as it appears in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialSpec {
    /// `V = 0`.
    Zero,
    /// `V(x) = amplitude * cos(frequency * x)`.
    Cos {
        amplitude: f64,
        #[serde(default = "one")]
        frequency: f64,
    },
    /// `V(x) = amplitude * sin(frequency * x)`.
    Sin {
        amplitude: f64,
        #[serde(default = "one")]
        frequency: f64,
    },
    /// `V(x) = sum_k coefficients[k] * x^k`.
    Poly { coefficients: Vec<f64> },
    /// Linear interpolation through `(x, V(x))` samples covering `[0, pi]`.
    Table { points: Vec<[f64; 2]> },
}

fn one() -> f64 {
    1.0
}

impl PotentialSpec {
    pub fn cos(amplitude: f64) -> Self {
        PotentialSpec::Cos {
            amplitude,
            frequency: 1.0,
        }
    }

    fn check(&self) -> Result<(), ConfigError> {
        match self {
            PotentialSpec::Zero => Ok(()),
            PotentialSpec::Cos {
                amplitude,
                frequency,
            }
            | PotentialSpec::Sin {
                amplitude,
                frequency,
            } => {
                if !amplitude.is_finite() || !frequency.is_finite() {
                    return Err(ConfigError::NonFinite("potential"));
                }
                Ok(())
            }
            PotentialSpec::Poly { coefficients } => {
                if coefficients.iter().all(|c| c.is_finite()) {
                    Ok(())
                } else {
                    Err(ConfigError::NonFinite("potential"))
                }
            }
            PotentialSpec::Table { points } => {
                if points.len() < 2 {
                    return Err(ConfigError::BadTable("need at least two samples".into()));
                }
                if points
                    .iter()
                    .any(|p| !p[0].is_finite() || !p[1].is_finite())
                {
                    return Err(ConfigError::NonFinite("potential"));
                }
                if points.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err(ConfigError::BadTable(
                        "x samples must be strictly increasing".into(),
                    ));
                }
                let (first, last) = (points[0][0], points[points.len() - 1][0]);
                if first > COVER_TOL || last < PI - COVER_TOL {
                    return Err(ConfigError::BadTable(format!(
                        "samples span [{first}, {last}], which does not cover [0, pi]"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Evaluable potential with an exact antiderivative.
#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Zero,
    Cos {
        a: f64,
        k: f64,
    },
    Sin {
        a: f64,
        k: f64,
    },
    Poly(Vec<f64>),
    Table {
        xs: Vec<f64>,
        vs: Vec<f64>,
        cumulative: Vec<f64>,
    },
}

impl Shape {
    fn from_spec(spec: &PotentialSpec) -> Self {
        match spec {
            PotentialSpec::Zero => Shape::Zero,
            PotentialSpec::Cos {
                amplitude,
                frequency,
            } => Shape::Cos {
                a: *amplitude,
                k: *frequency,
            },
            PotentialSpec::Sin {
                amplitude,
                frequency,
            } => Shape::Sin {
                a: *amplitude,
                k: *frequency,
            },
            PotentialSpec::Poly { coefficients } => Shape::Poly(coefficients.clone()),
            PotentialSpec::Table { points } => {
                let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
                let vs: Vec<f64> = points.iter().map(|p| p[1]).collect();
                let mut cumulative = vec![0.0; xs.len()];
                for i in 1..xs.len() {
                    cumulative[i] =
                        cumulative[i - 1] + 0.5 * (vs[i] + vs[i - 1]) * (xs[i] - xs[i - 1]);
                }
                Shape::Table { xs, vs, cumulative }
            }
        }
    }

    fn value(&self, x: f64) -> f64 {
        match self {
            Shape::Zero => 0.0,
            Shape::Cos { a, k } => a * (k * x).cos(),
            Shape::Sin { a, k } => a * (k * x).sin(),
            Shape::Poly(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
            Shape::Table { xs, vs, .. } => {
                let i = segment(xs, x);
                let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
                vs[i] + t * (vs[i + 1] - vs[i])
            }
        }
    }

    /// `int_0^x V(t) dt`.
    fn integral(&self, x: f64) -> f64 {
        match self {
            Shape::Zero => 0.0,
            Shape::Cos { a, k } => {
                if *k == 0.0 {
                    a * x
                } else {
                    a * (k * x).sin() / k
                }
            }
            Shape::Sin { a, k } => {
                if *k == 0.0 {
                    0.0
                } else {
                    a * (1.0 - (k * x).cos()) / k
                }
            }
            Shape::Poly(c) => {
                c.iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (i, &ck)| acc * x + ck / (i as f64 + 1.0))
                    * x
            }
            Shape::Table { xs, vs, cumulative } => {
                table_primitive(xs, vs, cumulative, x) - table_primitive(xs, vs, cumulative, 0.0)
            }
        }
    }
}

/// Integral of the interpolant from the first sample to `x`; linear
/// extension past either end.
fn table_primitive(xs: &[f64], vs: &[f64], cumulative: &[f64], x: f64) -> f64 {
    let i = segment(xs, x);
    let dx = x - xs[i];
    let slope = (vs[i + 1] - vs[i]) / (xs[i + 1] - xs[i]);
    cumulative[i] + vs[i] * dx + 0.5 * slope * dx * dx
}

/// Index `i` with `xs[i] <= x < xs[i+1]`, clamped to the table.
fn segment(xs: &[f64], x: f64) -> usize {
    match xs.partition_point(|&xi| xi <= x) {
        0 => 0,
        p if p >= xs.len() => xs.len() - 2,
        p => p - 1,
    }
}

/// Potential normalised to zero mean on `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    shape: Shape,
    shift: f64,
}

impl Potential {
    fn normalized(spec: &PotentialSpec) -> Self {
        let shape = Shape::from_spec(spec);
        let shift = shape.integral(PI) / PI;
        Potential { shape, shift }
    }

    /// Normalised `V(x)`.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.shape.value(x) - self.shift
    }

    /// `int_0^x V`, normalised so that the value at `pi` is zero.
    #[inline]
    pub fn integral(&self, x: f64) -> f64 {
        self.shape.integral(x) - self.shift * x
    }

    /// Constant subtracted from the raw potential.
    pub fn shift(&self) -> f64 {
        self.shift
    }
}

/// Config record as read from disk, before any checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawConfig {
    pub theta: f64,
    /// Defaults to `theta` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Defaults to 1 (no jump) when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub mass: f64,
    pub potential: PotentialSpec,
}

impl RawConfig {
    pub fn new(theta: f64, beta: f64, sigma: f64, mass: f64, potential: PotentialSpec) -> Self {
        RawConfig {
            theta,
            beta: Some(beta),
            sigma: Some(sigma),
            mass,
            potential,
        }
    }
}

/// Value of one solution at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComponentPair {
    pub y1: f64,
    pub y2: f64,
}

impl ComponentPair {
    pub fn new(y1: f64, y2: f64) -> Self {
        ComponentPair { y1, y2 }
    }

    pub fn is_finite(&self) -> bool {
        self.y1.is_finite() && self.y2.is_finite()
    }
}

/// Constants generated by the jump and the boundary data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpConstants {
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub gamma: f64,
    pub arcsin_gamma: f64,
    /// `(beta - theta - arcsin gamma) / pi`, the even-index drift of the nodes.
    pub c_even: f64,
}

/// Validated, immutable problem data.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub theta: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mass: f64,
    potential: Potential,
    spec: PotentialSpec,
    jump: JumpConstants,
    rho_half: f64,
}

/// Checks the raw record and derives the jump constants.
pub fn validate_config(raw: &RawConfig) -> Result<ProblemConfig, ConfigError> {
    let theta = raw.theta;
    let beta = raw.beta.unwrap_or(theta);
    let sigma = raw.sigma.unwrap_or(1.0);
    for (name, v) in [
        ("theta", theta),
        ("beta", beta),
        ("sigma", sigma),
        ("mass", raw.mass),
    ] {
        if !v.is_finite() {
            return Err(ConfigError::NonFinite(name));
        }
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(ConfigError::ThetaOutOfRange(theta));
    }
    if theta.sin().abs() < 1e-9 {
        return Err(ConfigError::SingularTheta(theta));
    }
    if !(beta > 0.0 && beta < PI) {
        return Err(ConfigError::BetaOutOfRange(beta));
    }
    if sigma <= 0.0 {
        return Err(ConfigError::NonPositiveSigma(sigma));
    }
    raw.potential.check()?;

    let potential = Potential::normalized(&raw.potential);
    let rho_half = potential.integral(FRAC_PI_2);
    let sigma_plus = 0.5 * (sigma + 1.0 / sigma);
    let sigma_minus = 0.5 * (sigma - 1.0 / sigma);
    let gamma = -(sigma_minus / sigma_plus) * (2.0 * rho_half + theta + beta).sin();
    let arcsin_gamma = gamma.asin();
    let jump = JumpConstants {
        sigma_plus,
        sigma_minus,
        gamma,
        arcsin_gamma,
        c_even: (beta - theta - arcsin_gamma) / PI,
    };
    Ok(ProblemConfig {
        theta,
        beta,
        sigma,
        mass: raw.mass,
        potential,
        spec: raw.potential.clone(),
        jump,
        rho_half,
    })
}

impl ProblemConfig {
    /// Normalised potential `V(x)`.
    #[inline]
    pub fn v(&self, x: f64) -> f64 {
        self.potential.value(x)
    }

    /// `p(x) = V(x) + m`.
    #[inline]
    pub fn p(&self, x: f64) -> f64 {
        self.potential.value(x) + self.mass
    }

    /// `q(x) = V(x) - m`.
    #[inline]
    pub fn q(&self, x: f64) -> f64 {
        self.potential.value(x) - self.mass
    }

    /// `rho(x) = int_0^x V`, without the domain check.
    #[inline]
    pub fn rho_unchecked(&self, x: f64) -> f64 {
        self.potential.integral(x)
    }

    /// `rho(pi/2)`.
    pub fn rho_half(&self) -> f64 {
        self.rho_half
    }

    /// Constant removed from the raw potential to give it zero mean.
    pub fn potential_shift(&self) -> f64 {
        self.potential.shift()
    }

    pub fn potential_spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn jump(&self) -> JumpConstants {
        self.jump
    }

    /// `theta = pi/2` makes `cot theta` vanish; the paper-mode mass formula
    /// divides by it.
    pub fn theta_is_degenerate(&self) -> bool {
        (self.theta - FRAC_PI_2).abs() < 1e-9
    }

    /// Record that validates back to this config.
    pub fn to_raw(&self) -> RawConfig {
        RawConfig::new(
            self.theta,
            self.beta,
            self.sigma,
            self.mass,
            self.spec.clone(),
        )
    }
}

/// `rho(x) = int_0^x V(t) dt`.
pub fn rho(config: &ProblemConfig, x: f64) -> Result<f64, ConfigError> {
    if !(0.0..=PI).contains(&x) {
        return Err(ConfigError::OutOfDomain(x));
    }
    Ok(config.rho_unchecked(x))
}

/// `rho_1(x) = rho(x) - rho(pi/2)`.
pub fn rho1(config: &ProblemConfig, x: f64) -> Result<f64, ConfigError> {
    Ok(rho(config, x)? - config.rho_half())
}

pub fn jump_constants(config: &ProblemConfig) -> JumpConstants {
    config.jump()
}
