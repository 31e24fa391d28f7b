//! Symmetric negative-definite exponents `η` and their Bernstein functions.
//!
//! A central measure in the induced class has Fourier coefficients
//! `e^{-t η(√κ_π)}`; the exponent families here supply `η`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric point mass pair `(δ_x + δ_{-x}) / 2` carrying `weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: f64,
    pub weight: f64,
}

/// Parametric exponent families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Exponent {
    /// `η(u) = ½σ²u²`.
    Gaussian { variance: f64 },
    /// `η(u) = log(1 + β²u²)`.
    Laplace { beta: f64 },
    /// `η(u) = b^α |u|^α`, `0 < α < 2`.
    Stable { b: f64, alpha: f64 },
    /// `η(u) = σ|u|`.
    Cauchy { sigma: f64 },
    /// `η(u) = √(u² + m²) − m`.
    Relativistic { mass: f64 },
    /// `η(u) = λ Σ w_i (1 − cos(u x_i))` with `Σ w_i = 1`.
    CompoundPoisson { rate: f64, atoms: Vec<Atom> },
    /// `η(u) = ½σ²u² + Σ w_i (1 − cos(u x_i))`.
    LevyKhintchine { variance: f64, atoms: Vec<Atom> },
}

/// Lower envelope class of `η` at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum DecayClass {
    /// `η(u) ≥ scale · u^gamma − offset` for every `u ≥ 0`; the right-hand
    /// side is positive for `u > u0`.
    ExponentialType {
        gamma: f64,
        scale: f64,
        offset: f64,
        u0: f64,
    },
    /// `η(u) = log(1 + β²u²)`.
    Logarithmic { beta: f64 },
    /// `η(u) ≤ sup` everywhere.
    Bounded { sup: f64 },
}

/// Bernstein function `f` with `η(√u) = f(u)`, for families obtained by
/// subordinating the heat semigroup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BernsteinView {
    /// `f(u) = a u`.
    Linear { a: f64 },
    /// `f(u) = log(1 + β²u)`.
    Logarithmic { beta: f64 },
    /// `f(u) = b^α u^{α/2}`.
    Power { b: f64, alpha: f64 },
    /// `f(u) = √(u + m²) − m`.
    Relativistic { mass: f64 },
}

impl BernsteinView {
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            BernsteinView::Linear { a } => a * u,
            BernsteinView::Logarithmic { beta } => (beta * beta * u).ln_1p(),
            BernsteinView::Power { b, alpha } => b.powf(alpha) * u.powf(alpha / 2.0),
            BernsteinView::Relativistic { mass } => {
                // √(u+m²) − m without cancellation
                u / ((u + mass * mass).sqrt() + mass)
            }
        }
    }
}

fn one_minus_cos(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    2.0 * s * s
}

/// Largest grid point used to certify [`Exponent::growth_bound`].
pub const GROWTH_GRID_MAX: f64 = 1000.0;
/// Spacing of the certification grid.
pub const GROWTH_GRID_STEP: f64 = 0.01;

impl Exponent {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        let pos = |x: f64| x > 0.0 && x.is_finite();
        match self {
            Exponent::Gaussian { variance } if !pos(*variance) => bad("gaussian variance must be positive"),
            Exponent::Laplace { beta } if !pos(*beta) => bad("laplace beta must be positive"),
            Exponent::Stable { b, alpha } => {
                if !pos(*b) {
                    bad("stable scale b must be positive")
                } else if !(*alpha > 0.0 && *alpha < 2.0) {
                    bad("stable index alpha must lie in (0, 2)")
                } else {
                    Ok(())
                }
            }
            Exponent::Cauchy { sigma } if !pos(*sigma) => bad("cauchy sigma must be positive"),
            Exponent::Relativistic { mass } if !pos(*mass) => bad("relativistic mass must be positive"),
            Exponent::CompoundPoisson { rate, atoms } => {
                if !pos(*rate) {
                    return bad("compound poisson rate must be positive");
                }
                check_atoms(atoms)?;
                let total: f64 = atoms.iter().map(|a| a.weight).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return bad("compound poisson jump weights must sum to 1");
                }
                Ok(())
            }
            Exponent::LevyKhintchine { variance, atoms } => {
                if !(*variance >= 0.0 && variance.is_finite()) {
                    return bad("levy-khintchine variance must be non-negative");
                }
                if atoms.is_empty() && *variance == 0.0 {
                    return bad("levy-khintchine exponent is identically zero");
                }
                check_atoms(atoms)
            }
            _ => Ok(()),
        }
    }

    /// `η(u)`; symmetric in `u` with `η(0) = 0`.
    pub fn eta(&self, u: f64) -> f64 {
        let u = u.abs();
        match self {
            Exponent::Gaussian { variance } => 0.5 * variance * u * u,
            Exponent::Laplace { beta } => (beta * beta * u * u).ln_1p(),
            Exponent::Stable { b, alpha } => b.powf(*alpha) * u.powf(*alpha),
            Exponent::Cauchy { sigma } => sigma * u,
            Exponent::Relativistic { mass } => u * u / ((u * u + mass * mass).sqrt() + mass),
            Exponent::CompoundPoisson { rate, atoms } => {
                rate * atoms
                    .iter()
                    .map(|a| a.weight * one_minus_cos(u * a.position))
                    .sum::<f64>()
            }
            Exponent::LevyKhintchine { variance, atoms } => {
                0.5 * variance * u * u
                    + atoms
                        .iter()
                        .map(|a| a.weight * one_minus_cos(u * a.position))
                        .sum::<f64>()
            }
        }
    }

    /// Symbol value `α = −η(√κ)` for a Casimir eigenvalue `κ`.
    pub fn symbol_alpha(&self, casimir: f64) -> f64 {
        -self.eta(casimir.max(0.0).sqrt())
    }

    pub fn bernstein(&self) -> Option<BernsteinView> {
        match *self {
            Exponent::Gaussian { variance } => Some(BernsteinView::Linear { a: 0.5 * variance }),
            Exponent::Laplace { beta } => Some(BernsteinView::Logarithmic { beta }),
            Exponent::Stable { b, alpha } => Some(BernsteinView::Power { b, alpha }),
            Exponent::Cauchy { sigma } => Some(BernsteinView::Power { b: sigma, alpha: 1.0 }),
            Exponent::Relativistic { mass } => Some(BernsteinView::Relativistic { mass }),
            _ => None,
        }
    }

    /// Whether `η` is non-decreasing on `[0, ∞)`.
    pub fn is_monotone(&self) -> bool {
        match self {
            Exponent::CompoundPoisson { .. } => false,
            Exponent::LevyKhintchine { atoms, .. } => atoms.is_empty(),
            _ => true,
        }
    }

    /// Upper bound on the Casimir values `κ` with `η(√κ) ≤ level`, or `None`
    /// when `η` is bounded.
    pub fn casimir_bound(&self, level: f64) -> Option<f64> {
        let level = level.max(0.0);
        match self {
            Exponent::Gaussian { variance } => Some(2.0 * level / variance),
            Exponent::Laplace { beta } => Some(level.exp_m1() / (beta * beta)),
            Exponent::Stable { b, alpha } => Some((level / b.powf(*alpha)).powf(2.0 / alpha)),
            Exponent::Cauchy { sigma } => Some((level / sigma).powi(2)),
            Exponent::Relativistic { mass } => Some(level * (level + 2.0 * mass)),
            Exponent::LevyKhintchine { variance, .. } if *variance > 0.0 => Some(2.0 * level / variance),
            _ => None,
        }
    }

    /// A constant `K` with `η(u) ≤ K(1 + u²)` for all real `u`.
    ///
    /// The returned value is the larger of the maximum of `η(u)/(1+u²)` on
    /// the grid `0, 0.01, …, 1000` and an analytic bound for `u ≥ 1000`; it is
    /// checked against every grid point before being returned.
    pub fn growth_bound(&self) -> f64 {
        let steps = (GROWTH_GRID_MAX / GROWTH_GRID_STEP).round() as u64;
        let grid_max = (0..=steps)
            .map(|i| {
                let u = i as f64 * GROWTH_GRID_STEP;
                self.eta(u) / (1.0 + u * u)
            })
            .fold(0.0, f64::max);
        let u = GROWTH_GRID_MAX;
        let beyond = match self {
            Exponent::Gaussian { variance } => 0.5 * variance,
            Exponent::Laplace { beta } => (beta * beta * u * u).ln_1p() / (u * u),
            Exponent::Stable { b, alpha } => b.powf(*alpha) * u.powf(alpha - 2.0),
            Exponent::Cauchy { sigma } => sigma / u,
            Exponent::Relativistic { .. } => 1.0 / u,
            Exponent::CompoundPoisson { rate, .. } => 2.0 * rate / (1.0 + u * u),
            Exponent::LevyKhintchine { variance, atoms } => {
                0.5 * variance + 2.0 * atoms.iter().map(|a| a.weight).sum::<f64>() / (1.0 + u * u)
            }
        };
        // round up by a few ulps so the grid maximum itself certifies
        let k = grid_max.max(beyond) * (1.0 + 4.0 * f64::EPSILON);
        debug_assert!((0..=steps).all(|i| {
            let u = i as f64 * GROWTH_GRID_STEP;
            self.eta(u) <= k * (1.0 + u * u)
        }));
        k
    }

    /// Analytic lower-envelope class; constants are exact per family.
    pub fn decay_class(&self) -> DecayClass {
        let exp_type = |gamma: f64, scale: f64, offset: f64| DecayClass::ExponentialType {
            gamma,
            scale,
            offset,
            u0: (offset / scale).powf(1.0 / gamma),
        };
        match self {
            Exponent::Gaussian { variance } => exp_type(2.0, 0.5 * variance, 0.0),
            Exponent::Stable { b, alpha } => exp_type(*alpha, b.powf(*alpha), 0.0),
            Exponent::Cauchy { sigma } => exp_type(1.0, *sigma, 0.0),
            // √(u²+m²) − m ≥ u − m
            Exponent::Relativistic { mass } => exp_type(1.0, 1.0, *mass),
            Exponent::Laplace { beta } => DecayClass::Logarithmic { beta: *beta },
            Exponent::CompoundPoisson { rate, .. } => DecayClass::Bounded { sup: 2.0 * rate },
            Exponent::LevyKhintchine { variance, atoms } => {
                if *variance > 0.0 {
                    exp_type(2.0, 0.5 * variance, 0.0)
                } else {
                    DecayClass::Bounded {
                        sup: 2.0 * atoms.iter().map(|a| a.weight).sum::<f64>(),
                    }
                }
            }
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Exponent::Gaussian { .. } => "gaussian",
            Exponent::Laplace { .. } => "laplace",
            Exponent::Stable { .. } => "stable",
            Exponent::Cauchy { .. } => "cauchy",
            Exponent::Relativistic { .. } => "relativistic",
            Exponent::CompoundPoisson { .. } => "compound_poisson",
            Exponent::LevyKhintchine { .. } => "levy_khintchine",
        }
    }
}

fn check_atoms(atoms: &[Atom]) -> Result<()> {
    for a in atoms {
        if !(a.position > 0.0 && a.position.is_finite() && a.weight > 0.0 && a.weight.is_finite()) {
            return Err(Error::InvalidParameter(
                "atoms need positive finite positions and weights".into(),
            ));
        }
    }
    Ok(())
}

fn fmt_atoms(atoms: &[Atom]) -> String {
    atoms
        .iter()
        .map(|a| format!("{}:{}", a.position, a.weight))
        .collect::<Vec<_>>()
        .join(",")
}

/// Canonical key–value form, e.g. `family=stable b=1 alpha=1.5`.
impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family={}", self.family_name())?;
        match self {
            Exponent::Gaussian { variance } => write!(f, " variance={variance}"),
            Exponent::Laplace { beta } => write!(f, " beta={beta}"),
            Exponent::Stable { b, alpha } => write!(f, " b={b} alpha={alpha}"),
            Exponent::Cauchy { sigma } => write!(f, " sigma={sigma}"),
            Exponent::Relativistic { mass } => write!(f, " m={mass}"),
            Exponent::CompoundPoisson { rate, atoms } => {
                write!(f, " rate={rate} atoms={}", fmt_atoms(atoms))
            }
            Exponent::LevyKhintchine { variance, atoms } => {
                write!(f, " variance={variance}")?;
                if !atoms.is_empty() {
                    write!(f, " atoms={}", fmt_atoms(atoms))?;
                }
                Ok(())
            }
        }
    }
}

/// Parses whitespace-separated `key=value` tokens.
///
/// | family             | keys                              |
/// |--------------------|-----------------------------------|
/// | `gaussian`         | `variance` (or `sigma2`)          |
/// | `laplace`          | `beta`                            |
/// | `stable`           | `b`, `alpha`                      |
/// | `cauchy`           | `sigma`                           |
/// | `relativistic`     | `m` (or `mass`)                   |
/// | `compound_poisson` | `rate` (or `lambda`), `atoms`     |
/// | `levy_khintchine`  | `variance`, `atoms` (optional)    |
///
/// `atoms` is a comma-separated list of `position:weight` pairs.
impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut kv = std::collections::BTreeMap::new();
        for tok in s.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, found `{tok}`")))?;
            if kv.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate key `{k}`")));
            }
        }
        let family = kv
            .remove("family")
            .ok_or_else(|| Error::InvalidParameter("exponent spec needs `family=`".into()))?;
        let mut take = |names: &[&str]| -> Result<f64> {
            for n in names {
                if let Some(v) = kv.remove(*n) {
                    return v
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("bad number for `{n}`: `{v}`")));
                }
            }
            Err(Error::InvalidParameter(format!(
                "family `{family}` needs `{}`",
                names[0]
            )))
        };
        let e = match family.as_str() {
            "gaussian" | "heat" => Exponent::Gaussian {
                variance: take(&["variance", "sigma2"])?,
            },
            "laplace" => Exponent::Laplace { beta: take(&["beta"])? },
            "stable" => Exponent::Stable {
                b: take(&["b"])?,
                alpha: take(&["alpha"])?,
            },
            "cauchy" => Exponent::Cauchy { sigma: take(&["sigma"])? },
            "relativistic" => Exponent::Relativistic {
                mass: take(&["m", "mass"])?,
            },
            "compound_poisson" => {
                let rate = take(&["rate", "lambda"])?;
                let atoms = parse_atoms(kv.remove("atoms").as_deref().unwrap_or(""))?;
                Exponent::CompoundPoisson { rate, atoms }
            }
            "levy_khintchine" => {
                let variance = take(&["variance", "sigma2"])?;
                let atoms = parse_atoms(kv.remove("atoms").as_deref().unwrap_or(""))?;
                Exponent::LevyKhintchine { variance, atoms }
            }
            other => {
                return Err(Error::InvalidParameter(format!("unknown exponent family `{other}`")))
            }
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::InvalidParameter(format!(
                "unexpected key `{k}` for family `{family}`"
            )));
        }
        e.validate()?;
        Ok(e)
    }
}

fn parse_atoms(s: &str) -> Result<Vec<Atom>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|pair| {
            let (x, w) = pair
                .split_once(':')
                .ok_or_else(|| Error::InvalidParameter(format!("atom `{pair}` is not position:weight")))?;
            let num = |t: &str| {
                t.parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad atom number `{t}`")))
            };
            Ok(Atom {
                position: num(x)?,
                weight: num(w)?,
            })
        })
        .collect()
}
