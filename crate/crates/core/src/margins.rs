//! Univariate marginal distribution functions.
//!
//! [`Margin`] is the df of the underlying i.i.d. noise (`Y_n` or `U_n`);
//! [`Marginal`] describes the df of a derived component such as
//! `max{Y_n, Y_{n+1}}` (df `F²`) or its negation.

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A univariate df, possibly with a closed-form inverse.
pub trait MarginalCdf: Send + Sync {
    fn cdf(&self, x: f64) -> f64;

    fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// Solves `survival(x) = s` in closed form, when such a form exists.
    fn inverse_survival(&self, _s: f64) -> Option<f64> {
        None
    }
}

impl<T: MarginalCdf + ?Sized> MarginalCdf for &T {
    fn cdf(&self, x: f64) -> f64 {
        (**self).cdf(x)
    }

    fn survival(&self, x: f64) -> f64 {
        (**self).survival(x)
    }

    fn inverse_survival(&self, s: f64) -> Option<f64> {
        (**self).inverse_survival(s)
    }
}

/// Wraps an arbitrary df closure. Level solving falls back to bisection.
pub struct FnCdf<F>(pub F);

impl<F> MarginalCdf for FnCdf<F>
where
    F: Fn(f64) -> f64 + Send + Sync,
{
    fn cdf(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Margin {
    /// `F(x) = exp(−1/x)`, `x > 0`.
    #[default]
    UnitFrechet,
    /// `F(x) = x` on `[0, 1]`.
    StandardUniform,
}

impl Margin {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Margin::UnitFrechet => {
                let u: f64 = rng.sample(Open01);
                -1.0 / u.ln()
            }
            Margin::StandardUniform => rng.random::<f64>(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Margin::UnitFrechet => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-1.0 / x).exp()
                }
            }
            Margin::StandardUniform => x.clamp(0.0, 1.0),
        }
    }

    /// Inverse df evaluated from `log p`, which keeps precision for `p` near 1.
    pub fn quantile_from_log(&self, log_p: f64) -> f64 {
        match self {
            Margin::UnitFrechet => -1.0 / log_p,
            Margin::StandardUniform => log_p.exp(),
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.quantile_from_log(p.ln())
    }
}

impl fmt::Display for Margin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Margin::UnitFrechet => "unit_frechet",
            Margin::StandardUniform => "standard_uniform",
        })
    }
}

impl FromStr for Margin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "unit_frechet" | "frechet" => Ok(Margin::UnitFrechet),
            "standard_uniform" | "uniform" => Ok(Margin::StandardUniform),
            other => Err(Error::Parse(format!("unknown margin `{other}`"))),
        }
    }
}

impl MarginalCdf for Margin {
    fn cdf(&self, x: f64) -> f64 {
        Margin::cdf(self, x)
    }

    fn inverse_survival(&self, s: f64) -> Option<f64> {
        Some(self.quantile_from_log((-s).ln_1p()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    Base(Margin),
    /// `F^k`; for integer `k` the df of the maximum of `k` independent draws.
    Power {
        base: Margin,
        exponent: f64,
    },
    /// The df of `−X`, where `X` has the inner (continuous) df.
    Negated(Box<Marginal>),
    /// `Σ w_i F^{k_i}` for `(w_i, k_i)` in `terms`; weights sum to one.
    Polynomial {
        base: Margin,
        terms: Vec<(f64, f64)>,
    },
}

impl Marginal {
    pub fn negated(self) -> Self {
        Marginal::Negated(Box::new(self))
    }

    /// Closed-form inverse df, when one exists.
    pub fn quantile(&self, p: f64) -> Option<f64> {
        match self {
            Marginal::Base(m) => Some(m.quantile_from_log(p.ln())),
            Marginal::Power { base, exponent } => Some(base.quantile_from_log(p.ln() / exponent)),
            // P(−X ≤ y) = p  ⟺  P(X ≥ −y) = p
            Marginal::Negated(inner) => inner.inverse_survival(p).map(|v| -v),
            Marginal::Polynomial { .. } => None,
        }
    }
}

impl MarginalCdf for Marginal {
    fn cdf(&self, x: f64) -> f64 {
        match self {
            Marginal::Base(m) => m.cdf(x),
            Marginal::Power { base, exponent } => base.cdf(x).powf(*exponent),
            Marginal::Negated(inner) => inner.survival(-x),
            Marginal::Polynomial { base, terms } => {
                let h = base.cdf(x);
                terms.iter().map(|&(w, k)| w * h.powf(k)).sum()
            }
        }
    }

    fn survival(&self, x: f64) -> f64 {
        match self {
            Marginal::Negated(inner) => inner.cdf(-x),
            _ => 1.0 - self.cdf(x),
        }
    }

    fn inverse_survival(&self, s: f64) -> Option<f64> {
        match self {
            Marginal::Base(m) => Some(m.quantile_from_log((-s).ln_1p())),
            Marginal::Power { base, exponent } => Some(base.quantile_from_log((-s).ln_1p() / exponent)),
            // P(−X > v) = s  ⟺  P(X < −v) = s
            Marginal::Negated(inner) => inner.quantile(s).map(|v| -v),
            Marginal::Polynomial { .. } => None,
        }
    }
}
