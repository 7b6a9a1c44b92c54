//! Closed-form MEV models for the max-autoregressive ±X sequence, the
//! 3-dependent `(Z_n, Z_{n+2}, Z_{n+1})` sequence and an independent baseline.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::margins::{Margin, Marginal, MarginalCdf};
use crate::mev::{MevModel, PartitionSpec, ThetaRay};

/// Largest dimension a built-in model may have.
pub const MAX_DIM: usize = 1024;

/// Which built-in model (and simulator) to use.
///
/// JSON form: `{"kind":"max_ar","p":2,"q":1}`, `{"kind":"three_dependent"}`,
/// `{"kind":"iid_product","d":3}`. Unknown or misplaced fields are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawSpec")]
pub enum ModelSpec {
    /// `X_n = max{Y_n, Y_{n+1}}` repeated `p` times, then `−X_n` repeated `q` times.
    MaxAr { p: usize, q: usize },
    /// `(Z_n, Z_{n+2}, Z_{n+1})` with `Z_n = U_n` or `U_{n+1}` by a fair coin.
    ThreeDependent,
    /// `d` independent coordinates, no clustering.
    IidProduct { d: usize },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: String,
    p: Option<usize>,
    q: Option<usize>,
    d: Option<usize>,
}

impl TryFrom<RawSpec> for ModelSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let spec = ModelSpec::from_parts(&raw.kind, raw.p, raw.q, raw.d)?;
        let stray = match spec {
            ModelSpec::MaxAr { .. } => raw.d.map(|_| "d"),
            ModelSpec::ThreeDependent => raw.p.map(|_| "p").or(raw.q.map(|_| "q")).or(raw.d.map(|_| "d")),
            ModelSpec::IidProduct { .. } => raw.p.map(|_| "p").or(raw.q.map(|_| "q")),
        };
        match stray {
            Some(field) => Err(Error::Parse(format!(
                "field `{field}` does not apply to {}",
                raw.kind
            ))),
            None => Ok(spec),
        }
    }
}

impl ModelSpec {
    /// Builds a spec from a kind name and the optional size arguments.
    pub fn from_parts(kind: &str, p: Option<usize>, q: Option<usize>, d: Option<usize>) -> Result<Self> {
        let spec = match kind.trim() {
            "max_ar" | "ex31" => ModelSpec::MaxAr {
                p: p.ok_or_else(|| Error::invalid("max_ar needs p"))?,
                q: q.ok_or_else(|| Error::invalid("max_ar needs q"))?,
            },
            "three_dependent" | "ex32" => ModelSpec::ThreeDependent,
            "iid_product" | "iid" => ModelSpec::IidProduct {
                d: d.ok_or_else(|| Error::invalid("iid_product needs d"))?,
            },
            other => return Err(Error::Parse(format!("unknown model kind `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::MaxAr { p, q } if p == 0 || q == 0 => {
                Err(Error::invalid("max_ar needs p >= 1 and q >= 1"))
            }
            ModelSpec::MaxAr { p, q } if p.checked_add(q).map_or(true, |d| d > MAX_DIM) => {
                Err(Error::invalid(format!("max_ar needs p + q <= {MAX_DIM}")))
            }
            ModelSpec::IidProduct { d: 0 } => Err(Error::invalid("iid_product needs d >= 1")),
            ModelSpec::IidProduct { d } if d > MAX_DIM => {
                Err(Error::invalid(format!("iid_product needs d <= {MAX_DIM}")))
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            ModelSpec::MaxAr { p, q } => p + q,
            ModelSpec::ThreeDependent => 3,
            ModelSpec::IidProduct { d } => d,
        }
    }

    pub fn build(&self) -> Result<MevModel> {
        match *self {
            ModelSpec::MaxAr { p, q } => max_ar_model(p, q),
            ModelSpec::ThreeDependent => Ok(three_dependent_model()),
            ModelSpec::IidProduct { d } => iid_product_model(d),
        }
    }

    /// The split the model was built around, if it has one.
    pub fn canonical_partition(&self) -> Option<PartitionSpec> {
        match *self {
            ModelSpec::MaxAr { p, q } => PartitionSpec::canonical(p, q).ok(),
            ModelSpec::ThreeDependent => PartitionSpec::canonical(2, 1).ok(),
            ModelSpec::IidProduct { d } if d >= 2 => PartitionSpec::canonical(d - 1, 1).ok(),
            ModelSpec::IidProduct { .. } => None,
        }
    }

    /// Per-coordinate dfs of one simulated observation when the noise has df `margin`.
    pub fn component_margins(&self, margin: Margin) -> Vec<Marginal> {
        match *self {
            ModelSpec::MaxAr { p, q } => {
                let x = Marginal::Power {
                    base: margin,
                    exponent: 2.0,
                };
                let mut out = vec![x.clone(); p];
                out.extend(std::iter::repeat(x.negated()).take(q));
                out
            }
            ModelSpec::ThreeDependent => vec![Marginal::Base(margin); 3],
            ModelSpec::IidProduct { d } => vec![Marginal::Base(margin); d],
        }
    }

    /// The df of the row maximum `max_j X_{n,j}`; only meaningful when all
    /// coordinates share one margin.
    pub fn row_max_margin(&self, margin: Margin) -> Option<Marginal> {
        match *self {
            // T(x, x, x) = ½H³(x) + ½H²(x)
            ModelSpec::ThreeDependent => Some(Marginal::Polynomial {
                base: margin,
                terms: vec![(0.5, 3.0), (0.5, 2.0)],
            }),
            ModelSpec::IidProduct { d } => Some(Marginal::Power {
                base: margin,
                exponent: d as f64,
            }),
            // X_n >= 0 >= −X_n under both margins, so the row maximum is X_n.
            ModelSpec::MaxAr { .. } => Some(Marginal::Power {
                base: margin,
                exponent: 2.0,
            }),
        }
    }

    /// The joint df `Q(x)` of one observation vector, evaluated at `levels`.
    /// `+∞` entries are coordinates that impose no constraint.
    pub fn joint_cdf(&self, margin: Margin, levels: &[f64]) -> Result<f64> {
        if levels.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: levels.len(),
            });
        }
        let value = match *self {
            ModelSpec::MaxAr { p, .. } => {
                // X ≤ min u  and  −X ≤ min v  ⟺  −min v ≤ X ≤ min u
                let upper = levels[..p].iter().copied().fold(f64::INFINITY, f64::min);
                let lower = -levels[p..].iter().copied().fold(f64::INFINITY, f64::min);
                let x = Marginal::Power {
                    base: margin,
                    exponent: 2.0,
                };
                (x.cdf(upper) - x.cdf(lower)).max(0.0)
            }
            ModelSpec::ThreeDependent => {
                let h = |x: f64| margin.cdf(x);
                let (x1, x2, x3) = (levels[0], levels[1], levels[2]);
                0.5 * h(x1) * h(x2) * h(x3) + 0.25 * h(x1) * h(x2.min(x3)) + 0.25 * h(x2) * h(x1.min(x3))
            }
            ModelSpec::IidProduct { .. } => levels.iter().map(|&x| margin.cdf(x)).product(),
        };
        Ok(value)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::MaxAr { p, q } => write!(f, "max_ar(p={p},q={q})"),
            ModelSpec::ThreeDependent => f.write_str("three_dependent"),
            ModelSpec::IidProduct { d } => write!(f, "iid_product(d={d})"),
        }
    }
}

fn block_max(t: &[f64]) -> f64 {
    t.iter().copied().fold(0.0, f64::max)
}

/// The ±X model: `γ = max_{j≤p} τ_j + max_{j>p} τ_j`,
/// `θγ = ½ max_{j≤p} τ_j + max_{j>p} τ_j`, θ known everywhere.
pub fn max_ar_model(p: usize, q: usize) -> Result<MevModel> {
    if p == 0 || q == 0 {
        return Err(Error::invalid("max_ar needs p >= 1 and q >= 1"));
    }
    let gamma = move |t: &[f64]| block_max(&t[..p]) + block_max(&t[p..]);
    let theta = move |t: &[f64]| {
        let (a, b) = (block_max(&t[..p]), block_max(&t[p..]));
        (0.5 * a + b) / (a + b)
    };
    Ok(MevModel::with_total_theta(
        p + q,
        format!("max_ar(p={p},q={q})"),
        gamma,
        theta,
    ))
}

/// Stable tail dependence of the 3-dependent model, read off `−log G`.
///
/// Ties go to the `≥` branches; the function is continuous across them.
pub fn three_dependent_gamma(t: &[f64]) -> f64 {
    let (t1, t2, t3) = (t[0], t[1], t[2]);
    match (t1 > t3, t2 > t3) {
        (true, true) => t1 + t2 + 0.5 * t3,
        (true, false) => t1 + 0.75 * t2 + 0.75 * t3,
        (false, true) => 0.75 * t1 + t2 + 0.75 * t3,
        (false, false) => 0.75 * t1 + 0.75 * t2 + t3,
    }
}

/// The 3-dependent model. θ is known on the diagonal (`3/10`), on the
/// coordinate axes (`3/4`) and on the `(1, 1, 0)` ray (`3/8`).
pub fn three_dependent_model() -> MevModel {
    let rays = vec![
        ThetaRay::new(vec![1.0, 1.0, 1.0], 0.3),
        ThetaRay::new(vec![1.0, 0.0, 0.0], 0.75),
        ThetaRay::new(vec![0.0, 1.0, 0.0], 0.75),
        ThetaRay::new(vec![0.0, 0.0, 1.0], 0.75),
        // ε of (Y_1, Y_2) is 3/4 and γ(1, 1, 0) = 2
        ThetaRay::new(vec![1.0, 1.0, 0.0], 0.375),
    ];
    MevModel::with_theta_rays(3, "three_dependent", three_dependent_gamma, rays)
        .expect("built-in rays are valid")
}

/// Independent coordinates: `γ(τ) = Σ τ_j`, `θ ≡ 1`.
pub fn iid_product_model(d: usize) -> Result<MevModel> {
    if d == 0 {
        return Err(Error::invalid("iid_product needs d >= 1"));
    }
    Ok(MevModel::with_total_theta(
        d,
        format!("iid_product(d={d})"),
        |t: &[f64]| t.iter().sum(),
        |_| 1.0,
    ))
}
