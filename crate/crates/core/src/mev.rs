//! The MEV model abstraction: stable tail dependence `γ`, extremal index
//! function `θ`, and the derived attractor / limit distribution functions.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::margins::MarginalCdf;

/// Relative tolerance used to decide whether a point lies on a known θ ray.
const RAY_RTOL: f64 = 1e-10;

pub type SurfaceFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// `|a − b| ≤ tol · max(1, |a|, |b|)`.
pub(crate) fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// A point of marginal exceedance intensities, `τ_j = −log F(x_j)`.
///
/// A zero entry means the coordinate is dropped (the `τ_j → 0⁺` limit).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TauVector(Vec<f64>);

impl TauVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("tau vector must have at least one entry"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::invalid(format!(
                "tau entries must be finite and >= 0, got {bad}"
            )));
        }
        Ok(TauVector(values))
    }

    pub fn ones(d: usize) -> Self {
        TauVector(vec![1.0; d])
    }

    /// Ones on `block`, zeros elsewhere.
    pub fn unit_on(d: usize, block: &[usize]) -> Self {
        let mut v = vec![0.0; d];
        for &j in block {
            v[j] = 1.0;
        }
        TauVector(v)
    }

    /// `τ_j = −log F(x_j)` for a common marginal df `F`.
    pub fn from_levels(x: &[f64], margin: &dyn MarginalCdf) -> Result<Self> {
        let values = x
            .iter()
            .map(|&xj| {
                let f = margin.cdf(xj);
                if !(f > 0.0 && f <= 1.0) {
                    return Err(Error::invalid(format!(
                        "marginal df at {xj} is {f}; need a value in (0, 1]"
                    )));
                }
                Ok(-f.ln())
            })
            .collect::<Result<Vec<_>>>()?;
        TauVector::new(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        TauVector(self.0.iter().map(|v| v * c).collect())
    }

    /// Keeps the entries listed in `block` and zeroes the rest.
    pub fn restrict(&self, block: &[usize]) -> Self {
        let mut v = vec![0.0; self.dim()];
        for &j in block {
            v[j] = self.0[j];
        }
        TauVector(v)
    }

    /// The sub-vector indexed by `block`.
    pub fn select(&self, block: &[usize]) -> Self {
        TauVector(block.iter().map(|&j| self.0[j]).collect())
    }
}

impl TryFrom<Vec<f64>> for TauVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        TauVector::new(v)
    }
}

impl From<TauVector> for Vec<f64> {
    fn from(t: TauVector) -> Self {
        t.0
    }
}

impl FromStr for TauVector {
    type Err = Error;

    /// Parses `1,0.5,2`.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad tau entry `{}`", part.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        TauVector::new(values)
    }
}

impl fmt::Display for TauVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// An ordered split of the coordinates `0..d` into a p-block and a q-block.
///
/// Indices are zero-based internally; the text form `1,2|3` is one-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    p: Vec<usize>,
    q: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(p: Vec<usize>, q: Vec<usize>) -> Result<Self> {
        if p.is_empty() || q.is_empty() {
            return Err(Error::invalid("both partition blocks must be non-empty"));
        }
        for block in [&p, &q] {
            if block.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(
                    "partition indices must be strictly increasing within a block",
                ));
            }
        }
        let d = p.len() + q.len();
        let mut seen = vec![false; d];
        for &j in p.iter().chain(&q) {
            if j >= d || seen[j] {
                return Err(Error::invalid(format!(
                    "partition blocks must be disjoint and cover 1..={d}"
                )));
            }
            seen[j] = true;
        }
        Ok(PartitionSpec { p, q })
    }

    /// `{1..p} | {p+1..p+q}`.
    pub fn canonical(p: usize, q: usize) -> Result<Self> {
        PartitionSpec::new((0..p).collect(), (p..p + q).collect())
    }

    pub fn dim(&self) -> usize {
        self.p.len() + self.q.len()
    }

    pub fn p_block(&self) -> &[usize] {
        &self.p
    }

    pub fn q_block(&self) -> &[usize] {
        &self.q
    }
}

impl FromStr for PartitionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (left, right) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("partition `{s}` needs a `|` separator")))?;
        let block = |text: &str| -> Result<Vec<usize>> {
            text.split(',')
                .map(|part| {
                    let part = part.trim();
                    match part.parse::<usize>() {
                        Ok(j) if j >= 1 => Ok(j - 1),
                        _ => Err(Error::Parse(format!("bad partition index `{part}`"))),
                    }
                })
                .collect()
        };
        PartitionSpec::new(block(left)?, block(right)?)
    }
}

impl fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |b: &[usize]| {
            b.iter()
                .map(|j| (j + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}|{}", join(&self.p), join(&self.q))
    }
}

impl Serialize for PartitionSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A point where θ is known, extended to its whole ray by order-0 homogeneity.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaRay {
    pub direction: Vec<f64>,
    pub value: f64,
}

impl ThetaRay {
    pub fn new(direction: Vec<f64>, value: f64) -> Self {
        ThetaRay { direction, value }
    }

    fn contains(&self, tau: &[f64]) -> bool {
        if tau.len() != self.direction.len() {
            return false;
        }
        // Same support, then a common positive scale factor.
        if tau
            .iter()
            .zip(&self.direction)
            .any(|(&t, &r)| (t == 0.0) != (r == 0.0))
        {
            return false;
        }
        let Some((t0, r0)) = tau.iter().zip(&self.direction).find(|(&t, _)| t > 0.0) else {
            return false;
        };
        let c = t0 / r0;
        tau.iter()
            .zip(&self.direction)
            .all(|(&t, &r)| (t - c * r).abs() <= RAY_RTOL * t.max(c * r))
    }
}

#[derive(Clone)]
enum ThetaSource {
    Total(SurfaceFn),
    Rays(Vec<ThetaRay>),
}

/// Result of [`MevModel::check_homogeneity`]. `theta_order_zero` is `None`
/// when θ is unknown at one of the two test points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Homogeneity {
    pub gamma_order_one: bool,
    pub theta_order_zero: Option<bool>,
}

/// A limiting MEV dependence structure: `γ` plus `θ` on a declared domain.
///
/// Immutable after construction and cheap to clone.
#[derive(Clone)]
pub struct MevModel {
    dim: usize,
    label: String,
    gamma: SurfaceFn,
    theta: ThetaSource,
}

impl fmt::Debug for MevModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let domain = match &self.theta {
            ThetaSource::Total(_) => "total".to_string(),
            ThetaSource::Rays(r) => format!("{} rays", r.len()),
        };
        f.debug_struct("MevModel")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("theta_domain", &domain)
            .finish()
    }
}

impl MevModel {
    /// A model whose θ is known everywhere.
    pub fn with_total_theta<G, T>(dim: usize, label: impl Into<String>, gamma: G, theta: T) -> Self
    where
        G: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        T: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        assert!(dim >= 1, "model dimension must be >= 1");
        MevModel {
            dim,
            label: label.into(),
            gamma: Arc::new(gamma),
            theta: ThetaSource::Total(Arc::new(theta)),
        }
    }

    /// A model whose θ is only known on the given rays.
    pub fn with_theta_rays<G>(
        dim: usize,
        label: impl Into<String>,
        gamma: G,
        rays: Vec<ThetaRay>,
    ) -> Result<Self>
    where
        G: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::invalid("model dimension must be >= 1"));
        }
        for ray in &rays {
            if ray.direction.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: ray.direction.len(),
                });
            }
            if ray.direction.iter().any(|v| !v.is_finite() || *v < 0.0)
                || ray.direction.iter().all(|v| *v == 0.0)
            {
                return Err(Error::invalid("ray directions must be non-negative and non-zero"));
            }
            if !(0.0..=1.0).contains(&ray.value) {
                return Err(Error::invalid(format!(
                    "theta must lie in [0, 1], got {}",
                    ray.value
                )));
            }
        }
        Ok(MevModel {
            dim,
            label: label.into(),
            gamma: Arc::new(gamma),
            theta: ThetaSource::Rays(rays),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_total_theta(&self) -> bool {
        matches!(self.theta, ThetaSource::Total(_))
    }

    fn check_dim(&self, tau: &TauVector) -> Result<()> {
        if tau.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: tau.dim(),
            });
        }
        Ok(())
    }

    /// `γ(τ) = −log G(F⁻¹(e^{−τ_1}), …)`. Zero exactly at `τ = 0`.
    pub fn gamma(&self, tau: &TauVector) -> Result<f64> {
        self.check_dim(tau)?;
        if tau.is_zero() {
            return Ok(0.0);
        }
        Ok((self.gamma)(tau.as_slice()))
    }

    pub fn theta(&self, tau: &TauVector) -> Result<f64> {
        self.check_dim(tau)?;
        if tau.is_zero() {
            return Err(Error::invalid("theta needs at least one positive tau entry"));
        }
        match &self.theta {
            ThetaSource::Total(f) => Ok(f(tau.as_slice())),
            ThetaSource::Rays(rays) => rays
                .iter()
                .find(|r| r.contains(tau.as_slice()))
                .map(|r| r.value)
                .ok_or_else(|| Error::InsufficientModelData(tau.to_string())),
        }
    }

    /// `θ(τ)γ(τ)`, i.e. `−log` of the limit df. Zero at `τ = 0`.
    pub fn limit_exponent(&self, tau: &TauVector) -> Result<f64> {
        self.check_dim(tau)?;
        if tau.is_zero() {
            return Ok(0.0);
        }
        Ok(self.theta(tau)? * self.gamma(tau)?)
    }

    /// `G = exp(−γ(τ))`, the limit df of the associated i.i.d. maxima.
    pub fn attractor_df(&self, tau: &TauVector) -> Result<f64> {
        Ok((-self.gamma(tau)?).exp())
    }

    /// `H = exp(−θ(τ)γ(τ))`, the limit df of the stationary maxima.
    pub fn limit_df(&self, tau: &TauVector) -> Result<f64> {
        Ok((-self.limit_exponent(tau)?).exp())
    }

    /// The sub-model on `keep` (zero-based, strictly increasing).
    ///
    /// Dropped coordinates are evaluated as exact zeros in the parent.
    pub fn marginalize(&self, keep: &[usize]) -> Result<MevModel> {
        if keep.is_empty() {
            return Err(Error::invalid("marginalize needs a non-empty index set"));
        }
        if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&j| j >= self.dim) {
            return Err(Error::invalid(format!(
                "keep set must be strictly increasing indices below {}",
                self.dim
            )));
        }
        if keep.len() == self.dim {
            return Ok(self.clone());
        }

        let parent_dim = self.dim;
        let keep: Arc<[usize]> = keep.into();
        let embed = {
            let keep = keep.clone();
            move |sub: &[f64]| {
                let mut full = vec![0.0; parent_dim];
                for (&j, &v) in keep.iter().zip(sub) {
                    full[j] = v;
                }
                full
            }
        };

        let gamma = {
            let g = self.gamma.clone();
            let embed = embed.clone();
            Arc::new(move |sub: &[f64]| g(&embed(sub))) as SurfaceFn
        };
        let theta = match &self.theta {
            ThetaSource::Total(t) => {
                let t = t.clone();
                ThetaSource::Total(Arc::new(move |sub: &[f64]| t(&embed(sub))))
            }
            ThetaSource::Rays(rays) => ThetaSource::Rays(
                rays.iter()
                    .filter(|r| (0..parent_dim).all(|j| keep.contains(&j) || r.direction[j] == 0.0))
                    .map(|r| ThetaRay::new(keep.iter().map(|&j| r.direction[j]).collect(), r.value))
                    .collect(),
            ),
        };
        let names: Vec<String> = keep.iter().map(|j| (j + 1).to_string()).collect();
        Ok(MevModel {
            dim: keep.len(),
            label: format!("{}[{}]", self.label, names.join(",")),
            gamma,
            theta,
        })
    }

    /// The same attractor with `θ ≡ 1`: the model of the associated i.i.d. vector.
    pub fn associated_iid(&self) -> MevModel {
        MevModel {
            dim: self.dim,
            label: format!("{} (iid)", self.label),
            gamma: self.gamma.clone(),
            theta: ThetaSource::Total(Arc::new(|_| 1.0)),
        }
    }

    /// Shifts every θ value by `delta`, clamped to `[0, 1]`. Used to check
    /// that the verification suite notices a corrupted model.
    #[doc(hidden)]
    pub fn perturb_theta(&self, delta: f64) -> MevModel {
        let theta = match &self.theta {
            ThetaSource::Total(t) => {
                let t = t.clone();
                ThetaSource::Total(Arc::new(move |tau: &[f64]| (t(tau) + delta).clamp(0.0, 1.0)))
            }
            ThetaSource::Rays(rays) => ThetaSource::Rays(
                rays.iter()
                    .map(|r| ThetaRay::new(r.direction.clone(), (r.value + delta).clamp(0.0, 1.0)))
                    .collect(),
            ),
        };
        MevModel {
            dim: self.dim,
            label: format!("{} (theta{delta:+})", self.label),
            gamma: self.gamma.clone(),
            theta,
        }
    }

    /// Copula stability `D_G^t(y) = D_G(y^t)` with `D_G(y) = exp(−γ(−log y))`.
    pub fn check_stability(&self, t: f64, y: &[f64], tol: f64) -> Result<bool> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::invalid(format!("stability exponent must be > 0, got {t}")));
        }
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        if let Some(bad) = y.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
            return Err(Error::invalid(format!(
                "copula arguments must lie in (0, 1], got {bad}"
            )));
        }
        let copula = |y: &[f64]| -> Result<f64> {
            let tau = TauVector::new(y.iter().map(|v| -v.ln()).collect())?;
            Ok((-self.gamma(&tau)?).exp())
        };
        let lhs = copula(y)?.powf(t);
        let powered: Vec<f64> = y.iter().map(|v| v.powf(t)).collect();
        let rhs = copula(&powered)?;
        Ok((lhs - rhs).abs() <= tol)
    }

    /// Checks `γ(cτ) = cγ(τ)` and `θ(cτ) = θ(τ)` within relative `tol`.
    pub fn check_homogeneity(&self, c: f64, tau: &TauVector, tol: f64) -> Result<Homogeneity> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid(format!("scale must be > 0, got {c}")));
        }
        let scaled = tau.scaled(c);
        let gamma_order_one = close(self.gamma(&scaled)?, c * self.gamma(tau)?, tol);
        let theta_order_zero = match (self.theta(tau), self.theta(&scaled)) {
            (Ok(a), Ok(b)) => Some(close(a, b, tol)),
            (Err(e), _) | (_, Err(e)) if e.is_insufficient_data() => None,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        Ok(Homogeneity {
            gamma_order_one,
            theta_order_zero,
        })
    }
}
