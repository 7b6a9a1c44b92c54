//! Extremal and pair dependence coefficients, bounds on `θ` and on the
//! limit df, and the independence / total dependence decisions for two
//! sub-vectors `Y^(p)`, `Y^(q)` of the limit vector `Y`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mev::{close, MevModel, PartitionSpec, TauVector};

/// Default relative tolerance for verdicts on closed-form models.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Undetermined,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

fn check_partition(model: &MevModel, part: &PartitionSpec) -> Result<()> {
    if part.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: part.dim(),
        });
    }
    Ok(())
}

/// `ε^Y = θ(1)γ(1)`, so that `G^{θ(1)}(x, …, x) = F^{ε^Y}(x)`.
pub fn extremal_coefficient(model: &MevModel) -> Result<f64> {
    model.limit_exponent(&TauVector::ones(model.dim()))
}

/// `ε` of the sub-vector on `block`, via the marginal model.
pub fn block_coefficient(model: &MevModel, block: &[usize]) -> Result<f64> {
    extremal_coefficient(&model.marginalize(block)?)
}

/// `ε^{(Y^(p), Y^(q))} = ε^Y / (ε^{Y^(p)} + ε^{Y^(q)})`.
pub fn pair_coefficient(model: &MevModel, part: &PartitionSpec) -> Result<f64> {
    check_partition(model, part)?;
    let full = extremal_coefficient(model)?;
    let ep = block_coefficient(model, part.p_block())?;
    let eq = block_coefficient(model, part.q_block())?;
    Ok(full / (ep + eq))
}

/// `(Π_blocks H, min_blocks H)`, which sandwich the limit df `H(τ)`.
pub fn df_bounds(model: &MevModel, part: &PartitionSpec, tau: &TauVector) -> Result<(f64, f64)> {
    check_partition(model, part)?;
    let (a, b) = block_exponents(model, part, tau)?;
    let (hp, hq) = ((-a).exp(), (-b).exp());
    Ok((hp * hq, hp.min(hq)))
}

/// Bounds on `θ(τ)` obtained by dividing the block exponents by `γ(τ)`:
/// `max{θγ_p, θγ_q}/γ ≤ θ ≤ (θγ_p + θγ_q)/γ`.
pub fn theta_bounds(model: &MevModel, part: &PartitionSpec, tau: &TauVector) -> Result<(f64, f64)> {
    check_partition(model, part)?;
    let gamma = model.gamma(tau)?;
    if gamma == 0.0 {
        return Err(Error::invalid("theta bounds need a tau with a positive entry"));
    }
    let (a, b) = block_exponents(model, part, tau)?;
    Ok((a.max(b) / gamma, (a + b) / gamma))
}

/// `θγ` on each block restriction of `τ` (zero when the restriction vanishes).
fn block_exponents(model: &MevModel, part: &PartitionSpec, tau: &TauVector) -> Result<(f64, f64)> {
    Ok((
        model.limit_exponent(&tau.restrict(part.p_block()))?,
        model.limit_exponent(&tau.restrict(part.q_block()))?,
    ))
}

/// `Y^(p)` and `Y^(q)` are independent iff
/// `θ(1)γ(1) = θ(1_p)γ(1_p) + θ(1_q)γ(1_q)`.
pub fn test_independence(model: &MevModel, part: &PartitionSpec, tol: f64) -> Verdict {
    if check_partition(model, part).is_err() {
        return Verdict::Undetermined;
    }
    let values = (|| -> Result<(f64, f64, f64)> {
        Ok((
            extremal_coefficient(model)?,
            block_coefficient(model, part.p_block())?,
            block_coefficient(model, part.q_block())?,
        ))
    })();
    match values {
        Ok((full, ep, eq)) => Verdict::from_bool(close(full, ep + eq, tol)),
        Err(_) => Verdict::Undetermined,
    }
}

/// Outcome of [`test_total_dependence`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TotalDependence {
    pub verdict: Verdict,
    /// Candidate point, scaled so its largest entry is 1.
    pub witness_tau: Option<TauVector>,
    /// Common value `θ_jτ_j` at the witness.
    pub d: Option<f64>,
    /// Whether both block exponents equal `d` at the witness.
    pub block_condition: Option<bool>,
    /// Whether `θ(τ) = 1/γ(τ/d)` at the witness.
    pub theta_consistent: Option<bool>,
}

impl TotalDependence {
    fn undetermined(witness_tau: Option<TauVector>, d: Option<f64>) -> Self {
        TotalDependence {
            verdict: Verdict::Undetermined,
            witness_tau,
            d,
            block_condition: None,
            theta_consistent: None,
        }
    }
}

/// Looks for `τ` with `γ(τ)θ(τ) = θ_1τ_1 = … = θ_dτ_d = d > 0`.
///
/// Both sides scale linearly along rays, so the single candidate
/// `τ_j ∝ 1/θ_j` decides the question.
pub fn test_total_dependence(model: &MevModel, part: &PartitionSpec, tol: f64) -> TotalDependence {
    if check_partition(model, part).is_err() {
        return TotalDependence::undetermined(None, None);
    }
    let dim = model.dim();
    let mut axis = Vec::with_capacity(dim);
    for j in 0..dim {
        match model.theta(&TauVector::unit_on(dim, &[j])) {
            Ok(t) if t > 0.0 => axis.push(t),
            _ => return TotalDependence::undetermined(None, None),
        }
    }
    let raw: Vec<f64> = axis.iter().map(|t| 1.0 / t).collect();
    let top = raw.iter().copied().fold(0.0, f64::max);
    let witness = TauVector::new(raw.iter().map(|v| v / top).collect())
        .expect("candidate entries are positive and finite");
    let d = 1.0 / top;

    let full = match model.limit_exponent(&witness) {
        Ok(v) => v,
        Err(_) => return TotalDependence::undetermined(Some(witness), Some(d)),
    };
    let block_condition = block_exponents(model, part, &witness)
        .ok()
        .map(|(a, b)| close(a, d, tol) && close(b, d, tol));
    let theta_consistent = match (model.theta(&witness), model.gamma(&witness.scaled(1.0 / d))) {
        (Ok(theta), Ok(g)) => Some(close(theta, 1.0 / g, tol)),
        _ => None,
    };
    let holds = close(full, d, tol) && block_condition != Some(false);
    TotalDependence {
        verdict: Verdict::from_bool(holds),
        witness_tau: Some(witness),
        d: Some(d),
        block_condition,
        theta_consistent,
    }
}

/// Everything `extremaldep report` prints for one model and partition.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientReport {
    pub model: String,
    pub partition: PartitionSpec,
    pub tau: TauVector,
    pub tol: f64,
    #[serde(rename = "epsilon_Y")]
    pub epsilon_y: Option<f64>,
    pub epsilon_p: Option<f64>,
    pub epsilon_q: Option<f64>,
    pub pair_epsilon: Option<f64>,
    /// The same coefficients for the associated i.i.d. vector (`θ ≡ 1`).
    #[serde(rename = "epsilon_Y_hat")]
    pub epsilon_y_hat: f64,
    pub epsilon_p_hat: f64,
    pub epsilon_q_hat: f64,
    pub pair_epsilon_hat: f64,
    pub theta: Option<f64>,
    pub theta_lower: Option<f64>,
    pub theta_upper: Option<f64>,
    pub limit_df: Option<f64>,
    pub df_lower: Option<f64>,
    pub df_upper: Option<f64>,
    pub verdict_independent: Verdict,
    pub verdict_total_dep: Verdict,
    pub witness_tau: Option<TauVector>,
    pub witness_d: Option<f64>,
}

impl CoefficientReport {
    pub fn is_fully_determined(&self) -> bool {
        self.verdict_independent != Verdict::Undetermined
            && self.verdict_total_dep != Verdict::Undetermined
            && self.pair_epsilon.is_some()
            && self.theta_lower.is_some()
    }
}

/// `Ok(None)` for missing θ data, other errors pass through.
fn known<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_insufficient_data() => Ok(None),
        Err(e) => Err(e),
    }
}

/// Builds the full report. Missing θ data shows up as `None` fields and
/// undetermined verdicts; only malformed input is an error.
pub fn coefficient_report(
    model: &MevModel,
    part: &PartitionSpec,
    tau: &TauVector,
    tol: f64,
) -> Result<CoefficientReport> {
    check_partition(model, part)?;
    if tau.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: tau.dim(),
        });
    }
    if tau.is_zero() {
        return Err(Error::invalid("reference tau needs a positive entry"));
    }
    let iid = model.associated_iid();
    let total = test_total_dependence(model, part, tol);
    let theta_bounds = known(theta_bounds(model, part, tau))?;
    let df_bounds = known(df_bounds(model, part, tau))?;

    Ok(CoefficientReport {
        model: model.label().to_string(),
        partition: part.clone(),
        tau: tau.clone(),
        tol,
        epsilon_y: known(extremal_coefficient(model))?,
        epsilon_p: known(block_coefficient(model, part.p_block()))?,
        epsilon_q: known(block_coefficient(model, part.q_block()))?,
        pair_epsilon: known(pair_coefficient(model, part))?,
        epsilon_y_hat: extremal_coefficient(&iid)?,
        epsilon_p_hat: block_coefficient(&iid, part.p_block())?,
        epsilon_q_hat: block_coefficient(&iid, part.q_block())?,
        pair_epsilon_hat: pair_coefficient(&iid, part)?,
        theta: known(model.theta(tau))?,
        theta_lower: theta_bounds.map(|b| b.0),
        theta_upper: theta_bounds.map(|b| b.1),
        limit_df: known(model.limit_df(tau))?,
        df_lower: df_bounds.map(|b| b.0),
        df_upper: df_bounds.map(|b| b.1),
        verdict_independent: test_independence(model, part, tol),
        verdict_total_dep: total.verdict,
        witness_tau: total.witness_tau,
        witness_d: total.d,
    })
}
