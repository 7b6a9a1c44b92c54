//! Normalized levels and Monte Carlo estimators of `γ` and `θ`.
//!
//! All standard errors are binomial / delta-method, with 95% normal
//! intervals. Replications are keyed by `(seed, index)`, so parallel and
//! serial runs give identical results.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::margins::MarginalCdf;
use crate::mev::TauVector;
use crate::rng::{self, Domain};
use crate::sample::SampleMatrix;
use crate::simulate::{fill_iid, fill_series, SeriesConfig};

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Relative tolerance of the bisection level solver.
pub const LEVEL_RTOL: f64 = 1e-12;

/// Slack allowed for rounding when checking that a df is monotone.
const MONOTONE_SLACK: f64 = 1e-12;

/// Number of contiguous batches behind the runs estimator's standard error.
const RUNS_BATCHES: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub estimate: f64,
    pub se: f64,
    pub ci95: [f64; 2],
    pub reps: usize,
    pub block_n: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, Value>,
}

impl EstimateResult {
    pub fn new(estimate: f64, se: f64, reps: usize, block_n: Option<usize>) -> Self {
        EstimateResult {
            estimate,
            se,
            ci95: [estimate - Z95 * se, estimate + Z95 * se],
            reps,
            block_n,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn ci_contains(&self, value: f64) -> bool {
        self.ci95[0] <= value && value <= self.ci95[1]
    }
}

/// Per-component levels `u_{n,j}` with `n(1 − F_j(u_{n,j})) = τ_j`.
/// A dropped coordinate (`τ_j = 0`) gets level `+∞`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSet {
    pub levels: Vec<f64>,
    pub n: usize,
    pub tau: TauVector,
}

/// Solves `n(1 − F(u)) = τ` for `u`: closed form when the margin has one,
/// bisection otherwise.
pub fn solve_level(margin: &dyn MarginalCdf, n: usize, tau: f64) -> Result<f64> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::invalid(format!("tau must be finite and >= 0, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(f64::INFINITY);
    }
    if tau >= n as f64 {
        return Err(Error::invalid(format!(
            "tau = {tau} must be below the block size {n}"
        )));
    }
    let target = tau / n as f64;
    match margin.inverse_survival(target) {
        Some(u) if u.is_finite() => Ok(u),
        _ => bisect_survival(margin, target),
    }
}

/// Finds `x` with `survival(x) = target` by bracketing and bisection,
/// failing if the df is seen to decrease anywhere along the way.
pub fn bisect_survival(margin: &dyn MarginalCdf, target: f64) -> Result<f64> {
    let survival = |x: f64| -> Result<f64> {
        let s = margin.survival(x);
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::NonMonotoneCdf(format!(
                "df at {x} is {} (outside [0, 1])",
                1.0 - s
            )));
        }
        Ok(s)
    };
    let non_monotone =
        |a: f64, b: f64| Error::NonMonotoneCdf(format!("df decreases between {} and {}", a.min(b), a.max(b)));

    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let (mut s_lo, mut s_hi) = (survival(lo)?, survival(hi)?);
    if s_lo + MONOTONE_SLACK < s_hi {
        return Err(non_monotone(lo, hi));
    }
    let mut steps = 0;
    while s_hi > target {
        let next = hi * 2.0;
        let s_next = survival(next)?;
        if s_next > s_hi + MONOTONE_SLACK {
            return Err(non_monotone(hi, next));
        }
        (hi, s_hi) = (next, s_next);
        steps += 1;
        if steps > 1100 {
            return Err(Error::Calibration(format!(
                "no upper bracket for survival {target}"
            )));
        }
    }
    while s_lo < target {
        let next = lo * 2.0;
        let s_next = survival(next)?;
        if s_next + MONOTONE_SLACK < s_lo {
            return Err(non_monotone(next, lo));
        }
        (lo, s_lo) = (next, s_next);
        steps += 1;
        if steps > 2200 {
            return Err(Error::Calibration(format!(
                "no lower bracket for survival {target}"
            )));
        }
    }

    for _ in 0..2200 {
        if hi - lo <= LEVEL_RTOL * lo.abs().max(hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s_mid = survival(mid)?;
        if s_mid > s_lo + MONOTONE_SLACK || s_mid + MONOTONE_SLACK < s_hi {
            return Err(non_monotone(lo, hi));
        }
        if s_mid > target {
            (lo, s_lo) = (mid, s_mid);
        } else {
            (hi, s_hi) = (mid, s_mid);
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn normalized_levels<M: MarginalCdf>(margins: &[M], n: usize, tau: &TauVector) -> Result<LevelSet> {
    if margins.len() != tau.dim() {
        return Err(Error::DimensionMismatch {
            expected: margins.len(),
            got: tau.dim(),
        });
    }
    if n == 0 {
        return Err(Error::invalid("block size must be >= 1"));
    }
    let levels = margins
        .iter()
        .zip(tau.as_slice())
        .map(|(m, &t)| solve_level(m, n, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelSet {
        levels,
        n,
        tau: tau.clone(),
    })
}

fn exceeds(row: &[f64], levels: &[f64]) -> bool {
    row.iter().zip(levels).any(|(x, u)| x > u)
}

/// `γ̂ = n · (fraction of vectors not ≤ u_n)` from an i.i.d. sample.
pub fn estimate_gamma(sample: &SampleMatrix, levels: &LevelSet) -> Result<EstimateResult> {
    if sample.ncols() != levels.levels.len() {
        return Err(Error::DimensionMismatch {
            expected: levels.levels.len(),
            got: sample.ncols(),
        });
    }
    let total = sample.nrows();
    if total == 0 {
        return Err(Error::invalid("gamma estimate needs a non-empty sample"));
    }
    let hits = sample.rows().filter(|r| exceeds(r, &levels.levels)).count();
    let p = hits as f64 / total as f64;
    let n = levels.n as f64;
    Ok(EstimateResult::new(
        n * p,
        n * (p * (1.0 - p) / total as f64).sqrt(),
        total,
        Some(levels.n),
    )
    .with_meta("exceedances", hits))
}

/// How the i.i.d. block probability `P(M̂_n ≤ u_n)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Denominator {
    /// `Q(u_n)^n` from the closed-form joint df.
    #[default]
    Exact,
    /// Simulated i.i.d. blocks, `reps` of them.
    Simulated,
}

/// Counts replications whose block maximum stays below `levels`.
fn count_quiet_blocks<F>(
    seed: u64,
    domain: Domain,
    reps: usize,
    width: usize,
    levels: &[f64],
    fill: F,
) -> usize
where
    F: Fn(&mut ChaCha8Rng, &mut Vec<f64>) + Sync,
{
    (0..reps as u64)
        .into_par_iter()
        .map_init(Vec::new, |buf, r| {
            buf.clear();
            let mut rng = rng::stream(seed, domain, r);
            fill(&mut rng, buf);
            usize::from(!buf.chunks_exact(width).any(|row| exceeds(row, levels)))
        })
        .sum()
}

fn check_probability(p: f64, what: &str, block_n: usize) -> Result<()> {
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::Calibration(format!(
            "{what} = {p}; levels are too extreme or too lax for block size {block_n}"
        )));
    }
    Ok(())
}

/// Checks a block experiment and returns its levels.
fn block_levels(cfg: &SeriesConfig, tau: &TauVector, block_n: usize) -> Result<LevelSet> {
    let spec = cfg.model;
    spec.validate()?;
    if tau.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: tau.dim(),
        });
    }
    if tau.is_zero() {
        return Err(Error::invalid("tau needs a positive entry"));
    }
    normalized_levels(&spec.component_margins(cfg.margin), block_n, tau)
}

fn quiet_dependent_blocks(cfg: &SeriesConfig, levels: &LevelSet, reps: usize) -> usize {
    let spec = cfg.model;
    count_quiet_blocks(
        cfg.seed,
        Domain::DependentBlock,
        reps,
        spec.dim(),
        &levels.levels,
        |rng, buf| fill_series(&spec, cfg.margin, levels.n, rng, buf),
    )
}

/// `P(M_n ≤ u_n)` for the stationary sequence of `cfg.model`, estimated from
/// `reps` independent blocks of length `block_n` (binomial standard error).
/// `cfg.n` is not consulted.
pub fn estimate_block_probability(
    cfg: &SeriesConfig,
    tau: &TauVector,
    block_n: usize,
    reps: usize,
) -> Result<EstimateResult> {
    if reps == 0 {
        return Err(Error::invalid("need at least one replication"));
    }
    let levels = block_levels(cfg, tau, block_n)?;
    let hits = quiet_dependent_blocks(cfg, &levels, reps);
    let p = hits as f64 / reps as f64;
    Ok(EstimateResult::new(
        p,
        (p * (1.0 - p) / reps as f64).sqrt(),
        reps,
        Some(block_n),
    ))
}

/// Block estimator `θ̂ = log P̂(M_n ≤ u_n) / log P(M̂_n ≤ u_n)` with the
/// denominator taken from the closed-form joint df. `cfg.n` is not consulted.
pub fn estimate_theta_blocks(
    cfg: &SeriesConfig,
    tau: &TauVector,
    block_n: usize,
    reps: usize,
) -> Result<EstimateResult> {
    estimate_theta_blocks_with(cfg, tau, block_n, reps, Denominator::Exact)
}

pub fn estimate_theta_blocks_with(
    cfg: &SeriesConfig,
    tau: &TauVector,
    block_n: usize,
    reps: usize,
    denominator: Denominator,
) -> Result<EstimateResult> {
    if reps < 100 {
        return Err(Error::invalid(format!(
            "need at least 100 replications, got {reps}"
        )));
    }
    let levels = block_levels(cfg, tau, block_n)?;
    let spec = cfg.model;

    let p_dep = quiet_dependent_blocks(cfg, &levels, reps) as f64 / reps as f64;
    check_probability(p_dep, "P(M_n <= u_n)", block_n)?;

    let (log_iid, var_log_iid) = match denominator {
        Denominator::Exact => {
            let q = spec.joint_cdf(cfg.margin, &levels.levels)?;
            check_probability(q, "Q(u_n)", block_n)?;
            (block_n as f64 * q.ln(), 0.0)
        }
        Denominator::Simulated => {
            let hits = count_quiet_blocks(
                cfg.seed,
                Domain::IidBlock,
                reps,
                spec.dim(),
                &levels.levels,
                |rng, buf| fill_iid(&spec, cfg.margin, block_n, rng, buf),
            );
            let p = hits as f64 / reps as f64;
            check_probability(p, "P(iid M_n <= u_n)", block_n)?;
            (p.ln(), (1.0 - p) / (reps as f64 * p))
        }
    };

    let theta = p_dep.ln() / log_iid;
    let var_log_dep = (1.0 - p_dep) / (reps as f64 * p_dep);
    let se = ((var_log_dep + theta * theta * var_log_iid) / (log_iid * log_iid)).sqrt();
    Ok(EstimateResult::new(theta, se, reps, Some(block_n))
        .with_meta("p_dep", p_dep)
        .with_meta("log_p_iid", log_iid)
        .with_meta(
            "denominator",
            match denominator {
                Denominator::Exact => "exact",
                Denominator::Simulated => "simulated",
            },
        ))
}

/// Runs estimator: the share of exceedances of `level` followed by `k`
/// non-exceedances, `#{W_t > v ≥ max(W_{t+1..t+k})} / #{W_t > v}`.
///
/// The standard error is the delta-method variance of a ratio over
/// contiguous batches, which absorbs within-cluster dependence.
pub fn estimate_theta_runs(series: &SampleMatrix, level: f64, k: usize) -> Result<EstimateResult> {
    if series.ncols() != 1 {
        return Err(Error::invalid(format!(
            "runs estimator needs a univariate series, got {} columns",
            series.ncols()
        )));
    }
    theta_runs(series.values(), level, k)
}

fn theta_runs(series: &[f64], level: f64, k: usize) -> Result<EstimateResult> {
    if k == 0 {
        return Err(Error::invalid("runs estimator needs k >= 1"));
    }
    if series.len() <= k {
        return Err(Error::invalid(format!(
            "series of length {} is too short for k = {k}",
            series.len()
        )));
    }
    if series.iter().any(|v| !v.is_finite()) || !level.is_finite() {
        return Err(Error::invalid("series and level must be finite"));
    }
    let (min, max) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if level < min || level >= max {
        return Err(Error::invalid(format!(
            "level {level} is outside the sample range [{min}, {max})"
        )));
    }

    let positions = series.len() - k;
    let batches = RUNS_BATCHES.min(positions);
    let mut ends = vec![0u64; batches];
    let mut exceed = vec![0u64; batches];
    for t in 0..positions {
        if series[t] > level {
            let b = t * batches / positions;
            exceed[b] += 1;
            if series[t + 1..=t + k].iter().all(|&w| w <= level) {
                ends[b] += 1;
            }
        }
    }
    let total: u64 = exceed.iter().sum();
    if total == 0 {
        return Err(Error::Calibration(format!(
            "no exceedances of level {level} with lookahead k = {k}"
        )));
    }
    let clusters: u64 = ends.iter().sum();
    let theta = clusters as f64 / total as f64;
    let se = if batches >= 2 {
        let ss: f64 = ends
            .iter()
            .zip(&exceed)
            .map(|(&a, &c)| (a as f64 - theta * c as f64).powi(2))
            .sum();
        (ss * batches as f64 / (batches as f64 - 1.0)).sqrt() / total as f64
    } else {
        (theta * (1.0 - theta) / total as f64).sqrt()
    };
    Ok(EstimateResult::new(theta, se, batches, None)
        .with_meta("exceedances", total)
        .with_meta("clusters", clusters)
        .with_meta("k", k)
        .with_meta("level", level))
}
