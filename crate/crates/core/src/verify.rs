//! The reproduction suite behind `extremaldep verify`.
//!
//! Rows are grouped by suite: closed-form values and verdicts, structural
//! properties, Monte Carlo estimates, and simulator law checks. Model-based
//! targets are read from the built-in models, so a corrupted model
//! ([`VerifyOptions::perturb_theta`]) shows up as failing rows.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dependence::{
    block_coefficient, df_bounds, extremal_coefficient, pair_coefficient, test_independence,
    test_total_dependence, theta_bounds, Verdict, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::estimate::{
    estimate_block_probability, estimate_gamma, estimate_theta_blocks, estimate_theta_runs,
    normalized_levels, solve_level, EstimateResult,
};
use crate::mev::{close, MevModel, PartitionSpec, TauVector};
use crate::models::{iid_product_model, max_ar_model, three_dependent_model, ModelSpec};
use crate::rng::{self, Domain};
use crate::sample::SampleMatrix;
use crate::simulate::{gen_iid_associated, simulate_series, SeriesConfig};

pub const DEFAULT_SEED: u64 = 7;

/// Absolute tolerance for closed-form values.
pub const CLOSED_TOL: f64 = 1e-10;
pub const STABILITY_PAIRS: usize = 1000;
pub const STABILITY_TOL: f64 = 1e-10;
pub const HOMOGENEITY_TOL: f64 = 1e-12;
pub const THETA_GRID_POINTS: usize = 100;

pub const BLOCK_N: usize = 1000;
pub const BLOCK_REPS: usize = 10_000;
pub const RUNS_N: usize = 1_000_000;
pub const RUNS_K: usize = 2;
pub const GAMMA_VECTORS: usize = 100_000;
pub const GAMMA_N: usize = 200;
pub const JOINT_BLOCK_N: usize = 2000;
pub const JOINT_REPS: usize = 10_000;
pub const LAW_ROWS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    #[default]
    All,
    Closed,
    Props,
    MonteCarlo,
    Sim,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::Closed => "closed",
            Suite::Props => "props",
            Suite::MonteCarlo => "mc",
            Suite::Sim => "sim",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(Suite::All),
            "closed" => Ok(Suite::Closed),
            "props" => Ok(Suite::Props),
            "mc" | "monte_carlo" => Ok(Suite::MonteCarlo),
            "sim" => Ok(Suite::Sim),
            other => Err(Error::Parse(format!(
                "unknown suite `{other}` (expected all, closed, props, mc or sim)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub suite: Suite,
    /// Shift applied to every θ value of the built-in models.
    pub perturb_theta: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: DEFAULT_SEED,
            suite: Suite::All,
            perturb_theta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub id: String,
    /// Acceptance criterion (1-6) the row belongs to.
    pub criterion: u8,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub suite: Suite,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturb_theta: Option<f64>,
    pub passed: bool,
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn failed_rows(&self) -> impl Iterator<Item = &SuiteRow> {
        self.rows.iter().filter(|r| !r.passed)
    }
}

/// Built-in models, with the optional θ corruption applied.
struct Builtins {
    perturb: Option<f64>,
}

impl Builtins {
    fn adjust(&self, m: MevModel) -> MevModel {
        match self.perturb {
            Some(delta) => m.perturb_theta(delta),
            None => m,
        }
    }

    fn three(&self) -> MevModel {
        self.adjust(three_dependent_model())
    }

    fn max_ar(&self, p: usize, q: usize) -> Result<MevModel> {
        Ok(self.adjust(max_ar_model(p, q)?))
    }

    fn iid(&self, d: usize) -> Result<MevModel> {
        Ok(self.adjust(iid_product_model(d)?))
    }

    /// Every built-in shape exercised by the property rows.
    fn all(&self) -> Result<Vec<MevModel>> {
        Ok(vec![
            self.three(),
            self.max_ar(1, 1)?,
            self.max_ar(2, 1)?,
            self.max_ar(2, 3)?,
            self.iid(1)?,
            self.iid(3)?,
        ])
    }
}

/// Collects the failures of one row.
#[derive(Default)]
struct Check {
    checks: usize,
    failures: Vec<String>,
}

impl Check {
    fn ensure(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn value(&mut self, label: &str, got: Result<f64>, want: f64, tol: f64) {
        match got {
            Ok(v) => self.ensure((v - want).abs() <= tol, || {
                format!("{label} = {v}, expected {want}")
            }),
            Err(e) => self.ensure(false, || format!("{label}: {e}")),
        }
    }

    fn row(self, id: &str, criterion: u8, summary: impl FnOnce() -> String) -> SuiteRow {
        let passed = self.failures.is_empty();
        let detail = if passed {
            summary()
        } else {
            let shown: Vec<&str> = self.failures.iter().take(3).map(String::as_str).collect();
            let more = self.failures.len().saturating_sub(shown.len());
            let mut d = shown.join("; ");
            if more > 0 {
                d.push_str(&format!(" (+{more} more)"));
            }
            d
        };
        SuiteRow {
            id: id.to_string(),
            criterion,
            passed,
            detail,
        }
    }
}

fn part(text: &str) -> PartitionSpec {
    text.parse().expect("built-in partition strings are valid")
}

fn ones(d: usize) -> TauVector {
    TauVector::ones(d)
}

/// All ordered splits of `0..d` into two non-empty blocks.
fn all_partitions(d: usize) -> Vec<PartitionSpec> {
    (1..(1u32 << d) - 1)
        .filter_map(|mask| {
            let (p, q): (Vec<usize>, Vec<usize>) = (0..d).partition(|&j| mask & (1 << j) != 0);
            PartitionSpec::new(p, q).ok()
        })
        .collect()
}

/// Runs the selected rows. Errors inside a row are reported as a failed row.
pub fn run_suite(opts: &VerifyOptions) -> SuiteReport {
    let b = Builtins {
        perturb: opts.perturb_theta,
    };
    type RowFn = fn(&Builtins, u64) -> Result<SuiteRow>;
    let rows: [(Suite, &str, u8, RowFn); 15] = [
        (Suite::Closed, "closed.coefficients", 1, closed_coefficients),
        (Suite::Closed, "closed.verdicts", 2, closed_verdicts),
        (Suite::Closed, "closed.theta", 3, closed_theta),
        (Suite::MonteCarlo, "mc.blocks_x", 4, mc_blocks_x),
        (Suite::MonteCarlo, "mc.blocks_neg_x", 4, mc_blocks_neg_x),
        (Suite::MonteCarlo, "mc.runs_row_max", 4, mc_runs_row_max),
        (Suite::MonteCarlo, "mc.gamma_hat", 4, mc_gamma_hat),
        (Suite::Props, "props.stability", 5, props_stability),
        (Suite::Props, "props.homogeneity", 5, props_homogeneity),
        (Suite::Props, "props.sandwich", 5, props_sandwich),
        (
            Suite::Props,
            "props.pair_vs_independence",
            5,
            props_pair_vs_independence,
        ),
        (Suite::Props, "props.total_dependence", 5, props_total_dependence),
        (
            Suite::Sim,
            "sim.three_dependent_joint_df",
            6,
            sim_three_dependent_joint_df,
        ),
        (
            Suite::Sim,
            "sim.max_ar_block_extremes",
            6,
            sim_max_ar_block_extremes,
        ),
        (
            Suite::Sim,
            "sim.three_dependent_lag_decorrelation",
            6,
            sim_lag_decorrelation,
        ),
    ];
    let rows: Vec<SuiteRow> = rows
        .iter()
        .filter(|(suite, ..)| opts.suite.includes(*suite))
        .map(|&(_, id, criterion, f)| {
            f(&b, opts.seed).unwrap_or_else(|e| SuiteRow {
                id: id.to_string(),
                criterion,
                passed: false,
                detail: format!("error: {e}"),
            })
        })
        .collect();
    SuiteReport {
        seed: opts.seed,
        suite: opts.suite,
        perturb_theta: opts.perturb_theta,
        passed: rows.iter().all(|r| r.passed),
        rows,
    }
}

fn closed_coefficients(b: &Builtins, _seed: u64) -> Result<SuiteRow> {
    let m = b.three();
    let hat = m.associated_iid();
    let split = part("1,2|3");
    let mut c = Check::default();
    c.value("eps(Y_hat)", extremal_coefficient(&hat), 2.5, CLOSED_TOL);
    c.value("eps(Y)", extremal_coefficient(&m), 0.75, CLOSED_TOL);
    c.value(
        "eps(Y_hat^(2))",
        block_coefficient(&hat, &[0, 1]),
        2.0,
        CLOSED_TOL,
    );
    c.value("eps(Y_hat^(1))", block_coefficient(&hat, &[2]), 1.0, CLOSED_TOL);
    c.value("eps(Y^(1))", block_coefficient(&m, &[2]), 0.75, CLOSED_TOL);
    c.value("eps(Y^(2))", block_coefficient(&m, &[0, 1]), 0.75, CLOSED_TOL);
    c.value(
        "pair eps(Y^(2),Y^(1))",
        pair_coefficient(&m, &split),
        0.5,
        CLOSED_TOL,
    );
    c.value(
        "pair eps(Y_hat^(2),Y_hat^(1))",
        pair_coefficient(&hat, &split),
        5.0 / 6.0,
        CLOSED_TOL,
    );
    Ok(c.row("closed.coefficients", 1, || {
        "three_dependent coefficient table matches 5/2, 3/4, 2, 1, 3/4, 3/4, 1/2, 5/6".into()
    }))
}

fn closed_verdicts(b: &Builtins, _seed: u64) -> Result<SuiteRow> {
    let mut c = Check::default();
    let m = b.three();
    let split = part("1,2|3");
    let ind = test_independence(&m, &split, DEFAULT_TOL);
    c.ensure(ind == Verdict::No, || {
        format!("three_dependent independence verdict {ind:?}")
    });
    let total = test_total_dependence(&m, &split, DEFAULT_TOL);
    c.ensure(total.verdict == Verdict::Yes, || {
        format!("three_dependent total dependence verdict {:?}", total.verdict)
    });
    c.ensure(total.d.is_some_and(|d| (d - 0.75).abs() <= CLOSED_TOL), || {
        format!("witness d = {:?}, expected 0.75", total.d)
    });
    c.ensure(
        total
            .witness_tau
            .as_ref()
            .is_some_and(|w| w.as_slice() == [1.0, 1.0, 1.0]),
        || format!("witness tau {:?}, expected (1, 1, 1)", total.witness_tau),
    );

    for p in 1..=4 {
        for q in 1..=4 {
            let m = b.max_ar(p, q)?;
            let v = test_independence(&m, &PartitionSpec::canonical(p, q)?, DEFAULT_TOL);
            c.ensure(v == Verdict::Yes, || {
                format!("max_ar({p},{q}) independence verdict {v:?}")
            });
        }
    }

    for d in 2..=4 {
        let m = b.iid(d)?;
        for split in all_partitions(d) {
            let ind = test_independence(&m, &split, DEFAULT_TOL);
            let tot = test_total_dependence(&m, &split, DEFAULT_TOL).verdict;
            c.ensure(ind == Verdict::Yes && tot == Verdict::No, || {
                format!("iid_product({d}) {split}: independent {ind:?}, totally dependent {tot:?}")
            });
        }
    }
    let checks = c.checks;
    Ok(c.row("closed.verdicts", 2, || format!("{checks} verdicts as expected")))
}

fn closed_theta(b: &Builtins, seed: u64) -> Result<SuiteRow> {
    let mut c = Check::default();
    let m = b.three();
    let t = ones(3);
    c.value("three_dependent theta(1,1,1)", m.theta(&t), 0.3, CLOSED_TOL);
    c.value(
        "three_dependent lower theta bound at (1,1,1)",
        theta_bounds(&m, &part("1,2|3"), &t).map(|(lo, _)| lo),
        0.3,
        CLOSED_TOL,
    );

    let mut rng = rng::stream(seed, Domain::Verify, 3);
    for _ in 0..THETA_GRID_POINTS {
        let p = rng.random_range(1..=4usize);
        let q = rng.random_range(1..=4usize);
        let tau = TauVector::new((0..p + q).map(|_| rng.random_range(0.01..5.0)).collect())?;
        let a = tau.as_slice()[..p].iter().copied().fold(0.0, f64::max);
        let z = tau.as_slice()[p..].iter().copied().fold(0.0, f64::max);
        let formula = (0.5 * a + z) / (a + z);
        let m = b.max_ar(p, q)?;
        c.value(
            &format!("max_ar({p},{q}) theta{tau}"),
            m.theta(&tau),
            formula,
            CLOSED_TOL,
        );
        c.value(
            &format!("max_ar({p},{q}) upper theta bound at {tau}"),
            theta_bounds(&m, &PartitionSpec::canonical(p, q)?, &tau).map(|(_, hi)| hi),
            formula,
            CLOSED_TOL,
        );
    }
    Ok(c.row("closed.theta", 3, || {
        format!(
            "theta(1,1,1) = 3/10 = lower bound; max_ar formula = upper bound on {THETA_GRID_POINTS} points"
        )
    }))
}

fn ci_row(id: &str, criterion: u8, label: &str, est: &EstimateResult, target: f64) -> SuiteRow {
    SuiteRow {
        id: id.to_string(),
        criterion,
        passed: est.ci_contains(target),
        detail: format!(
            "{label}: estimate {:.5} (se {:.5}), 95% CI [{:.5}, {:.5}], target {target}",
            est.estimate, est.se, est.ci95[0], est.ci95[1]
        ),
    }
}

fn max_ar_block_theta(b: &Builtins, seed: u64, id: &str, column: usize) -> Result<SuiteRow> {
    let target = b.max_ar(1, 1)?.marginalize(&[column])?.theta(&ones(1))?;
    let cfg = SeriesConfig::new(ModelSpec::MaxAr { p: 1, q: 1 }, BLOCK_N, seed);
    let mut tau = vec![0.0; 2];
    tau[column] = 1.0;
    let est = estimate_theta_blocks(&cfg, &TauVector::new(tau)?, BLOCK_N, BLOCK_REPS)?;
    let label = if column == 0 {
        "block theta of X"
    } else {
        "block theta of -X"
    };
    Ok(ci_row(id, 4, label, &est, target))
}

fn mc_blocks_x(b: &Builtins, seed: u64) -> Result<SuiteRow> {
    max_ar_block_theta(b, seed, "mc.blocks_x", 0)
}

fn mc_blocks_neg_x(b: &Builtins, seed: u64) -> Result<SuiteRow> {
    max_ar_block_theta(b, seed, "mc.blocks_neg_x", 1)
}

fn mc_runs_row_max(b: &Builtins, seed: u64) -> Result<SuiteRow> {
    let target = b.three().theta(&ones(3))?;
    let spec = ModelSpec::ThreeDependent;
    let cfg = SeriesConfig::new(spec, RUNS_N, seed);
    let series = simulate_series(&cfg)?;
    let ux = SampleMatrix::from_rows(1, series.row_maxima())?;
    let margin = spec
        .row_max_margin(cfg.margin)
        .expect("three_dependent has a row-max margin");
    let level = solve_level(&margin, BLOCK_N, 1.0)?;
    let est = estimate_theta_runs(&ux, level, RUNS_K)?;
    Ok(ci_row(
        "mc.runs_row_max",
        4,
        "runs theta of row maxima (k = 2)",
        &est,
        target,
    ))
}

fn mc_gamma_hat(b: &Builtins, seed: u64) -> Result<SuiteRow> {
    let target = extremal_coefficient(&b.three().associated_iid())?;
    let spec = ModelSpec::ThreeDependent;
    let cfg = SeriesConfig::new(spec, GAMMA_VECTORS, seed);
    let sample = gen_iid_associated(&spec, GAMMA_VECTORS, &cfg)?;
    let levels = normalized_levels(&spec.component_margins(cfg.margin), GAMMA_N, &ones(3))?;
    let est = estimate_gamma(&sample, &levels)?;
    Ok(ci_row("mc.gamma_hat", 4, "gamma_hat at (1,1,1)", &est, target))
}

fn props_stability(b: &Builtins, seed: u64) -> Result<SuiteRow> {
    let mut c = Check::default();
    for (i, m) in b.all()?.iter().enumerate() {
        let mut rng = rng::stream(seed, Domain::Verify, 50 + i as u64);
        for _ in 0..STABILITY_PAIRS {
            let t = 10f64.powf(rng.random_range(-1.5..1.5));
            let y: Vec<f64> = (0..m.dim()).map(|_| 1.0 - rng.random::<f64>()).collect();
            let ok = m.check_stability(t, &y, STABILITY_TOL)?;
            c.ensure(ok, || {
                format!("{}: stability fails at t = {t}, y = {y:?}", m.label())
            });
        }
    }
    let checks = c.checks;
    Ok(c.row("props.stability", 5, || {
        format!("{checks} (t, y) pairs within {STABILITY_TOL:e}")
    }))
}

/// Random points, plus every declared θ ray for models with a partial θ.
fn probe_points<R: Rng>(m: &MevModel, rng: &mut R, count: usize) -> Result<Vec<TauVector>> {
    let d = m.dim();
    let mut points = Vec::with_capacity(count + 2 * d);
    for _ in 0..count {
        let mut v: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..5.0)).collect();
        // drop a coordinate now and then
        if d > 1 && rng.random_bool(0.25) {
            v[rng.random_range(0..d)] = 0.0;
        }
        if v.iter().all(|x| *x == 0.0) {
            v[0] = 1.0;
        }
        points.push(TauVector::new(v)?);
    }
    for mask in 1..(1u32 << d) {
        let dir: Vec<f64> = (0..d).map(|j| f64::from(mask >> j & 1)).collect();
        points.push(TauVector::new(dir)?.scaled(rng.random_range(0.1..10.0)));
    }
    Ok(points)
}

fn props_homogeneity(b: &Builtins, seed: u64) -> Result<SuiteRow> {
    let mut c = Check::default();
    let mut theta_checks = 0;
    for (i, m) in b.all()?.iter().enumerate() {
        let mut rng = rng::stream(seed, Domain::Verify, 100 + i as u64);
        for tau in probe_points(m, &mut rng, 50)? {
            for e in -3..=3 {
                let h = m.check_homogeneity(10f64.powi(e), &tau, HOMOGENEITY_TOL)?;
                c.ensure(h.gamma_order_one, || {
                    format!("{}: gamma not order 1 at {tau}, c = 1e{e}", m.label())
                });
                if let Some(ok) = h.theta_order_zero {
                    theta_checks += 1;
                    c.ensure(ok, || {
                        format!("{}: theta not order 0 at {tau}, c = 1e{e}", m.label())
                    });
                }
            }
        }
    }
    let checks = c.checks;
    Ok(c.row("props.homogeneity", 5, || {
        format!("{checks} checks ({theta_checks} on theta) within {HOMOGENEITY_TOL:e}, c in 1e-3..1e3")
    }))
}

fn props_sandwich(b: &Builtins, seed: u64) -> Result<SuiteRow> {
    let mut c = Check::default();
    let slack = 1e-12;
    for (i, m) in b.all()?.iter().enumerate() {
        let mut rng = rng::stream(seed, Domain::Verify, 150 + i as u64);
        let splits = if m.dim() > 1 {
            all_partitions(m.dim())
        } else {
            Vec::new()
        };
        for tau in probe_points(m, &mut rng, 100)? {
            let g = m.gamma(&tau)?;
            let (lo, hi) = (tau.max(), tau.sum());
            c.ensure(lo <= g * (1.0 + slack) && g <= hi * (1.0 + slack), || {
                format!("{}: gamma{tau} = {g} outside [{lo}, {hi}]", m.label())
            });
            let theta = match m.theta(&tau) {
                Ok(t) => t,
                Err(e) if e.is_insufficient_data() => continue,
                Err(e) => return Err(e),
            };
            c.ensure((0.0..=1.0).contains(&theta), || {
                format!("{}: theta{tau} = {theta}", m.label())
            });
            let h = m.limit_df(&tau)?;
            for split in &splits {
                let (t_lo, t_hi) = match theta_bounds(m, split, &tau) {
                    Ok(v) => v,
                    Err(e) if e.is_insufficient_data() => continue,
                    Err(e) => return Err(e),
                };
                c.ensure(t_lo <= theta + slack && theta <= t_hi + slack, || {
                    format!(
                        "{}: theta{tau} = {theta} outside [{t_lo}, {t_hi}] for {split}",
                        m.label()
                    )
                });
                let (d_lo, d_hi) = df_bounds(m, split, &tau)?;
                c.ensure(d_lo <= h + slack && h <= d_hi + slack, || {
                    format!(
                        "{}: limit df{tau} = {h} outside [{d_lo}, {d_hi}] for {split}",
                        m.label()
                    )
                });
            }
        }
    }
    let checks = c.checks;
    Ok(c.row("props.sandwich", 5, || {
        format!("{checks} gamma, theta and df bound checks")
    }))
}

fn props_pair_vs_independence(b: &Builtins, _seed: u64) -> Result<SuiteRow> {
    let mut c = Check::default();
    let mut decided = 0;
    for m in b.all()?.iter().filter(|m| m.dim() > 1) {
        for split in all_partitions(m.dim()) {
            let verdict = test_independence(m, &split, DEFAULT_TOL);
            match pair_coefficient(m, &split) {
                Ok(pair) => {
                    decided += 1;
                    let unit = close(pair, 1.0, DEFAULT_TOL);
                    c.ensure(unit == (verdict == Verdict::Yes), || {
                        format!("{} {split}: pair eps {pair} but verdict {verdict:?}", m.label())
                    });
                }
                Err(e) if e.is_insufficient_data() => c.ensure(verdict == Verdict::Undetermined, || {
                    format!("{} {split}: pair eps unknown but verdict {verdict:?}", m.label())
                }),
                Err(e) => return Err(e),
            }
        }
    }
    let checks = c.checks;
    Ok(c.row("props.pair_vs_independence", 5, || {
        format!("{checks} model/partition pairs ({decided} decided) agree")
    }))
}

fn props_total_dependence(b: &Builtins, _seed: u64) -> Result<SuiteRow> {
    let mut c = Check::default();
    let three = b.three();
    let premise = test_total_dependence(&three, &part("1,2|3"), DEFAULT_TOL).verdict;
    c.ensure(premise == Verdict::Yes, || {
        format!("three_dependent 1,2|3 is not totally dependent ({premise:?})")
    });
    let (mut found, mut unknown) = (0, 0);
    for m in b.all()?.iter().filter(|m| m.dim() > 1) {
        for split in all_partitions(m.dim()) {
            if test_total_dependence(m, &split, DEFAULT_TOL).verdict != Verdict::Yes {
                continue;
            }
            let coefficients = (|| -> Result<(f64, f64, f64)> {
                Ok((
                    block_coefficient(m, split.p_block())?,
                    block_coefficient(m, split.q_block())?,
                    pair_coefficient(m, &split)?,
                ))
            })();
            let (ep, eq, pair) = match coefficients {
                Ok(v) => v,
                Err(e) if e.is_insufficient_data() => {
                    unknown += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            found += 1;
            let want = ep.max(eq) / (ep + eq);
            c.ensure(close(pair, want, DEFAULT_TOL), || {
                format!(
                    "{} {split}: pair eps {pair}, expected max/sum = {want}",
                    m.label()
                )
            });
        }
    }
    Ok(c.row("props.total_dependence", 5, || {
        format!("{found} totally dependent splits with pair eps = max/sum ({unknown} with unknown block eps)")
    }))
}

/// `|p̂ − p| ≤ 3σ` with the binomial σ of the target.
fn binomial_ok(hits: usize, total: usize, p: f64) -> (bool, f64, f64) {
    let p_hat = hits as f64 / total as f64;
    let sigma = (p * (1.0 - p) / total as f64).sqrt();
    ((p_hat - p).abs() <= 3.0 * sigma, p_hat, sigma)
}

fn sim_three_dependent_joint_df(_b: &Builtins, seed: u64) -> Result<SuiteRow> {
    let spec = ModelSpec::ThreeDependent;
    // rows four apart share no noise, so the thinned rows are i.i.d.
    let cfg = SeriesConfig::new(spec, 4 * LAW_ROWS, seed);
    let rows = simulate_series(&cfg)?.thinned(4);
    let mut c = Check::default();
    let mut notes = Vec::new();
    for probe in [[0.9, 0.9, 0.9], [0.9, 0.8, 0.95], [0.7, 0.95, 0.85]] {
        let x: Vec<f64> = probe.iter().map(|&h| cfg.margin.quantile(h)).collect();
        let target = spec.joint_cdf(cfg.margin, &x)?;
        let hits = rows
            .rows()
            .filter(|r| r.iter().zip(&x).all(|(v, u)| v <= u))
            .count();
        let (ok, p_hat, sigma) = binomial_ok(hits, rows.nrows(), target);
        notes.push(format!("H={probe:?}: {p_hat:.5} vs T = {target:.5}"));
        c.ensure(ok, || {
            format!(
                "at H = {probe:?}: empirical {p_hat} vs T = {target} (3 sigma = {})",
                3.0 * sigma
            )
        });
    }
    Ok(c.row("sim.three_dependent_joint_df", 6, || notes.join("; ")))
}

fn sim_max_ar_block_extremes(b: &Builtins, seed: u64) -> Result<SuiteRow> {
    let tau = TauVector::new(vec![1.0, 1.0])?;
    let target = b.max_ar(1, 1)?.limit_df(&tau)?;
    let cfg = SeriesConfig::new(ModelSpec::MaxAr { p: 1, q: 1 }, JOINT_BLOCK_N, seed);
    let est = estimate_block_probability(&cfg, &tau, JOINT_BLOCK_N, JOINT_REPS)?;
    let hits = (est.estimate * JOINT_REPS as f64).round() as usize;
    let (ok, p_hat, sigma) = binomial_ok(hits, JOINT_REPS, target);
    Ok(SuiteRow {
        id: "sim.max_ar_block_extremes".into(),
        criterion: 6,
        passed: ok,
        detail: format!(
            "P(max X <= u_n, max -X <= v_n) at n = {JOINT_BLOCK_N}: {p_hat:.5} vs limit {target:.5} (3 sigma = {:.5})",
            3.0 * sigma
        ),
    })
}

/// Sample autocorrelation of `x` at lags `1..=max_lag`.
fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (1..=max_lag)
        .map(|h| {
            let cov = x
                .iter()
                .zip(&x[h..])
                .map(|(a, b)| (a - mean) * (b - mean))
                .sum::<f64>()
                / n;
            cov / var
        })
        .collect()
}

fn sim_lag_decorrelation(_b: &Builtins, seed: u64) -> Result<SuiteRow> {
    let spec = ModelSpec::ThreeDependent;
    let cfg = SeriesConfig::new(spec, LAW_ROWS, seed);
    let ux = simulate_series(&cfg)?.row_maxima();
    let margin = spec
        .row_max_margin(cfg.margin)
        .expect("three_dependent has a row-max margin");
    // exceedance probability 1/10
    let level = solve_level(&margin, 10, 1.0)?;
    let ind: Vec<f64> = ux.iter().map(|&v| f64::from(u8::from(v > level))).collect();
    let rho = autocorrelation(&ind, 6);
    // Bartlett variance for lags beyond the dependence range
    let var = (1.0 + 2.0 * rho[..3].iter().map(|r| r * r).sum::<f64>()) / ind.len() as f64;
    let bound = 3.0 * var.sqrt();
    let mut c = Check::default();
    for (h, r) in rho.iter().enumerate().skip(3) {
        c.ensure(r.abs() <= bound, || {
            format!("lag {}: rho = {r:.5} exceeds 3 sigma = {bound:.5}", h + 1)
        });
    }
    c.ensure(rho[0] > bound, || {
        format!("lag 1: rho = {:.5} shows no dependence", rho[0])
    });
    Ok(c.row("sim.three_dependent_lag_decorrelation", 6, || {
        let shown: Vec<String> = rho.iter().map(|r| format!("{r:.4}")).collect();
        format!(
            "exceedance autocorrelation lags 1-6: [{}], 3 sigma = {bound:.4}",
            shown.join(", ")
        )
    }))
}
