use std::process::ExitCode;
use std::time::Instant;

use extremaldep::dependence::coefficient_report;
use extremaldep::estimate::{
    estimate_gamma, estimate_theta_blocks_with, estimate_theta_runs, normalized_levels, solve_level,
};
use extremaldep::simulate::{gen_iid_associated, simulate_series};
use extremaldep::verify::{run_suite, VerifyOptions};
use extremaldep::{Marginal, ModelSpec, SampleMatrix, SeriesConfig, TauVector};
use serde_json::json;

use crate::args::{BlocksArgs, GammaArgs, ReportArgs, RunsArgs, SimulateArgs, VerifyArgs};
use crate::error::{CliError, EXIT_SUITE_FAILED, EXIT_UNDETERMINED};
use crate::output::{emit_json, sidecar_path, Output, RunManifest};

type CmdResult = Result<ExitCode, CliError>;

fn read_csv(path: &std::path::Path) -> Result<SampleMatrix, CliError> {
    SampleMatrix::read_csv_path(path).map_err(|e| match e {
        extremaldep::Error::Io(source) => CliError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other.into(),
    })
}

pub fn report(args: &ReportArgs) -> CmdResult {
    let started = Instant::now();
    let spec = args.model.require()?;
    let model = spec.build()?;
    let partition = match &args.partition {
        Some(p) => p.clone(),
        None => spec
            .canonical_partition()
            .ok_or_else(|| CliError::Usage(format!("{spec} has no default split; pass --partition")))?,
    };
    let tau = args.tau.clone().unwrap_or_else(|| TauVector::ones(spec.dim()));
    let report = coefficient_report(&model, &partition, &tau, args.tol)?;
    let manifest = RunManifest::new("report", args, None, started)?;
    emit_json(
        args.out.as_deref(),
        &Output {
            body: &report,
            manifest,
        },
    )?;
    if report.is_fully_determined() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("report: some quantities are undetermined for {spec}");
        Ok(ExitCode::from(EXIT_UNDETERMINED))
    }
}

pub fn simulate(args: &SimulateArgs) -> CmdResult {
    let started = Instant::now();
    let spec = args.model.require()?;
    let cfg = SeriesConfig::new(spec, args.n, args.seed).with_margin(args.margin);
    let series = simulate_series(&cfg)?;
    match &args.out {
        Some(path) => {
            series.write_csv_path(path).map_err(|e| match e {
                extremaldep::Error::Io(source) => CliError::Io {
                    path: path.clone(),
                    source,
                },
                other => other.into(),
            })?;
            let manifest = RunManifest::new("simulate", args, Some(args.seed), started)?;
            emit_json(Some(&sidecar_path(path)), &manifest)?;
        }
        None => series.write_csv(std::io::stdout().lock())?,
    }
    Ok(ExitCode::SUCCESS)
}

pub fn blocks(args: &BlocksArgs) -> CmdResult {
    let started = Instant::now();
    let spec = args.model.require()?;
    let tau = args.tau.clone().unwrap_or_else(|| TauVector::ones(spec.dim()));
    let cfg = SeriesConfig::new(spec, args.block_n, args.seed).with_margin(args.margin);
    let result = estimate_theta_blocks_with(&cfg, &tau, args.block_n, args.reps, args.denominator.into())?
        .with_meta("model", spec.to_string())
        .with_meta("tau", tau.to_string());
    let manifest = RunManifest::new("estimate blocks", args, Some(args.seed), started)?;
    emit_json(
        args.out.as_deref(),
        &Output {
            body: &result,
            manifest,
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

/// The df of the series the runs estimator sees, when the model determines it.
fn runs_margin(spec: &ModelSpec, args: &RunsArgs) -> Result<Marginal, CliError> {
    let margins = spec.component_margins(args.margin);
    match args.column {
        Some(c) => Ok(margins[c - 1].clone()),
        None if margins.len() == 1 => Ok(margins[0].clone()),
        None => spec.row_max_margin(args.margin).ok_or_else(|| {
            CliError::Usage(format!(
                "{spec} has no closed-form row-maximum df; pass --column or --level"
            ))
        }),
    }
}

pub fn runs(args: &RunsArgs) -> CmdResult {
    let started = Instant::now();
    let spec = args.model.spec()?;
    let data = match (&args.input, spec) {
        (Some(path), _) => read_csv(path)?,
        (None, Some(spec)) => {
            simulate_series(&SeriesConfig::new(spec, args.n, args.seed).with_margin(args.margin))?
        }
        (None, None) => return Err(CliError::Usage("pass --input or --model".into())),
    };
    if let Some(spec) = spec {
        if data.ncols() != spec.dim() {
            return Err(extremaldep::Error::DimensionMismatch {
                expected: spec.dim(),
                got: data.ncols(),
            }
            .into());
        }
    }
    let (values, series_name) = match args.column {
        Some(c) if c == 0 || c > data.ncols() => {
            return Err(CliError::Usage(format!(
                "--column must be in 1..={}",
                data.ncols()
            )))
        }
        Some(c) => (data.column(c - 1), format!("column {c}")),
        None => (data.row_maxima(), "row_max".to_string()),
    };
    let series = SampleMatrix::from_rows(1, values)?;

    let (level, level_source) = match (args.level, spec) {
        (Some(level), _) => (level, "explicit"),
        (None, Some(spec)) => (
            solve_level(&runs_margin(&spec, args)?, args.block_n, args.tau)?,
            "normalized",
        ),
        (None, None) => {
            return Err(CliError::Usage(
                "pass --level or --model to normalize the level".into(),
            ))
        }
    };
    let mut result = estimate_theta_runs(&series, level, args.k)?
        .with_meta("series", series_name)
        .with_meta("level_source", level_source);
    if level_source == "normalized" {
        result = result
            .with_meta("level_tau", args.tau)
            .with_meta("level_block_n", args.block_n);
    }
    let seed = args.input.is_none().then_some(args.seed);
    let manifest = RunManifest::new("estimate runs", args, seed, started)?;
    emit_json(
        args.out.as_deref(),
        &Output {
            body: &result,
            manifest,
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

pub fn gamma(args: &GammaArgs) -> CmdResult {
    let started = Instant::now();
    let spec = args.model.require()?;
    let sample = match &args.input {
        Some(path) => read_csv(path)?,
        None => gen_iid_associated(
            &spec,
            args.n,
            &SeriesConfig::new(spec, 1, args.seed).with_margin(args.margin),
        )?,
    };
    let tau = args.tau.clone().unwrap_or_else(|| TauVector::ones(spec.dim()));
    let levels = normalized_levels(&spec.component_margins(args.margin), args.block_n, &tau)?;
    let result = estimate_gamma(&sample, &levels)?
        .with_meta("model", spec.to_string())
        .with_meta("tau", tau.to_string())
        .with_meta("levels", json!(levels.levels));
    let seed = args.input.is_none().then_some(args.seed);
    let manifest = RunManifest::new("estimate gamma", args, seed, started)?;
    emit_json(
        args.out.as_deref(),
        &Output {
            body: &result,
            manifest,
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

pub fn verify(args: &VerifyArgs) -> CmdResult {
    let started = Instant::now();
    let opts = VerifyOptions {
        seed: args.seed,
        suite: args.suite,
        perturb_theta: args.perturb_theta,
    };
    let report = run_suite(&opts);
    for row in report.failed_rows() {
        eprintln!("FAIL {}: {}", row.id, row.detail);
    }
    let manifest = RunManifest::new("verify", args, Some(args.seed), started)?;
    emit_json(
        args.out.as_deref(),
        &Output {
            body: &report,
            manifest,
        },
    )?;
    if report.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_SUITE_FAILED))
    }
}
