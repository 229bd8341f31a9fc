//! `wco` — batch front door for spectra of invertible weighted composition
//! operators with automorphism symbols on H^2(B_N) and A^2_alpha(B_N).
//!
//! Every command reads one JSON configuration, writes JSON/CSV artifacts into
//! the output directory, and is deterministic given (config, seed).
//!
//! Exit codes: 0 success, 1 validation failure, 2 numerical-contract failure.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use config::ExperimentConfig;
use output::Emitter;
use wco_core::constructions::{
    adjoint_eigenvector, forward_eigenfunction, parabolic_approx_eigenvector, EigenWitness,
    WitnessDetail,
};
use wco_core::operator::TruncatedOperator;
use wco_core::symbol::cocycle_sup_growth;
use wco_core::{spectrum, verification, AutomorphismKind, Error as CoreError, Point, SymbolEval};

#[derive(Parser)]
#[command(
    name = "wco",
    version,
    about = "Spectra of invertible weighted composition operators on the unit ball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Path to the JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the truncation degree from the configuration.
    #[arg(long, global = true)]
    degree: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Fixed-point classification of the configured automorphism.
    Classify,
    /// Closed-form spectrum prediction (annulus or circle).
    Predict,
    /// Assemble and export the truncated operator matrix.
    Truncate,
    /// Eigenvalues of the truncated operator (diagnostic scatter).
    Eigs,
    /// Cocycle sup-norm growth sequence r_n and its predicted limit.
    CocycleLimit,
    /// Forward eigenfunction witness (hyperbolic canonical symbols).
    WitnessForward,
    /// Adjoint kernel eigenvector witness (hyperbolic symbols).
    WitnessAdjoint,
    /// Parabolic approximate eigenvector witness with its residual bound.
    WitnessParabolic,
    /// Run the exact-identity verification suite.
    Verify,
    /// Truncation eigenvalues together with predicted annulus radii.
    Scatter,
}

/// Failure of a quantitative numerical contract (distinct from bad input).
#[derive(Debug)]
struct ContractFailure(String);

impl std::fmt::Display for ContractFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "numerical contract failed: {}", self.0)
    }
}

impl std::error::Error for ContractFailure {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// 1 for validation problems, 2 for numerical-contract failures.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    if let Some(core) = err.downcast_ref::<CoreError>() {
        return match core {
            CoreError::DegenerateWitness { .. }
            | CoreError::SeparationSearchFailed { .. }
            | CoreError::BandSearchFailed { .. }
            | CoreError::TailNotConverged { .. }
            | CoreError::KernelTailTooLarge { .. }
            | CoreError::AmbiguousClassification { .. }
            | CoreError::EigensolverFailure(_) => 2,
            _ => 1,
        };
    }
    if err.downcast_ref::<ContractFailure>().is_some() {
        return 2;
    }
    1
}

fn run(cli: &Cli) -> Result<()> {
    let config_path =
        cli.config.as_ref().ok_or_else(|| anyhow!("--config <file.json> is required"))?;
    let text = std::fs::read_to_string(config_path)
        .with_context(|| format!("cannot read {}", config_path.display()))?;
    let cfg = ExperimentConfig::parse(&text)?;
    let mut emit = Emitter::new(&cli.out, &text)?;
    let seed = cfg.seed_or(cli.seed);
    match cli.command {
        Command::Classify => classify(&cfg, &mut emit),
        Command::Predict => predict(&cfg, &mut emit),
        Command::Truncate => truncate(&cfg, cli.degree, &mut emit),
        Command::Eigs => eigs(&cfg, cli.degree, &mut emit),
        Command::CocycleLimit => cocycle_limit(&cfg, seed, &mut emit),
        Command::WitnessForward => witness_forward(&cfg, cli.degree, &mut emit),
        Command::WitnessAdjoint => witness_adjoint(&cfg, &mut emit),
        Command::WitnessParabolic => witness_parabolic(&cfg, &mut emit),
        Command::Verify => verify(seed, &mut emit),
        Command::Scatter => scatter(&cfg, cli.degree, &mut emit),
    }?;
    println!("{}", emit.summary());
    Ok(())
}

fn classify(cfg: &ExperimentConfig, emit: &mut Emitter) -> Result<()> {
    let phi = cfg.automorphism()?;
    let report = phi.classify()?;
    emit.write_json("classify.json", report)?;
    Ok(())
}

fn predict(cfg: &ExperimentConfig, emit: &mut Emitter) -> Result<()> {
    let phi = cfg.automorphism()?;
    let psi = cfg.symbol()?;
    let sp = cfg.space()?;
    let prediction = spectrum::predict(&psi, &phi, sp)?;
    emit.write_json("prediction.json", prediction)?;
    Ok(())
}

fn build_operator(
    cfg: &ExperimentConfig,
    degree_flag: Option<usize>,
) -> Result<(TruncatedOperator, usize)> {
    let phi = cfg.automorphism()?;
    let psi = cfg.symbol()?;
    let sp = cfg.space()?;
    let degree = cfg.degree_or(degree_flag, 20);
    let op = TruncatedOperator::build(&psi, &phi, sp, degree)?;
    Ok((op, degree))
}

#[derive(Serialize)]
struct MatrixOut {
    degree: usize,
    size: usize,
    /// Row-major entries as [re, im] pairs.
    entries: Vec<(f64, f64)>,
}

fn truncate(cfg: &ExperimentConfig, degree_flag: Option<usize>, emit: &mut Emitter) -> Result<()> {
    let (op, degree) = build_operator(cfg, degree_flag)?;
    let m = op.matrix();
    let entries: Vec<(f64, f64)> =
        m.row_iter().flat_map(|r| r.iter().map(|c| (c.re, c.im)).collect::<Vec<_>>()).collect();
    emit.write_json("matrix.json", MatrixOut { degree, size: op.size(), entries })?;
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| {
            r.iter().map(|c| format!("{:.17e},{:.17e}", c.re, c.im)).collect::<Vec<_>>().join(",")
        })
        .collect();
    emit.write_csv("matrix.csv", "# row-major re,im pairs", &rows)?;
    Ok(())
}

fn eigs(cfg: &ExperimentConfig, degree_flag: Option<usize>, emit: &mut Emitter) -> Result<()> {
    let (op, _) = build_operator(cfg, degree_flag)?;
    let mut eig = op.eigenvalues()?;
    eig.sort_by(|a, b| {
        b.norm().partial_cmp(&a.norm()).unwrap().then(a.arg().partial_cmp(&b.arg()).unwrap())
    });
    let rows: Vec<String> = eig.iter().map(|e| format!("{:.17e},{:.17e}", e.re, e.im)).collect();
    emit.write_csv("eigenvalues.csv", "re,im", &rows)?;
    Ok(())
}

#[derive(Serialize)]
struct CocycleLimitOut {
    n_max: usize,
    samples: usize,
    predicted_limit: f64,
    final_r_n: f64,
    relative_gap: f64,
}

fn cocycle_limit(cfg: &ExperimentConfig, seed: u64, emit: &mut Emitter) -> Result<()> {
    let phi = cfg.automorphism()?;
    let psi = cfg.symbol()?;
    let n_max = cfg.n_max.unwrap_or(200);
    let samples = cfg.samples.unwrap_or(2000);
    let r = cocycle_sup_growth(&psi, &phi, n_max, samples, seed)?;
    let report = phi.classify()?;
    let predicted = match report.kind {
        AutomorphismKind::Hyperbolic => {
            let a = psi.eval(report.denjoy_wolff.as_ref().unwrap()).map_err(anyhow::Error::from)?;
            let b = psi.eval(&report.boundary_fixed[1]).map_err(anyhow::Error::from)?;
            a.norm().max(b.norm())
        }
        AutomorphismKind::Parabolic => {
            psi.eval(report.denjoy_wolff.as_ref().unwrap()).map_err(anyhow::Error::from)?.norm()
        }
        AutomorphismKind::Elliptic => return Err(CoreError::EllipticUnsupported.into()),
    };
    let rows: Vec<String> =
        r.iter().enumerate().map(|(i, v)| format!("{},{:.17e}", i + 1, v)).collect();
    emit.write_csv("cocycle_growth.csv", "n,r_n", &rows)?;
    let final_r_n = *r.last().unwrap();
    emit.write_json(
        "cocycle_limit.json",
        CocycleLimitOut {
            n_max,
            samples,
            predicted_limit: predicted,
            final_r_n,
            relative_gap: (final_r_n - predicted).abs() / predicted,
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct WitnessOut {
    kind: &'static str,
    lambda: (f64, f64),
    residual: f64,
    norm: f64,
    terms_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    series_coefficients: Option<Vec<(f64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<(f64, f64)>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<(f64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_sq_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_sq_measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    norm_sq_lower_bound: Option<f64>,
}

fn witness_json(witness: &EigenWitness, kind: &'static str) -> WitnessOut {
    let mut out = WitnessOut {
        kind,
        lambda: (witness.lambda.re, witness.lambda.im),
        residual: witness.residual,
        norm: witness.norm,
        terms_used: witness.terms_used,
        p: None,
        series_coefficients: None,
        points: None,
        coefficients: None,
        n0: None,
        residual_sq_bound: None,
        residual_sq_measured: None,
        norm_sq_lower_bound: None,
    };
    let pts = |points: &[Point]| {
        points
            .iter()
            .map(|z| z.coords.iter().map(|c| (c.re, c.im)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    match &witness.detail {
        WitnessDetail::Forward { series, p } => {
            out.p = Some(*p);
            out.series_coefficients = Some(series.coeffs().iter().map(|c| (c.re, c.im)).collect());
        }
        WitnessDetail::KernelCombination { points, coefficients, .. } => {
            out.points = Some(pts(points));
            out.coefficients = Some(coefficients.iter().map(|c| (c.re, c.im)).collect());
        }
        WitnessDetail::ParabolicWindow {
            points,
            coefficients,
            n0,
            residual_sq_bound,
            residual_sq_measured,
            norm_sq_lower_bound,
            ..
        } => {
            out.points = Some(pts(points));
            out.coefficients = Some(coefficients.iter().map(|c| (c.re, c.im)).collect());
            out.n0 = Some(*n0);
            out.residual_sq_bound = Some(*residual_sq_bound);
            out.residual_sq_measured = Some(*residual_sq_measured);
            out.norm_sq_lower_bound = Some(*norm_sq_lower_bound);
        }
    }
    out
}

fn witness_forward(
    cfg: &ExperimentConfig,
    degree_flag: Option<usize>,
    emit: &mut Emitter,
) -> Result<()> {
    let phi = cfg.automorphism()?;
    let psi = cfg.symbol()?;
    let sp = cfg.space()?;
    let lambda = cfg.lambda()?;
    let k_terms = cfg.k_terms.unwrap_or(40);
    let degree = cfg.degree_or(degree_flag, 60);
    let w = forward_eigenfunction(&psi, &phi, sp, lambda, k_terms, degree)?;
    emit.write_json("witness_forward.json", witness_json(&w, "forward"))?;
    Ok(())
}

fn witness_adjoint(cfg: &ExperimentConfig, emit: &mut Emitter) -> Result<()> {
    let phi = cfg.automorphism()?;
    let psi = cfg.symbol()?;
    let sp = cfg.space()?;
    let lambda = cfg.lambda()?;
    let j_terms = cfg.k_terms.unwrap_or(40);
    let w = adjoint_eigenvector(&psi, &phi, sp, lambda, j_terms)?;
    emit.write_json("witness_adjoint.json", witness_json(&w, "adjoint_kernel"))?;
    Ok(())
}

fn witness_parabolic(cfg: &ExperimentConfig, emit: &mut Emitter) -> Result<()> {
    let phi = cfg.automorphism()?;
    let psi = cfg.symbol()?;
    let sp = cfg.space()?;
    let lambda = cfg.lambda()?;
    let m = cfg.m.unwrap_or(25);
    let w = parabolic_approx_eigenvector(&psi, &phi, sp, lambda, m)?;
    let json = witness_json(&w, "parabolic_approx");
    let violated = match &w.detail {
        WitnessDetail::ParabolicWindow { residual_sq_bound, residual_sq_measured, .. } => {
            residual_sq_measured > residual_sq_bound
        }
        _ => false,
    };
    emit.write_json("witness_parabolic.json", json)?;
    if violated {
        return Err(ContractFailure("parabolic residual bound exceeded".into()).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyOut {
    all_pass: bool,
    checks: Vec<verification::CheckResult>,
}

fn verify(seed: u64, emit: &mut Emitter) -> Result<()> {
    let checks = verification::run_all(seed)?;
    let all_pass = checks.iter().all(|c| c.pass);
    for ch in &checks {
        println!(
            "[{}] {} (max error {:.3e}, tolerance {:.1e})",
            if ch.pass { "PASS" } else { "FAIL" },
            ch.name,
            ch.max_error,
            ch.tolerance
        );
    }
    emit.write_json("verify.json", VerifyOut { all_pass, checks })?;
    if !all_pass {
        return Err(ContractFailure("verification suite reported failures".into()).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct ScatterOut {
    r_min: f64,
    r_max: f64,
    degree: usize,
    eigenvalue_count: usize,
    /// Largest truncation-eigenvalue modulus (finite sections of these
    /// non-normal operators can mislead; diagnostic only).
    max_eigenvalue_modulus: f64,
    /// ||M^n||^{1/n} at the last computed power, the second spectral-radius
    /// diagnostic.
    power_norm_growth_last: f64,
}

fn scatter(cfg: &ExperimentConfig, degree_flag: Option<usize>, emit: &mut Emitter) -> Result<()> {
    let phi = cfg.automorphism()?;
    let psi = cfg.symbol()?;
    let sp = cfg.space()?;
    let prediction = spectrum::predict(&psi, &phi, sp)?;
    let (r_min, r_max) = prediction.radii();
    let (op, degree) = build_operator(cfg, degree_flag)?;
    let eig = op.eigenvalues()?;
    let rows: Vec<String> = eig.iter().map(|e| format!("{:.17e},{:.17e}", e.re, e.im)).collect();
    emit.write_csv("scatter.csv", "re,im", &rows)?;
    let growth = op.power_norm_growth(cfg.n_max.unwrap_or(24).min(64));
    emit.write_json(
        "scatter.json",
        ScatterOut {
            r_min,
            r_max,
            degree,
            eigenvalue_count: eig.len(),
            max_eigenvalue_modulus: eig.iter().map(|e| e.norm()).fold(0.0, f64::max),
            power_norm_growth_last: *growth.last().unwrap(),
        },
    )?;
    Ok(())
}
