//! Dispatch from a validated [`RunConfig`] to the verification engine and
//! assembly of the [`ReportRecord`].
//!
//! Precondition violations that only the engine can detect (unsupported
//! parameter combinations, incompatible supports) surface as
//! [`RunError::Invalid`], mapping to exit code 2 like any other rejected
//! configuration. Quadrature and sampling failures are reported inside the
//! record — per-row `error` entries, or the record-level `error` when a
//! whole battery aborts — so a partial report is still emitted and the
//! process exits 3.

use std::time::Instant;

use hardy_core::cartesian::{
    verify_ckn_fullgrad, verify_lh2_fullgrad, BoxMethod, CartesianError, ChainVerification,
    DEFAULT_TENSOR_ORDER,
};
use hardy_core::group::{GroupSpec, QuasiNormSpec};
use hardy_core::quad::QuadratureSpec;
use hardy_core::sharpness::{sweep, FamilyParams, TestFamily};
use hardy_core::suite::{
    remainder_identity, run_battery, run_remainder_battery, verify_case, CaseError,
    InequalityCase, RemainderReport, TheoremId, VerificationResult,
};

use crate::config::{ChainTheorem, Command, RunConfig};
use crate::report::{ConfigEcho, Part, ReportRecord, ResultRow, Summary};

/// Most negative value the remainder term may take before the identity's
/// non-negativity is considered violated (pure rounding noise).
pub const REMAINDER_NEGATIVITY_FLOOR: f64 = -1e-12;

/// Relative tolerance on the independently-computed `p = 2` identity.
pub const P2_IDENTITY_TOL: f64 = 1e-8;

/// A run that could not start; the message names the violated constraint.
#[derive(Debug)]
pub enum RunError {
    /// Engine-level precondition violation (exit 2).
    Invalid(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Invalid(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for RunError {}

/// Splits an engine error into "bad configuration" (everything the user can
/// fix: parameters, supports, profile and group construction) versus
/// "numerical failure" (quadrature did not converge), which becomes row or
/// record `error` text.
fn case_failure(err: CaseError) -> Result<String, RunError> {
    match err {
        CaseError::Quad(e) => Ok(format!("quadrature failure: {e}")),
        other => Err(RunError::Invalid(other.to_string())),
    }
}

fn chain_failure(err: CartesianError) -> Result<String, RunError> {
    match err {
        CartesianError::NonFinite { .. } => Ok(format!("integration failure: {err}")),
        other => Err(RunError::Invalid(other.to_string())),
    }
}

// ---------------------------------------------------------------------------
// Row builders
// ---------------------------------------------------------------------------

fn parts_of(parts: &[(String, f64)]) -> Vec<Part> {
    parts
        .iter()
        .map(|(name, value)| Part { name: name.clone(), value: *value })
        .collect()
}

fn verification_row(kind: &str, v: &VerificationResult) -> ResultRow {
    ResultRow {
        kind: kind.to_string(),
        case: v.case_id.clone(),
        theorem: v.theorem.key().to_string(),
        pass: Some(v.pass),
        lhs: Some(v.lhs),
        rhs: Some(v.rhs),
        constant: Some(v.constant),
        ratio: Some(v.ratio),
        err_lhs: Some(v.err_lhs),
        err_rhs: Some(v.err_rhs),
        r_at_sup: v.r_at_sup,
        parts: parts_of(&v.parts),
        ..ResultRow::default()
    }
}

fn error_row(kind: &str, case: String, theorem: &str, message: String) -> ResultRow {
    ResultRow {
        kind: kind.to_string(),
        case,
        theorem: theorem.to_string(),
        error: Some(message),
        ..ResultRow::default()
    }
}

fn chain_row(c: &ChainVerification, theorem: &str) -> ResultRow {
    ResultRow {
        kind: "chain".to_string(),
        case: c.case_id.clone(),
        theorem: theorem.to_string(),
        pass: Some(c.pass()),
        lhs: Some(c.lhs),
        mid: Some(c.mid),
        rhs: Some(c.rhs),
        constant: Some(c.constant),
        err_lhs: Some(c.err_lhs),
        err_mid: Some(c.err_mid),
        err_rhs: Some(c.err_rhs),
        pass_lhs_mid: Some(c.pass_lhs_mid),
        pass_mid_rhs: Some(c.pass_mid_rhs),
        parts: parts_of(&c.parts),
        ..ResultRow::default()
    }
}

/// Pass policy for the exact identity: the residual must vanish to within
/// `tol_margin` of the dominant term, the remainder term may not be
/// meaningfully negative, and the independent `p = 2` route must agree.
fn remainder_row(r: &RemainderReport, tol_margin: f64) -> ResultRow {
    let scale = r.term_u.max(r.term_v);
    let pass = r.residual <= tol_margin * scale
        && r.term_rem >= REMAINDER_NEGATIVITY_FLOOR
        && r.p2_identity_rel_dev.map_or(true, |dev| dev <= P2_IDENTITY_TOL);
    ResultRow {
        kind: "remainder".to_string(),
        case: r.case_id.clone(),
        theorem: TheoremId::EqRem.key().to_string(),
        pass: Some(pass),
        term_u: Some(r.term_u),
        term_v: Some(r.term_v),
        term_rem: Some(r.term_rem),
        residual: Some(r.residual),
        err_estimate: Some(r.err_estimate),
        p2_identity_rel_dev: r.p2_identity_rel_dev,
        ..ResultRow::default()
    }
}

fn summarize(rows: &[ResultRow]) -> Summary {
    let cases = rows.len();
    let passes = rows.iter().filter(|r| r.pass == Some(true)).count();
    let failures = rows.iter().filter(|r| r.pass == Some(false)).count();
    let errors = rows.iter().filter(|r| r.error.is_some()).count();
    Summary {
        all_pass: cases > 0 && passes == cases,
        cases,
        passes,
        failures,
        errors,
        ..Summary::default()
    }
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

type Body = (Summary, Vec<ResultRow>, Option<String>);

fn build_case(config: &RunConfig, theorem: TheoremId) -> Result<InequalityCase, RunError> {
    let group = GroupSpec::make_group(&config.weights)
        .map_err(|e| RunError::Invalid(e.to_string()))?;
    let norm = QuasiNormSpec::new(config.norm.clone(), &group)
        .map_err(|e| RunError::Invalid(e.to_string()))?;
    let profile = config
        .profile
        .clone()
        .expect("config resolution requires a profile for case commands");
    Ok(InequalityCase {
        theorem,
        group,
        norm,
        p: config.p.expect("config resolution requires p for case commands"),
        big_r: config.big_r,
        profile,
    })
}

fn dispatch_verify(config: &RunConfig, spec: &QuadratureSpec) -> Result<Body, RunError> {
    if config.euclidean {
        return dispatch_chain(config);
    }
    let theorem = config.theorem.expect("config resolution sets the theorem");
    let case = build_case(config, theorem)?;
    let rows = match verify_case(&case, spec, config.tol_margin) {
        Ok(v) => vec![verification_row("verify", &v)],
        Err(err) => {
            let message = case_failure(err)?;
            vec![error_row("verify", case.case_id(), theorem.key(), message)]
        }
    };
    Ok((summarize(&rows), rows, None))
}

fn dispatch_chain(config: &RunConfig) -> Result<Body, RunError> {
    let function = config
        .function
        .as_ref()
        .expect("config resolution requires a function for the Euclidean lane");
    let n = config.n.expect("config resolution sets n for the Euclidean lane");
    let chain = config.chain.expect("config resolution sets the chain statement");
    let method = match config.mc_samples {
        Some(samples) => BoxMethod::MonteCarlo {
            samples,
            seed: config.seed.unwrap_or(0),
        },
        None => BoxMethod::TensorGauss { order: DEFAULT_TENSOR_ORDER },
    };
    let outcome = match chain {
        ChainTheorem::Lh2Rn => verify_lh2_fullgrad(
            function,
            config.p.expect("config resolution requires p for the LH2 chain"),
            n,
            config.big_r,
            &method,
            config.tol_margin,
        ),
        ChainTheorem::Ckn => verify_ckn_fullgrad(function, n, &method, config.tol_margin),
    };
    let rows = match outcome {
        Ok(c) => vec![chain_row(&c, chain.key())],
        Err(err) => {
            let message = chain_failure(err)?;
            let case = format!("{}|n={n}|{}", chain.key(), function.name());
            vec![error_row("chain", case, chain.key(), message)]
        }
    };
    Ok((summarize(&rows), rows, None))
}

fn dispatch_sweep(config: &RunConfig, spec: &QuadratureSpec) -> Result<Body, RunError> {
    let family = config.family.expect("config resolution sets the family");
    let params = FamilyParams {
        p: config.p.expect("config resolution sets p for sweeps"),
        q_dim: config.q_dim,
        big_r: config.big_r,
    };
    let grid = config
        .eps
        .clone()
        .expect("config resolution sets the member grid");
    let family = TestFamily::new(family, params, grid)
        .map_err(|e| RunError::Invalid(e.to_string()))?;
    let result = sweep(&family, spec, config.tol_margin);

    let mut rows = Vec::with_capacity(result.entries.len());
    for entry in &result.entries {
        match &entry.outcome {
            Ok(v) => {
                let mut row = verification_row("sweep", v);
                row.eps = Some(entry.eps);
                rows.push(row);
            }
            Err(message) => {
                let mut row = error_row(
                    "sweep",
                    format!("{}|eps={}", result.family.key(), entry.eps),
                    result.theorem.key(),
                    message.clone(),
                );
                row.eps = Some(entry.eps);
                rows.push(row);
            }
        }
    }
    let mut summary = summarize(&rows);
    summary.constant = Some(result.constant);
    summary.max_ratio = result.max_ratio;
    summary.final_ratio = result.final_ratio;
    summary.complete = Some(result.complete);
    summary.tail_nondecreasing = Some(result.tail_nondecreasing);
    Ok((summary, rows, None))
}

fn dispatch_remainder(config: &RunConfig, spec: &QuadratureSpec) -> Result<Body, RunError> {
    let case = build_case(config, TheoremId::EqRem)?;
    let rows = match remainder_identity(&case, spec) {
        Ok(report) => vec![remainder_row(&report, config.tol_margin)],
        Err(err) => {
            let message = case_failure(err)?;
            vec![error_row(
                "remainder",
                case.case_id(),
                TheoremId::EqRem.key(),
                message,
            )]
        }
    };
    Ok((summarize(&rows), rows, None))
}

/// Battery failures cannot come from the user's configuration — the cases
/// are library-built — so any error aborts into the record-level `error`
/// with whatever partial structure exists (exit 3), never exit 2.
fn dispatch_suite(config: &RunConfig, spec: &QuadratureSpec) -> Result<Body, RunError> {
    let mut rows = Vec::new();
    let battery = run_battery(spec, config.tol_margin);
    let verifications = match battery {
        Ok(list) => list,
        Err(err) => {
            let summary = summarize(&rows);
            return Ok((summary, rows, Some(format!("soundness battery aborted: {err}"))));
        }
    };
    rows.extend(verifications.iter().map(|v| verification_row("verify", v)));
    match run_remainder_battery(spec) {
        Ok(reports) => {
            rows.extend(reports.iter().map(|r| remainder_row(r, config.tol_margin)));
        }
        Err(err) => {
            let mut summary = summarize(&rows);
            summary.all_pass = false;
            return Ok((summary, rows, Some(format!("remainder battery aborted: {err}"))));
        }
    }
    Ok((summarize(&rows), rows, None))
}

fn dispatch(config: &RunConfig, spec: &QuadratureSpec) -> Result<Body, RunError> {
    match config.command {
        Command::Verify => dispatch_verify(config, spec),
        Command::Sweep => dispatch_sweep(config, spec),
        Command::Remainder => dispatch_remainder(config, spec),
        Command::Suite => dispatch_suite(config, spec),
    }
}

/// Runs the configured command and assembles the report.
///
/// Row order is deterministic (battery construction order, sweep grid
/// order), so identical configurations produce identical reports; the
/// optional `--jobs` bound only changes scheduling.
pub fn run(config: &RunConfig) -> Result<ReportRecord, RunError> {
    let started = Instant::now();
    let spec = QuadratureSpec::default().with_tols(config.rel_tol, config.abs_tol);
    let (summary, results, error) = match config.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| {
                    RunError::Invalid(format!("cannot build a {jobs}-thread worker pool: {e}"))
                })?;
            pool.install(|| dispatch(config, &spec))?
        }
        None => dispatch(config, &spec)?,
    };
    let mut summary = summary;
    if error.is_some() {
        summary.all_pass = false;
    }
    Ok(ReportRecord {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: config.command.key().to_string(),
        config: ConfigEcho::from_config(config),
        summary,
        results,
        error,
        wall_time_ms: config
            .timing
            .then(|| started.elapsed().as_millis().min(u64::MAX as u128) as u64),
    })
}
