//! Run configuration: command-line flags, optional flat config files, and
//! validation against the verifier preconditions.
//!
//! Options may also come from a `--config FILE` containing one `key = value`
//! pair per line (keys are the long flag names without the leading dashes;
//! `#` starts a comment). Command-line flags override file entries. Every
//! configuration is checked before execution and rejections name the
//! violated constraint.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use hardy_core::cartesian::CartesianTestFunction;
use hardy_core::group::QuasiNormKind;
use hardy_core::profile::Profile;
use hardy_core::sharpness::{default_epsilon_grid, FamilyId};
use hardy_core::suite::{TheoremId, DEFAULT_TOL_MARGIN};

/// Environment variable consulted when `--jobs` is absent.
pub const JOBS_ENV_VAR: &str = "HARDY_BENCH_JOBS";

/// A rejected configuration; the message names the violated constraint.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

// ---------------------------------------------------------------------------
// Command-line grammar
// ---------------------------------------------------------------------------

/// Verifies critical Hardy-type inequalities on homogeneous groups, sweeps
/// extremal families toward their sharp constants, checks the exact
/// remainder identity, and runs the full acceptance battery.
#[derive(Debug, Parser)]
#[command(name = "hardy-bench", version, disable_help_subcommand = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

/// Subcommand grammar.
#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Verify one inequality case (radial engine, or the Euclidean
    /// full-gradient chain with --euclidean).
    Verify(VerifyArgs),
    /// Sweep an extremal family toward its sharp constant.
    Sweep(SweepArgs),
    /// Evaluate the exact remainder identity on one case.
    Remainder(RemainderArgs),
    /// Run the full soundness battery plus the remainder battery.
    Suite(SuiteArgs),
}

/// Flags shared by every command.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Flat `key = value` config file; command-line flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Dilation weights, comma-separated (e.g. `1,1,2`).
    #[arg(long, value_name = "LIST")]
    pub weights: Option<String>,
    /// Quasi-norm: euclidean | weighted-max | koranyi | weighted-power:<N>.
    #[arg(long, value_name = "KIND")]
    pub norm: Option<String>,
    /// Homogeneous dimension; must equal the weight sum when both are given.
    #[arg(long = "Q", value_name = "DIM")]
    pub q_dim: Option<f64>,
    /// Anchor radius R (default 1).
    #[arg(long = "R", value_name = "RADIUS")]
    pub big_r: Option<f64>,
    /// Relative quadrature tolerance (default 1e-10).
    #[arg(long, value_name = "TOL")]
    pub rel_tol: Option<f64>,
    /// Absolute quadrature tolerance (default 1e-14).
    #[arg(long, value_name = "TOL")]
    pub abs_tol: Option<f64>,
    /// Acceptance margin on ratios and residuals (default 1e-6).
    #[arg(long, value_name = "TOL")]
    pub tol_margin: Option<f64>,
    /// Worker threads (default: HARDY_BENCH_JOBS, then all cores).
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
    /// Write the report to this path instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Report format: json | csv (default json).
    #[arg(long, value_name = "FMT")]
    pub format: Option<String>,
    /// Monte Carlo seed (Euclidean lane; echoed into the report).
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Record wall time in the report (makes bytes run-dependent).
    #[arg(long)]
    pub timing: bool,
}

/// `verify` flags.
#[derive(Debug, Default, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Theorem key (LH2, LH2_supR, UP1, UP2, CRITLOG, BALL_UP, HS1a, HS1b,
    /// Q2a, Q2b, CLASSICAL_LP, EDMUNDS_TRIEBEL; with --euclidean: LH2 | CKN).
    #[arg(long, value_name = "KEY")]
    pub theorem: Option<String>,
    /// Integrability exponent p.
    #[arg(long, value_name = "P")]
    pub p: Option<f64>,
    /// Paired exponent q (UP1 only; must satisfy 1/q = 1/2 - 1/p).
    #[arg(long = "q", value_name = "EXP")]
    pub q: Option<f64>,
    /// Radial profile, e.g. `bump:0.2,0.8` or `polybump:0.2,0.8,3`.
    #[arg(long, value_name = "NAME")]
    pub profile: Option<String>,
    /// Run the Euclidean full-gradient chain instead of the radial engine.
    #[arg(long)]
    pub euclidean: bool,
    /// Euclidean dimension n (with --euclidean; default 2).
    #[arg(long, value_name = "N")]
    pub n: Option<usize>,
    /// Euclidean test function: gaussian | bump-angular | radial:<profile>
    /// | angular:<profile> (with --euclidean).
    #[arg(long, value_name = "NAME")]
    pub function: Option<String>,
    /// Monte Carlo sample count, scientific notation accepted (e.g. 1e7);
    /// without it the Euclidean lane uses tensor quadrature.
    #[arg(long, value_name = "COUNT")]
    pub mc_samples: Option<String>,
}

/// `sweep` flags.
#[derive(Debug, Default, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Family key or alias: LH2_LOGPOWER/logpower, CRITLOG_LOGCUT/logcut,
    /// CLASSICAL_POWER/power, ET_LOGCONC/logconc.
    #[arg(long, value_name = "KEY")]
    pub family: Option<String>,
    /// Theorem key; optional, must match the family's theorem.
    #[arg(long, value_name = "KEY")]
    pub theorem: Option<String>,
    /// Integrability exponent p (families with a pinned exponent run at
    /// p = Q regardless).
    #[arg(long, value_name = "P")]
    pub p: Option<f64>,
    /// Member grid, comma-separated strictly decreasing values in (0, 0.5).
    #[arg(long, value_name = "LIST")]
    pub eps: Option<String>,
}

/// `remainder` flags.
#[derive(Debug, Default, Args)]
pub struct RemainderArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Integrability exponent p (> 1).
    #[arg(long, value_name = "P")]
    pub p: Option<f64>,
    /// Radial profile, e.g. `bump:0.3,0.9`.
    #[arg(long, value_name = "NAME")]
    pub profile: Option<String>,
}

/// `suite` flags (only the shared set).
#[derive(Debug, Default, Args)]
pub struct SuiteArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

// ---------------------------------------------------------------------------
// Resolved configuration
// ---------------------------------------------------------------------------

/// Which command runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Sweep,
    Remainder,
    Suite,
}

impl Command {
    /// Stable lowercase key used in reports.
    pub fn key(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::Remainder => "remainder",
            Command::Suite => "suite",
        }
    }
}

/// Report output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// Stable lowercase key used in reports.
    pub fn key(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        match text.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(invalid(format!(
                "unknown format `{other}`; expected json or csv"
            ))),
        }
    }
}

/// Statement selector for the Euclidean full-gradient lane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainTheorem {
    /// Critical Hardy chain on ℝⁿ (needs `p` and an anchor radius).
    Lh2Rn,
    /// Critical Caffarelli–Kohn–Nirenberg-type bound at `p = n`.
    Ckn,
}

impl ChainTheorem {
    /// Stable key used in reports.
    pub fn key(self) -> &'static str {
        match self {
            ChainTheorem::Lh2Rn => "LH2_Rn",
            ChainTheorem::Ckn => "CKN",
        }
    }
}

/// A fully resolved, validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// Dilation weights; the homogeneous dimension is their sum.
    pub weights: Vec<f64>,
    /// Homogeneous dimension.
    pub q_dim: f64,
    /// Quasi-norm kind for radial cases.
    pub norm: QuasiNormKind,
    /// Canonical echo string for the quasi-norm.
    pub norm_name: String,
    /// Radial theorem under test (`verify` without `--euclidean`).
    pub theorem: Option<TheoremId>,
    /// Euclidean-lane statement (`verify --euclidean`).
    pub chain: Option<ChainTheorem>,
    pub p: Option<f64>,
    /// UP1 paired exponent, when supplied (consistency-checked).
    pub q: Option<f64>,
    pub big_r: f64,
    pub profile: Option<Profile>,
    pub family: Option<FamilyId>,
    /// Sweep member grid (resolved to the family default when absent).
    pub eps: Option<Vec<f64>>,
    pub euclidean: bool,
    /// Euclidean dimension.
    pub n: Option<usize>,
    pub function: Option<CartesianTestFunction>,
    /// Monte Carlo sample count; tensor quadrature when absent.
    pub mc_samples: Option<u64>,
    pub seed: Option<u64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub tol_margin: f64,
    pub jobs: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub timing: bool,
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(invalid(format!(
                "config line {}: expected `key = value`, got `{line}`",
                idx + 1
            )));
        };
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(invalid(format!("config line {}: empty key", idx + 1)));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(invalid(format!(
                "config line {}: duplicate key `{key}`",
                idx + 1
            )));
        }
    }
    Ok(map)
}

/// Config-file entries not yet claimed by a flag.
struct FileOptions {
    map: BTreeMap<String, String>,
}

impl FileOptions {
    fn load(path: Option<&PathBuf>) -> Result<Self, ConfigError> {
        let map = match path {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    invalid(format!("cannot read config file `{}`: {e}", path.display()))
                })?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        Ok(FileOptions { map })
    }

    /// Moves `key` into `slot` unless the flag already set it.
    fn fill<T: FromStr>(&mut self, key: &str, slot: &mut Option<T>) -> Result<(), ConfigError>
    where
        T::Err: fmt::Display,
    {
        let taken = self.map.remove(key);
        if slot.is_none() {
            if let Some(raw) = taken {
                *slot = Some(raw.parse::<T>().map_err(|e| {
                    invalid(format!("config key `{key}`: cannot parse `{raw}`: {e}"))
                })?);
            }
        }
        Ok(())
    }

    /// Boolean keys can only switch a flag on (flags have no `=false` form).
    fn fill_flag(&mut self, key: &str, slot: &mut bool) -> Result<(), ConfigError> {
        if let Some(raw) = self.map.remove(key) {
            match raw.as_str() {
                "true" => *slot = true,
                "false" => {}
                other => {
                    return Err(invalid(format!(
                        "config key `{key}` must be `true` or `false`, got `{other}`"
                    )))
                }
            }
        }
        Ok(())
    }

    fn finish(self, command: Command) -> Result<(), ConfigError> {
        if let Some(key) = self.map.into_keys().next() {
            return Err(invalid(format!(
                "config key `{key}` is not recognized for the `{}` command",
                command.key()
            )));
        }
        Ok(())
    }
}

fn merge_common(file: &mut FileOptions, c: &mut CommonArgs) -> Result<(), ConfigError> {
    file.fill("weights", &mut c.weights)?;
    file.fill("norm", &mut c.norm)?;
    file.fill("Q", &mut c.q_dim)?;
    file.fill("R", &mut c.big_r)?;
    file.fill("rel-tol", &mut c.rel_tol)?;
    file.fill("abs-tol", &mut c.abs_tol)?;
    file.fill("tol-margin", &mut c.tol_margin)?;
    file.fill("jobs", &mut c.jobs)?;
    file.fill("output", &mut c.output)?;
    file.fill("format", &mut c.format)?;
    file.fill("seed", &mut c.seed)?;
    file.fill_flag("timing", &mut c.timing)
}

// ---------------------------------------------------------------------------
// Field parsers
// ---------------------------------------------------------------------------

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>, ConfigError> {
    let values: Result<Vec<f64>, _> = text
        .split(',')
        .map(|piece| piece.trim().parse::<f64>())
        .collect();
    let values =
        values.map_err(|e| invalid(format!("cannot parse {what} list `{text}`: {e}")))?;
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(invalid(format!(
            "{what} list `{text}` must be non-empty and finite"
        )));
    }
    Ok(values)
}

fn parse_norm(text: &str) -> Result<(QuasiNormKind, String), ConfigError> {
    let lower = text.trim().to_ascii_lowercase();
    if let Some(arg) = lower.strip_prefix("weighted-power:") {
        let n: f64 = arg
            .parse()
            .map_err(|e| invalid(format!("cannot parse weighted-power exponent `{arg}`: {e}")))?;
        if !(n.is_finite() && n > 0.0) {
            return Err(invalid(format!(
                "weighted-power exponent must be a positive number, got {n}"
            )));
        }
        return Ok((QuasiNormKind::WeightedPower(n), format!("weighted-power:{n}")));
    }
    match lower.as_str() {
        "euclidean" => Ok((QuasiNormKind::Euclidean, "euclidean".into())),
        "weighted-max" => Ok((QuasiNormKind::WeightedMax, "weighted-max".into())),
        "koranyi" => Ok((QuasiNormKind::Koranyi, "koranyi".into())),
        other => Err(invalid(format!(
            "unknown quasi-norm `{other}`; expected euclidean, weighted-max, koranyi, \
             or weighted-power:<N>"
        ))),
    }
}

fn parse_theorem(text: &str) -> Result<TheoremId, ConfigError> {
    TheoremId::ALL
        .into_iter()
        .find(|t| t.key().eq_ignore_ascii_case(text.trim()))
        .ok_or_else(|| {
            let keys: Vec<&str> = TheoremId::ALL.into_iter().map(|t| t.key()).collect();
            invalid(format!(
                "unknown theorem `{text}`; expected one of {}",
                keys.join(", ")
            ))
        })
}

fn parse_samples(text: &str) -> Result<u64, ConfigError> {
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|e| invalid(format!("cannot parse sample count `{text}`: {e}")))?;
    let max = 2f64.powi(53);
    if !(value.is_finite() && value >= 2.0 && value <= max && value.fract() == 0.0) {
        return Err(invalid(format!(
            "sample count must be an integer in [2, 2^53], got `{text}`"
        )));
    }
    Ok(value as u64)
}

/// Weights and homogeneous dimension from `--weights` and/or `--Q`.
///
/// With only `--Q`, an isotropic weight vector is synthesized for integral
/// `Q` and a single weight `[Q]` otherwise; the radial reductions depend on
/// the weights only through their sum.
fn resolve_geometry(
    weights: Option<&str>,
    q_dim: Option<f64>,
) -> Result<(Vec<f64>, f64), ConfigError> {
    match (weights, q_dim) {
        (Some(text), q) => {
            let weights = parse_f64_list(text, "weights")?;
            let sum: f64 = weights.iter().sum();
            if let Some(q) = q {
                if (sum - q).abs() > 1e-9 * q.abs().max(1.0) {
                    return Err(invalid(format!(
                        "--Q = {q} contradicts --weights {text}: the homogeneous dimension \
                         is the weight sum {sum}"
                    )));
                }
            }
            Ok((weights, sum))
        }
        (None, Some(q)) => {
            if !(q.is_finite() && q >= 1.0) {
                return Err(invalid(format!(
                    "homogeneous dimension Q must be finite and >= 1, got {q}"
                )));
            }
            let rounded = q.round();
            let weights = if (q - rounded).abs() <= 1e-9 {
                vec![1.0; rounded as usize]
            } else {
                vec![q]
            };
            Ok((weights, q))
        }
        (None, None) => Ok((vec![1.0, 1.0], 2.0)),
    }
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

struct CommonResolved {
    weights: Vec<f64>,
    q_dim: f64,
    norm: QuasiNormKind,
    norm_name: String,
    big_r: f64,
    rel_tol: f64,
    abs_tol: f64,
    tol_margin: f64,
    jobs: Option<usize>,
    output: Option<PathBuf>,
    format: Format,
    seed: Option<u64>,
    timing: bool,
}

fn resolve_common(c: CommonArgs) -> Result<CommonResolved, ConfigError> {
    let (weights, q_dim) = resolve_geometry(c.weights.as_deref(), c.q_dim)?;
    let (norm, norm_name) = match c.norm.as_deref() {
        Some(text) => parse_norm(text)?,
        None if weights.iter().all(|&w| w == 1.0) => (QuasiNormKind::Euclidean, "euclidean".into()),
        None => (QuasiNormKind::WeightedMax, "weighted-max".into()),
    };
    let big_r = c.big_r.unwrap_or(1.0);
    if !(big_r.is_finite() && big_r > 0.0) {
        return Err(invalid(format!("anchor radius R must be positive, got {big_r}")));
    }
    let rel_tol = c.rel_tol.unwrap_or(1e-10);
    let abs_tol = c.abs_tol.unwrap_or(1e-14);
    if !(rel_tol.is_finite() && rel_tol > 0.0 && abs_tol.is_finite() && abs_tol >= 0.0) {
        return Err(invalid(format!(
            "tolerances must satisfy rel-tol > 0 and abs-tol >= 0, got {rel_tol} and {abs_tol}"
        )));
    }
    let tol_margin = c.tol_margin.unwrap_or(DEFAULT_TOL_MARGIN);
    if !(tol_margin.is_finite() && tol_margin >= 0.0) {
        return Err(invalid(format!("tol-margin must be >= 0, got {tol_margin}")));
    }
    let jobs = match c.jobs {
        Some(jobs) => Some(jobs),
        None => match std::env::var(JOBS_ENV_VAR) {
            Ok(text) => Some(text.parse::<usize>().map_err(|_| {
                invalid(format!("{JOBS_ENV_VAR} must be a positive integer, got `{text}`"))
            })?),
            Err(_) => None,
        },
    };
    if jobs == Some(0) {
        return Err(invalid("worker thread count --jobs must be >= 1"));
    }
    let format = match c.format.as_deref() {
        Some(text) => text.parse::<Format>()?,
        None => Format::Json,
    };
    Ok(CommonResolved {
        weights,
        q_dim,
        norm,
        norm_name,
        big_r,
        rel_tol,
        abs_tol,
        tol_margin,
        jobs,
        output: c.output,
        format,
        seed: c.seed,
        timing: c.timing,
    })
}

impl RunConfig {
    fn from_common(command: Command, common: CommonResolved) -> RunConfig {
        RunConfig {
            command,
            weights: common.weights,
            q_dim: common.q_dim,
            norm: common.norm,
            norm_name: common.norm_name,
            theorem: None,
            chain: None,
            p: None,
            q: None,
            big_r: common.big_r,
            profile: None,
            family: None,
            eps: None,
            euclidean: false,
            n: None,
            function: None,
            mc_samples: None,
            seed: common.seed,
            rel_tol: common.rel_tol,
            abs_tol: common.abs_tol,
            tol_margin: common.tol_margin,
            jobs: common.jobs,
            output: common.output,
            format: common.format,
            timing: common.timing,
        }
    }
}

/// Exponents the theorems pin; used to default `--p` and to reject
/// contradictory values.
fn pinned_p(theorem: TheoremId, q_dim: f64) -> Option<(f64, &'static str)> {
    match theorem {
        TheoremId::CritLog => Some((q_dim, "CRITLOG runs at the critical exponent p = Q")),
        TheoremId::EdmundsTriebel => {
            Some((q_dim, "EDMUNDS_TRIEBEL runs at the critical exponent p = n = Q"))
        }
        TheoremId::BallUp => Some((2.0, "BALL_UP is an L^2 statement; p must be 2")),
        TheoremId::Hs1a | TheoremId::Hs1b => {
            Some((2.0, "the Hardy-Sobolev forms are L^2 statements; p must be 2"))
        }
        TheoremId::Q2a | TheoremId::Q2b => {
            Some((2.0, "the Q = 2 corollaries are L^2 statements; p must be 2"))
        }
        _ => None,
    }
}

fn resolve_verify(mut args: VerifyArgs) -> Result<RunConfig, ConfigError> {
    let mut file = FileOptions::load(args.common.config.as_ref())?;
    merge_common(&mut file, &mut args.common)?;
    file.fill("theorem", &mut args.theorem)?;
    file.fill("p", &mut args.p)?;
    file.fill("q", &mut args.q)?;
    file.fill("profile", &mut args.profile)?;
    file.fill_flag("euclidean", &mut args.euclidean)?;
    file.fill("n", &mut args.n)?;
    file.fill("function", &mut args.function)?;
    file.fill("mc-samples", &mut args.mc_samples)?;
    file.finish(Command::Verify)?;

    if args.euclidean {
        return resolve_verify_euclidean(args);
    }
    for (given, flag) in [
        (args.n.is_some(), "--n"),
        (args.function.is_some(), "--function"),
        (args.mc_samples.is_some(), "--mc-samples"),
    ] {
        if given {
            return Err(invalid(format!("{flag} applies only to `verify --euclidean`")));
        }
    }

    let theorem_text = args
        .theorem
        .as_deref()
        .ok_or_else(|| invalid("`verify` needs --theorem"))?;
    let theorem = parse_theorem(theorem_text)?;
    if theorem == TheoremId::EqRem {
        return Err(invalid(
            "EQ_REM is an identity, not a two-sided bound; use the `remainder` command",
        ));
    }
    let common = resolve_common(args.common)?;
    let p = match (args.p, pinned_p(theorem, common.q_dim)) {
        (Some(p), Some((pinned, why))) if (p - pinned).abs() > 1e-9 => {
            return Err(invalid(format!("{why}; got p = {p} with Q = {}", common.q_dim)));
        }
        (Some(p), _) => p,
        (None, Some((pinned, _))) => pinned,
        (None, None) => {
            return Err(invalid(format!(
                "`verify --theorem {}` needs --p",
                theorem.key()
            )))
        }
    };
    if let Some(q) = args.q {
        if theorem != TheoremId::Up1 {
            return Err(invalid("--q applies only to UP1, which pairs exponents"));
        }
        let expected = 1.0 / (0.5 - 1.0 / p);
        if !(p > 2.0) || (q - expected).abs() > 1e-9 * expected.abs() {
            return Err(invalid(format!(
                "UP1 pairs q with p through 1/q = 1/2 - 1/p; p = {p} forces q = {expected}, \
                 got q = {q}"
            )));
        }
    }
    let profile_text = args
        .profile
        .as_deref()
        .ok_or_else(|| invalid("`verify` needs --profile"))?;
    let profile = Profile::parse(profile_text).map_err(|e| invalid(e.to_string()))?;

    let mut config = RunConfig::from_common(Command::Verify, common);
    config.theorem = Some(theorem);
    config.p = Some(p);
    config.q = args.q;
    config.profile = Some(profile);
    Ok(config)
}

fn resolve_verify_euclidean(args: VerifyArgs) -> Result<RunConfig, ConfigError> {
    for (given, flag) in [
        (args.common.weights.is_some(), "--weights"),
        (args.common.norm.is_some(), "--norm"),
        (args.common.q_dim.is_some(), "--Q"),
        (args.profile.is_some(), "--profile"),
        (args.q.is_some(), "--q"),
    ] {
        if given {
            return Err(invalid(format!(
                "{flag} does not apply to `verify --euclidean`, which takes --n and --function"
            )));
        }
    }
    let n = args.n.unwrap_or(2);
    if n < 1 {
        return Err(invalid("Euclidean dimension --n must be >= 1"));
    }
    let chain = match args.theorem.as_deref() {
        Some(text) => match text.trim().to_ascii_uppercase().as_str() {
            "LH2" | "LH2_RN" => ChainTheorem::Lh2Rn,
            "CKN" => ChainTheorem::Ckn,
            other => {
                return Err(invalid(format!(
                    "the Euclidean lane verifies LH2 (full-gradient chain) or CKN, got `{other}`"
                )))
            }
        },
        None => return Err(invalid("`verify --euclidean` needs --theorem (LH2 or CKN)")),
    };
    let function_text = args.function.as_deref().ok_or_else(|| {
        invalid(
            "`verify --euclidean` needs --function \
             (gaussian, bump-angular, radial:<profile>, angular:<profile>)",
        )
    })?;
    let function = CartesianTestFunction::parse(function_text).map_err(|e| invalid(e.to_string()))?;
    let p = match chain {
        ChainTheorem::Lh2Rn => Some(
            args.p
                .ok_or_else(|| invalid("`verify --euclidean --theorem LH2` needs --p"))?,
        ),
        ChainTheorem::Ckn => {
            if let Some(p) = args.p {
                if (p - n as f64).abs() > 1e-9 {
                    return Err(invalid(format!(
                        "CKN runs at the critical exponent p = n; got p = {p} with n = {n}"
                    )));
                }
            }
            Some(n as f64)
        }
    };
    let mc_samples = args.mc_samples.as_deref().map(parse_samples).transpose()?;
    let mut common = resolve_common(args.common)?;
    if mc_samples.is_some() {
        // Resolve the effective seed so the report echoes what the sampler
        // actually used.
        common.seed = Some(common.seed.unwrap_or(0));
    }

    // The Euclidean lane works on ℝⁿ with the Euclidean norm; record the
    // isotropic geometry for the report echo.
    common.weights = vec![1.0; n];
    common.q_dim = n as f64;
    common.norm = QuasiNormKind::Euclidean;
    common.norm_name = "euclidean".into();

    let mut config = RunConfig::from_common(Command::Verify, common);
    config.chain = Some(chain);
    config.p = p;
    config.euclidean = true;
    config.n = Some(n);
    config.function = Some(function);
    config.mc_samples = mc_samples;
    Ok(config)
}

fn resolve_sweep(mut args: SweepArgs) -> Result<RunConfig, ConfigError> {
    let mut file = FileOptions::load(args.common.config.as_ref())?;
    merge_common(&mut file, &mut args.common)?;
    file.fill("family", &mut args.family)?;
    file.fill("theorem", &mut args.theorem)?;
    file.fill("p", &mut args.p)?;
    file.fill("eps", &mut args.eps)?;
    file.finish(Command::Sweep)?;

    let family_text = args
        .family
        .as_deref()
        .ok_or_else(|| invalid("`sweep` needs --family"))?;
    let family = FamilyId::from_key(family_text).ok_or_else(|| {
        let keys: Vec<&str> = FamilyId::ALL.into_iter().map(|f| f.key()).collect();
        invalid(format!(
            "unknown family `{family_text}`; expected one of {}",
            keys.join(", ")
        ))
    })?;
    if let Some(text) = args.theorem.as_deref() {
        let theorem = parse_theorem(text)?;
        if theorem != family.theorem() {
            return Err(invalid(format!(
                "family {} sweeps {}, not {}",
                family.key(),
                family.theorem().key(),
                theorem.key()
            )));
        }
    }
    let common = resolve_common(args.common)?;
    let p = match family {
        FamilyId::Lh2LogPower | FamilyId::ClassicalPower => args
            .p
            .ok_or_else(|| invalid(format!("`sweep --family {}` needs --p", family.key())))?,
        FamilyId::CritLogLogCut | FamilyId::EtLogConc => {
            if let Some(p) = args.p {
                if (p - common.q_dim).abs() > 1e-9 {
                    return Err(invalid(format!(
                        "family {} runs at the critical exponent p = Q; got p = {p} with Q = {}",
                        family.key(),
                        common.q_dim
                    )));
                }
            }
            common.q_dim
        }
    };
    let eps = args
        .eps
        .as_deref()
        .map(|text| parse_f64_list(text, "eps"))
        .transpose()?
        .unwrap_or_else(|| default_epsilon_grid(family));

    let mut config = RunConfig::from_common(Command::Sweep, common);
    config.family = Some(family);
    config.theorem = Some(family.theorem());
    config.p = Some(p);
    config.eps = Some(eps);
    Ok(config)
}

fn resolve_remainder(mut args: RemainderArgs) -> Result<RunConfig, ConfigError> {
    let mut file = FileOptions::load(args.common.config.as_ref())?;
    merge_common(&mut file, &mut args.common)?;
    file.fill("p", &mut args.p)?;
    file.fill("profile", &mut args.profile)?;
    file.finish(Command::Remainder)?;

    let p = args.p.ok_or_else(|| invalid("`remainder` needs --p"))?;
    if !(p.is_finite() && p > 1.0) {
        return Err(invalid(format!(
            "the remainder identity needs p > 1, got {p}"
        )));
    }
    let profile_text = args
        .profile
        .as_deref()
        .ok_or_else(|| invalid("`remainder` needs --profile"))?;
    let profile = Profile::parse(profile_text).map_err(|e| invalid(e.to_string()))?;
    let common = resolve_common(args.common)?;

    let mut config = RunConfig::from_common(Command::Remainder, common);
    config.theorem = Some(TheoremId::EqRem);
    config.p = Some(p);
    config.profile = Some(profile);
    Ok(config)
}

fn resolve_suite(mut args: SuiteArgs) -> Result<RunConfig, ConfigError> {
    let mut file = FileOptions::load(args.common.config.as_ref())?;
    merge_common(&mut file, &mut args.common)?;
    file.finish(Command::Suite)?;
    let common = resolve_common(args.common)?;
    Ok(RunConfig::from_common(Command::Suite, common))
}

/// Resolves parsed flags (plus any config file) into a validated [`RunConfig`].
pub fn load(cli: Cli) -> Result<RunConfig, ConfigError> {
    match cli.command {
        CommandArgs::Verify(args) => resolve_verify(args),
        CommandArgs::Sweep(args) => resolve_sweep(args),
        CommandArgs::Remainder(args) => resolve_remainder(args),
        CommandArgs::Suite(args) => resolve_suite(args),
    }
}
