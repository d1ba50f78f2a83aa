//! Near-extremal test families and ratio sweeps.
//!
//! Each sharp constant in the suite is exercised by a parametrized family of
//! smooth, compactly supported profiles whose verification ratio approaches 1
//! as the family parameter `ε` decreases. A family member is always an
//! extremal *core* shape — the function that would turn the inequality into
//! an equality if it were admissible — multiplied by a `C^∞` plateau window
//! ([`PlateauWindow`]) in the coordinate where the core's contribution is
//! translation-invariant:
//!
//! * [`FamilyId::Lh2LogPower`] — core `(log(R/r))^{(p−1)/p}` windowed in
//!   `τ = log log(R/r)`, for the critical Hardy constant `p/(p−1)`;
//! * [`FamilyId::CritLogLogCut`] — core `(log(1/r))^{−1/Q}·log(1/r)`-type
//!   accumulation windowed in `τ = log log(1/r)`, for the `Q^Q` ball
//!   inequality;
//! * [`FamilyId::ClassicalPower`] — core `r^{−(Q−p)/p + δ}` windowed in
//!   `t = log(1/r)`, for the subcritical constant `p/(Q−p)`;
//! * [`FamilyId::EtLogConc`] — core `(1+log(1/r))^{(n−1)/n}` windowed in
//!   `τ = log(1+log(1/r))`, for the `n/(n−1)` inequality on the unit ball.
//!
//! Window parameters are pinned so that every member stays inside f64 range
//! end to end (deepest radii above `e^{−700}`, amplitudes keeping `|g′|`
//! finite); the constructions therefore *approach* the constants without the
//! quadrature ever leaving verified territory. Ratios come straight from the
//! corresponding [`suite`](crate::suite) verifier, so a sweep exercises the
//! same code path as any other case.

use rayon::prelude::*;

use crate::group::{GroupError, GroupSpec, QuasiNormKind, QuasiNormSpec};
use crate::profile::{PlateauWindow, Profile};
use crate::quad::QuadratureSpec;
use crate::suite::{verify_case, CaseError, InequalityCase, TheoremId, VerificationResult};

/// Identifier of a near-extremal family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyId {
    /// Log-power profiles saturating the critical Hardy constant `p/(p−1)`.
    Lh2LogPower,
    /// Smooth log-cutoffs saturating the `Q^Q` critical ball inequality.
    CritLogLogCut,
    /// Regularised power cores saturating the subcritical constant `p/(Q−p)`.
    ClassicalPower,
    /// Log-concentration profiles for the `n/(n−1)` unit-ball inequality.
    EtLogConc,
}

impl FamilyId {
    /// All families, in reporting order.
    pub const ALL: [FamilyId; 4] = [
        FamilyId::Lh2LogPower,
        FamilyId::CritLogLogCut,
        FamilyId::ClassicalPower,
        FamilyId::EtLogConc,
    ];

    /// Stable identifier used in reports.
    pub fn key(self) -> &'static str {
        match self {
            FamilyId::Lh2LogPower => "LH2_LOGPOWER",
            FamilyId::CritLogLogCut => "CRITLOG_LOGCUT",
            FamilyId::ClassicalPower => "CLASSICAL_POWER",
            FamilyId::EtLogConc => "ET_LOGCONC",
        }
    }

    /// Short lowercase alias (CLI flag value).
    pub fn alias(self) -> &'static str {
        match self {
            FamilyId::Lh2LogPower => "logpower",
            FamilyId::CritLogLogCut => "logcut",
            FamilyId::ClassicalPower => "power",
            FamilyId::EtLogConc => "logconc",
        }
    }

    /// The theorem whose constant the family saturates.
    pub fn theorem(self) -> TheoremId {
        match self {
            FamilyId::Lh2LogPower => TheoremId::Lh2,
            FamilyId::CritLogLogCut => TheoremId::CritLog,
            FamilyId::ClassicalPower => TheoremId::ClassicalLp,
            FamilyId::EtLogConc => TheoremId::EdmundsTriebel,
        }
    }

    /// Accepts both the report key and the CLI alias, case-insensitively.
    pub fn from_key(key: &str) -> Option<FamilyId> {
        let lower = key.to_ascii_lowercase();
        FamilyId::ALL
            .into_iter()
            .find(|f| f.key().eq_ignore_ascii_case(key) || f.alias() == lower)
    }
}

impl std::fmt::Display for FamilyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

impl std::str::FromStr for FamilyId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyId::from_key(s).ok_or_else(|| format!("unknown family id: {s}"))
    }
}

/// Base parameters shared by family members (`ε` varies per member).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    /// Integrability exponent. Ignored by families whose theorem pins it
    /// (`CRITLOG_LOGCUT` and `ET_LOGCONC` run at `p = Q`).
    pub p: f64,
    /// Homogeneous dimension.
    pub q_dim: f64,
    /// Anchor radius. Pinned to 1 for `CLASSICAL_POWER` / `ET_LOGCONC`.
    pub big_r: f64,
}

/// A validated family: id, parameters, a strictly decreasing `ε` grid, and
/// the constant under test.
#[derive(Debug, Clone)]
pub struct TestFamily {
    family: FamilyId,
    params: FamilyParams,
    epsilon_grid: Vec<f64>,
    constant: f64,
}

/// Default `ε` grid per family: the published acceptance grid.
pub fn default_epsilon_grid(family: FamilyId) -> Vec<f64> {
    match family {
        FamilyId::ClassicalPower => vec![0.1, 0.05, 0.02, 0.01],
        _ => vec![0.1, 0.03, 0.01, 0.003],
    }
}

impl TestFamily {
    /// Validates parameters and the `ε` grid (strictly decreasing, inside
    /// `(0, 0.5)`) against the target theorem's preconditions.
    pub fn new(
        family: FamilyId,
        mut params: FamilyParams,
        epsilon_grid: Vec<f64>,
    ) -> Result<Self, CaseError> {
        if epsilon_grid.is_empty() {
            return Err(CaseError::Parameter("empty ε grid".into()));
        }
        for window in epsilon_grid.windows(2) {
            if !(window[1] < window[0]) {
                return Err(CaseError::Parameter(format!(
                    "ε grid must be strictly decreasing, got {} before {}",
                    window[0], window[1]
                )));
            }
        }
        for &eps in &epsilon_grid {
            if !(eps > 0.0 && eps < 0.5) {
                return Err(CaseError::Parameter(format!(
                    "ε grid entries must lie in (0, 0.5), got {eps}"
                )));
            }
        }
        let FamilyParams { p, q_dim, big_r } = params;
        if !(q_dim.is_finite() && q_dim >= 1.0) {
            return Err(CaseError::Parameter(format!(
                "family needs homogeneous dimension Q ≥ 1, got {q_dim}"
            )));
        }
        let constant = match family {
            FamilyId::Lh2LogPower => {
                if !(p.is_finite() && p > 1.0) {
                    return Err(CaseError::Parameter(format!(
                        "LH2_LOGPOWER needs p > 1, got {p}"
                    )));
                }
                if !(big_r.is_finite() && big_r > 0.0) {
                    return Err(CaseError::Parameter(format!(
                        "LH2_LOGPOWER needs R > 0, got {big_r}"
                    )));
                }
                p / (p - 1.0)
            }
            FamilyId::CritLogLogCut => {
                if q_dim <= 1.0 {
                    return Err(CaseError::Parameter(format!(
                        "CRITLOG_LOGCUT needs Q > 1, got {q_dim}"
                    )));
                }
                if !(big_r.is_finite() && big_r >= 1.0) {
                    return Err(CaseError::Parameter(format!(
                        "CRITLOG_LOGCUT members live just inside the unit sphere; \
                         need R ≥ 1, got {big_r}"
                    )));
                }
                params.p = q_dim;
                q_dim.powf(q_dim)
            }
            FamilyId::ClassicalPower => {
                if !(p.is_finite() && p > 1.0 && p < q_dim) {
                    return Err(CaseError::Parameter(format!(
                        "CLASSICAL_POWER needs 1 < p < Q, got p = {p}, Q = {q_dim}"
                    )));
                }
                params.big_r = 1.0;
                p / (q_dim - p)
            }
            FamilyId::EtLogConc => {
                if !(q_dim >= 2.0 && q_dim.fract() == 0.0) {
                    return Err(CaseError::Parameter(format!(
                        "ET_LOGCONC needs integer dimension n ≥ 2, got {q_dim}"
                    )));
                }
                params.p = q_dim;
                params.big_r = 1.0;
                q_dim / (q_dim - 1.0)
            }
        };
        Ok(TestFamily { family, params, epsilon_grid, constant })
    }

    /// Family identifier.
    pub fn family(&self) -> FamilyId {
        self.family
    }

    /// Normalised parameters (pinned values applied).
    pub fn params(&self) -> FamilyParams {
        self.params
    }

    /// The `ε` grid.
    pub fn epsilon_grid(&self) -> &[f64] {
        &self.epsilon_grid
    }

    /// The constant under test (e.g. `p/(p−1)` for the critical family).
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Builds the member profile at a given `ε`.
    ///
    /// Every construction windows the extremal core in the coordinate where
    /// its contribution density is flat, with segment lengths capped so the
    /// profile, its derivative, and all integrands stay inside f64 range.
    pub fn member(&self, eps: f64) -> Result<Profile, CaseError> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(CaseError::Parameter(format!(
                "member parameter must lie in (0, 0.5), got {eps}"
            )));
        }
        let FamilyParams { p, q_dim, big_r } = self.params;
        let profile = match self.family {
            FamilyId::Lh2LogPower => {
                // Core s^{(p−1)/p}, s = log(R/r), windowed in τ = log s over
                // s ∈ [~ε³, log(1/ε)]; rise/fall lengths capped so the
                // innermost radius stays above R·e^{−650} and the outer edge
                // below R (support strictly inside (0, R)).
                let beta = (p - 1.0) / p;
                let s_big = (1.0 / eps).ln();
                let s_small = (eps * eps * eps).max(1e-11);
                let k1 = (s_small / 3e-14).ln().min(10.0);
                let k2 = (650.0 / s_big).ln().min(6.5);
                let window =
                    PlateauWindow::new(s_small.ln() - k1, k1, (s_big / s_small).ln(), k2)?;
                Profile::LogHardyCore {
                    big_r,
                    beta,
                    window,
                    label: format!("lh2core:p={p},eps={eps}"),
                }
            }
            FamilyId::CritLogLogCut => {
                // Accumulating core in t = log(1/r), windowed in τ = log t
                // over t ∈ [~ε⁴, 680·e⁻⁶]; the upper cap keeps the deepest
                // radius at e^{−680} and the fall length 6 keeps the
                // integrand's effective support inside f64 range.
                let t_small = (eps * eps * eps * eps).max(1e-11);
                let k1 = (t_small / 2e-13).ln().min(7.0);
                let t_cap = 680.0 * (-6.0_f64).exp();
                let window =
                    PlateauWindow::new(t_small.ln() - k1, k1, (t_cap / t_small).ln(), 6.0)?;
                Profile::LogAccumCore {
                    q_dim,
                    window,
                    label: format!("logcut:Q={q_dim},eps={eps}"),
                }
            }
            FamilyId::ClassicalPower => {
                // Core r^{−(γ−δ)} with γ = (Q−p)/p and δ = γε, windowed
                // directly in t = log(1/r). The plateau length T balances the
                // taper cost ~1/(pδT) against the f64 budget: amplitudes and
                // |g′| stay below e^{670} at the deepest radius e^{−(T+K)}.
                let gamma = (q_dim - p) / p;
                let delta = gamma * eps;
                let budget = 670.0 + 650.0 / p;
                let t_len =
                    (6.0 / (p * delta)).min(budget / (1.25 * (gamma - delta + 1.0)));
                let k = (t_len / 4.0).max(5.0);
                let window = PlateauWindow::new(-k, k, t_len, k)?;
                let amplitude_log =
                    (670.0 - (gamma - delta + 1.0) * (t_len + k)).min(0.0);
                Profile::PowerCore {
                    exponent: gamma - delta,
                    amplitude_log,
                    window,
                    label: format!("powercore:p={p},Q={q_dim},eps={eps}"),
                }
            }
            FamilyId::EtLogConc => {
                // Core s^{(n−1)/n}, s = 1 + log(1/r) ≥ 1, windowed in
                // τ = log s over s ∈ [1, min(ε⁻², 600)]; the cap keeps the
                // deepest radius at e^{−599}.
                let t_max = (1.0 / (eps * eps)).min(600.0);
                let t_total = t_max.ln();
                let window =
                    PlateauWindow::new(1e-9, 0.45 * t_total, 0.1 * t_total, 0.45 * t_total)?;
                Profile::BallLogCore {
                    beta: (q_dim - 1.0) / q_dim,
                    window,
                    label: format!("balllog:n={q_dim},eps={eps}"),
                }
            }
        };
        Ok(profile)
    }

    /// The verification case for one member.
    pub fn case(&self, eps: f64) -> Result<InequalityCase, CaseError> {
        let profile = self.member(eps)?;
        let (group, norm) = group_for_dimension(self.params.q_dim)?;
        Ok(InequalityCase {
            theorem: self.family.theorem(),
            group,
            norm,
            p: self.params.p,
            big_r: self.params.big_r,
            profile,
        })
    }
}

/// A homogeneous structure with the requested dimension: `Q` unit weights
/// when the dimension is integral (so isotropic-only theorems stay in
/// reach), a single coordinate of weight `Q` otherwise (the radial
/// reductions only read the total dimension).
fn group_for_dimension(q_dim: f64) -> Result<(GroupSpec, QuasiNormSpec), GroupError> {
    let group = if q_dim.fract() == 0.0 && q_dim <= 64.0 {
        GroupSpec::make_group(&vec![1.0; q_dim as usize])?
    } else {
        GroupSpec::make_group(&[q_dim])?
    };
    let norm = QuasiNormSpec::new(QuasiNormKind::WeightedMax, &group)?;
    Ok((group, norm))
}

/// One sweep member: the `ε` value and either the verification outcome or a
/// rendered error (quadrature failure on an extreme member does not abort
/// the remaining grid).
#[derive(Debug, Clone)]
pub struct SweepEntry {
    /// Family parameter of this member.
    pub eps: f64,
    /// Verification outcome, or the error that prevented one.
    pub outcome: Result<VerificationResult, String>,
}

impl SweepEntry {
    /// The ratio, when the member verified.
    pub fn ratio(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|r| r.ratio)
    }
}

/// Aggregated sweep outcome, ordered by the `ε` grid.
#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Family that was swept.
    pub family: FamilyId,
    /// Theorem the ratios refer to.
    pub theorem: TheoremId,
    /// Normalised family parameters.
    pub params: FamilyParams,
    /// Constant under test.
    pub constant: f64,
    /// Per-`ε` outcomes, in grid order.
    pub entries: Vec<SweepEntry>,
    /// Largest ratio across successful members (`None` if all failed).
    pub max_ratio: Option<f64>,
    /// Ratio of the smallest-`ε` member, when it verified.
    pub final_ratio: Option<f64>,
    /// Whether every member verified.
    pub complete: bool,
    /// Whether the ratios over the last three grid entries are nondecreasing
    /// to within `1e−4`. Purely informational: the theorems claim
    /// convergence of the supremum, not monotonicity of this particular
    /// family, so a `false` here is a warning and not a failure.
    pub tail_nondecreasing: bool,
}

/// Sweeps a family over its `ε` grid. Members are evaluated concurrently;
/// aggregation is ordered by the grid, so results are deterministic. Member
/// failures are recorded per entry rather than aborting the sweep.
pub fn sweep(family: &TestFamily, spec: &QuadratureSpec, tol_margin: f64) -> SweepResult {
    let entries: Vec<SweepEntry> = family
        .epsilon_grid
        .par_iter()
        .map(|&eps| {
            let outcome = family
                .case(eps)
                .and_then(|case| verify_case(&case, spec, tol_margin))
                .map_err(|e| e.to_string());
            SweepEntry { eps, outcome }
        })
        .collect();

    let ratios: Vec<Option<f64>> = entries.iter().map(SweepEntry::ratio).collect();
    let max_ratio = ratios.iter().flatten().copied().fold(None, |acc: Option<f64>, r| {
        Some(acc.map_or(r, |m| m.max(r)))
    });
    let final_ratio = ratios.last().copied().flatten();
    let complete = entries.iter().all(|e| e.outcome.is_ok());
    let tail = &ratios[ratios.len().saturating_sub(3)..];
    let tail_nondecreasing = tail.windows(2).all(|w| match (w[0], w[1]) {
        (Some(a), Some(b)) => b >= a - 1e-4,
        _ => false,
    }) || tail.len() < 2;

    SweepResult {
        family: family.family,
        theorem: family.family.theorem(),
        params: family.params,
        constant: family.constant,
        entries,
        max_ratio,
        final_ratio,
        complete,
        tail_nondecreasing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(id: FamilyId, p: f64, q_dim: f64) -> TestFamily {
        TestFamily::new(
            id,
            FamilyParams { p, q_dim, big_r: 1.0 },
            default_epsilon_grid(id),
        )
        .unwrap()
    }

    #[test]
    fn family_ids_round_trip() {
        for f in FamilyId::ALL {
            assert_eq!(FamilyId::from_key(f.key()), Some(f));
            assert_eq!(FamilyId::from_key(f.alias()), Some(f));
        }
        assert_eq!(FamilyId::from_key("nope"), None);
    }

    #[test]
    fn epsilon_grid_is_validated() {
        let params = FamilyParams { p: 2.0, q_dim: 3.0, big_r: 1.0 };
        let increasing = TestFamily::new(FamilyId::Lh2LogPower, params, vec![0.01, 0.1]);
        assert!(increasing.is_err());
        let out_of_range = TestFamily::new(FamilyId::Lh2LogPower, params, vec![0.6, 0.1]);
        assert!(out_of_range.is_err());
        let empty = TestFamily::new(FamilyId::Lh2LogPower, params, vec![]);
        assert!(empty.is_err());
    }

    #[test]
    fn parameter_preconditions_are_enforced() {
        let grid = vec![0.1, 0.01];
        // Subcritical family needs p < Q.
        assert!(TestFamily::new(
            FamilyId::ClassicalPower,
            FamilyParams { p: 3.0, q_dim: 2.0, big_r: 1.0 },
            grid.clone(),
        )
        .is_err());
        // Unit-ball family needs integer dimension.
        assert!(TestFamily::new(
            FamilyId::EtLogConc,
            FamilyParams { p: 2.5, q_dim: 2.5, big_r: 1.0 },
            grid.clone(),
        )
        .is_err());
        // Log-cut members need the ball to contain the unit sphere shell.
        assert!(TestFamily::new(
            FamilyId::CritLogLogCut,
            FamilyParams { p: 2.0, q_dim: 2.0, big_r: 0.5 },
            grid,
        )
        .is_err());
    }

    #[test]
    fn members_are_valid_profiles_with_contained_support() {
        for id in FamilyId::ALL {
            let (p, q) = match id {
                FamilyId::ClassicalPower => (2.0, 4.0),
                _ => (2.0, 2.0),
            };
            let fam = family(id, p, q);
            for &eps in fam.epsilon_grid() {
                let profile = fam.member(eps).unwrap();
                let (a, b) = profile.support();
                assert!(a > 0.0 && a < b, "support [{a}, {b}] for {id} at ε = {eps}");
                match id {
                    FamilyId::Lh2LogPower | FamilyId::CritLogLogCut => {
                        assert!(b < fam.params().big_r, "support must avoid R for {id}");
                    }
                    FamilyId::EtLogConc => assert!(b < 1.0),
                    FamilyId::ClassicalPower => {}
                }
                assert!(a > f64::MIN_POSITIVE, "deepest radius in range for {id}");
            }
        }
    }

    #[test]
    fn lh2_family_ratio_rises_towards_one() {
        let fam = family(FamilyId::Lh2LogPower, 2.0, 2.0);
        let result = sweep(&fam, &QuadratureSpec::default(), 1e-6);
        assert!(result.complete, "entries: {:?}", result.entries);
        let ratios: Vec<f64> = result.entries.iter().filter_map(SweepEntry::ratio).collect();
        assert!(ratios.windows(2).all(|w| w[1] > w[0]), "ratios {ratios:?}");
        let max = result.max_ratio.unwrap();
        assert!(max <= 1.0 + 1e-6, "ceiling violated: {max}");
        assert!(result.final_ratio.unwrap() > 0.95);
        assert!(result.tail_nondecreasing);
    }
}
