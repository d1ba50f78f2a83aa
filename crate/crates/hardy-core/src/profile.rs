//! Radial test profiles `g(r)` on `(0, ∞)` with exact analytic derivatives.
//!
//! Every profile is compactly supported, smooth, and vanishes (together with
//! `g′`) at both support edges. Values are complex so that amplitude
//! homogeneity of the verifiers can be exercised with complex constants;
//! real profiles simply have zero imaginary part everywhere.
//!
//! Besides the hand-picked registry shapes (`bump`, `polybump`, `powerlaw`,
//! `logpower`) the enum carries the near-extremal core shapes used by the
//! sharpness families. Those are built from a common ingredient: a `C^∞`
//! plateau window `m(τ)` in a logarithmic coordinate `τ`, assembled from the
//! classic `exp(−1/x)`-style smoothstep. The window rises from exactly 0 to
//! exactly 1, stays flat, and falls back to exactly 0, so supports are exact
//! and no clipping is needed anywhere.

use num_complex::Complex64;
use thiserror::Error;

/// Complex profile value.
pub type C64 = Complex64;

/// Errors from constructing or sampling profiles.
#[derive(Debug, Error)]
pub enum ProfileError {
    /// Parameters violate a profile's constraints.
    #[error("invalid profile parameters: {0}")]
    BadParameters(String),
    /// A textual profile description could not be parsed.
    #[error("cannot parse profile {input:?}: {reason}")]
    Parse { input: String, reason: String },
    /// A radial coordinate or step outside the valid domain.
    #[error("domain error: {0}")]
    Domain(String),
}

// ---------------------------------------------------------------------------
// Smoothstep and plateau windows
// ---------------------------------------------------------------------------

/// `C^∞` monotone step: exactly 0 for `x ≤ 0`, exactly 1 for `x ≥ 1`.
///
/// Uses `σ(x) = 1 / (1 + exp(1/x − 1/(1−x)))`, which is symmetric about
/// `x = 1/2` and has all one-sided derivatives vanishing at both ends.
pub fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let w = 1.0 / x - 1.0 / (1.0 - x);
        1.0 / (1.0 + w.exp())
    }
}

/// Smoothstep together with its derivative, both evaluated stably.
///
/// The derivative is `(1/x² + 1/(1−x)²) · u/(1+u)²` with `u = exp(−|w|)`,
/// which underflows harmlessly to 0 near the ends instead of producing
/// `∞ · 0`.
pub fn smoothstep_with_derivative(x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0);
    }
    let w = 1.0 / x - 1.0 / (1.0 - x);
    if w.abs() > 700.0 {
        // u = exp(−|w|) underflows; value is an exact 0 or 1 to working
        // precision and the derivative is below 1e−290.
        return (if w > 0.0 { 0.0 } else { 1.0 }, 0.0);
    }
    let u = (-w.abs()).exp();
    let value = if w > 0.0 { u / (1.0 + u) } else { 1.0 / (1.0 + u) };
    let slope = (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x))) * u
        / ((1.0 + u) * (1.0 + u));
    (value, slope)
}

/// A rise–plateau–fall window in a scalar coordinate `τ`.
///
/// `m` rises from 0 to 1 over `[t0, t0 + k1]`, is identically 1 on
/// `[t0 + k1, t0 + k1 + lam]`, and falls back to 0 over the final `k2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateauWindow {
    pub t0: f64,
    pub k1: f64,
    pub lam: f64,
    pub k2: f64,
}

impl PlateauWindow {
    /// Builds a window, requiring positive segment lengths.
    pub fn new(t0: f64, k1: f64, lam: f64, k2: f64) -> Result<Self, ProfileError> {
        if !(t0.is_finite() && k1 > 0.0 && lam > 0.0 && k2 > 0.0) {
            return Err(ProfileError::BadParameters(format!(
                "plateau window needs finite t0 and positive segments, got \
                 t0 = {t0}, k1 = {k1}, lam = {lam}, k2 = {k2}"
            )));
        }
        Ok(Self { t0, k1, lam, k2 })
    }

    /// Total support of the window in `τ`.
    pub fn tau_support(&self) -> (f64, f64) {
        (self.t0, self.t0 + self.k1 + self.lam + self.k2)
    }

    /// Window value and `dm/dτ`.
    pub fn eval(&self, tau: f64) -> (f64, f64) {
        let end = self.t0 + self.k1 + self.lam + self.k2;
        let (up, dup) = smoothstep_with_derivative((tau - self.t0) / self.k1);
        let (down, ddown) = smoothstep_with_derivative((end - tau) / self.k2);
        (up * down, dup * down / self.k1 - up * ddown / self.k2)
    }
}

/// `log(anchor/r)` computed without cancellation for `r` near `anchor`.
pub(crate) fn log_anchor_ratio(anchor: f64, r: f64) -> f64 {
    if r > 0.5 * anchor {
        -((r - anchor) / anchor).ln_1p()
    } else {
        (anchor / r).ln()
    }
}

/// Shared shape of the log-scale cores: value `s^β·m(log s)` and the
/// `s`-slope `−s^{β−1}·(β·m + m′(log s))`; the radial derivative is the
/// slope divided by `r`. Guards keep `0·∞` out when `m` vanishes and `β` is
/// negative.
fn plateau_power_pair(beta: f64, window: &PlateauWindow, s: f64) -> (f64, f64) {
    if s <= 0.0 {
        return (0.0, 0.0);
    }
    let (m, md) = window.eval(s.ln());
    let value = if m == 0.0 { 0.0 } else { s.powf(beta) * m };
    let slope =
        if m == 0.0 && md == 0.0 { 0.0 } else { -s.powf(beta - 1.0) * (beta * m + md) };
    (value, slope)
}

/// Shared shape of the power-amplitude core: value `e^{c₀+c₁t}·M(t)` and the
/// `t`-slope `−e^{c₀+c₁t}·(c₁·M + M′)`; the radial derivative is the slope
/// divided by `r`.
fn power_core_pair(
    exponent: f64,
    amplitude_log: f64,
    window: &PlateauWindow,
    t: f64,
) -> (f64, f64) {
    let (m, md) = window.eval(t);
    if m == 0.0 && md == 0.0 {
        return (0.0, 0.0);
    }
    let amp = (amplitude_log + exponent * t).exp();
    (amp * m, -amp * (exponent * m + md))
}

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

/// A compactly supported radial test profile.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// The zero function (support reported as `(0.25, 0.75)` by convention).
    Zero,
    /// `exp(−1/((r−a)(b−r)))` on `(a, b)`, 0 outside.
    Bump { a: f64, b: f64 },
    /// `((r−a)(b−r))^k` on `(a, b)`, 0 outside; `k ≥ 1`.
    PolyBump { a: f64, b: f64, k: u32 },
    /// `r^α` with smoothstep cutoffs of width `(b−a)/8` inside `[a, b]`.
    PowerLaw { alpha: f64, a: f64, b: f64 },
    /// `(log(R/r))^β` on `[a, b] ⊂ (0, R)` with `C^∞` cutoffs over the first
    /// and last quarter of the range of `τ = log log(R/r)`.
    LogPower { beta: f64, a: f64, b: f64, big_r: f64 },
    /// `s^β · m(log s)` with `s = log(R/r)`: the log-power core with a
    /// plateau window in doubly logarithmic coordinates. Near-extremal for
    /// the critical-weight Hardy inequality.
    LogHardyCore { big_r: f64, beta: f64, window: PlateauWindow, label: String },
    /// `t^{−1/Q} · m(log t)` with `t = log(1/r)`: the log-accumulating core
    /// that saturates the `Q^Q` ball inequality.
    LogAccumCore { q_dim: f64, window: PlateauWindow, label: String },
    /// `exp(c₀ + c₁·t) · M(t)` with `t = log(1/r)`: the power-law core
    /// `A·r^{−c₁}` with tapers directly in `t`. Near-extremal for the
    /// subcritical Hardy inequality.
    PowerCore { exponent: f64, amplitude_log: f64, window: PlateauWindow, label: String },
    /// `s^β · m(log s)` with `s = 1 + log(1/r)` on the unit ball.
    BallLogCore { beta: f64, window: PlateauWindow, label: String },
    /// Dilated profile `r ↦ g(λ r)`.
    Scaled { inner: Box<Profile>, lambda: f64 },
    /// Constant complex multiple `c · g`.
    Amplified { inner: Box<Profile>, factor: C64 },
}

impl Profile {
    /// Builds the `exp(−1/((r−a)(b−r)))` bump.
    pub fn bump(a: f64, b: f64) -> Result<Self, ProfileError> {
        check_interval(a, b)?;
        Ok(Profile::Bump { a, b })
    }

    /// Builds the polynomial bump `((r−a)(b−r))^k`.
    pub fn polybump(a: f64, b: f64, k: u32) -> Result<Self, ProfileError> {
        check_interval(a, b)?;
        if k < 1 {
            return Err(ProfileError::BadParameters("polybump needs k ≥ 1".into()));
        }
        Ok(Profile::PolyBump { a, b, k })
    }

    /// Builds the cut power law `r^α`, smoothly windowed to `[a, b]` by
    /// bump-based cutoffs whose ramps each occupy an eighth of the window's
    /// logarithmic width.
    pub fn powerlaw(alpha: f64, a: f64, b: f64) -> Result<Self, ProfileError> {
        check_interval(a, b)?;
        if !alpha.is_finite() {
            return Err(ProfileError::BadParameters("powerlaw needs finite α".into()));
        }
        Ok(Profile::PowerLaw { alpha, a, b })
    }

    /// Builds the cut logarithmic power `(log(R/r))^β` on `[a, b] ⊂ (0, R)`.
    pub fn logpower(beta: f64, a: f64, b: f64, big_r: f64) -> Result<Self, ProfileError> {
        check_interval(a, b)?;
        if !(big_r.is_finite() && big_r > b) {
            return Err(ProfileError::BadParameters(format!(
                "logpower needs b < R, got b = {b}, R = {big_r}"
            )));
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(ProfileError::BadParameters("logpower needs β > 0".into()));
        }
        Ok(Profile::LogPower { beta, a, b, big_r })
    }

    /// Dilation combinator `g(λ r)`.
    pub fn scaled(self, lambda: f64) -> Result<Self, ProfileError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(ProfileError::BadParameters(format!(
                "scaling factor must be positive, got {lambda}"
            )));
        }
        Ok(Profile::Scaled { inner: Box::new(self), lambda })
    }

    /// Amplitude combinator `c · g` with a complex constant.
    pub fn amplified(self, factor: C64) -> Self {
        Profile::Amplified { inner: Box::new(self), factor }
    }

    /// Support interval `(a, b)`; the profile vanishes identically outside,
    /// and `g` together with `g′` tends to 0 at both edges.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Profile::Zero => (0.25, 0.75),
            Profile::Bump { a, b } | Profile::PolyBump { a, b, .. } => (*a, *b),
            Profile::PowerLaw { a, b, .. } => (*a, *b),
            Profile::LogPower { a, b, .. } => (*a, *b),
            Profile::LogHardyCore { big_r, window, .. } => {
                let (t_lo, t_hi) = window.tau_support();
                (big_r * (-t_hi.exp()).exp(), big_r * (-t_lo.exp()).exp())
            }
            Profile::LogAccumCore { window, .. } => {
                let (t_lo, t_hi) = window.tau_support();
                ((-t_hi.exp()).exp(), (-t_lo.exp()).exp())
            }
            Profile::PowerCore { window, .. } => {
                let (t_lo, t_hi) = window.tau_support();
                ((-t_hi).exp(), (-t_lo).exp())
            }
            Profile::BallLogCore { window, .. } => {
                let (t_lo, t_hi) = window.tau_support();
                ((1.0 - t_hi.exp()).exp(), (1.0 - t_lo.exp()).exp())
            }
            Profile::Scaled { inner, lambda } => {
                let (a, b) = inner.support();
                (a / lambda, b / lambda)
            }
            Profile::Amplified { inner, .. } => inner.support(),
        }
    }

    /// Whether the profile takes genuinely complex values.
    pub fn is_complex(&self) -> bool {
        match self {
            Profile::Amplified { inner, factor } => factor.im != 0.0 || inner.is_complex(),
            Profile::Scaled { inner, .. } => inner.is_complex(),
            _ => false,
        }
    }

    /// Profile value `g(r)`.
    pub fn g(&self, r: f64) -> C64 {
        match self {
            Profile::Zero => C64::ZERO,
            Profile::Bump { a, b } => {
                if r <= *a || r >= *b {
                    return C64::ZERO;
                }
                let u = (r - a) * (b - r);
                let e = 1.0 / u;
                if e > 700.0 {
                    return C64::ZERO;
                }
                C64::new((-e).exp(), 0.0)
            }
            Profile::PolyBump { a, b, k } => {
                if r <= *a || r >= *b {
                    return C64::ZERO;
                }
                let u = (r - a) * (b - r);
                C64::new(u.powi(*k as i32), 0.0)
            }
            Profile::PowerLaw { alpha, a, b } => {
                if r <= *a || r >= *b {
                    return C64::ZERO;
                }
                // Cutoff ramps live on the logarithmic scale (an eighth of
                // the log-width each) so that wide windows keep a plateau
                // spanning most of their decades.
                let w = (b / a).ln() / 8.0;
                let c1 = smoothstep((r / a).ln() / w);
                let c2 = smoothstep((b / r).ln() / w);
                C64::new(r.powf(*alpha) * c1 * c2, 0.0)
            }
            Profile::LogPower { beta, a, b, big_r } => {
                if r <= *a || r >= *b {
                    return C64::ZERO;
                }
                let s = log_anchor_ratio(*big_r, r);
                let (m, _) = logpower_window(*a, *b, *big_r).eval(s.ln());
                C64::new(s.powf(*beta) * m, 0.0)
            }
            Profile::LogHardyCore { big_r, beta, window, .. } => {
                let s = log_anchor_ratio(*big_r, r);
                C64::new(plateau_power_pair(*beta, window, s).0, 0.0)
            }
            Profile::LogAccumCore { q_dim, window, .. } => {
                let t = log_anchor_ratio(1.0, r);
                C64::new(plateau_power_pair(-1.0 / q_dim, window, t).0, 0.0)
            }
            Profile::PowerCore { exponent, amplitude_log, window, .. } => {
                let t = log_anchor_ratio(1.0, r);
                C64::new(power_core_pair(*exponent, *amplitude_log, window, t).0, 0.0)
            }
            Profile::BallLogCore { beta, window, .. } => {
                let s = 1.0 + log_anchor_ratio(1.0, r);
                C64::new(plateau_power_pair(*beta, window, s).0, 0.0)
            }
            Profile::Scaled { inner, lambda } => inner.g(lambda * r),
            Profile::Amplified { inner, factor } => factor * inner.g(r),
        }
    }

    /// [`Profile::g`] with the log coordinate `w = log(anchor/r)` supplied
    /// by the caller (normally the quadrature engine's own integration
    /// variable, see `integrate_radial_with_log`). The log-scale cores use
    /// `w` directly when `anchor` matches their native anchor; recovering
    /// the coordinate from `r` instead quantises it at one ulp of `log r`
    /// absolute, which destroys the members whose structure starts at
    /// depths of `1e−11` below the anchor. Other shapes ignore `w`.
    pub fn g_log(&self, r: f64, anchor: f64, w: f64) -> C64 {
        match self {
            Profile::LogHardyCore { big_r, beta, window, .. } if *big_r == anchor => {
                C64::new(plateau_power_pair(*beta, window, w).0, 0.0)
            }
            Profile::LogAccumCore { q_dim, window, .. } if anchor == 1.0 => {
                C64::new(plateau_power_pair(-1.0 / q_dim, window, w).0, 0.0)
            }
            Profile::PowerCore { exponent, amplitude_log, window, .. } if anchor == 1.0 => {
                C64::new(power_core_pair(*exponent, *amplitude_log, window, w).0, 0.0)
            }
            Profile::BallLogCore { beta, window, .. } if anchor == 1.0 => {
                C64::new(plateau_power_pair(*beta, window, 1.0 + w).0, 0.0)
            }
            // g_λ(r) = g(λr): the same depth below the rescaled anchor.
            Profile::Scaled { inner, lambda } => inner.g_log(lambda * r, lambda * anchor, w),
            Profile::Amplified { inner, factor } => factor * inner.g_log(r, anchor, w),
            _ => self.g(r),
        }
    }

    /// [`Profile::dg`] with the log coordinate supplied by the caller; see
    /// [`Profile::g_log`].
    pub fn dg_log(&self, r: f64, anchor: f64, w: f64) -> C64 {
        match self {
            Profile::LogHardyCore { big_r, beta, window, .. } if *big_r == anchor => {
                C64::new(plateau_power_pair(*beta, window, w).1 / r, 0.0)
            }
            Profile::LogAccumCore { q_dim, window, .. } if anchor == 1.0 => {
                C64::new(plateau_power_pair(-1.0 / q_dim, window, w).1 / r, 0.0)
            }
            Profile::PowerCore { exponent, amplitude_log, window, .. } if anchor == 1.0 => {
                C64::new(power_core_pair(*exponent, *amplitude_log, window, w).1 / r, 0.0)
            }
            Profile::BallLogCore { beta, window, .. } if anchor == 1.0 => {
                C64::new(plateau_power_pair(*beta, window, 1.0 + w).1 / r, 0.0)
            }
            Profile::Scaled { inner, lambda } => {
                lambda * inner.dg_log(lambda * r, lambda * anchor, w)
            }
            Profile::Amplified { inner, factor } => factor * inner.dg_log(r, anchor, w),
            _ => self.dg(r),
        }
    }

    /// Exact derivative `g′(r)`.
    pub fn dg(&self, r: f64) -> C64 {
        match self {
            Profile::Zero => C64::ZERO,
            Profile::Bump { a, b } => {
                if r <= *a || r >= *b {
                    return C64::ZERO;
                }
                let u = (r - a) * (b - r);
                let e = 1.0 / u;
                if e > 700.0 {
                    return C64::ZERO;
                }
                C64::new((-e).exp() * (a + b - 2.0 * r) / (u * u), 0.0)
            }
            Profile::PolyBump { a, b, k } => {
                if r <= *a || r >= *b {
                    return C64::ZERO;
                }
                let u = (r - a) * (b - r);
                let kf = *k as f64;
                C64::new(kf * u.powi(*k as i32 - 1) * (a + b - 2.0 * r), 0.0)
            }
            Profile::PowerLaw { alpha, a, b } => {
                if r <= *a || r >= *b {
                    return C64::ZERO;
                }
                let w = (b / a).ln() / 8.0;
                let (c1, d1) = smoothstep_with_derivative((r / a).ln() / w);
                let (c2, d2) = smoothstep_with_derivative((b / r).ln() / w);
                let pow = r.powf(*alpha);
                let dpow = alpha * r.powf(alpha - 1.0);
                C64::new(dpow * c1 * c2 + pow * (d1 * c2 - c1 * d2) / (w * r), 0.0)
            }
            Profile::LogPower { beta, a, b, big_r } => {
                if r <= *a || r >= *b {
                    return C64::ZERO;
                }
                let s = log_anchor_ratio(*big_r, r);
                let (m, md) = logpower_window(*a, *b, *big_r).eval(s.ln());
                // d/dr [s^β m(log s)] = −s^{β−1} (β m + m′) / r.
                C64::new(-s.powf(beta - 1.0) * (beta * m + md) / r, 0.0)
            }
            Profile::LogHardyCore { big_r, beta, window, .. } => {
                let s = log_anchor_ratio(*big_r, r);
                C64::new(plateau_power_pair(*beta, window, s).1 / r, 0.0)
            }
            Profile::LogAccumCore { q_dim, window, .. } => {
                let t = log_anchor_ratio(1.0, r);
                // d/dr [t^{−1/Q} m(log t)] = t^{−1/Q−1} (m/Q − m′) / r.
                C64::new(plateau_power_pair(-1.0 / q_dim, window, t).1 / r, 0.0)
            }
            Profile::PowerCore { exponent, amplitude_log, window, .. } => {
                let t = log_anchor_ratio(1.0, r);
                // d/dr [e^{c₀+c₁t} M(t)] = −e^{c₀+c₁t} (c₁ M + M′) / r.
                C64::new(power_core_pair(*exponent, *amplitude_log, window, t).1 / r, 0.0)
            }
            Profile::BallLogCore { beta, window, .. } => {
                let s = 1.0 + log_anchor_ratio(1.0, r);
                C64::new(plateau_power_pair(*beta, window, s).1 / r, 0.0)
            }
            Profile::Scaled { inner, lambda } => lambda * inner.dg(lambda * r),
            Profile::Amplified { inner, factor } => factor * inner.dg(r),
        }
    }

    /// Stable display name, also accepted by [`Profile::parse`] for the
    /// registry shapes.
    pub fn name(&self) -> String {
        match self {
            Profile::Zero => "zero".into(),
            Profile::Bump { a, b } => format!("bump:{a},{b}"),
            Profile::PolyBump { a, b, k } => format!("polybump:{a},{b},{k}"),
            Profile::PowerLaw { alpha, a, b } => format!("powerlaw:{alpha},{a},{b}"),
            Profile::LogPower { beta, a, b, big_r } => {
                format!("logpower:{beta},{a},{b},{big_r}")
            }
            Profile::LogHardyCore { label, .. }
            | Profile::LogAccumCore { label, .. }
            | Profile::PowerCore { label, .. }
            | Profile::BallLogCore { label, .. } => label.clone(),
            Profile::Scaled { inner, lambda } => format!("scaled:{lambda}[{}]", inner.name()),
            Profile::Amplified { inner, factor } => {
                format!("amplified:{},{}[{}]", factor.re, factor.im, inner.name())
            }
        }
    }

    /// Parses a registry profile description like `bump:0.2,0.8`,
    /// `polybump:0.2,0.8,3`, `powerlaw:-0.5,0.2,2`,
    /// `logpower:0.667,0.001,0.999,1`, `complex-bump:0.2,0.8`, or `zero`.
    pub fn parse(text: &str) -> Result<Self, ProfileError> {
        let fail = |reason: &str| ProfileError::Parse {
            input: text.to_string(),
            reason: reason.to_string(),
        };
        let (head, args) = match text.split_once(':') {
            Some((h, a)) => (h.trim(), a.trim()),
            None => (text.trim(), ""),
        };
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| fail(&format!("bad number: {e}")))?
        };
        let want = |n: usize| {
            if nums.len() == n {
                Ok(())
            } else {
                Err(fail(&format!("expected {n} parameters, got {}", nums.len())))
            }
        };
        match head {
            "zero" => {
                want(0)?;
                Ok(Profile::Zero)
            }
            "bump" => {
                want(2)?;
                Profile::bump(nums[0], nums[1])
            }
            "complex-bump" => {
                want(2)?;
                Ok(Profile::bump(nums[0], nums[1])?.amplified(C64::new(1.0, 1.0)))
            }
            "polybump" => {
                want(3)?;
                if nums[2] < 1.0 || nums[2].fract() != 0.0 {
                    return Err(fail("polybump exponent must be a positive integer"));
                }
                Profile::polybump(nums[0], nums[1], nums[2] as u32)
            }
            "powerlaw" => {
                want(3)?;
                Profile::powerlaw(nums[0], nums[1], nums[2])
            }
            "logpower" => {
                want(4)?;
                Profile::logpower(nums[0], nums[1], nums[2], nums[3])
            }
            _ => Err(fail("unknown profile kind")),
        }
    }
}

fn check_interval(a: f64, b: f64) -> Result<(), ProfileError> {
    if !(a.is_finite() && b.is_finite() && 0.0 < a && a < b) {
        return Err(ProfileError::BadParameters(format!(
            "support needs 0 < a < b, got a = {a}, b = {b}"
        )));
    }
    Ok(())
}

/// Window for the registry `logpower` profile: tapers over the first and
/// last quarter of the `τ = log log(R/r)` range.
fn logpower_window(a: f64, b: f64, big_r: f64) -> PlateauWindow {
    let tau_hi = log_anchor_ratio(big_r, a).ln();
    let tau_lo = log_anchor_ratio(big_r, b).ln();
    let quarter = (tau_hi - tau_lo) / 4.0;
    PlateauWindow { t0: tau_lo, k1: quarter, lam: 2.0 * quarter, k2: quarter }
}

// ---------------------------------------------------------------------------
// Radial calculus
// ---------------------------------------------------------------------------

/// Radial derivative operator: for a radial function `f(x) = g(|x|)` this is
/// `(𝓡f)(x) = g′(|x|)`, evaluated here directly on the radial section.
pub fn radial_derivative(profile: &Profile, r: f64) -> Result<C64, ProfileError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(ProfileError::Domain(format!("radius must be positive, got {r}")));
    }
    Ok(profile.dg(r))
}

/// Euler operator `𝔼 = |x| 𝓡` on the radial section: `r g′(r)`.
///
/// Homogeneous functions of degree `ν` are eigenfunctions with eigenvalue
/// `ν`; see the crate tests.
pub fn euler_apply(profile: &Profile, r: f64) -> Result<C64, ProfileError> {
    Ok(r * radial_derivative(profile, r)?)
}

/// Maximum deviation between the analytic derivative and the central
/// difference `(g(r+h) − g(r−h)) / 2h` over a grid.
///
/// Every grid point must satisfy `(r−h, r+h) ⊂ (a, b)` for the profile's
/// support `(a, b)`, so the difference quotient never straddles a support
/// edge.
pub fn finite_diff_check(profile: &Profile, grid: &[f64], h: f64) -> Result<f64, ProfileError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(ProfileError::Domain(format!("step must be positive, got {h}")));
    }
    if grid.is_empty() {
        return Err(ProfileError::Domain("empty grid".into()));
    }
    let (a, b) = profile.support();
    let mut worst = 0.0_f64;
    for &r in grid {
        if !(r - h > a && r + h < b) {
            return Err(ProfileError::Domain(format!(
                "grid point {r} ± {h} leaves the open support ({a}, {b})"
            )));
        }
        let fd = (profile.g(r + h) - profile.g(r - h)) / (2.0 * h);
        worst = worst.max((profile.dg(r) - fd).norm());
    }
    Ok(worst)
}

/// Two-sided logarithm envelope used by the critical-weight arguments:
/// checks `(R−r)/R ≤ log(R/r)` and `log(R/r) ≤ (R−r)/r` for `0 < r < R`.
pub fn log_bound_lemmas(big_r: f64, r: f64) -> Result<(bool, bool), ProfileError> {
    if !(r.is_finite() && big_r.is_finite() && 0.0 < r && r < big_r) {
        return Err(ProfileError::Domain(format!(
            "log bounds need 0 < r < R, got r = {r}, R = {big_r}"
        )));
    }
    let s = log_anchor_ratio(big_r, r);
    let lower = (big_r - r) / big_r <= s;
    let upper = s <= (big_r - r) / r;
    Ok((lower, upper))
}
