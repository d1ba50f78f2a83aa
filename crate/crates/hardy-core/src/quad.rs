//! Adaptive Gauss–Kronrod quadrature tuned for radial inequality weights.
//!
//! The core engine is a classic globally adaptive G7–K15 scheme: bisect the
//! segment with the largest error estimate until the summed estimate meets
//! the tolerance. Segment errors use the standard QUADPACK rescaling, which
//! is sharp for smooth integrands and conservative near integrable
//! singularities.
//!
//! The radial weights treated here — `r^{Q−1}`, `1/(r |log(R/r)|^p)` and
//! friends — concentrate their mass logarithmically: a fixed relative
//! accuracy requires resolving *every octave* of `r`, which defeats direct
//! bisection on wide intervals (the criterion is never met because each of
//! hundreds of decades contributes equally). [`EndpointTransform`] therefore
//! offers exact changes of variables `t = log(1/r)` and `s = log(anchor/r)`
//! that flatten this structure, plus declared log-power tails for improper
//! endpoints: integrands that are *exactly* `C/(r·|log·|^e)` beyond the
//! representable range (out-of-support difference tails are of this form)
//! are finished in a compactified variable, still by quadrature. The engine
//! cross-checks the declared form against the integrand at the cut and
//! refuses silently wrong declarations.
//!
//! Everything is deterministic: segment processing order is a pure function
//! of the inputs, and final sums are accumulated in spatial order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::profile::C64;

/// Errors from the quadrature engine.
#[derive(Debug, Error)]
pub enum QuadError {
    /// Bad integration bounds.
    #[error("invalid interval [{lo}, {hi}]: {reason}")]
    BadInterval { lo: f64, hi: f64, reason: String },
    /// The subdivision budget ran out before the tolerance was met.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions: \
         value ≈ {partial:e}, error estimate {error_estimate:e}"
    )]
    NotConverged { partial: f64, error_estimate: f64, subdivisions: usize },
    /// An improper endpoint was requested without a declared tail.
    #[error("improper endpoint needs a declared log-power tail: {0}")]
    ImproperEndpoint(String),
    /// The declared tail exponent cannot give a convergent integral.
    #[error("declared tail exponent {exponent} invalid: {reason}")]
    BadTail { exponent: f64, reason: String },
    /// The integrand near the tail cut does not follow the declared form.
    #[error(
        "integrand does not match the declared log-power tail near the cut \
         (relative deviation {deviation:e})"
    )]
    TailMismatch { deviation: f64 },
    /// The integrand produced NaN/∞ inside a segment.
    #[error("non-finite integrand value near r = {r:e}")]
    NonFinite { r: f64 },
}

/// Change of variables applied before adaptive bisection.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum EndpointTransform {
    /// Integrate directly in `r`.
    #[default]
    None,
    /// Integrate in `t = log(1/r)`. With `lo == 0` the integrand must be
    /// exactly `C/(r·|log r|^e)` near `r = 0`; pass that `e` here.
    LogAtZero { tail_exponent: Option<f64> },
    /// Integrate in `s = log(anchor/r)`, anchored at `anchor` (typically the
    /// ball radius). Resolves structure at `r = anchor` exactly. With
    /// `hi == ∞` (or `lo == 0`) the integrand must be exactly
    /// `C/(r·|log(anchor/r)|^e)` far out; pass that `e`.
    LogAnchor { anchor: f64, tail_exponent: Option<f64> },
}

/// Tolerances and budget for one integration.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Target relative accuracy (on the summed value).
    pub rel_tol: f64,
    /// Absolute accuracy floor.
    pub abs_tol: f64,
    /// Maximum number of bisections before giving up.
    pub max_subdivisions: usize,
    /// Coordinate change; see [`EndpointTransform`].
    pub transform: EndpointTransform,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 1_000_000,
            transform: EndpointTransform::None,
        }
    }
}

impl QuadratureSpec {
    /// Same tolerances with a different transform.
    pub fn with_transform(&self, transform: EndpointTransform) -> Self {
        Self { transform, ..self.clone() }
    }

    /// Same transform with scaled tolerances.
    pub fn with_tols(&self, rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..self.clone() }
    }
}

/// Outcome of one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    /// The integral value.
    pub value: f64,
    /// Conservative error estimate (additive across internal pieces).
    pub error_estimate: f64,
    /// Number of bisections performed.
    pub subdivisions_used: usize,
}

impl IntegralResult {
    /// The zero integral (empty piece).
    pub fn zero() -> Self {
        Self { value: 0.0, error_estimate: 0.0, subdivisions_used: 0 }
    }

    /// Sum of two pieces: values add, error estimates add.
    pub fn merged(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            subdivisions_used: self.subdivisions_used + other.subdivisions_used,
        }
    }
}

// ---------------------------------------------------------------------------
// G7–K15 kernel
// ---------------------------------------------------------------------------

/// Kronrod abscissae for K15 (positive half; last entry is the centre).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// K15 weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// G7 weights for the odd-indexed abscissae of `XGK` plus the centre.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// QUADPACK error rescaling: sharp for smooth segments, conservative near
/// singular structure, floored at 50 ε times the absolute integral.
fn rescale_error(raw: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = raw.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

/// One G7–K15 evaluation over `[a, b]`: returns `(value, error_estimate)`.
fn qk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut resg = WG[3] * fc;
    let mut resk = WGK[7] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];
    for j in 0..7 {
        let offset = half * XGK[j];
        let f1 = f(centre - offset);
        let f2 = f(centre + offset);
        fv1[j] = f1;
        fv2[j] = f2;
        let fsum = f1 + f2;
        resk += WGK[j] * fsum;
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * fsum;
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    let err = rescale_error((resk - resg) * half, resabs * half.abs(), resasc * half.abs());
    (value, err)
}

// ---------------------------------------------------------------------------
// Globally adaptive driver
// ---------------------------------------------------------------------------

struct Segment {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
    seq: u64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Adaptive bisection of `f` over the finite interval `[a, b]`.
fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<IntegralResult, QuadError> {
    if a == b {
        return Ok(IntegralResult::zero());
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadError::BadInterval {
            lo: a,
            hi: b,
            reason: "need finite ascending bounds".into(),
        });
    }

    let mut heap: BinaryHeap<Segment> = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut seq = 0_u64;
    let (v, e) = qk15(f, a, b);
    if !v.is_finite() {
        return Err(QuadError::NonFinite { r: 0.5 * (a + b) });
    }
    let mut total_value = v;
    let mut total_err = e;
    heap.push(Segment { err: e, a, b, value: v, seq });
    let mut bisections = 0_usize;

    while total_err > spec.abs_tol.max(spec.rel_tol * total_value.abs()) {
        if bisections >= spec.max_subdivisions {
            return Err(QuadError::NotConverged {
                partial: total_value,
                error_estimate: total_err,
                subdivisions: bisections,
            });
        }
        let Some(worst) = heap.pop() else {
            // Every segment is at machine resolution; accept what we have if
            // the floor estimates happen to satisfy the tolerance, else fail.
            return Err(QuadError::NotConverged {
                partial: total_value,
                error_estimate: total_err,
                subdivisions: bisections,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // Cannot split further in f64; keep its contribution as-is.
            frozen.push(worst);
            continue;
        }
        let (v1, e1) = qk15(f, worst.a, mid);
        let (v2, e2) = qk15(f, mid, worst.b);
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(QuadError::NonFinite { r: mid });
        }
        total_value += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Segment { err: e1, a: worst.a, b: mid, value: v1, seq: seq + 1 });
        heap.push(Segment { err: e2, a: mid, b: worst.b, value: v2, seq: seq + 2 });
        seq += 2;
        bisections += 1;
    }

    // Re-accumulate in spatial order: the result is then independent of the
    // processing history and slightly better conditioned.
    let mut segments: Vec<Segment> = heap.into_vec();
    segments.append(&mut frozen);
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segments.iter().map(|s| s.value).sum();
    let error_estimate = segments.iter().map(|s| s.err).sum();
    Ok(IntegralResult { value, error_estimate, subdivisions_used: bisections })
}

// ---------------------------------------------------------------------------
// Declared log-power tails
// ---------------------------------------------------------------------------

/// Completes `∫_{cut}^∞ ψ(σ) dσ` for `ψ(σ) = ψ(cut)·(σ/cut)^{−e}`, using the
/// compactification `u = cut/σ` (the integrand becomes `ψ(cut)·cut·u^{e−2}`),
/// still evaluated by adaptive quadrature. `psi` is the transformed
/// integrand (including the Jacobian); its value at the cut calibrates the
/// constant, and two further samples verify the declared form.
fn declared_tail(
    psi: &dyn Fn(f64) -> f64,
    cut: f64,
    exponent: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, QuadError> {
    if !(exponent.is_finite() && exponent > 1.0) {
        return Err(QuadError::BadTail {
            exponent,
            reason: "tail ∫ σ^{−e} dσ needs e > 1".into(),
        });
    }
    let base = psi(cut);
    if base == 0.0 {
        // The integrand died before the cut (compact support); nothing to add,
        // but make sure it is genuinely dead rather than oscillating.
        if psi(1.1 * cut) == 0.0 && psi(1.25 * cut) == 0.0 {
            return Ok(IntegralResult::zero());
        }
        return Err(QuadError::TailMismatch { deviation: f64::INFINITY });
    }
    let mut deviation = 0.0_f64;
    for factor in [1.1_f64, 1.25] {
        let expected = base * factor.powf(-exponent);
        let got = psi(factor * cut);
        deviation = deviation.max(((got - expected) / expected).abs());
    }
    if deviation > 1e-6 {
        return Err(QuadError::TailMismatch { deviation });
    }
    let u_integral = adaptive(&|u: f64| u.powf(exponent - 2.0), 0.0, 1.0, spec)?;
    Ok(IntegralResult {
        value: base * cut * u_integral.value,
        error_estimate: (base * cut).abs() * u_integral.error_estimate
            + (base * cut * u_integral.value).abs() * deviation,
        subdivisions_used: u_integral.subdivisions_used,
    })
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// Integrates `f` over `[lo, hi] ⊆ [0, ∞]` under the spec's transform.
///
/// * With [`EndpointTransform::None`] the bounds must be finite; `lo = 0` is
///   allowed for integrands that stay integrable there.
/// * The logarithmic transforms require `lo > 0` / finite `hi` unless the
///   corresponding tail exponent is declared (see [`EndpointTransform`]).
pub fn integrate_radial(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, QuadError> {
    integrate_radial_with_log(|r, _| f(r), lo, hi, spec)
}

/// Same as [`integrate_radial`], but the integrand also receives the active
/// transform coordinate at the sample point: `t = log(1/r)` under
/// [`EndpointTransform::LogAtZero`], `s = log(anchor/r)` under
/// [`EndpointTransform::LogAnchor`], and `r` itself when no transform is
/// active.
///
/// The passed coordinate is the engine's own integration variable, exact to
/// the last bit. Recovering it from `r` instead is lossy near `r ≈ anchor`:
/// there `r` advances in steps of one ulp (≈ 2e−16 absolute in the log), so
/// a recomputed `log(anchor/r)` of size `1e−12` carries only four
/// significant digits. Integrands with structure on that scale must use the
/// supplied value.
pub fn integrate_radial_with_log(
    f: impl Fn(f64, f64) -> f64,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, QuadError> {
    match spec.transform {
        EndpointTransform::None => integrate_log_density(|r, w| f(r, w), lo, hi, spec),
        _ => integrate_log_density(|r, w| f(r, w) * r, lo, hi, spec),
    }
}

/// Lowest-level entry: integrates `∫ f(r) dr` with the caller supplying the
/// *transformed density* directly. `density(r, w)` must return
/// `f(r)·|dr/dw|`, which is `f(r)·r` under either logarithmic transform and
/// plain `f(r)` with no transform (`w` as in [`integrate_radial_with_log`]).
///
/// This exists so integrands assembled in log space can fold the Jacobian's
/// `(r, 1)` factor into the same `exp(Σ eᵢ·log vᵢ)` sum. Near-extremal
/// members produce `f` values far outside the f64 range whose product with
/// `r` is nonetheless moderate; materializing the unbalanced `f` rounds it
/// through denormals (or to zero), and the engine's separate `·r` would
/// amplify that quantisation into an irreducible error floor.
pub fn integrate_log_density(
    density: impl Fn(f64, f64) -> f64,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, QuadError> {
    if lo > hi || lo.is_nan() || hi.is_nan() || lo < 0.0 {
        return Err(QuadError::BadInterval {
            lo,
            hi,
            reason: "need 0 ≤ lo ≤ hi".into(),
        });
    }
    if lo == hi {
        return Ok(IntegralResult::zero());
    }

    match spec.transform {
        EndpointTransform::None => {
            if !hi.is_finite() {
                return Err(QuadError::ImproperEndpoint(
                    "hi = ∞ requires a logarithmic transform with a declared tail".into(),
                ));
            }
            adaptive(&|r| density(r, r), lo, hi, spec)
        }
        EndpointTransform::LogAtZero { tail_exponent } => {
            if !(hi.is_finite() && hi > 0.0) {
                return Err(QuadError::ImproperEndpoint(
                    "t = log(1/r) needs finite positive hi".into(),
                ));
            }
            // ∫ f(r) dr = ∫ f(e^{−t}) e^{−t} dt, ascending in t.
            let psi = |t: f64| density((-t).exp(), t);
            let t_lo = -hi.ln();
            if lo > 0.0 {
                return adaptive(&psi, t_lo, -lo.ln(), spec);
            }
            let Some(e) = tail_exponent else {
                return Err(QuadError::ImproperEndpoint(
                    "lo = 0 under t = log(1/r) needs a declared tail exponent".into(),
                ));
            };
            let cut = (2.0 * t_lo.abs() + 10.0).max(350.0);
            let numeric = adaptive(&psi, t_lo, cut, spec)?;
            let tail = declared_tail(&psi, cut, e, spec)?;
            Ok(numeric.merged(tail))
        }
        EndpointTransform::LogAnchor { anchor, tail_exponent } => {
            if !(anchor.is_finite() && anchor > 0.0) {
                return Err(QuadError::BadInterval {
                    lo,
                    hi,
                    reason: format!("log anchor must be positive, got {anchor}"),
                });
            }
            if lo == 0.0 && !hi.is_finite() {
                return Err(QuadError::ImproperEndpoint(
                    "cannot combine lo = 0 and hi = ∞ in one call".into(),
                ));
            }
            if lo == 0.0 {
                // s = log(anchor/r) runs from s(hi) up to +∞.
                let psi = |s: f64| density(anchor * (-s).exp(), s);
                let Some(e) = tail_exponent else {
                    return Err(QuadError::ImproperEndpoint(
                        "lo = 0 under s = log(anchor/r) needs a declared tail exponent".into(),
                    ));
                };
                let s_start = crate::profile::log_anchor_ratio(anchor, hi);
                let cut = (2.0 * s_start.abs() + 10.0).max(350.0);
                let numeric = adaptive(&psi, s_start, cut, spec)?;
                let tail = declared_tail(&psi, cut, e, spec)?;
                return Ok(numeric.merged(tail));
            }
            if !hi.is_finite() {
                // Work in s' = log(r/anchor), ascending towards +∞.
                let psi = |sp: f64| density(anchor * sp.exp(), -sp);
                let Some(e) = tail_exponent else {
                    return Err(QuadError::ImproperEndpoint(
                        "hi = ∞ under s = log(anchor/r) needs a declared tail exponent".into(),
                    ));
                };
                let s_start = -crate::profile::log_anchor_ratio(anchor, lo);
                let cut = (2.0 * s_start.abs() + 10.0).max(350.0);
                let numeric = adaptive(&psi, s_start, cut, spec)?;
                let tail = declared_tail(&psi, cut, e, spec)?;
                return Ok(numeric.merged(tail));
            }
            // Finite interval: plain change of variables, ascending in s.
            let psi = |s: f64| density(anchor * (-s).exp(), s);
            let s_lo = crate::profile::log_anchor_ratio(anchor, hi);
            let s_hi = crate::profile::log_anchor_ratio(anchor, lo);
            adaptive(&psi, s_lo, s_hi, spec)
        }
    }
}

/// `L^p` norm `(∫_{lo}^{hi} |φ(r)|^p dr)^{1/p}` of a complex integrand.
///
/// Weights must be folded into `φ` by the caller (e.g. pass
/// `φ = g·r^{(Q−1)/p}` for the measure `r^{Q−1} dr`). Returns the norm and
/// the diagnostics of the underlying integral of `|φ|^p`.
pub fn lp_norm(
    phi: impl Fn(f64) -> C64,
    p: f64,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, IntegralResult), QuadError> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(QuadError::BadInterval {
            lo,
            hi,
            reason: format!("lp_norm needs p ≥ 1, got {p}"),
        });
    }
    let integral = integrate_radial(|r| phi(r).norm().powf(p), lo, hi, spec)?;
    Ok((integral.value.max(0.0).powf(1.0 / p), integral))
}
