//! Full-dimensional Euclidean cross-checks for the radial pipeline.
//!
//! The radial modules verify inequalities after the reduction to weighted
//! one-dimensional integrals. This module closes the loop on the abelian
//! isotropic case `ℝⁿ`: it integrates the *n-dimensional* statements
//! directly over axis-aligned boxes — full gradient, no radial reduction —
//! so that the two routes can be compared. It covers
//!
//! * the anchored critical Hardy chain on `ℝⁿ` for `1 < p < ∞`:
//!   `‖(f−f_R)/(|x|^{n/p} log(R/|x|))‖_p
//!      ≤ p/(p−1)·‖|x|^{1−n/p}·(x/|x|)·∇f‖_p
//!      ≤ p/(p−1)·‖|x|^{1−n/p}·|∇f|‖_p`
//!   (the second step is Cauchy–Schwarz; both inequalities are reported
//!   with their own pass flag);
//! * the critical `log`-weight chain at `p = n`:
//!   `‖f/|x|‖_n ≤ n·‖(log|x|)·(x/|x|)·∇f‖_n ≤ n·‖(log|x|)·∇f‖_n`,
//!   whose middle member is the radial-direction form on balls and whose
//!   outer member is the full-gradient form on `ℝⁿ`;
//! * the dilation change of variables `∫F(D_λ x) dx = λ^{−Q}·∫F dx` for
//!   isotropic weights (`Q = n`), which pins the volume scaling that the
//!   homogeneous dimension encodes.
//!
//! Two box integrators are provided: a deterministic tensor Gauss–Legendre
//! rule with panel-doubling refinement (error estimate = last refinement
//! difference), and a seeded Monte Carlo sampler whose substreams are
//! derived from the seed so the result is bit-identical regardless of how
//! the work is partitioned over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::group::{GroupError, GroupSpec};
use crate::profile::{Profile, ProfileError};
use crate::quad::IntegralResult;
use crate::C64;

/// Errors from box integration and the full-gradient verifiers.
#[derive(Debug, Error)]
pub enum CartesianError {
    /// Malformed integration box.
    #[error("invalid box: {0}")]
    BadBox(String),
    /// Dimension outside what the requested method supports.
    #[error("dimension n = {n} unsupported: {reason}")]
    BadDimension { n: usize, reason: String },
    /// A singular integrand was requested on a box containing the origin.
    #[error("box contains the origin but the integrand is singular there")]
    OriginInsideBox,
    /// Invalid scalar parameter (order, sample count, exponent, …).
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    /// The test function cannot be used with the requested verifier.
    #[error("unsupported test function: {0}")]
    UnsupportedFunction(String),
    /// The integrand produced a NaN or infinity.
    #[error("non-finite integrand value at {point:?}")]
    NonFinite { point: Vec<f64> },
    /// Underlying profile error (construction or parsing).
    #[error(transparent)]
    Profile(#[from] ProfileError),
    /// Underlying group-model error.
    #[error(transparent)]
    Group(#[from] GroupError),
}

// ---------------------------------------------------------------------------
// Boxes, integrands, methods
// ---------------------------------------------------------------------------

/// Axis-aligned integration box `[lo₁,hi₁]×…×[loₙ,hiₙ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    /// Builds a box from per-axis bounds. Every axis needs finite bounds
    /// with `lo < hi`.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, CartesianError> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(CartesianError::BadBox(format!(
                "need matching non-empty bounds, got {} lower / {} upper",
                lo.len(),
                hi.len()
            )));
        }
        for k in 0..lo.len() {
            if !lo[k].is_finite() || !hi[k].is_finite() || lo[k] >= hi[k] {
                return Err(CartesianError::BadBox(format!(
                    "axis {}: [{}, {}] is not a proper finite interval",
                    k + 1,
                    lo[k],
                    hi[k]
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// Centred cube `[−half, half]ⁿ`.
    pub fn centred_cube(n: usize, half: f64) -> Result<Self, CartesianError> {
        if !(half > 0.0) || !half.is_finite() {
            return Err(CartesianError::BadBox(format!("cube half-width {half} must be positive")));
        }
        Self::new(vec![-half; n], vec![half; n])
    }

    /// Dimension `n`.
    pub fn n(&self) -> usize {
        self.lo.len()
    }

    /// Lower bounds.
    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    /// Upper bounds.
    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// Box volume `∏(hiₖ−loₖ)`.
    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    /// Whether the closed box contains the origin.
    pub fn contains_origin(&self) -> bool {
        self.lo.iter().zip(&self.hi).all(|(&a, &b)| a <= 0.0 && b >= 0.0)
    }
}

/// Real scalar integrand over a box, tagged with whether it is singular at
/// the origin (the tag gates the domain check: singular integrands are
/// rejected on boxes containing the origin).
pub struct BoxIntegrand<'a> {
    /// Pointwise evaluation.
    pub eval: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    /// True when the integrand blows up at `x = 0`.
    pub singular_at_origin: bool,
}

impl<'a> BoxIntegrand<'a> {
    /// Integrand that is finite everywhere on the box.
    pub fn smooth(eval: &'a (dyn Fn(&[f64]) -> f64 + Sync)) -> Self {
        Self { eval, singular_at_origin: false }
    }

    /// Integrand with a singularity at the origin.
    pub fn singular(eval: &'a (dyn Fn(&[f64]) -> f64 + Sync)) -> Self {
        Self { eval, singular_at_origin: true }
    }
}

/// Box integration method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoxMethod {
    /// Tensor-product Gauss–Legendre of the given order per axis, refined
    /// by doubling the panel count per axis until the last doubling moves
    /// the value by less than an internal floor. Deterministic; the error
    /// estimate is the last refinement difference.
    TensorGauss {
        /// Nodes per axis per panel (2 ≤ order ≤ 64).
        order: usize,
    },
    /// Uniform Monte Carlo with the given sample budget, split over
    /// [`MC_SUBSTREAMS`] counter-derived substreams of a seeded ChaCha
    /// generator. The reported error is the 1σ standard error of the mean.
    MonteCarlo {
        /// Total number of samples (≥ 2).
        samples: u64,
        /// Substream-deriving seed; identical seeds give bit-identical
        /// results independently of thread count.
        seed: u64,
    },
}

/// Default Gauss–Legendre order for 2-D verification integrals.
pub const DEFAULT_TENSOR_ORDER: usize = 32;

/// Number of independent Monte Carlo substreams; the sample budget is
/// spread over these and the per-stream partial sums are merged in stream
/// order, so the value never depends on the thread partitioning.
pub const MC_SUBSTREAMS: u64 = 1024;

/// Relative floor for tensor panel refinement.
const TENSOR_REL_FLOOR: f64 = 1e-11;
/// Absolute floor for tensor panel refinement.
const TENSOR_ABS_FLOOR: f64 = 1e-13;
/// Evaluation budget per refinement level (`(order·panels)ⁿ`).
const TENSOR_LEVEL_BUDGET: f64 = 4e7;

/// Integrates a scalar integrand over a box.
///
/// Tensor Gauss–Legendre is limited to `n ≤ 4`; Monte Carlo works in any
/// dimension. Singular integrands (per their tag) are rejected when the
/// closed box contains the origin — neither method can see the
/// singularity reliably, so the combination is a domain error.
pub fn integrate_box(
    integrand: &BoxIntegrand,
    domain: &BoxDomain,
    method: &BoxMethod,
) -> Result<IntegralResult, CartesianError> {
    if integrand.singular_at_origin && domain.contains_origin() {
        return Err(CartesianError::OriginInsideBox);
    }
    match *method {
        BoxMethod::TensorGauss { order } => tensor_gauss_box(integrand, domain, order),
        BoxMethod::MonteCarlo { samples, seed } => monte_carlo_box(integrand, domain, samples, seed),
    }
}

// ---------------------------------------------------------------------------
// Tensor Gauss–Legendre
// ---------------------------------------------------------------------------

/// Gauss–Legendre nodes and weights on `(−1, 1)`, by Newton iteration on
/// the Legendre recurrence. Deterministic in the order alone.
fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, z);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Legendre polynomial `Pₙ` and its derivative at `x`, via the three-term
/// recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let pk = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// One full tensor pass at a fixed panel count per axis. Panels along the
/// first axis run in parallel; their partial sums are combined in axis
/// order, so the value is independent of the thread count.
fn tensor_pass(
    integrand: &BoxIntegrand,
    domain: &BoxDomain,
    nodes: &[f64],
    weights: &[f64],
    panels: usize,
) -> Result<f64, CartesianError> {
    let n = domain.n();
    let widths: Vec<f64> =
        (0..n).map(|k| (domain.hi[k] - domain.lo[k]) / panels as f64).collect();

    let partials: Result<Vec<f64>, CartesianError> = (0..panels)
        .into_par_iter()
        .map(|s0| {
            let mut x = vec![0.0; n];
            let mut cell = vec![0usize; n];
            cell[0] = s0;
            cell_sum(integrand, domain, nodes, weights, &widths, &mut cell, &mut x, 1)
        })
        .collect();
    let partials = partials?;
    // Half-width Jacobian per axis: each panel maps (−1,1) to width wₖ.
    let jac: f64 = widths.iter().map(|w| 0.5 * w).product();
    Ok(partials.iter().sum::<f64>() * jac)
}

/// Sums the Gauss rule over all panel cells with axes `dim..n` free,
/// sequentially and in index order.
#[allow(clippy::too_many_arguments)]
fn cell_sum(
    integrand: &BoxIntegrand,
    domain: &BoxDomain,
    nodes: &[f64],
    weights: &[f64],
    widths: &[f64],
    cell: &mut [usize],
    x: &mut [f64],
    dim: usize,
) -> Result<f64, CartesianError> {
    let n = domain.n();
    if dim < n {
        let panels = ((domain.hi[dim] - domain.lo[dim]) / widths[dim]).round() as usize;
        let mut total = 0.0;
        for s in 0..panels {
            cell[dim] = s;
            total +=
                cell_sum(integrand, domain, nodes, weights, widths, cell, x, dim + 1)?;
        }
        return Ok(total);
    }
    // All panel indices fixed: sum the tensor rule over this cell.
    node_sum(integrand, domain, nodes, weights, widths, cell, x, 0, 1.0)
}

/// Sums `∏wᵢ·f(x)` over the tensor node grid of one cell, recursing over
/// axes in order.
#[allow(clippy::too_many_arguments)]
fn node_sum(
    integrand: &BoxIntegrand,
    domain: &BoxDomain,
    nodes: &[f64],
    weights: &[f64],
    widths: &[f64],
    cell: &[usize],
    x: &mut [f64],
    dim: usize,
    w_acc: f64,
) -> Result<f64, CartesianError> {
    if dim == domain.n() {
        let v = (integrand.eval)(x);
        if !v.is_finite() {
            return Err(CartesianError::NonFinite { point: x.to_vec() });
        }
        return Ok(w_acc * v);
    }
    let centre = domain.lo[dim] + (cell[dim] as f64 + 0.5) * widths[dim];
    let half = 0.5 * widths[dim];
    let mut total = 0.0;
    for (j, &t) in nodes.iter().enumerate() {
        x[dim] = centre + half * t;
        total += node_sum(
            integrand,
            domain,
            nodes,
            weights,
            widths,
            cell,
            x,
            dim + 1,
            w_acc * weights[j],
        )?;
    }
    Ok(total)
}

fn tensor_gauss_box(
    integrand: &BoxIntegrand,
    domain: &BoxDomain,
    order: usize,
) -> Result<IntegralResult, CartesianError> {
    let n = domain.n();
    if n > 4 {
        return Err(CartesianError::BadDimension {
            n,
            reason: "tensor Gauss–Legendre is limited to n ≤ 4".into(),
        });
    }
    if !(2..=64).contains(&order) {
        return Err(CartesianError::BadParameter(format!(
            "Gauss order {order} outside 2..=64"
        )));
    }
    let (nodes, weights) = gauss_legendre(order);

    let mut panels = 1usize;
    let mut value = tensor_pass(integrand, domain, &nodes, &weights, panels)?;
    let mut err = f64::INFINITY;
    loop {
        let next = panels * 2;
        let level_cost = ((order * next) as f64).powi(n as i32);
        if level_cost > TENSOR_LEVEL_BUDGET {
            break;
        }
        let refined = tensor_pass(integrand, domain, &nodes, &weights, next)?;
        err = (refined - value).abs();
        value = refined;
        panels = next;
        if err <= TENSOR_ABS_FLOOR.max(TENSOR_REL_FLOOR * value.abs()) {
            break;
        }
    }
    if !err.is_finite() {
        // The budget allowed no refinement at all; the single pass carries
        // no difference to estimate from.
        return Err(CartesianError::BadParameter(format!(
            "order {order} leaves no refinement budget in dimension {n}"
        )));
    }
    Ok(IntegralResult { value, error_estimate: err, subdivisions_used: panels })
}

// ---------------------------------------------------------------------------
// Seeded Monte Carlo
// ---------------------------------------------------------------------------

fn monte_carlo_box(
    integrand: &BoxIntegrand,
    domain: &BoxDomain,
    samples: u64,
    seed: u64,
) -> Result<IntegralResult, CartesianError> {
    if samples < 2 {
        return Err(CartesianError::BadParameter(format!(
            "Monte Carlo needs at least 2 samples, got {samples}"
        )));
    }
    let n = domain.n();
    let base = samples / MC_SUBSTREAMS;
    let rem = samples % MC_SUBSTREAMS;

    // Each substream is fully determined by (seed, stream index); partial
    // moments are merged in stream order, so neither the thread count nor
    // the scheduling order can change a single bit of the result.
    let partials: Result<Vec<(f64, f64)>, CartesianError> = (0..MC_SUBSTREAMS)
        .into_par_iter()
        .map(|stream| {
            let count = base + u64::from(stream < rem);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let mut x = vec![0.0; n];
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                for k in 0..n {
                    let u: f64 = rng.gen();
                    x[k] = domain.lo[k] + (domain.hi[k] - domain.lo[k]) * u;
                }
                let v = (integrand.eval)(&x);
                if !v.is_finite() {
                    return Err(CartesianError::NonFinite { point: x.clone() });
                }
                sum += v;
                sum_sq += v * v;
            }
            Ok((sum, sum_sq))
        })
        .collect();
    let partials = partials?;

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (s, s2) in partials {
        sum += s;
        sum_sq += s2;
    }
    let nf = samples as f64;
    let mean = sum / nf;
    let vol = domain.volume();
    // Unbiased sample variance; clamped at zero against cancellation for
    // (near-)constant integrands.
    let variance = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    let std_error = vol * (variance / nf).sqrt();
    Ok(IntegralResult { value: vol * mean, error_estimate: std_error, subdivisions_used: 0 })
}

// ---------------------------------------------------------------------------
// Test functions
// ---------------------------------------------------------------------------

/// A test function `ℝⁿ → ℂ` with an analytic gradient and a known support
/// box that keeps a ball around the origin excluded (for the compactly
/// supported variants).
#[derive(Debug, Clone)]
pub enum CartesianTestFunction {
    /// `f(x) = g(|x|)` — radial lift of a 1-D profile.
    Radial {
        /// The radial shape.
        profile: Profile,
    },
    /// `f(x) = g(|x|)·x₁/|x|` — first-harmonic angular modulation; its
    /// gradient has a genuine non-radial component wherever `g ≠ 0`.
    Angular {
        /// The radial shape.
        profile: Profile,
    },
    /// `f(x) = exp(−|x|²)` — smooth reference with known closed-form
    /// integrals. Not compactly supported and not vanishing at the origin,
    /// so it serves the integrator oracles and the dilation check, not the
    /// verifiers.
    Gaussian,
}

impl CartesianTestFunction {
    /// Parses `gaussian`, `radial:<profile>`, `angular:<profile>`, or the
    /// shorthand `bump-angular` (= `angular:bump:0.2,0.8`).
    pub fn parse(text: &str) -> Result<Self, CartesianError> {
        let trimmed = text.trim();
        if trimmed.eq_ignore_ascii_case("gaussian") {
            return Ok(Self::Gaussian);
        }
        if trimmed.eq_ignore_ascii_case("bump-angular") {
            return Ok(Self::Angular { profile: Profile::bump(0.2, 0.8)? });
        }
        if let Some(rest) = trimmed.strip_prefix("radial:") {
            return Ok(Self::Radial { profile: Profile::parse(rest)? });
        }
        if let Some(rest) = trimmed.strip_prefix("angular:") {
            return Ok(Self::Angular { profile: Profile::parse(rest)? });
        }
        Err(CartesianError::UnsupportedFunction(format!(
            "unknown test function '{trimmed}'; expected gaussian, bump-angular, \
             radial:<profile>, or angular:<profile>"
        )))
    }

    /// Stable display name.
    pub fn name(&self) -> String {
        match self {
            Self::Radial { profile } => format!("radial:{}", profile.name()),
            Self::Angular { profile } => format!("angular:{}", profile.name()),
            Self::Gaussian => "gaussian".into(),
        }
    }

    /// Radial support interval `(a, b)`: the function vanishes for
    /// `|x| ∉ [a, b]`. The Gaussian reports `(0, ∞)`.
    pub fn radial_support(&self) -> (f64, f64) {
        match self {
            Self::Radial { profile } | Self::Angular { profile } => profile.support(),
            Self::Gaussian => (0.0, f64::INFINITY),
        }
    }

    /// Radius of the excluded ball around the origin (0 when nothing is
    /// excluded).
    pub fn origin_exclusion(&self) -> f64 {
        let (a, _) = self.radial_support();
        a
    }

    /// Whether the function is compactly supported.
    pub fn is_compact(&self) -> bool {
        self.radial_support().1.is_finite()
    }

    /// Natural integration box in dimension `n`: the support cube
    /// `[−b, b]ⁿ` for compact variants, `[−6, 6]ⁿ` for the Gaussian (whose
    /// mass outside is below 10⁻¹⁵ of the total).
    pub fn support_box(&self, n: usize) -> Result<BoxDomain, CartesianError> {
        let half = match self.radial_support().1 {
            b if b.is_finite() => b,
            _ => 6.0,
        };
        BoxDomain::centred_cube(n, half)
    }

    /// Pointwise value.
    pub fn eval(&self, x: &[f64]) -> C64 {
        let rho = euclid_norm(x);
        match self {
            Self::Radial { profile } => profile.g(rho),
            Self::Angular { profile } => {
                if rho == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    profile.g(rho) * (x[0] / rho)
                }
            }
            Self::Gaussian => C64::new((-rho * rho).exp(), 0.0),
        }
    }

    /// Analytic gradient.
    pub fn grad(&self, x: &[f64]) -> Vec<C64> {
        let n = x.len();
        let rho = euclid_norm(x);
        let zero = vec![C64::new(0.0, 0.0); n];
        match self {
            Self::Radial { profile } => {
                if rho == 0.0 {
                    return zero;
                }
                let dg = profile.dg(rho);
                x.iter().map(|&xi| dg * (xi / rho)).collect()
            }
            Self::Angular { profile } => {
                if rho == 0.0 {
                    return zero;
                }
                let g = profile.g(rho);
                let dg = profile.dg(rho);
                let omega = x[0] / rho;
                (0..n)
                    .map(|i| {
                        let radial = dg * omega * (x[i] / rho);
                        let kron = if i == 0 { 1.0 } else { 0.0 };
                        let angular = g * ((kron - omega * (x[i] / rho)) / rho);
                        radial + angular
                    })
                    .collect()
            }
            Self::Gaussian => {
                let v = (-rho * rho).exp();
                x.iter().map(|&xi| C64::new(-2.0 * xi * v, 0.0)).collect()
            }
        }
    }

    /// Central finite-difference gradient with step `h` (O(h²) accurate
    /// wherever the function is three times differentiable).
    pub fn grad_fd(&self, x: &[f64], h: f64) -> Vec<C64> {
        let n = x.len();
        let mut out = Vec::with_capacity(n);
        let mut y = x.to_vec();
        for i in 0..n {
            y[i] = x[i] + h;
            let fp = self.eval(&y);
            y[i] = x[i] - h;
            let fm = self.eval(&y);
            y[i] = x[i];
            out.push((fp - fm) / (2.0 * h));
        }
        out
    }
}

fn euclid_norm(x: &[f64]) -> f64 {
    x.iter().map(|&v| v * v).sum::<f64>().sqrt()
}

/// Largest component modulus of a gradient (0 for the zero gradient).
fn grad_scale(grad: &[C64]) -> f64 {
    grad.iter().map(|g| g.norm()).fold(0.0, f64::max)
}

/// Radial component `(x/|x|)·∇f` of a gradient at `x` (requires `|x| > 0`).
///
/// Computed at the scale of the largest component so that products of tiny
/// taper values never underflow: the result is exactly zero when the
/// gradient vanishes, and otherwise accurate relative to the gradient's
/// magnitude.
fn radial_component(grad: &[C64], x: &[f64], rho: f64) -> C64 {
    let m = grad_scale(grad);
    if m == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let sum: C64 = grad.iter().zip(x).map(|(&gi, &xi)| (gi / m) * (xi / rho)).sum();
    sum * m
}

/// Euclidean norm `(Σ|∂ᵢf|²)^{1/2}`, computed at the scale of the largest
/// component (the squares of deep-taper values would otherwise underflow).
fn grad_norm(grad: &[C64]) -> f64 {
    let m = grad_scale(grad);
    if m == 0.0 {
        return 0.0;
    }
    m * grad.iter().map(|g| (g / m).norm_sqr()).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// Chain verification
// ---------------------------------------------------------------------------

/// Outcome of a two-step inequality chain `lhs ≤ mid ≤ rhs` (constants
/// folded into `mid` and `rhs`), with one pass flag per step.
#[derive(Debug, Clone)]
pub struct ChainVerification {
    /// Statement and geometry, e.g. `LH2_Rn|n=2|p=2|R=4|radial:bump:0.2,0.8`.
    pub case_id: String,
    /// The bounded norm.
    pub lhs: f64,
    /// The middle member (radial-direction gradient side).
    pub mid: f64,
    /// The outer member (full-gradient side).
    pub rhs: f64,
    /// The constant folded into `mid` and `rhs`.
    pub constant: f64,
    /// `lhs ≤ mid` within tolerance and statistical error.
    pub pass_lhs_mid: bool,
    /// `mid ≤ rhs` within tolerance and statistical error.
    pub pass_mid_rhs: bool,
    /// 1σ (or refinement) error propagated to `lhs`.
    pub err_lhs: f64,
    /// 1σ (or refinement) error propagated to `mid`.
    pub err_mid: f64,
    /// 1σ (or refinement) error propagated to `rhs`.
    pub err_rhs: f64,
    /// Raw integrals behind the three norms.
    pub parts: Vec<(String, f64)>,
}

impl ChainVerification {
    /// Whether the whole chain holds.
    pub fn pass(&self) -> bool {
        self.pass_lhs_mid && self.pass_mid_rhs
    }

    /// `lhs / mid` (0 when both vanish).
    pub fn ratio_lhs_mid(&self) -> f64 {
        ratio_or_zero(self.lhs, self.mid)
    }

    /// `mid / rhs` (0 when both vanish).
    pub fn ratio_mid_rhs(&self) -> f64 {
        ratio_or_zero(self.mid, self.rhs)
    }
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if num == 0.0 && den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// One-sided comparison `small ≤ big` allowing the relative margin plus
/// three standard errors (so Monte Carlo runs are judged at 3σ while
/// deterministic runs reduce to the plain margin).
fn chain_step_pass(small: f64, big: f64, err_small: f64, err_big: f64, tol_margin: f64) -> bool {
    if small == 0.0 && big == 0.0 {
        return true;
    }
    small <= big * (1.0 + tol_margin) + 3.0 * (err_small + err_big)
}

fn norm_and_err(int: &IntegralResult, p: f64) -> (f64, f64) {
    let value = int.value.max(0.0);
    let norm = value.powf(1.0 / p);
    let err = if value > 0.0 {
        norm * int.error_estimate / (p * value)
    } else {
        int.error_estimate.max(0.0).powf(1.0 / p)
    };
    (norm, err)
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CartesianError> {
    if cond {
        Ok(())
    } else {
        Err(CartesianError::BadParameter(msg()))
    }
}

/// Common verifier preconditions: compact support with an excluded origin
/// ball, and enough dimensions for a radial direction.
fn require_annular(f: &CartesianTestFunction, n: usize) -> Result<(f64, f64), CartesianError> {
    if n < 2 {
        return Err(CartesianError::BadDimension {
            n,
            reason: "full-gradient verification needs n ≥ 2".into(),
        });
    }
    let (a, b) = f.radial_support();
    if !(a > 0.0) || !b.is_finite() {
        return Err(CartesianError::UnsupportedFunction(format!(
            "{} must vanish on a ball around the origin and outside a bounded \
             annulus; support is [{a}, {b}]",
            f.name()
        )));
    }
    Ok((a, b))
}

/// Verifies the anchored critical Hardy chain on `ℝⁿ` with the full
/// gradient:
///
/// `‖(f−f_R)/(|x|^{n/p}·log(R/|x|))‖_p
///    ≤ p/(p−1)·‖|x|^{1−n/p}·(x/|x|)·∇f‖_p
///    ≤ p/(p−1)·‖|x|^{1−n/p}·|∇f|‖_p`.
///
/// `f_R(x) = f(R·x/|x|)` is evaluated directly at the projected point. The
/// anchor must lie outside the closed support annulus `[a, b]`: that keeps
/// the difference `f − f_R` compactly supported inside the box and the
/// weight `log(R/|x|)` bounded away from its zero, which is what a box
/// quadrature can resolve. (Anchors inside the support belong to the
/// radial pipeline, which splits at the anchor exactly.)
pub fn verify_lh2_fullgrad(
    f: &CartesianTestFunction,
    p: f64,
    n: usize,
    big_r: f64,
    method: &BoxMethod,
    tol_margin: f64,
) -> Result<ChainVerification, CartesianError> {
    require(p.is_finite() && p > 1.0, || format!("need 1 < p < ∞, got p = {p}"))?;
    let (a, b) = require_annular(f, n)?;
    require(big_r.is_finite() && big_r > 0.0 && (big_r < a || big_r > b), || {
        format!("anchor R = {big_r} must be positive and outside the support [{a}, {b}]")
    })?;
    let domain = f.support_box(n)?;
    let nf = n as f64;

    let lhs_fn = |x: &[f64]| {
        let rho = euclid_norm(x);
        if rho == 0.0 {
            return 0.0;
        }
        let proj: Vec<f64> = x.iter().map(|&xi| big_r * xi / rho).collect();
        let diff = (f.eval(x) - f.eval(&proj)).norm();
        if diff == 0.0 {
            return 0.0;
        }
        let log_w = (big_r / rho).ln().abs();
        diff.powf(p) / (rho.powf(nf) * log_w.powf(p))
    };
    let mid_fn = |x: &[f64]| {
        let rho = euclid_norm(x);
        if rho == 0.0 {
            return 0.0;
        }
        let grad = f.grad(x);
        let radial = radial_component(&grad, x, rho).norm();
        if radial == 0.0 {
            return 0.0;
        }
        rho.powf(p - nf) * radial.powf(p)
    };
    let rhs_fn = |x: &[f64]| {
        let rho = euclid_norm(x);
        if rho == 0.0 {
            return 0.0;
        }
        let full = grad_norm(&f.grad(x));
        if full == 0.0 {
            return 0.0;
        }
        rho.powf(p - nf) * full.powf(p)
    };

    let lhs_int = integrate_box(&BoxIntegrand::smooth(&lhs_fn), &domain, method)?;
    let mid_int = integrate_box(&BoxIntegrand::smooth(&mid_fn), &domain, method)?;
    let rhs_int = integrate_box(&BoxIntegrand::smooth(&rhs_fn), &domain, method)?;

    let constant = p / (p - 1.0);
    let (lhs, err_lhs) = norm_and_err(&lhs_int, p);
    let (mid_norm, err_mid_norm) = norm_and_err(&mid_int, p);
    let (rhs_norm, err_rhs_norm) = norm_and_err(&rhs_int, p);
    let (mid, err_mid) = (constant * mid_norm, constant * err_mid_norm);
    let (rhs, err_rhs) = (constant * rhs_norm, constant * err_rhs_norm);

    Ok(ChainVerification {
        case_id: format!("LH2_Rn|n={n}|p={p}|R={big_r}|{}", f.name()),
        lhs,
        mid,
        rhs,
        constant,
        pass_lhs_mid: chain_step_pass(lhs, mid, err_lhs, err_mid, tol_margin),
        pass_mid_rhs: chain_step_pass(mid, rhs, err_mid, err_rhs, tol_margin),
        err_lhs,
        err_mid,
        err_rhs,
        parts: vec![
            ("lhs_integral".into(), lhs_int.value),
            ("mid_integral".into(), mid_int.value),
            ("rhs_integral".into(), rhs_int.value),
        ],
    })
}

/// Verifies the critical `log`-weight chain at `p = n`:
///
/// `‖f/|x|‖_n ≤ n·‖(log|x|)·(x/|x|)·∇f‖_n ≤ n·‖(log|x|)·∇f‖_n`.
///
/// The middle member is the radial-direction form on a ball containing
/// the support; the outer member is the full-gradient form on `ℝⁿ`. The
/// weight is `|log|x||` anchored at `|x| = 1`, matching the radial
/// critical-log verifier.
pub fn verify_ckn_fullgrad(
    f: &CartesianTestFunction,
    n: usize,
    method: &BoxMethod,
    tol_margin: f64,
) -> Result<ChainVerification, CartesianError> {
    require_annular(f, n)?;
    let domain = f.support_box(n)?;
    let nf = n as f64;

    let lhs_fn = |x: &[f64]| {
        let rho = euclid_norm(x);
        if rho == 0.0 {
            return 0.0;
        }
        let v = f.eval(x).norm();
        if v == 0.0 {
            return 0.0;
        }
        (v / rho).powf(nf)
    };
    let mid_fn = |x: &[f64]| {
        let rho = euclid_norm(x);
        if rho == 0.0 {
            return 0.0;
        }
        let grad = f.grad(x);
        let radial = radial_component(&grad, x, rho).norm();
        if radial == 0.0 {
            return 0.0;
        }
        (rho.ln().abs() * radial).powf(nf)
    };
    let rhs_fn = |x: &[f64]| {
        let rho = euclid_norm(x);
        if rho == 0.0 {
            return 0.0;
        }
        let full = grad_norm(&f.grad(x));
        if full == 0.0 {
            return 0.0;
        }
        (rho.ln().abs() * full).powf(nf)
    };

    let lhs_int = integrate_box(&BoxIntegrand::smooth(&lhs_fn), &domain, method)?;
    let mid_int = integrate_box(&BoxIntegrand::smooth(&mid_fn), &domain, method)?;
    let rhs_int = integrate_box(&BoxIntegrand::smooth(&rhs_fn), &domain, method)?;

    let constant = nf;
    let (lhs, err_lhs) = norm_and_err(&lhs_int, nf);
    let (mid_norm, err_mid_norm) = norm_and_err(&mid_int, nf);
    let (rhs_norm, err_rhs_norm) = norm_and_err(&rhs_int, nf);
    let (mid, err_mid) = (constant * mid_norm, constant * err_mid_norm);
    let (rhs, err_rhs) = (constant * rhs_norm, constant * err_rhs_norm);

    Ok(ChainVerification {
        case_id: format!("CKN|n={n}|{}", f.name()),
        lhs,
        mid,
        rhs,
        constant,
        pass_lhs_mid: chain_step_pass(lhs, mid, err_lhs, err_mid, tol_margin),
        pass_mid_rhs: chain_step_pass(mid, rhs, err_mid, err_rhs, tol_margin),
        err_lhs,
        err_mid,
        err_rhs,
        parts: vec![
            ("lhs_integral".into(), lhs_int.value),
            ("mid_integral".into(), mid_int.value),
            ("rhs_integral".into(), rhs_int.value),
        ],
    })
}

// ---------------------------------------------------------------------------
// Dilation scaling and pointwise sampling
// ---------------------------------------------------------------------------

/// Outcome of the dilation change-of-variables check.
#[derive(Debug, Clone)]
pub struct DilationCheck {
    /// `∫ F(D_λ x) dx` over the box.
    pub scaled: IntegralResult,
    /// `∫ F(x) dx` over the same box.
    pub base: IntegralResult,
    /// `scaled / base`.
    pub ratio: f64,
    /// `λ^{−Q}` for the isotropic group (`Q = n`).
    pub expected: f64,
}

/// Integrates `F(D_λ x)` and `F(x)` over the same box under the isotropic
/// dilation (weights all 1, homogeneous dimension `Q = n`) and reports the
/// ratio against `λ^{−Q}`.
///
/// The change of variables is exact on all of `ℝⁿ`; over a fixed box it
/// holds up to whatever mass `F` and its dilate carry outside, so pass a
/// box that contains the effective support of both.
pub fn dilation_scaling_check(
    integrand: &BoxIntegrand,
    domain: &BoxDomain,
    lambda: f64,
    method: &BoxMethod,
) -> Result<DilationCheck, CartesianError> {
    require(lambda.is_finite() && lambda > 0.0, || {
        format!("dilation parameter λ = {lambda} must be positive and finite")
    })?;
    let n = domain.n();
    let group = GroupSpec::make_group(&vec![1.0; n])?;
    let q_dim = group.q();

    let scaled_fn = |x: &[f64]| {
        let y = group.dilate(lambda, x).expect("isotropic dilation of an in-dimension point");
        (integrand.eval)(&y)
    };
    let scaled_integrand =
        BoxIntegrand { eval: &scaled_fn, singular_at_origin: integrand.singular_at_origin };
    let scaled = integrate_box(&scaled_integrand, domain, method)?;
    let base = integrate_box(integrand, domain, method)?;
    Ok(DilationCheck {
        scaled,
        base,
        ratio: ratio_or_zero(scaled.value, base.value),
        expected: lambda.powf(-q_dim),
    })
}

/// Report of the pointwise bound `|(x/|x|)·∇f| ≤ |∇f|` over random samples.
#[derive(Debug, Clone)]
pub struct RadialComponentReport {
    /// Samples drawn.
    pub samples: u64,
    /// Samples where the radial component exceeded the full gradient norm
    /// beyond 1 part in 10¹².
    pub violations: u64,
    /// Largest observed `(|(x/|x|)·∇f| − |∇f|)/|∇f|` over samples with a
    /// non-zero gradient (at most rounding-level when the bound holds).
    pub max_relative_excess: f64,
}

/// Samples the support box uniformly (seeded, deterministic) and compares
/// the radial gradient component against the full gradient norm pointwise.
pub fn radial_component_samples(
    f: &CartesianTestFunction,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<RadialComponentReport, CartesianError> {
    require(samples > 0, || "need at least one sample".into())?;
    require(n >= 1, || "need n ≥ 1".into())?;
    let domain = f.support_box(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; n];
    let mut violations = 0u64;
    let mut max_relative_excess = f64::NEG_INFINITY;
    for _ in 0..samples {
        for k in 0..n {
            let u: f64 = rng.gen();
            x[k] = domain.lo[k] + (domain.hi[k] - domain.lo[k]) * u;
        }
        let rho = euclid_norm(&x);
        if rho == 0.0 {
            continue;
        }
        let grad = f.grad(&x);
        let radial = radial_component(&grad, &x, rho).norm();
        let full = grad_norm(&grad);
        if full == 0.0 {
            // The scaled projection is exactly zero whenever the gradient
            // is; only non-zero gradients can violate.
            if radial > 0.0 {
                violations += 1;
            }
            continue;
        }
        let rel_excess = (radial - full) / full;
        if rel_excess > max_relative_excess {
            max_relative_excess = rel_excess;
        }
        if rel_excess > 1e-12 {
            violations += 1;
        }
    }
    Ok(RadialComponentReport { samples, violations, max_relative_excess })
}

/// Surface measure of the unit sphere `S^{n−1}` (`2π` for n = 2, `4π` for
/// n = 3, …). Used to fold the angular factor when comparing box integrals
/// of radial functions against the reduced 1-D pipeline.
pub fn unit_sphere_measure(n: usize) -> Result<f64, CartesianError> {
    if n == 0 || n > 16 {
        return Err(CartesianError::BadDimension {
            n,
            reason: "sphere measure supported for 1 ≤ n ≤ 16".into(),
        });
    }
    // ω_{n−1} = 2·π^{n/2} / Γ(n/2), with Γ on integers and half-integers
    // built by the recurrence Γ(z+1) = z·Γ(z).
    let half_n = n as f64 / 2.0;
    let mut gamma = if n % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut z = if n % 2 == 0 { 1.0 } else { 0.5 };
    while z < half_n - 0.25 {
        gamma *= z;
        z += 1.0;
    }
    Ok(2.0 * std::f64::consts::PI.powf(half_n) / gamma)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
