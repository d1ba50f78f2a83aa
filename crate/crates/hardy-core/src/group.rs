//! Homogeneous group models: anisotropic dilations and homogeneous quasi-norms.
//!
//! A group model here is the data actually used by the radial reduction: the
//! dilation weights `ν₁, …, νₙ` (each ≥ 1), the homogeneous dimension
//! `Q = ν₁ + … + νₙ`, and a quasi-norm `|·|` that is homogeneous of degree one
//! under the dilation `D_λ(x) = (λ^{ν₁} x₁, …, λ^{νₙ} xₙ)` and symmetric under
//! `x ↦ −x` (inversion in exponential coordinates of the first kind).

use thiserror::Error;

/// Errors from building or using a group model.
#[derive(Debug, Error)]
pub enum GroupError {
    /// The dilation weight list is empty or contains a weight < 1 or a
    /// non-finite value.
    #[error("invalid dilation weights: {0}")]
    InvalidWeights(String),
    /// A point has the wrong number of coordinates for this group.
    #[error("dimension mismatch: group has n = {expected}, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// The dilation parameter must be strictly positive and finite.
    #[error("dilation parameter must be positive and finite, got {0}")]
    BadDilation(f64),
    /// The quasi-norm kind is incompatible with the group's weights.
    #[error("quasi-norm incompatible with weights: {0}")]
    IncompatibleNorm(String),
}

/// Dilation structure of a homogeneous group in exponential coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    weights: Vec<f64>,
}

impl GroupSpec {
    /// Builds a group model from dilation weights.
    ///
    /// Every weight must be finite and ≥ 1 (the usual normalisation for
    /// graded groups; isotropic ℝⁿ is `[1.0; n]`). Fails on an empty list.
    pub fn make_group(weights: &[f64]) -> Result<Self, GroupError> {
        if weights.is_empty() {
            return Err(GroupError::InvalidWeights("empty weight list".into()));
        }
        for (k, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 1.0 {
                return Err(GroupError::InvalidWeights(format!(
                    "weight ν_{} = {} (must be finite and ≥ 1)",
                    k + 1,
                    w
                )));
            }
        }
        Ok(Self { weights: weights.to_vec() })
    }

    /// Topological dimension `n`.
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// Dilation weights `ν₁, …, νₙ`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Homogeneous dimension `Q = Σ νₖ`.
    pub fn q(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Anisotropic dilation `D_λ(x) = (λ^{ν₁} x₁, …, λ^{νₙ} xₙ)`.
    pub fn dilate(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>, GroupError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(GroupError::BadDilation(lambda));
        }
        if x.len() != self.n() {
            return Err(GroupError::DimensionMismatch { expected: self.n(), got: x.len() });
        }
        Ok(self
            .weights
            .iter()
            .zip(x)
            .map(|(&nu, &xi)| lambda.powf(nu) * xi)
            .collect())
    }

    /// Group inverse in exponential coordinates of the first kind: `x ↦ −x`.
    pub fn inverse(&self, x: &[f64]) -> Result<Vec<f64>, GroupError> {
        if x.len() != self.n() {
            return Err(GroupError::DimensionMismatch { expected: self.n(), got: x.len() });
        }
        Ok(x.iter().map(|&xi| -xi).collect())
    }
}

/// The homogeneous quasi-norms supported by the engine.
#[derive(Debug, Clone, PartialEq)]
pub enum QuasiNormKind {
    /// The Euclidean norm; a homogeneous norm only when all weights are 1.
    Euclidean,
    /// `|x| = max_k |x_k|^{1/ν_k}`, homogeneous for any weights.
    WeightedMax,
    /// `|x| = (Σ_k |x_k|^{2N/ν_k})^{1/(2N)}`; requires `2N ≥ ν_k` for all k
    /// so every exponent is ≥ 1.
    WeightedPower(f64),
    /// The Korányi norm `((x₁² + x₂²)² + x₃²)^{1/4}` on the Heisenberg-type
    /// weight pattern `(1, 1, 2)`.
    Koranyi,
}

/// A quasi-norm bound to the groups it is valid on.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiNormSpec {
    kind: QuasiNormKind,
}

impl QuasiNormSpec {
    /// Builds a quasi-norm of the given kind, checking compatibility with the
    /// group's dilation weights.
    pub fn new(kind: QuasiNormKind, group: &GroupSpec) -> Result<Self, GroupError> {
        match &kind {
            QuasiNormKind::Euclidean => {
                if group.weights().iter().any(|&w| w != 1.0) {
                    return Err(GroupError::IncompatibleNorm(
                        "euclidean norm is homogeneous only for weights all 1".into(),
                    ));
                }
            }
            QuasiNormKind::WeightedMax => {}
            QuasiNormKind::WeightedPower(n_half) => {
                if !(n_half.is_finite() && *n_half > 0.0) {
                    return Err(GroupError::IncompatibleNorm(format!(
                        "weighted-power parameter N = {n_half} must be positive and finite"
                    )));
                }
                let two_n = 2.0 * n_half;
                if let Some(bad) = group.weights().iter().find(|&&w| two_n < w) {
                    return Err(GroupError::IncompatibleNorm(format!(
                        "weighted-power N = {n_half} needs 2N ≥ ν_k, violated by ν = {bad}"
                    )));
                }
            }
            QuasiNormKind::Koranyi => {
                if group.weights() != [1.0, 1.0, 2.0] {
                    return Err(GroupError::IncompatibleNorm(
                        "koranyi norm requires the weight pattern (1, 1, 2)".into(),
                    ));
                }
            }
        }
        Ok(Self { kind })
    }

    /// The norm kind.
    pub fn kind(&self) -> &QuasiNormKind {
        &self.kind
    }

    /// Evaluates the quasi-norm `|x|`.
    ///
    /// Guaranteed homogeneous of degree one under [`GroupSpec::dilate`] and
    /// symmetric under `x ↦ −x`; zero exactly at the origin.
    pub fn quasi_norm(&self, group: &GroupSpec, x: &[f64]) -> Result<f64, GroupError> {
        if x.len() != group.n() {
            return Err(GroupError::DimensionMismatch { expected: group.n(), got: x.len() });
        }
        let w = group.weights();
        let value = match &self.kind {
            QuasiNormKind::Euclidean => x.iter().map(|xi| xi * xi).sum::<f64>().sqrt(),
            QuasiNormKind::WeightedMax => x
                .iter()
                .zip(w)
                .map(|(&xi, &nu)| xi.abs().powf(1.0 / nu))
                .fold(0.0_f64, f64::max),
            QuasiNormKind::WeightedPower(n_half) => {
                let two_n = 2.0 * n_half;
                x.iter()
                    .zip(w)
                    .map(|(&xi, &nu)| xi.abs().powf(two_n / nu))
                    .sum::<f64>()
                    .powf(1.0 / two_n)
            }
            QuasiNormKind::Koranyi => {
                let plane = x[0] * x[0] + x[1] * x[1];
                (plane * plane + x[2] * x[2]).powf(0.25)
            }
        };
        Ok(value)
    }
}
