//! The four norm families over tensor flattenings: the generalized norm
//! (all canonical flattenings, learnable simplex weights), Tucker
//! (per-axis), tensor-train (prefixes), and last-axis flattening.
//!
//! Values, subgradients with respect to the tensor, and exact gradients
//! with respect to the softmax logits are provided.

use serde::{Deserialize, Serialize};

use crate::error::{GttnError, Result};
use crate::linalg::{self, DEFAULT_SUBGRADIENT_TOL};
use crate::tensor::{canonical_subsets, AxisSubset, DenseTensor};

/// Which overlapped trace norm to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormFamily {
    Gttn,
    Tucker,
    Tt,
    Laf,
}

impl NormFamily {
    pub fn name(&self) -> &'static str {
        match self {
            NormFamily::Gttn => "gttn",
            NormFamily::Tucker => "tucker",
            NormFamily::Tt => "tt",
            NormFamily::Laf => "laf",
        }
    }
}

impl std::str::FromStr for NormFamily {
    type Err = GttnError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gttn" => Ok(NormFamily::Gttn),
            "tucker" => Ok(NormFamily::Tucker),
            "tt" => Ok(NormFamily::Tt),
            "laf" => Ok(NormFamily::Laf),
            other => Err(GttnError::InvalidArgument(format!(
                "unknown norm family '{other}'"
            ))),
        }
    }
}

/// How the combination weights are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    FixedUniform,
    LearnableSoftmax,
}

/// A norm family instantiated for a tensor order: the flattening subsets
/// (canonical representatives, duplicates kept so per-family weights stay
/// faithful to their definitions) and the weight parameterization.
#[derive(Debug, Clone)]
pub struct RegularizerSpec {
    pub family: NormFamily,
    pub order: usize,
    pub subsets: Vec<AxisSubset>,
    pub weight_mode: WeightMode,
}

impl RegularizerSpec {
    pub fn new(family: NormFamily, order: usize, weight_mode: WeightMode) -> Result<Self> {
        if order < 2 {
            return Err(GttnError::InvalidOrder(format!(
                "regularizers need order >= 2, got {order}"
            )));
        }
        let subsets = match family {
            NormFamily::Gttn => canonical_subsets(order)?,
            NormFamily::Tucker => (1..=order)
                .map(|i| AxisSubset::new(&[i], order).map(|s| s.canonical()))
                .collect::<Result<Vec<_>>>()?,
            NormFamily::Tt => (1..order)
                .map(|i| {
                    let prefix: Vec<usize> = (1..=i).collect();
                    AxisSubset::new(&prefix, order)
                })
                .collect::<Result<Vec<_>>>()?,
            NormFamily::Laf => vec![AxisSubset::new(&[order], order)?.canonical()],
        };
        let weight_mode = if family == NormFamily::Laf {
            WeightMode::FixedUniform
        } else {
            weight_mode
        };
        Ok(RegularizerSpec { family, order, subsets, weight_mode })
    }

    pub fn num_subsets(&self) -> usize {
        self.subsets.len()
    }

    pub fn uniform_weights(&self) -> WeightState {
        WeightState::uniform(self.num_subsets())
    }
}

/// Simplex weights over a spec's subsets, stored as softmax logits.
#[derive(Debug, Clone)]
pub struct WeightState {
    beta: Vec<f64>,
    alpha: Vec<f64>,
}

impl WeightState {
    pub fn from_beta(beta: Vec<f64>) -> Result<Self> {
        let alpha = alpha_from_beta(&beta)?;
        Ok(WeightState { beta, alpha })
    }

    pub fn uniform(n: usize) -> Self {
        WeightState::from_beta(vec![0.0; n]).expect("n >= 1")
    }

    /// Pin explicit simplex weights; zeros are allowed (unlike the softmax
    /// parameterization) so baseline patterns like one-hot LAF can be
    /// expressed directly.
    pub fn from_alpha(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(GttnError::InvalidArgument("empty weight vector".into()));
        }
        if alpha.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(GttnError::InvalidArgument(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = alpha.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(GttnError::InvalidArgument(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        let beta = alpha.iter().map(|a| a.max(f64::MIN_POSITIVE).ln()).collect();
        Ok(WeightState { beta, alpha })
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }
}

/// Stable softmax (max-subtraction); output sums to 1.
pub fn alpha_from_beta(beta: &[f64]) -> Result<Vec<f64>> {
    if beta.is_empty() {
        return Err(GttnError::InvalidArgument("empty logit vector".into()));
    }
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(GttnError::InvalidArgument("non-finite logit".into()));
    }
    let max = beta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = beta.iter().map(|b| (b - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / sum).collect())
}

fn check_weights(spec: &RegularizerSpec, weights: &WeightState) -> Result<()> {
    if weights.len() != spec.num_subsets() {
        return Err(GttnError::InvalidArgument(format!(
            "{} weights for {} subsets",
            weights.len(),
            spec.num_subsets()
        )));
    }
    Ok(())
}

fn check_order(spec: &RegularizerSpec, w: &DenseTensor) -> Result<()> {
    if w.order() != spec.order {
        return Err(GttnError::Shape(format!(
            "{}-way tensor against an order-{} regularizer",
            w.order(),
            spec.order
        )));
    }
    Ok(())
}

/// Per-subset trace norms `‖W_{s}‖_*`.
pub fn flattening_norms(w: &DenseTensor, spec: &RegularizerSpec) -> Result<Vec<f64>> {
    check_order(spec, w)?;
    spec.subsets
        .iter()
        .map(|s| linalg::trace_norm(&w.flatten(s)?))
        .collect()
}

/// Regularizer value `Σ_s α_s ‖W_{s}‖_*`.
pub fn reg_value(w: &DenseTensor, spec: &RegularizerSpec, weights: &WeightState) -> Result<f64> {
    check_weights(spec, weights)?;
    let norms = flattening_norms(w, spec)?;
    Ok(norms
        .iter()
        .zip(weights.alpha())
        .map(|(n, a)| a * n)
        .sum())
}

/// Subgradient with respect to the tensor: each flattening contributes
/// `α_s · unflatten(U V^T, s)`.
pub fn reg_subgrad_w(
    w: &DenseTensor,
    spec: &RegularizerSpec,
    weights: &WeightState,
) -> Result<DenseTensor> {
    check_order(spec, w)?;
    check_weights(spec, weights)?;
    let mut grad = DenseTensor::zeros(w.dims())?;
    for (s, &a) in spec.subsets.iter().zip(weights.alpha()) {
        if a == 0.0 {
            continue;
        }
        let flat = w.flatten(s)?;
        let sub = linalg::trace_norm_subgradient(&flat, DEFAULT_SUBGRADIENT_TOL)?;
        let term = DenseTensor::unflatten(&sub, s, w.dims())?;
        grad = grad.add(&term.scale(a))?;
    }
    Ok(grad)
}

/// Gradient of `λ Σ_s α_s(β) ‖W_{s}‖_*` with respect to the logits β.
///
/// The two-term softmax quotient derivative collapses to
/// `λ α_s (‖W_{s}‖_* − Σ_t α_t ‖W_{t}‖_*)`, which avoids the cancellation
/// of subtracting two large quotients. Entries sum to zero.
pub fn reg_grad_beta(
    w: &DenseTensor,
    spec: &RegularizerSpec,
    weights: &WeightState,
    lambda: f64,
) -> Result<Vec<f64>> {
    if spec.weight_mode != WeightMode::LearnableSoftmax {
        return Err(GttnError::InvalidMode(
            "beta gradient requires learnable-softmax weights".into(),
        ));
    }
    if lambda < 0.0 {
        return Err(GttnError::InvalidArgument(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    check_weights(spec, weights)?;
    let norms = flattening_norms(w, spec)?;
    let mean: f64 = norms
        .iter()
        .zip(weights.alpha())
        .map(|(n, a)| a * n)
        .sum();
    Ok(norms
        .iter()
        .zip(weights.alpha())
        .map(|(n, a)| lambda * a * (n - mean))
        .collect())
}

/// Minimum trace norm over the spec's subsets and its achieving subset
/// (ties broken by lexicographic subset order).
pub fn min_form_value(w: &DenseTensor, spec: &RegularizerSpec) -> Result<(f64, AxisSubset)> {
    let norms = flattening_norms(w, spec)?;
    let mut best = 0usize;
    for (i, n) in norms.iter().enumerate() {
        if *n < norms[best] {
            best = i;
        }
    }
    Ok((norms[best], spec.subsets[best].clone()))
}
