//! The empirical K-function and its gradient map, the K-transform.
//!
//! For a sample `x₁ … xₙ` the K-function is
//!
//! ```text
//! f(s) = (1/n) Σᵢ (‖s − xᵢ‖ − ‖xᵢ‖)
//! ```
//!
//! a convex function whose (sub)gradient `(1/n) Σᵢ (s − xᵢ)/‖s − xᵢ‖` maps
//! ℝᵈ into the closed unit ball. At an atom `s = xᵢ` the term is replaced by
//! the zero vector, which is a valid element of the subdifferential of `‖·‖`
//! at the origin. All reductions run in row order so results are bit-stable.

use serde::Serialize;

use crate::data::{distance, norm, SampleSet};
use crate::error::{check_dim, Error, Result};

/// Distance below which a sample point is treated as coinciding with the
/// evaluation point.
pub const DEFAULT_EXCLUDE_RADIUS: f64 = 1e-12;

/// Value of the K-transform at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformValue {
    pub g: Vec<f64>,
    pub norm: f64,
}

impl TransformValue {
    fn from_vector(g: Vec<f64>) -> Self {
        let norm = norm(&g);
        TransformValue { g, norm }
    }
}

pub fn k_function(sample: &SampleSet, s: &[f64]) -> Result<f64> {
    check_dim(sample.dim(), s.len())?;
    let mut acc = 0.0;
    for x in sample.rows() {
        acc += distance(s, x) - norm(x);
    }
    Ok(acc / sample.len() as f64)
}

pub fn k_transform(sample: &SampleSet, s: &[f64], exclude_radius: f64) -> Result<TransformValue> {
    check_dim(sample.dim(), s.len())?;
    if !(exclude_radius >= 0.0) {
        return Err(Error::DomainViolation(format!(
            "exclude_radius must be >= 0, got {exclude_radius}"
        )));
    }
    let mut g = unit_vector_sum(sample.rows(), s, exclude_radius);
    let n = sample.len() as f64;
    g.iter_mut().for_each(|c| *c /= n);
    Ok(TransformValue::from_vector(g))
}

/// Sum of unit vectors `(s − x)/‖s − x‖` over rows farther than
/// `exclude_radius` from `s`.
pub(crate) fn unit_vector_sum<'a>(rows: impl Iterator<Item = &'a [f64]>, s: &[f64], exclude_radius: f64) -> Vec<f64> {
    let d = s.len();
    let mut g = vec![0.0; d];
    let mut diff = vec![0.0; d];
    for x in rows {
        for k in 0..d {
            diff[k] = s[k] - x[k];
        }
        let r = norm(&diff);
        if r > exclude_radius {
            for k in 0..d {
                g[k] += diff[k] / r;
            }
        }
    }
    g
}

/// The one-dimensional K-transform written as a signed cdf:
/// `(#{xᵢ < s} − #{xᵢ > s}) / n`.
pub fn signed_cdf_1d(sample: &SampleSet, s: f64) -> Result<f64> {
    check_dim(1, sample.dim())?;
    let mut acc = 0.0;
    for x in sample.as_slice() {
        if *x < s {
            acc += 1.0;
        } else if *x > s {
            acc -= 1.0;
        }
    }
    Ok(acc / sample.len() as f64)
}

/// Empirical `E[‖s − X‖⁻ᵏ]`, skipping points within `exclude_radius` of `s`
/// while keeping the divisor at `n`.
///
/// Only `k ≤ d − 1` is accepted: beyond that the population integral may
/// diverge and the sample mean estimates nothing. `k = 0` returns exactly 1.
pub fn mean_inverse_norm_power(sample: &SampleSet, s: &[f64], k: u32, exclude_radius: f64) -> Result<f64> {
    check_dim(sample.dim(), s.len())?;
    if k as usize > sample.dim() - 1 {
        return Err(Error::DomainViolation(format!(
            "E[‖s − X‖^-{k}] is only estimated for k <= d - 1 = {}",
            sample.dim() - 1
        )));
    }
    if !(exclude_radius > 0.0) {
        return Err(Error::DomainViolation(format!(
            "exclude_radius must be > 0, got {exclude_radius}"
        )));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let mut acc = 0.0;
    for x in sample.rows() {
        let r = distance(s, x);
        if r > exclude_radius {
            acc += r.powi(-(k as i32));
        }
    }
    Ok(acc / sample.len() as f64)
}
