//! Geometric quantiles by majorize–minimize iteration.
//!
//! The empirical geometric quantile for a direction `v` in the open unit ball
//! minimizes
//!
//! ```text
//! Φ(s) = (1/n) Σᵢ ‖xᵢ − s‖ + ⟨v, xᵢ − s⟩
//! ```
//!
//! Majorizing each distance by the quadratic `‖s − xᵢ‖²/(2rᵢ) + rᵢ/2`, with
//! `rᵢ = ‖s_prev − xᵢ‖`, and minimizing the surrogate gives the update
//!
//! ```text
//! s_next = (n·v + Σᵢ xᵢ/rᵢ) / Σᵢ 1/rᵢ
//! ```
//!
//! which never increases `Φ`. The fixed points are exactly the points whose
//! K-transform equals `v`, so the solver inverts the K-transform.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::data::{distance, norm, Direction, SampleSet};
use crate::error::{check_dim, Error, Result};
use crate::transform::DEFAULT_EXCLUDE_RADIUS;

/// Starting point of the iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Coordinate-wise sample mean.
    Mean,
    Given(Vec<f64>),
    /// A uniformly chosen sample row plus standard normal jitter.
    SeededRandom(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Stop once `‖s_k − s_{k−1}‖₂ ≤ tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub init: Init,
    pub exclude_radius: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-10,
            max_iter: 10_000,
            init: Init::Mean,
            exclude_radius: DEFAULT_EXCLUDE_RADIUS,
        }
    }
}

impl SolverConfig {
    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::DomainViolation(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::DomainViolation("max_iter must be >= 1".into()));
        }
        if !(self.exclude_radius >= 0.0) {
            return Err(Error::DomainViolation(format!(
                "exclude_radius must be >= 0, got {}",
                self.exclude_radius
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverReport {
    pub quantile: Vec<f64>,
    pub iterations: usize,
    pub final_step: f64,
    /// Objective at the starting point and after every update.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
    /// Index of the sample point the solution sits on, when the minimizer is
    /// an atom of the empirical measure.
    pub atom: Option<usize>,
}

/// `(1/n) Σᵢ ‖xᵢ − s‖ + ⟨v, xᵢ − s⟩`; the terms constant in `s` are dropped.
pub fn primal_objective(sample: &SampleSet, v: &Direction, s: &[f64]) -> Result<f64> {
    check_dim(sample.dim(), s.len())?;
    check_dim(sample.dim(), v.dim())?;
    let v = v.as_slice();
    let mut acc = 0.0;
    for x in sample.rows() {
        acc += objective_term(x, v, s, distance(x, s));
    }
    Ok(acc / sample.len() as f64)
}

#[inline]
fn objective_term(x: &[f64], v: &[f64], s: &[f64], r: f64) -> f64 {
    let mut inner = 0.0;
    for k in 0..s.len() {
        inner += v[k] * (x[k] - s[k]);
    }
    r + inner
}

/// One pass over the sample at the current iterate.
struct Pass {
    next: Option<Vec<f64>>,
    objective: f64,
    /// Sum of unit vectors `(s − xⱼ)/rⱼ` over non-excluded points.
    unit_sum: Vec<f64>,
    excluded: usize,
    first_excluded: Option<usize>,
}

fn pass(sample: &SampleSet, v: &[f64], s: &[f64], exclude_radius: f64) -> Pass {
    let d = s.len();
    let n = sample.len() as f64;
    let mut weighted = vec![0.0; d];
    let mut unit_sum = vec![0.0; d];
    let mut weight = 0.0;
    let mut objective = 0.0;
    let mut excluded = 0;
    let mut first_excluded = None;
    for (i, x) in sample.rows().enumerate() {
        let r = distance(x, s);
        objective += objective_term(x, v, s, r);
        if r > exclude_radius {
            let w = 1.0 / r;
            weight += w;
            for k in 0..d {
                weighted[k] += x[k] * w;
                unit_sum[k] += (s[k] - x[k]) * w;
            }
        } else {
            excluded += 1;
            first_excluded.get_or_insert(i);
        }
    }
    let next = (excluded < sample.len()).then(|| (0..d).map(|k| (n * v[k] + weighted[k]) / weight).collect());
    Pass {
        next,
        objective: objective / n,
        unit_sum,
        excluded,
        first_excluded,
    }
}

/// A single MM update from `s_prev`.
///
/// Points within `exclude_radius` of `s_prev` are dropped from both sums.
/// Fails with [`Error::DegenerateStep`] when that removes every point.
pub fn mm_step(sample: &SampleSet, v: &Direction, s_prev: &[f64], exclude_radius: f64) -> Result<Vec<f64>> {
    check_dim(sample.dim(), s_prev.len())?;
    check_dim(sample.dim(), v.dim())?;
    pass(sample, v.as_slice(), s_prev, exclude_radius)
        .next
        .ok_or(Error::DegenerateStep)
}

fn initial_point(sample: &SampleSet, init: &Init) -> Result<Vec<f64>> {
    match init {
        Init::Mean => Ok(sample.mean()),
        Init::Given(s0) => {
            check_dim(sample.dim(), s0.len())?;
            if s0.iter().any(|x| !x.is_finite()) {
                return Err(Error::DomainViolation("initial point must be finite".into()));
            }
            Ok(s0.clone())
        }
        Init::SeededRandom(seed) => {
            let mut rng = ChaCha20Rng::seed_from_u64(*seed);
            let rows: Vec<usize> = (0..sample.len()).collect();
            let i = *rows.choose(&mut rng).expect("sample is non-empty");
            Ok(sample
                .row(i)
                .iter()
                .map(|x| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    x + z
                })
                .collect())
        }
    }
}

/// Computes the geometric quantile of `sample` for direction `v`.
///
/// Stops when successive iterates are within `cfg.tol`, or when the iterate
/// sits on an atom `xᵢ` that is itself optimal, i.e. `v` lies within `m/n` of
/// the K-transform of the remaining points (`m` the multiplicity of `xᵢ`).
/// Returns [`Error::MaxIterExceeded`] carrying the unconverged report when the
/// iteration cap is hit.
pub fn solve_quantile(sample: &SampleSet, v: &Direction, cfg: &SolverConfig) -> Result<SolverReport> {
    cfg.validate()?;
    check_dim(sample.dim(), v.dim())?;
    let vs = v.as_slice();
    let n = sample.len() as f64;
    let mut s = initial_point(sample, &cfg.init)?;
    let mut trace = Vec::new();
    let mut final_step = f64::INFINITY;

    for iter in 1..=cfg.max_iter {
        let p = pass(sample, vs, &s, cfg.exclude_radius);
        trace.push(p.objective);

        if p.excluded > 0 {
            let residual: Vec<f64> = p.unit_sum.iter().zip(vs).map(|(u, vk)| u / n - vk).collect();
            if norm(&residual) <= p.excluded as f64 / n {
                return Ok(SolverReport {
                    quantile: s,
                    iterations: iter - 1,
                    final_step: if iter == 1 { 0.0 } else { final_step },
                    objective_trace: trace,
                    converged: true,
                    atom: p.first_excluded,
                });
            }
        }
        let Some(next) = p.next else {
            // Unreachable in practice: if every point is excluded the unit sum
            // is zero and the atom test above passes for any ‖v‖ < 1.
            return Err(Error::DegenerateStep);
        };

        final_step = distance(&next, &s);
        s = next;
        if final_step <= cfg.tol {
            trace.push(primal_objective(sample, v, &s)?);
            return Ok(SolverReport {
                quantile: s,
                iterations: iter,
                final_step,
                objective_trace: trace,
                converged: true,
                atom: None,
            });
        }
    }

    trace.push(primal_objective(sample, v, &s)?);
    Err(Error::MaxIterExceeded(Box::new(SolverReport {
        quantile: s,
        iterations: cfg.max_iter,
        final_step,
        objective_trace: trace,
        converged: false,
        atom: None,
    })))
}
