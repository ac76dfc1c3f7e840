//! Seeded samplers for the synthetic point clouds used in the figures.
//!
//! # Generator
//!
//! Every sampler draws from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64(seed)`. Independent quantities use separate ChaCha streams
//! of that same seed (`set_stream(k)`):
//!
//! * Gaussian mixtures: stream 0 picks the component of each draw with one
//!   `f64` uniform on `[0, 1)` compared against the cumulative weights;
//!   stream `k + 1` feeds component `k`. A component draw is `μ + L·z`, where
//!   `L` is the lower-triangular Cholesky factor of the covariance and `z`
//!   holds `d` `StandardNormal` variates (rand_distr's ziggurat) taken in
//!   coordinate order.
//! * Spiral: stream 0 draws the curve parameter, stream 1 the jitter.
//! * Square: stream 0 draws the ring and perimeter position, stream 1 the
//!   jitter.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::SampleSet;
use crate::error::{check_dim, Error, Result};

/// A finite mixture of multivariate normal distributions.
#[derive(Debug, Clone)]
pub struct MixtureModel {
    weights: Vec<f64>,
    means: Vec<DVector<f64>>,
    covariances: Vec<DMatrix<f64>>,
    factors: Vec<DMatrix<f64>>,
    log_norms: Vec<f64>,
}

impl MixtureModel {
    /// Validates weights (positive, summing to one within 1e-12) and that
    /// every covariance is symmetric positive definite.
    pub fn new(weights: Vec<f64>, means: Vec<Vec<f64>>, covariances: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let k = weights.len();
        if k == 0 || means.len() != k || covariances.len() != k {
            return Err(Error::DomainViolation(format!(
                "mixture needs matching non-empty weights/means/covariances (got {k}, {}, {})",
                means.len(),
                covariances.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::DomainViolation(format!(
                "weights must be positive, got {weights:?}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::DomainViolation(format!("weights sum to {total}, not 1")));
        }
        let d = means[0].len();
        if d == 0 {
            return Err(Error::DomainViolation("mixture dimension must be >= 1".into()));
        }
        let mut mean_vecs = Vec::with_capacity(k);
        let mut cov_mats = Vec::with_capacity(k);
        let mut factors = Vec::with_capacity(k);
        let mut log_norms = Vec::with_capacity(k);
        for (mean, cov) in means.iter().zip(&covariances) {
            check_dim(d, mean.len())?;
            check_dim(d, cov.len())?;
            for row in cov {
                check_dim(d, row.len())?;
            }
            let m = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
            if m.iter().any(|x| !x.is_finite()) || mean.iter().any(|x| !x.is_finite()) {
                return Err(Error::DomainViolation("mixture parameters must be finite".into()));
            }
            if (0..d).any(|i| (0..i).any(|j| m[(i, j)] != m[(j, i)])) {
                return Err(Error::DomainViolation(format!("covariance is not symmetric: {cov:?}")));
            }
            let chol = m
                .clone()
                .cholesky()
                .ok_or_else(|| Error::DomainViolation(format!("covariance is not positive definite: {cov:?}")))?;
            let l = chol.l();
            let log_det: f64 = (0..d).map(|i| 2.0 * l[(i, i)].ln()).sum();
            log_norms.push(-0.5 * (d as f64 * (2.0 * std::f64::consts::PI).ln() + log_det));
            factors.push(l);
            mean_vecs.push(DVector::from_column_slice(mean));
            cov_mats.push(m);
        }
        Ok(MixtureModel {
            weights,
            means: mean_vecs,
            covariances: cov_mats,
            factors,
            log_norms,
        })
    }

    /// A single Gaussian component.
    pub fn gaussian(mean: Vec<f64>, covariance: Vec<Vec<f64>>) -> Result<Self> {
        MixtureModel::new(vec![1.0], vec![mean], vec![covariance])
    }

    /// `N(0, I_d)`.
    pub fn standard_normal(d: usize) -> Result<Self> {
        let cov = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        MixtureModel::gaussian(vec![0.0; d], cov)
    }

    /// Bivariate normal with zero mean, unit variances and correlation `rho`.
    pub fn correlated_gaussian(rho: f64) -> Result<Self> {
        MixtureModel::gaussian(vec![0.0, 0.0], vec![vec![1.0, rho], vec![rho, 1.0]])
    }

    /// The three-component banana-shaped mixture
    /// `3/8·N((−3,0), Σ₁) + 3/8·N((3,0), Σ₂) + 1/4·N((0,−2.5), Σ₃)`.
    pub fn banana() -> Self {
        MixtureModel::new(
            vec![3.0 / 8.0, 3.0 / 8.0, 1.0 / 4.0],
            vec![vec![-3.0, 0.0], vec![3.0, 0.0], vec![0.0, -2.5]],
            vec![
                vec![vec![5.0, -4.0], vec![-4.0, 5.0]],
                vec![vec![5.0, 4.0], vec![4.0, 5.0]],
                vec![vec![4.0, 0.0], vec![0.0, 1.0]],
            ],
        )
        .expect("banana parameters are valid")
    }

    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> Vec<Vec<f64>> {
        self.means.iter().map(|m| m.as_slice().to_vec()).collect()
    }

    pub fn covariances(&self) -> Vec<Vec<Vec<f64>>> {
        self.covariances
            .iter()
            .map(|m| m.row_iter().map(|r| r.iter().copied().collect()).collect())
            .collect()
    }

    /// Mixture mean `Σₖ wₖ μₖ`.
    pub fn mean(&self) -> Vec<f64> {
        let mut out = DVector::zeros(self.dim());
        for (w, m) in self.weights.iter().zip(&self.means) {
            out += m * *w;
        }
        out.as_slice().to_vec()
    }

    /// Probability density at `s`.
    pub fn density(&self, s: &[f64]) -> Result<f64> {
        check_dim(self.dim(), s.len())?;
        let x = DVector::from_column_slice(s);
        let mut total = 0.0;
        for k in 0..self.weights.len() {
            let centered = &x - &self.means[k];
            let z = self.factors[k]
                .solve_lower_triangular(&centered)
                .expect("cholesky factor has a positive diagonal");
            total += self.weights[k] * (self.log_norms[k] - 0.5 * z.norm_squared()).exp();
        }
        Ok(total)
    }
}

fn stream(seed: u64, id: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::DomainViolation("sample size must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Draws `n` i.i.d. points from `model`. See the module docs for the exact
/// generator layout.
pub fn sample_mixture(model: &MixtureModel, n: usize, seed: u64) -> Result<SampleSet> {
    check_count(n)?;
    let d = model.dim();
    let mut selector = stream(seed, 0);
    let mut components: Vec<ChaCha20Rng> = (0..model.weights.len()).map(|k| stream(seed, k as u64 + 1)).collect();
    let mut cumulative = Vec::with_capacity(model.weights.len());
    let mut acc = 0.0;
    for w in &model.weights {
        acc += w;
        cumulative.push(acc);
    }

    let mut data = Vec::with_capacity(n * d);
    let mut z = DVector::zeros(d);
    for _ in 0..n {
        let u: f64 = selector.random();
        let k = cumulative.iter().position(|c| u < *c).unwrap_or(cumulative.len() - 1);
        let rng = &mut components[k];
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(rng);
        }
        let x = &model.means[k] + &model.factors[k] * &z;
        data.extend_from_slice(x.as_slice());
    }
    SampleSet::new(n, d, data)
}

pub fn density(model: &MixtureModel, s: &[f64]) -> Result<f64> {
    model.density(s)
}

/// Zero-mean, unit-variance bivariate normal with correlation 0.75.
pub fn figure1_gaussian(n: usize, seed: u64) -> Result<SampleSet> {
    sample_mixture(&MixtureModel::correlated_gaussian(0.75)?, n, seed)
}

pub fn banana_sample(n: usize, seed: u64) -> Result<SampleSet> {
    sample_mixture(&MixtureModel::banana(), n, seed)
}

/// Archimedean spiral with Gaussian jitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralParams {
    pub inner_radius: f64,
    /// Radial growth per radian.
    pub growth: f64,
    /// Largest curve parameter; the parameter is uniform on `[0, max_angle]`.
    pub max_angle: f64,
    pub jitter: f64,
}

impl Default for SpiralParams {
    fn default() -> Self {
        SpiralParams {
            inner_radius: 0.5,
            growth: 2.0,
            max_angle: 3.0 * std::f64::consts::PI,
            jitter: 0.15,
        }
    }
}

pub const SPIRAL_DEFAULT_N: usize = 2259;
pub const SQUARE_DEFAULT_N: usize = 1242;

pub fn spiral_sample(n: usize, seed: u64) -> Result<SampleSet> {
    spiral_sample_with(n, seed, SpiralParams::default())
}

pub fn spiral_sample_with(n: usize, seed: u64, p: SpiralParams) -> Result<SampleSet> {
    check_count(n)?;
    let mut curve = stream(seed, 0);
    let mut noise = stream(seed, 1);
    let mut data = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let t = p.max_angle * curve.random::<f64>();
        let r = p.inner_radius + p.growth * t;
        let (zx, zy): (f64, f64) = (StandardNormal.sample(&mut noise), StandardNormal.sample(&mut noise));
        data.push(r * t.cos() + p.jitter * zx);
        data.push(r * t.sin() + p.jitter * zy);
    }
    SampleSet::new(n, 2, data)
}

/// Two concentric axis-aligned square outlines with Gaussian jitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareParams {
    pub inner_half_width: f64,
    pub outer_half_width: f64,
    /// Probability that a point is placed on the inner square.
    pub inner_fraction: f64,
    pub jitter: f64,
}

impl Default for SquareParams {
    fn default() -> Self {
        SquareParams {
            inner_half_width: 1.0,
            outer_half_width: 2.5,
            inner_fraction: 0.4,
            jitter: 0.08,
        }
    }
}

pub fn square_sample(n: usize, seed: u64) -> Result<SampleSet> {
    square_sample_with(n, seed, SquareParams::default())
}

pub fn square_sample_with(n: usize, seed: u64, p: SquareParams) -> Result<SampleSet> {
    check_count(n)?;
    let mut placement = stream(seed, 0);
    let mut noise = stream(seed, 1);
    let mut data = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let w = if placement.random::<f64>() < p.inner_fraction {
            p.inner_half_width
        } else {
            p.outer_half_width
        };
        // Arc-length position along the perimeter, side by side.
        let u = 8.0 * w * placement.random::<f64>();
        let side = ((u / (2.0 * w)) as usize).min(3);
        let t = u - 2.0 * w * side as f64 - w;
        let (x, y) = match side {
            0 => (t, -w),
            1 => (w, t),
            2 => (-t, w),
            _ => (-w, -t),
        };
        let (zx, zy): (f64, f64) = (StandardNormal.sample(&mut noise), StandardNormal.sample(&mut noise));
        data.push(x + p.jitter * zx);
        data.push(y + p.jitter * zy);
    }
    SampleSet::new(n, 2, data)
}
