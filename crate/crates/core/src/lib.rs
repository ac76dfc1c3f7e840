//! Empirical K-transforms and geometric quantiles.
//!
//! The K-function of a sample `x₁ … xₙ ⊂ ℝᵈ` is the convex function
//! `f(s) = (1/n) Σᵢ (‖s − xᵢ‖ − ‖xᵢ‖)`. Its gradient, the K-transform, maps
//! ℝᵈ one-to-one onto the open unit ball, and its inverse is the geometric
//! (M-)quantile. In one dimension the K-transform is the signed cdf
//! `2F(s) − 1`.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`data`] | [`SampleSet`], [`Direction`], CSV/JSON point files |
//! | [`transform`] | [`k_function`], [`k_transform`], [`signed_cdf_1d`], [`mean_inverse_norm_power`] |
//! | [`solver`] | MM iteration for the inverse K-transform: [`solve_quantile`] |
//! | [`contour`] | quantile contours, forward images, [`classify_outliers`] |
//! | [`distributions`] | seeded samplers for the Gaussian, banana, spiral and square clouds |
//! | [`polylap`] | finite-difference checks of the poly-Laplacian identities |
//! | [`figure`] | SVG rendering of contour figures |
//!
//! ```
//! use kquantile::{solve_quantile, k_transform, Direction, SampleSet, SolverConfig};
//!
//! let sample = SampleSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])?;
//! let median = solve_quantile(&sample, &Direction::zero(2), &SolverConfig::default())?;
//! assert!((median.quantile[0] - 0.5).abs() < 1e-9);
//!
//! let v = Direction::new(vec![0.3, -0.2])?;
//! let q = solve_quantile(&sample, &v, &SolverConfig::default())?;
//! let back = k_transform(&sample, &q.quantile, 1e-12)?;
//! assert!((back.g[0] - 0.3).abs() < 1e-8 && (back.g[1] + 0.2).abs() < 1e-8);
//! # Ok::<(), kquantile::Error>(())
//! ```

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contour;
pub mod data;
pub mod distributions;
pub mod error;
pub mod figure;
pub mod polylap;
pub mod solver;
pub mod transform;

pub use contour::{classify_outliers, contour_set, forward_image, inverse_contour, ContourSet, OutlierScore};
pub use data::{load_samples, save_matrix, validate_direction, Direction, Format, SampleSet};
pub use distributions::{density, sample_mixture, MixtureModel};
pub use error::{Error, Result};
pub use figure::{render_figure, render_preset, FigurePreset, Side};
pub use polylap::{
    numeric_laplacian, polylap_coefficient, verify_corollary, verify_lemma4, verify_theorem, VerificationReport,
};
pub use solver::{mm_step, primal_objective, solve_quantile, Init, SolverConfig, SolverReport};
pub use transform::{k_function, k_transform, mean_inverse_norm_power, signed_cdf_1d, TransformValue};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/k-transform.md")]
    mod k_transform {}
    #[doc = include_str!("../../../book/src/quantiles.md")]
    mod quantiles {}
    #[doc = include_str!("../../../book/src/contours.md")]
    mod contours {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/identities.md")]
    mod identities {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
