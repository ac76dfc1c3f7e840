//! Quantile contours and radial outlier scores.
//!
//! A quantile contour of radius `r` is the inverse K-transform image of the
//! circle `{v : ‖v‖ = r}`. Since the K-transform is a bijection onto the open
//! unit ball, a point lies outside the radius-`r` contour exactly when its own
//! transform has norm at least `r`; [`classify_outliers`] uses that form and
//! the polygons are only needed for drawing and cross-checks.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::data::{norm, Direction, SampleSet};
use crate::error::{check_dim, Error, Result};
use crate::solver::{solve_quantile, Init, SolverConfig};
use crate::transform::{k_transform, unit_vector_sum, TransformValue, DEFAULT_EXCLUDE_RADIUS};

pub const DEFAULT_RESOLUTION: usize = 360;

/// Inverse images of concentric circles, one closed polyline per radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourSet {
    pub radii: Vec<f64>,
    pub polylines: Vec<Vec<Vec<f64>>>,
    /// Vertices per polyline.
    pub m: usize,
}

impl ContourSet {
    pub fn empty() -> Self {
        ContourSet {
            radii: Vec::new(),
            polylines: Vec::new(),
            m: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// CSV with header `radius,angle_index,x,y`, one row per vertex.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,angle_index,x,y\n");
        for (r, line) in self.radii.iter().zip(&self.polylines) {
            for (j, p) in line.iter().enumerate() {
                writeln!(out, "{r:?},{j},{:?},{:?}", p[0], p[1]).unwrap();
            }
        }
        out
    }
}

/// Direction at angle index `j` of `m` on the circle of radius `r`.
pub fn circle_direction(r: f64, j: usize, m: usize) -> Vec<f64> {
    let theta = 2.0 * PI * j as f64 / m as f64;
    vec![r * theta.cos(), r * theta.sin()]
}

/// Solves for the quantile at `m` equally spaced directions of norm `r`,
/// warm-starting each vertex from the previous one.
pub fn inverse_contour(sample: &SampleSet, r: f64, m: usize, cfg: &SolverConfig) -> Result<Vec<Vec<f64>>> {
    check_dim(2, sample.dim())?;
    if !(0.0..1.0).contains(&r) {
        return Err(Error::DomainViolation(format!(
            "contour radius must lie in [0, 1), got {r}"
        )));
    }
    if m < 3 {
        return Err(Error::DomainViolation(format!(
            "contour needs m >= 3 vertices, got {m}"
        )));
    }
    if r == 0.0 {
        let median = solve_quantile(sample, &Direction::zero(2), cfg)?.quantile;
        return Ok(vec![median; m]);
    }
    let mut line: Vec<Vec<f64>> = Vec::with_capacity(m);
    for j in 0..m {
        let v = Direction::new(circle_direction(r, j, m))?;
        let init = match line.last() {
            Some(prev) => Init::Given(prev.clone()),
            None => cfg.init.clone(),
        };
        let report = solve_quantile(sample, &v, &cfg.clone().with_init(init))?;
        line.push(report.quantile);
    }
    Ok(line)
}

/// Contours for several radii; radii are solved concurrently.
pub fn contour_set(sample: &SampleSet, radii: &[f64], m: usize, cfg: &SolverConfig) -> Result<ContourSet> {
    let polylines = radii
        .par_iter()
        .map(|&r| inverse_contour(sample, r, m, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(ContourSet {
        radii: radii.to_vec(),
        polylines,
        m,
    })
}

/// K-transform of each point against the full sample.
pub fn forward_image<P: AsRef<[f64]> + Sync>(sample: &SampleSet, points: &[P]) -> Result<Vec<TransformValue>> {
    points
        .par_iter()
        .map(|p| k_transform(sample, p.as_ref(), DEFAULT_EXCLUDE_RADIUS))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutlierScore {
    pub index: usize,
    /// Norm of the point's K-transform.
    pub norm: f64,
    pub is_outlier: bool,
}

/// Flags each sample point whose K-transform norm reaches `threshold`.
///
/// With `leave_one_out` the point is scored against the other `n − 1` rows;
/// otherwise against the whole sample, its own term dropping out as an atom.
pub fn classify_outliers(sample: &SampleSet, threshold: f64, leave_one_out: bool) -> Result<Vec<OutlierScore>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::DomainViolation(format!(
            "threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let n = sample.len();
    let scores = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = sample.row(i);
            let norm = if leave_one_out {
                if n == 1 {
                    0.0
                } else {
                    let others = sample.rows().enumerate().filter(|(j, _)| *j != i).map(|(_, row)| row);
                    let mut g = unit_vector_sum(others, x, DEFAULT_EXCLUDE_RADIUS);
                    g.iter_mut().for_each(|c| *c /= (n - 1) as f64);
                    norm(&g)
                }
            } else {
                k_transform(sample, x, DEFAULT_EXCLUDE_RADIUS)
                    .expect("row has the sample's dimension")
                    .norm
            };
            OutlierScore {
                index: i,
                norm,
                is_outlier: norm >= threshold,
            }
        })
        .collect();
    Ok(scores)
}

/// Even-odd ray casting test for a closed polygon.
pub fn point_in_polygon(p: &[f64], polygon: &[Vec<f64>]) -> bool {
    let (px, py) = (p[0], p[1]);
    let mut inside = false;
    let mut j = polygon.len() - 1;
    for i in 0..polygon.len() {
        let (xi, yi) = (polygon[i][0], polygon[i][1]);
        let (xj, yj) = (polygon[j][0], polygon[j][1]);
        if (yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Distance from `p` to the closed polyline through `polygon`.
pub fn distance_to_polyline(p: &[f64], polygon: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    let mut j = polygon.len() - 1;
    for i in 0..polygon.len() {
        let (a, b) = (&polygon[j], &polygon[i]);
        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
        let len2 = ex * ex + ey * ey;
        let t = if len2 > 0.0 {
            (((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (cx, cy) = (a[0] + t * ex - p[0], a[1] + t * ey - p[1]);
        best = best.min(cx.hypot(cy));
        j = i;
    }
    best
}
