//! Independent oracles shared by the integration tests. Nothing here calls the
//! code paths it is used to check.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Composite Simpson rule on `[a, b]` with `intervals` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    assert!(intervals.is_multiple_of(2));
    let h = (b - a) / intervals as f64;
    let mut acc = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Density of the radius of a standard normal vector in three dimensions.
fn chi3_pdf(r: f64) -> f64 {
    4.0 * PI * r * r * (2.0 * PI).powf(-1.5) * (-0.5 * r * r).exp()
}

/// `E[1/‖s − X‖]` for `X ~ N(0, I₃)` by radial quadrature. The average of
/// `1/‖s − x‖` over a sphere of radius `r` is `1/max(r, ‖s‖)`.
pub fn gaussian3_mean_inverse_distance(s: &[f64]) -> f64 {
    let a = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    let shell = |r: f64| if r == 0.0 { 0.0 } else { chi3_pdf(r) / r.max(a) };
    if a > 0.0 && a < 12.0 {
        simpson(shell, 0.0, a, 2000) + simpson(shell, a, 12.0, 20000)
    } else {
        simpson(shell, 0.0, 12.0, 20000)
    }
}

/// `E[‖s − X‖]` for `X ~ N(0, I₃)` by radial quadrature. The sphere average of
/// `‖s − x‖` is `r + a²/(3r)` for `a < r` and `a + r²/(3a)` otherwise.
pub fn gaussian3_mean_distance(s: &[f64]) -> f64 {
    let a = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    let shell = |r: f64| {
        let avg = if a < r {
            r + a * a / (3.0 * r)
        } else if a > 0.0 {
            a + r * r / (3.0 * a)
        } else {
            0.0
        };
        chi3_pdf(r) * avg
    };
    if a > 0.0 && a < 12.0 {
        simpson(shell, 0.0, a, 2000) + simpson(shell, a, 12.0, 20000)
    } else {
        simpson(shell, 0.0, 12.0, 20000)
    }
}

/// `E|s − X|` for a one-dimensional density by quadrature on `[lo, hi]`,
/// split at `s` where the integrand has a kink.
pub fn mean_abs_deviation(pdf: impl Fn(f64) -> f64, s: f64, lo: f64, hi: f64) -> f64 {
    let f = |x: f64| (s - x).abs() * pdf(x);
    let s = s.clamp(lo, hi);
    simpson(f, lo, s, 20000) + simpson(f, s, hi, 20000)
}

/// Plain central second difference.
pub fn second_difference(f: impl Fn(f64) -> f64, s: f64, h: f64) -> f64 {
    (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h)
}

/// Central-difference Laplacian in three dimensions, Richardson-extrapolated.
pub fn richardson_laplacian3(f: impl Fn(&[f64]) -> f64, s: &[f64], h: f64) -> f64 {
    let lap = |h: f64| {
        let c = f(s);
        let mut acc = 0.0;
        for k in 0..3 {
            let mut p = s.to_vec();
            p[k] += h;
            let plus = f(&p);
            p[k] -= 2.0 * h;
            acc += plus - 2.0 * c + f(&p);
        }
        acc / (h * h)
    };
    (4.0 * lap(h / 2.0) - lap(h)) / 3.0
}

/// Brute-force `(1/n) Σ ‖xᵢ − s‖ + ⟨v, xᵢ − s⟩`.
pub fn objective(rows: &[Vec<f64>], v: &[f64], s: &[f64]) -> f64 {
    let mut acc = 0.0;
    for x in rows {
        let dist = x.iter().zip(s).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let inner: f64 = v.iter().zip(x.iter().zip(s)).map(|(vk, (a, b))| vk * (a - b)).sum();
        acc += dist + inner;
    }
    acc / rows.len() as f64
}

/// Minimizer of `objective` over a square grid centred at `center`.
pub fn grid_argmin_2d(rows: &[Vec<f64>], v: &[f64], center: [f64; 2], half_width: f64, steps: usize) -> [f64; 2] {
    let mut best = (f64::INFINITY, center);
    for i in 0..=steps {
        for j in 0..=steps {
            let p = [
                center[0] - half_width + 2.0 * half_width * i as f64 / steps as f64,
                center[1] - half_width + 2.0 * half_width * j as f64 / steps as f64,
            ];
            let val = objective(rows, v, &p);
            if val < best.0 {
                best = (val, p);
            }
        }
    }
    best.1
}

/// Principal axes of a 2-D point set: (major std, minor std, major-axis angle).
pub fn pca_2d(points: &[Vec<f64>]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let (sxx, syy, sxy) = (sxx / n, syy / n, sxy / n);
    let tr = sxx + syy;
    let disc = ((sxx - syy).powi(2) / 4.0 + sxy * sxy).sqrt();
    let (l1, l2) = (tr / 2.0 + disc, tr / 2.0 - disc);
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    (l1.sqrt(), l2.sqrt(), angle)
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn rotate(p: &[f64], angle: f64) -> Vec<f64> {
    let (s, c) = angle.sin_cos();
    vec![c * p[0] - s * p[1], s * p[0] + c * p[1]]
}
