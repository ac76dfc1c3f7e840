mod common;

use kquantile::contour::{circle_direction, distance_to_polyline, point_in_polygon};
use kquantile::distributions::{banana_sample, figure1_gaussian};
use kquantile::transform::DEFAULT_EXCLUDE_RADIUS;
use kquantile::{classify_outliers, contour_set, inverse_contour, k_transform, SolverConfig};

use common::dist;

#[test]
fn contours_are_nested() {
    let sample = figure1_gaussian(1000, 31).unwrap();
    let set = contour_set(&sample, &[0.3, 0.6, 0.9], 120, &SolverConfig::default()).unwrap();
    for pair in set.polylines.windows(2) {
        for p in &pair[0] {
            assert!(point_in_polygon(p, &pair[1]), "{p:?} escapes the next contour");
        }
    }
}

#[test]
fn vertices_map_back_to_their_directions() {
    let sample = banana_sample(2000, 32).unwrap();
    let cfg = SolverConfig::default();
    let m = 64;
    for r in [0.2, 0.7, 0.95] {
        let line = inverse_contour(&sample, r, m, &cfg).unwrap();
        for (j, p) in line.iter().enumerate() {
            let g = k_transform(&sample, p, DEFAULT_EXCLUDE_RADIUS).unwrap().g;
            let err = dist(&g, &circle_direction(r, j, m));
            assert!(err <= 10.0 * cfg.tol, "r = {r}, j = {j}: {err:e}");
        }
    }
}

#[test]
fn outlier_flags_agree_with_contour_membership() {
    let sample = figure1_gaussian(800, 33).unwrap();
    let threshold = 0.8;
    let set = contour_set(&sample, &[threshold], 720, &SolverConfig::default()).unwrap();
    let polygon = &set.polylines[0];
    let scores = classify_outliers(&sample, threshold, false).unwrap();
    let mut compared = 0;
    for s in scores {
        let x = sample.row(s.index);
        if distance_to_polyline(x, polygon) < 0.05 {
            continue;
        }
        compared += 1;
        assert_eq!(
            s.is_outlier,
            !point_in_polygon(x, polygon),
            "row {} with norm {}",
            s.index,
            s.norm
        );
    }
    assert!(compared > 700);
}

#[test]
fn full_threshold_flags_nothing() {
    let sample = banana_sample(500, 34).unwrap();
    for loo in [false, true] {
        assert!(classify_outliers(&sample, 1.0, loo)
            .unwrap()
            .iter()
            .all(|s| !s.is_outlier));
    }
}
