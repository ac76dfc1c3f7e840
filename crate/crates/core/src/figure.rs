//! Static SVG figures: the data with its quantile contours (domain side) and
//! the K-transformed data inside the unit disk (co-domain side).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::contour::{circle_direction, contour_set, forward_image, ContourSet, DEFAULT_RESOLUTION};
use crate::data::{save_matrix, Format, SampleSet};
use crate::distributions::{
    banana_sample, figure1_gaussian, spiral_sample, square_sample, SPIRAL_DEFAULT_N, SQUARE_DEFAULT_N,
};
use crate::error::{check_dim, Error, Result};
use crate::solver::SolverConfig;

/// Stroke colors in radius order.
pub const CONTOUR_COLORS: [&str; 6] = ["blue", "red", "maroon", "darkgreen", "purple", "darkorange"];

pub const FIGURE_RADII: [f64; 3] = [0.5, 0.75, 0.9];

const CANVAS: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Domain,
    Codomain,
}

fn color(i: usize) -> &'static str {
    CONTOUR_COLORS[i % CONTOUR_COLORS.len()]
}

/// Maps data coordinates onto the square canvas, y pointing up.
struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
}

impl Frame {
    fn fit<'a>(points: impl Iterator<Item = &'a [f64]>) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9) * 1.1;
        let (cx, cy) = ((lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0);
        Frame {
            x0: cx - span / 2.0,
            y1: cy + span / 2.0,
            scale: CANVAS / span,
        }
    }

    fn map(&self, p: &[f64]) -> (f64, f64) {
        ((p[0] - self.x0) * self.scale, (self.y1 - p[1]) * self.scale)
    }
}

fn svg_header(out: &mut String) {
    writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">
<rect x="0" y="0" width="{CANVAS}" height="{CANVAS}" fill="white"/>"#
    )
    .unwrap();
}

fn scatter<'a>(out: &mut String, frame: &Frame, points: impl Iterator<Item = &'a [f64]>) {
    out.push_str(r##"<g id="points" fill="#555555" fill-opacity="0.6">"##);
    out.push('\n');
    for p in points {
        let (x, y) = frame.map(p);
        writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.2"/>"#).unwrap();
    }
    out.push_str("</g>\n");
}

fn polygon(out: &mut String, frame: &Frame, line: &[Vec<f64>], stroke: &str, radius: f64) {
    let pts: Vec<String> = line
        .iter()
        .map(|p| {
            let (x, y) = frame.map(p);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    writeln!(
        out,
        r#"<polygon class="contour" data-radius="{radius}" points="{}" fill="none" stroke="{stroke}" stroke-width="2"/>"#,
        pts.join(" ")
    )
    .unwrap();
}

fn reference_circles(radii: &[f64], m: usize) -> ContourSet {
    let m = m.max(DEFAULT_RESOLUTION);
    ContourSet {
        radii: radii.to_vec(),
        polylines: radii
            .iter()
            .map(|&r| (0..m).map(|j| circle_direction(r, j, m)).collect())
            .collect(),
        m,
    }
}

/// Writes the SVG for one side of a figure to `path` and the polyline CSV
/// (`radius,angle_index,x,y`) next to it with a `.csv` extension.
///
/// The domain side draws the sample and its contours. The co-domain side draws
/// the unit circle, reference circles at the contour radii, and the forward
/// image of the sample.
pub fn render_figure(sample: &SampleSet, contours: &ContourSet, side: Side, path: impl AsRef<Path>) -> Result<()> {
    check_dim(2, sample.dim())?;
    let path = path.as_ref();
    let mut svg = String::new();
    svg_header(&mut svg);
    let csv = match side {
        Side::Domain => {
            let frame = Frame::fit(
                sample
                    .rows()
                    .chain(contours.polylines.iter().flatten().map(Vec::as_slice)),
            );
            scatter(&mut svg, &frame, sample.rows());
            for (i, (r, line)) in contours.radii.iter().zip(&contours.polylines).enumerate() {
                polygon(&mut svg, &frame, line, color(i), *r);
            }
            contours.to_csv()
        }
        Side::Codomain => {
            let unit = [vec![-1.0, -1.0], vec![1.0, 1.0]];
            let frame = Frame::fit(unit.iter().map(Vec::as_slice));
            let image: Vec<Vec<f64>> = forward_image(sample, &sample.to_rows())?
                .into_iter()
                .map(|t| t.g)
                .collect();
            scatter(&mut svg, &frame, image.iter().map(Vec::as_slice));
            let (cx, cy) = frame.map(&[0.0, 0.0]);
            writeln!(
                svg,
                r#"<circle id="unit-circle" cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="none" stroke="black" stroke-width="1.5"/>"#,
                frame.scale
            )
            .unwrap();
            let circles = reference_circles(&contours.radii, contours.m);
            for (i, (r, line)) in circles.radii.iter().zip(&circles.polylines).enumerate() {
                polygon(&mut svg, &frame, line, color(i), *r);
            }
            circles.to_csv()
        }
    };
    svg.push_str("</svg>\n");
    fs::write(path, svg).map_err(|e| Error::io(path, e))?;
    let csv_path = path.with_extension("csv");
    fs::write(&csv_path, csv).map_err(|e| Error::io(csv_path, e))
}

/// The four figure layouts: correlated Gaussian, banana, spiral, square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigurePreset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl FigurePreset {
    pub fn name(self) -> &'static str {
        match self {
            FigurePreset::Fig1 => "fig1",
            FigurePreset::Fig2 => "fig2",
            FigurePreset::Fig3 => "fig3",
            FigurePreset::Fig4 => "fig4",
        }
    }

    pub fn default_n(self) -> usize {
        match self {
            FigurePreset::Fig1 => 3000,
            FigurePreset::Fig2 => 20_000,
            FigurePreset::Fig3 => SPIRAL_DEFAULT_N,
            FigurePreset::Fig4 => SQUARE_DEFAULT_N,
        }
    }

    pub fn sample(self, seed: u64) -> Result<SampleSet> {
        let n = self.default_n();
        match self {
            FigurePreset::Fig1 => figure1_gaussian(n, seed),
            FigurePreset::Fig2 => banana_sample(n, seed),
            FigurePreset::Fig3 => spiral_sample(n, seed),
            FigurePreset::Fig4 => square_sample(n, seed),
        }
    }
}

impl std::str::FromStr for FigurePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(FigurePreset::Fig1),
            "fig2" => Ok(FigurePreset::Fig2),
            "fig3" => Ok(FigurePreset::Fig3),
            "fig4" => Ok(FigurePreset::Fig4),
            other => Err(Error::DomainViolation(format!("unknown figure preset {other:?}"))),
        }
    }
}

/// Files written by [`render_preset`].
#[derive(Debug, Clone)]
pub struct FigureFiles {
    pub sample_csv: PathBuf,
    pub domain_svg: PathBuf,
    pub codomain_svg: PathBuf,
}

/// Regenerates a preset's sample, its contours at radii 0.5/0.75/0.9, and both
/// figure sides into `dir` as `<preset>_{sample.csv,domain.svg,codomain.svg}`
/// (plus the polyline CSVs).
pub fn render_preset(preset: FigurePreset, seed: u64, m: usize, dir: impl AsRef<Path>) -> Result<FigureFiles> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let sample = preset.sample(seed)?;
    let contours = contour_set(&sample, &FIGURE_RADII, m, &SolverConfig::default())?;
    let files = FigureFiles {
        sample_csv: dir.join(format!("{}_sample.csv", preset.name())),
        domain_svg: dir.join(format!("{}_domain.svg", preset.name())),
        codomain_svg: dir.join(format!("{}_codomain.svg", preset.name())),
    };
    save_matrix(&sample.to_rows(), &files.sample_csv, Format::Csv)?;
    render_figure(&sample, &contours, Side::Domain, &files.domain_svg)?;
    render_figure(&sample, &contours, Side::Codomain, &files.codomain_svg)?;
    Ok(files)
}
