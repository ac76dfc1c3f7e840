//! Sample sets, directions, and point-cloud file I/O.
//!
//! CSV files hold one point per row with comma-separated coordinates and no
//! header (an optional header row can be skipped). JSON files hold an array of
//! arrays of numbers; a `{"points": [...]}` wrapper is also accepted on load.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{check_dim, Error, Result};

/// An immutable `n × d` point cloud: the support of an empirical measure
/// putting mass `1/n` on each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl SampleSet {
    /// Builds a sample set from row-major data.
    pub fn new(n: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::DomainViolation(format!(
                "sample set needs n >= 1 and d >= 1 (got n = {n}, d = {d})"
            )));
        }
        if data.len() != n * d {
            return Err(Error::DomainViolation(format!(
                "expected {} values for a {n} x {d} sample, got {}",
                n * d,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::DomainViolation(format!(
                "non-finite entry at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        Ok(SampleSet { data, n, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::DomainViolation("sample set needs at least one row".into()))?;
        let d = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * d);
        for row in rows {
            check_dim(d, row.as_ref().len())?;
            data.extend_from_slice(row.as_ref());
        }
        SampleSet::new(rows.len(), d, data)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false; a sample set holds at least one point.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Coordinate-wise mean of the rows.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.d];
        for row in self.rows() {
            for (acc, x) in m.iter_mut().zip(row) {
                *acc += x;
            }
        }
        let n = self.n as f64;
        m.iter_mut().for_each(|x| *x /= n);
        m
    }

    /// Diagonal length of the axis-aligned bounding box.
    pub fn bounding_diameter(&self) -> f64 {
        let mut lo = vec![f64::INFINITY; self.d];
        let mut hi = vec![f64::NEG_INFINITY; self.d];
        for row in self.rows() {
            for k in 0..self.d {
                lo[k] = lo[k].min(row[k]);
                hi[k] = hi[k].max(row[k]);
            }
        }
        lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }

    /// Applies `f` to every row, producing a new sample set of the same shape.
    pub fn map_rows(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        let rows: Vec<Vec<f64>> = self.rows().map(&mut f).collect();
        SampleSet::from_rows(&rows)
    }

    /// The sample with row `i` removed, or `None` if it was the only row.
    pub fn without_row(&self, i: usize) -> Option<Self> {
        if self.n == 1 {
            return None;
        }
        let mut data = Vec::with_capacity((self.n - 1) * self.d);
        data.extend_from_slice(&self.data[..i * self.d]);
        data.extend_from_slice(&self.data[(i + 1) * self.d..]);
        Some(SampleSet {
            data,
            n: self.n - 1,
            d: self.d,
        })
    }
}

/// A point of the open unit ball: the co-domain of the K-transform.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Accepts `v` iff every entry is finite and `‖v‖₂ < 1` strictly.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::DomainViolation(format!(
                "direction must be a non-empty finite vector, got {v:?}"
            )));
        }
        let norm = norm(&v);
        if norm >= 1.0 {
            return Err(Error::DomainViolation(format!(
                "direction norm {norm} is outside the open unit ball"
            )));
        }
        Ok(Direction(v))
    }

    pub fn zero(d: usize) -> Self {
        Direction(vec![0.0; d])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

pub fn validate_direction(v: &[f64]) -> Result<Direction> {
    Direction::new(v.to_vec())
}

#[inline]
pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[inline]
pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// On-disk encoding of a point matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` files are JSON; everything else is read as CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Skip the first CSV row.
    pub skip_header: bool,
}

pub fn load_samples(path: impl AsRef<Path>, format: Format) -> Result<SampleSet> {
    load_samples_with(path, format, LoadOptions::default())
}

pub fn load_samples_with(path: impl AsRef<Path>, format: Format, opts: LoadOptions) -> Result<SampleSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format {
        Format::Csv => parse_csv(&text, opts.skip_header),
        Format::Json => parse_json(&text),
    }
}

pub fn parse_csv(text: &str, skip_header: bool) -> Result<SampleSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(skip_header)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let row = record
            .iter()
            .map(|field| parse_finite(field, line))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse(format!(
                    "row {line} has {} columns, expected {}",
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    SampleSet::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
}

fn parse_finite(field: &str, line: usize) -> Result<f64> {
    let x: f64 = field
        .parse()
        .map_err(|_| Error::Parse(format!("row {line}: {field:?} is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("row {line}: non-finite value {field:?}")));
    }
    Ok(x)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonPoints {
    Bare(Vec<Vec<f64>>),
    Wrapped { points: Vec<Vec<f64>> },
}

pub fn parse_json(text: &str) -> Result<SampleSet> {
    let rows = match serde_json::from_str::<JsonPoints>(text).map_err(|e| Error::Parse(e.to_string()))? {
        JsonPoints::Bare(rows) | JsonPoints::Wrapped { points: rows } => rows,
    };
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != rows[0].len()) {
        return Err(Error::Parse(format!(
            "row {bad} has {} columns, expected {}",
            rows[bad].len(),
            rows[0].len()
        )));
    }
    SampleSet::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
}

/// Writes rows so that [`load_samples`] reproduces them bit-for-bit.
///
/// Floats use Rust's shortest round-trip representation.
pub fn save_matrix<R: AsRef<[f64]>>(rows: &[R], path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    if let Some(first) = rows.first() {
        let d = first.as_ref().len();
        for row in rows {
            check_dim(d, row.as_ref().len())?;
        }
    }
    let text = match format {
        Format::Csv => to_csv(rows),
        Format::Json => {
            let rows: Vec<&[f64]> = rows.iter().map(AsRef::as_ref).collect();
            serde_json::to_string(&rows).map_err(|e| Error::Parse(e.to_string()))? + "\n"
        }
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn to_csv<R: AsRef<[f64]>>(rows: &[R]) -> String {
    let mut out = String::new();
    for row in rows {
        for (k, x) in row.as_ref().iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            write!(out, "{x:?}").unwrap();
        }
        out.push('\n');
    }
    out
}
