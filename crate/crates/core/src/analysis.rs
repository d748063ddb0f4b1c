//! Model and solution analytics: density and conditioning statistics,
//! success rate and time-to-solution, and CSV exports of the data behind
//! the standard plots (energy histogram, coefficient heatmap).

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::formats::QuboInstance;
use crate::pbf::VarId;
use crate::samplers::SampleSet;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("quantile must lie strictly between 0 and 1, got {0}")]
    InvalidQuantile(f64),
    #[error("success probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("total time must be positive, got {0}")]
    InvalidTime(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Structural statistics of one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    pub n: usize,
    pub linear_count: usize,
    pub quadratic_count: usize,
    /// Present terms over the `n(n+1)/2` representable ones; 0 for an empty
    /// instance.
    pub density: f64,
    /// Distinct quadratic neighbors per variable, aligned with the sorted
    /// variable ids.
    pub degree_histogram: Vec<usize>,
    /// Largest coefficient magnitude (offset included).
    pub delta: f64,
    /// `delta` over the smallest nonzero coefficient magnitude; 1 when
    /// there are no terms.
    pub coeff_ratio: f64,
}

/// Builds the structural report for an instance.
pub fn model_report(q: &QuboInstance) -> ModelReport {
    let n = q.num_variables();
    let linear_count = q.linear().len();
    let quadratic_count = q.quadratic().len();
    let density = if n == 0 {
        0.0
    } else {
        (linear_count + quadratic_count) as f64 / (n * (n + 1) / 2) as f64
    };
    let degree_histogram = q
        .variable_ids()
        .iter()
        .map(|&v| {
            q.quadratic()
                .keys()
                .filter(|&&(i, j)| i == v || j == v)
                .count()
        })
        .collect();
    let polynomial = q.as_polynomial();
    let delta = polynomial.delta();
    let coeff_ratio = polynomial
        .min_abs_coefficient()
        .map_or(1.0, |min| delta / min);
    ModelReport {
        n,
        linear_count,
        quadratic_count,
        density,
        degree_histogram,
        delta,
        coeff_ratio,
    }
}

impl ModelReport {
    pub fn to_json_string(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut text = value.to_string();
        text.push('\n');
        text
    }
}

/// Fraction of reads whose value is at most `target + tol`.
pub fn success_rate(s: &SampleSet, target: f64, tol: f64) -> Result<f64, AnalysisError> {
    if s.is_empty() {
        return Err(AnalysisError::EmptySampleSet);
    }
    let hits: u64 = s
        .samples()
        .iter()
        .filter(|sample| sample.value <= target + tol)
        .map(|sample| sample.reads)
        .sum();
    Ok(hits as f64 / s.total_reads() as f64)
}

/// Expected time to see an optimal sample with the given confidence:
/// `total_seconds * max(1, ln(1 - quantile) / ln(1 - p_success))`. A run
/// that already succeeds at the quantile needs exactly one repetition, so
/// the ratio floors at one; zero success probability gives infinity.
pub fn time_to_solution(
    total_seconds: f64,
    p_success: f64,
    quantile: f64,
) -> Result<f64, AnalysisError> {
    if !(quantile > 0.0 && quantile < 1.0) {
        return Err(AnalysisError::InvalidQuantile(quantile));
    }
    if !(0.0..=1.0).contains(&p_success) {
        return Err(AnalysisError::InvalidProbability(p_success));
    }
    if !(total_seconds > 0.0) {
        return Err(AnalysisError::InvalidTime(total_seconds));
    }
    if p_success == 0.0 {
        return Ok(f64::INFINITY);
    }
    let ratio = (1.0 - quantile).ln() / (1.0 - p_success).ln();
    Ok(total_seconds * ratio.max(1.0))
}

/// Histogram rows: `(value, reads)` ascending, with values equal to within
/// one part in 1e9 stacked into a single row.
pub fn histogram_rows(s: &SampleSet) -> Vec<(f64, u64)> {
    let mut rows: Vec<(f64, u64)> = Vec::new();
    for sample in s.samples() {
        match rows.last_mut() {
            Some((value, reads))
                if (sample.value - *value).abs() <= 1e-9 * value.abs().max(1.0) =>
            {
                *reads += sample.reads;
            }
            _ => rows.push((sample.value, sample.reads)),
        }
    }
    rows
}

/// Serializes the stacked histogram as `value,reads` CSV.
pub fn histogram_csv(s: &SampleSet) -> String {
    let mut out = String::from("value,reads\n");
    for (value, reads) in histogram_rows(s) {
        out.push_str(&format!("{value},{reads}\n"));
    }
    out
}

/// Writes the histogram CSV to `path`.
pub fn export_histogram(s: &SampleSet, path: &Path) -> Result<(), AnalysisError> {
    if s.is_empty() {
        return Err(AnalysisError::EmptySampleSet);
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(histogram_csv(s).as_bytes())?;
    Ok(())
}

/// Coefficient dump rows: `(i, j, coeff)` with `i = j` for linear terms,
/// sorted by `(i, j)`; consumers render the heatmap.
pub fn density_rows(q: &QuboInstance) -> Vec<(VarId, VarId, f64)> {
    let mut rows: Vec<(VarId, VarId, f64)> = q
        .linear()
        .iter()
        .map(|(&v, &c)| (v, v, c))
        .chain(q.quadratic().iter().map(|(&(i, j), &c)| (i, j, c)))
        .collect();
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    rows
}

/// Serializes the coefficient dump as `i,j,coeff` CSV.
pub fn density_csv(q: &QuboInstance) -> String {
    let mut out = String::from("i,j,coeff\n");
    for (i, j, c) in density_rows(q) {
        out.push_str(&format!("{i},{j},{c}\n"));
    }
    out
}

/// Writes the coefficient CSV to `path`.
pub fn export_density(q: &QuboInstance, path: &Path) -> Result<(), AnalysisError> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(density_csv(q).as_bytes())?;
    Ok(())
}

/// Solution-quality summary computed against a target value.
#[derive(Debug, Clone, Serialize)]
pub struct SolutionReport {
    pub best_value: f64,
    pub target_value: Option<f64>,
    pub success_rate: Option<f64>,
    /// Expected seconds to optimality at the 99% quantile; `None` when no
    /// target or timing is available, infinity serializes as null.
    pub tts: Option<f64>,
    pub histogram: Vec<(f64, u64)>,
}

/// Builds the solution report; `target` enables success rate and TTS (the
/// latter only when the pool carries a positive total time).
pub fn solution_report(
    s: &SampleSet,
    target: Option<f64>,
    tol: f64,
) -> Result<SolutionReport, AnalysisError> {
    let best = s.best().ok_or(AnalysisError::EmptySampleSet)?;
    let rate = match target {
        Some(t) => Some(success_rate(s, t, tol)?),
        None => None,
    };
    let tts = match rate {
        Some(p) if s.timing().total_seconds > 0.0 => {
            Some(time_to_solution(s.timing().total_seconds, p, 0.99)?)
        }
        _ => None,
    };
    Ok(SolutionReport {
        best_value: best.value,
        target_value: target,
        success_rate: rate,
        tts,
        histogram: histogram_rows(s),
    })
}

impl SolutionReport {
    pub fn to_json_string(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut text = value.to_string();
        text.push('\n');
        text
    }
}
