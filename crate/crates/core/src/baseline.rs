//! Comparison feature sets computed on fixed-length windows: time-domain
//! statistics, normalized band energies, and the raw window itself.
//!
//! The td and fd sets are generic reimplementations of common feature
//! lists; reports label them as such.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SEGMENT_LEN: usize = 1024;
pub const DEFAULT_SEGMENT_STRIDE: usize = 1024;
pub const DEFAULT_FD_BANDS: usize = 8;

/// Names of the [`td_features`] entries, in order.
pub const TD_FEATURE_NAMES: [&str; 8] = [
    "mean",
    "variance",
    "std",
    "skewness",
    "kurtosis",
    "rms",
    "peak",
    "zero_crossings",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub values: Vec<f64>,
    pub parent: String,
    pub offset: usize,
}

/// Windows of `len` samples starting every `stride` samples.
pub fn segment(values: &[f64], len: usize, stride: usize, parent: &str) -> Result<Vec<Segment>> {
    if len == 0 || stride == 0 {
        return Err(Error::invalid("segment length and stride must be positive"));
    }
    if len > values.len() {
        return Err(Error::invalid(format!(
            "segment length {len} exceeds signal length {}",
            values.len()
        )));
    }
    Ok((0..=values.len() - len)
        .step_by(stride)
        .map(|offset| Segment {
            values: values[offset..offset + len].to_vec(),
            parent: parent.to_string(),
            offset,
        })
        .collect())
}

/// `(mean, variance, std, skewness, kurtosis, rms, peak, zero crossings)`.
///
/// Variance and std use the `N - 1` denominator. Skewness and kurtosis are
/// the standardized third and fourth central moments (`m3 / m2^1.5`,
/// `m4 / m2^2`, population moments), both 0 for a constant window.
pub fn td_features(values: &[f64]) -> [f64; 8] {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let variance = if values.len() > 1 {
        m2 / (n - 1.0)
    } else {
        0.0
    };
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    let (skewness, kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2))
    } else {
        (0.0, 0.0)
    };
    let rms = (values.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    let peak = values.iter().fold(0.0f64, |p, v| p.max(v.abs()));
    let crossings = values
        .windows(2)
        .filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0))
        .count();
    [
        mean,
        variance,
        variance.sqrt(),
        skewness,
        kurtosis,
        rms,
        peak,
        crossings as f64,
    ]
}

/// Share of spectral energy in `bands` equal-width bands over `(0, Nyquist]`.
///
/// The window is mean-removed first. With `K = len / 2` positive-frequency
/// bins, bin `f` in `1..=K` belongs to band `(f - 1)·bands / K`. A window
/// with no energy left after mean removal maps to all zeros.
pub fn fd_features(values: &[f64], bands: usize) -> Result<Vec<f64>> {
    if bands == 0 || values.len() < 2 * bands {
        return Err(Error::invalid(format!(
            "fd features need at least {} samples for {bands} bands, got {}",
            2 * bands,
            values.len()
        )));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = values
        .iter()
        .map(|&v| Complex::new(v - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let k = n / 2;
    let mut energy = vec![0.0; bands];
    for (f, c) in buf.iter().enumerate().take(k + 1).skip(1) {
        energy[(f - 1) * bands / k] += c.norm_sqr();
    }
    let total: f64 = energy.iter().sum();
    // Rounding leaves ~1e-30 of "energy" in a constant window.
    let floor = 1e-24
        * values
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .max(f64::MIN_POSITIVE);
    if total <= floor {
        return Ok(vec![0.0; bands]);
    }
    Ok(energy.into_iter().map(|e| e / total).collect())
}

pub fn segmented_raw(seg: &Segment) -> Vec<f64> {
    seg.values.clone()
}
