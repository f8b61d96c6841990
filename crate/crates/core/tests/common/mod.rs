//! Brute-force reference for the histogram feature design, written
//! independently of the library: naive two-pass statistics and a linear
//! scan over explicit bin edges.

#![allow(dead_code)]

use histofeat_core::rng::SeededRng;

#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    Matrix {
        rows: usize,
        cols: usize,
        data: Vec<Vec<f64>>,
        counts: Vec<usize>,
    },
    EmptyBin {
        bin: usize,
    },
}

pub fn reference_width(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut sum = 0.0;
    for v in x {
        sum += v;
    }
    let mean = sum / n;
    let mut ss = 0.0;
    for v in x {
        ss += (v - mean) * (v - mean);
    }
    3.49 * (ss / (n - 1.0)).sqrt() / n.powf(1.0 / 3.0)
}

pub fn reference_edges(x: &[f64], w: f64) -> Vec<f64> {
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut m = ((hi - lo) / w).ceil() as usize;
    while lo + m as f64 * w < hi {
        m += 1;
    }
    (0..=m).map(|k| lo + k as f64 * w).collect()
}

/// Bin by scanning edges: bin k holds `edges[k] <= x < edges[k+1]`, and the
/// last bin also takes its right edge.
pub fn reference_bin(x: f64, edges: &[f64]) -> usize {
    let m = edges.len() - 1;
    for k in 0..m {
        if x >= edges[k] && (x < edges[k + 1] || k == m - 1) {
            return k;
        }
    }
    panic!("{x} outside [{}, {}]", edges[0], edges[m]);
}

/// Truncate fill: `n = min count`, column k is bin k in temporal order.
pub fn reference_design(x: &[f64]) -> Reference {
    let w = reference_width(x);
    let edges = reference_edges(x, w);
    let m = edges.len() - 1;
    let mut bins: Vec<Vec<f64>> = vec![Vec::new(); m];
    for &v in x {
        bins[reference_bin(v, &edges)].push(v);
    }
    let counts: Vec<usize> = bins.iter().map(|b| b.len()).collect();
    if let Some(bin) = counts.iter().position(|&c| c == 0) {
        return Reference::EmptyBin { bin };
    }
    let n = *counts.iter().min().unwrap();
    let data = (0..n)
        .map(|r| (0..m).map(|k| bins[k][r]).collect())
        .collect();
    Reference::Matrix {
        rows: n,
        cols: m,
        data,
        counts,
    }
}

/// Smallest distance from any sample to an interior bin edge, relative to
/// the bin width. The minimum sample always sits on the first edge and the
/// last edge is closed, so only interior edges matter.
pub fn edge_clearance(x: &[f64]) -> f64 {
    let w = reference_width(x);
    let edges = reference_edges(x, w);
    let interior = &edges[1..edges.len() - 1];
    let mut best = f64::INFINITY;
    for &v in x {
        for &e in interior {
            best = best.min((v - e).abs() / w);
        }
    }
    best
}

/// Gaussian mixture of 1-3 overlapping components.
pub fn mixture(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = SeededRng::new(seed);
    let comps = 1 + rng.below(3);
    let params: Vec<(f64, f64)> = (0..comps)
        .map(|_| (rng.uniform_range(-1.5, 1.5), rng.uniform_range(0.5, 2.0)))
        .collect();
    (0..n)
        .map(|_| {
            let (mu, sd) = params[rng.below(comps)];
            mu + sd * rng.normal()
        })
        .collect()
}
