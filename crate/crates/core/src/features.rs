//! Histogram-designed input features.
//!
//! For one health state the signal's amplitude range is cut into the bins of
//! its [`BinSpec`]. Walking the bins from the minimum upward, bin `k`
//! becomes column `k` of the state's feature matrix and its samples, in the
//! order they were recorded, fill that column top to bottom. Bins hold
//! different numbers of samples, so the fill strategy decides the row count:
//!
//! - [`FillStrategy::Truncate`] keeps `n = min_k c_k` rows and drops the
//!   surplus of fuller bins.
//! - [`FillStrategy::Cycle`] keeps `n = max_k c_k` rows; shorter bins wrap
//!   around to their first sample again, so every sample is used.
//!
//! An empty bin admits no rectangular matrix under either strategy and is an
//! error.
//!
//! States generally end up with different column counts. [`harmonize_dataset`]
//! reduces every state to the smallest count before stacking rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{make_bin_spec_with_width, scott_bin_width_with, BinSpec, StdDenominator};
use crate::signal_io::SignalSeries;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FillStrategy {
    #[default]
    Truncate,
    Cycle,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnAlign {
    /// Keep the lowest-amplitude `m*` columns.
    #[default]
    TruncateHigh,
    /// Keep `m*` columns spread evenly over the state's bins.
    SubsampleEven,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureOptions {
    pub fill_strategy: FillStrategy,
    pub column_align: ColumnAlign,
    /// Fixed bin width replacing Scott's rule.
    pub bin_width_override: Option<f64>,
    pub std_denominator: StdDenominator,
}

/// `n × m` designed features for one health state, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
    pub state_label: String,
    pub bin_spec: BinSpec,
}

impl FeatureMatrix {
    /// Build from explicit rows. Every row must have `bin_spec.count`
    /// entries.
    pub fn from_rows(
        rows: Vec<Vec<f64>>,
        state_label: impl Into<String>,
        bin_spec: BinSpec,
    ) -> Result<Self> {
        let cols = bin_spec.count;
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            data,
            rows: n,
            cols,
            state_label: state_label.into(),
            bin_spec,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows_iter().map(<[f64]>::to_vec).collect()
    }
}

/// Harmonized multi-state table ready for classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub label_names: Vec<String>,
    pub m_star: usize,
}

impl LabeledDataset {
    pub fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<usize>,
        label_names: Vec<String>,
    ) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.len(),
                got: labels.len(),
            });
        }
        let m_star = features.first().map_or(0, Vec::len);
        if let Some(bad) = features.iter().find(|r| r.len() != m_star) {
            return Err(Error::DimensionMismatch {
                expected: m_star,
                got: bad.len(),
            });
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= label_names.len()) {
            return Err(Error::invalid(format!(
                "label {l} out of range for {} classes",
                label_names.len()
            )));
        }
        Ok(Self {
            features,
            labels,
            label_names,
            m_star,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.label_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.n_classes()];
        for &l in &self.labels {
            c[l] += 1;
        }
        c
    }

    /// Rows at `indices`, keeping the full label-name table.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            label_names: self.label_names.clone(),
            m_star: self.m_star,
        }
    }
}

/// Split `values` into per-bin lists, each in temporal order.
pub fn partition_by_bin(values: &[f64], spec: &BinSpec) -> Result<Vec<Vec<f64>>> {
    let mut bins = vec![Vec::new(); spec.count];
    for &v in values {
        let k = spec.bin_of(v).ok_or(Error::OutOfRange {
            value: v,
            lo: spec.origin,
            hi: spec.max_amplitude,
        })?;
        bins[k].push(v);
    }
    Ok(bins)
}

/// Rows supported by every bin: the smallest bin size (0 if any is empty).
pub fn row_count(partition: &[Vec<f64>]) -> usize {
    partition.iter().map(Vec::len).min().unwrap_or(0)
}

fn first_empty(partition: &[Vec<f64>]) -> Option<usize> {
    partition.iter().position(Vec::is_empty)
}

/// Feature matrix for one state with default options.
pub fn design_features(series: &SignalSeries) -> Result<FeatureMatrix> {
    design_features_with(series, &FeatureOptions::default())
}

pub fn design_features_with(
    series: &SignalSeries,
    options: &FeatureOptions,
) -> Result<FeatureMatrix> {
    let values = series.values();
    let width = match options.bin_width_override {
        Some(w) => w,
        None => scott_bin_width_with(values, options.std_denominator)?,
    };
    let spec = make_bin_spec_with_width(values, width)?;
    let partition = partition_by_bin(values, &spec)?;
    if let Some(bin) = first_empty(&partition) {
        return Err(Error::EmptyBin {
            bin,
            count: spec.count,
        });
    }
    let n = match options.fill_strategy {
        FillStrategy::Truncate => row_count(&partition),
        FillStrategy::Cycle => partition.iter().map(Vec::len).max().unwrap_or(0),
    };
    let m = spec.count;
    let mut data = Vec::with_capacity(n * m);
    for r in 0..n {
        for bin in &partition {
            data.push(bin[r % bin.len()]);
        }
    }
    Ok(FeatureMatrix {
        data,
        rows: n,
        cols: m,
        state_label: series.state_label.clone(),
        bin_spec: spec,
    })
}

/// Column indices kept when reducing `m` columns to `m_star`.
pub fn aligned_columns(m: usize, m_star: usize, align: ColumnAlign) -> Vec<usize> {
    match align {
        ColumnAlign::TruncateHigh => (0..m_star).collect(),
        ColumnAlign::SubsampleEven if m_star <= 1 => vec![0; m_star],
        ColumnAlign::SubsampleEven => (0..m_star)
            .map(|j| ((j * (m - 1)) as f64 / (m_star - 1) as f64).round() as usize)
            .collect(),
    }
}

/// Stack per-state (or per-recording) matrices into one dataset with a
/// common column count `m* = min m_i`. Labels follow the order in which
/// state labels first appear; matrices sharing a label share a class.
pub fn harmonize_dataset(matrices: &[FeatureMatrix], align: ColumnAlign) -> Result<LabeledDataset> {
    let mut names: Vec<String> = Vec::new();
    for m in matrices {
        if !names.contains(&m.state_label) {
            names.push(m.state_label.clone());
        }
    }
    if names.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 health states, got {}",
            names.len()
        )));
    }
    if let Some(empty) = matrices.iter().find(|m| m.rows == 0) {
        return Err(Error::invalid(format!(
            "state '{}' has no feature rows",
            empty.state_label
        )));
    }
    let m_star = matrices.iter().map(|m| m.cols).min().expect("non-empty");
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for m in matrices {
        let label = names
            .iter()
            .position(|n| *n == m.state_label)
            .expect("collected");
        let cols = aligned_columns(m.cols, m_star, align);
        for row in m.rows_iter() {
            features.push(cols.iter().map(|&c| row[c]).collect());
            labels.push(label);
        }
    }
    LabeledDataset::new(features, labels, names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::make_bin_spec;
    use proptest::prelude::*;

    fn series(values: &[f64]) -> SignalSeries {
        SignalSeries::new(values.to_vec(), 1.0, "s", "t").unwrap()
    }

    #[test]
    fn partition_worked_example() {
        let spec = make_bin_spec(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let p = partition_by_bin(&[1.0, 2.0, 3.0, 4.0, 5.0], &spec).unwrap();
        assert_eq!(p, vec![vec![1.0, 2.0, 3.0, 4.0], vec![5.0]]);
        let p = partition_by_bin(&[5.0, 1.0, 4.0, 2.0, 3.0], &spec).unwrap();
        assert_eq!(p, vec![vec![1.0, 4.0, 2.0, 3.0], vec![5.0]]);
    }

    #[test]
    fn partition_with_empty_middle_bin() {
        let spec = BinSpec::new(0.0, 3.4, 3, 10.0).unwrap();
        let p = partition_by_bin(&[0.0, 0.1, 10.0], &spec).unwrap();
        assert_eq!(p, vec![vec![0.0, 0.1], vec![], vec![10.0]]);
        assert_eq!(row_count(&p), 0);
    }

    #[test]
    fn row_count_rules() {
        assert_eq!(row_count(&[vec![0.0; 4], vec![0.0]]), 1);
        assert_eq!(row_count(&[vec![0.0; 3], vec![0.0; 3]]), 3);
        assert_eq!(row_count(&[vec![0.0; 3], vec![]]), 0);
    }

    #[test]
    fn worked_feature_matrix() {
        let f = design_features(&series(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap();
        assert_eq!((f.rows(), f.cols()), (1, 2));
        assert_eq!(f.to_rows(), vec![vec![1.0, 5.0]]);
        let f2 = design_features(&series(&[2.0, 4.0, 6.0, 8.0, 10.0])).unwrap();
        assert_eq!(f2.to_rows(), vec![vec![2.0, 10.0]]);
    }

    #[test]
    fn cycle_fill_wraps_short_bins() {
        let opts = FeatureOptions {
            fill_strategy: FillStrategy::Cycle,
            ..Default::default()
        };
        let f = design_features_with(&series(&[1.0, 2.0, 3.0, 4.0, 5.0]), &opts).unwrap();
        assert_eq!(
            f.to_rows(),
            vec![
                vec![1.0, 5.0],
                vec![2.0, 5.0],
                vec![3.0, 5.0],
                vec![4.0, 5.0]
            ]
        );
    }

    #[test]
    fn empty_bin_error_names_bin() {
        let opts = FeatureOptions {
            bin_width_override: Some(3.4),
            ..Default::default()
        };
        let err = design_features_with(&series(&[0.0, 0.1, 10.0]), &opts).unwrap_err();
        assert!(matches!(err, Error::EmptyBin { bin: 1, count: 3 }), "{err}");
        let msg = err.to_string();
        assert!(msg.contains("empty bin") && msg.contains("bin_width_override"));
    }

    #[test]
    fn degenerate_signal_rejected() {
        assert!(matches!(
            design_features(&series(&[3.0, 3.0, 3.0])),
            Err(Error::Degenerate)
        ));
    }

    fn matrix(label: &str, cols: usize, rows: usize) -> FeatureMatrix {
        let spec = BinSpec::new(0.0, 1.0, cols, cols as f64).unwrap();
        let data = (0..rows)
            .map(|r| (0..cols).map(|c| (r * 10 + c) as f64).collect())
            .collect();
        FeatureMatrix::from_rows(data, label, spec).unwrap()
    }

    #[test]
    fn harmonize_truncates_high_columns() {
        let d = harmonize_dataset(
            &[matrix("a", 5, 2), matrix("b", 4, 3)],
            ColumnAlign::TruncateHigh,
        )
        .unwrap();
        assert_eq!(d.m_star, 4);
        assert_eq!(d.len(), 5);
        assert_eq!(d.features[0], vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(d.labels, vec![0, 0, 1, 1, 1]);
    }

    #[test]
    fn harmonize_equal_widths_and_label_order() {
        let ms = [
            matrix("healthy", 3, 2),
            matrix("LIV", 3, 1),
            matrix("LOV", 3, 4),
        ];
        let d = harmonize_dataset(&ms, ColumnAlign::TruncateHigh).unwrap();
        assert_eq!(d.m_star, 3);
        assert_eq!(d.len(), 7);
        assert_eq!(d.label_names, vec!["healthy", "LIV", "LOV"]);
        assert_eq!(d.features[2], ms[1].row(0));
        assert_eq!(d.class_counts(), vec![2, 1, 4]);
    }

    #[test]
    fn harmonize_subsample_even() {
        let d = harmonize_dataset(
            &[matrix("a", 7, 1), matrix("b", 4, 1)],
            ColumnAlign::SubsampleEven,
        )
        .unwrap();
        assert_eq!(d.features[0], vec![0.0, 2.0, 4.0, 6.0]);
        assert_eq!(d.features[1], vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn harmonize_errors() {
        assert!(harmonize_dataset(&[matrix("a", 3, 2)], ColumnAlign::TruncateHigh).is_err());
        assert!(harmonize_dataset(
            &[matrix("a", 3, 2), matrix("a", 3, 2)],
            ColumnAlign::TruncateHigh
        )
        .is_err());
        assert!(harmonize_dataset(
            &[matrix("a", 3, 2), matrix("b", 3, 0)],
            ColumnAlign::TruncateHigh
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn columns_stay_inside_their_bins(
            v in prop::collection::vec(-5.0f64..5.0, 3..300),
            cycle in any::<bool>(),
        ) {
            let opts = FeatureOptions {
                fill_strategy: if cycle { FillStrategy::Cycle } else { FillStrategy::Truncate },
                ..Default::default()
            };
            let Ok(f) = design_features_with(&series(&v), &opts) else { return Ok(()); };
            let spec = f.bin_spec;
            for r in 0..f.rows() {
                for k in 0..f.cols() {
                    let x = f.get(r, k);
                    prop_assert!(x >= spec.edge(k));
                    if k + 1 < f.cols() {
                        prop_assert!(x < spec.edge(k + 1));
                    } else {
                        prop_assert!(x <= spec.max_amplitude);
                    }
                    prop_assert!(v.contains(&x));
                }
            }
        }
    }
}
