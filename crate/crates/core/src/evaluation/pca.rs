use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::LabeledDataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub points: Vec<(f64, f64)>,
    pub labels: Vec<usize>,
    pub label_names: Vec<String>,
    /// Variance captured by the two components.
    pub explained_variance: [f64; 2],
}

/// Project rows onto the top two principal components of the centered data.
///
/// Each component's sign is fixed so that its largest-magnitude loading is
/// positive (first such loading on ties).
pub fn pca_project_2d(data: &LabeledDataset) -> Result<Projection> {
    let n = data.len();
    let m = data.m_star;
    if n < 2 || m < 2 {
        return Err(Error::invalid(format!(
            "projection needs at least 2 rows and 2 features, got {n}x{m}"
        )));
    }
    let mut mean = vec![0.0; m];
    for row in &data.features {
        mean.iter_mut().zip(row).for_each(|(a, v)| *a += v);
    }
    mean.iter_mut().for_each(|a| *a /= n as f64);
    let centered = DMatrix::from_fn(n, m, |i, j| data.features[i][j] - mean[j]);
    let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
    if cov.trace() <= 0.0 {
        return Err(Error::invalid("projection of constant data"));
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });

    let mut axes = Vec::with_capacity(2);
    for &c in &order[..2] {
        let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
        let mut lead = 0;
        for (j, x) in v.iter().enumerate() {
            if x.abs() > v[lead].abs() {
                lead = j;
            }
        }
        if v[lead] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        axes.push(v);
    }
    let dot = |i: usize, v: &[f64]| (0..m).map(|j| centered[(i, j)] * v[j]).sum::<f64>();
    let points = (0..n)
        .map(|i| (dot(i, &axes[0]), dot(i, &axes[1])))
        .collect();
    Ok(Projection {
        points,
        labels: data.labels.clone(),
        label_names: data.label_names.clone(),
        explained_variance: [
            eig.eigenvalues[order[0]].max(0.0),
            eig.eigenvalues[order[1]].max(0.0),
        ],
    })
}
