use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `cm[i][j]` counts rows of true class `i` predicted as `j`.
pub fn confusion_matrix(
    y_true: &[usize],
    y_pred: &[usize],
    n_classes: usize,
) -> Result<Vec<Vec<usize>>> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    let mut cm = vec![vec![0usize; n_classes]; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::invalid(format!(
                "label {} out of range for {n_classes} classes",
                t.max(p)
            )));
        }
        cm[t][p] += 1;
    }
    Ok(cm)
}

/// Per-class one-vs-rest rates. `None` marks a rate whose denominator is
/// zero (class absent, or class holding every sample); such classes are
/// left out of the macro averages and listed in `undefined_tpr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub tpr: Vec<Option<f64>>,
    pub fpr: Vec<Option<f64>>,
    pub macro_tpr: f64,
    pub macro_fpr: f64,
    pub undefined_tpr: Vec<usize>,
}

fn mean_defined(v: &[Option<f64>]) -> f64 {
    let defined: Vec<f64> = v.iter().flatten().copied().collect();
    if defined.is_empty() {
        f64::NAN
    } else {
        defined.iter().sum::<f64>() / defined.len() as f64
    }
}

pub fn rates_from_confusion(cm: &[Vec<usize>]) -> Rates {
    let s = cm.len();
    let total: usize = cm.iter().flatten().sum();
    let mut tpr = Vec::with_capacity(s);
    let mut fpr = Vec::with_capacity(s);
    for i in 0..s {
        let row: usize = cm[i].iter().sum();
        let col: usize = cm.iter().map(|r| r[i]).sum();
        let tp = cm[i][i];
        tpr.push((row > 0).then(|| tp as f64 / row as f64));
        let negatives = total - row;
        fpr.push((negatives > 0).then(|| (col - tp) as f64 / negatives as f64));
    }
    let undefined_tpr = (0..s).filter(|&i| tpr[i].is_none()).collect();
    Rates {
        macro_tpr: mean_defined(&tpr),
        macro_fpr: mean_defined(&fpr),
        tpr,
        fpr,
        undefined_tpr,
    }
}

/// Fold standard deviation `sd(ACC_1..ACC_k) / sqrt(k)`, `sd` with the
/// `k - 1` denominator.
pub fn cv_sd(fold_accs: &[f64], k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid(format!("fold SD needs k >= 2, got {k}")));
    }
    if fold_accs.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: fold_accs.len(),
        });
    }
    let kf = k as f64;
    let mean = fold_accs.iter().sum::<f64>() / kf;
    let var = fold_accs
        .iter()
        .map(|a| (a - mean) * (a - mean))
        .sum::<f64>()
        / (kf - 1.0);
    // sqrt(var / k) rather than sd / sqrt(k): one rounding instead of three
    Ok((var / kf).sqrt())
}
