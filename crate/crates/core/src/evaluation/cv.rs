use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::kfold::stratified_kfold;
use super::metrics::{confusion_matrix, cv_sd, rates_from_confusion};
use crate::classifiers::{self, ClassifierConfig, Standardizer};
use crate::error::{Error, Result};
use crate::features::LabeledDataset;

/// Outcome of one k-fold cross-validation run.
///
/// Rates come from the confusion matrix pooled over all folds. A `None`
/// rate marks a class with no samples (TPR) or one holding every sample
/// (FPR); those classes are left out of the macro averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_class_tpr: Vec<Option<f64>>,
    pub per_class_fpr: Vec<Option<f64>>,
    pub macro_tpr: f64,
    pub macro_fpr: f64,
    /// Percent.
    pub fold_accuracies: Vec<f64>,
    pub acc_mean: f64,
    pub acc_sd: f64,
    pub classifier: String,
    pub feature_set: String,
    pub k: usize,
    pub seed: u64,
    pub label_names: Vec<String>,
    pub confusion: Vec<Vec<usize>>,
}

impl EvalReport {
    /// Plain-text summary: one line per class with TPR and FPR, then the
    /// accuracy line.
    pub fn to_table(&self) -> String {
        let width = self
            .label_names
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(5)
            .max(5);
        let fmt = |r: Option<f64>| r.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"));
        let mut out = String::new();
        let _ = writeln!(
            out,
            "classifier={} features={} k={} seed={}",
            self.classifier, self.feature_set, self.k, self.seed
        );
        let _ = writeln!(out, "{:<width$}  {:>6}  {:>6}", "class", "TPR", "FPR");
        for (i, name) in self.label_names.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:<width$}  {:>6}  {:>6}",
                name,
                fmt(self.per_class_tpr[i]),
                fmt(self.per_class_fpr[i])
            );
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>6.4}  {:>6.4}",
            "macro", self.macro_tpr, self.macro_fpr
        );
        let _ = writeln!(out, "ACC {:.2} ± {:.2}", self.acc_mean, self.acc_sd);
        out
    }
}

/// Per-fold diagnostics from [`cross_validate_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct FoldRecord {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub predictions: Vec<usize>,
    pub accuracy: f64,
    /// Standardization fitted by the fold's model, if it uses one.
    pub standardizer: Option<Standardizer>,
}

pub fn cross_validate(
    data: &LabeledDataset,
    cfg: &ClassifierConfig,
    k: usize,
    seed: u64,
) -> Result<EvalReport> {
    cross_validate_detailed(data, cfg, k, seed).map(|(r, _)| r)
}

fn run_fold(
    data: &LabeledDataset,
    cfg: &ClassifierConfig,
    fold: usize,
    test: &[usize],
) -> Result<FoldRecord> {
    let mut is_test = vec![false; data.len()];
    test.iter().for_each(|&i| is_test[i] = true);
    let train: Vec<usize> = (0..data.len()).filter(|&i| !is_test[i]).collect();
    let mut fold_cfg = cfg.clone();
    fold_cfg.seed = cfg.seed.wrapping_add(fold as u64);
    let model = classifiers::train(&data.subset(&train), &fold_cfg)?;
    let test_rows: Vec<Vec<f64>> = test.iter().map(|&i| data.features[i].clone()).collect();
    let predictions = classifiers::predict(&model, &test_rows)?.labels;
    let correct = test
        .iter()
        .zip(&predictions)
        .filter(|(&i, &p)| data.labels[i] == p)
        .count();
    Ok(FoldRecord {
        accuracy: 100.0 * correct as f64 / test.len() as f64,
        standardizer: model.standardizer().cloned(),
        train,
        test: test.to_vec(),
        predictions,
    })
}

/// Stratified k-fold CV. Folds are trained concurrently; each fold's model
/// is seeded from `cfg.seed` plus the fold index, so results do not depend
/// on scheduling.
pub fn cross_validate_detailed(
    data: &LabeledDataset,
    cfg: &ClassifierConfig,
    k: usize,
    seed: u64,
) -> Result<(EvalReport, Vec<FoldRecord>)> {
    cfg.validate()?;
    classifiers::check_trainable(data)?;
    let folds = stratified_kfold(&data.labels, k, seed)?;
    let results: Vec<Result<FoldRecord>> = std::thread::scope(|s| {
        let handles: Vec<_> = folds
            .iter()
            .enumerate()
            .map(|(f, test)| s.spawn(move || run_fold(data, cfg, f, test)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Error::invalid("fold worker panicked")))
            })
            .collect()
    });
    let records = results.into_iter().collect::<Result<Vec<_>>>()?;
    for (f, r) in records.iter().enumerate() {
        log::info!("fold {}/{k}: accuracy {:.2}%", f + 1, r.accuracy);
    }

    let n_classes = data.n_classes();
    let mut truth = Vec::with_capacity(data.len());
    let mut pred = Vec::with_capacity(data.len());
    for r in &records {
        truth.extend(r.test.iter().map(|&i| data.labels[i]));
        pred.extend_from_slice(&r.predictions);
    }
    let confusion = confusion_matrix(&truth, &pred, n_classes)?;
    let rates = rates_from_confusion(&confusion);
    for &c in &rates.undefined_tpr {
        log::warn!(
            "class '{}' has no samples; omitted from macro TPR",
            data.label_names[c]
        );
    }
    let fold_accuracies: Vec<f64> = records.iter().map(|r| r.accuracy).collect();
    let report = EvalReport {
        per_class_tpr: rates.tpr,
        per_class_fpr: rates.fpr,
        macro_tpr: rates.macro_tpr,
        macro_fpr: rates.macro_fpr,
        acc_mean: fold_accuracies.iter().sum::<f64>() / k as f64,
        acc_sd: cv_sd(&fold_accuracies, k)?,
        fold_accuracies,
        classifier: cfg.kind.name().to_string(),
        feature_set: "proposed".to_string(),
        k,
        seed,
        label_names: data.label_names.clone(),
        confusion,
    };
    Ok((report, records))
}
