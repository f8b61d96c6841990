//! The three classifier families behind one train/predict contract.
//!
//! - [`nn`]: two-hidden-layer ReLU network with softmax output, trained with
//!   Adam on cross-entropy.
//! - [`forest`]: bagged CART trees (Gini) with random feature subsets.
//! - [`svm`]: linear one-vs-rest hinge-loss classifiers.
//!
//! NN and SVM models standardize features with statistics fitted on their
//! own training rows; the forest works on raw values.

pub mod forest;
pub mod nn;
pub mod standardize;
pub mod svm;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::LabeledDataset;

pub use forest::RandomForest;
pub use nn::{nn_gradient_check, GradientCheck, Mlp};
pub use standardize::Standardizer;
pub use svm::LinearSvm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Nn,
    Rf,
    Svm,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] =
        [ClassifierKind::Nn, ClassifierKind::Rf, ClassifierKind::Svm];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Nn => "nn",
            ClassifierKind::Rf => "rf",
            ClassifierKind::Svm => "svm",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nn" => Ok(ClassifierKind::Nn),
            "rf" => Ok(ClassifierKind::Rf),
            "svm" => Ok(ClassifierKind::Svm),
            other => Err(Error::invalid(format!("unknown classifier '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NnConfig {
    pub hidden: [usize; 2],
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for NnConfig {
    fn default() -> Self {
        Self {
            hidden: [60, 20],
            learning_rate: 1e-3,
            epochs: 200,
            batch_size: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RfConfig {
    pub trees: usize,
    /// `None` grows trees until leaves are pure.
    pub max_depth: Option<usize>,
    /// `None` uses `round(sqrt(m))`.
    pub features_per_split: Option<usize>,
    pub min_samples_split: usize,
    pub bootstrap: bool,
}

impl Default for RfConfig {
    fn default() -> Self {
        Self {
            trees: 100,
            max_depth: None,
            features_per_split: None,
            min_samples_split: 2,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub c: f64,
    pub epochs: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            epochs: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub kind: ClassifierKind,
    pub nn: NnConfig,
    pub rf: RfConfig,
    pub svm: SvmConfig,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            kind: ClassifierKind::Rf,
            nn: NnConfig::default(),
            rf: RfConfig::default(),
            svm: SvmConfig::default(),
            seed: 0,
        }
    }
}

impl ClassifierConfig {
    pub fn new(kind: ClassifierKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            ..Default::default()
        }
    }

    /// Every violated constraint, prefixed with its config key.
    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        let nn = &self.nn;
        if nn.hidden.contains(&0) {
            p.push("classifier.nn.hidden: layer sizes must be positive".into());
        }
        if !(nn.learning_rate > 0.0 && nn.learning_rate.is_finite()) {
            p.push("classifier.nn.learning_rate: must be positive".into());
        }
        if nn.epochs == 0 {
            p.push("classifier.nn.epochs: must be positive".into());
        }
        if nn.batch_size == 0 {
            p.push("classifier.nn.batch_size: must be positive".into());
        }
        if self.rf.trees == 0 {
            p.push("classifier.rf.trees: must be positive".into());
        }
        if self.rf.max_depth == Some(0) {
            p.push("classifier.rf.max_depth: must be positive".into());
        }
        if self.rf.features_per_split == Some(0) {
            p.push("classifier.rf.features_per_split: must be positive".into());
        }
        if self.rf.min_samples_split < 2 {
            p.push("classifier.rf.min_samples_split: must be at least 2".into());
        }
        if !(self.svm.c > 0.0 && self.svm.c.is_finite()) {
            p.push("classifier.svm.c: must be positive".into());
        }
        if self.svm.epochs == 0 {
            p.push("classifier.svm.epochs: must be positive".into());
        }
        p
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(p))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelParams {
    Nn {
        standardizer: Standardizer,
        network: Mlp,
    },
    Rf {
        forest: RandomForest,
    },
    Svm {
        standardizer: Standardizer,
        svm: LinearSvm,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub label_names: Vec<String>,
    pub n_features: usize,
    pub params: ModelParams,
}

/// Labels plus per-class scores: softmax probabilities (NN), vote
/// fractions (RF) or decision values (SVM).
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub labels: Vec<usize>,
    pub scores: Vec<Vec<f64>>,
}

impl ClassifierModel {
    pub fn kind(&self) -> ClassifierKind {
        match self.params {
            ModelParams::Nn { .. } => ClassifierKind::Nn,
            ModelParams::Rf { .. } => ClassifierKind::Rf,
            ModelParams::Svm { .. } => ClassifierKind::Svm,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.label_names.len()
    }

    /// Standardization statistics, for the models that use them.
    pub fn standardizer(&self) -> Option<&Standardizer> {
        match &self.params {
            ModelParams::Nn { standardizer, .. } | ModelParams::Svm { standardizer, .. } => {
                Some(standardizer)
            }
            ModelParams::Rf { .. } => None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

pub(crate) fn check_trainable(data: &LabeledDataset) -> Result<()> {
    if data.is_empty() {
        return Err(Error::invalid("empty training set"));
    }
    if data.m_star == 0 {
        return Err(Error::invalid("training rows have no features"));
    }
    if data.class_counts().iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::SingleClass);
    }
    Ok(())
}

pub fn train(data: &LabeledDataset, cfg: &ClassifierConfig) -> Result<ClassifierModel> {
    match cfg.kind {
        ClassifierKind::Nn => train_nn(data, cfg),
        ClassifierKind::Rf => train_rf(data, cfg),
        ClassifierKind::Svm => train_svm(data, cfg),
    }
}

pub fn train_nn(data: &LabeledDataset, cfg: &ClassifierConfig) -> Result<ClassifierModel> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::invalid("empty training set"));
    }
    let standardizer = Standardizer::fit(&data.features)?;
    let x = standardizer.transform_all(&data.features);
    let network = nn::train(&x, &data.labels, data.n_classes(), &cfg.nn, cfg.seed)?;
    Ok(ClassifierModel {
        label_names: data.label_names.clone(),
        n_features: data.m_star,
        params: ModelParams::Nn {
            standardizer,
            network,
        },
    })
}

pub fn train_rf(data: &LabeledDataset, cfg: &ClassifierConfig) -> Result<ClassifierModel> {
    cfg.validate()?;
    check_trainable(data)?;
    let forest = forest::train(
        &data.features,
        &data.labels,
        data.n_classes(),
        &cfg.rf,
        cfg.seed,
    );
    Ok(ClassifierModel {
        label_names: data.label_names.clone(),
        n_features: data.m_star,
        params: ModelParams::Rf { forest },
    })
}

pub fn train_svm(data: &LabeledDataset, cfg: &ClassifierConfig) -> Result<ClassifierModel> {
    cfg.validate()?;
    check_trainable(data)?;
    let standardizer = Standardizer::fit(&data.features)?;
    let x = standardizer.transform_all(&data.features);
    let svm = svm::train(&x, &data.labels, data.n_classes(), &cfg.svm, cfg.seed);
    Ok(ClassifierModel {
        label_names: data.label_names.clone(),
        n_features: data.m_star,
        params: ModelParams::Svm { standardizer, svm },
    })
}

fn argmax(scores: &[f64]) -> usize {
    // first maximum wins ties
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

pub fn predict(model: &ClassifierModel, rows: &[Vec<f64>]) -> Result<Prediction> {
    if let Some(bad) = rows.iter().find(|r| r.len() != model.n_features) {
        return Err(Error::DimensionMismatch {
            expected: model.n_features,
            got: bad.len(),
        });
    }
    let scores: Vec<Vec<f64>> = match &model.params {
        ModelParams::Nn {
            standardizer,
            network,
        } => rows
            .iter()
            .map(|r| network.probabilities(&standardizer.transform(r)))
            .collect(),
        ModelParams::Rf { forest } => rows.iter().map(|r| forest.vote_fractions(r)).collect(),
        ModelParams::Svm { standardizer, svm } => rows
            .iter()
            .map(|r| svm.decision_values(&standardizer.transform(r)))
            .collect(),
    };
    let labels = scores.iter().map(|s| argmax(s)).collect();
    Ok(Prediction { labels, scores })
}
