//! Histogram-theoretic input feature design for condition monitoring of
//! rotating machines.
//!
//! The crate turns raw one-dimensional sensor recordings, one set per health
//! state, into classifier-ready feature tables. Each state's amplitude range
//! is cut into equal-width bins whose width comes from Scott's rule
//! (`3.49·σ / N^(1/3)`); column `k` of the state's feature matrix holds the
//! samples that fall into bin `k`, in temporal order.
//!
//! Around that core sit the pieces needed to run the whole pipeline:
//!
//! - [`signal_io`]: CSV / `f64le` signal ingestion and feature, report and
//!   projection writers.
//! - [`histogram`]: bin width, bin geometry and bin membership.
//! - [`features`]: the feature design itself plus dataset harmonization.
//! - [`baseline`]: time-domain, band-energy and segmented-raw comparison
//!   features.
//! - [`classifiers`]: feed-forward network (Adam), random forest and linear
//!   one-vs-rest SVM behind one contract.
//! - [`evaluation`]: stratified k-fold CV, confusion-matrix rates, fold SD and
//!   a PCA 2D projection.
//! - [`synth`]: seeded synthetic bearing-state signals.
//! - [`pipeline`]: config-driven `extract` / `evaluate` / `project` / `synth`.

pub mod baseline;
pub mod classifiers;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod histogram;
pub mod pipeline;
pub mod rng;
pub mod signal_io;
pub mod synth;

pub use classifiers::{ClassifierConfig, ClassifierKind, ClassifierModel, Prediction};
pub use error::{Error, Result};
pub use evaluation::{EvalReport, Projection};
pub use features::{ColumnAlign, FeatureMatrix, FeatureOptions, FillStrategy, LabeledDataset};
pub use histogram::BinSpec;
pub use signal_io::{SignalFormat, SignalSeries};
pub use synth::{FaultSpec, HealthState};
