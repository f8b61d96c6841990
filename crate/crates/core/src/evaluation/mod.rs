//! Cross-validated evaluation and feature-space projection.

mod cv;
mod kfold;
mod metrics;
mod pca;

pub use cv::{cross_validate, cross_validate_detailed, EvalReport, FoldRecord};
pub use kfold::{kfold_indices, stratified_kfold};
pub use metrics::{confusion_matrix, cv_sd, rates_from_confusion, Rates};
pub use pca::{pca_project_2d, Projection};
