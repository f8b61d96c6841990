//! Config-driven pipeline behind the `extract`, `evaluate`, `project` and
//! `synth` commands.
//!
//! Recordings are found either through `inputs` (explicit `state`/`paths`
//! pairs) or `data_dir`, where every `*.csv` / `*.f64` file belongs to the
//! state named by its stem up to the first `_` (`inner_3.csv` is `inner`).
//! Relative paths in a config file resolve against the file's directory.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::baseline::{self, DEFAULT_FD_BANDS, DEFAULT_SEGMENT_LEN, DEFAULT_SEGMENT_STRIDE};
use crate::classifiers::{ClassifierConfig, ClassifierKind, NnConfig, RfConfig, SvmConfig};
use crate::error::{Error, Result};
use crate::evaluation::{cross_validate, pca_project_2d, EvalReport, Projection};
use crate::features::{
    design_features_with, harmonize_dataset, ColumnAlign, FeatureOptions, FillStrategy,
    LabeledDataset,
};
use crate::histogram::StdDenominator;
use crate::signal_io::{self, SignalFormat, SignalSeries};
use crate::synth::{self, FaultSpec};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Histogram-binned amplitude features.
    #[default]
    Proposed,
    /// Time-domain statistics per segment.
    Td,
    /// Band energies per segment.
    Fd,
    /// The segment samples themselves.
    RawSegment,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Proposed, Method::Td, Method::Fd, Method::RawSegment];

    pub fn name(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Td => "td",
            Method::Fd => "fd",
            Method::RawSegment => "raw-segment",
        }
    }

    /// Name recorded in reports. The td/fd sets are reimplementations and
    /// say so.
    pub fn report_label(self) -> &'static str {
        match self {
            Method::Td => "td (reimplemented baseline)",
            Method::Fd => "fd (reimplemented baseline)",
            other => other.name(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown method '{s}' (proposed, td, fd, raw-segment)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pooling {
    /// Concatenate each state's recordings before binning.
    #[default]
    Pool,
    /// Bin every recording on its own.
    PerRecording,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub state: String,
    pub paths: Vec<PathBuf>,
    #[serde(default)]
    pub format: Option<SignalFormat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub method: Method,
    pub pooling: Pooling,
    pub fill_strategy: FillStrategy,
    pub column_align: ColumnAlign,
    pub bin_width_override: Option<f64>,
    pub std_denominator: StdDenominator,
    pub segment_len: usize,
    pub segment_stride: usize,
    pub fd_bands: usize,
    pub classifiers: Vec<ClassifierKind>,
    pub nn: NnConfig,
    pub rf: RfConfig,
    pub svm: SvmConfig,
    pub k: usize,
    pub seed: u64,
    pub sample_rate_hz: f64,
    pub data_dir: Option<PathBuf>,
    pub inputs: Vec<InputSpec>,
    /// Specs for `synth`; empty means the built-in four-state suite.
    pub synth: Vec<FaultSpec>,
    pub synth_recordings: usize,
    pub synth_format: SignalFormat,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            method: Method::Proposed,
            pooling: Pooling::Pool,
            fill_strategy: FillStrategy::Truncate,
            column_align: ColumnAlign::TruncateHigh,
            bin_width_override: None,
            std_denominator: StdDenominator::Sample,
            segment_len: DEFAULT_SEGMENT_LEN,
            segment_stride: DEFAULT_SEGMENT_STRIDE,
            fd_bands: DEFAULT_FD_BANDS,
            classifiers: ClassifierKind::ALL.to_vec(),
            nn: NnConfig::default(),
            rf: RfConfig::default(),
            svm: SvmConfig::default(),
            k: 5,
            seed: 0,
            sample_rate_hz: synth::SUITE_SAMPLE_RATE,
            data_dir: None,
            inputs: Vec::new(),
            synth: Vec::new(),
            synth_recordings: 1,
            synth_format: SignalFormat::Csv,
        }
    }
}

const KEYS: [&str; 21] = [
    "method",
    "pooling",
    "fill_strategy",
    "column_align",
    "bin_width_override",
    "std_denominator",
    "segment_len",
    "segment_stride",
    "fd_bands",
    "classifiers",
    "nn",
    "rf",
    "svm",
    "k",
    "seed",
    "sample_rate_hz",
    "data_dir",
    "inputs",
    "synth",
    "synth_recordings",
    "synth_format",
];

impl PipelineConfig {
    pub fn feature_options(&self) -> FeatureOptions {
        FeatureOptions {
            fill_strategy: self.fill_strategy,
            column_align: self.column_align,
            bin_width_override: self.bin_width_override,
            std_denominator: self.std_denominator,
        }
    }

    pub fn classifier_config(&self, kind: ClassifierKind) -> ClassifierConfig {
        ClassifierConfig {
            kind,
            nn: self.nn.clone(),
            rf: self.rf.clone(),
            svm: self.svm.clone(),
            seed: self.seed,
        }
    }

    /// Every violated constraint, each prefixed with its key.
    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        if self.k < 2 {
            p.push(format!("k: must be at least 2, got {}", self.k));
        }
        if self.segment_len == 0 {
            p.push("segment_len: must be positive".into());
        }
        if self.segment_stride == 0 {
            p.push("segment_stride: must be positive".into());
        }
        if self.fd_bands == 0 || 2 * self.fd_bands > self.segment_len {
            p.push(format!(
                "fd_bands: must be in 1..={}, got {}",
                self.segment_len / 2,
                self.fd_bands
            ));
        }
        if let Some(w) = self.bin_width_override {
            if !(w > 0.0 && w.is_finite()) {
                p.push(format!("bin_width_override: must be positive, got {w}"));
            }
        }
        if self.classifiers.is_empty() {
            p.push("classifiers: list at least one of nn, rf, svm".into());
        }
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            p.push("sample_rate_hz: must be positive".into());
        }
        if self.synth_recordings == 0 {
            p.push("synth_recordings: must be positive".into());
        }
        for (i, input) in self.inputs.iter().enumerate() {
            if input.state.is_empty() {
                p.push(format!("inputs[{i}].state: must not be empty"));
            }
            if input.paths.is_empty() {
                p.push(format!("inputs[{i}].paths: list at least one file"));
            }
        }
        let clf = self.classifier_config(ClassifierKind::Rf);
        p.extend(
            clf.problems()
                .into_iter()
                .map(|m| m.strip_prefix("classifier.").unwrap_or(&m).to_string()),
        );
        for (i, spec) in self.synth.iter().enumerate() {
            p.extend(
                spec.problems()
                    .into_iter()
                    .map(|m| format!("synth[{i}].{m}")),
            );
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

    /// Parse a JSON config. Unknown keys, type errors and constraint
    /// violations are all collected into one [`Error::Config`].
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Config(vec![format!("config: {e}")]))?;
        let Value::Object(map) = value else {
            return Err(Error::Config(vec![
                "config: top level must be a JSON object".into(),
            ]));
        };
        let mut problems = Vec::new();
        let mut valid = serde_json::Map::new();
        for (key, v) in map {
            if !KEYS.contains(&key.as_str()) {
                problems.push(format!("{key}: unknown key"));
                continue;
            }
            let single = Value::Object([(key.clone(), v.clone())].into_iter().collect());
            match serde_json::from_value::<PipelineConfig>(single) {
                Ok(_) => {
                    valid.insert(key, v);
                }
                Err(e) => problems.push(format!("{key}: {e}")),
            }
        }
        let cfg: PipelineConfig = serde_json::from_value(Value::Object(valid))
            .map_err(|e| Error::Config(vec![format!("config: {e}")]))?;
        problems.extend(cfg.problems());
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Config(problems))
        }
    }

    /// Load a config file, resolving relative paths against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(dir) = &mut cfg.data_dir {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
        for input in &mut cfg.inputs {
            for p in &mut input.paths {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// State prefix of a data-directory file name: the stem up to the first `_`.
fn state_of(path: &Path) -> Option<String> {
    let stem = path.file_stem()?.to_str()?;
    let state = stem.split('_').next()?;
    (!state.is_empty()).then(|| state.to_string())
}

/// Every recording named by the config, in a deterministic order: `inputs`
/// as listed, then `data_dir` files sorted by name.
pub fn load_recordings(cfg: &PipelineConfig) -> Result<Vec<SignalSeries>> {
    let mut out = Vec::new();
    for input in &cfg.inputs {
        for path in &input.paths {
            let format = input
                .format
                .unwrap_or_else(|| SignalFormat::from_path(path));
            let s = signal_io::read_signal(path, format).map_err(|e| e.in_state(&input.state))?;
            out.push(
                s.with_label(&input.state)
                    .with_sample_rate(cfg.sample_rate_hz)?,
            );
        }
    }
    if let Some(dir) = &cfg.data_dir {
        let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut files = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            let ext = path.extension().and_then(|e| e.to_str());
            if path.is_file() && matches!(ext, Some("csv") | Some("f64")) {
                files.push(path);
            }
        }
        files.sort();
        for path in files {
            let Some(state) = state_of(&path) else {
                continue;
            };
            let s = signal_io::read_signal(&path, SignalFormat::from_path(&path))
                .map_err(|e| e.in_state(&state))?;
            out.push(s.with_label(state).with_sample_rate(cfg.sample_rate_hz)?);
        }
    }
    if out.is_empty() {
        return Err(Error::Config(vec![
            "inputs: no recordings; set inputs, data_dir or --data".into(),
        ]));
    }
    log::info!("loaded {} recordings", out.len());
    Ok(out)
}

/// Group recordings by state label, keeping first-appearance order.
fn group_by_state(recordings: &[SignalSeries]) -> Vec<(String, Vec<SignalSeries>)> {
    let mut groups: Vec<(String, Vec<SignalSeries>)> = Vec::new();
    for r in recordings {
        match groups.iter_mut().find(|(s, _)| *s == r.state_label) {
            Some((_, g)) => g.push(r.clone()),
            None => groups.push((r.state_label.clone(), vec![r.clone()])),
        }
    }
    groups
}

/// Labeled feature table for `cfg.method`.
pub fn build_dataset(recordings: &[SignalSeries], cfg: &PipelineConfig) -> Result<LabeledDataset> {
    match cfg.method {
        Method::Proposed => {
            let options = cfg.feature_options();
            let units: Vec<SignalSeries> = match cfg.pooling {
                Pooling::Pool => group_by_state(recordings)
                    .into_iter()
                    .map(|(state, parts)| SignalSeries::pool(&parts, &state))
                    .collect::<Result<_>>()?,
                Pooling::PerRecording => recordings.to_vec(),
            };
            let matrices = units
                .iter()
                .map(|s| {
                    let m = design_features_with(s, &options)
                        .map_err(|e| e.in_state(&s.state_label))?;
                    log::debug!(
                        "state {}: {}x{} (bin width {})",
                        s.state_label,
                        m.rows(),
                        m.cols(),
                        m.bin_spec.width
                    );
                    Ok(m)
                })
                .collect::<Result<Vec<_>>>()?;
            let data = harmonize_dataset(&matrices, cfg.column_align)?;
            log::info!(
                "proposed features: {} rows, m* = {}",
                data.len(),
                data.m_star
            );
            Ok(data)
        }
        method => {
            let mut names: Vec<String> = Vec::new();
            let mut features = Vec::new();
            let mut labels = Vec::new();
            for r in recordings {
                let label = match names.iter().position(|n| *n == r.state_label) {
                    Some(l) => l,
                    None => {
                        names.push(r.state_label.clone());
                        names.len() - 1
                    }
                };
                let segs = baseline::segment(
                    r.values(),
                    cfg.segment_len,
                    cfg.segment_stride,
                    &r.source_id,
                )
                .map_err(|e| e.in_state(&r.state_label))?;
                for seg in &segs {
                    features.push(match method {
                        Method::Td => baseline::td_features(&seg.values).to_vec(),
                        Method::Fd => baseline::fd_features(&seg.values, cfg.fd_bands)?,
                        _ => baseline::segmented_raw(seg),
                    });
                    labels.push(label);
                }
            }
            if names.len() < 2 {
                return Err(Error::invalid(format!(
                    "need at least 2 health states, got {}",
                    names.len()
                )));
            }
            let data = LabeledDataset::new(features, labels, names)?;
            log::info!("{} features: {} rows x {}", method, data.len(), data.m_star);
            Ok(data)
        }
    }
}

/// Cross-validate every configured classifier on an in-memory dataset.
pub fn evaluate_dataset(data: &LabeledDataset, cfg: &PipelineConfig) -> Result<Vec<EvalReport>> {
    cfg.classifiers
        .iter()
        .map(|&kind| {
            log::info!("evaluating {kind} with {}-fold CV", cfg.k);
            let mut report = cross_validate(data, &cfg.classifier_config(kind), cfg.k, cfg.seed)?;
            report.feature_set = cfg.method.report_label().to_string();
            Ok(report)
        })
        .collect()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Write `features.csv`, plus `bins.json` for pooled proposed features.
pub fn run_extract(cfg: &PipelineConfig, out: &Path) -> Result<LabeledDataset> {
    let recordings = load_recordings(cfg)?;
    let data = build_dataset(&recordings, cfg)?;
    ensure_dir(out)?;
    signal_io::write_dataset(&data, out.join("features.csv"))?;
    if cfg.method == Method::Proposed && cfg.pooling == Pooling::Pool {
        let mut bins = BTreeMap::new();
        for (state, parts) in group_by_state(&recordings) {
            let pooled = SignalSeries::pool(&parts, &state)?;
            let m = design_features_with(&pooled, &cfg.feature_options())
                .map_err(|e| e.in_state(&state))?;
            bins.insert(
                state,
                serde_json::json!({ "bin_spec": m.bin_spec, "rows": m.rows() }),
            );
        }
        let mut s = serde_json::to_string_pretty(&bins)?;
        s.push('\n');
        write_text(&out.join("bins.json"), &s)?;
    }
    Ok(data)
}

/// Write `report_<clf>.json` per classifier and `table.txt`.
pub fn run_evaluate(cfg: &PipelineConfig, out: &Path) -> Result<Vec<EvalReport>> {
    let recordings = load_recordings(cfg)?;
    let data = build_dataset(&recordings, cfg)?;
    let reports = evaluate_dataset(&data, cfg)?;
    ensure_dir(out)?;
    let mut table = String::new();
    for r in &reports {
        signal_io::write_report(r, out.join(format!("report_{}.json", r.classifier)))?;
        table.push_str(&r.to_table());
        table.push('\n');
    }
    write_text(&out.join("table.txt"), &table)?;
    Ok(reports)
}

/// Write `projection.csv`.
pub fn run_project(cfg: &PipelineConfig, out: &Path) -> Result<Projection> {
    let recordings = load_recordings(cfg)?;
    let data = build_dataset(&recordings, cfg)?;
    let projection = pca_project_2d(&data)?;
    ensure_dir(out)?;
    signal_io::write_projection(&projection, out.join("projection.csv"))?;
    Ok(projection)
}

/// Generate recordings as `<state>_<i>.<ext>` plus a `suite.json` config
/// that points back at them with settings suited to the synthetic suite.
pub fn run_synth(cfg: &PipelineConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let specs = if cfg.synth.is_empty() {
        synth::default_suite()
    } else {
        cfg.synth.clone()
    };
    ensure_dir(out)?;
    let mut written = Vec::new();
    for r in 0..cfg.synth_recordings {
        let seed = crate::rng::SeededRng::derived(cfg.seed, r as u64).next_u64();
        for s in synth::gen_suite(&specs, seed)? {
            let path = out.join(format!(
                "{}_{r}.{}",
                s.state_label,
                cfg.synth_format.extension()
            ));
            signal_io::write_signal(&s, &path, cfg.synth_format)?;
            written.push(path);
        }
    }
    let suite = PipelineConfig {
        fill_strategy: FillStrategy::Cycle,
        data_dir: Some(PathBuf::from(".")),
        sample_rate_hz: specs[0].sample_rate_hz,
        seed: cfg.seed,
        ..PipelineConfig::default()
    };
    write_text(&out.join("suite.json"), &suite.to_json()?)?;
    log::info!("wrote {} recordings to {}", written.len(), out.display());
    Ok(written)
}
