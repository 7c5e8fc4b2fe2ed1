//! Architecture presets, evaluation metrics, the cross-validation driver,
//! and a synthetic hairpin dataset generator.
//!
//! The two model families share one training kernel ([`crate::nn`]): CNNs
//! consume one-hot matrices, the belief network consumes min-max-scaled
//! feature vectors. Cross-validation fits the scaler and any class
//! balancing on each training split only, trains with a per-fold seed
//! derived from the master seed, and reports per-fold metrics plus their
//! mean and standard deviation.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::balance::{self, FoldPlan};
use crate::dbn::{self, PretrainConfig};
use crate::encode;
use crate::features::{self, FeatureConfig, FeatureSubset};
use crate::nn::{self, Network, TrainConfig, Value};
use crate::sequence::{Base, Label, LabeledDataset, RnaSequence};
use crate::shuffle::dinucleotide_shuffle;
use crate::{Error, Result};

/// Confusion counts and the derived rates. All 0/0 rates are 0 by
/// convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub f1: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

impl Metrics {
    pub fn from_counts(tp: u64, fp: u64, tn: u64, fn_: u64) -> Metrics {
        let sensitivity = ratio(tp as f64, (tp + fn_) as f64);
        let specificity = ratio(tn as f64, (tn + fp) as f64);
        let accuracy = ratio((tp + tn) as f64, (tp + fp + tn + fn_) as f64);
        let precision = ratio(tp as f64, (tp + fp) as f64);
        let f1 = ratio(2.0 * precision * sensitivity, precision + sensitivity);
        Metrics {
            tp,
            fp,
            tn,
            fn_,
            sensitivity,
            specificity,
            accuracy,
            precision,
            f1,
        }
    }
}

/// One convolution stage: `filters` kernels of the given window slid with
/// the given stride.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvSpec {
    pub window: usize,
    pub stride: usize,
    pub filters: usize,
}

/// A declarative CNN architecture that can be validated against the
/// allowed hyper-parameter ranges and then instantiated as a [`Network`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnnSpec {
    /// 1: conv-pool; 2: strided conv + hidden FC; 3: conv-conv-pool;
    /// 4: conv ×3 + pool.
    pub cnn_type: u8,
    pub convs: Vec<ConvSpec>,
    /// (window, stride) of the max-pool stage, if any.
    pub pool: Option<(usize, usize)>,
    /// Width of the hidden fully-connected layer, if any.
    pub hidden_fc: Option<usize>,
    pub dropout: f64,
    pub n_classes: usize,
}

pub const FILTER_WINDOW_RANGE: (usize, usize) = (5, 24);
pub const FILTER_COUNT_RANGE: (usize, usize) = (5, 20);
pub const MAX_STRIDE: usize = 24;
pub const MAX_DROPOUT: f64 = 0.4;

/// Optional overrides applied on top of a type's default hyper-parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CnnHyper {
    pub window: Option<usize>,
    pub stride: Option<usize>,
    pub filters: Option<usize>,
    pub fc_width: Option<usize>,
    pub dropout: Option<f64>,
}

impl CnnSpec {
    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.cnn_type) {
            return Err(Error::InvalidArgument(format!(
                "CNN type {} not in 1..=4",
                self.cnn_type
            )));
        }
        for c in &self.convs {
            if !(FILTER_WINDOW_RANGE.0..=FILTER_WINDOW_RANGE.1).contains(&c.window) {
                return Err(Error::InvalidArgument(format!(
                    "filter size {} outside the allowed range {} to {}",
                    c.window, FILTER_WINDOW_RANGE.0, FILTER_WINDOW_RANGE.1
                )));
            }
            if !(FILTER_COUNT_RANGE.0..=FILTER_COUNT_RANGE.1).contains(&c.filters) {
                return Err(Error::InvalidArgument(format!(
                    "filter count {} outside the allowed range {} to {}",
                    c.filters, FILTER_COUNT_RANGE.0, FILTER_COUNT_RANGE.1
                )));
            }
            if c.stride == 0 || c.stride > MAX_STRIDE {
                return Err(Error::InvalidArgument(format!(
                    "stride {} outside the allowed range 1 to {MAX_STRIDE}",
                    c.stride
                )));
            }
        }
        if let Some((w, s)) = self.pool {
            if w < 2 || w > FILTER_WINDOW_RANGE.1 || s == 0 || s > MAX_STRIDE {
                return Err(Error::InvalidArgument(format!(
                    "pool window {w} / stride {s} outside the allowed range"
                )));
            }
        }
        if !(0.0..=MAX_DROPOUT).contains(&self.dropout) {
            return Err(Error::InvalidArgument(format!(
                "dropout {} outside the allowed range 0 to {MAX_DROPOUT}",
                self.dropout
            )));
        }
        if self.n_classes < 2 {
            return Err(Error::InvalidArgument(
                "classifier needs at least 2 output classes".into(),
            ));
        }
        Ok(())
    }

    /// Instantiates the spec for a `channels`×`input_len` input, checking
    /// every intermediate shape. Weights are seeded.
    pub fn build(&self, channels: usize, input_len: usize, seed: u64) -> Result<Network> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::new();
        let mut ch = channels;
        let mut len = input_len;
        for c in &self.convs {
            layers.push(nn::init_conv(c.filters, ch, c.window, c.stride, &mut rng));
            layers.push(nn::Layer::Relu);
            len = nn::conv_output_len(len, c.window, c.stride)?;
            ch = c.filters;
        }
        if let Some((w, s)) = self.pool {
            layers.push(nn::Layer::MaxPool1d { window: w, stride: s });
            len = nn::conv_output_len(len, w, s)?;
        }
        layers.push(nn::Layer::Flatten);
        let mut width = ch * len;
        if self.dropout > 0.0 {
            layers.push(nn::Layer::Dropout { p: self.dropout });
        }
        if let Some(fc) = self.hidden_fc {
            layers.push(nn::init_dense(fc, width, &mut rng));
            layers.push(nn::Layer::Relu);
            if self.dropout > 0.0 {
                layers.push(nn::Layer::Dropout { p: self.dropout });
            }
            width = fc;
        }
        layers.push(nn::init_dense(self.n_classes, width, &mut rng));
        Ok(Network::new(layers))
    }
}

/// Builds a validated architecture of the given family type, with defaults
/// (window 12, stride 1, 12 filters, pool 6/4, FC 90 where present,
/// dropout 0.3) overridable per hyper-parameter.
pub fn build_cnn(cnn_type: u8, hyper: &CnnHyper) -> Result<CnnSpec> {
    let window = hyper.window.unwrap_or(12);
    let filters = hyper.filters.unwrap_or(12);
    let stride = hyper.stride.unwrap_or(match cnn_type {
        2 => 4,
        _ => 1,
    });
    let dropout = hyper.dropout.unwrap_or(0.3);
    let conv = ConvSpec {
        window,
        stride,
        filters,
    };
    let conv1 = ConvSpec { stride: 1, ..conv };
    let spec = match cnn_type {
        1 => CnnSpec {
            cnn_type,
            convs: vec![conv1],
            pool: Some((6, 4)),
            hidden_fc: None,
            dropout,
            n_classes: 2,
        },
        2 => CnnSpec {
            cnn_type,
            convs: vec![conv],
            pool: None,
            hidden_fc: Some(hyper.fc_width.unwrap_or(90)),
            dropout,
            n_classes: 2,
        },
        3 => CnnSpec {
            cnn_type,
            convs: vec![conv1; 2],
            pool: Some((6, 4)),
            hidden_fc: None,
            dropout,
            n_classes: 2,
        },
        4 => CnnSpec {
            cnn_type,
            convs: vec![conv1; 3],
            pool: Some((6, 4)),
            hidden_fc: None,
            dropout,
            n_classes: 2,
        },
        other => {
            return Err(Error::InvalidArgument(format!(
                "CNN type {other} not in 1..=4"
            )))
        }
    };
    spec.validate()?;
    Ok(spec)
}

/// The two winning architectures, by name.
pub fn cnn_preset(name: &str) -> Result<CnnSpec> {
    let spec = match name {
        "best2" => CnnSpec {
            cnn_type: 2,
            convs: vec![ConvSpec {
                window: 18,
                stride: 4,
                filters: 20,
            }],
            pool: None,
            hidden_fc: Some(90),
            dropout: 0.3,
            n_classes: 2,
        },
        "best3" => CnnSpec {
            cnn_type: 3,
            convs: vec![
                ConvSpec {
                    window: 12,
                    stride: 1,
                    filters: 12,
                },
                ConvSpec {
                    window: 6,
                    stride: 1,
                    filters: 12,
                },
            ],
            pool: Some((6, 4)),
            hidden_fc: None,
            dropout: 0.3,
            n_classes: 2,
        },
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown CNN preset '{other}' (expected 'best2' or 'best3')"
            )))
        }
    };
    spec.validate()?;
    Ok(spec)
}

/// Layer plan for the belief network: input, three fixed hidden widths,
/// then the classification head appended at unroll time.
pub fn build_dbn(input_dim: usize) -> Result<Vec<usize>> {
    if input_dim == 0 {
        return Err(Error::InvalidArgument(
            "DBN input dimension must be >= 1".into(),
        ));
    }
    Ok(vec![input_dim, 100, 70, 35])
}

/// Which pipeline a model follows, serialized into config snapshots and
/// model files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Cnn { spec: CnnSpec },
    Dbn { hidden: Vec<usize>, subset: FeatureSubset },
}

impl ModelSpec {
    /// Parses `cnn:best3`, `cnn:2`, `dbn`, or `dbn:full`.
    pub fn parse(s: &str, hyper: &CnnHyper) -> Result<ModelSpec> {
        if let Some(rest) = s.strip_prefix("cnn:") {
            let spec = match rest {
                "best2" | "best3" => cnn_preset(rest)?,
                t => build_cnn(
                    t.parse::<u8>().map_err(|_| {
                        Error::InvalidArgument(format!(
                            "unknown CNN variant '{t}' (expected a type 1-4 or a preset)"
                        ))
                    })?,
                    hyper,
                )?,
            };
            Ok(ModelSpec::Cnn { spec })
        } else if s == "dbn" || s == "dbn:selected20" {
            Ok(ModelSpec::Dbn {
                hidden: vec![100, 70, 35],
                subset: FeatureSubset::Selected20,
            })
        } else if s == "dbn:full" {
            Ok(ModelSpec::Dbn {
                hidden: vec![100, 70, 35],
                subset: FeatureSubset::Full,
            })
        } else {
            Err(Error::InvalidArgument(format!(
                "unknown model '{s}' (expected cnn:<type|preset> or dbn[:subset])"
            )))
        }
    }
}

/// Argmax-class predictions against true labels; class index 1 is the
/// positive class.
pub fn evaluate(net: &Network, inputs: &[Value], labels: &[Label]) -> Result<Metrics> {
    if inputs.is_empty() {
        return Err(Error::Data("empty evaluation set".into()));
    }
    assert_eq!(inputs.len(), labels.len());
    let (mut tp, mut fp, mut tn, mut fn_) = (0u64, 0u64, 0u64, 0u64);
    for (x, &label) in inputs.iter().zip(labels) {
        let p = nn::predict_probs(net, x)?;
        let predicted = (0..p.len())
            .max_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap())
            .unwrap();
        let predicted_pos = predicted == Label::Positive.class_index();
        match (predicted_pos, label) {
            (true, Label::Positive) => tp += 1,
            (true, Label::Negative) => fp += 1,
            (false, Label::Negative) => tn += 1,
            (false, Label::Positive) => fn_ += 1,
        }
    }
    Ok(Metrics::from_counts(tp, fp, tn, fn_))
}

/// Everything a cross-validation run depends on besides the model spec and
/// fold plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub train: TrainConfig,
    /// Layer-wise pretraining constants (belief network only).
    pub pretrain: PretrainConfig,
    /// Feature extraction constants (belief network only).
    pub features: FeatureConfig,
    /// Under-sample majority-class training examples per fold.
    pub balance: bool,
    /// Cluster count for under-sampling.
    pub balance_k: usize,
    /// Whole-plan repetitions averaged into the report.
    pub repeats: usize,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            train: TrainConfig::default(),
            pretrain: PretrainConfig::default(),
            features: FeatureConfig::default(),
            balance: false,
            balance_k: 5,
            repeats: 1,
        }
    }
}

/// Mean or standard deviation of the headline rates across fold runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub sensitivity: f64,
    pub specificity: f64,
    pub accuracy: f64,
}

/// Full record of a cross-validation run: per-fold metrics (repeats ×
/// folds, fold-major within each repeat), aggregates, the exact config
/// needed to replay it, and the derived per-run seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n_folds: usize,
    pub repeats: usize,
    pub folds: Vec<Metrics>,
    pub mean: SummaryStats,
    pub std: SummaryStats,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub wall_clock_secs: f64,
}

impl ExperimentReport {
    fn summarize(folds: &[Metrics]) -> (SummaryStats, SummaryStats) {
        let n = folds.len() as f64;
        let mean = |f: fn(&Metrics) -> f64| folds.iter().map(f).sum::<f64>() / n;
        let m = SummaryStats {
            sensitivity: mean(|x| x.sensitivity),
            specificity: mean(|x| x.specificity),
            accuracy: mean(|x| x.accuracy),
        };
        let std = |f: fn(&Metrics) -> f64, mu: f64| {
            (folds.iter().map(|x| (f(x) - mu).powi(2)).sum::<f64>() / n).sqrt()
        };
        let s = SummaryStats {
            sensitivity: std(|x| x.sensitivity, m.sensitivity),
            specificity: std(|x| x.specificity, m.specificity),
            accuracy: std(|x| x.accuracy, m.accuracy),
        };
        (m, s)
    }

    /// Plain-text table with the headline columns.
    pub fn human_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<12}{:>13}{:>13}{:>10}\n",
            "run", "Sensitivity", "Specificity", "Accuracy"
        ));
        for (i, m) in self.folds.iter().enumerate() {
            let label = if self.repeats > 1 {
                format!("r{} fold {}", i / self.n_folds + 1, i % self.n_folds + 1)
            } else {
                format!("fold {}", i + 1)
            };
            out.push_str(&format!(
                "{:<12}{:>13.4}{:>13.4}{:>10.4}\n",
                label, m.sensitivity, m.specificity, m.accuracy
            ));
        }
        out.push_str(&format!(
            "{:<12}{:>13.4}{:>13.4}{:>10.4}\n",
            "mean", self.mean.sensitivity, self.mean.specificity, self.mean.accuracy
        ));
        out.push_str(&format!(
            "{:<12}{:>13.4}{:>13.4}{:>10.4}\n",
            "std", self.std.sensitivity, self.std.specificity, self.std.accuracy
        ));
        out
    }
}

/// One-hot inputs for the raw-sequence pipeline.
pub fn encode_dataset(dataset: &LabeledDataset) -> Result<Vec<Value>> {
    dataset
        .examples
        .iter()
        .map(|(seq, _)| Ok(Value::M(encode::one_hot_encode_default(seq)?.values.clone())))
        .collect()
}

/// Feature matrix for the feature-based pipeline, rows in dataset order.
/// Extraction is per-sequence deterministic (seeds derive from sequence
/// ids), so parallel order does not affect the result.
pub fn extract_dataset_features(
    dataset: &LabeledDataset,
    config: &FeatureConfig,
    subset: FeatureSubset,
) -> Result<Array2<f64>> {
    let rows: Vec<Vec<f64>> = dataset
        .examples
        .par_iter()
        .map(|(seq, _)| Ok(features::extract_all(seq, config)?.subset(subset)))
        .collect::<Result<_>>()?;
    let d = rows.first().map(|r| r.len()).unwrap_or(0);
    Array2::from_shape_vec((rows.len(), d), rows.concat())
        .map_err(|e| Error::Shape(e.to_string()))
}

/// Deterministic per-fold seed derivation from the master training seed.
pub fn fold_seed(master: u64, run_index: usize) -> u64 {
    master ^ (run_index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn with_fold_context(err: Error, fold: usize) -> Error {
    match err {
        Error::NonFinite(msg) => Error::NonFinite(format!("fold {fold}: {msg}")),
        other => Error::Data(format!("fold {fold}: {other}")),
    }
}

/// Trains one model on explicit train/test inputs; shared by the fold loop
/// and single-split training.
pub fn train_model(
    spec: &ModelSpec,
    train_inputs: &[Value],
    train_targets: &[usize],
    cfg: &CvConfig,
    seed: u64,
) -> Result<Network> {
    let tcfg = TrainConfig {
        seed,
        ..cfg.train.clone()
    };
    match spec {
        ModelSpec::Cnn { spec } => {
            let (ch, len) = match &train_inputs[0] {
                Value::M(m) => m.dim(),
                Value::V(_) => return Err(Error::Shape("CNN expects matrix inputs".into())),
            };
            let mut net = spec.build(ch, len, seed)?;
            nn::train_classifier(&mut net, train_inputs, train_targets, &tcfg)?;
            Ok(net)
        }
        ModelSpec::Dbn { hidden, .. } => {
            let d = train_inputs[0].as_vec().len();
            let matrix = Array2::from_shape_fn((train_inputs.len(), d), |(i, j)| {
                train_inputs[i].as_vec()[j]
            });
            let pcfg = PretrainConfig {
                seed,
                ..cfg.pretrain.clone()
            };
            let stack = dbn::pretrain_stack(&matrix, hidden, &pcfg)?;
            let mut head_rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
            let mut net = dbn::unroll(&stack, 2, &mut head_rng);
            nn::train_classifier(&mut net, train_inputs, train_targets, &tcfg)?;
            Ok(net)
        }
    }
}

/// Runs the full fold plan: per fold, fit the scaler (and optional
/// majority-class under-sampling) on the training split only, train with a
/// fold-derived seed, and evaluate on the held-out split.
pub fn cross_validate(
    spec: &ModelSpec,
    dataset: &LabeledDataset,
    plan: &FoldPlan,
    cfg: &CvConfig,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    if plan.ids.len() != dataset.len()
        || plan
            .ids
            .iter()
            .zip(&dataset.examples)
            .any(|(id, (seq, _))| id != seq.id())
    {
        return Err(Error::InvalidArgument(
            "fold plan does not match the dataset (ids differ)".into(),
        ));
    }
    if cfg.repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be >= 1".into()));
    }
    let labels = dataset.labels();

    // representation shared across folds; raw (unscaled) for the DBN
    let raw: Vec<Value> = match spec {
        ModelSpec::Cnn { .. } => encode_dataset(dataset)?,
        ModelSpec::Dbn { subset, .. } => {
            let m = extract_dataset_features(dataset, &cfg.features, *subset)?;
            m.axis_iter(Axis(0)).map(|r| Value::V(r.to_owned())).collect()
        }
    };

    let mut folds = Vec::with_capacity(cfg.repeats * plan.folds.len());
    let mut seeds = Vec::with_capacity(cfg.repeats * plan.folds.len());
    for repeat in 0..cfg.repeats {
        for (f, fold) in plan.folds.iter().enumerate() {
            let run = repeat * plan.folds.len() + f;
            let seed = fold_seed(cfg.train.seed, run);
            seeds.push(seed);
            let metrics = run_fold(spec, &raw, &labels, &fold.train, &fold.test, cfg, seed)
                .map_err(|e| with_fold_context(e, f))?;
            folds.push(metrics);
        }
    }
    let (mean, std) = ExperimentReport::summarize(&folds);
    let config = serde_json::json!({
        "model": spec,
        "cv": cfg,
        "fold_plan_seed": plan.seed,
        "n_folds": plan.n_folds,
    });
    Ok(ExperimentReport {
        n_folds: plan.n_folds,
        repeats: cfg.repeats,
        folds,
        mean,
        std,
        config,
        seeds,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    })
}

fn run_fold(
    spec: &ModelSpec,
    raw: &[Value],
    labels: &[Label],
    train_idx: &[usize],
    test_idx: &[usize],
    cfg: &CvConfig,
    seed: u64,
) -> Result<Metrics> {
    let mut train_idx: Vec<usize> = train_idx.to_vec();

    // optional under-sampling of the majority class, fitted on train only
    if cfg.balance {
        let pos: Vec<usize> = train_idx
            .iter()
            .copied()
            .filter(|&i| labels[i] == Label::Positive)
            .collect();
        let neg: Vec<usize> = train_idx
            .iter()
            .copied()
            .filter(|&i| labels[i] == Label::Negative)
            .collect();
        if neg.len() > pos.len() && !pos.is_empty() {
            let rows = value_matrix(raw, &neg);
            let picked = balance::undersample(&rows, pos.len(), cfg.balance_k, seed)?;
            train_idx = pos;
            train_idx.extend(picked.into_iter().map(|i| neg[i]));
            train_idx.sort_unstable();
        }
    }

    let (train_inputs, test_inputs) = match spec {
        ModelSpec::Cnn { .. } => (
            gather(raw, &train_idx),
            gather(raw, test_idx),
        ),
        ModelSpec::Dbn { .. } => {
            let train_m = value_matrix(raw, &train_idx);
            let stats = features::fit_normalizer(&train_m)?;
            let scale = |idx: &[usize]| -> Vec<Value> {
                idx.iter()
                    .map(|&i| Value::V(features::apply_normalizer(&stats, raw[i].as_vec())))
                    .collect()
            };
            (scale(&train_idx), scale(test_idx))
        }
    };
    let train_targets: Vec<usize> = train_idx.iter().map(|&i| labels[i].class_index()).collect();
    let test_labels: Vec<Label> = test_idx.iter().map(|&i| labels[i]).collect();

    let net = train_model(spec, &train_inputs, &train_targets, cfg, seed)?;
    evaluate(&net, &test_inputs, &test_labels)
}

fn gather(raw: &[Value], idx: &[usize]) -> Vec<Value> {
    idx.iter().map(|&i| raw[i].clone()).collect()
}

/// Rows of `raw` (flattened if matrices) stacked into a matrix.
fn value_matrix(raw: &[Value], idx: &[usize]) -> Array2<f64> {
    let d = raw[idx[0]].clone();
    let width = match &d {
        Value::M(m) => m.len(),
        Value::V(v) => v.len(),
    };
    let mut out = Array2::zeros((idx.len(), width));
    for (r, &i) in idx.iter().enumerate() {
        let flat: Vec<f64> = match &raw[i] {
            Value::M(m) => m.iter().copied().collect(),
            Value::V(v) => v.to_vec(),
        };
        out.row_mut(r).assign(&Array1::from(flat));
    }
    out
}

const SYNTH_MIN_LEN: usize = 43;
const SYNTH_MAX_LEN: usize = 154;

/// Deterministic synthetic dataset. Positives are stem-loop hairpins:
/// 18-30 G/C-enriched complementary pairs, a 4-8 nt A/U-rich loop opening
/// with the apical UGUG motif, and unpaired tails carrying the basal UG
/// and 3' CNNC motifs seen in real hairpin precursors. They are drawn
/// from families — a prototype plus members carrying 3-8% point
/// mutations — the way real collections contain homologous precursors.
/// Negatives are dinucleotide shuffles of the positives, which preserve
/// composition but destroy the stem, the positional composition profile,
/// and the motif placement.
pub fn synth_dataset(n_pos: usize, n_neg: usize, seed: u64) -> Result<LabeledDataset> {
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidArgument(
            "both class counts must be >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut examples = Vec::with_capacity(n_pos + n_neg);
    let mut positives = Vec::with_capacity(n_pos);
    // positives come in families (a prototype plus mutated members),
    // mirroring the homology redundancy of real hairpin collections
    let n_families = n_pos.div_ceil(20);
    let prototypes: Vec<(Vec<Base>, Vec<usize>)> =
        (0..n_families).map(|_| hairpin_prototype(&mut rng)).collect();
    for i in 0..n_pos {
        let (proto, conserved) = &prototypes[i % n_families];
        let mut bases = proto.clone();
        // point mutations everywhere except the conserved processing motifs
        let rate = rng.gen_range(0.03..=0.08);
        for (idx, b) in bases.iter_mut().enumerate() {
            if rng.gen::<f64>() < rate && !conserved.contains(&idx) {
                *b = random_base(&mut rng);
            }
        }
        let text: String = bases.iter().map(|b| b.to_char()).collect();
        let seq = RnaSequence::new(format!("pos_{i:04}"), &text)?;
        positives.push(seq.clone());
        examples.push((seq, Label::Positive));
    }
    for j in 0..n_neg {
        let src = &positives[j % n_pos];
        let shuffled = dinucleotide_shuffle(src, &mut rng);
        let seq = RnaSequence::new(format!("neg_{j:04}"), &shuffled.to_string_bases())?;
        examples.push((seq, Label::Negative));
    }
    LabeledDataset::new(examples, format!("synthetic(seed={seed})"))
}

fn random_base<R: Rng>(rng: &mut R) -> Base {
    Base::ALL[rng.gen_range(0..4)]
}

/// G/C-heavy base draw used for stem arms, mirroring the GC enrichment of
/// real hairpin stems; together with the A/U-rich loop this gives
/// positives a positional composition profile that shuffling destroys.
fn stem_base<R: Rng>(rng: &mut R) -> Base {
    let r: f64 = rng.gen();
    if r < 0.35 {
        Base::G
    } else if r < 0.70 {
        Base::C
    } else if r < 0.85 {
        Base::A
    } else {
        Base::U
    }
}

/// A/U-heavy base draw used for loops, so the loop region stays visibly
/// weaker-pairing than the stem.
fn loop_base<R: Rng>(rng: &mut R) -> Base {
    let r: f64 = rng.gen();
    if r < 0.35 {
        Base::A
    } else if r < 0.70 {
        Base::U
    } else if r < 0.85 {
        Base::C
    } else {
        Base::G
    }
}

/// Builds one un-mutated family prototype; returns the bases and the
/// indices of the conserved motifs, which members never mutate.
fn hairpin_prototype<R: Rng>(rng: &mut R) -> (Vec<Base>, Vec<usize>) {
    let stem = rng.gen_range(18..=30usize);
    let loop_len = rng.gen_range(4..=8usize);
    let tail_left = rng.gen_range(3..=5usize);
    let tail_right = rng.gen_range(5..=8usize);

    let left: Vec<Base> = (0..stem).map(|_| stem_base(rng)).collect();
    let mut bases = Vec::with_capacity(2 * stem + loop_len + tail_left + tail_right);
    // 5' tail ending in the basal UG motif
    bases.extend((0..tail_left - 2).map(|_| random_base(rng)));
    let mut conserved = Vec::new();
    conserved.extend(bases.len()..bases.len() + 2);
    bases.extend([Base::U, Base::G]);
    bases.extend(left.iter().copied());
    // loop opens with the apical UGUG motif, rest A/U-rich
    conserved.extend(bases.len()..bases.len() + 4);
    bases.extend([Base::U, Base::G, Base::U, Base::G]);
    bases.extend((4..loop_len).map(|_| loop_base(rng)));
    bases.extend(left.iter().rev().map(|b| b.complement()));
    // 3' tail opens with the CNNC motif
    conserved.extend([bases.len(), bases.len() + 3]);
    bases.extend([Base::C, random_base(rng), random_base(rng), Base::C]);
    bases.extend((4..tail_right).map(|_| random_base(rng)));
    debug_assert!(bases.len() >= SYNTH_MIN_LEN && bases.len() <= SYNTH_MAX_LEN);
    (bases, conserved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fold::fold;
    use crate::MAX_SEQ_LEN;

    #[test]
    fn metrics_hand_cases() {
        let m = Metrics::from_counts(1, 0, 1, 0);
        assert_eq!(
            (m.sensitivity, m.specificity, m.accuracy, m.f1),
            (1.0, 1.0, 1.0, 1.0)
        );
        let m = Metrics::from_counts(90, 20, 80, 10);
        assert!((m.sensitivity - 0.9).abs() < 1e-15);
        assert!((m.specificity - 0.8).abs() < 1e-15);
        assert!((m.accuracy - 0.85).abs() < 1e-15);
        assert!((m.precision - 90.0 / 110.0).abs() < 1e-15);
        // all-negative predictor on a balanced set
        let m = Metrics::from_counts(0, 0, 50, 50);
        assert_eq!((m.sensitivity, m.specificity, m.accuracy), (0.0, 1.0, 0.5));
        // 0/0 conventions
        let m = Metrics::from_counts(0, 0, 0, 0);
        assert_eq!(
            (m.sensitivity, m.specificity, m.accuracy, m.precision, m.f1),
            (0.0, 0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn metrics_identities_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let (tp, fp, tn, fn_) = (
                rng.gen_range(0..500u64),
                rng.gen_range(0..500u64),
                rng.gen_range(0..500u64),
                rng.gen_range(0..500u64),
            );
            let m = Metrics::from_counts(tp, fp, tn, fn_);
            let r = |n: f64, d: f64| if d == 0.0 { 0.0 } else { n / d };
            assert!((m.sensitivity - r(tp as f64, (tp + fn_) as f64)).abs() < 1e-12);
            assert!((m.specificity - r(tn as f64, (tn + fp) as f64)).abs() < 1e-12);
            assert!(
                (m.accuracy - r((tp + tn) as f64, (tp + fp + tn + fn_) as f64)).abs() < 1e-12
            );
            assert!((m.precision - r(tp as f64, (tp + fp) as f64)).abs() < 1e-12);
            assert!(
                (m.f1 - r(2.0 * m.precision * m.sensitivity, m.precision + m.sensitivity)).abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn preset_best2_layer_list() {
        let spec = cnn_preset("best2").unwrap();
        assert_eq!(spec.convs, vec![ConvSpec { window: 18, stride: 4, filters: 20 }]);
        assert_eq!(spec.hidden_fc, Some(90));
        assert_eq!(spec.pool, None);
        assert_eq!(spec.dropout, 0.3);
        assert_eq!(nn::conv_output_len(MAX_SEQ_LEN, 18, 4).unwrap(), 36);
    }

    #[test]
    fn preset_best3_layer_list() {
        let spec = cnn_preset("best3").unwrap();
        assert_eq!(spec.convs.len(), 2);
        assert_eq!(spec.convs[0], ConvSpec { window: 12, stride: 1, filters: 12 });
        assert_eq!(spec.convs[1], ConvSpec { window: 6, stride: 1, filters: 12 });
        assert_eq!(spec.pool, Some((6, 4)));
        assert_eq!(spec.hidden_fc, None);
    }

    #[test]
    fn presets_run_on_full_width_input() {
        for name in ["best2", "best3"] {
            let net = cnn_preset(name).unwrap().build(4, MAX_SEQ_LEN, 0).unwrap();
            let x = Value::M(Array2::zeros((4, MAX_SEQ_LEN)));
            let p = nn::predict_probs(&net, &x).unwrap();
            assert_eq!(p.len(), 2);
            assert!((p.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn type4_has_three_convs() {
        let spec = build_cnn(4, &CnnHyper::default()).unwrap();
        assert_eq!(spec.convs.len(), 3);
        assert!(spec.pool.is_some());
    }

    #[test]
    fn hyper_range_errors_cite_ranges() {
        let err = build_cnn(
            2,
            &CnnHyper {
                window: Some(30),
                ..Default::default()
            },
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("5 to 24"), "{msg}");
        assert!(build_cnn(
            1,
            &CnnHyper {
                filters: Some(30),
                ..Default::default()
            }
        )
        .unwrap_err()
        .to_string()
        .contains("5 to 20"));
        assert!(build_cnn(
            1,
            &CnnHyper {
                dropout: Some(0.5),
                ..Default::default()
            }
        )
        .is_err());
    }

    #[test]
    fn dbn_plans() {
        assert_eq!(build_dbn(20).unwrap(), vec![20, 100, 70, 35]);
        assert_eq!(build_dbn(58).unwrap(), vec![58, 100, 70, 35]);
        assert_eq!(build_dbn(1).unwrap(), vec![1, 100, 70, 35]);
        assert!(build_dbn(0).is_err());
    }

    #[test]
    fn evaluate_rejects_empty_set() {
        let net = Network::new(vec![nn::init_dense(2, 3, &mut ChaCha8Rng::seed_from_u64(0))]);
        assert!(evaluate(&net, &[], &[]).is_err());
    }

    #[test]
    fn synth_dataset_counts_bounds_determinism() {
        let a = synth_dataset(30, 25, 7).unwrap();
        assert_eq!(a.count(Label::Positive), 30);
        assert_eq!(a.count(Label::Negative), 25);
        for (seq, _) in &a.examples {
            assert!(seq.len() >= SYNTH_MIN_LEN && seq.len() <= SYNTH_MAX_LEN);
        }
        let b = synth_dataset(30, 25, 7).unwrap();
        assert_eq!(a.manifest_csv(), b.manifest_csv());
        for ((s1, _), (s2, _)) in a.examples.iter().zip(&b.examples) {
            assert_eq!(s1.to_string_bases(), s2.to_string_bases());
        }
        assert_ne!(
            synth_dataset(30, 25, 8).unwrap().examples[0].0.to_string_bases(),
            a.examples[0].0.to_string_bases()
        );
    }

    #[test]
    fn synth_positives_fold_lower_than_negatives() {
        let data = synth_dataset(15, 15, 3).unwrap();
        let mean_energy = |label: Label| {
            let (sum, n) = data
                .examples
                .iter()
                .filter(|(_, l)| *l == label)
                .map(|(s, _)| fold(s).energy)
                .fold((0.0, 0usize), |(a, c), e| (a + e, c + 1));
            sum / n as f64
        };
        let pos = mean_energy(Label::Positive);
        let neg = mean_energy(Label::Negative);
        assert!(pos < neg, "positive mean {pos} not below negative mean {neg}");
    }

    #[test]
    fn cross_validate_smoke_cnn() {
        let data = synth_dataset(16, 16, 1).unwrap();
        let ids: Vec<String> = data.examples.iter().map(|(s, _)| s.id().to_string()).collect();
        let labels: Vec<bool> = data.labels().iter().map(|&l| l == Label::Positive).collect();
        let plan = balance::stratified_kfold(&ids, &labels, 2, 0).unwrap();
        let spec = ModelSpec::Cnn {
            spec: cnn_preset("best3").unwrap(),
        };
        let cfg = CvConfig {
            train: TrainConfig {
                epochs: 3,
                ..Default::default()
            },
            ..Default::default()
        };
        let report = cross_validate(&spec, &data, &plan, &cfg).unwrap();
        assert_eq!(report.folds.len(), 2);
        assert_eq!(report.seeds.len(), 2);
        // determinism of the whole driver
        let again = cross_validate(&spec, &data, &plan, &cfg).unwrap();
        assert_eq!(report.folds, again.folds);
        let table = report.human_table();
        assert!(table.contains("Sensitivity") && table.contains("Accuracy"));
        // config snapshot survives serialization
        let json = serde_json::to_string(&report).unwrap();
        let back: ExperimentReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.folds, report.folds);
    }

    #[test]
    fn cross_validate_smoke_dbn() {
        let data = synth_dataset(10, 10, 2).unwrap();
        let ids: Vec<String> = data.examples.iter().map(|(s, _)| s.id().to_string()).collect();
        let labels: Vec<bool> = data.labels().iter().map(|&l| l == Label::Positive).collect();
        let plan = balance::stratified_kfold(&ids, &labels, 2, 0).unwrap();
        let spec = ModelSpec::Dbn {
            hidden: vec![8, 4],
            subset: FeatureSubset::Selected20,
        };
        let cfg = CvConfig {
            train: TrainConfig {
                epochs: 3,
                ..Default::default()
            },
            pretrain: PretrainConfig {
                epochs: 2,
                ..Default::default()
            },
            features: FeatureConfig {
                n_samples: 10,
                n_shuffles: 10,
                ..Default::default()
            },
            ..Default::default()
        };
        let report = cross_validate(&spec, &data, &plan, &cfg).unwrap();
        assert_eq!(report.folds.len(), 2);
    }

    #[test]
    fn cross_validate_rejects_mismatched_plan() {
        let data = synth_dataset(4, 4, 0).unwrap();
        let ids: Vec<String> = (0..8).map(|i| format!("other_{i}")).collect();
        let labels = vec![true, true, true, true, false, false, false, false];
        let plan = balance::stratified_kfold(&ids, &labels, 2, 0).unwrap();
        let spec = ModelSpec::Cnn {
            spec: cnn_preset("best3").unwrap(),
        };
        assert!(cross_validate(&spec, &data, &plan, &CvConfig::default()).is_err());
    }

    #[test]
    fn model_spec_parse() {
        assert!(matches!(
            ModelSpec::parse("cnn:best2", &CnnHyper::default()).unwrap(),
            ModelSpec::Cnn { .. }
        ));
        assert!(matches!(
            ModelSpec::parse("dbn", &CnnHyper::default()).unwrap(),
            ModelSpec::Dbn {
                subset: FeatureSubset::Selected20,
                ..
            }
        ));
        assert!(ModelSpec::parse("svm", &CnnHyper::default()).is_err());
    }
}
