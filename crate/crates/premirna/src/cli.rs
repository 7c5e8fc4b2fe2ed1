//! Command-line front end.
//!
//! Every run is driven by one flat [`RunConfig`]: values come from
//! built-in defaults, then an optional `--config` JSON file, then explicit
//! flags, in that order. Each command that writes a primary output also
//! writes a `*.config.json` snapshot beside it; re-running the command
//! with only that snapshot reproduces the output exactly.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::balance::{stratified_kfold, undersample};
use crate::encode;
use crate::eval::{
    cross_validate, evaluate, synth_dataset, train_model, CnnHyper, CvConfig, ModelSpec,
};
use crate::features::{
    self, apply_normalizer, fit_normalizer, FeatureConfig, FeatureSubset,
};
use crate::model_io::{load_model, save_model, ModelFile};
use crate::nn::{self, TrainConfig, Value};
use crate::sequence::{load_dataset, parse_fasta, serialize_fasta, Label, LabeledDataset};
use crate::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

/// Flat run configuration. Every field has a default; unknown keys in a
/// config file are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub version: u32,
    /// Which subcommand emitted this snapshot (informational).
    pub command: String,
    /// Master seed; all randomness derives from it.
    pub seed: u64,
    /// Worker threads for feature extraction; 0 = all cores.
    pub jobs: usize,
    /// Model name: `cnn:<1-4|best2|best3>` or `dbn[:full|:selected20]`.
    pub model: String,
    /// Feature subset for extraction and feature-based models.
    pub subset: String,
    pub folds: usize,
    pub repeats: usize,
    pub eta: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub pretrain_eta: f64,
    pub pretrain_epochs: usize,
    /// Stochastic structure samples per sequence (ensemble features).
    pub n_samples: usize,
    /// Dinucleotide shuffles per sequence (z-score features).
    pub n_shuffles: usize,
    pub balance: bool,
    pub balance_k: usize,
    /// Fraction denominator for the train command's held-out split
    /// (5 keeps 1/5 of the data for evaluation).
    pub holdout_folds: usize,
    /// `P,N` synthetic dataset counts, alternative to FASTA inputs.
    pub synthetic: Option<String>,
    pub positive: Option<PathBuf>,
    pub negative: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    // CNN hyper-parameter overrides
    pub window: Option<usize>,
    pub stride: Option<usize>,
    pub filters: Option<usize>,
    pub fc_width: Option<usize>,
    pub dropout: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            version: CONFIG_VERSION,
            command: String::new(),
            seed: 0,
            jobs: 1,
            model: "cnn:best3".into(),
            subset: "full".into(),
            folds: 8,
            repeats: 1,
            eta: 0.01,
            epochs: 100,
            batch_size: 32,
            pretrain_eta: 0.05,
            pretrain_epochs: 50,
            n_samples: 200,
            n_shuffles: 100,
            balance: false,
            balance_k: 5,
            holdout_folds: 5,
            synthetic: None,
            positive: None,
            negative: None,
            out: None,
            report: None,
            window: None,
            stride: None,
            filters: None,
            fc_width: None,
            dropout: None,
        }
    }
}

impl RunConfig {
    fn hyper(&self) -> CnnHyper {
        CnnHyper {
            window: self.window,
            stride: self.stride,
            filters: self.filters,
            fc_width: self.fc_width,
            dropout: self.dropout,
        }
    }

    fn feature_config(&self) -> FeatureConfig {
        FeatureConfig {
            n_samples: self.n_samples,
            n_shuffles: self.n_shuffles,
            seed: self.seed,
            ..FeatureConfig::default()
        }
    }

    fn cv_config(&self) -> CvConfig {
        CvConfig {
            train: TrainConfig {
                eta: self.eta,
                batch_size: self.batch_size,
                epochs: self.epochs,
                seed: self.seed,
            },
            pretrain: crate::dbn::PretrainConfig {
                eta: self.pretrain_eta,
                epochs: self.pretrain_epochs,
                batch_size: self.batch_size,
                seed: self.seed,
            },
            features: self.feature_config(),
            balance: self.balance,
            balance_k: self.balance_k,
            repeats: self.repeats,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "premirna",
    about = "Hairpin-RNA classification pipelines: raw-sequence CNN and feature-based deep belief network"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand; `None` means "not given on the
/// command line" so the config file value survives.
#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed for all randomness
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for feature extraction (0 = all cores)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Positive-class FASTA file
    #[arg(long)]
    pub positive: Option<PathBuf>,
    /// Negative-class FASTA file
    #[arg(long)]
    pub negative: Option<PathBuf>,
    /// Synthetic dataset counts as `P,N` (alternative to FASTA inputs)
    #[arg(long)]
    pub synthetic: Option<String>,
    /// Primary output path
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report path
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Model name: cnn:<1-4|best2|best3> or dbn[:full|:selected20]
    #[arg(long)]
    pub model: Option<String>,
    /// Feature subset: full or selected20
    #[arg(long)]
    pub subset: Option<String>,
    /// Cross-validation fold count
    #[arg(long)]
    pub folds: Option<usize>,
    /// Whole-plan repetitions
    #[arg(long)]
    pub repeats: Option<usize>,
    /// SGD learning rate
    #[arg(long)]
    pub eta: Option<f64>,
    /// Supervised training epochs
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Minibatch size
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Pretraining learning rate (belief network)
    #[arg(long)]
    pub pretrain_eta: Option<f64>,
    /// Pretraining epochs per layer (belief network)
    #[arg(long)]
    pub pretrain_epochs: Option<usize>,
    /// Structure samples per sequence for ensemble features
    #[arg(long)]
    pub n_samples: Option<usize>,
    /// Shuffles per sequence for z-score features
    #[arg(long)]
    pub n_shuffles: Option<usize>,
    /// Under-sample the majority class inside each training split
    #[arg(long)]
    pub balance: bool,
    /// Cluster count for under-sampling
    #[arg(long)]
    pub balance_k: Option<usize>,
    /// Convolution window override
    #[arg(long)]
    pub window: Option<usize>,
    /// Convolution stride override
    #[arg(long)]
    pub stride: Option<usize>,
    /// Convolution filter-count override
    #[arg(long)]
    pub filters: Option<usize>,
    /// Hidden fully-connected width override
    #[arg(long)]
    pub fc_width: Option<usize>,
    /// Dropout rate override
    #[arg(long)]
    pub dropout: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract the feature catalogue from FASTA input to CSV
    Extract(CommonArgs),
    /// Under-sample majority-class rows of a feature CSV
    Balance(CommonArgs),
    /// Generate a synthetic hairpin dataset as two FASTA files
    Synth(CommonArgs),
    /// Train one model and write a model file plus a report
    Train(CommonArgs),
    /// Cross-validate a model spec and report per-fold metrics
    Eval(CommonArgs),
    /// Score sequences with a trained model file
    Predict(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Extract(_) => "extract",
            Command::Balance(_) => "balance",
            Command::Synth(_) => "synth",
            Command::Train(_) => "train",
            Command::Eval(_) => "eval",
            Command::Predict(_) => "predict",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Extract(a)
            | Command::Balance(a)
            | Command::Synth(a)
            | Command::Train(a)
            | Command::Eval(a)
            | Command::Predict(a) => a,
        }
    }
}

/// Defaults <- config file <- flags.
pub fn merge_config(args: &CommonArgs, command: &str) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
            let cfg: RunConfig = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
            if cfg.version != CONFIG_VERSION {
                return Err(Error::InvalidArgument(format!(
                    "{}: config version {} unsupported (expected {CONFIG_VERSION})",
                    path.display(),
                    cfg.version
                )));
            }
            cfg
        }
        None => RunConfig::default(),
    };
    cfg.command = command.to_string();
    macro_rules! take {
        ($($field:ident),*) => {
            $(if args.$field.is_some() { cfg.$field = args.$field.clone(); })*
        };
    }
    macro_rules! take_value {
        ($($field:ident),*) => {
            $(if let Some(v) = args.$field.clone() { cfg.$field = v; })*
        };
    }
    take!(positive, negative, synthetic, out, report, window, stride, filters, fc_width, dropout);
    take_value!(
        seed, jobs, model, subset, folds, repeats, eta, epochs, batch_size, pretrain_eta,
        pretrain_epochs, n_samples, n_shuffles, balance_k
    );
    if args.balance {
        cfg.balance = true;
    }
    Ok(cfg)
}

fn write_snapshot(primary_out: &Path, cfg: &RunConfig) -> Result<()> {
    let path = primary_out.with_extension("config.json");
    let json = serde_json::to_string_pretty(cfg)
        .map_err(|e| Error::InvalidArgument(format!("config serialization: {e}")))?;
    fs::write(&path, json).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn load_input_dataset(cfg: &RunConfig) -> Result<LabeledDataset> {
    if let Some(spec) = &cfg.synthetic {
        let (p, n) = spec
            .split_once(',')
            .ok_or_else(|| Error::InvalidArgument("--synthetic expects `P,N`".into()))?;
        let p: usize = p.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("bad synthetic positive count '{p}'"))
        })?;
        let n: usize = n.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("bad synthetic negative count '{n}'"))
        })?;
        return synth_dataset(p, n, cfg.seed);
    }
    match (&cfg.positive, &cfg.negative) {
        (Some(pos), Some(neg)) => load_dataset(pos, neg),
        _ => Err(Error::InvalidArgument(
            "provide --positive and --negative FASTA files, or --synthetic P,N".into(),
        )),
    }
}

fn required_out(cfg: &RunConfig) -> Result<&Path> {
    cfg.out
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--out is required".into()))
}

fn init_jobs(jobs: usize) {
    if jobs > 0 {
        // ignore the error if a global pool already exists (tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let command = cli.command.name();
    let result = merge_config(cli.command.args(), command).and_then(|cfg| {
        init_jobs(cfg.jobs);
        dispatch(&cli.command, &cfg)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command, cfg: &RunConfig) -> Result<()> {
    match command {
        Command::Extract(_) => cmd_extract(cfg),
        Command::Balance(_) => cmd_balance(cfg),
        Command::Synth(_) => cmd_synth(cfg),
        Command::Train(_) => cmd_train(cfg),
        Command::Eval(_) => cmd_eval(cfg),
        Command::Predict(_) => cmd_predict(cfg),
    }
}

/// Feature CSV layout: `id,label` then the subset's feature columns.
pub fn features_csv(dataset: &LabeledDataset, matrix: &Array2<f64>, subset: FeatureSubset) -> String {
    let mut out = String::from("id,label");
    for name in subset.names() {
        out.push(',');
        out.push_str(&name);
    }
    out.push('\n');
    for (row, (seq, label)) in matrix.rows().into_iter().zip(&dataset.examples) {
        out.push_str(seq.id());
        out.push(',');
        out.push_str(label.as_str());
        for v in row {
            out.push(',');
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    out
}

fn cmd_extract(cfg: &RunConfig) -> Result<()> {
    let out = required_out(cfg)?.to_path_buf();
    let subset = FeatureSubset::parse(&cfg.subset)?;
    let dataset = load_input_dataset(cfg)?;
    let matrix = crate::eval::extract_dataset_features(&dataset, &cfg.feature_config(), subset)?;
    let csv = features_csv(&dataset, &matrix, subset);
    fs::write(&out, csv).map_err(|e| Error::io(format!("writing {}", out.display()), e))?;
    write_snapshot(&out, cfg)?;
    println!(
        "wrote {} rows x {} features to {}",
        dataset.len(),
        subset.names().len(),
        out.display()
    );
    Ok(())
}

/// Parsed feature CSV: ids, labels, and the numeric matrix.
pub fn parse_features_csv(text: &str) -> Result<(Vec<String>, Vec<Label>, Array2<f64>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Data("empty feature CSV".into()))?;
    let n_features = header.split(',').count().saturating_sub(2);
    if !header.starts_with("id,label") {
        return Err(Error::Data("feature CSV must start with id,label".into()));
    }
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let id = fields
            .next()
            .ok_or_else(|| Error::Data(format!("line {}: missing id", lineno + 2)))?;
        let label = match fields.next() {
            Some("positive") => Label::Positive,
            Some("negative") => Label::Negative,
            other => {
                return Err(Error::Data(format!(
                    "line {}: bad label {other:?}",
                    lineno + 2
                )))
            }
        };
        let row: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Data(format!("line {}: bad number '{f}'", lineno + 2)))
            })
            .collect::<Result<_>>()?;
        if row.len() != n_features {
            return Err(Error::Data(format!(
                "line {}: expected {n_features} values, got {}",
                lineno + 2,
                row.len()
            )));
        }
        ids.push(id.to_string());
        labels.push(label);
        values.extend(row);
    }
    let matrix = Array2::from_shape_vec((ids.len(), n_features), values)
        .map_err(|e| Error::Shape(e.to_string()))?;
    Ok((ids, labels, matrix))
}

fn cmd_balance(cfg: &RunConfig) -> Result<()> {
    let input = cfg.positive.as_deref().ok_or_else(|| {
        Error::InvalidArgument("--positive must point at the feature CSV to balance".into())
    })?;
    let out = required_out(cfg)?.to_path_buf();
    let text = fs::read_to_string(input)
        .map_err(|e| Error::io(format!("reading {}", input.display()), e))?;
    let (ids, labels, matrix) = parse_features_csv(&text)?;
    let pos: Vec<usize> = (0..ids.len()).filter(|&i| labels[i] == Label::Positive).collect();
    let neg: Vec<usize> = (0..ids.len()).filter(|&i| labels[i] == Label::Negative).collect();
    if neg.len() <= pos.len() {
        return Err(Error::Data(format!(
            "nothing to balance: {} negatives <= {} positives",
            neg.len(),
            pos.len()
        )));
    }
    let neg_rows = matrix.select(ndarray::Axis(0), &neg);
    let picked = undersample(&neg_rows, pos.len(), cfg.balance_k, cfg.seed)?;
    let mut keep: Vec<usize> = pos;
    keep.extend(picked.into_iter().map(|i| neg[i]));
    keep.sort_unstable();
    let mut csv = String::from("id,label\n");
    for &i in &keep {
        csv.push_str(&format!("{},{}\n", ids[i], labels[i].as_str()));
    }
    fs::write(&out, csv).map_err(|e| Error::io(format!("writing {}", out.display()), e))?;
    write_snapshot(&out, cfg)?;
    println!("kept {} of {} examples -> {}", keep.len(), ids.len(), out.display());
    Ok(())
}

fn cmd_synth(cfg: &RunConfig) -> Result<()> {
    let dataset = match &cfg.synthetic {
        Some(_) => load_input_dataset(cfg)?,
        None => {
            return Err(Error::InvalidArgument(
                "synth requires --synthetic P,N".into(),
            ))
        }
    };
    let out = required_out(cfg)?.to_path_buf();
    let split = |label: Label| {
        let seqs: Vec<_> = dataset
            .examples
            .iter()
            .filter(|(_, l)| *l == label)
            .map(|(s, _)| s.clone())
            .collect();
        serialize_fasta(&seqs)
    };
    let pos_path = out.with_extension("pos.fa");
    let neg_path = out.with_extension("neg.fa");
    fs::write(&pos_path, split(Label::Positive))
        .map_err(|e| Error::io(format!("writing {}", pos_path.display()), e))?;
    fs::write(&neg_path, split(Label::Negative))
        .map_err(|e| Error::io(format!("writing {}", neg_path.display()), e))?;
    write_snapshot(&out, cfg)?;
    println!(
        "wrote {} positives to {} and {} negatives to {}",
        dataset.count(Label::Positive),
        pos_path.display(),
        dataset.count(Label::Negative),
        neg_path.display()
    );
    Ok(())
}

fn hold_out_plan(dataset: &LabeledDataset, cfg: &RunConfig) -> Result<(Vec<usize>, Vec<usize>)> {
    let ids: Vec<String> = dataset.examples.iter().map(|(s, _)| s.id().to_string()).collect();
    let labels: Vec<bool> = dataset.labels().iter().map(|&l| l == Label::Positive).collect();
    let plan = stratified_kfold(&ids, &labels, cfg.holdout_folds, cfg.seed)?;
    let fold = &plan.folds[0];
    Ok((fold.train.clone(), fold.test.clone()))
}

fn cmd_train(cfg: &RunConfig) -> Result<()> {
    let out = required_out(cfg)?.to_path_buf();
    let spec = ModelSpec::parse(&cfg.model, &cfg.hyper())?;
    let dataset = load_input_dataset(cfg)?;
    let (train_idx, test_idx) = hold_out_plan(&dataset, cfg)?;
    let cv = cfg.cv_config();
    let labels = dataset.labels();

    // representation + optional per-pipeline scaling, fitted on train only
    let (inputs, normalizer): (Vec<Value>, Option<features::NormalizationStats>) = match &spec {
        ModelSpec::Cnn { .. } => (crate::eval::encode_dataset(&dataset)?, None),
        ModelSpec::Dbn { subset, .. } => {
            let raw = crate::eval::extract_dataset_features(&dataset, &cv.features, *subset)?;
            let train_m = raw.select(ndarray::Axis(0), &train_idx);
            let stats = fit_normalizer(&train_m)?;
            let scaled: Vec<Value> = raw
                .rows()
                .into_iter()
                .map(|r| Value::V(apply_normalizer(&stats, &r.to_owned())))
                .collect();
            (scaled, Some(stats))
        }
    };
    let train_inputs: Vec<Value> = train_idx.iter().map(|&i| inputs[i].clone()).collect();
    let train_targets: Vec<usize> = train_idx.iter().map(|&i| labels[i].class_index()).collect();
    let net = train_model(&spec, &train_inputs, &train_targets, &cv, cfg.seed)?;

    let test_inputs: Vec<Value> = test_idx.iter().map(|&i| inputs[i].clone()).collect();
    let test_labels: Vec<Label> = test_idx.iter().map(|&i| labels[i]).collect();
    let metrics = evaluate(&net, &test_inputs, &test_labels)?;

    let feature_config = match &spec {
        ModelSpec::Dbn { .. } => Some(cv.features.clone()),
        ModelSpec::Cnn { .. } => None,
    };
    let model = ModelFile::from_network(&spec, &net, cfg.seed, &cv.train, feature_config, normalizer);
    save_model(&out, &model)?;
    write_snapshot(&out, cfg)?;

    let report = serde_json::json!({
        "model": cfg.model,
        "held_out": metrics,
        "accuracy": metrics.accuracy,
        "train_size": train_idx.len(),
        "test_size": test_idx.len(),
        "seed": cfg.seed,
    });
    let report_text = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(path) = &cfg.report {
        fs::write(path, &report_text)
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    }
    println!("{report_text}");
    Ok(())
}

fn cmd_eval(cfg: &RunConfig) -> Result<()> {
    let spec = ModelSpec::parse(&cfg.model, &cfg.hyper())?;
    let dataset = load_input_dataset(cfg)?;
    let ids: Vec<String> = dataset.examples.iter().map(|(s, _)| s.id().to_string()).collect();
    let labels: Vec<bool> = dataset.labels().iter().map(|&l| l == Label::Positive).collect();
    let plan = stratified_kfold(&ids, &labels, cfg.folds, cfg.seed)?;
    let report = cross_validate(&spec, &dataset, &plan, &cfg.cv_config())?;
    print!("{}", report.human_table());
    if let Some(path) = &cfg.report {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        fs::write(path, json).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
        write_snapshot(path, cfg)?;
    }
    Ok(())
}

fn cmd_predict(cfg: &RunConfig) -> Result<()> {
    // `--model` names the trained model file here, not an architecture
    let model_file = PathBuf::from(&cfg.model);
    if !model_file.exists() {
        return Err(Error::InvalidArgument(format!(
            "--model must point at a trained model file (no such file: {})",
            model_file.display()
        )));
    }
    let fasta_path = cfg.positive.as_deref().ok_or_else(|| {
        Error::InvalidArgument("provide the input FASTA via --positive".into())
    })?;
    let model = load_model(&model_file)?;
    let net = model.to_network()?;
    let text = fs::read_to_string(fasta_path)
        .map_err(|e| Error::io(format!("reading {}", fasta_path.display()), e))?;
    let seqs = parse_fasta(&text)?;
    if seqs.is_empty() {
        return Err(Error::Data(format!("{}: no sequences", fasta_path.display())));
    }

    let mut csv = String::from("id,score_positive,label\n");
    for seq in &seqs {
        let input = match &model.spec {
            ModelSpec::Cnn { .. } => {
                Value::M(encode::one_hot_encode_default(seq)?.values.clone())
            }
            ModelSpec::Dbn { subset, .. } => {
                let fc = model.feature_config.as_ref().ok_or_else(|| {
                    Error::ModelFile("feature-based model lacks its feature config".into())
                })?;
                let stats = model.normalizer.as_ref().ok_or_else(|| {
                    Error::ModelFile("feature-based model lacks its normalizer".into())
                })?;
                let vec = features::extract_all(seq, fc)?.subset(*subset);
                Value::V(apply_normalizer(stats, &ndarray::Array1::from(vec)))
            }
        };
        let probs = nn::predict_probs(&net, &input)?;
        let score = probs[Label::Positive.class_index()];
        let label = if score >= 0.5 { "positive" } else { "negative" };
        csv.push_str(&format!("{},{score},{label}\n", seq.id()));
    }
    match &cfg.out {
        Some(path) => {
            fs::write(path, &csv)
                .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
            write_snapshot(path, cfg)?;
        }
        None => print!("{csv}"),
    }
    Ok(())
}
