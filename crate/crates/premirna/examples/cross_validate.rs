//! Stratified 2-fold cross-validation of both model families on the
//! synthetic hairpin dataset; this mirrors the desk-scale benchmark the
//! acceptance suite runs at 200+200 sequences.
//!
//! Run with `cargo run --release --example cross_validate [n_pos n_neg]`.

use premirna::balance::stratified_kfold;
use premirna::dbn::PretrainConfig;
use premirna::eval::{cnn_preset, cross_validate, synth_dataset, CvConfig, ModelSpec};
use premirna::features::{FeatureConfig, FeatureSubset};
use premirna::nn::TrainConfig;
use premirna::sequence::Label;

fn main() -> premirna::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_pos: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    let n_neg: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);

    let data = synth_dataset(n_pos, n_neg, 7)?;
    let ids: Vec<String> = data.examples.iter().map(|(s, _)| s.id().to_string()).collect();
    let flags: Vec<bool> = data.labels().iter().map(|&l| l == Label::Positive).collect();
    let plan = stratified_kfold(&ids, &flags, 2, 7)?;

    let cnn = ModelSpec::Cnn {
        spec: cnn_preset("best3")?,
    };
    let cnn_cfg = CvConfig {
        train: TrainConfig {
            eta: 0.1,
            epochs: 55,
            ..TrainConfig::default()
        },
        ..CvConfig::default()
    };
    println!("=== CNN (two convolutions + max pool) ===");
    let report = cross_validate(&cnn, &data, &plan, &cnn_cfg)?;
    print!("{}", report.human_table());
    println!("wall clock: {:.1}s\n", report.wall_clock_secs);

    let dbn = ModelSpec::Dbn {
        hidden: vec![100, 70, 35],
        subset: FeatureSubset::Selected20,
    };
    let dbn_cfg = CvConfig {
        train: TrainConfig {
            eta: 0.1,
            epochs: 150,
            ..TrainConfig::default()
        },
        pretrain: PretrainConfig {
            epochs: 20,
            ..PretrainConfig::default()
        },
        features: FeatureConfig {
            n_samples: 30,
            n_shuffles: 10,
            ..FeatureConfig::default()
        },
        ..CvConfig::default()
    };
    println!("=== DBN on the 20-feature subset ===");
    let report = cross_validate(&dbn, &data, &plan, &dbn_cfg)?;
    print!("{}", report.human_table());
    println!("wall clock: {:.1}s", report.wall_clock_secs);
    Ok(())
}
