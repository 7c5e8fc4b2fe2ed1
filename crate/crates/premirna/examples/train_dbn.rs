//! Train the feature-based belief network: extract the 20-feature subset,
//! scale to [0,1], pretrain the RBM stack layer by layer, then fine-tune
//! with a softmax head.
//!
//! Run with `cargo run --example train_dbn`.

use ndarray::Axis;
use premirna::dbn::{pretrain_stack, unroll, PretrainConfig};
use premirna::eval::{evaluate, extract_dataset_features, synth_dataset};
use premirna::features::{apply_normalizer, fit_normalizer, FeatureConfig, FeatureSubset};
use premirna::nn::{train_classifier, TrainConfig, Value};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> premirna::Result<()> {
    let data = synth_dataset(40, 40, 21)?;
    let config = FeatureConfig {
        n_samples: 30,
        n_shuffles: 10,
        ..FeatureConfig::default()
    };
    println!("extracting features for {} sequences...", data.len());
    let features = extract_dataset_features(&data, &config, FeatureSubset::Selected20)?;

    // first 60 train, last 20 test (classes interleave via the generator ids)
    let train_idx: Vec<usize> = (0..30).chain(40..70).collect();
    let test_idx: Vec<usize> = (30..40).chain(70..80).collect();
    let stats = fit_normalizer(&features.select(Axis(0), &train_idx))?;
    let scaled: Vec<Value> = features
        .axis_iter(Axis(0))
        .map(|r| Value::V(apply_normalizer(&stats, &r.to_owned())))
        .collect();

    let train_matrix = ndarray::Array2::from_shape_fn((train_idx.len(), 20), |(i, j)| {
        scaled[train_idx[i]].as_vec()[j]
    });
    println!("pretraining the 20-100-70-35 stack...");
    let stack = pretrain_stack(
        &train_matrix,
        &[100, 70, 35],
        &PretrainConfig {
            epochs: 15,
            ..PretrainConfig::default()
        },
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut net = unroll(&stack, 2, &mut rng);
    let labels = data.labels();
    let train_inputs: Vec<_> = train_idx.iter().map(|&i| scaled[i].clone()).collect();
    let train_targets: Vec<_> = train_idx.iter().map(|&i| labels[i].class_index()).collect();
    println!("fine-tuning...");
    let history = train_classifier(
        &mut net,
        &train_inputs,
        &train_targets,
        &TrainConfig {
            eta: 0.1,
            epochs: 120,
            ..TrainConfig::default()
        },
    )?;
    println!(
        "loss {:.3} -> {:.3}",
        history[0],
        history.last().unwrap()
    );

    let test_inputs: Vec<_> = test_idx.iter().map(|&i| scaled[i].clone()).collect();
    let test_labels: Vec<_> = test_idx.iter().map(|&i| labels[i]).collect();
    let m = evaluate(&net, &test_inputs, &test_labels)?;
    println!(
        "held-out: sensitivity {:.3}, specificity {:.3}, accuracy {:.3}",
        m.sensitivity, m.specificity, m.accuracy
    );
    Ok(())
}
