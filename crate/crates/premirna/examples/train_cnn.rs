//! Train the winning two-convolution CNN on one-hot encoded sequences and
//! evaluate it on a held-out split.
//!
//! Run with `cargo run --example train_cnn`.

use premirna::balance::stratified_kfold;
use premirna::eval::{cnn_preset, encode_dataset, evaluate, synth_dataset, train_model,
    CvConfig, ModelSpec};
use premirna::nn::TrainConfig;
use premirna::sequence::Label;

fn main() -> premirna::Result<()> {
    let data = synth_dataset(60, 60, 11)?;
    let inputs = encode_dataset(&data)?;
    let labels = data.labels();

    // 5-fold plan; fold 0 is the held-out fifth
    let ids: Vec<String> = data.examples.iter().map(|(s, _)| s.id().to_string()).collect();
    let flags: Vec<bool> = labels.iter().map(|&l| l == Label::Positive).collect();
    let plan = stratified_kfold(&ids, &flags, 5, 0)?;
    let fold = &plan.folds[0];

    let spec = ModelSpec::Cnn {
        spec: cnn_preset("best3")?,
    };
    let cfg = CvConfig {
        train: TrainConfig {
            eta: 0.02,
            epochs: 60,
            ..TrainConfig::default()
        },
        ..CvConfig::default()
    };
    let train_inputs: Vec<_> = fold.train.iter().map(|&i| inputs[i].clone()).collect();
    let train_targets: Vec<_> = fold.train.iter().map(|&i| labels[i].class_index()).collect();
    println!("training on {} examples...", train_inputs.len());
    let net = train_model(&spec, &train_inputs, &train_targets, &cfg, 0)?;

    let test_inputs: Vec<_> = fold.test.iter().map(|&i| inputs[i].clone()).collect();
    let test_labels: Vec<_> = fold.test.iter().map(|&i| labels[i]).collect();
    let m = evaluate(&net, &test_inputs, &test_labels)?;
    println!(
        "held-out ({} examples): sensitivity {:.3}, specificity {:.3}, accuracy {:.3}",
        test_inputs.len(),
        m.sensitivity,
        m.specificity,
        m.accuracy
    );
    Ok(())
}
