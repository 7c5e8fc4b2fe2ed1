//! Train a model, save it to a JSON model file, reload, and score new
//! sequences — the same round trip the `train` and `predict` subcommands
//! perform.
//!
//! Run with `cargo run --example predict`.

use premirna::encode::one_hot_encode_default;
use premirna::eval::{cnn_preset, synth_dataset, train_model, CvConfig, ModelSpec};
use premirna::model_io::{load_model, save_model, ModelFile};
use premirna::nn::{predict_probs, TrainConfig, Value};
use premirna::sequence::Label;

fn main() -> premirna::Result<()> {
    let data = synth_dataset(40, 40, 3)?;
    let inputs: Vec<Value> = data
        .examples
        .iter()
        .map(|(s, _)| Ok(Value::M(one_hot_encode_default(s)?.values.clone())))
        .collect::<premirna::Result<_>>()?;
    let targets: Vec<usize> = data.labels().iter().map(|l| l.class_index()).collect();

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
    println!("training...");
    let net = train_model(&spec, &inputs, &targets, &cfg, 0)?;

    let dir = std::env::temp_dir().join("premirna_predict_example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join("model.json");
    save_model(&path, &ModelFile::from_network(&spec, &net, 0, &cfg.train, None, None))?;
    let reloaded = load_model(&path)?.to_network()?;
    println!("model round-tripped through {}\n", path.display());

    let fresh = synth_dataset(5, 5, 99)?;
    println!("{:<9}{:>16}  {}", "id", "score_positive", "call");
    for (seq, label) in &fresh.examples {
        let x = Value::M(one_hot_encode_default(seq)?.values.clone());
        let p = predict_probs(&reloaded, &x)?;
        let score = p[Label::Positive.class_index()];
        println!(
            "{:<9}{score:>16.4}  {} (truth: {})",
            seq.id(),
            if score >= 0.5 { "positive" } else { "negative" },
            label.as_str()
        );
    }
    Ok(())
}
