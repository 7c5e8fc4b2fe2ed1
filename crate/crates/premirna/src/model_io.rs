//! Trained-model persistence: one JSON file holding the architecture, the
//! flat parameter array, and everything needed to replay the input
//! pipeline (training constants, feature extraction config, fitted
//! normalizer).
//!
//! The `version` field is checked on load; a mismatched version or a
//! truncated/corrupt file fails with a model-file error instead of
//! producing a silently wrong network.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eval::ModelSpec;
use crate::features::{FeatureConfig, NormalizationStats};
use crate::nn::{Layer, Network, TrainConfig};
use crate::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Parameter-free description of one layer; weights live in the flat
/// parameter array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layer", rename_all = "snake_case")]
pub enum LayerSpec {
    Conv {
        filters: usize,
        channels: usize,
        window: usize,
        stride: usize,
    },
    Relu,
    Sigmoid,
    MaxPool {
        window: usize,
        stride: usize,
    },
    GlobalMaxPool,
    Flatten,
    Dense {
        outputs: usize,
        inputs: usize,
    },
    Dropout {
        p: f64,
    },
}

impl LayerSpec {
    pub fn from_layer(layer: &Layer) -> LayerSpec {
        match layer {
            Layer::Conv1d {
                weights, stride, ..
            } => {
                let (filters, channels, window) = weights.dim();
                LayerSpec::Conv {
                    filters,
                    channels,
                    window,
                    stride: *stride,
                }
            }
            Layer::Relu => LayerSpec::Relu,
            Layer::Sigmoid => LayerSpec::Sigmoid,
            Layer::MaxPool1d { window, stride } => LayerSpec::MaxPool {
                window: *window,
                stride: *stride,
            },
            Layer::GlobalMaxPool => LayerSpec::GlobalMaxPool,
            Layer::Flatten => LayerSpec::Flatten,
            Layer::Dense { weights, .. } => LayerSpec::Dense {
                outputs: weights.nrows(),
                inputs: weights.ncols(),
            },
            Layer::Dropout { p } => LayerSpec::Dropout { p: *p },
        }
    }

    /// A zero-initialised layer of the declared shape, to be filled from
    /// the parameter array.
    pub fn to_layer(&self) -> Layer {
        use ndarray::{Array1, Array2, Array3};
        match *self {
            LayerSpec::Conv {
                filters,
                channels,
                window,
                stride,
            } => Layer::Conv1d {
                weights: Array3::zeros((filters, channels, window)),
                bias: Array1::zeros(filters),
                stride,
            },
            LayerSpec::Relu => Layer::Relu,
            LayerSpec::Sigmoid => Layer::Sigmoid,
            LayerSpec::MaxPool { window, stride } => Layer::MaxPool1d { window, stride },
            LayerSpec::GlobalMaxPool => Layer::GlobalMaxPool,
            LayerSpec::Flatten => Layer::Flatten,
            LayerSpec::Dense { outputs, inputs } => Layer::Dense {
                weights: Array2::zeros((outputs, inputs)),
                bias: Array1::zeros(outputs),
            },
            LayerSpec::Dropout { p } => Layer::Dropout { p },
        }
    }
}

/// The on-disk model format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub spec: ModelSpec,
    pub layers: Vec<LayerSpec>,
    /// Weights and biases in layer order, weights before bias per layer.
    pub params: Vec<f64>,
    pub seed: u64,
    pub train: TrainConfig,
    /// Input pipeline replay data (feature-based models only).
    pub feature_config: Option<FeatureConfig>,
    pub normalizer: Option<NormalizationStats>,
}

impl ModelFile {
    pub fn from_network(
        spec: &ModelSpec,
        net: &Network,
        seed: u64,
        train: &TrainConfig,
        feature_config: Option<FeatureConfig>,
        normalizer: Option<NormalizationStats>,
    ) -> ModelFile {
        ModelFile {
            version: MODEL_FORMAT_VERSION,
            spec: spec.clone(),
            layers: net.layers.iter().map(LayerSpec::from_layer).collect(),
            params: net.params(),
            seed,
            train: train.clone(),
            feature_config,
            normalizer,
        }
    }

    /// Rebuilds the runnable network from the declared shapes and the flat
    /// parameter array.
    pub fn to_network(&self) -> Result<Network> {
        let mut net = Network::new(self.layers.iter().map(LayerSpec::to_layer).collect());
        net.set_params(&self.params)?;
        Ok(net)
    }
}

pub fn save_model(path: &Path, model: &ModelFile) -> Result<()> {
    let json = serde_json::to_string_pretty(model)
        .map_err(|e| Error::ModelFile(format!("serialization failed: {e}")))?;
    fs::write(path, json).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let model: ModelFile = serde_json::from_str(&text)
        .map_err(|e| Error::ModelFile(format!("{}: corrupt or not a model file: {e}", path.display())))?;
    if model.version != MODEL_FORMAT_VERSION {
        return Err(Error::ModelFile(format!(
            "{}: format version {} unsupported (expected {MODEL_FORMAT_VERSION})",
            path.display(),
            model.version
        )));
    }
    if !model.params.iter().all(|p| p.is_finite()) {
        return Err(Error::ModelFile(format!(
            "{}: non-finite parameter values",
            path.display()
        )));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{cnn_preset, ModelSpec};
    use crate::nn;
    use crate::MAX_SEQ_LEN;
    use ndarray::Array2;

    fn sample_model() -> (ModelFile, Network) {
        let spec = cnn_preset("best3").unwrap();
        let net = spec.build(4, MAX_SEQ_LEN, 5).unwrap();
        let model = ModelFile::from_network(
            &ModelSpec::Cnn { spec },
            &net,
            5,
            &TrainConfig::default(),
            None,
            None,
        );
        (model, net)
    }

    #[test]
    fn round_trip_preserves_network_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let (model, net) = sample_model();
        save_model(&path, &model).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded, model);
        let rebuilt = loaded.to_network().unwrap();
        assert_eq!(rebuilt, net);
        // identical predictions, bit for bit
        let x = nn::Value::M(Array2::from_shape_fn((4, MAX_SEQ_LEN), |(i, j)| {
            f64::from((i + j) % 2 == 0)
        }));
        assert_eq!(
            nn::predict_probs(&net, &x).unwrap(),
            nn::predict_probs(&rebuilt, &x).unwrap()
        );
    }

    #[test]
    fn truncated_file_is_a_clean_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let (model, _) = sample_model();
        save_model(&path, &model).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        let err = load_model(&path).unwrap_err();
        assert!(matches!(err, Error::ModelFile(_)), "{err}");
    }

    #[test]
    fn wrong_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let (mut model, _) = sample_model();
        model.version = 99;
        save_model(&path, &model).unwrap();
        let err = load_model(&path).unwrap_err();
        assert!(err.to_string().contains("version"), "{err}");
    }

    #[test]
    fn param_count_mismatch_is_rejected() {
        let (mut model, _) = sample_model();
        model.params.pop();
        assert!(model.to_network().is_err());
    }
}
