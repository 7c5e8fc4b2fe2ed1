//! Restricted Boltzmann machines and the stacked belief network built from
//! them.
//!
//! Each RBM is trained greedily with one-step contrastive divergence
//! (sampled hidden states, mean-field reconstruction), then its hidden
//! probabilities feed the next layer. The trained stack unrolls into a
//! feed-forward sigmoid network (see [`unroll`]) topped by a randomly
//! initialised softmax head for supervised fine-tuning via [`crate::nn`].
//!
//! Visible units are expected in [0, 1]; feature vectors must be min-max
//! scaled first.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::nn::{self, Layer, Network};
use crate::{Error, Result};

/// One RBM with binary hidden units and [0, 1] visible units.
/// `w` is [hidden, visible].
#[derive(Debug, Clone, PartialEq)]
pub struct Rbm {
    pub w: Array2<f64>,
    pub b_v: Array1<f64>,
    pub b_h: Array1<f64>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl Rbm {
    /// Weights drawn from N(0, 0.01), biases zero.
    pub fn init<R: Rng>(n_hidden: usize, n_visible: usize, rng: &mut R) -> Self {
        let w = Array2::from_shape_fn((n_hidden, n_visible), |_| gaussian(rng) * 0.01);
        Rbm {
            w,
            b_v: Array1::zeros(n_visible),
            b_h: Array1::zeros(n_hidden),
        }
    }

    pub fn n_visible(&self) -> usize {
        self.w.ncols()
    }

    pub fn n_hidden(&self) -> usize {
        self.w.nrows()
    }

    /// p(h_j = 1 | v) = sigmoid(W v + b_h).
    pub fn hidden_probs(&self, v: &Array1<f64>) -> Array1<f64> {
        (self.w.dot(v) + &self.b_h).mapv(sigmoid)
    }

    /// p(v_i = 1 | h) = sigmoid(W^T h + b_v).
    pub fn visible_probs(&self, h: &Array1<f64>) -> Array1<f64> {
        (self.w.t().dot(h) + &self.b_v).mapv(sigmoid)
    }

    /// One CD-1 step on a single example. Hidden states are sampled for the
    /// reconstruction; the reconstruction itself and both sufficient
    /// statistics use probabilities (mean field). Returns the squared
    /// reconstruction error.
    pub fn cd1_update<R: Rng>(&mut self, v0: &Array1<f64>, eta: f64, rng: &mut R) -> f64 {
        let h0_p = self.hidden_probs(v0);
        let h0_s = h0_p.mapv(|p| if rng.gen::<f64>() < p { 1.0 } else { 0.0 });
        let v1 = self.visible_probs(&h0_s);
        let h1_p = self.hidden_probs(&v1);

        let pos = outer(&h0_p, v0);
        let neg = outer(&h1_p, &v1);
        self.w.zip_mut_with(&(pos - neg), |w, d| *w += eta * d);
        self.b_v.zip_mut_with(&(v0 - &v1), |b, d| *b += eta * d);
        self.b_h.zip_mut_with(&(&h0_p - &h1_p), |b, d| *b += eta * d);

        (v0 - &v1).mapv(|d| d * d).sum()
    }
}

fn outer(a: &Array1<f64>, b: &Array1<f64>) -> Array2<f64> {
    a.view()
        .insert_axis(Axis(1))
        .dot(&b.view().insert_axis(Axis(0)))
}

/// Box-Muller standard normal.
fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Layer-wise pretraining constants. Defaults: eta 0.05, 50 epochs per
/// layer, minibatch 32 (examples are visited one at a time within the
/// shuffled batch order).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PretrainConfig {
    pub eta: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for PretrainConfig {
    fn default() -> Self {
        PretrainConfig {
            eta: 0.05,
            epochs: 50,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// Trains one RBM on the rows of `data`; returns the machine and the mean
/// squared reconstruction error per epoch.
pub fn train_rbm(
    data: &Array2<f64>,
    n_hidden: usize,
    cfg: &PretrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Rbm, Vec<f64>)> {
    let n = data.nrows();
    if n == 0 {
        return Err(Error::Data("empty pretraining set".into()));
    }
    let mut rbm = Rbm::init(n_hidden, data.ncols(), rng);
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut err = 0.0;
        for &idx in &order {
            let v = data.row(idx).to_owned();
            err += rbm.cd1_update(&v, cfg.eta, rng);
        }
        history.push(err / n as f64);
    }
    Ok((rbm, history))
}

/// Greedy layer-wise pretraining. `hidden_sizes` lists the hidden width of
/// each successive RBM; each layer trains on the previous layer's hidden
/// probabilities.
pub fn pretrain_stack(
    data: &Array2<f64>,
    hidden_sizes: &[usize],
    cfg: &PretrainConfig,
) -> Result<Vec<Rbm>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut stack = Vec::with_capacity(hidden_sizes.len());
    let mut current = data.clone();
    for &n_hidden in hidden_sizes {
        if n_hidden == 0 {
            return Err(Error::InvalidArgument("hidden layer of width 0".into()));
        }
        let (rbm, _) = train_rbm(&current, n_hidden, cfg, &mut rng)?;
        let mut next = Array2::zeros((current.nrows(), n_hidden));
        for (i, row) in current.axis_iter(Axis(0)).enumerate() {
            next.row_mut(i).assign(&rbm.hidden_probs(&row.to_owned()));
        }
        stack.push(rbm);
        current = next;
    }
    Ok(stack)
}

/// Unrolls a pretrained stack into Dense+Sigmoid layers and appends a
/// freshly initialised `n_classes`-way linear head.
pub fn unroll(stack: &[Rbm], n_classes: usize, rng: &mut ChaCha8Rng) -> Network {
    let mut layers = Vec::new();
    for rbm in stack {
        layers.push(Layer::Dense {
            weights: rbm.w.clone(),
            bias: rbm.b_h.clone(),
        });
        layers.push(Layer::Sigmoid);
    }
    let top = stack.last().map(|r| r.n_hidden()).unwrap_or(0);
    layers.push(nn::init_dense(n_classes, top, rng));
    Network::new(layers)
}
