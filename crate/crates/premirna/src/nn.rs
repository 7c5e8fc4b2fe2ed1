//! Minimal neural-network kernel with manual backpropagation.
//!
//! Supports 1D convolution, max pooling (windowed and global), dense layers,
//! ReLU/sigmoid activations, inverted dropout, a softmax cross-entropy head,
//! and plain SGD. Gradients are exact reverse-mode derivatives; a
//! finite-difference checker ([`numeric_gradients`]) that only uses forward
//! passes is provided as the independent oracle.
//!
//! Everything is 64-bit. Activations are cached per example during the
//! forward pass, and minibatch gradients are averaged over examples in a
//! fixed order so single-threaded runs are bit-reproducible.

use ndarray::{Array1, Array2, Array3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Activation flowing between layers: a channels×length matrix or a flat
/// vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    M(Array2<f64>),
    V(Array1<f64>),
}

impl Value {
    pub fn as_vec(&self) -> &Array1<f64> {
        match self {
            Value::V(v) => v,
            Value::M(_) => panic!("expected vector activation"),
        }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Value {
        match self {
            Value::M(m) => Value::M(m.mapv(&f)),
            Value::V(v) => Value::V(v.mapv(&f)),
        }
    }

    fn zip_mul(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::M(a), Value::M(b)) => Value::M(a * b),
            (Value::V(a), Value::V(b)) => Value::V(a * b),
            _ => panic!("mismatched activation kinds"),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Value::M(m) => m.len(),
            Value::V(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A concrete layer with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    /// weights[filter, channel, k], stride >= 1.
    Conv1d {
        weights: Array3<f64>,
        bias: Array1<f64>,
        stride: usize,
    },
    Relu,
    Sigmoid,
    MaxPool1d {
        window: usize,
        stride: usize,
    },
    GlobalMaxPool,
    Flatten,
    /// weights[out, in].
    Dense {
        weights: Array2<f64>,
        bias: Array1<f64>,
    },
    Dropout {
        p: f64,
    },
}

/// Gradient slot aligned with one layer.
#[derive(Debug, Clone)]
pub enum LayerGrad {
    Conv {
        dw: Array3<f64>,
        db: Array1<f64>,
    },
    Dense {
        dw: Array2<f64>,
        db: Array1<f64>,
    },
    None,
}

/// Forward/backward mode. Training mode needs a dropout RNG.
pub enum Mode<'a> {
    Train(&'a mut ChaCha8Rng),
    Infer,
}

/// Per-layer cache from a forward pass.
enum Aux {
    None,
    /// argmax source index per output element (row-major over [c, L_out]).
    PoolArgmax(Vec<usize>),
    /// dropout keep mask with the 1/(1-p) scale folded in.
    Mask(Value),
    /// original matrix shape before flattening.
    Shape(usize, usize),
}

/// Cached activations for one example.
pub struct ForwardTrace {
    /// values[0] = input, values[k+1] = output of layer k.
    values: Vec<Value>,
    aux: Vec<Aux>,
}

impl ForwardTrace {
    pub fn output(&self) -> &Value {
        self.values.last().unwrap()
    }
}

/// An ordered stack of layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub layers: Vec<Layer>,
}

/// Output length of a strided window scan.
pub fn conv_output_len(input: usize, window: usize, stride: usize) -> Result<usize> {
    if window > input {
        return Err(Error::Shape(format!(
            "window {window} larger than input length {input}"
        )));
    }
    if stride == 0 {
        return Err(Error::Shape("stride must be >= 1".into()));
    }
    Ok((input - window) / stride + 1)
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Self {
        Network { layers }
    }

    /// Runs the stack, caching every activation for backprop.
    pub fn forward(&self, input: &Value, mode: &mut Mode) -> Result<ForwardTrace> {
        let mut values = vec![input.clone()];
        let mut aux = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let x = values.last().unwrap();
            let (y, a) = forward_layer(layer, x, mode)?;
            values.push(y);
            aux.push(a);
        }
        Ok(ForwardTrace { values, aux })
    }

    /// Reverse-mode gradients of a scalar loss given d(loss)/d(output).
    pub fn backward(&self, trace: &ForwardTrace, grad_output: Value) -> Vec<LayerGrad> {
        assert_eq!(
            trace.values.len(),
            self.layers.len() + 1,
            "backward called without a matching forward pass"
        );
        let mut grads = vec![LayerGrad::None; self.layers.len()];
        let mut g = grad_output;
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let x = &trace.values[k];
            let y = &trace.values[k + 1];
            let (gx, lg) = backward_layer(layer, x, y, &trace.aux[k], g);
            g = gx;
            grads[k] = lg;
        }
        grads
    }

    /// In-place SGD step `w <- w - eta * grad`. Rejects non-finite gradients
    /// with diagnostics rather than corrupting the parameters.
    pub fn sgd_update(&mut self, grads: &[LayerGrad], eta: f64) -> Result<()> {
        for (k, (layer, grad)) in self.layers.iter_mut().zip(grads).enumerate() {
            match (layer, grad) {
                (Layer::Conv1d { weights, bias, .. }, LayerGrad::Conv { dw, db }) => {
                    check_finite(dw.iter().chain(db.iter()), k)?;
                    weights.zip_mut_with(dw, |w, d| *w -= eta * d);
                    bias.zip_mut_with(db, |b, d| *b -= eta * d);
                }
                (Layer::Dense { weights, bias }, LayerGrad::Dense { dw, db }) => {
                    check_finite(dw.iter().chain(db.iter()), k)?;
                    weights.zip_mut_with(dw, |w, d| *w -= eta * d);
                    bias.zip_mut_with(db, |b, d| *b -= eta * d);
                }
                (_, LayerGrad::None) => {}
                _ => panic!("gradient slot does not match layer {k}"),
            }
        }
        Ok(())
    }

    /// Flat parameter vector in layer order (weights then bias per layer).
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for layer in &self.layers {
            match layer {
                Layer::Conv1d { weights, bias, .. } => {
                    out.extend(weights.iter());
                    out.extend(bias.iter());
                }
                Layer::Dense { weights, bias } => {
                    out.extend(weights.iter());
                    out.extend(bias.iter());
                }
                _ => {}
            }
        }
        out
    }

    /// Restores parameters from [`Network::params`] order.
    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        let mut it = flat.iter();
        for layer in &mut self.layers {
            let slots: Vec<&mut f64> = match layer {
                Layer::Conv1d { weights, bias, .. } => {
                    weights.iter_mut().chain(bias.iter_mut()).collect()
                }
                Layer::Dense { weights, bias } => {
                    weights.iter_mut().chain(bias.iter_mut()).collect()
                }
                _ => continue,
            };
            for slot in slots {
                *slot = *it
                    .next()
                    .ok_or_else(|| Error::ModelFile("parameter array too short".into()))?;
            }
        }
        if it.next().is_some() {
            return Err(Error::ModelFile("parameter array too long".into()));
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        self.params().len()
    }
}

fn check_finite<'a>(mut vals: impl Iterator<Item = &'a f64>, layer: usize) -> Result<()> {
    if vals.any(|v| !v.is_finite()) {
        Err(Error::NonFinite(format!("gradient of layer {layer}")))
    } else {
        Ok(())
    }
}

fn forward_layer(layer: &Layer, x: &Value, mode: &mut Mode) -> Result<(Value, Aux)> {
    match layer {
        Layer::Conv1d {
            weights,
            bias,
            stride,
        } => {
            let x = match x {
                Value::M(m) => m,
                Value::V(_) => return Err(Error::Shape("conv1d expects a matrix input".into())),
            };
            let (nf, nc, w) = weights.dim();
            if nc != x.nrows() {
                return Err(Error::Shape(format!(
                    "conv1d expects {nc} channels, got {}",
                    x.nrows()
                )));
            }
            let l_out = conv_output_len(x.ncols(), w, *stride)?;
            let mut out = Array2::zeros((nf, l_out));
            for f in 0..nf {
                for t in 0..l_out {
                    let mut acc = bias[f];
                    let base = t * stride;
                    for c in 0..nc {
                        for k in 0..w {
                            acc += weights[(f, c, k)] * x[(c, base + k)];
                        }
                    }
                    out[(f, t)] = acc;
                }
            }
            Ok((Value::M(out), Aux::None))
        }
        Layer::Relu => Ok((x.map(|v| v.max(0.0)), Aux::None)),
        Layer::Sigmoid => Ok((x.map(sigmoid), Aux::None)),
        Layer::MaxPool1d { window, stride } => {
            let x = match x {
                Value::M(m) => m,
                Value::V(_) => return Err(Error::Shape("max pool expects a matrix input".into())),
            };
            let l_out = conv_output_len(x.ncols(), *window, *stride)?;
            let nc = x.nrows();
            let mut out = Array2::zeros((nc, l_out));
            let mut argmax = vec![0usize; nc * l_out];
            for c in 0..nc {
                for t in 0..l_out {
                    let base = t * stride;
                    let mut best = f64::NEG_INFINITY;
                    let mut best_k = base;
                    for k in base..base + window {
                        // first index wins ties
                        if x[(c, k)] > best {
                            best = x[(c, k)];
                            best_k = k;
                        }
                    }
                    out[(c, t)] = best;
                    argmax[c * l_out + t] = best_k;
                }
            }
            Ok((Value::M(out), Aux::PoolArgmax(argmax)))
        }
        Layer::GlobalMaxPool => {
            let x = match x {
                Value::M(m) => m,
                Value::V(_) => return Err(Error::Shape("global pool expects a matrix".into())),
            };
            let nc = x.nrows();
            let mut out = Array2::zeros((nc, 1));
            let mut argmax = vec![0usize; nc];
            for c in 0..nc {
                let mut best = f64::NEG_INFINITY;
                let mut best_k = 0;
                for k in 0..x.ncols() {
                    if x[(c, k)] > best {
                        best = x[(c, k)];
                        best_k = k;
                    }
                }
                out[(c, 0)] = best;
                argmax[c] = best_k;
            }
            Ok((Value::M(out), Aux::PoolArgmax(argmax)))
        }
        Layer::Flatten => match x {
            Value::M(m) => {
                let (r, c) = m.dim();
                let flat = Array1::from_iter(m.iter().copied());
                Ok((Value::V(flat), Aux::Shape(r, c)))
            }
            Value::V(v) => Ok((Value::V(v.clone()), Aux::Shape(1, v.len()))),
        },
        Layer::Dense { weights, bias } => {
            let x = match x {
                Value::V(v) => v,
                Value::M(_) => {
                    return Err(Error::Shape(
                        "dense expects a vector input (insert Flatten)".into(),
                    ))
                }
            };
            if weights.ncols() != x.len() {
                return Err(Error::Shape(format!(
                    "dense expects {} inputs, got {}",
                    weights.ncols(),
                    x.len()
                )));
            }
            Ok((Value::V(weights.dot(x) + bias), Aux::None))
        }
        Layer::Dropout { p } => {
            if !(0.0..1.0).contains(p) {
                return Err(Error::InvalidArgument(format!(
                    "dropout rate must be in [0, 1), got {p}"
                )));
            }
            match mode {
                Mode::Infer => Ok((x.clone(), Aux::Mask(x.map(|_| 1.0)))),
                Mode::Train(rng) => {
                    let scale = 1.0 / (1.0 - p);
                    let draw = |rng: &mut ChaCha8Rng, p: f64| -> f64 {
                        if rng.gen::<f64>() < p {
                            0.0
                        } else {
                            scale
                        }
                    };
                    let mask = match x {
                        Value::M(m) => {
                            Value::M(Array2::from_shape_fn(m.dim(), |_| draw(rng, *p)))
                        }
                        Value::V(v) => {
                            Value::V(Array1::from_shape_fn(v.len(), |_| draw(rng, *p)))
                        }
                    };
                    Ok((x.zip_mul(&mask), Aux::Mask(mask)))
                }
            }
        }
    }
}

fn backward_layer(layer: &Layer, x: &Value, y: &Value, aux: &Aux, g: Value) -> (Value, LayerGrad) {
    match layer {
        Layer::Conv1d {
            weights, stride, ..
        } => {
            let (x, g) = match (x, g) {
                (Value::M(x), Value::M(g)) => (x, g),
                _ => unreachable!(),
            };
            let (nf, nc, w) = weights.dim();
            let l_out = g.ncols();
            let mut dw = Array3::zeros((nf, nc, w));
            let mut db = Array1::zeros(nf);
            let mut dx = Array2::zeros(x.dim());
            for f in 0..nf {
                for t in 0..l_out {
                    let go = g[(f, t)];
                    db[f] += go;
                    let base = t * stride;
                    for c in 0..nc {
                        for k in 0..w {
                            dw[(f, c, k)] += go * x[(c, base + k)];
                            dx[(c, base + k)] += go * weights[(f, c, k)];
                        }
                    }
                }
            }
            (Value::M(dx), LayerGrad::Conv { dw, db })
        }
        Layer::Relu => {
            let mask = x.map(|v| if v > 0.0 { 1.0 } else { 0.0 });
            (g.zip_mul(&mask), LayerGrad::None)
        }
        Layer::Sigmoid => {
            let deriv = y.map(|s| s * (1.0 - s));
            (g.zip_mul(&deriv), LayerGrad::None)
        }
        Layer::MaxPool1d { .. } | Layer::GlobalMaxPool => {
            let (x, g) = match (x, g) {
                (Value::M(x), Value::M(g)) => (x, g),
                _ => unreachable!(),
            };
            let argmax = match aux {
                Aux::PoolArgmax(a) => a,
                _ => unreachable!(),
            };
            let mut dx = Array2::zeros(x.dim());
            let l_out = g.ncols();
            for c in 0..g.nrows() {
                for t in 0..l_out {
                    dx[(c, argmax[c * l_out + t])] += g[(c, t)];
                }
            }
            (Value::M(dx), LayerGrad::None)
        }
        Layer::Flatten => {
            let g = match g {
                Value::V(v) => v,
                _ => unreachable!(),
            };
            match (x, aux) {
                (Value::M(_), Aux::Shape(r, c)) => {
                    let m = Array2::from_shape_vec((*r, *c), g.to_vec()).unwrap();
                    (Value::M(m), LayerGrad::None)
                }
                (Value::V(_), _) => (Value::V(g), LayerGrad::None),
                _ => unreachable!(),
            }
        }
        Layer::Dense { weights, .. } => {
            let (x, g) = match (x, g) {
                (Value::V(x), Value::V(g)) => (x, g),
                _ => unreachable!(),
            };
            let dw = g
                .view()
                .insert_axis(ndarray::Axis(1))
                .dot(&x.view().insert_axis(ndarray::Axis(0)));
            let dx = weights.t().dot(&g);
            (Value::V(dx), LayerGrad::Dense { dw, db: g })
        }
        Layer::Dropout { .. } => {
            let mask = match aux {
                Aux::Mask(m) => m,
                _ => unreachable!(),
            };
            (g.zip_mul(mask), LayerGrad::None)
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Numerically stable softmax: subtracts the max logit before
/// exponentiating.
pub fn softmax(x: &Array1<f64>) -> Array1<f64> {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps = x.mapv(|v| (v - max).exp());
    let sum = exps.sum();
    exps / sum
}

/// Cross entropy `-sum d_j log p_j` with p clamped to >= 1e-12.
pub fn cross_entropy(p: &Array1<f64>, d: &Array1<f64>) -> f64 {
    -p.iter()
        .zip(d.iter())
        .map(|(&p, &d)| d * p.max(1e-12).ln())
        .sum::<f64>()
}

/// Softmax + cross-entropy against a one-hot target; returns the loss and
/// the gradient at the logits (p - d).
pub fn softmax_ce(logits: &Array1<f64>, target_class: usize) -> (f64, Array1<f64>) {
    let p = softmax(logits);
    let mut d = Array1::zeros(logits.len());
    d[target_class] = 1.0;
    let loss = cross_entropy(&p, &d);
    (loss, p - d)
}

/// Sigmoid + binary cross-entropy for a single-logit head; gradient at the
/// logit is (p - y).
pub fn sigmoid_bce(logit: f64, positive: bool) -> (f64, f64) {
    let p = sigmoid(logit);
    let y = if positive { 1.0 } else { 0.0 };
    let loss = -(y * p.max(1e-12).ln() + (1.0 - y) * (1.0 - p).max(1e-12).ln());
    (loss, p - y)
}

/// Scale-stable uniform init in ±sqrt(6 / (fan_in + fan_out)); biases 0.
pub fn init_dense<R: Rng>(n_out: usize, n_in: usize, rng: &mut R) -> Layer {
    let bound = (6.0 / (n_in + n_out) as f64).sqrt();
    let weights = Array2::from_shape_fn((n_out, n_in), |_| rng.gen_range(-bound..bound));
    Layer::Dense {
        weights,
        bias: Array1::zeros(n_out),
    }
}

pub fn init_conv<R: Rng>(
    filters: usize,
    channels: usize,
    window: usize,
    stride: usize,
    rng: &mut R,
) -> Layer {
    let fan_in = channels * window;
    let bound = (6.0 / (fan_in + filters) as f64).sqrt();
    let weights = Array3::from_shape_fn((filters, channels, window), |_| {
        rng.gen_range(-bound..bound)
    });
    Layer::Conv1d {
        weights,
        bias: Array1::zeros(filters),
        stride,
    }
}

/// Training constants. Defaults: eta 0.01, minibatch 32, 100 epochs.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    pub eta: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            eta: 0.01,
            batch_size: 32,
            epochs: 100,
            seed: 0,
        }
    }
}

/// Accumulates `src` into `acc` (element-wise add; None slots stay None).
fn add_grads(acc: &mut [LayerGrad], src: Vec<LayerGrad>) {
    for (a, s) in acc.iter_mut().zip(src) {
        match (a, s) {
            (LayerGrad::Conv { dw, db }, LayerGrad::Conv { dw: sw, db: sb }) => {
                *dw += &sw;
                *db += &sb;
            }
            (LayerGrad::Dense { dw, db }, LayerGrad::Dense { dw: sw, db: sb }) => {
                *dw += &sw;
                *db += &sb;
            }
            (a @ LayerGrad::None, s) => *a = s,
            _ => panic!("mismatched gradient accumulation"),
        }
    }
}

fn scale_grads(grads: &mut [LayerGrad], factor: f64) {
    for g in grads {
        match g {
            LayerGrad::Conv { dw, db } => {
                dw.mapv_inplace(|v| v * factor);
                db.mapv_inplace(|v| v * factor);
            }
            LayerGrad::Dense { dw, db } => {
                dw.mapv_inplace(|v| v * factor);
                db.mapv_inplace(|v| v * factor);
            }
            LayerGrad::None => {}
        }
    }
}

/// Minibatch SGD with a softmax cross-entropy head. `targets` are class
/// indices into an `n_classes`-way output. Returns the mean loss per epoch.
pub fn train_classifier(
    net: &mut Network,
    inputs: &[Value],
    targets: &[usize],
    cfg: &TrainConfig,
) -> Result<Vec<f64>> {
    assert_eq!(inputs.len(), targets.len());
    let n = inputs.len();
    if n == 0 {
        return Err(Error::Data("empty training set".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        // seeded Fisher-Yates shuffle per epoch
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size.max(1)) {
            let mut acc: Vec<LayerGrad> = vec![LayerGrad::None; net.layers.len()];
            let mut batch_loss = 0.0;
            for &idx in batch {
                let trace = net.forward(&inputs[idx], &mut Mode::Train(&mut rng))?;
                let (loss, dlogits) = softmax_ce(trace.output().as_vec(), targets[idx]);
                batch_loss += loss;
                add_grads(&mut acc, net.backward(&trace, Value::V(dlogits)));
            }
            epoch_loss += batch_loss;
            scale_grads(&mut acc, 1.0 / batch.len() as f64);
            net.sgd_update(&acc, cfg.eta).map_err(|e| {
                Error::NonFinite(format!("training diverged at epoch {epoch}: {e}"))
            })?;
        }
        let mean = epoch_loss / n as f64;
        if !mean.is_finite() {
            return Err(Error::NonFinite(format!(
                "training loss became {mean} at epoch {epoch}"
            )));
        }
        history.push(mean);
    }
    Ok(history)
}

/// Class probabilities for one input (inference mode, softmax head).
pub fn predict_probs(net: &Network, input: &Value) -> Result<Array1<f64>> {
    let trace = net.forward(input, &mut Mode::Infer)?;
    Ok(softmax(trace.output().as_vec()))
}

/// Central finite-difference gradients of the softmax cross-entropy loss
/// with respect to every parameter (or a subset of parameter indices).
/// Forward passes only; independent of the analytic backward path.
pub fn numeric_gradients(
    net: &Network,
    input: &Value,
    target_class: usize,
    indices: &[usize],
    step: f64,
) -> Result<Vec<f64>> {
    let mut probe = net.clone();
    let base = net.params();
    let mut out = Vec::with_capacity(indices.len());
    for &i in indices {
        let mut params = base.clone();
        params[i] = base[i] + step;
        probe.set_params(&params)?;
        let plus = {
            let t = probe.forward(input, &mut Mode::Infer)?;
            softmax_ce(t.output().as_vec(), target_class).0
        };
        params[i] = base[i] - step;
        probe.set_params(&params)?;
        let minus = {
            let t = probe.forward(input, &mut Mode::Infer)?;
            softmax_ce(t.output().as_vec(), target_class).0
        };
        out.push((plus - minus) / (2.0 * step));
    }
    Ok(out)
}

/// Analytic gradients flattened in [`Network::params`] order.
pub fn analytic_gradients(net: &Network, input: &Value, target_class: usize) -> Result<Vec<f64>> {
    let trace = net.forward(input, &mut Mode::Infer)?;
    let (_, dlogits) = softmax_ce(trace.output().as_vec(), target_class);
    let grads = net.backward(&trace, Value::V(dlogits));
    let mut out = Vec::new();
    for g in grads {
        match g {
            LayerGrad::Conv { dw, db } => {
                out.extend(dw.iter());
                out.extend(db.iter());
            }
            LayerGrad::Dense { dw, db } => {
                out.extend(dw.iter());
                out.extend(db.iter());
            }
            LayerGrad::None => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr1, arr2, arr3};

    #[test]
    fn conv_length_formula() {
        assert_eq!(conv_output_len(160, 18, 4).unwrap(), 36);
        assert!(conv_output_len(4, 6, 1).is_err());
    }

    #[test]
    fn conv_identity_filter() {
        let layer = Layer::Conv1d {
            weights: arr3(&[[[1.0]]]),
            bias: arr1(&[0.0]),
            stride: 1,
        };
        let net = Network::new(vec![layer]);
        let x = Value::M(arr2(&[[1.0, -2.0, 3.5, 0.0]]));
        let t = net.forward(&x, &mut Mode::Infer).unwrap();
        assert_eq!(t.output(), &x);
    }

    #[test]
    fn conv_zero_input_gives_bias() {
        let layer = Layer::Conv1d {
            weights: arr3(&[[[1.0, 2.0]], [[3.0, 4.0]]]),
            bias: arr1(&[0.5, -1.0]),
            stride: 1,
        };
        let net = Network::new(vec![layer]);
        let x = Value::M(Array2::zeros((1, 5)));
        let t = net.forward(&x, &mut Mode::Infer).unwrap();
        match t.output() {
            Value::M(m) => {
                assert!(m.row(0).iter().all(|&v| v == 0.5));
                assert!(m.row(1).iter().all(|&v| v == -1.0));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn max_pool_hand_case() {
        let net = Network::new(vec![Layer::MaxPool1d { window: 2, stride: 2 }]);
        let x = Value::M(arr2(&[[1.0, 3.0, 2.0, 5.0]]));
        let t = net.forward(&x, &mut Mode::Infer).unwrap();
        assert_eq!(t.output(), &Value::M(arr2(&[[3.0, 5.0]])));
    }

    #[test]
    fn global_pool_of_negatives() {
        let net = Network::new(vec![Layer::GlobalMaxPool]);
        let x = Value::M(arr2(&[[-1.0, -7.0, -2.0]]));
        let t = net.forward(&x, &mut Mode::Infer).unwrap();
        assert_eq!(t.output(), &Value::M(arr2(&[[-1.0]])));
    }

    #[test]
    fn dense_identity_and_relu() {
        let net = Network::new(vec![
            Layer::Dense {
                weights: Array2::eye(3),
                bias: Array1::zeros(3),
            },
            Layer::Relu,
        ]);
        let x = Value::V(arr1(&[-1.0, 2.0, 0.0]));
        let t = net.forward(&x, &mut Mode::Infer).unwrap();
        assert_eq!(t.output(), &Value::V(arr1(&[0.0, 2.0, 0.0])));
    }

    #[test]
    fn softmax_symmetry_and_stability() {
        let p = softmax(&arr1(&[0.0, 0.0]));
        assert_eq!(p, arr1(&[0.5, 0.5]));
        let p = softmax(&arr1(&[1000.0, 1000.0]));
        assert!(p.iter().all(|v| (v - 0.5).abs() < 1e-12));
        assert!((p.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn softmax_shift_invariance_and_argmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = Array1::from_shape_fn(5, |_| rng.gen_range(-4.0..4.0));
            let p = softmax(&x);
            assert!((p.sum() - 1.0).abs() < 1e-12);
            let shifted = softmax(&x.mapv(|v| v + 3.7));
            for (a, b) in p.iter().zip(shifted.iter()) {
                assert!((a - b).abs() < 1e-9);
            }
            let argmax_x = (0..5).max_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap()).unwrap();
            let argmax_p = (0..5).max_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap()).unwrap();
            assert_eq!(argmax_x, argmax_p);
        }
    }

    #[test]
    fn cross_entropy_closed_forms() {
        let perfect = cross_entropy(&arr1(&[1.0, 0.0]), &arr1(&[1.0, 0.0]));
        assert!(perfect.abs() < 1e-10);
        let uniform = cross_entropy(&arr1(&[0.5, 0.5]), &arr1(&[1.0, 0.0]));
        assert!((uniform - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn softmax_ce_gradient_is_p_minus_d() {
        let logits = arr1(&[0.3, -1.2, 0.8]);
        let (_, g) = softmax_ce(&logits, 2);
        let p = softmax(&logits);
        assert!((g[2] - (p[2] - 1.0)).abs() < 1e-12);
        assert!((g[0] - p[0]).abs() < 1e-12);
        // finite-difference check of the fused head
        let step = 1e-6;
        for j in 0..3 {
            let mut lp = logits.clone();
            lp[j] += step;
            let mut lm = logits.clone();
            lm[j] -= step;
            let fd = (softmax_ce(&lp, 2).0 - softmax_ce(&lm, 2).0) / (2.0 * step);
            assert!((fd - g[j]).abs() < 1e-6);
        }
    }

    #[test]
    fn dense_gradient_closed_form() {
        // single dense layer + softmax CE: dW = (p - d) x^T
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = Network::new(vec![init_dense(3, 4, &mut rng)]);
        let x = arr1(&[0.5, -1.0, 2.0, 0.1]);
        let trace = net.forward(&Value::V(x.clone()), &mut Mode::Infer).unwrap();
        let (_, dlogits) = softmax_ce(trace.output().as_vec(), 1);
        let grads = net.backward(&trace, Value::V(dlogits.clone()));
        match &grads[0] {
            LayerGrad::Dense { dw, db } => {
                for i in 0..3 {
                    assert!((db[i] - dlogits[i]).abs() < 1e-12);
                    for j in 0..4 {
                        assert!((dw[(i, j)] - dlogits[i] * x[j]).abs() < 1e-12);
                    }
                }
            }
            _ => panic!(),
        }
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
    }

    #[test]
    fn gradient_check_small_random_nets() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let nets: Vec<(Network, Value)> = vec![
            (
                Network::new(vec![
                    init_conv(3, 4, 3, 2, &mut rng),
                    Layer::Relu,
                    Layer::MaxPool1d { window: 2, stride: 1 },
                    Layer::Flatten,
                    init_dense(2, 9, &mut rng),
                ]),
                Value::M(Array2::from_shape_fn((4, 10), |_| rng.gen_range(-1.0..1.0))),
            ),
            (
                Network::new(vec![
                    init_conv(2, 1, 2, 1, &mut rng),
                    Layer::Sigmoid,
                    Layer::GlobalMaxPool,
                    Layer::Flatten,
                    init_dense(4, 2, &mut rng),
                    Layer::Relu,
                    init_dense(2, 4, &mut rng),
                ]),
                Value::M(Array2::from_shape_fn((1, 6), |_| rng.gen_range(-1.0..1.0))),
            ),
        ];
        for (net, input) in nets {
            let analytic = analytic_gradients(&net, &input, 1).unwrap();
            let indices: Vec<usize> = (0..net.param_count()).collect();
            let numeric = numeric_gradients(&net, &input, 1, &indices, 1e-5).unwrap();
            let max_err = analytic
                .iter()
                .zip(&numeric)
                .map(|(&a, &n)| rel_err(a, n))
                .fold(0.0, f64::max);
            assert!(max_err < 1e-4, "max rel err {max_err}");
        }
    }

    #[test]
    fn dropout_contract() {
        let x = Value::V(Array1::from_elem(2000, 1.0));
        // p = 0: identity in both modes
        let net = Network::new(vec![Layer::Dropout { p: 0.0 }]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = net.forward(&x, &mut Mode::Train(&mut rng)).unwrap();
        assert_eq!(t.output(), &x);
        // inference: identity for any p
        let net = Network::new(vec![Layer::Dropout { p: 0.7 }]);
        let t = net.forward(&x, &mut Mode::Infer).unwrap();
        assert_eq!(t.output(), &x);
        // training at p = 0.3: survivor fraction near 0.7, scaled by 1/0.7
        let net = Network::new(vec![Layer::Dropout { p: 0.3 }]);
        let t = net.forward(&x, &mut Mode::Train(&mut rng)).unwrap();
        let v = t.output().as_vec();
        let survivors = v.iter().filter(|&&v| v > 0.0).count() as f64 / 2000.0;
        assert!((survivors - 0.7).abs() < 0.05, "survivor fraction {survivors}");
        for &val in v.iter() {
            assert!(val == 0.0 || (val - 1.0 / 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn dropout_inference_gradient_matches_no_dropout() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dense = init_dense(2, 5, &mut rng);
        let with = Network::new(vec![dense.clone(), Layer::Dropout { p: 0.4 }]);
        let without = Network::new(vec![dense]);
        let x = Value::V(Array1::from_shape_fn(5, |_| rng.gen_range(-1.0..1.0)));
        assert_eq!(
            analytic_gradients(&with, &x, 0).unwrap(),
            analytic_gradients(&without, &x, 0).unwrap()
        );
    }

    #[test]
    fn sgd_hand_cases() {
        // eta = 0 leaves parameters unchanged
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut net = Network::new(vec![init_dense(2, 2, &mut rng)]);
        let before = net.params();
        let x = Value::V(arr1(&[1.0, -1.0]));
        let trace = net.forward(&x, &mut Mode::Infer).unwrap();
        let (_, d) = softmax_ce(trace.output().as_vec(), 0);
        let grads = net.backward(&trace, Value::V(d));
        net.sgd_update(&grads, 0.0).unwrap();
        assert_eq!(before, net.params());

        // quadratic descent: C = w^2, dC/dw = 2w, w=1, eta=0.1 -> 0.8
        let w: f64 = 1.0;
        let updated = w - 0.1 * (2.0 * w);
        assert!((updated - 0.8).abs() < 1e-15);
    }

    #[test]
    fn descent_on_convex_quadratic_is_monotone() {
        // C(w) = sum w_i^2, grad = 2w; eta below 1/curvature bound
        let mut w = vec![3.0, -2.0, 0.5];
        let mut last = f64::INFINITY;
        for _ in 0..50 {
            let c: f64 = w.iter().map(|v| v * v).sum();
            assert!(c <= last + 1e-12);
            last = c;
            for v in &mut w {
                *v -= 0.2 * 2.0 * *v;
            }
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn training_reduces_loss_on_separable_toy_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        for _ in 0..60 {
            let class = rng.gen_range(0..2usize);
            let center = if class == 0 { -2.0 } else { 2.0 };
            let v = Array1::from_shape_fn(4, |_| center + rng.gen_range(-0.5..0.5));
            inputs.push(Value::V(v));
            targets.push(class);
        }
        let mut net = Network::new(vec![
            init_dense(8, 4, &mut rng),
            Layer::Relu,
            init_dense(2, 8, &mut rng),
        ]);
        let cfg = TrainConfig {
            eta: 0.05,
            batch_size: 8,
            epochs: 40,
            seed: 3,
        };
        let history = train_classifier(&mut net, &inputs, &targets, &cfg).unwrap();
        assert!(
            history.last().unwrap() < &(0.1 * history[0]),
            "loss {} -> {}",
            history[0],
            history.last().unwrap()
        );
    }

    #[test]
    fn nonfinite_gradient_aborts() {
        let mut net = Network::new(vec![Layer::Dense {
            weights: arr2(&[[1.0]]),
            bias: arr1(&[0.0]),
        }]);
        let grads = vec![LayerGrad::Dense {
            dw: arr2(&[[f64::NAN]]),
            db: arr1(&[0.0]),
        }];
        assert!(net.sgd_update(&grads, 0.1).is_err());
    }
}
