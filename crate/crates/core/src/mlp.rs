//! A small fully connected network trained by mini-batch SGD.
//!
//! Hidden layers use ReLU. The output layer uses one of:
//!
//! - `sigmoid`: per-class sigmoid with binary cross-entropy against one-hot targets,
//! - `sine_shift`: `0.5 + 0.5 sin(z)` with the same binary cross-entropy,
//! - `softmax`: softmax with categorical cross-entropy.
//!
//! Predictions are the argmax of the output. Weights are drawn uniformly from
//! `+-sqrt(6 / (fan_in + fan_out))` with [`SplitMix64`] seeded by the config
//! seed, layer by layer in row-major order; biases start at zero. The last
//! `validation_fraction` of the training rows is held out, and each epoch
//! visits the remaining rows in an order shuffled from a seed-derived stream.
//!
//! [`MlpModel::train`] and [`MlpModel::evaluate`] take encoded
//! [`FeatureMatrix`] values and divide every column by its maximum attainable
//! value first; [`MlpModel::forward`] takes the network input directly.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::dataset::split_point;
use crate::encoders::FeatureMatrix;
use crate::error::{Error, Result};
use crate::fourier::fmt_real;
use crate::rng::SplitMix64;

const LOG_EPS: f64 = 1e-12;
const SHUFFLE_STREAM: u64 = 0x5DEE_CE66_D1CE_5EED;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputActivation {
    Sigmoid,
    SineShift,
    Softmax,
}

impl OutputActivation {
    pub fn name(self) -> &'static str {
        match self {
            OutputActivation::Sigmoid => "sigmoid",
            OutputActivation::SineShift => "sine_shift",
            OutputActivation::Softmax => "softmax",
        }
    }
}

impl fmt::Display for OutputActivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OutputActivation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigmoid" => Ok(OutputActivation::Sigmoid),
            "sine_shift" => Ok(OutputActivation::SineShift),
            "softmax" => Ok(OutputActivation::Softmax),
            _ => Err(Error::Config(format!(
                "unknown output activation `{s}`; expected sigmoid, sine_shift or softmax"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub output_dim: usize,
    pub output_activation: OutputActivation,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub validation_fraction: f64,
}

impl MlpConfig {
    /// 64/32 ReLU hidden layers, sigmoid output, SGD at 0.05 for 30 epochs of
    /// 64-sample batches, 10% validation hold-out.
    pub fn new(input_dim: usize, output_dim: usize) -> Self {
        Self {
            input_dim,
            hidden: vec![64, 32],
            output_dim,
            output_activation: OutputActivation::Sigmoid,
            learning_rate: 0.05,
            epochs: 30,
            batch_size: 64,
            seed: 0,
            validation_fraction: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.input_dim == 0 || self.output_dim == 0 || self.hidden.contains(&0) {
            return bad("layer sizes must be positive".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return bad("epochs and batch size must be positive".into());
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return bad(format!(
                "validation fraction must lie in (0, 1), got {}",
                self.validation_fraction
            ));
        }
        Ok(())
    }

    fn dims(&self) -> Vec<usize> {
        let mut d = Vec::with_capacity(self.hidden.len() + 2);
        d.push(self.input_dim);
        d.extend(&self.hidden);
        d.push(self.output_dim);
        d
    }
}

/// Dense layer; `weights` is row-major `outputs x inputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn param_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    fn forward_into(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.weights
                .chunks_exact(self.inputs)
                .zip(&self.biases)
                .map(|(row, b)| b + row.iter().zip(input).map(|(w, a)| w * a).sum::<f64>()),
        );
    }
}

/// Outcome of a finite-difference gradient check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub max_rel_error: f64,
    pub checked: usize,
    pub skipped_at_kinks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    config: MlpConfig,
    layers: Vec<Layer>,
    history: Vec<EpochRecord>,
}

/// Pre-activations of every layer and post-activations of every hidden layer
/// (with the input as entry 0).
struct Trace {
    activations: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
    back: Vec<f64>,
}

impl Trace {
    fn new(layers: &[Layer]) -> Self {
        let mut activations = vec![Vec::with_capacity(layers[0].inputs)];
        activations.extend(
            layers[..layers.len() - 1]
                .iter()
                .map(|l| Vec::with_capacity(l.outputs)),
        );
        Self {
            activations,
            pre: layers
                .iter()
                .map(|l| Vec::with_capacity(l.outputs))
                .collect(),
            back: Vec::new(),
        }
    }

    fn logits(&self) -> &[f64] {
        self.pre.last().expect("at least one layer")
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

impl MlpModel {
    /// Fresh model with seeded scaled-uniform weights and zero biases.
    pub fn init(config: MlpConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = SplitMix64::new(config.seed);
        let layers = config
            .dims()
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
                Layer {
                    inputs: fan_in,
                    outputs: fan_out,
                    weights: (0..fan_in * fan_out)
                        .map(|_| rng.symmetric(bound))
                        .collect(),
                    biases: vec![0.0; fan_out],
                }
            })
            .collect();
        Ok(Self {
            config,
            layers,
            history: Vec::new(),
        })
    }

    pub fn config(&self) -> &MlpConfig {
        &self.config
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn history(&self) -> &[EpochRecord] {
        &self.history
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    fn trace(&self, input: &[f64]) -> Trace {
        let mut t = Trace::new(&self.layers);
        self.trace_into(input, &mut t);
        t
    }

    fn trace_into(&self, input: &[f64], t: &mut Trace) {
        t.activations[0].clear();
        t.activations[0].extend_from_slice(input);
        let last = self.layers.len() - 1;
        for (idx, layer) in self.layers.iter().enumerate() {
            let (head, tail) = t.activations.split_at_mut(idx + 1);
            layer.forward_into(&head[idx], &mut t.pre[idx]);
            if idx < last {
                let next = &mut tail[0];
                next.clear();
                next.extend(t.pre[idx].iter().map(|v| v.max(0.0)));
            }
        }
    }

    fn output_from_logits(&self, z: &[f64]) -> Vec<f64> {
        match self.config.output_activation {
            OutputActivation::Sigmoid => z.iter().map(|&v| sigmoid(v)).collect(),
            OutputActivation::SineShift => z.iter().map(|&v| 0.5 + 0.5 * v.sin()).collect(),
            OutputActivation::Softmax => softmax(z),
        }
    }

    /// Loss of one sample and its gradient with respect to the output logits.
    fn loss_and_delta(&self, z: &[f64], label: usize) -> (f64, Vec<f64>) {
        let target = |k: usize| if k == label { 1.0 } else { 0.0 };
        match self.config.output_activation {
            OutputActivation::Sigmoid => {
                let loss = z
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| softplus(v) - target(k) * v)
                    .sum();
                let delta = z
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| sigmoid(v) - target(k))
                    .collect();
                (loss, delta)
            }
            OutputActivation::SineShift => {
                let mut loss = 0.0;
                let delta = z
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| {
                        let t = target(k);
                        let o = (0.5 + 0.5 * v.sin()).clamp(LOG_EPS, 1.0 - LOG_EPS);
                        loss -= t * o.ln() + (1.0 - t) * (1.0 - o).ln();
                        (-t / o + (1.0 - t) / (1.0 - o)) * 0.5 * v.cos()
                    })
                    .collect();
                (loss, delta)
            }
            OutputActivation::Softmax => {
                let s = softmax(z);
                let loss = -s[label].max(f64::MIN_POSITIVE).ln();
                let delta = s.iter().enumerate().map(|(k, &v)| v - target(k)).collect();
                (loss, delta)
            }
        }
    }

    /// Network output in `[0, 1]` for one input row.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input.len())?;
        Ok(self.output_from_logits(self.trace(input).logits()))
    }

    pub fn predict_class(&self, input: &[f64]) -> Result<usize> {
        Ok(argmax(&self.forward(input)?))
    }

    fn check_input(&self, len: usize) -> Result<()> {
        if len != self.config.input_dim {
            return Err(Error::Dimension {
                expected: self.config.input_dim,
                actual: len,
                context: "network input",
            });
        }
        Ok(())
    }

    /// Loss for one sample.
    pub fn loss(&self, input: &[f64], label: usize) -> Result<f64> {
        self.check_input(input.len())?;
        self.check_label(label)?;
        Ok(self.loss_and_delta(self.trace(input).logits(), label).0)
    }

    fn check_label(&self, label: usize) -> Result<()> {
        if label >= self.config.output_dim {
            return Err(Error::LabelOutOfRange {
                label,
                classes: self.config.output_dim,
            });
        }
        Ok(())
    }

    /// Adds `scale *` the gradient of one sample's loss into `grads`, which
    /// mirrors the layer list. Returns the loss.
    fn accumulate_gradient(
        &self,
        input: &[f64],
        label: usize,
        scale: f64,
        grads: &mut [Layer],
        t: &mut Trace,
    ) -> f64 {
        self.trace_into(input, t);
        let (loss, mut delta) = self.loss_and_delta(t.logits(), label);
        for idx in (0..self.layers.len()).rev() {
            let layer = &self.layers[idx];
            let a_prev = &t.activations[idx];
            let g = &mut grads[idx];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let sd = scale * d;
                g.biases[o] += sd;
                let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                for (gw, &a) in row.iter_mut().zip(a_prev) {
                    *gw += sd * a;
                }
            }
            if idx > 0 {
                let next = &mut t.back;
                next.clear();
                next.resize(layer.inputs, 0.0);
                for (o, &d) in delta.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (n, &w) in next.iter_mut().zip(row) {
                        *n += w * d;
                    }
                }
                for (n, &z) in next.iter_mut().zip(&t.pre[idx - 1]) {
                    if z <= 0.0 {
                        *n = 0.0;
                    }
                }
                std::mem::swap(&mut delta, next);
            }
        }
        loss
    }

    fn zero_gradients(&self) -> Vec<Layer> {
        self.layers
            .iter()
            .map(|l| Layer {
                inputs: l.inputs,
                outputs: l.outputs,
                weights: vec![0.0; l.weights.len()],
                biases: vec![0.0; l.biases.len()],
            })
            .collect()
    }

    /// Analytic gradient of one sample's loss, flattened layer by layer
    /// (weights then biases).
    pub fn gradient(&self, input: &[f64], label: usize) -> Result<Vec<f64>> {
        self.check_input(input.len())?;
        self.check_label(label)?;
        let mut grads = self.zero_gradients();
        let mut t = Trace::new(&self.layers);
        self.accumulate_gradient(input, label, 1.0, &mut grads, &mut t);
        Ok(flatten(&grads))
    }

    fn param_mut(&mut self, mut index: usize) -> &mut f64 {
        for layer in &mut self.layers {
            if index < layer.weights.len() {
                return &mut layer.weights[index];
            }
            index -= layer.weights.len();
            if index < layer.biases.len() {
                return &mut layer.biases[index];
            }
            index -= layer.biases.len();
        }
        panic!("parameter index out of range");
    }

    /// On/off state of every hidden ReLU for one input.
    fn relu_pattern(&self, input: &[f64]) -> Vec<bool> {
        let t = self.trace(input);
        t.pre[..t.pre.len() - 1]
            .iter()
            .flatten()
            .map(|&v| v > 0.0)
            .collect()
    }

    /// Compares analytic gradients with central finite differences (step
    /// `1e-5`) over a seeded sample of 128 parameters, or all of them when
    /// there are fewer. Relative error is `|a - n| / max(|a|, |n|, 1e-6)`.
    ///
    /// A parameter whose `±step` perturbation flips any hidden ReLU is
    /// skipped: the loss is not differentiable across that kink, so the
    /// finite difference does not estimate the gradient there.
    pub fn grad_check_report(&self, input: &[f64], label: usize) -> Result<GradCheck> {
        const STEP: f64 = 1e-5;
        const SAMPLE: usize = 128;
        let analytic = self.gradient(input, label)?;
        let total = analytic.len();
        let mut indices: Vec<usize> = (0..total).collect();
        if total > SAMPLE {
            let mut rng = SplitMix64::new(self.config.seed ^ 0x0C4E_C4ED);
            rng.shuffle(&mut indices);
            indices.truncate(SAMPLE);
        }
        let pattern = self.relu_pattern(input);
        let mut probe = self.clone();
        let mut report = GradCheck {
            max_rel_error: 0.0,
            checked: 0,
            skipped_at_kinks: 0,
        };
        for idx in indices {
            let orig = *probe.param_mut(idx);
            *probe.param_mut(idx) = orig + STEP;
            let plus = probe.loss(input, label)?;
            let kink = probe.relu_pattern(input) != pattern;
            *probe.param_mut(idx) = orig - STEP;
            let minus = probe.loss(input, label)?;
            let kink = kink || probe.relu_pattern(input) != pattern;
            *probe.param_mut(idx) = orig;
            if kink {
                report.skipped_at_kinks += 1;
                continue;
            }
            let numeric = (plus - minus) / (2.0 * STEP);
            let a = analytic[idx];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
            report.max_rel_error = report.max_rel_error.max(rel);
            report.checked += 1;
        }
        Ok(report)
    }

    /// Largest relative error from [`MlpModel::grad_check_report`].
    pub fn grad_check(&self, input: &[f64], label: usize) -> Result<f64> {
        Ok(self.grad_check_report(input, label)?.max_rel_error)
    }

    /// Trains on encoded features, normalised column-wise into `[0, 1]`.
    pub fn train(&self, features: &FeatureMatrix, labels: &[u64]) -> Result<MlpModel> {
        if features.cols() != self.config.input_dim {
            return Err(Error::Dimension {
                expected: self.config.input_dim,
                actual: features.cols(),
                context: "feature columns",
            });
        }
        let labels = self.labels_to_classes(labels)?;
        self.train_rows(&features.normalized(), &labels)
    }

    fn labels_to_classes(&self, labels: &[u64]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|&y| {
                let y = usize::try_from(y).unwrap_or(usize::MAX);
                self.check_label(y).map(|_| y)
            })
            .collect()
    }

    /// Trains on row-major network inputs.
    pub fn train_rows(&self, inputs: &[f64], labels: &[usize]) -> Result<MlpModel> {
        let width = self.config.input_dim;
        if inputs.len() != labels.len() * width {
            return Err(Error::Dimension {
                expected: labels.len() * width,
                actual: inputs.len(),
                context: "training rows",
            });
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= self.config.output_dim) {
            return Err(Error::LabelOutOfRange {
                label: bad,
                classes: self.config.output_dim,
            });
        }
        let n_train = split_point(labels.len(), 1.0 - self.config.validation_fraction)?;
        let (train_x, val_x) = inputs.split_at(n_train * width);
        let (train_y, val_y) = labels.split_at(n_train);

        let mut model = self.clone();
        let mut order: Vec<usize> = (0..n_train).collect();
        let mut rng = SplitMix64::new(self.config.seed ^ SHUFFLE_STREAM);
        let mut grads = model.zero_gradients();
        let mut trace = Trace::new(&model.layers);
        for epoch in 1..=self.config.epochs {
            rng.shuffle(&mut order);
            let mut epoch_loss = 0.0;
            for batch in order.chunks(self.config.batch_size) {
                for g in grads.iter_mut() {
                    g.weights.fill(0.0);
                    g.biases.fill(0.0);
                }
                let scale = 1.0 / batch.len() as f64;
                for &i in batch {
                    epoch_loss += model.accumulate_gradient(
                        &train_x[i * width..(i + 1) * width],
                        train_y[i],
                        scale,
                        &mut grads,
                        &mut trace,
                    );
                }
                let lr = self.config.learning_rate;
                for (layer, g) in model.layers.iter_mut().zip(&grads) {
                    for (w, gw) in layer.weights.iter_mut().zip(&g.weights) {
                        *w -= lr * gw;
                    }
                    for (b, gb) in layer.biases.iter_mut().zip(&g.biases) {
                        *b -= lr * gb;
                    }
                }
            }
            // Running mean over the epoch, each sample scored before its batch update.
            let loss = epoch_loss / n_train as f64;
            let val_accuracy = model.accuracy_rows(val_x, val_y);
            model.history.push(EpochRecord {
                epoch,
                loss,
                val_accuracy,
            });
        }
        Ok(model)
    }

    fn accuracy_rows(&self, inputs: &[f64], labels: &[usize]) -> f64 {
        let width = self.config.input_dim;
        let mut trace = Trace::new(&self.layers);
        let correct = inputs
            .chunks_exact(width)
            .zip(labels)
            .filter(|(x, &y)| {
                self.trace_into(x, &mut trace);
                argmax(&self.output_from_logits(trace.logits())) == y
            })
            .count();
        correct as f64 / labels.len().max(1) as f64
    }

    /// Argmax accuracy on encoded features (normalised as in training).
    pub fn evaluate(&self, features: &FeatureMatrix, labels: &[u64]) -> Result<f64> {
        if features.cols() != self.config.input_dim {
            return Err(Error::Dimension {
                expected: self.config.input_dim,
                actual: features.cols(),
                context: "feature columns",
            });
        }
        if features.rows() != labels.len() || labels.is_empty() {
            return Err(Error::Dimension {
                expected: features.rows(),
                actual: labels.len(),
                context: "label count",
            });
        }
        let labels = self.labels_to_classes(labels)?;
        Ok(self.accuracy_rows(&features.normalized(), &labels))
    }

    /// Argmax accuracy on row-major network inputs.
    pub fn evaluate_rows(&self, inputs: &[f64], labels: &[usize]) -> Result<f64> {
        if inputs.len() != labels.len() * self.config.input_dim || labels.is_empty() {
            return Err(Error::Dimension {
                expected: labels.len() * self.config.input_dim,
                actual: inputs.len(),
                context: "evaluation rows",
            });
        }
        Ok(self.accuracy_rows(inputs, labels))
    }

    /// Config header followed by one weight and bias line per layer.
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let hidden: Vec<String> = c.hidden.iter().map(usize::to_string).collect();
        let mut s = String::new();
        let _ = writeln!(s, "input_dim={}", c.input_dim);
        let _ = writeln!(s, "hidden={}", hidden.join(","));
        let _ = writeln!(s, "output_dim={}", c.output_dim);
        let _ = writeln!(s, "output_activation={}", c.output_activation);
        let _ = writeln!(s, "learning_rate={}", fmt_real(c.learning_rate));
        let _ = writeln!(s, "epochs={}", c.epochs);
        let _ = writeln!(s, "batch_size={}", c.batch_size);
        let _ = writeln!(s, "seed={}", c.seed);
        let _ = writeln!(s, "validation_fraction={}", fmt_real(c.validation_fraction));
        for (i, layer) in self.layers.iter().enumerate() {
            let join = |v: &[f64]| v.iter().map(|x| fmt_real(*x)).collect::<Vec<_>>().join(",");
            let _ = writeln!(s, "layer{i}.shape={}x{}", layer.outputs, layer.inputs);
            let _ = writeln!(s, "layer{i}.weights={}", join(&layer.weights));
            let _ = writeln!(s, "layer{i}.biases={}", join(&layer.biases));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let kv = crate::harness::parse_key_values(text)?;
        let get = |k: &str| {
            kv.get(k)
                .map(String::as_str)
                .ok_or_else(|| Error::Parse(format!("missing key `{k}`")))
        };
        fn num<T: FromStr>(k: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Parse(format!("`{k}`: bad value `{v}`")))
        }
        let reals = |k: &str| -> Result<Vec<f64>> {
            get(k)?
                .split(',')
                .filter(|t| !t.is_empty())
                .map(|t| num(k, t))
                .collect()
        };
        let config = MlpConfig {
            input_dim: num("input_dim", get("input_dim")?)?,
            hidden: get("hidden")?
                .split(',')
                .filter(|t| !t.is_empty())
                .map(|t| num("hidden", t))
                .collect::<Result<_>>()?,
            output_dim: num("output_dim", get("output_dim")?)?,
            output_activation: get("output_activation")?.parse()?,
            learning_rate: num("learning_rate", get("learning_rate")?)?,
            epochs: num("epochs", get("epochs")?)?,
            batch_size: num("batch_size", get("batch_size")?)?,
            seed: num("seed", get("seed")?)?,
            validation_fraction: num("validation_fraction", get("validation_fraction")?)?,
        };
        config.validate()?;
        let mut layers = Vec::new();
        for (i, w) in config.dims().windows(2).enumerate() {
            let weights = reals(&format!("layer{i}.weights"))?;
            let biases = reals(&format!("layer{i}.biases"))?;
            if weights.len() != w[0] * w[1] || biases.len() != w[1] {
                return Err(Error::Parse(format!(
                    "layer {i} has the wrong number of values"
                )));
            }
            layers.push(Layer {
                inputs: w[0],
                outputs: w[1],
                weights,
                biases,
            });
        }
        Ok(Self {
            config,
            layers,
            history: Vec::new(),
        })
    }

    /// `epoch,loss,val_accuracy` CSV.
    pub fn history_csv(&self) -> String {
        let mut s = String::from("epoch,loss,val_accuracy\n");
        for r in &self.history {
            let _ = writeln!(
                s,
                "{},{},{}",
                r.epoch,
                fmt_real(r.loss),
                fmt_real(r.val_accuracy)
            );
        }
        s
    }
}

fn flatten(layers: &[Layer]) -> Vec<f64> {
    layers
        .iter()
        .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
        .collect()
}
