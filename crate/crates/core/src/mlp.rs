//! Fully connected sigmoid network trained online by backpropagation,
//! with targets derived from mass functions.
//!
//! Every unit computes `f(c · (Σ w s + b))` with the logistic `f`, so the
//! derivative of a unit's output with respect to its net input is
//! `c s (1 − s)`. Output deltas are `c s (1 − s)(d − s)`, hidden deltas
//! `c s (1 − s) Σ δ w`, and each weight moves by `η δ s_in`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{decide, Criterion, FocalSet, Frame, MassFunction};
use crate::error::MlpError;

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// One fully connected layer. `weights[i * outputs + o]` links input `i`
/// to unit `o`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    pub fn weight(&self, input: usize, output: usize) -> f64 {
        self.weights[input * self.outputs + output]
    }
}

/// Serialized as `{sizes, c, bias, weights, biases}` with one row-major
/// weight array and one bias array per layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "NetworkWire", try_from = "NetworkWire")]
pub struct Network {
    sizes: Vec<usize>,
    /// Sigmoid slope.
    c: f64,
    bias: bool,
    layers: Vec<Layer>,
}

#[derive(Serialize, Deserialize)]
struct NetworkWire {
    sizes: Vec<usize>,
    c: f64,
    #[serde(default = "default_true")]
    bias: bool,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

fn default_true() -> bool {
    true
}

impl From<Network> for NetworkWire {
    fn from(net: Network) -> Self {
        let (weights, biases) = net
            .layers
            .into_iter()
            .map(|l| (l.weights, l.biases))
            .unzip();
        NetworkWire {
            sizes: net.sizes,
            c: net.c,
            bias: net.bias,
            weights,
            biases,
        }
    }
}

impl TryFrom<NetworkWire> for Network {
    type Error = MlpError;

    fn try_from(wire: NetworkWire) -> Result<Self, MlpError> {
        if wire.sizes.len() < 2
            || wire.weights.len() + 1 != wire.sizes.len()
            || wire.biases.len() != wire.weights.len()
        {
            return Err(MlpError::Layers);
        }
        let layers = wire
            .sizes
            .windows(2)
            .zip(wire.weights.into_iter().zip(wire.biases))
            .map(|(w, (weights, biases))| Layer {
                inputs: w[0],
                outputs: w[1],
                weights,
                biases,
            })
            .collect();
        let net = Network {
            sizes: wire.sizes,
            c: wire.c,
            bias: wire.bias,
            layers,
        };
        net.validate()?;
        Ok(net)
    }
}

/// Activations of every layer, input included.
#[derive(Clone, Debug)]
pub struct Activations {
    pub layers: Vec<Vec<f64>>,
}

impl Activations {
    pub fn output(&self) -> &[f64] {
        self.layers.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Gradient of the sample error, shaped like the network's layers.
#[derive(Clone, Debug)]
pub struct Gradient {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

/// Weights and biases drawn uniformly from `[−r, r]`. The weights of each
/// layer are drawn before its biases.
pub fn init_network(sizes: &[usize], seed: u64, r: f64) -> Result<Network, MlpError> {
    init_network_with(sizes, seed, r, 1.0, true)
}

/// As [`init_network`], with an explicit slope and optional biases.
pub fn init_network_with(
    sizes: &[usize],
    seed: u64,
    r: f64,
    slope: f64,
    bias: bool,
) -> Result<Network, MlpError> {
    if sizes.len() < 2 {
        return Err(MlpError::Layers);
    }
    if sizes.contains(&0) {
        return Err(MlpError::EmptyLayer);
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(MlpError::Config(
            "init range must be finite and non-negative",
        ));
    }
    if !(slope > 0.0 && slope.is_finite()) {
        return Err(MlpError::Config("slope must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |n: usize| -> Vec<f64> {
        if r == 0.0 {
            vec![0.0; n]
        } else {
            (0..n).map(|_| rng.gen_range(-r..=r)).collect()
        }
    };
    let layers = sizes
        .windows(2)
        .map(|w| {
            let weights = draw(w[0] * w[1]);
            let biases = if bias { draw(w[1]) } else { vec![0.0; w[1]] };
            Layer {
                inputs: w[0],
                outputs: w[1],
                weights,
                biases,
            }
        })
        .collect();
    Ok(Network {
        sizes: sizes.to_vec(),
        c: slope,
        bias,
        layers,
    })
}

impl Network {
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn slope(&self) -> f64 {
        self.c
    }

    pub fn has_bias(&self) -> bool {
        self.bias
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn inputs(&self) -> usize {
        self.sizes[0]
    }

    pub fn outputs(&self) -> usize {
        self.sizes[self.sizes.len() - 1]
    }

    /// Checks layer shapes and parameter finiteness, e.g. after loading.
    pub fn validate(&self) -> Result<(), MlpError> {
        if self.sizes.len() < 2 || self.layers.len() + 1 != self.sizes.len() {
            return Err(MlpError::Layers);
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(MlpError::Config("slope must be positive"));
        }
        for (layer, w) in self.layers.iter().zip(self.sizes.windows(2)) {
            if layer.inputs != w[0] || layer.outputs != w[1] {
                return Err(MlpError::Dimension {
                    expected: w[0] * w[1],
                    actual: layer.inputs * layer.outputs,
                });
            }
            if layer.weights.len() != w[0] * w[1] || layer.biases.len() != w[1] {
                return Err(MlpError::Dimension {
                    expected: w[0] * w[1] + w[1],
                    actual: layer.weights.len() + layer.biases.len(),
                });
            }
            if layer
                .weights
                .iter()
                .chain(&layer.biases)
                .any(|v| !v.is_finite())
            {
                return Err(MlpError::NonFinite("loading"));
            }
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Activations, MlpError> {
        if x.len() != self.inputs() {
            return Err(MlpError::Dimension {
                expected: self.inputs(),
                actual: x.len(),
            });
        }
        let mut layers = Vec::with_capacity(self.sizes.len());
        layers.push(x.to_vec());
        for layer in &self.layers {
            let input = layers.last().map(Vec::as_slice).unwrap_or(&[]);
            let mut net = layer.biases.clone();
            for (i, &s) in input.iter().enumerate() {
                let row = &layer.weights[i * layer.outputs..(i + 1) * layer.outputs];
                for (n, &w) in net.iter_mut().zip(row) {
                    *n += w * s;
                }
            }
            let out: Vec<f64> = net.into_iter().map(|n| sigmoid(self.c * n)).collect();
            layers.push(out);
        }
        Ok(Activations { layers })
    }

    /// Network outputs for one input.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>, MlpError> {
        let mut acts = self.forward(x)?;
        Ok(acts.layers.pop().unwrap_or_default())
    }

    /// Deltas of every non-input layer for one sample.
    fn deltas(&self, acts: &Activations, target: &[f64]) -> Vec<Vec<f64>> {
        let mut deltas: Vec<Vec<f64>> = vec![Vec::new(); self.layers.len()];
        let last = self.layers.len() - 1;
        deltas[last] = acts.layers[last + 1]
            .iter()
            .zip(target)
            .map(|(&s, &d)| self.c * s * (1.0 - s) * (d - s))
            .collect();
        for l in (0..last).rev() {
            let next = &self.layers[l + 1];
            let downstream = &deltas[l + 1];
            deltas[l] = acts.layers[l + 1]
                .iter()
                .enumerate()
                .map(|(unit, &s)| {
                    let back: f64 = downstream
                        .iter()
                        .enumerate()
                        .map(|(o, &delta)| delta * next.weight(unit, o))
                        .sum();
                    self.c * s * (1.0 - s) * back
                })
                .collect();
        }
        deltas
    }

    fn check_target(&self, target: &[f64]) -> Result<(), MlpError> {
        if target.len() != self.outputs() {
            return Err(MlpError::Dimension {
                expected: self.outputs(),
                actual: target.len(),
            });
        }
        Ok(())
    }

    /// `½ Σ (d − s)²` for one sample.
    pub fn sample_error(&self, x: &[f64], target: &[f64]) -> Result<f64, MlpError> {
        self.check_target(target)?;
        let out = self.predict(x)?;
        Ok(quadratic_error(&out, target))
    }

    /// Gradient of the sample error with respect to every parameter.
    pub fn error_gradient(&self, x: &[f64], target: &[f64]) -> Result<Gradient, MlpError> {
        self.check_target(target)?;
        let acts = self.forward(x)?;
        let deltas = self.deltas(&acts, target);
        let weights = self
            .layers
            .iter()
            .enumerate()
            .map(|(l, layer)| {
                let mut g = vec![0.0; layer.weights.len()];
                for (i, &s) in acts.layers[l].iter().enumerate() {
                    for (o, &delta) in deltas[l].iter().enumerate() {
                        g[i * layer.outputs + o] = -delta * s;
                    }
                }
                g
            })
            .collect();
        let biases = deltas
            .iter()
            .map(|d| {
                if self.bias {
                    d.iter().map(|&delta| -delta).collect()
                } else {
                    vec![0.0; d.len()]
                }
            })
            .collect();
        Ok(Gradient { weights, biases })
    }
}

pub fn quadratic_error(outputs: &[f64], target: &[f64]) -> f64 {
    0.5 * outputs
        .iter()
        .zip(target)
        .map(|(s, d)| (d - s).powi(2))
        .sum::<f64>()
}

/// One online update. Returns the sample error measured before the update.
pub fn backprop_step(
    net: &mut Network,
    x: &[f64],
    target: &[f64],
    eta: f64,
) -> Result<f64, MlpError> {
    net.check_target(target)?;
    let acts = net.forward(x)?;
    let error = quadratic_error(acts.output(), target);
    if !error.is_finite() {
        return Err(MlpError::NonFinite("forward pass"));
    }
    let deltas = net.deltas(&acts, target);
    if deltas.iter().flatten().any(|d| !d.is_finite()) {
        return Err(MlpError::NonFinite("backpropagation"));
    }
    let bias = net.bias;
    for (l, layer) in net.layers.iter_mut().enumerate() {
        let outputs = layer.outputs;
        for (i, &s) in acts.layers[l].iter().enumerate() {
            for (o, &delta) in deltas[l].iter().enumerate() {
                layer.weights[i * outputs + o] += eta * delta * s;
            }
        }
        if bias {
            for (b, &delta) in layer.biases.iter_mut().zip(&deltas[l]) {
                *b += eta * delta;
            }
        }
    }
    Ok(error)
}

/// Target vector from a mass function: singleton masses divided by the
/// largest one. Compound focal elements are ignored.
pub fn belief_targets(m: &MassFunction) -> Result<Vec<f64>, MlpError> {
    let singles: Vec<f64> = m.frame().singletons().map(|s| m.mass(s)).collect();
    let max = singles.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(MlpError::NoSingletonMass);
    }
    Ok(singles.into_iter().map(|v| v / max).collect())
}

/// One-hot target for a crisp class index.
pub fn crisp_targets(class: usize, classes: usize) -> Vec<f64> {
    (0..classes)
        .map(|k| if k == class { 1.0 } else { 0.0 })
        .collect()
}

/// Bba read from the output layer.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputMass {
    pub mass: MassFunction,
    /// All outputs were equal; `mass` is the uniform bba on singletons.
    pub degenerate: bool,
}

/// Zeroes every occurrence of the smallest output and rescales the rest
/// to unit sum, giving a bba on the singletons.
pub fn outputs_to_mass(outputs: &[f64], frame: &Frame) -> Result<OutputMass, MlpError> {
    if outputs.len() < 2 || outputs.len() != frame.len() {
        return Err(MlpError::OutputSize {
            outputs: outputs.len(),
            classes: frame.len(),
        });
    }
    if outputs.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(MlpError::InvalidOutputs);
    }
    let min = outputs.iter().copied().fold(f64::INFINITY, f64::min);
    let kept: Vec<f64> = outputs
        .iter()
        .map(|&v| if v == min { 0.0 } else { v })
        .collect();
    let total: f64 = kept.iter().sum();
    let (values, degenerate) = if total > 0.0 {
        (kept.iter().map(|v| v / total).collect::<Vec<_>>(), false)
    } else {
        (vec![1.0 / frame.len() as f64; frame.len()], true)
    };
    let mass = MassFunction::new(
        frame.clone(),
        values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (FocalSet::singleton(i), v)),
    )?;
    Ok(OutputMass { mass, degenerate })
}

/// Index of the largest value, lowest index on ties.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Class index decided for one input: forward pass, outputs to bba, then
/// the decision criterion over singletons.
pub fn classify(
    net: &Network,
    x: &[f64],
    frame: &Frame,
    criterion: Criterion,
) -> Result<usize, MlpError> {
    let outputs = net.predict(x)?;
    let out = outputs_to_mass(&outputs, frame)?;
    let singles: Vec<FocalSet> = frame.singletons().collect();
    let decided = decide(&out.mass, criterion, &singles)?;
    Ok(decided.members().next().unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub eta: f64,
    pub epochs: usize,
    pub seed: u64,
    pub init_range: f64,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            eta: 0.1,
            epochs: 100,
            seed: 0,
            init_range: 0.5,
            shuffle: true,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<(), MlpError> {
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(MlpError::Config(
                "learning rate must be finite and non-negative",
            ));
        }
        if self.epochs == 0 {
            return Err(MlpError::Config("epochs must be at least 1"));
        }
        if !(self.init_range >= 0.0 && self.init_range.is_finite()) {
            return Err(MlpError::Config(
                "init range must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

/// Feature vector with its training target.
#[derive(Clone, Debug, PartialEq)]
pub struct BeliefSample {
    pub features: Vec<f64>,
    pub target: Vec<f64>,
}

impl BeliefSample {
    pub fn from_mass(features: Vec<f64>, m: &MassFunction) -> Result<Self, MlpError> {
        Ok(Self {
            features,
            target: belief_targets(m)?,
        })
    }

    pub fn crisp(features: Vec<f64>, class: usize, classes: usize) -> Self {
        Self {
            features,
            target: crisp_targets(class, classes),
        }
    }
}

/// Mean sample error of every epoch.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub epoch_errors: Vec<f64>,
}

impl TrainReport {
    pub fn final_error(&self) -> f64 {
        self.epoch_errors.last().copied().unwrap_or(f64::NAN)
    }
}

/// Online training. With `shuffle`, each epoch visits the samples in an
/// order drawn from `cfg.seed`.
pub fn train(
    net: &mut Network,
    samples: &[BeliefSample],
    cfg: &TrainConfig,
) -> Result<TrainReport, MlpError> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(MlpError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut epoch_errors = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        let mut total = 0.0;
        for &k in &order {
            let s = &samples[k];
            total += backprop_step(net, &s.features, &s.target, cfg.eta)?;
        }
        epoch_errors.push(total / samples.len() as f64);
    }
    Ok(TrainReport { epoch_errors })
}

/// Per-feature standardization fitted on training data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FeatureScaler {
    /// Mean and population standard deviation per column. Constant columns
    /// get a unit scale.
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a [f64]>) -> Option<Self> {
        let rows: Vec<&[f64]> = rows.into_iter().collect();
        let width = rows.first()?.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; width];
        for r in &rows {
            for (m, v) in mean.iter_mut().zip(r.iter()) {
                *m += v / n;
            }
        }
        let mut std = vec![0.0; width];
        for r in &rows {
            for ((s, v), m) in std.iter_mut().zip(r.iter()).zip(&mean) {
                *s += (v - m).powi(2) / n;
            }
        }
        let std = std
            .into_iter()
            .map(|v| if v.sqrt() > 1e-12 { v.sqrt() } else { 1.0 })
            .collect();
        Some(Self { mean, std })
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

/// A trained network with its input scaling and output classes; the JSON
/// model file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub classes: Vec<String>,
    #[serde(flatten)]
    pub network: Network,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaler: Option<FeatureScaler>,
}

impl Model {
    pub fn classify(&self, features: &[f64], criterion: Criterion) -> Result<usize, MlpError> {
        let frame = Frame::new(self.classes.iter().cloned())?;
        let x = match &self.scaler {
            Some(s) => s.transform(features),
            None => features.to_vec(),
        };
        classify(&self.network, &x, &frame, criterion)
    }
}
