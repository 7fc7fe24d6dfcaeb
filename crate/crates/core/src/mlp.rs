//! Feed-forward sigmoid network trained by online backpropagation on the
//! squared-error objective `E = 1/2 * sum_d sum_k (t_kd - o_kd)^2`.
//!
//! Every layer (hidden and output) applies the logistic sigmoid. A layer's
//! weights form a `(fan_in + 1) x fan_out` matrix whose last row holds the
//! biases, i.e. the bias is an always-1 extra input.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::learner::{Classifier, Fitted, Learner, TrainingData};
use crate::rng::seeded;
use crate::{Error, Result};

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Hidden units from the attribute-count rule:
/// `floor((attributes + classes) / divisor)`, plus one when `plus_one`,
/// never less than 1.
///
/// Panics if `divisor` is zero.
pub fn default_hidden_size(num_attributes: usize, num_classes: usize, divisor: usize, plus_one: bool) -> usize {
    assert!(divisor >= 1, "divisor must be >= 1");
    let size = (num_attributes + num_classes) / divisor + usize::from(plus_one);
    size.max(1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkTopology {
    pub input_size: usize,
    pub hidden_sizes: Vec<usize>,
    pub output_size: usize,
}

impl NetworkTopology {
    pub fn new(input_size: usize, hidden_sizes: Vec<usize>, output_size: usize) -> Result<Self> {
        let t = NetworkTopology {
            input_size,
            hidden_sizes,
            output_size,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_size == 0 || self.hidden_sizes.contains(&0) {
            return Err(Error::InvalidArgument("layer sizes must be >= 1".into()));
        }
        if self.output_size < 2 {
            return Err(Error::InvalidArgument("need at least 2 output units".into()));
        }
        Ok(())
    }

    /// Layer widths from input to output.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden_sizes.len() + 2);
        w.push(self.input_size);
        w.extend(&self.hidden_sizes);
        w.push(self.output_size);
        w
    }
}

/// Dense weight matrix with the bias in its last row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LayerRepr", into = "LayerRepr")]
pub struct Layer {
    fan_in: usize,
    fan_out: usize,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct LayerRepr {
    weights: Vec<Vec<f64>>,
}

impl From<Layer> for LayerRepr {
    fn from(l: Layer) -> Self {
        LayerRepr {
            weights: l.weights.chunks(l.fan_out).map(<[f64]>::to_vec).collect(),
        }
    }
}

impl TryFrom<LayerRepr> for Layer {
    type Error = String;

    fn try_from(r: LayerRepr) -> std::result::Result<Self, String> {
        let rows = r.weights.len();
        let fan_out = r.weights.first().map_or(0, Vec::len);
        if rows < 2 || fan_out == 0 || r.weights.iter().any(|row| row.len() != fan_out) {
            return Err("layer weights must be a rectangular matrix with at least 2 rows".into());
        }
        let weights: Vec<f64> = r.weights.into_iter().flatten().collect();
        if weights.iter().any(|w| !w.is_finite()) {
            return Err("layer weights must be finite".into());
        }
        Ok(Layer {
            fan_in: rows - 1,
            fan_out,
            weights,
        })
    }
}

impl Layer {
    fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Layer {
            fan_in,
            fan_out,
            weights: vec![0.0; (fan_in + 1) * fan_out],
        }
    }

    pub fn fan_in(&self) -> usize {
        self.fan_in
    }

    pub fn fan_out(&self) -> usize {
        self.fan_out
    }

    /// Weight from input `i` (or the bias when `i == fan_in`) to unit `j`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.fan_out + j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    fn activate(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend_from_slice(&self.weights[self.fan_in * self.fan_out..]);
        for (i, &a) in input.iter().enumerate() {
            let row = &self.weights[i * self.fan_out..(i + 1) * self.fan_out];
            for (o, w) in out.iter_mut().zip(row) {
                *o += a * w;
            }
        }
        for o in out.iter_mut() {
            *o = sigmoid(*o);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MlpRepr")]
pub struct Mlp {
    topology: NetworkTopology,
    layers: Vec<Layer>,
}

#[derive(Deserialize)]
struct MlpRepr {
    topology: NetworkTopology,
    layers: Vec<Layer>,
}

impl TryFrom<MlpRepr> for Mlp {
    type Error = Error;

    fn try_from(r: MlpRepr) -> Result<Self> {
        Mlp::from_layers(r.topology, r.layers)
    }
}

/// Same shape as an [`Mlp`]'s weights; used for gradients and momentum state.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDeltas {
    pub layers: Vec<Vec<f64>>,
}

impl WeightDeltas {
    pub fn zeros_like(net: &Mlp) -> Self {
        WeightDeltas {
            layers: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
        }
    }

    fn is_finite(&self) -> bool {
        self.layers.iter().flatten().all(|g| g.is_finite())
    }
}

impl Mlp {
    /// Network with every weight and bias drawn from `U[-0.5, 0.5]`.
    pub fn init(topology: NetworkTopology, seed: u64) -> Result<Self> {
        topology.validate()?;
        let mut rng = seeded(seed);
        let widths = topology.widths();
        let layers = widths
            .windows(2)
            .map(|w| {
                let mut layer = Layer::zeros(w[0], w[1]);
                for x in layer.weights.iter_mut() {
                    *x = rng.gen_range(-0.5..=0.5);
                }
                layer
            })
            .collect();
        Ok(Mlp { topology, layers })
    }

    /// Build from explicit layers; shapes must chain and match the topology.
    pub fn from_layers(topology: NetworkTopology, layers: Vec<Layer>) -> Result<Self> {
        topology.validate()?;
        let widths = topology.widths();
        if layers.len() != widths.len() - 1
            || layers
                .iter()
                .zip(widths.windows(2))
                .any(|(l, w)| l.fan_in != w[0] || l.fan_out != w[1])
        {
            return Err(Error::SchemaMismatch("layer shapes do not match the topology".into()));
        }
        Ok(Mlp { topology, layers })
    }

    /// A network of the given shape with every weight set to `value`.
    pub fn constant(topology: NetworkTopology, value: f64) -> Result<Self> {
        topology.validate()?;
        let layers = topology
            .widths()
            .windows(2)
            .map(|w| {
                let mut l = Layer::zeros(w[0], w[1]);
                l.weights.fill(value);
                l
            })
            .collect();
        Ok(Mlp { topology, layers })
    }

    pub fn topology(&self) -> &NetworkTopology {
        &self.topology
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    fn check_input(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.topology.input_size {
            return Err(Error::DimensionMismatch {
                expected: self.topology.input_size,
                got: features.len(),
            });
        }
        Ok(())
    }

    /// Activations of every layer, input first.
    fn trace(&self, features: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(features.to_vec());
        for layer in &self.layers {
            let mut out = Vec::with_capacity(layer.fan_out);
            layer.activate(acts.last().expect("nonempty"), &mut out);
            acts.push(out);
        }
        acts
    }

    /// Raw sigmoid outputs, each in `(0, 1)`.
    pub fn forward(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.check_input(features)?;
        Ok(self.trace(features).pop().expect("nonempty"))
    }

    /// Gradient of the single-example error `1/2 * sum_k (t_k - o_k)^2`.
    pub fn gradient(&self, features: &[f64], target: &[f64]) -> Result<WeightDeltas> {
        self.check_input(features)?;
        if target.len() != self.topology.output_size {
            return Err(Error::DimensionMismatch {
                expected: self.topology.output_size,
                got: target.len(),
            });
        }
        let acts = self.trace(features);
        let out = acts.last().expect("nonempty");
        // dE/dz at the output, using sigma'(z) = o (1 - o)
        let mut delta: Vec<f64> = out.iter().zip(target).map(|(&o, &t)| (o - t) * o * (1.0 - o)).collect();
        let mut grads = WeightDeltas::zeros_like(self);
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let input = &acts[l];
            let g = &mut grads.layers[l];
            for (i, &a) in input.iter().enumerate() {
                for (j, &dj) in delta.iter().enumerate() {
                    g[i * layer.fan_out + j] = a * dj;
                }
            }
            g[layer.fan_in * layer.fan_out..].copy_from_slice(&delta);
            if l > 0 {
                delta = input
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| {
                        let row = &layer.weights[i * layer.fan_out..(i + 1) * layer.fan_out];
                        let back: f64 = row.iter().zip(&delta).map(|(w, d)| w * d).sum();
                        back * a * (1.0 - a)
                    })
                    .collect();
            }
        }
        Ok(grads)
    }

    /// One online gradient step: `delta = -lr * grad + momentum * previous_delta`.
    /// `velocity` holds the previous delta on entry and this step's on return.
    /// A non-finite gradient leaves the network untouched; a step that
    /// overflows a weight is reported as divergence.
    pub fn backprop_step(
        &mut self,
        example: &EncodedExample,
        learning_rate: f64,
        momentum: f64,
        velocity: &mut WeightDeltas,
    ) -> Result<()> {
        let target = example.target.as_deref().ok_or(Error::Unlabeled(0))?;
        let grads = self.gradient(&example.features, target)?;
        if !grads.is_finite() {
            return Err(Error::Divergence("non-finite gradient".into()));
        }
        for ((layer, g), v) in self
            .layers
            .iter_mut()
            .zip(&grads.layers)
            .zip(velocity.layers.iter_mut())
        {
            for ((w, &g), v) in layer.weights.iter_mut().zip(g).zip(v.iter_mut()) {
                let step = -learning_rate * g + momentum * *v;
                *w += step;
                *v = step;
                if !w.is_finite() {
                    return Err(Error::Divergence("a weight overflowed".into()));
                }
            }
        }
        Ok(())
    }

    /// Total squared error over labeled examples.
    pub fn error(&self, data: &[EncodedExample]) -> Result<f64> {
        let mut total = 0.0;
        for (d, ex) in data.iter().enumerate() {
            let target = ex.target.as_deref().ok_or(Error::Unlabeled(d))?;
            total += self.example_error(&ex.features, target)?;
        }
        Ok(total)
    }

    fn example_error(&self, features: &[f64], target: &[f64]) -> Result<f64> {
        let out = self.forward(features)?;
        if out.len() != target.len() {
            return Err(Error::DimensionMismatch {
                expected: out.len(),
                got: target.len(),
            });
        }
        Ok(0.5 * out.iter().zip(target).map(|(o, t)| (t - o).powi(2)).sum::<f64>())
    }

    pub fn predict(&self, features: &[f64], class_names: &[String]) -> Result<Prediction> {
        if class_names.len() != self.topology.output_size {
            return Err(Error::DimensionMismatch {
                expected: self.topology.output_size,
                got: class_names.len(),
            });
        }
        Prediction::from_scores(self.forward(features)?, class_names)
    }
}

/// Free-function form of [`Mlp::init`].
pub fn init_network(topology: NetworkTopology, seed: u64) -> Result<Mlp> {
    Mlp::init(topology, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedExample {
    pub features: Vec<f64>,
    pub target: Option<Vec<f64>>,
}

impl EncodedExample {
    pub fn labeled(features: Vec<f64>, class: usize, num_classes: usize) -> Self {
        assert!(class < num_classes, "class index out of range");
        let mut target = vec![0.0; num_classes];
        target[class] = 1.0;
        EncodedExample {
            features,
            target: Some(target),
        }
    }

    pub fn unlabeled(features: Vec<f64>) -> Self {
        EncodedExample { features, target: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub training_cycles: usize,
    pub learning_rate: f64,
    pub error_epsilon: f64,
    pub momentum: f64,
    pub shuffle_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            training_cycles: 500,
            learning_rate: 0.3,
            error_epsilon: 1.0e-5,
            momentum: 0.0,
            shuffle_seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.training_cycles == 0 {
            return Err(Error::InvalidArgument("training cycles must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument("learning rate must be positive".into()));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
        if !(self.error_epsilon > 0.0) {
            return Err(Error::InvalidArgument("error epsilon must be positive".into()));
        }
        if !(self.momentum >= 0.0 && self.momentum.is_finite()) {
            return Err(Error::InvalidArgument("momentum must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    CyclesExhausted,
    EpsilonReached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    /// Total training error at the end of each cycle.
    pub errors: Vec<f64>,
    pub stop_reason: StopReason,
}

impl TrainHistory {
    pub fn final_error(&self) -> f64 {
        *self.errors.last().expect("at least one cycle")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("cycle,error\n");
        for (i, e) in self.errors.iter().enumerate() {
            s.push_str(&format!("{},{}\n", i + 1, e));
        }
        s
    }
}

/// Online backpropagation: each cycle visits every example once in a
/// freshly shuffled order, then stops early if the total error drops below
/// `error_epsilon`.
pub fn train(mut net: Mlp, data: &[EncodedExample], cfg: &TrainConfig) -> Result<(Mlp, TrainHistory)> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::InvalidArgument("no training examples".into()));
    }
    if let Some(d) = data.iter().position(|ex| ex.target.is_none()) {
        return Err(Error::Unlabeled(d));
    }
    let mut rng = seeded(cfg.shuffle_seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut velocity = WeightDeltas::zeros_like(&net);
    let mut errors = Vec::with_capacity(cfg.training_cycles);
    for _ in 0..cfg.training_cycles {
        order.shuffle(&mut rng);
        for &d in &order {
            net.backprop_step(&data[d], cfg.learning_rate, cfg.momentum, &mut velocity)?;
        }
        let e = net.error(data)?;
        if !e.is_finite() {
            return Err(Error::Divergence(format!("training error became {e}")));
        }
        errors.push(e);
        if e < cfg.error_epsilon {
            return Ok((
                net,
                TrainHistory {
                    errors,
                    stop_reason: StopReason::EpsilonReached,
                },
            ));
        }
    }
    Ok((
        net,
        TrainHistory {
            errors,
            stop_reason: StopReason::CyclesExhausted,
        },
    ))
}

/// Per-class confidences (summing to 1) and the winning class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub confidences: Vec<f64>,
    pub class_index: usize,
    pub label: String,
}

impl Prediction {
    /// Normalize nonnegative scores to sum 1; argmax ties go to the lowest index.
    pub fn from_scores(scores: Vec<f64>, class_names: &[String]) -> Result<Self> {
        if scores.len() != class_names.len() || scores.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: class_names.len(),
                got: scores.len(),
            });
        }
        let total: f64 = scores.iter().sum();
        if !(total > 0.0 && total.is_finite()) || scores.iter().any(|s| *s < 0.0) {
            return Err(Error::Divergence(format!("cannot normalize scores {scores:?}")));
        }
        let confidences: Vec<f64> = scores.iter().map(|s| s / total).collect();
        let class_index = argmax(&confidences);
        Ok(Prediction {
            label: class_names[class_index].clone(),
            confidences,
            class_index,
        })
    }

    pub fn max_confidence(&self) -> f64 {
        self.confidences[self.class_index]
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// How many hidden units to use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenLayers {
    /// One layer sized by [`default_hidden_size`] from the actual input width.
    Rule {
        divisor: usize,
        plus_one: bool,
    },
    Explicit(Vec<usize>),
}

impl Default for HiddenLayers {
    fn default() -> Self {
        HiddenLayers::Rule {
            divisor: 4,
            plus_one: false,
        }
    }
}

impl HiddenLayers {
    pub fn validate(&self) -> Result<()> {
        match self {
            HiddenLayers::Rule { divisor: 0, .. } => {
                Err(Error::InvalidArgument("hidden-layer divisor must be >= 1".into()))
            }
            HiddenLayers::Explicit(sizes) if sizes.contains(&0) => {
                Err(Error::InvalidArgument("hidden layers must have >= 1 unit".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn sizes(&self, num_attributes: usize, num_classes: usize) -> Vec<usize> {
        match self {
            HiddenLayers::Rule { divisor, plus_one } => {
                vec![default_hidden_size(num_attributes, num_classes, *divisor, *plus_one)]
            }
            HiddenLayers::Explicit(sizes) => sizes.clone(),
        }
    }
}

/// Trains a fresh network from `init_seed` on every call to `fit`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MlpLearner {
    pub hidden: HiddenLayers,
    pub train: TrainConfig,
    pub init_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpClassifier {
    pub classes: Vec<String>,
    pub network: Mlp,
}

impl MlpLearner {
    pub fn fit_with_history(&self, data: &TrainingData) -> Result<(MlpClassifier, TrainHistory)> {
        self.hidden.validate()?;
        let input = data.num_features();
        let classes = data.classes().len();
        let topology = NetworkTopology::new(input, self.hidden.sizes(input, classes), classes)?;
        let net = Mlp::init(topology, self.init_seed)?;
        let (network, history) = train(net, &data.encoded(), &self.train)?;
        Ok((
            MlpClassifier {
                classes: data.classes().to_vec(),
                network,
            },
            history,
        ))
    }
}

impl Learner for MlpLearner {
    type Model = MlpClassifier;

    fn fit(&self, data: &TrainingData) -> Result<Fitted<MlpClassifier>> {
        let (model, history) = self.fit_with_history(data)?;
        Ok(Fitted {
            model,
            training_error: Some(history.final_error()),
        })
    }
}

impl Classifier for MlpClassifier {
    fn classes(&self) -> &[String] {
        &self.classes
    }

    fn predict(&self, features: &[f64]) -> Result<Prediction> {
        self.network.predict(features, &self.classes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn hidden_size_rule() {
        assert_eq!(default_hidden_size(31, 2, 4, false), 8);
        assert_eq!(default_hidden_size(31, 2, 2, true), 17);
        assert_eq!(default_hidden_size(1, 2, 6, false), 1);
        assert_eq!(default_hidden_size(21, 2, 1, false), 23);
    }

    #[test]
    #[should_panic]
    fn hidden_size_rejects_zero_divisor() {
        default_hidden_size(3, 2, 0, false);
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let t = NetworkTopology::new(5, vec![4], 2).unwrap();
        let a = Mlp::init(t.clone(), 7).unwrap();
        let b = Mlp::init(t.clone(), 7).unwrap();
        let c = Mlp::init(t, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a
            .layers()
            .iter()
            .flat_map(|l| l.weights())
            .all(|w| (-0.5..=0.5).contains(w)));
    }

    #[test]
    fn topology_validation() {
        assert!(NetworkTopology::new(0, vec![2], 2).is_err());
        assert!(NetworkTopology::new(3, vec![0], 2).is_err());
        assert!(NetworkTopology::new(3, vec![2], 1).is_err());
        assert!(NetworkTopology::new(3, vec![], 2).is_ok());
    }

    #[test]
    fn zero_weights_give_half() {
        let net = Mlp::constant(NetworkTopology::new(3, vec![4], 2).unwrap(), 0.0).unwrap();
        assert_eq!(net.forward(&[0.3, -1.0, 0.9]).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn hand_evaluated_chain() {
        // 1-1-1 with unit weights and zero biases: sigma(sigma(1))
        let t = NetworkTopology {
            input_size: 1,
            hidden_sizes: vec![1],
            output_size: 1,
        };
        let layer = || Layer {
            fan_in: 1,
            fan_out: 1,
            weights: vec![1.0, 0.0],
        };
        let net = Mlp {
            topology: t,
            layers: vec![layer(), layer()],
        };
        let out = net.forward(&[1.0]).unwrap();
        assert_abs_diff_eq!(out[0], 0.675_037_527_376_823_7, epsilon = 1e-12);
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let net = Mlp::init(NetworkTopology::new(3, vec![2], 2).unwrap(), 0).unwrap();
        assert!(matches!(
            net.forward(&[1.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn error_substitution() {
        let net = Mlp::constant(NetworkTopology::new(2, vec![2], 2).unwrap(), 0.0).unwrap();
        let ex = EncodedExample::labeled(vec![0.1, 0.2], 0, 2);
        assert_abs_diff_eq!(net.error(std::slice::from_ref(&ex)).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(net.error(&[ex.clone(), ex]).unwrap(), 0.5, epsilon = 1e-15);

        let matched = EncodedExample {
            features: vec![0.0, 0.0],
            target: Some(vec![0.5, 0.5]),
        };
        assert_eq!(net.error(&[matched]).unwrap(), 0.0);
        assert!(matches!(
            net.error(&[EncodedExample::unlabeled(vec![0.0, 0.0])]),
            Err(Error::Unlabeled(0))
        ));
    }

    #[test]
    fn zero_learning_rate_is_a_no_op() {
        let mut net = Mlp::init(NetworkTopology::new(3, vec![4], 2).unwrap(), 1).unwrap();
        let before = net.clone();
        let mut v = WeightDeltas::zeros_like(&net);
        net.backprop_step(&EncodedExample::labeled(vec![0.5, -0.5, 1.0], 1, 2), 0.0, 0.0, &mut v)
            .unwrap();
        assert_eq!(net, before);
    }

    #[test]
    fn momentum_reuses_previous_delta() {
        let mut net = Mlp::init(NetworkTopology::new(2, vec![2], 2).unwrap(), 3).unwrap();
        let start = net.clone();
        let ex = EncodedExample::labeled(vec![0.2, 0.4], 0, 2);
        let mut v = WeightDeltas::zeros_like(&net);
        for x in v.layers.iter_mut().flatten() {
            *x = 0.01;
        }
        let g = net.gradient(&ex.features, ex.target.as_ref().unwrap()).unwrap();
        net.backprop_step(&ex, 0.1, 0.5, &mut v).unwrap();
        for ((after, before), g) in net.layers().iter().zip(start.layers()).zip(&g.layers) {
            for ((a, b), g) in after.weights().iter().zip(before.weights()).zip(g) {
                assert_abs_diff_eq!(*a, b - 0.1 * g + 0.005, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn huge_epsilon_stops_after_one_cycle() {
        let net = Mlp::init(NetworkTopology::new(2, vec![2], 2).unwrap(), 0).unwrap();
        let data = vec![
            EncodedExample::labeled(vec![0.0, 1.0], 0, 2),
            EncodedExample::labeled(vec![1.0, 0.0], 1, 2),
        ];
        let cfg = TrainConfig {
            error_epsilon: 1e9,
            ..TrainConfig::default()
        };
        let (_, h) = train(net, &data, &cfg).unwrap();
        assert_eq!(h.errors.len(), 1);
        assert_eq!(h.stop_reason, StopReason::EpsilonReached);
    }

    #[test]
    fn train_rejects_bad_data() {
        let net = Mlp::init(NetworkTopology::new(2, vec![2], 2).unwrap(), 0).unwrap();
        let cfg = TrainConfig::default();
        assert!(train(net.clone(), &[], &cfg).is_err());
        assert!(matches!(
            train(net, &[EncodedExample::unlabeled(vec![0.0, 0.0])], &cfg),
            Err(Error::Unlabeled(0))
        ));
    }

    #[test]
    fn table_rows_pick_the_larger_confidence() {
        let classes = names(&["no response", "response"]);
        let p = Prediction::from_scores(vec![0.185, 0.815], &classes).unwrap();
        assert_eq!(p.label, "response");
        let p = Prediction::from_scores(vec![0.937, 0.063], &classes).unwrap();
        assert_eq!(p.label, "no response");
        let p = Prediction::from_scores(vec![0.3, 0.3], &classes).unwrap();
        assert_eq!(p.confidences, vec![0.5, 0.5]);
        assert_eq!(p.label, "no response");
    }

    #[test]
    fn predict_normalizes_network_outputs() {
        let net = Mlp::init(NetworkTopology::new(3, vec![3], 2).unwrap(), 5).unwrap();
        let classes = names(&["a", "b"]);
        let p = net.predict(&[0.1, 0.2, -0.3], &classes).unwrap();
        assert_abs_diff_eq!(p.confidences.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(net.predict(&[0.1, 0.2, -0.3], &names(&["a"])).is_err());
    }

    #[test]
    fn layer_json_is_a_matrix_with_bias_last() {
        let l = Layer {
            fan_in: 2,
            fan_out: 1,
            weights: vec![0.25, -0.5, 0.125],
        };
        let json = serde_json::to_string(&l).unwrap();
        assert_eq!(json, r#"{"weights":[[0.25],[-0.5],[0.125]]}"#);
        assert_eq!(serde_json::from_str::<Layer>(&json).unwrap(), l);
        assert!(serde_json::from_str::<Layer>(r#"{"weights":[[1.0],[2.0,3.0]]}"#).is_err());
    }
}
