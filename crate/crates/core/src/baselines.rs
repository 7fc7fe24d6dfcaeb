//! k-nearest-neighbour and Gaussian naive Bayes comparison learners.

use serde::{Deserialize, Serialize};

use crate::learner::{Classifier, Fitted, Learner, TrainingData};
use crate::mlp::Prediction;
use crate::{Error, Result};

pub const DEFAULT_K: usize = 5;
pub const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnLearner {
    pub k: usize,
}

impl Default for KnnLearner {
    fn default() -> Self {
        KnnLearner { k: DEFAULT_K }
    }
}

/// Stores the training points; votes among the `k` nearest by Euclidean distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub classes: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl Learner for KnnLearner {
    type Model = KnnModel;

    fn fit(&self, data: &TrainingData) -> Result<Fitted<KnnModel>> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be >= 1".into()));
        }
        Ok(Fitted {
            model: KnnModel {
                k: self.k,
                classes: data.classes().to_vec(),
                features: data.features().to_vec(),
                labels: data.labels().to_vec(),
            },
            training_error: None,
        })
    }
}

impl KnnModel {
    pub fn predict(&self, features: &[f64]) -> Result<Prediction> {
        if self.k > self.features.len() {
            return Err(Error::InvalidArgument(format!(
                "k = {} exceeds the {} stored points",
                self.k,
                self.features.len()
            )));
        }
        let width = self.features.first().map_or(0, Vec::len);
        if features.len() != width {
            return Err(Error::DimensionMismatch {
                expected: width,
                got: features.len(),
            });
        }
        let mut dist: Vec<(f64, usize)> = self
            .features
            .iter()
            .enumerate()
            .map(|(i, p)| (p.iter().zip(features).map(|(a, b)| (a - b).powi(2)).sum(), i))
            .collect();
        // squared distance orders like distance; ties fall back to row index
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = vec![0.0; self.classes.len()];
        for &(_, i) in &dist[..self.k] {
            votes[self.labels[i]] += 1.0;
        }
        Prediction::from_scores(votes, &self.classes)
    }
}

impl Classifier for KnnModel {
    fn classes(&self) -> &[String] {
        &self.classes
    }

    fn predict(&self, features: &[f64]) -> Result<Prediction> {
        KnnModel::predict(self, features)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesLearner {
    pub variance_floor: f64,
}

impl Default for NaiveBayesLearner {
    fn default() -> Self {
        NaiveBayesLearner {
            variance_floor: VARIANCE_FLOOR,
        }
    }
}

/// Class priors and per-(class, attribute) Gaussian likelihoods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub classes: Vec<String>,
    pub priors: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

pub fn nb_fit(data: &TrainingData, variance_floor: f64) -> NaiveBayesModel {
    let k = data.classes().len();
    let d = data.num_features();
    let mut counts = vec![0usize; k];
    let mut means = vec![vec![0.0; d]; k];
    for (x, &c) in data.features().iter().zip(data.labels()) {
        counts[c] += 1;
        for (m, v) in means[c].iter_mut().zip(x) {
            *m += v;
        }
    }
    for (m, &n) in means.iter_mut().zip(&counts) {
        if n > 0 {
            m.iter_mut().for_each(|v| *v /= n as f64);
        }
    }
    let mut variances = vec![vec![0.0; d]; k];
    for (x, &c) in data.features().iter().zip(data.labels()) {
        for ((s, v), m) in variances[c].iter_mut().zip(x).zip(&means[c]) {
            *s += (v - m).powi(2);
        }
    }
    for (var, &n) in variances.iter_mut().zip(&counts) {
        for v in var.iter_mut() {
            *v = if n > 0 { *v / n as f64 } else { 0.0 };
            *v = v.max(variance_floor);
        }
    }
    let total = data.len() as f64;
    NaiveBayesModel {
        classes: data.classes().to_vec(),
        priors: counts.iter().map(|&n| n as f64 / total).collect(),
        means,
        variances,
    }
}

impl NaiveBayesModel {
    /// Unnormalized log posterior of each class; `-inf` for classes with zero prior.
    pub fn log_posteriors(&self, features: &[f64]) -> Result<Vec<f64>> {
        let width = self.means.first().map_or(0, Vec::len);
        if features.len() != width {
            return Err(Error::DimensionMismatch {
                expected: width,
                got: features.len(),
            });
        }
        Ok(self
            .priors
            .iter()
            .zip(self.means.iter().zip(&self.variances))
            .map(|(&prior, (mean, var))| {
                if prior == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let loglik: f64 = features
                    .iter()
                    .zip(mean.iter().zip(var))
                    .map(|(&x, (&m, &v))| -0.5 * (2.0 * std::f64::consts::PI * v).ln() - (x - m).powi(2) / (2.0 * v))
                    .sum();
                prior.ln() + loglik
            })
            .collect())
    }

    pub fn predict(&self, features: &[f64]) -> Result<Prediction> {
        let logp = self.log_posteriors(features)?;
        let top = logp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scores = logp.iter().map(|&l| (l - top).exp()).collect();
        Prediction::from_scores(scores, &self.classes)
    }
}

pub fn nb_predict(m: &NaiveBayesModel, features: &[f64]) -> Result<Prediction> {
    m.predict(features)
}

impl Learner for NaiveBayesLearner {
    type Model = NaiveBayesModel;

    fn fit(&self, data: &TrainingData) -> Result<Fitted<NaiveBayesModel>> {
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
        if !(self.variance_floor > 0.0) {
            return Err(Error::InvalidArgument("variance floor must be positive".into()));
        }
        Ok(Fitted {
            model: nb_fit(data, self.variance_floor),
            training_error: None,
        })
    }
}

impl Classifier for NaiveBayesModel {
    fn classes(&self) -> &[String] {
        &self.classes
    }

    fn predict(&self, features: &[f64]) -> Result<Prediction> {
        NaiveBayesModel::predict(self, features)
    }
}
