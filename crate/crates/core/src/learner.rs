//! The train/predict contract shared by the network and the baselines, so the
//! semi-supervised wrappers and the evaluation harness treat them alike.

use serde::{Deserialize, Serialize};

use crate::baselines::{KnnLearner, KnnModel, NaiveBayesLearner, NaiveBayesModel};
use crate::dataset::ExampleSet;
use crate::mlp::{EncodedExample, MlpClassifier, MlpLearner, Prediction};
use crate::{Error, Result};

/// Labeled real-valued training rows. Labels index into `classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingData {
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    classes: Vec<String>,
}

impl TrainingData {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, classes: Vec<String>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::InvalidArgument("training data is empty".into()));
        }
        if features.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.len(),
                got: labels.len(),
            });
        }
        let width = features[0].len();
        if let Some(row) = features.iter().find(|r| r.len() != width) {
            return Err(Error::DimensionMismatch {
                expected: width,
                got: row.len(),
            });
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= classes.len()) {
            return Err(Error::UnknownLabel(format!("class index {l}")));
        }
        Ok(TrainingData {
            features,
            labels,
            classes,
        })
    }

    /// Regular features and labels of a fully labeled, numeric example set.
    pub fn from_example_set(set: &ExampleSet) -> Result<Self> {
        let labels = set
            .class_indices()
            .into_iter()
            .enumerate()
            .map(|(r, l)| l.ok_or(Error::Unlabeled(r)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(set.feature_matrix()?, labels, set.class_names().to_vec())
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.features[0].len()
    }

    pub fn encoded(&self) -> Vec<EncodedExample> {
        self.features
            .iter()
            .zip(&self.labels)
            .map(|(x, &l)| EncodedExample::labeled(x.clone(), l, self.classes.len()))
            .collect()
    }

    /// Keep only the feature columns in `columns`, in that order.
    pub fn project(&self, columns: &[usize]) -> TrainingData {
        TrainingData {
            features: self
                .features
                .iter()
                .map(|row| columns.iter().map(|&c| row[c]).collect())
                .collect(),
            labels: self.labels.clone(),
            classes: self.classes.clone(),
        }
    }

    pub(crate) fn push(&mut self, features: Vec<f64>, label: usize) {
        debug_assert!(label < self.classes.len());
        self.features.push(features);
        self.labels.push(label);
    }
}

/// A trained model plus the training-set error reported by its learner, if any.
#[derive(Debug, Clone)]
pub struct Fitted<M> {
    pub model: M,
    pub training_error: Option<f64>,
}

pub trait Classifier {
    fn classes(&self) -> &[String];

    fn predict(&self, features: &[f64]) -> Result<Prediction>;

    fn predict_all(&self, rows: &[Vec<f64>]) -> Result<Vec<Prediction>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }
}

pub trait Learner {
    type Model: Classifier;

    fn fit(&self, data: &TrainingData) -> Result<Fitted<Self::Model>>;
}

impl<L: Learner + ?Sized> Learner for &L {
    type Model = L::Model;

    fn fit(&self, data: &TrainingData) -> Result<Fitted<L::Model>> {
        (**self).fit(data)
    }
}

/// Any of the built-in learners, selectable at run time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnyLearner {
    Mlp(MlpLearner),
    Knn(KnnLearner),
    NaiveBayes(NaiveBayesLearner),
}

/// A trained model of any built-in kind; serializes with a `kind` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnyModel {
    Mlp(MlpClassifier),
    Knn(KnnModel),
    NaiveBayes(NaiveBayesModel),
}

impl AnyModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Learner for AnyLearner {
    type Model = AnyModel;

    fn fit(&self, data: &TrainingData) -> Result<Fitted<AnyModel>> {
        fn wrap<M>(f: Fitted<M>, tag: fn(M) -> AnyModel) -> Fitted<AnyModel> {
            Fitted {
                model: tag(f.model),
                training_error: f.training_error,
            }
        }
        Ok(match self {
            AnyLearner::Mlp(l) => wrap(l.fit(data)?, AnyModel::Mlp),
            AnyLearner::Knn(l) => wrap(l.fit(data)?, AnyModel::Knn),
            AnyLearner::NaiveBayes(l) => wrap(l.fit(data)?, AnyModel::NaiveBayes),
        })
    }
}

impl Classifier for AnyModel {
    fn classes(&self) -> &[String] {
        match self {
            AnyModel::Mlp(m) => m.classes(),
            AnyModel::Knn(m) => m.classes(),
            AnyModel::NaiveBayes(m) => m.classes(),
        }
    }

    fn predict(&self, features: &[f64]) -> Result<Prediction> {
        match self {
            AnyModel::Mlp(m) => m.predict(features),
            AnyModel::Knn(m) => m.predict(features),
            AnyModel::NaiveBayes(m) => m.predict(features),
        }
    }
}
