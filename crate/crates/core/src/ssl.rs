//! Self-training and co-training around any [`Learner`].
//!
//! Both loops retrain from scratch every iteration, absorb every pool point
//! whose top confidence reaches the threshold, and never revisit a label once
//! it has been assigned.

use serde::{Deserialize, Serialize};

use crate::dataset::ExampleSet;
use crate::learner::{Classifier, Fitted, Learner, TrainingData};
use crate::mlp::Prediction;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfTrainConfig {
    pub confidence_threshold: f64,
    pub max_iterations: usize,
}

impl Default for SelfTrainConfig {
    fn default() -> Self {
        SelfTrainConfig {
            confidence_threshold: 0.8,
            max_iterations: 10,
        }
    }
}

impl SelfTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.confidence_threshold > 0.0 && self.confidence_threshold <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "confidence threshold must lie in (0, 1], got {}",
                self.confidence_threshold
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max iterations must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Position in the prediction list.
    pub index: usize,
    pub class_index: usize,
    pub label: String,
    pub confidence: f64,
}

/// Predictions whose top confidence reaches `threshold` (capped at 1), most
/// confident first; equal confidences keep index order.
pub fn select_confident(predictions: &[Prediction], threshold: f64) -> Vec<Selection> {
    let threshold = threshold.min(1.0);
    let mut picked: Vec<Selection> = predictions
        .iter()
        .enumerate()
        .filter(|(_, p)| p.max_confidence() >= threshold)
        .map(|(index, p)| Selection {
            index,
            class_index: p.class_index,
            label: p.label.clone(),
            confidence: p.max_confidence(),
        })
        .collect();
    picked.sort_by(|a, b| b.confidence.total_cmp(&a.confidence).then(a.index.cmp(&b.index)));
    picked
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    NoConfidentPoints,
    PoolExhausted,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub added: usize,
    pub added_per_class: Vec<usize>,
    /// Rows the model of this iteration was trained on.
    pub pool_size: usize,
    pub train_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTrainLog {
    pub classes: Vec<String>,
    pub iterations: Vec<IterationRecord>,
    pub termination: Termination,
    /// Size of the pool the returned model was trained on.
    pub final_pool_size: usize,
    pub final_train_error: Option<f64>,
}

impl SelfTrainLog {
    pub fn total_added(&self) -> usize {
        self.iterations.iter().map(|r| r.added).sum()
    }

    /// `iteration,added,pool_size,train_error`; an unreported error is left empty.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iteration,added,pool_size,train_error\n");
        for r in &self.iterations {
            let err = r.train_error.map(|e| e.to_string()).unwrap_or_default();
            s.push_str(&format!("{},{},{},{}\n", r.iteration, r.added, r.pool_size, err));
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct SelfTrainOutcome<M> {
    pub model: M,
    /// Original labeled rows followed by the absorbed rows with their assigned labels.
    pub augmented: ExampleSet,
    pub log: SelfTrainLog,
}

fn check_inputs(labeled: &ExampleSet, unlabeled: &ExampleSet) -> Result<()> {
    if labeled.is_empty() {
        return Err(Error::InvalidArgument("the labeled set is empty".into()));
    }
    labeled.check_compatible(unlabeled)?;
    if !unlabeled.is_fully_unlabeled() {
        return Err(Error::InvalidArgument(
            "the unlabeled pool contains labeled rows".into(),
        ));
    }
    Ok(())
}

/// Train on the labeled rows, label the pool, absorb the confident points and
/// repeat until nothing qualifies, the pool is empty, or `max_iterations`
/// rounds have run. The returned model is always trained on the final pool.
pub fn self_train<L: Learner>(
    labeled: &ExampleSet,
    unlabeled: &ExampleSet,
    cfg: &SelfTrainConfig,
    learner: &L,
) -> Result<SelfTrainOutcome<L::Model>> {
    cfg.validate()?;
    check_inputs(labeled, unlabeled)?;
    let mut pool = TrainingData::from_example_set(labeled)?;
    let candidates = unlabeled.feature_matrix()?;
    let classes = pool.classes().to_vec();

    let mut remaining: Vec<usize> = (0..candidates.len()).collect();
    let mut absorbed: Vec<(usize, usize)> = Vec::new();
    let mut iterations = Vec::new();
    let mut iteration = 0;
    let (fitted, termination) = loop {
        iteration += 1;
        let fitted = learner.fit(&pool)?;
        let mut record = IterationRecord {
            iteration,
            added: 0,
            added_per_class: vec![0; classes.len()],
            pool_size: pool.len(),
            train_error: fitted.training_error,
        };
        if remaining.is_empty() {
            iterations.push(record);
            break (fitted, Termination::PoolExhausted);
        }
        let predictions = remaining
            .iter()
            .map(|&i| fitted.model.predict(&candidates[i]))
            .collect::<Result<Vec<_>>>()?;
        let picked = select_confident(&predictions, cfg.confidence_threshold);
        if picked.is_empty() {
            iterations.push(record);
            break (fitted, Termination::NoConfidentPoints);
        }
        let mut taken = vec![false; remaining.len()];
        for s in &picked {
            let row = remaining[s.index];
            pool.push(candidates[row].clone(), s.class_index);
            absorbed.push((row, s.class_index));
            record.added_per_class[s.class_index] += 1;
            taken[s.index] = true;
        }
        record.added = picked.len();
        let mut k = 0;
        remaining.retain(|_| {
            k += 1;
            !taken[k - 1]
        });
        iterations.push(record);
        if iteration == cfg.max_iterations {
            break (learner.fit(&pool)?, Termination::MaxIterations);
        }
    };

    let rows: Vec<usize> = absorbed.iter().map(|&(r, _)| r).collect();
    let labels: Vec<Option<String>> = absorbed.iter().map(|&(_, c)| Some(classes[c].clone())).collect();
    let augmented = labeled.concat(&unlabeled.select(&rows).with_labels(&labels))?;
    Ok(SelfTrainOutcome {
        model: fitted.model,
        augmented,
        log: SelfTrainLog {
            classes,
            iterations,
            termination,
            final_pool_size: pool.len(),
            final_train_error: fitted.training_error,
        },
    })
}

/// Two disjoint, exhaustive, nonempty sets of feature positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewSplit {
    first: Vec<usize>,
    second: Vec<usize>,
}

impl ViewSplit {
    pub fn new(first: Vec<usize>, second: Vec<usize>, num_features: usize) -> Result<Self> {
        if first.is_empty() || second.is_empty() {
            return Err(Error::InvalidViewSplit("each view needs at least one feature".into()));
        }
        let mut seen = vec![false; num_features];
        for &i in first.iter().chain(&second) {
            match seen.get_mut(i) {
                None => {
                    return Err(Error::InvalidViewSplit(format!(
                        "feature {i} is out of range for {num_features} features"
                    )))
                }
                Some(true) => return Err(Error::InvalidViewSplit(format!("feature {i} is in both views"))),
                Some(s) => *s = true,
            }
        }
        if let Some(gap) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidViewSplit(format!("feature {gap} is in neither view")));
        }
        Ok(ViewSplit { first, second })
    }

    /// First half of the features against the second half.
    pub fn halves(num_features: usize) -> Result<Self> {
        let mid = num_features / 2;
        Self::new((0..mid).collect(), (mid..num_features).collect(), num_features)
    }

    pub fn first(&self) -> &[usize] {
        &self.first
    }

    pub fn second(&self) -> &[usize] {
        &self.second
    }

    fn num_features(&self) -> usize {
        self.first.len() + self.second.len()
    }
}

fn project(row: &[f64], columns: &[usize]) -> Vec<f64> {
    columns.iter().map(|&c| row[c]).collect()
}

/// Averages the confidence vectors of two view models.
#[derive(Debug, Clone)]
pub struct CombinedClassifier<A, B> {
    pub first: A,
    pub second: B,
    pub views: ViewSplit,
}

impl<A: Classifier, B: Classifier> Classifier for CombinedClassifier<A, B> {
    fn classes(&self) -> &[String] {
        self.first.classes()
    }

    fn predict(&self, features: &[f64]) -> Result<Prediction> {
        if features.len() != self.views.num_features() {
            return Err(Error::DimensionMismatch {
                expected: self.views.num_features(),
                got: features.len(),
            });
        }
        let a = self.first.predict(&project(features, &self.views.first))?;
        let b = self.second.predict(&project(features, &self.views.second))?;
        let avg = a
            .confidences
            .iter()
            .zip(&b.confidences)
            .map(|(x, y)| 0.5 * (x + y))
            .collect();
        Prediction::from_scores(avg, self.classes())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoTrainRecord {
    pub iteration: usize,
    /// Points the second view's model labeled for the first view's pool.
    pub to_first: usize,
    /// Points the first view's model labeled for the second view's pool.
    pub to_second: usize,
    pub first_pool_size: usize,
    pub second_pool_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoTrainLog {
    pub iterations: Vec<CoTrainRecord>,
    pub termination: Termination,
}

#[derive(Debug, Clone)]
pub struct CoTrainOutcome<A, B> {
    pub combined: CombinedClassifier<A, B>,
    pub log: CoTrainLog,
}

/// Co-training: one model per feature view; each labels the shared pool and
/// hands its confident points to the other view's training set.
pub fn co_train<LA: Learner, LB: Learner>(
    labeled: &ExampleSet,
    unlabeled: &ExampleSet,
    views: &ViewSplit,
    cfg: &SelfTrainConfig,
    first: &LA,
    second: &LB,
) -> Result<CoTrainOutcome<LA::Model, LB::Model>> {
    cfg.validate()?;
    let width = labeled.regular_indices().len();
    ViewSplit::new(views.first.clone(), views.second.clone(), width)?;
    check_inputs(labeled, unlabeled)?;
    let base = TrainingData::from_example_set(labeled)?;
    let candidates = unlabeled.feature_matrix()?;
    let mut pool_a = base.project(&views.first);
    let mut pool_b = base.project(&views.second);
    let mut remaining: Vec<usize> = (0..candidates.len()).collect();
    let mut iterations = Vec::new();
    let mut iteration = 0;

    let (fa, fb, termination) = loop {
        iteration += 1;
        let fa = first.fit(&pool_a)?;
        let fb = second.fit(&pool_b)?;
        let mut record = CoTrainRecord {
            iteration,
            to_first: 0,
            to_second: 0,
            first_pool_size: pool_a.len(),
            second_pool_size: pool_b.len(),
        };
        if remaining.is_empty() {
            iterations.push(record);
            break (fa, fb, Termination::PoolExhausted);
        }
        let predict = |f: &dyn Fn(&[f64]) -> Result<Prediction>, cols: &[usize]| {
            remaining
                .iter()
                .map(|&i| f(&project(&candidates[i], cols)))
                .collect::<Result<Vec<_>>>()
        };
        let by_a = predict(&|x| fa.model.predict(x), &views.first)?;
        let by_b = predict(&|x| fb.model.predict(x), &views.second)?;
        let sel_a = select_confident(&by_a, cfg.confidence_threshold);
        let sel_b = select_confident(&by_b, cfg.confidence_threshold);
        if sel_a.is_empty() && sel_b.is_empty() {
            iterations.push(record);
            break (fa, fb, Termination::NoConfidentPoints);
        }
        let mut taken = vec![false; remaining.len()];
        for s in &sel_a {
            pool_b.push(project(&candidates[remaining[s.index]], &views.second), s.class_index);
            taken[s.index] = true;
        }
        for s in &sel_b {
            pool_a.push(project(&candidates[remaining[s.index]], &views.first), s.class_index);
            taken[s.index] = true;
        }
        record.to_second = sel_a.len();
        record.to_first = sel_b.len();
        let mut k = 0;
        remaining.retain(|_| {
            k += 1;
            !taken[k - 1]
        });
        iterations.push(record);
        if iteration == cfg.max_iterations {
            break (first.fit(&pool_a)?, second.fit(&pool_b)?, Termination::MaxIterations);
        }
    };
    let (Fitted { model: a, .. }, Fitted { model: b, .. }) = (fa, fb);
    Ok(CoTrainOutcome {
        combined: CombinedClassifier {
            first: a,
            second: b,
            views: views.clone(),
        },
        log: CoTrainLog {
            iterations,
            termination,
        },
    })
}
