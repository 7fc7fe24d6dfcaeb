use serde::{Deserialize, Serialize};

use semisup_core::baselines::{KnnLearner, NaiveBayesLearner};
use semisup_core::dataset::{
    generate_synthetic, load_csv, split_labeled_unlabeled, split_manifest_csv, split_random, ExampleSet, SplitSpec,
};
use semisup_core::eval::{
    compare, evaluate, sweep_divisor, Arm, BinaryClasses, CompareEntry, ExperimentConfig, FormulaVariant, SweepResult,
};
use semisup_core::learner::{AnyLearner, AnyModel, Classifier, Learner, TrainingData};
use semisup_core::mlp::{HiddenLayers, MlpLearner, TrainConfig};
use semisup_core::preprocess::Preprocessor;
use semisup_core::ssl::{self_train, SelfTrainConfig};

use crate::config::{LearnerKind, RunConfig};
use crate::{Failure, Outputs};

/// Contents of `model.json`: everything `evaluate` needs to score raw rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub label_column: String,
    pub positive_class: Option<String>,
    pub preprocessor: Preprocessor,
    pub model: AnyModel,
}

struct Prepared {
    raw_labeled: ExampleSet,
    raw_unlabeled: ExampleSet,
    raw_test: ExampleSet,
    preprocessor: Preprocessor,
    labeled: ExampleSet,
    unlabeled: ExampleSet,
    test: ExampleSet,
}

fn load(c: &RunConfig) -> Result<ExampleSet, Failure> {
    Ok(match &c.data {
        Some(path) => load_csv(path, &c.label_column)?,
        None => {
            if c.label_column != "class" {
                return Err(Failure::Validation(
                    "synthetic data always uses the label column `class`".into(),
                ));
            }
            generate_synthetic(c.synth_rows, c.synth_features, c.synth_separation, c.synth_seed)?
        }
    })
}

/// Load, split off the test rows, strip labels from all but `labeled_count`
/// training rows and fit the preprocessing on the training rows.
fn prepare(c: &RunConfig) -> Result<Prepared, Failure> {
    let set = load(c)?;
    let (train, test) = split_random(&set, SplitSpec::new(c.test_fraction, c.split_seed)?)?;
    let count = c.labeled_count.unwrap_or(train.len());
    let parts = split_labeled_unlabeled(&train, count, c.split_seed)?;
    let preprocessor = Preprocessor::fit(&train)?;
    Ok(Prepared {
        labeled: preprocessor.apply(&parts.labeled)?,
        unlabeled: preprocessor.apply(&parts.unlabeled)?,
        test: preprocessor.apply(&test)?,
        raw_labeled: parts.labeled,
        raw_unlabeled: parts.unlabeled,
        raw_test: test,
        preprocessor,
    })
}

fn train_config(c: &RunConfig) -> TrainConfig {
    TrainConfig {
        training_cycles: c.training_cycles,
        learning_rate: c.learning_rate,
        error_epsilon: c.error_epsilon,
        momentum: c.momentum,
        shuffle_seed: c.shuffle_seed,
    }
}

fn mlp_learner(c: &RunConfig) -> MlpLearner {
    MlpLearner {
        hidden: match &c.hidden_sizes {
            Some(sizes) => HiddenLayers::Explicit(sizes.clone()),
            None => HiddenLayers::Rule {
                divisor: c.hidden_divisor,
                plus_one: c.hidden_plus_one,
            },
        },
        train: train_config(c),
        init_seed: c.init_seed,
    }
}

fn learner(c: &RunConfig, kind: LearnerKind) -> AnyLearner {
    match kind {
        LearnerKind::Mlp => AnyLearner::Mlp(mlp_learner(c)),
        LearnerKind::Knn => AnyLearner::Knn(KnnLearner { k: c.k }),
        LearnerKind::Nb => AnyLearner::NaiveBayes(NaiveBayesLearner::default()),
    }
}

fn ssl_config(c: &RunConfig) -> SelfTrainConfig {
    SelfTrainConfig {
        confidence_threshold: c.confidence_threshold,
        max_iterations: c.max_iterations,
    }
}

/// The configured positive class, or the second class of a two-class label.
fn positive_class(c: &RunConfig, classes: &[String]) -> Option<String> {
    c.positive_class
        .clone()
        .or_else(|| (classes.len() == 2).then(|| classes[1].clone()))
}

fn binary(c: &RunConfig, classes: &[String]) -> Result<BinaryClasses, Failure> {
    let positive = positive_class(c, classes).ok_or_else(|| {
        Failure::Validation(format!(
            "reports need a two-class label, found {} classes",
            classes.len()
        ))
    })?;
    Ok(BinaryClasses::from_classes(classes, &positive)?)
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn save_model(c: &RunConfig, p: &Prepared, model: AnyModel) -> Result<String, Failure> {
    let positive_class = positive_class(c, p.labeled.class_names());
    if let Some(pos) = &positive_class {
        if !p.labeled.class_names().contains(pos) {
            return Err(Failure::Validation(format!(
                "positive class `{pos}` is not a label value"
            )));
        }
    }
    Ok(json(&SavedModel {
        label_column: c.label_column.clone(),
        positive_class,
        preprocessor: p.preprocessor.clone(),
        model,
    }))
}

pub fn execute(c: &RunConfig) -> Result<Outputs, Failure> {
    let mut out = Outputs::default();
    match c.command.as_str() {
        "synth" => {
            let set = generate_synthetic(c.synth_rows, c.synth_features, c.synth_separation, c.synth_seed)?;
            out.add("data.csv", set.to_csv()?);
        }
        "split" => {
            let p = prepare(c)?;
            let mut manifest: Vec<(usize, &str)> = p
                .raw_test
                .origin()
                .iter()
                .map(|&r| (r, "test"))
                .chain(p.raw_labeled.origin().iter().map(|&r| (r, "labeled")))
                .chain(p.raw_unlabeled.origin().iter().map(|&r| (r, "unlabeled")))
                .collect();
            manifest.sort_unstable();
            out.add("manifest.csv", split_manifest_csv(&manifest));
            out.add("labeled.csv", p.raw_labeled.to_csv()?);
            out.add("unlabeled.csv", p.raw_unlabeled.to_csv()?);
            out.add("test.csv", p.raw_test.to_csv()?);
            println!(
                "{} labeled, {} unlabeled, {} test rows",
                p.raw_labeled.len(),
                p.raw_unlabeled.len(),
                p.raw_test.len()
            );
        }
        "train" => {
            let p = prepare(c)?;
            let data = TrainingData::from_example_set(&p.labeled)?;
            let model = match c.learner {
                LearnerKind::Mlp => {
                    let (model, history) = mlp_learner(c).fit_with_history(&data)?;
                    out.add("history.csv", history.to_csv());
                    println!(
                        "trained on {} rows, final error {} ({:?})",
                        data.len(),
                        history.final_error(),
                        history.stop_reason
                    );
                    AnyModel::Mlp(model)
                }
                kind => {
                    println!("trained on {} rows", data.len());
                    learner(c, kind).fit(&data)?.model
                }
            };
            out.add("model.json", save_model(c, &p, model)?);
            out.add("test.csv", p.raw_test.to_csv()?);
        }
        "selftrain" => {
            let p = prepare(c)?;
            let outcome = self_train(&p.labeled, &p.unlabeled, &ssl_config(c), &learner(c, c.learner))?;
            let log = &outcome.log;
            println!(
                "{} iterations, {} of {} pool points absorbed, stopped: {:?}",
                log.iterations.len(),
                log.total_added(),
                p.unlabeled.len(),
                log.termination
            );
            out.add("selftrain_log.csv", log.to_csv());
            out.add("selftrain_log.json", json(log));
            out.add("model.json", save_model(c, &p, outcome.model)?);
            out.add("test.csv", p.raw_test.to_csv()?);
        }
        "evaluate" => {
            let path = c.model.as_ref().expect("checked when resolving");
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
            let saved: SavedModel = serde_json::from_str(&text)
                .map_err(|e| Failure::Validation(format!("bad model file {}: {e}", path.display())))?;
            let raw = load_csv(c.test.as_ref().expect("checked when resolving"), &saved.label_column)?;
            let test = saved.preprocessor.apply(&raw)?;
            let positive = c.positive_class.clone().or(saved.positive_class.clone());
            let classes = saved.model.classes();
            let pair = match positive {
                Some(pos) => BinaryClasses::from_classes(classes, &pos)?,
                None => binary(c, classes)?,
            };
            let evaluation = evaluate(&saved.model, &test, &pair)?;
            println!(
                "accuracy {}% on {} rows (positive class `{}`)",
                semisup_core::eval::Rate::Value(evaluation.metrics.accuracy).percent(),
                test.len(),
                pair.positive
            );
            out.add("metrics.json", json(&evaluation));
            out.add("metrics.csv", evaluation.to_csv());
        }
        "sweep" => {
            let p = prepare(c)?;
            let classes = binary(c, p.labeled.class_names())?;
            let cfg = ExperimentConfig {
                self_train: ssl_config(c),
                train: train_config(c),
                init_seed: c.init_seed,
                positive_class: classes.positive,
            };
            let variants = if c.both_variants {
                vec![FormulaVariant::Divided, FormulaVariant::DividedPlusOne]
            } else if c.hidden_plus_one {
                vec![FormulaVariant::DividedPlusOne]
            } else {
                vec![FormulaVariant::Divided]
            };
            let mut result = SweepResult::default();
            for v in variants {
                result.extend(sweep_divisor(&p.labeled, &p.unlabeled, &p.test, &c.divisors, v, &cfg)?);
            }
            let csv = result.to_csv();
            print!("{csv}");
            out.add("sweep.csv", csv);
        }
        "compare" => {
            let p = prepare(c)?;
            let classes = binary(c, p.labeled.class_names())?;
            let entries: Vec<CompareEntry> = c
                .learners
                .iter()
                .map(|a| CompareEntry {
                    name: a.title(),
                    learner: learner(c, a.kind),
                    arm: if a.self_trained {
                        Arm::SelfTrained
                    } else {
                        Arm::Supervised
                    },
                })
                .collect();
            let table = compare(
                &entries,
                &p.labeled,
                &p.unlabeled,
                &p.test,
                &ssl_config(c),
                &classes.positive,
            )?;
            print!("{}", table.to_text());
            out.add("compare.csv", table.to_csv());
            out.add("compare.json", json(&table));
            out.add("compare.txt", table.to_text());
        }
        other => unreachable!("unknown command {other}"),
    }
    Ok(out)
}
