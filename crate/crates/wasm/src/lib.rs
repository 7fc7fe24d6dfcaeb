//! Browser bindings for the demo page. Each exported function returns a JSON
//! string built from the plain Rust function of the same name.

use std::collections::HashMap;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use semisup_core::dataset::{generate_synthetic, split_labeled_unlabeled, split_random, ExampleSet, SplitSpec};
use semisup_core::eval::{
    evaluate, metrics, sweep_divisor, BinaryClasses, ConfusionMatrix, ExperimentConfig, FormulaVariant, MetricsReport,
    SweepPoint,
};
use semisup_core::learner::{Classifier, Learner, TrainingData};
use semisup_core::mlp::{MlpLearner, TrainConfig};
use semisup_core::preprocess::Preprocessor;
use semisup_core::ssl::{self_train, SelfTrainConfig, SelfTrainLog};

#[derive(Debug, Serialize)]
pub struct DemoPoint {
    pub x: f64,
    pub y: f64,
    /// "labeled", "unlabeled" or "test".
    pub role: &'static str,
    pub class: String,
    /// Label the self-training loop gave this pool point, if it took it.
    pub absorbed_as: Option<String>,
    /// Iteration (from 1) in which it was absorbed.
    pub absorbed_in: Option<usize>,
}

/// `P(positive)` on a `resolution x resolution` grid over [-1, 1]^2, row by
/// row from y = -1, x running fastest.
#[derive(Debug, Serialize)]
pub struct Surface {
    pub resolution: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct Demo {
    pub classes: Vec<String>,
    pub points: Vec<DemoPoint>,
    pub supervised: Surface,
    pub self_trained: Surface,
    pub supervised_accuracy: f64,
    pub self_trained_accuracy: f64,
    pub log: SelfTrainLog,
}

fn surface<C: Classifier>(model: &C, resolution: usize) -> Result<Surface, String> {
    let step = 2.0 / (resolution - 1) as f64;
    let mut values = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for j in 0..resolution {
            let p = model
                .predict(&[-1.0 + j as f64 * step, -1.0 + i as f64 * step])
                .map_err(|e| e.to_string())?;
            values.push(p.confidences[1]);
        }
    }
    Ok(Surface { resolution, values })
}

fn points(set: &ExampleSet, role: &'static str, truth: &HashMap<usize, String>) -> Vec<DemoPoint> {
    let x = set.feature_matrix().expect("numeric after preprocessing");
    x.iter()
        .enumerate()
        .map(|(r, f)| {
            let origin = set.origin()[r];
            DemoPoint {
                x: f[0],
                y: f[1],
                role,
                class: set
                    .label_of(r)
                    .map(str::to_owned)
                    .unwrap_or_else(|| truth[&origin].clone()),
                absorbed_as: None,
                absorbed_in: None,
            }
        })
        .collect()
}

/// Two-feature synthetic data: a network trained on the labeled points alone
/// next to one self-trained with the unlabeled pool.
pub fn self_training_demo(
    rows: usize,
    separation: f64,
    labeled: usize,
    threshold: f64,
    cycles: usize,
    seed: u64,
    resolution: usize,
) -> Result<Demo, String> {
    if !(2..=200).contains(&resolution) {
        return Err("grid resolution must be between 2 and 200".into());
    }
    let err = |e: semisup_core::Error| e.to_string();
    let set = generate_synthetic(rows, 2, separation, seed).map_err(err)?;
    let (train, test) = split_random(&set, SplitSpec::new(0.3, seed).map_err(err)?).map_err(err)?;
    let parts = split_labeled_unlabeled(&train, labeled, seed).map_err(err)?;
    let pre = Preprocessor::fit(&train).map_err(err)?;
    let (lab, pool, test) = (
        pre.apply(&parts.labeled).map_err(err)?,
        pre.apply(&parts.unlabeled).map_err(err)?,
        pre.apply(&test).map_err(err)?,
    );
    let learner = MlpLearner {
        train: TrainConfig {
            training_cycles: cycles,
            shuffle_seed: seed,
            ..TrainConfig::default()
        },
        init_seed: seed,
        ..MlpLearner::default()
    };
    let cfg = SelfTrainConfig {
        confidence_threshold: threshold,
        ..SelfTrainConfig::default()
    };
    let classes = BinaryClasses::from_classes(lab.class_names(), "yes").map_err(err)?;

    let supervised = learner
        .fit(&TrainingData::from_example_set(&lab).map_err(err)?)
        .map_err(err)?
        .model;
    let outcome = self_train(&lab, &pool, &cfg, &learner).map_err(err)?;

    let truth: HashMap<usize, String> = parts.sealed.reveal().iter().cloned().collect();
    let mut absorbed: HashMap<usize, (String, usize)> = HashMap::new();
    let mut row = lab.len();
    for rec in &outcome.log.iterations {
        for _ in 0..rec.added {
            let origin = outcome.augmented.origin()[row];
            let label = outcome.augmented.label_of(row).unwrap_or_default().to_owned();
            absorbed.insert(origin, (label, rec.iteration));
            row += 1;
        }
    }
    let mut pts = points(&lab, "labeled", &truth);
    for (mut p, origin) in points(&pool, "unlabeled", &truth).into_iter().zip(pool.origin()) {
        if let Some((label, it)) = absorbed.get(origin) {
            p.absorbed_as = Some(label.clone());
            p.absorbed_in = Some(*it);
        }
        pts.push(p);
    }
    pts.extend(points(&test, "test", &truth));

    Ok(Demo {
        classes: lab.class_names().to_vec(),
        points: pts,
        supervised: surface(&supervised, resolution)?,
        self_trained: surface(&outcome.model, resolution)?,
        supervised_accuracy: evaluate(&supervised, &test, &classes).map_err(err)?.metrics.accuracy,
        self_trained_accuracy: evaluate(&outcome.model, &test, &classes).map_err(err)?.metrics.accuracy,
        log: outcome.log,
    })
}

/// Test error per hidden-layer divisor 1..=6 for both sizing formulas.
pub fn divisor_sweep(
    rows: usize,
    features: usize,
    separation: f64,
    labeled: usize,
    cycles: usize,
    seed: u64,
) -> Result<Vec<SweepPoint>, String> {
    let err = |e: semisup_core::Error| e.to_string();
    let set = generate_synthetic(rows, features, separation, seed).map_err(err)?;
    let (train, test) = split_random(&set, SplitSpec::new(0.3, seed).map_err(err)?).map_err(err)?;
    let parts = split_labeled_unlabeled(&train, labeled, seed).map_err(err)?;
    let pre = Preprocessor::fit(&train).map_err(err)?;
    let cfg = ExperimentConfig {
        self_train: SelfTrainConfig::default(),
        train: TrainConfig {
            training_cycles: cycles,
            shuffle_seed: seed,
            ..TrainConfig::default()
        },
        init_seed: seed,
        positive_class: "yes".into(),
    };
    let (lab, pool, test) = (
        pre.apply(&parts.labeled).map_err(err)?,
        pre.apply(&parts.unlabeled).map_err(err)?,
        pre.apply(&test).map_err(err)?,
    );
    let divisors: Vec<usize> = (1..=6).collect();
    let mut out = Vec::new();
    for v in [FormulaVariant::Divided, FormulaVariant::DividedPlusOne] {
        out.extend(
            sweep_divisor(&lab, &pool, &test, &divisors, v, &cfg)
                .map_err(err)?
                .points,
        );
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct Rates {
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
    /// The five rates as two-decimal percentages, or "undefined".
    pub percent: [String; 5],
}

/// Metrics for a confusion matrix given as its four cells.
pub fn confusion_rates(a: u64, b: u64, c: u64, d: u64) -> Result<Rates, String> {
    let cm = ConfusionMatrix {
        a,
        b,
        c,
        d,
        classes: BinaryClasses::new("negative", "positive"),
    };
    let m = metrics(&cm).map_err(|e| e.to_string())?;
    let percent = [
        semisup_core::eval::Rate::Value(m.accuracy).percent(),
        m.true_positive_rate.percent(),
        m.false_positive_rate.percent(),
        m.true_negative_rate.percent(),
        m.false_negative_rate.percent(),
    ];
    Ok(Rates {
        confusion: cm,
        metrics: m,
        percent,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = selfTrainingDemo)]
pub fn self_training_demo_js(
    rows: usize,
    separation: f64,
    labeled: usize,
    threshold: f64,
    cycles: usize,
    seed: u32,
    resolution: usize,
) -> Result<String, JsError> {
    to_js(self_training_demo(
        rows,
        separation,
        labeled,
        threshold,
        cycles,
        seed.into(),
        resolution,
    ))
}

#[wasm_bindgen(js_name = divisorSweep)]
pub fn divisor_sweep_js(
    rows: usize,
    features: usize,
    separation: f64,
    labeled: usize,
    cycles: usize,
    seed: u32,
) -> Result<String, JsError> {
    to_js(divisor_sweep(rows, features, separation, labeled, cycles, seed.into()))
}

#[wasm_bindgen(js_name = confusionRates)]
pub fn confusion_rates_js(a: u32, b: u32, c: u32, d: u32) -> Result<String, JsError> {
    to_js(confusion_rates(a.into(), b.into(), c.into(), d.into()))
}
