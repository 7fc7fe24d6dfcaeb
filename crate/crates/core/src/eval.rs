//! Two-class confusion matrices, the derived rates, the hidden-size sweep and
//! multi-learner comparison tables.
//!
//! Cell naming follows the usual two-class layout:
//!
//! ```text
//!                    predicted negative   predicted positive
//! actual negative            a                    b
//! actual positive            c                    d
//! ```

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::dataset::ExampleSet;
use crate::learner::{AnyLearner, Classifier, Learner, TrainingData};
use crate::mlp::{default_hidden_size, HiddenLayers, MlpLearner, TrainConfig};
use crate::ssl::{self_train, SelfTrainConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryClasses {
    pub negative: String,
    pub positive: String,
}

impl BinaryClasses {
    pub fn new(negative: impl Into<String>, positive: impl Into<String>) -> Self {
        BinaryClasses {
            negative: negative.into(),
            positive: positive.into(),
        }
    }

    /// Split a two-class vocabulary around the named positive class.
    pub fn from_classes(classes: &[String], positive: &str) -> Result<Self> {
        if classes.len() != 2 {
            return Err(Error::InvalidArgument(format!(
                "confusion matrices need exactly two classes, found {}",
                classes.len()
            )));
        }
        let p = classes
            .iter()
            .position(|c| c == positive)
            .ok_or_else(|| Error::UnknownLabel(positive.to_owned()))?;
        Ok(BinaryClasses::new(classes[1 - p].clone(), classes[p].clone()))
    }

    pub fn swapped(&self) -> Self {
        BinaryClasses::new(self.positive.clone(), self.negative.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// actual negative, predicted negative
    pub a: u64,
    /// actual negative, predicted positive
    pub b: u64,
    /// actual positive, predicted negative
    pub c: u64,
    /// actual positive, predicted positive
    pub d: u64,
    pub classes: BinaryClasses,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }
}

pub fn confusion<S: AsRef<str>>(predicted: &[S], actual: &[S], classes: &BinaryClasses) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            got: predicted.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::InvalidArgument("nothing to evaluate".into()));
    }
    let is_positive = |s: &str| -> Result<bool> {
        if s == classes.positive {
            Ok(true)
        } else if s == classes.negative {
            Ok(false)
        } else {
            Err(Error::UnknownLabel(s.to_owned()))
        }
    };
    let mut cm = ConfusionMatrix {
        a: 0,
        b: 0,
        c: 0,
        d: 0,
        classes: classes.clone(),
    };
    for (p, t) in predicted.iter().zip(actual) {
        match (is_positive(t.as_ref())?, is_positive(p.as_ref())?) {
            (false, false) => cm.a += 1,
            (false, true) => cm.b += 1,
            (true, false) => cm.c += 1,
            (true, true) => cm.d += 1,
        }
    }
    Ok(cm)
}

/// A ratio, or `Undefined` when its denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rate {
    Value(f64),
    Undefined,
}

impl Rate {
    fn ratio(num: u64, den: u64) -> Rate {
        if den == 0 {
            Rate::Undefined
        } else {
            Rate::Value(num as f64 / den as f64)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Rate::Value(v) => Some(v),
            Rate::Undefined => None,
        }
    }

    /// Percentage with two decimals, or `undefined`.
    pub fn percent(self) -> String {
        match self {
            Rate::Value(v) => format!("{:.2}", 100.0 * v),
            Rate::Undefined => "undefined".into(),
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Value(v) => write!(f, "{v}"),
            Rate::Undefined => f.write_str("undefined"),
        }
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rate::Value(v) => s.serialize_f64(*v),
            Rate::Undefined => s.serialize_str("undefined"),
        }
    }
}

impl<'de> Deserialize<'de> for Rate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Rate::Value(v)),
            Repr::Text(t) if t == "undefined" => Ok(Rate::Undefined),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("unexpected rate `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub true_positive_rate: Rate,
    pub false_positive_rate: Rate,
    pub true_negative_rate: Rate,
    pub false_negative_rate: Rate,
}

/// Accuracy is `(a + d) / (a + b + c + d)`, the share of correct predictions.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::InvalidArgument("empty confusion matrix".into()));
    }
    Ok(MetricsReport {
        accuracy: (cm.a + cm.d) as f64 / total as f64,
        true_positive_rate: Rate::ratio(cm.d, cm.c + cm.d),
        false_positive_rate: Rate::ratio(cm.b, cm.a + cm.b),
        true_negative_rate: Rate::ratio(cm.a, cm.a + cm.b),
        false_negative_rate: Rate::ratio(cm.c, cm.c + cm.d),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

impl Evaluation {
    pub fn to_csv(&self) -> String {
        let m = &self.metrics;
        let c = &self.confusion;
        format!(
            "positive_class,a,b,c,d,accuracy,true_positive_rate,false_positive_rate,true_negative_rate,false_negative_rate\n\
             {},{},{},{},{},{},{},{},{},{}\n",
            c.classes.positive,
            c.a,
            c.b,
            c.c,
            c.d,
            m.accuracy,
            m.true_positive_rate,
            m.false_positive_rate,
            m.true_negative_rate,
            m.false_negative_rate
        )
    }
}

/// Predict every row of a labeled, preprocessed set and score the result.
pub fn evaluate<C: Classifier + ?Sized>(model: &C, test: &ExampleSet, classes: &BinaryClasses) -> Result<Evaluation> {
    let x = test.feature_matrix()?;
    let actual: Vec<&str> = (0..test.len())
        .map(|r| test.label_of(r).ok_or(Error::Unlabeled(r)))
        .collect::<Result<_>>()?;
    let predicted: Vec<String> = x
        .iter()
        .map(|row| model.predict(row).map(|p| p.label))
        .collect::<Result<_>>()?;
    let predicted: Vec<&str> = predicted.iter().map(String::as_str).collect();
    let confusion = confusion(&predicted, &actual, classes)?;
    let metrics = metrics(&confusion)?;
    Ok(Evaluation { confusion, metrics })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaVariant {
    /// `(attributes + classes) / X`
    Divided,
    /// `(attributes + classes) / X + 1`
    DividedPlusOne,
}

impl FormulaVariant {
    pub fn plus_one(self) -> bool {
        matches!(self, FormulaVariant::DividedPlusOne)
    }

    pub fn name(self) -> &'static str {
        match self {
            FormulaVariant::Divided => "divided",
            FormulaVariant::DividedPlusOne => "divided_plus_one",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub divisor: usize,
    pub hidden_size: usize,
    pub error_percent: f64,
    pub variant: FormulaVariant,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn extend(&mut self, other: SweepResult) {
        self.points.extend(other.points);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("divisor,hidden_size,error_percent,formula_variant\n");
        for p in &self.points {
            s.push_str(&format!(
                "{},{},{:.2},{}\n",
                p.divisor,
                p.hidden_size,
                p.error_percent,
                p.variant.name()
            ));
        }
        s
    }
}

/// Everything a sweep or comparison run needs besides the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub self_train: SelfTrainConfig,
    pub train: TrainConfig,
    pub init_seed: u64,
    pub positive_class: String,
}

fn check_sets(labeled: &ExampleSet, unlabeled: &ExampleSet, test: &ExampleSet) -> Result<()> {
    labeled.check_compatible(unlabeled)?;
    labeled.check_compatible(test)
}

/// Run the full self-training pipeline once per divisor with the hidden
/// layer sized by the chosen formula, recording test error.
pub fn sweep_divisor(
    labeled: &ExampleSet,
    unlabeled: &ExampleSet,
    test: &ExampleSet,
    divisors: &[usize],
    variant: FormulaVariant,
    cfg: &ExperimentConfig,
) -> Result<SweepResult> {
    if divisors.is_empty() {
        return Err(Error::InvalidArgument("no divisors given".into()));
    }
    if divisors.contains(&0) {
        return Err(Error::InvalidArgument("divisors must be >= 1".into()));
    }
    check_sets(labeled, unlabeled, test)?;
    let classes = BinaryClasses::from_classes(labeled.class_names(), &cfg.positive_class)?;
    let attributes = labeled.regular_indices().len();
    let num_classes = labeled.class_names().len();

    let run = |&divisor: &usize| -> Result<SweepPoint> {
        let learner = MlpLearner {
            hidden: HiddenLayers::Rule {
                divisor,
                plus_one: variant.plus_one(),
            },
            train: cfg.train,
            init_seed: cfg.init_seed,
        };
        let out = self_train(labeled, unlabeled, &cfg.self_train, &learner)?;
        let eval = evaluate(&out.model, test, &classes)?;
        Ok(SweepPoint {
            divisor,
            hidden_size: default_hidden_size(attributes, num_classes, divisor, variant.plus_one()),
            error_percent: 100.0 - 100.0 * eval.metrics.accuracy,
            variant,
        })
    };

    #[cfg(feature = "parallel")]
    let points = {
        use rayon::prelude::*;
        divisors.par_iter().map(run).collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let points = divisors.iter().map(run).collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { points })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    /// Train on the labeled rows only.
    Supervised,
    /// Wrap the learner in self-training over the unlabeled pool.
    SelfTrained,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareEntry {
    pub name: String,
    pub learner: AnyLearner,
    pub arm: Arm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub evaluation: Evaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub classes: BinaryClasses,
    pub rows: Vec<ComparisonRow>,
    pub note: String,
}

pub const ACCURACY_NOTE: &str = "accuracy = (a+d)/(a+b+c+d), the share of correct predictions";

impl ComparisonTable {
    pub fn header(&self) -> [String; 6] {
        let (p, n) = (&self.classes.positive, &self.classes.negative);
        [
            "Operator".into(),
            "Accuracy (%)".into(),
            format!("True {p} (%)"),
            format!("True {n} (%)"),
            format!("False {p} (%)"),
            format!("False {n} (%)"),
        ]
    }

    /// Percentages with two decimals: accuracy, then the true-positive,
    /// true-negative, false-positive and false-negative rates.
    pub fn cells(&self) -> Vec<[String; 6]> {
        self.rows
            .iter()
            .map(|r| {
                let m = &r.evaluation.metrics;
                [
                    r.name.clone(),
                    format!("{:.2}", 100.0 * m.accuracy),
                    m.true_positive_rate.percent(),
                    m.true_negative_rate.percent(),
                    m.false_positive_rate.percent(),
                    m.false_negative_rate.percent(),
                ]
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header().join(",");
        s.push('\n');
        for row in self.cells() {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut rows = vec![self.header()];
        rows.extend(self.cells());
        let widths: Vec<usize> = (0..6)
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut s = String::new();
        for r in &rows {
            let line: Vec<String> = r
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (cell, w))| {
                    if i == 0 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            s.push_str(line.join("  ").trim_end());
            s.push('\n');
        }
        s.push_str(&format!("\n{}\n", self.note));
        s
    }
}

/// Evaluate each entry on `test`, one row per entry in the given order.
pub fn compare(
    entries: &[CompareEntry],
    labeled: &ExampleSet,
    unlabeled: &ExampleSet,
    test: &ExampleSet,
    self_train_cfg: &SelfTrainConfig,
    positive_class: &str,
) -> Result<ComparisonTable> {
    if entries.is_empty() {
        return Err(Error::InvalidArgument("no learners to compare".into()));
    }
    check_sets(labeled, unlabeled, test)?;
    let classes = BinaryClasses::from_classes(labeled.class_names(), positive_class)?;
    let run = |e: &CompareEntry| -> Result<ComparisonRow> {
        let evaluation = match e.arm {
            Arm::Supervised => {
                let model = e.learner.fit(&TrainingData::from_example_set(labeled)?)?.model;
                evaluate(&model, test, &classes)?
            }
            Arm::SelfTrained => {
                let out = self_train(labeled, unlabeled, self_train_cfg, &e.learner)?;
                evaluate(&out.model, test, &classes)?
            }
        };
        Ok(ComparisonRow {
            name: e.name.clone(),
            evaluation,
        })
    };
    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        entries.par_iter().map(run).collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows = entries.iter().map(run).collect::<Result<Vec<_>>>()?;
    Ok(ComparisonTable {
        classes,
        rows,
        note: ACCURACY_NOTE.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pn() -> BinaryClasses {
        BinaryClasses::new("N", "P")
    }

    fn cm(a: u64, b: u64, c: u64, d: u64) -> ConfusionMatrix {
        ConfusionMatrix {
            a,
            b,
            c,
            d,
            classes: pn(),
        }
    }

    #[test]
    fn four_pairs_one_per_cell() {
        let m = confusion(&["P", "P", "N", "N"], &["P", "N", "N", "P"], &pn()).unwrap();
        assert_eq!((m.a, m.b, m.c, m.d), (1, 1, 1, 1));
    }

    #[test]
    fn perfect_predictions_are_diagonal() {
        let labels = ["P", "N", "N", "P", "P"];
        let m = confusion(&labels, &labels, &pn()).unwrap();
        assert_eq!((m.b, m.c), (0, 0));
        let r = metrics(&m).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.true_positive_rate, Rate::Value(1.0));
        assert_eq!(r.false_positive_rate, Rate::Value(0.0));
    }

    #[test]
    fn swapping_positive_reverses_cells() {
        let pred = ["P", "P", "N", "N", "P", "N", "N"];
        let act = ["P", "N", "N", "P", "P", "N", "N"];
        let m = confusion(&pred, &act, &pn()).unwrap();
        let s = confusion(&pred, &act, &pn().swapped()).unwrap();
        assert_eq!((s.a, s.b, s.c, s.d), (m.d, m.c, m.b, m.a));
    }

    #[test]
    fn confusion_errors() {
        assert!(confusion(&["P"], &["P", "N"], &pn()).is_err());
        assert!(confusion::<&str>(&[], &[], &pn()).is_err());
        assert!(matches!(confusion(&["Q"], &["P"], &pn()), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn hand_checked_rates() {
        let r = metrics(&cm(50, 10, 5, 35)).unwrap();
        assert_abs_diff_eq!(r.accuracy, 0.85, epsilon = 1e-12);
        assert_abs_diff_eq!(r.true_positive_rate.value().unwrap(), 0.875, epsilon = 1e-12);
        assert_abs_diff_eq!(r.false_positive_rate.value().unwrap(), 10.0 / 60.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.true_negative_rate.value().unwrap(), 50.0 / 60.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.false_negative_rate.value().unwrap(), 0.125, epsilon = 1e-12);
    }

    #[test]
    fn no_positives_leaves_positive_rates_undefined() {
        let r = metrics(&cm(3, 1, 0, 0)).unwrap();
        assert_eq!(r.true_positive_rate, Rate::Undefined);
        assert_eq!(r.false_negative_rate, Rate::Undefined);
        assert_eq!(r.true_negative_rate, Rate::Value(0.75));
        assert_eq!(r.accuracy, 0.75);
        assert!(metrics(&cm(0, 0, 0, 0)).is_err());
    }

    #[test]
    fn undefined_serializes_as_a_word() {
        let r = metrics(&cm(3, 1, 0, 0)).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains(r#""true_positive_rate":"undefined""#));
        assert!(!json.contains("NaN") && !json.contains("null"));
        assert_eq!(serde_json::from_str::<MetricsReport>(&json).unwrap(), r);
        assert_eq!(Rate::Undefined.percent(), "undefined");
        assert_eq!(Rate::Value(0.746_666).percent(), "74.67");
    }

    #[test]
    fn positive_class_selection() {
        let classes = vec!["Bad".to_string(), "Good".to_string()];
        let b = BinaryClasses::from_classes(&classes, "Good").unwrap();
        assert_eq!(b, BinaryClasses::new("Bad", "Good"));
        assert!(BinaryClasses::from_classes(&classes, "Ugly").is_err());
        assert!(BinaryClasses::from_classes(&classes[..1], "Bad").is_err());
    }

    #[test]
    fn table_columns_follow_accuracy_then_true_then_false() {
        let table = ComparisonTable {
            classes: BinaryClasses::new("Bad", "Good"),
            rows: vec![ComparisonRow {
                name: "Neural Net".into(),
                evaluation: Evaluation {
                    confusion: cm(50, 10, 5, 35),
                    metrics: metrics(&cm(50, 10, 5, 35)).unwrap(),
                },
            }],
            note: ACCURACY_NOTE.into(),
        };
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "Operator,Accuracy (%),True Good (%),True Bad (%),False Good (%),False Bad (%)"
        );
        assert_eq!(lines.next().unwrap(), "Neural Net,85.00,87.50,83.33,16.67,12.50");
        assert!(table.to_text().contains(ACCURACY_NOTE));
    }

    #[test]
    fn sweep_csv_layout() {
        let r = SweepResult {
            points: vec![SweepPoint {
                divisor: 4,
                hidden_size: 8,
                error_percent: 25.333_333,
                variant: FormulaVariant::Divided,
            }],
        };
        assert_eq!(
            r.to_csv(),
            "divisor,hidden_size,error_percent,formula_variant\n4,8,25.33,divided\n"
        );
    }
}
