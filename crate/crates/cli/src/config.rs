use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    Mlp,
    Knn,
    Nb,
}

impl LearnerKind {
    fn key(self) -> &'static str {
        match self {
            LearnerKind::Mlp => "mlp",
            LearnerKind::Knn => "knn",
            LearnerKind::Nb => "nb",
        }
    }

    fn title(self) -> &'static str {
        match self {
            LearnerKind::Mlp => "Neural Net",
            LearnerKind::Knn => "KNN",
            LearnerKind::Nb => "Naive Bayes",
        }
    }
}

/// One row of a comparison: `mlp`, `knn`, `nb`, or the same with an `ssl-`
/// prefix for the self-trained variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ArmSpec {
    pub kind: LearnerKind,
    pub self_trained: bool,
}

impl ArmSpec {
    pub fn title(self) -> String {
        if self.self_trained {
            format!("Self-trained {}", self.kind.title())
        } else {
            self.kind.title().to_owned()
        }
    }
}

impl FromStr for ArmSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (self_trained, rest) = match s.strip_prefix("ssl-") {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let kind = LearnerKind::from_str(rest, true)
            .map_err(|_| format!("unknown learner `{s}` (expected mlp, knn, nb, optionally prefixed with ssl-)"))?;
        Ok(ArmSpec { kind, self_trained })
    }
}

impl fmt::Display for ArmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.self_trained {
            f.write_str("ssl-")?;
        }
        f.write_str(self.kind.key())
    }
}

impl TryFrom<String> for ArmSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<ArmSpec> for String {
    fn from(a: ArmSpec) -> String {
        a.to_string()
    }
}

/// Everything a run depends on. Written back out as `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    /// Input CSV; when absent a synthetic set is generated.
    pub data: Option<PathBuf>,
    pub label_column: String,
    pub synth_rows: usize,
    pub synth_features: usize,
    pub synth_separation: f64,
    pub synth_seed: u64,
    pub test_fraction: f64,
    pub split_seed: u64,
    /// Training rows that keep their label; the rest form the unlabeled pool.
    /// Absent means every training row is labeled.
    pub labeled_count: Option<usize>,
    /// Defaults to the second class of the label vocabulary.
    pub positive_class: Option<String>,
    pub learner: LearnerKind,
    pub k: usize,
    pub hidden_divisor: usize,
    pub hidden_plus_one: bool,
    pub hidden_sizes: Option<Vec<usize>>,
    pub training_cycles: usize,
    pub learning_rate: f64,
    pub error_epsilon: f64,
    pub momentum: f64,
    pub shuffle_seed: u64,
    pub init_seed: u64,
    pub confidence_threshold: f64,
    pub max_iterations: usize,
    pub divisors: Vec<usize>,
    pub both_variants: bool,
    pub learners: Vec<ArmSpec>,
    pub model: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: String::new(),
            data: None,
            label_column: "class".into(),
            synth_rows: 1000,
            synth_features: 31,
            synth_separation: 0.35,
            synth_seed: 0,
            test_fraction: 0.3,
            split_seed: 0,
            labeled_count: None,
            positive_class: None,
            learner: LearnerKind::Mlp,
            k: 5,
            hidden_divisor: 4,
            hidden_plus_one: false,
            hidden_sizes: None,
            training_cycles: 500,
            learning_rate: 0.3,
            error_epsilon: 1e-5,
            momentum: 0.0,
            shuffle_seed: 0,
            init_seed: 0,
            confidence_threshold: 0.8,
            max_iterations: 10,
            divisors: (1..=6).collect(),
            both_variants: false,
            learners: ["mlp", "knn", "nb"].iter().map(|s| s.parse().unwrap()).collect(),
            model: None,
            test: None,
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// TOML, or JSON when the file name ends in `.json` (a saved `run.json`).
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| {
            let first = e.lines().find(|l| !l.trim().is_empty()).unwrap_or("").trim().to_owned();
            Failure::Validation(format!("bad config {}: {first}", path.display()))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }
}

fn set<T>(slot: &mut T, flag: &Option<T>)
where
    T: Clone,
{
    if let Some(v) = flag {
        *slot = v.clone();
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML config file or a saved run.json; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub features: Option<usize>,
    /// Distance between the class means along every coordinate.
    #[arg(long)]
    pub separation: Option<f64>,
    #[arg(long)]
    pub synth_seed: Option<u64>,
}

impl SynthArgs {
    pub fn apply(&self, c: &mut RunConfig) {
        set(&mut c.synth_rows, &self.rows);
        set(&mut c.synth_features, &self.features);
        set(&mut c.synth_separation, &self.separation);
        set(&mut c.synth_seed, &self.synth_seed);
    }
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Input CSV (header row required). Omit to use synthetic data.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub label_column: Option<String>,
    #[command(flatten)]
    pub synth: SynthArgs,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    #[arg(long)]
    pub split_seed: Option<u64>,
    #[arg(long)]
    pub labeled_count: Option<usize>,
    #[arg(long)]
    pub positive_class: Option<String>,
}

impl DataArgs {
    pub fn apply(&self, c: &mut RunConfig) {
        if self.data.is_some() {
            c.data = self.data.clone();
        }
        set(&mut c.label_column, &self.label_column);
        self.synth.apply(c);
        set(&mut c.test_fraction, &self.test_fraction);
        set(&mut c.split_seed, &self.split_seed);
        if self.labeled_count.is_some() {
            c.labeled_count = self.labeled_count;
        }
        if self.positive_class.is_some() {
            c.positive_class = self.positive_class.clone();
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub training_cycles: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub error_epsilon: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    #[arg(long)]
    pub shuffle_seed: Option<u64>,
    #[arg(long)]
    pub init_seed: Option<u64>,
}

impl TrainArgs {
    pub fn apply(&self, c: &mut RunConfig) {
        set(&mut c.training_cycles, &self.training_cycles);
        set(&mut c.learning_rate, &self.learning_rate);
        set(&mut c.error_epsilon, &self.error_epsilon);
        set(&mut c.momentum, &self.momentum);
        set(&mut c.shuffle_seed, &self.shuffle_seed);
        set(&mut c.init_seed, &self.init_seed);
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub learner: Option<LearnerKind>,
    /// Neighbours for knn.
    #[arg(long)]
    pub k: Option<usize>,
    /// X in (attributes + classes) / X.
    #[arg(long)]
    pub hidden_divisor: Option<usize>,
    /// Add one hidden unit to the divisor rule.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub hidden_plus_one: Option<bool>,
    /// Explicit hidden layer sizes, e.g. 8 or 6,4; overrides the divisor rule.
    #[arg(long, value_delimiter = ',')]
    pub hidden_sizes: Option<Vec<usize>>,
    #[command(flatten)]
    pub train: TrainArgs,
}

impl ModelArgs {
    pub fn apply(&self, c: &mut RunConfig) {
        set(&mut c.learner, &self.learner);
        set(&mut c.k, &self.k);
        set(&mut c.hidden_divisor, &self.hidden_divisor);
        set(&mut c.hidden_plus_one, &self.hidden_plus_one);
        if self.hidden_sizes.is_some() {
            c.hidden_sizes = self.hidden_sizes.clone();
        }
        self.train.apply(c);
    }
}

#[derive(Debug, Args)]
pub struct SslArgs {
    /// Minimum top confidence for a pool point to be absorbed (capped at 1).
    #[arg(long)]
    pub confidence_threshold: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
}

impl SslArgs {
    pub fn apply(&self, c: &mut RunConfig) {
        set(&mut c.confidence_threshold, &self.confidence_threshold);
        set(&mut c.max_iterations, &self.max_iterations);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arm_names_round_trip() {
        for s in ["mlp", "knn", "nb", "ssl-mlp", "ssl-knn", "ssl-nb"] {
            assert_eq!(s.parse::<ArmSpec>().unwrap().to_string(), s);
        }
        assert!("svm".parse::<ArmSpec>().is_err());
        assert_eq!("ssl-nb".parse::<ArmSpec>().unwrap().title(), "Self-trained Naive Bayes");
    }

    #[test]
    fn partial_toml_keeps_defaults() {
        let c: RunConfig = toml::from_str("training_cycles = 20\nlearners = [\"mlp\", \"ssl-knn\"]\n").unwrap();
        assert_eq!(c.training_cycles, 20);
        assert_eq!(c.learning_rate, 0.3);
        assert_eq!(c.learners[1].to_string(), "ssl-knn");
        assert!(toml::from_str::<RunConfig>("no_such_key = 1").is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = RunConfig {
            labeled_count: Some(216),
            hidden_sizes: Some(vec![3, 2]),
            ..RunConfig::default()
        };
        let back: RunConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }
}
