//! `semisup`: generate or load data, train the network alone or inside the
//! self-training loop, and write models, logs and reports as files.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ArmSpec, DataArgs, ModelArgs, RunArgs, RunConfig, SslArgs, SynthArgs, TrainArgs};

#[derive(Debug, Parser)]
#[command(name = "semisup", version, about = "Self-training neural network classifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a two-class Gaussian dataset to data.csv.
    Synth {
        #[command(flatten)]
        synth: SynthArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Partition the data into test / labeled / unlabeled and write the parts.
    Split {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Supervised training on the labeled rows.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Self-training on the labeled rows plus the unlabeled pool.
    Selftrain {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        ssl: SslArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Score a saved model on a labeled CSV.
    Evaluate {
        /// model.json written by train or selftrain.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Labeled CSV in the raw (unpreprocessed) form.
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long)]
        positive_class: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Test error of the self-trained network per hidden-layer divisor.
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        ssl: SslArgs,
        #[arg(long, value_delimiter = ',')]
        divisors: Option<Vec<usize>>,
        /// Run both (attributes + classes) / X and the same plus one.
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        both_variants: Option<bool>,
        /// Use the plus-one variant when not running both.
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        hidden_plus_one: Option<bool>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Accuracy and class rates for several learners on the same split.
    Compare {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        ssl: SslArgs,
        /// Comma-separated: mlp, knn, nb, ssl-mlp, ssl-knn, ssl-nb.
        #[arg(long, value_delimiter = ',')]
        learners: Option<Vec<ArmSpec>>,
        #[command(flatten)]
        run: RunArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Synth { .. } => "synth",
            Command::Split { .. } => "split",
            Command::Train { .. } => "train",
            Command::Selftrain { .. } => "selftrain",
            Command::Evaluate { .. } => "evaluate",
            Command::Sweep { .. } => "sweep",
            Command::Compare { .. } => "compare",
        }
    }

    fn run_args(&self) -> &RunArgs {
        match self {
            Command::Synth { run, .. }
            | Command::Split { run, .. }
            | Command::Train { run, .. }
            | Command::Selftrain { run, .. }
            | Command::Evaluate { run, .. }
            | Command::Sweep { run, .. }
            | Command::Compare { run, .. } => run,
        }
    }

    /// Defaults, then the config file, then flags.
    fn resolve(&self) -> Result<RunConfig, Failure> {
        let run = self.run_args();
        let mut c = match &run.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if !c.command.is_empty() && c.command != self.name() {
            return Err(Failure::Validation(format!(
                "config was written by `{}`, not `{}`",
                c.command,
                self.name()
            )));
        }
        c.command = self.name().into();
        if let Some(out) = &run.out {
            c.out = out.clone();
        }
        match self {
            Command::Synth { synth, .. } => synth.apply(&mut c),
            Command::Split { data, .. } => data.apply(&mut c),
            Command::Train { data, model, .. } => {
                data.apply(&mut c);
                model.apply(&mut c);
            }
            Command::Selftrain { data, model, ssl, .. } => {
                data.apply(&mut c);
                model.apply(&mut c);
                ssl.apply(&mut c);
            }
            Command::Evaluate {
                model,
                test,
                positive_class,
                ..
            } => {
                if model.is_some() {
                    c.model = model.clone();
                }
                if test.is_some() {
                    c.test = test.clone();
                }
                if positive_class.is_some() {
                    c.positive_class = positive_class.clone();
                }
            }
            Command::Sweep {
                data,
                train,
                ssl,
                divisors,
                both_variants,
                hidden_plus_one,
                ..
            } => {
                data.apply(&mut c);
                train.apply(&mut c);
                ssl.apply(&mut c);
                if let Some(d) = divisors {
                    c.divisors = d.clone();
                }
                if let Some(b) = both_variants {
                    c.both_variants = *b;
                }
                if let Some(p) = hidden_plus_one {
                    c.hidden_plus_one = *p;
                }
            }
            Command::Compare {
                data,
                model,
                ssl,
                learners,
                ..
            } => {
                data.apply(&mut c);
                model.apply(&mut c);
                ssl.apply(&mut c);
                if let Some(l) = learners {
                    c.learners = l.clone();
                }
            }
        }
        check_paths(&c)?;
        Ok(c)
    }
}

fn check_paths(c: &RunConfig) -> Result<(), Failure> {
    let inputs: Vec<(&str, &Option<PathBuf>)> = match c.command.as_str() {
        "synth" => vec![],
        "evaluate" => vec![("--model", &c.model), ("--test", &c.test)],
        _ => vec![("--data", &c.data)],
    };
    for (flag, path) in inputs {
        match path {
            Some(p) if !p.is_file() => {
                return Err(Failure::Validation(format!("{flag}: no such file {}", p.display())))
            }
            None if flag != "--data" => return Err(Failure::Validation(format!("{flag} is required"))),
            _ => {}
        }
    }
    Ok(())
}

/// Exit status 1 for bad input or configuration, 2 for failures during the run.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<semisup_core::Error> for Failure {
    fn from(e: semisup_core::Error) -> Self {
        if e.is_runtime() {
            Failure::Runtime(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

/// Files produced by a command, held in memory until the run has succeeded.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: &str, contents: impl Into<Vec<u8>>) {
        self.files.push((name.to_owned(), contents.into()));
    }

    /// Write every file; on the first failure remove the ones already written.
    fn commit(&self, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
        let created_dir = !dir.exists();
        let fail = |written: &[PathBuf], msg: String| {
            for p in written {
                let _ = std::fs::remove_file(p);
            }
            if created_dir {
                let _ = std::fs::remove_dir(dir);
            }
            Failure::Runtime(msg)
        };
        if let Err(e) = std::fs::create_dir_all(dir) {
            return Err(fail(&[], format!("cannot create {}: {e}", dir.display())));
        }
        let mut written = Vec::new();
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            if let Err(e) = std::fs::write(&path, bytes) {
                return Err(fail(&written, format!("cannot write {}: {e}", path.display())));
            }
            written.push(path);
        }
        Ok(written)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = cli.command.resolve()?;
    let mut out = commands::execute(&cfg)?;
    out.add("run.json", cfg.to_json());
    for path in out.commit(&cfg.out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn one_line(s: &str) -> String {
    s.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("; ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("semisup: error: {}", first.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("semisup: error: {}", one_line(f.message()));
            ExitCode::from(f.code())
        }
    }
}
