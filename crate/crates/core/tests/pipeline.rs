use semisup_core::baselines::{KnnLearner, NaiveBayesLearner};
use semisup_core::dataset::{
    generate_synthetic, load_csv, split_labeled_unlabeled, split_random, ExampleSet, Role, SplitSpec,
};
use semisup_core::eval::{evaluate, BinaryClasses};
use semisup_core::learner::{AnyModel, Learner, TrainingData};
use semisup_core::mlp::{MlpLearner, TrainConfig};
use semisup_core::preprocess::Preprocessor;
use semisup_core::ssl::{co_train, self_train, SelfTrainConfig, ViewSplit};

fn yes_no() -> BinaryClasses {
    BinaryClasses::new("no", "yes")
}

fn prepared(n: usize, d: usize, sep: f64, seed: u64) -> (ExampleSet, ExampleSet) {
    let set = generate_synthetic(n, d, sep, seed).unwrap();
    let (train, test) = split_random(&set, SplitSpec::new(0.3, seed).unwrap()).unwrap();
    let pre = Preprocessor::fit(&train).unwrap();
    (pre.apply(&train).unwrap(), pre.apply(&test).unwrap())
}

fn accuracy<L: Learner>(learner: &L, train: &ExampleSet, test: &ExampleSet) -> f64 {
    let model = learner
        .fit(&TrainingData::from_example_set(train).unwrap())
        .unwrap()
        .model;
    evaluate(&model, test, &yes_no()).unwrap().metrics.accuracy
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[m - 1] + v[m]) / 2.0
    } else {
        v[m]
    }
}

#[test]
fn well_separated_blobs_are_learned() {
    let (train, test) = prepared(200, 2, 6.0, 3);
    let learner = MlpLearner::default();
    assert!(accuracy(&learner, &train, &train) >= 0.95);
    assert!(accuracy(&learner, &train, &test) >= 0.95);
}

#[test]
fn csv_round_trip_feeds_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("blobs.csv");
    generate_synthetic(120, 3, 5.0, 9).unwrap().write_csv(&path).unwrap();
    let set = load_csv(&path, "class").unwrap();
    let (train, test) = split_random(&set, SplitSpec::default()).unwrap();
    let pre = Preprocessor::fit(&train).unwrap();
    let (train, test) = (pre.apply(&train).unwrap(), pre.apply(&test).unwrap());
    assert!(accuracy(&NaiveBayesLearner::default(), &train, &test) >= 0.9);
}

#[test]
fn training_is_reproducible() {
    let (train, _) = prepared(100, 4, 1.0, 5);
    let data = TrainingData::from_example_set(&train).unwrap();
    let learner = MlpLearner {
        train: TrainConfig {
            training_cycles: 50,
            shuffle_seed: 11,
            ..TrainConfig::default()
        },
        init_seed: 4,
        ..MlpLearner::default()
    };
    let (a, ha) = learner.fit_with_history(&data).unwrap();
    let (b, hb) = learner.fit_with_history(&data).unwrap();
    assert_eq!(a, b);
    assert_eq!(ha, hb);
    let json_a = AnyModel::Mlp(a).to_json().unwrap();
    assert_eq!(json_a, AnyModel::Mlp(b).to_json().unwrap());
}

#[test]
fn self_training_does_not_hurt_on_easy_data() {
    let cfg = SelfTrainConfig::default();
    let results: Vec<(f64, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..10u64)
            .map(|seed| {
                let cfg = &cfg;
                s.spawn(move || {
                    let (train, test) = prepared(1000, 31, 2.0, seed);
                    let split = split_labeled_unlabeled(&train, 140, seed).unwrap();
                    let learner = MlpLearner {
                        train: TrainConfig {
                            training_cycles: 100,
                            shuffle_seed: seed,
                            ..TrainConfig::default()
                        },
                        init_seed: seed,
                        ..MlpLearner::default()
                    };
                    let sup = accuracy(&learner, &split.labeled, &test);
                    let out = self_train(&split.labeled, &split.unlabeled, cfg, &learner).unwrap();
                    let ssl = evaluate(&out.model, &test, &yes_no()).unwrap().metrics.accuracy;
                    (sup, ssl)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let sup = median(results.iter().map(|r| r.0).collect());
    let ssl = median(results.iter().map(|r| r.1).collect());
    assert!(ssl >= sup - 0.01, "supervised {sup}, self-trained {ssl}");
}

#[test]
fn co_training_on_redundant_halves_matches_one_view() {
    let (train, test) = prepared(600, 8, 1.5, 2);
    let split = split_labeled_unlabeled(&train, 60, 2).unwrap();
    let views = ViewSplit::halves(8).unwrap();
    let nb = NaiveBayesLearner::default();
    let out = co_train(
        &split.labeled,
        &split.unlabeled,
        &views,
        &SelfTrainConfig::default(),
        &nb,
        &nb,
    )
    .unwrap();
    let co = evaluate(&out.combined, &test, &yes_no()).unwrap().metrics.accuracy;

    // single view: the second half of the features demoted to ids
    let half = |set: &ExampleSet| {
        set.schema()[4..8]
            .iter()
            .fold(set.clone(), |s, a| s.set_role(&a.name, Role::Id).unwrap())
    };
    let single = accuracy(&nb, &half(&split.labeled), &half(&test));
    assert!(
        (co - single).abs() <= 0.05 || co > single,
        "co {co}, single view {single}"
    );
}

#[test]
fn knn_and_bayes_separate_blobs() {
    let (train, test) = prepared(300, 2, 6.0, 8);
    assert!(accuracy(&KnnLearner::default(), &train, &test) > 0.95);
    assert!(accuracy(&NaiveBayesLearner::default(), &train, &test) > 0.95);
}
