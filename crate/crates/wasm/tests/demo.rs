use semisup_wasm::{confusion_rates, divisor_sweep, self_training_demo};

#[test]
fn demo_reports_both_surfaces_and_every_point() {
    let demo = self_training_demo(120, 2.0, 8, 0.8, 40, 3, 11).unwrap();
    assert_eq!(demo.points.len(), 120);
    assert_eq!(demo.points.iter().filter(|p| p.role == "labeled").count(), 8);
    assert_eq!(demo.points.iter().filter(|p| p.role == "test").count(), 36);
    for s in [&demo.supervised, &demo.self_trained] {
        assert_eq!(s.values.len(), 121);
        assert!(s.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }
    let absorbed = demo.points.iter().filter(|p| p.absorbed_as.is_some()).count();
    assert_eq!(absorbed, demo.log.total_added());
    assert!(demo
        .points
        .iter()
        .all(|p| p.absorbed_as.is_none() || p.role == "unlabeled"));
    assert!((0.0..=1.0).contains(&demo.self_trained_accuracy));

    let json = serde_json::to_string(&demo).unwrap();
    assert!(json.contains("\"absorbed_in\""));
}

#[test]
fn demo_rejects_bad_input() {
    assert!(self_training_demo(120, 2.0, 0, 0.8, 40, 3, 11).is_err());
    assert!(self_training_demo(120, 2.0, 8, 0.8, 40, 3, 1).is_err());
    assert!(self_training_demo(120, 2.0, 8, 0.0, 40, 3, 11).is_err());
}

#[test]
fn sweep_covers_both_variants() {
    let points = divisor_sweep(80, 6, 1.5, 20, 10, 1).unwrap();
    assert_eq!(points.len(), 12);
    let sizes: Vec<usize> = points.iter().map(|p| p.hidden_size).collect();
    assert_eq!(sizes, [8, 4, 2, 2, 1, 1, 9, 5, 3, 3, 2, 2]);
}

#[test]
fn rates_from_cells() {
    let r = confusion_rates(50, 10, 5, 35).unwrap();
    assert_eq!(r.percent, ["85.00", "87.50", "16.67", "83.33", "12.50"]);
    let r = confusion_rates(4, 1, 0, 0).unwrap();
    assert_eq!(r.percent[1], "undefined");
    assert!(confusion_rates(0, 0, 0, 0).is_err());
}
