use radius_lab::harness::{run_sweep, GeneratorTemplate, SweepConfig};

fn config(threads: usize) -> SweepConfig {
    SweepConfig {
        seed: 42,
        threads: Some(threads),
        generators: vec![
            GeneratorTemplate::random("ginibre", 2..=4, 6),
            GeneratorTemplate::random("normal", [3], 3),
            GeneratorTemplate::named("ex_2_11"),
        ],
        ..SweepConfig::default()
    }
}

#[test]
fn report_does_not_depend_on_worker_count() {
    let mut one = run_sweep(&config(1)).unwrap();
    let mut four = run_sweep(&config(4)).unwrap();
    one.config.threads = None;
    four.config.threads = None;
    assert_eq!(one.to_json(), four.to_json());
    assert_eq!(one.samples, 10);
}

#[test]
fn counts_add_up_per_bound() {
    let report = run_sweep(&config(2)).unwrap();
    for b in &report.bounds {
        assert_eq!(b.passed + b.failed + b.not_applicable, b.evaluated, "{}", b.label);
    }
    assert!(report.violations.is_empty());
}

#[test]
fn tight_bound_on_named_fixture() {
    let config = SweepConfig {
        generators: vec![GeneratorTemplate::named("ex_2_11")],
        ..SweepConfig::default()
    };
    let report = run_sweep(&config).unwrap();
    let thm29 = report.summary("thm29").unwrap();
    assert!(thm29.worst_slack.unwrap().abs() <= 1e-8);
}

#[test]
fn empty_generator_list_is_a_clean_report() {
    let config = SweepConfig {
        generators: Vec::new(),
        ..SweepConfig::default()
    };
    let report = run_sweep(&config).unwrap();
    assert_eq!(report.samples, 0);
    assert!(report.bounds.iter().all(|b| b.evaluated == 0));
    assert!(report.violations.is_empty());
}

#[test]
fn unknown_bound_ids_are_rejected_at_parse() {
    assert!(SweepConfig::from_json(r#"{"bounds": ["thm99"]}"#).is_err());
    assert!(SweepConfig::from_json(r#"{"bogus": 1}"#).is_err());
    assert!(SweepConfig::from_json(r#"{"bounds": ["thm29", "zou"], "generators": []}"#).is_ok());
}
