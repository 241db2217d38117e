use t2v_neural::gradcheck::{grad_check, tiny_config};
use t2v_neural::Combiner;

#[test]
fn every_tensor_matches_finite_differences() {
    for seed in 1..=8 {
        let report = grad_check(&tiny_config(seed), 1e-4).unwrap();
        let worst = report.worst().unwrap();
        eprintln!("seed {seed}: worst {} {:.2e}", worst.name, worst.max_rel_error);
        assert!(report.passed, "seed {seed}: {worst:?}");
    }
}

#[test]
fn mean_combiner_gradients_match() {
    for seed in 1..=4 {
        let mut config = tiny_config(seed);
        config.combiner = Combiner::Mean;
        let report = grad_check(&config, 1e-4).unwrap();
        assert!(report.passed, "seed {seed}: {:?}", report.worst());
    }
}

#[test]
fn report_covers_every_parameter_tensor() {
    let config = tiny_config(1);
    let report = grad_check(&config, 1e-4).unwrap();
    let model = t2v_neural::Model::<f64>::new(config).unwrap();
    let names: Vec<&str> = report.tensors.iter().map(|t| t.name.as_str()).collect();
    assert_eq!(names, model.params().names().iter().map(String::as_str).collect::<Vec<_>>());
}
