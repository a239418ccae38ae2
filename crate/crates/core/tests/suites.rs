use prodherz::norms::ExponentParams;
use prodherz::verify::{InequalityReport, Status, Suite, SuiteRun, SUITE_NAMES};
use prodherz::{make_grid, Error};

fn small(name: &str) -> Suite {
    let trials = match name {
        "char_norms" | "john_nirenberg_bmo" => serde_json::json!({ "suite": name }),
        "fefferman_stein" => serde_json::json!({ "suite": name, "trials": 1, "family_size": 2 }),
        _ => serde_json::json!({ "suite": name, "trials": 2 }),
    };
    serde_json::from_value(trials).unwrap()
}

fn run(name: &str, prm: ExponentParams) -> InequalityReport {
    let grid = make_grid(5, 1).unwrap();
    let run = SuiteRun::new(grid, prm, small(name));
    run.validate().unwrap();
    run.run().unwrap()
}

#[test]
fn every_suite_reruns_from_its_own_parameter_block() {
    let prm = ExponentParams::new(0.25, 2.0, 2.0, 0.5).unwrap();
    for name in SUITE_NAMES {
        let rep = run(name, prm);
        assert_eq!(rep.claim, name);
        assert!(!rep.trials.is_empty(), "{name}");
        assert!(rep.trials.iter().enumerate().all(|(i, t)| t.id == i), "{name}: trial ids in order");
        let again = rep.parameters.run().unwrap();
        assert_eq!(again.to_json(), rep.to_json(), "{name}");
        let parsed = InequalityReport::from_json(&rep.to_json()).unwrap();
        assert_eq!(parsed.parameters.run().unwrap().to_json(), rep.to_json(), "{name}");
    }
}

#[test]
fn thread_count_does_not_change_reports() {
    let prm = ExponentParams::new(0.25, 2.0, 2.0, 0.5).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    for name in ["maximal_bounds", "extrapolation", "cz_comm"] {
        let serial = one.install(|| run(name, prm));
        assert_eq!(serial.to_json(), run(name, prm).to_json(), "{name}");
    }
}

#[test]
fn hypothesis_violations_never_pass() {
    // alpha outside the maximal-operator range, with the characteristic predicate intact
    let outside = ExponentParams::new(0.75, 2.0, 2.0, 0.5).unwrap();
    for name in ["maximal_bounds", "fefferman_stein", "cz_comm"] {
        let rep = run(name, outside);
        assert_eq!(rep.status, Status::OutOfHypothesis, "{name}");
        assert!(rep.notes.iter().any(|n| n.contains("pred_ms_herz")), "{name}");
    }
}

#[test]
fn required_predicates_are_checked_before_compute() {
    let grid = make_grid(2, 2).unwrap();
    let bad = ExponentParams::new(-0.6, 2.0, 2.0, 0.5).unwrap();
    for name in ["char_norms", "norm_duality", "fefferman_stein", "john_nirenberg_bmo", "cz_comm"] {
        let r = SuiteRun::new(grid, bad, Suite::default_for(name).unwrap());
        assert!(matches!(r.validate(), Err(Error::Predicate { name: "pred_char", .. })), "{name}");
    }
    let r = SuiteRun::new(grid, ExponentParams::new(0.25, 2.0, 2.0, 0.5).unwrap(), small("extrapolation"));
    let mut v = serde_json::to_value(&r).unwrap();
    v["p0"] = serde_json::json!(2.0);
    let r: SuiteRun = serde_json::from_value(v).unwrap();
    assert!(matches!(r.validate(), Err(Error::Parameter(_))));
}
