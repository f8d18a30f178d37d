use osc_core::linalg;
use osc_core::matrix_io;
use osc_core::report::{self, dump_matrix, Experiment, ExperimentConfig, MatrixSelector, Outcome};
use osc_core::Error;

#[test]
fn cartan_example_reports_binomial_ranks() {
    let cfg = ExperimentConfig::from_json(r#"{"experiment":"cartan","dim2n":4,"seed":7,"samples":100}"#).unwrap();
    let r = report::run(&cfg).unwrap();
    assert_eq!(r.outcome(), Outcome::Pass);
    assert_eq!(r.exit_code(), 0);
    let e = r.entry("rank ext_k = C(2n-1, k)").unwrap();
    assert_eq!(e.detail.as_ref().unwrap()["expected_ranks"], serde_json::json!([1, 3, 3, 1]));
}

#[test]
fn cohomology_example_reports_torus_ranks() {
    let cfg = ExperimentConfig::from_json(
        r#"{"experiment":"cohomology","dim2n":2,"fourier_cutoff":2,"hermite_cutoff":2,"seed":1,"connection":{"kind":"trivial"}}"#,
    )
    .unwrap();
    let r = report::run(&cfg).unwrap();
    assert!(r.overall_pass(), "{}", r.body_json());
    let ranks = &r.entry("harmonic spaces are A-submodules").unwrap().detail.as_ref().unwrap()["a_ranks"];
    assert_eq!(ranks, &serde_json::json!([1, 2, 1]));
}

#[test]
fn axioms_example_passes() {
    let cfg = ExperimentConfig::from_json(r#"{"experiment":"axioms","dim2n":2,"hermite_cutoff":4,"seed":1}"#).unwrap();
    let r = report::run(&cfg).unwrap();
    assert!(r.overall_pass());
    for e in r.entries() {
        assert!(e.value < 1e-10, "{}: {}", e.name, e.value);
    }
}

#[test]
fn every_experiment_runs_and_round_trips() {
    for e in Experiment::ALL {
        let mut cfg = ExperimentConfig::new(e, 42);
        cfg.samples = 10;
        cfg.grid = 3;
        let r = report::run(&cfg).unwrap();
        assert!(r.overall_pass(), "{e}: {}", r.body_json());
        assert!(r.entries().iter().all(|x| !x.anchor.is_empty()));
        let back = report::Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back.body_json(), r.body_json());
        assert!(!r.body_json().contains("duration_seconds"));
        assert!(r.to_json().contains("duration_seconds"));
    }
}

#[test]
fn catalog_has_seven_anchored_entries() {
    let a = report::list_experiments();
    assert_eq!(a.len(), 7);
    assert!(a.iter().all(|e| !e.anchor.is_empty() && !e.description.is_empty()));
    assert_eq!(a, report::list_experiments());
}

#[test]
fn dumped_laplacian_round_trips_and_is_hermitian() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("laplacian1.json");
    let mut cfg = ExperimentConfig::new(Experiment::Cohomology, 3);
    cfg.fourier_cutoff = 1;
    cfg.hermite_cutoff = 2;
    dump_matrix(&cfg, MatrixSelector::Laplacian(1), &path).unwrap();
    let m = matrix_io::read_matrix(&path).unwrap();
    let again = dir.path().join("again.json");
    matrix_io::write_matrix(&again, &m).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    assert_eq!(matrix_io::read_matrix(&again).unwrap(), m);
    // identity metric, t = 0: the Gram form is the identity so Δ is hermitian as a matrix
    assert!(linalg::hermitian_defect(&m) < 1e-10 * m.norm());
}

#[test]
fn dump_of_unbuilt_degree_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::new(Experiment::Cohomology, 3);
    let err = dump_matrix(&cfg, MatrixSelector::D(7), &dir.path().join("x.json")).unwrap_err();
    assert!(matches!(err, Error::DegreeOutOfRange { .. }), "{err}");
}

#[test]
fn dump_gram_is_positive_diagonal_for_identity_metric() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let mut cfg = ExperimentConfig::new(Experiment::Cohomology, 3);
    cfg.fourier_cutoff = 1;
    cfg.sobolev_index = 1;
    dump_matrix(&cfg, MatrixSelector::Gram(0), &path).unwrap();
    let g = matrix_io::read_matrix(&path).unwrap();
    assert!((0..g.nrows()).all(|i| g[(i, i)].re >= 1.0));
}

#[test]
fn seed_changes_body_but_not_verdict() {
    let a = report::run(&ExperimentConfig::new(Experiment::Oscillator, 1)).unwrap();
    let b = report::run(&ExperimentConfig::new(Experiment::Oscillator, 2)).unwrap();
    assert_ne!(a.body_json(), b.body_json());
    assert_eq!(a.outcome(), b.outcome());
}

fn schema(name: &str) -> serde_json::Value {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn keys(v: &serde_json::Value) -> Vec<String> {
    let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
    k.sort();
    k
}

#[test]
fn config_schema_matches_serialised_config() {
    let schema = schema("config.schema.json");
    let cfg = ExperimentConfig::new(Experiment::Cartan, 1);
    let value = serde_json::to_value(&cfg).unwrap();
    assert_eq!(keys(&schema["properties"]), keys(&value));
    for key in ["dim2n", "fourier_cutoff", "hermite_cutoff", "samples", "sobolev_index", "grid", "schema_version"] {
        assert_eq!(schema["properties"][key]["default"], value[key], "{key}");
    }
    let tol = &schema["properties"]["tolerances"]["properties"];
    assert_eq!(keys(tol), keys(&value["tolerances"]));
    for key in keys(tol) {
        assert_eq!(tol[&key]["default"], value["tolerances"][&key], "{key}");
    }
    let names: Vec<_> = report::list_experiments().iter().map(|e| serde_json::json!(e.name)).collect();
    assert_eq!(schema["properties"]["experiment"]["enum"], serde_json::json!(names));
}

#[test]
fn report_and_matrix_schemas_match_serialisation() {
    let r = report::run(&ExperimentConfig::new(Experiment::Symbol, 1)).unwrap();
    let value: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    let report_schema = schema("report.schema.json");
    assert_eq!(keys(&report_schema["properties"]), keys(&value));
    let entry_props = keys(&report_schema["properties"]["entries"]["items"]["properties"]);
    for e in value["entries"].as_array().unwrap() {
        assert!(keys(e).iter().all(|k| entry_props.contains(k)));
    }
    let m = matrix_io::to_json(&linalg::CMatrix::identity(2, 2)).unwrap();
    let mv: serde_json::Value = serde_json::from_str(&m).unwrap();
    assert_eq!(keys(&schema("matrix.schema.json")["properties"]), keys(&mv));
}

#[test]
fn shipped_configs_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        ExperimentConfig::from_json(&std::fs::read_to_string(&path).unwrap())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 7);
}
