use std::fs;
use std::path::Path;

use hwave_core::experiment_harness::{
    classify_cell, emit_report, fit_power_law, lifespan_experiment, run_sweep, summary_json,
    CellClass, ExperimentKind, LifespanSpec, PhaseSettings, RecordStore, Resolution, Status,
    SweepManifest, DEFAULT_EPS, SUMMARY_SCHEMA,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn schema_errors(doc: &Value) -> Vec<String> {
    let schema: Value = serde_json::from_str(SUMMARY_SCHEMA).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    v.iter_errors(doc).map(|e| e.to_string()).collect()
}

fn functional_manifest(out: &Path) -> SweepManifest {
    let mut m = SweepManifest::new(ExperimentKind::BlowupFunctional, 4);
    m.gamma = vec![0.5, 1.0];
    m.radii = vec![10.0, 30.0];
    m.out_dir = Some(out.to_path_buf());
    m
}

#[test]
fn manifests_load_from_toml_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let toml_path = dir.path().join("m.toml");
    fs::write(
        &toml_path,
        "kind = \"lifespan\"\nq = 4\ngamma = [0.5]\np = [1.5]\neps = [1.0, 0.5, 0.25, 0.12]\n\n[resolution]\nc0 = 0.03\n",
    )
    .unwrap();
    let m = SweepManifest::load(&toml_path).unwrap();
    assert_eq!(m.kind, ExperimentKind::Lifespan);
    assert_eq!(m.resolution.c0, 0.03);
    assert_eq!(m.resolution.k_max, Resolution::default().k_max);

    let json_path = dir.path().join("m.json");
    fs::write(&json_path, serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(SweepManifest::load(&json_path).unwrap(), m);

    let other = dir.path().join("m.yaml");
    fs::write(&other, "kind: gn").unwrap();
    assert!(SweepManifest::load(&other).unwrap_err().is_validation());
}

#[test]
fn manifest_validation() {
    let mut m = SweepManifest::new(ExperimentKind::Lifespan, 4);
    m.gamma = vec![0.5];
    m.p = vec![1.5];
    assert!(m.validate().is_err(), "empty eps grid");
    m.eps = vec![0.5, 1.0];
    assert!(m.validate().is_err(), "increasing eps");
    m.eps = vec![1.0, -0.5];
    assert!(m.validate().is_err());
    m.eps = DEFAULT_EPS.to_vec();
    m.validate().unwrap();
    m.q = 5;
    assert!(m.validate().is_err());
    m.q = 4;
    m.p = vec![1.0];
    assert!(m.validate().is_err());
    let mut g = SweepManifest::new(ExperimentKind::Gn, 4);
    assert!(g.validate().is_err());
    g.s = vec![1.0];
    g.validate().unwrap();
}

#[test]
fn empty_eps_sweep_fails_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = SweepManifest::new(ExperimentKind::Lifespan, 4);
    m.gamma = vec![0.5];
    m.p = vec![1.5];
    m.out_dir = Some(dir.path().to_path_buf());
    assert!(run_sweep(&m, 1).unwrap_err().is_validation());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn two_point_decay_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = SweepManifest::new(ExperimentKind::LinearDecay, 4);
    m.s = vec![0.0];
    m.gamma = vec![0.5, 1.0];
    m.out_dir = Some(dir.path().join("runs"));
    let recs = run_sweep(&m, 2).unwrap();
    assert_eq!(recs.len(), 2);
    for r in &recs {
        assert_eq!(r.status, Status::Ok);
        for key in ["slope", "theory", "deviation"] {
            assert!(r.outputs[key].is_f64(), "{key}");
        }
        assert!(r.refinement["refinement_shift"].is_f64());
    }
    let files = emit_report(Some(m.kind), &recs, dir.path(), Value::Null).unwrap();
    let text = fs::read_to_string(&files.tables[0]).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "s,gamma,slope,theory,deviation,refinement_shift");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1], "0.5");
    assert_eq!(rows[0][3], "-0.25");
    let summary: Value = serde_json::from_str(&fs::read_to_string(&files.summary).unwrap()).unwrap();
    assert!(schema_errors(&summary).is_empty());
    let traj = fs::read_to_string(dir.path().join("trajectory_s=0_gamma=1.csv")).unwrap();
    let mut lines = traj.lines();
    assert_eq!(lines.next().unwrap(), "t,h_s_norm,l2_norm");
    assert_eq!(lines.count(), 64);
}

#[test]
fn sweeps_resume_and_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = functional_manifest(a.path());
    let mb = functional_manifest(b.path());
    let full = run_sweep(&ma, 1).unwrap();

    // interrupted run: only the first two points made it to disk
    let store_b = RecordStore::open(b.path(), &mb.hash()).unwrap();
    for r in &full[..2] {
        store_b.append(r).unwrap();
    }
    let resumed = run_sweep(&mb, 2).unwrap();
    let lines = fs::read_to_string(store_b.dir().join(RecordStore::FILE)).unwrap();
    assert_eq!(lines.lines().count(), full.len(), "only missing points rerun");
    let pa: Vec<Value> = full.iter().map(|r| r.payload()).collect();
    let pb: Vec<Value> = resumed.iter().map(|r| r.payload()).collect();
    assert_eq!(pa, pb);

    // a fresh directory reproduces the payload bytes
    let c = tempfile::tempdir().unwrap();
    let again = run_sweep(&functional_manifest(c.path()), 3).unwrap();
    let bytes = |v: &[hwave_core::experiment_harness::ExperimentRecord]| {
        serde_json::to_vec(&v.iter().map(|r| r.payload()).collect::<Vec<_>>()).unwrap()
    };
    assert_eq!(bytes(&full), bytes(&again));

    // second invocation touches nothing
    let before = fs::read_to_string(store_b.dir().join(RecordStore::FILE)).unwrap();
    run_sweep(&mb, 1).unwrap();
    assert_eq!(before, fs::read_to_string(store_b.dir().join(RecordStore::FILE)).unwrap());
}

#[test]
fn point_failures_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = SweepManifest::new(ExperimentKind::Lifespan, 4);
    m.gamma = vec![1.0];
    // both above p_crit = 5/3
    m.p = vec![2.0, 3.0];
    m.eps = vec![1.0];
    m.out_dir = Some(dir.path().to_path_buf());
    let recs = run_sweep(&m, 1).unwrap();
    assert_eq!(recs.len(), 2);
    assert!(recs.iter().all(|r| matches!(r.status, Status::Failed { .. })));
    let doc = summary_json(Some(m.kind), &recs, Value::Null);
    assert_eq!(doc["failed"], json!(2));
    assert!(schema_errors(&doc).is_empty());
}

#[test]
fn empty_summary_is_valid() {
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(None, &[], dir.path(), Value::Null).unwrap();
    let doc: Value = serde_json::from_str(&fs::read_to_string(&files.summary).unwrap()).unwrap();
    assert_eq!(doc["count"], json!(0));
    assert!(schema_errors(&doc).is_empty());
    assert!(files.tables.is_empty());
    assert!(!schema_errors(&json!({"format": "other"})).is_empty());
}

#[test]
fn report_errors_carry_paths() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let err = emit_report(None, &[], &blocker.join("sub"), Value::Null).unwrap_err();
    assert!(err.to_string().contains("file"), "{err}");
}

#[test]
fn lifespan_precondition() {
    let spec = LifespanSpec {
        q: 4,
        gamma: 1.0,
        p: 1.8,
        eps: DEFAULT_EPS.to_vec(),
        resolution: Resolution::default(),
        certify_dt: false,
    };
    assert!(lifespan_experiment(&spec).unwrap_err().is_validation());
}

#[test]
fn phase_cells_on_either_side_of_the_curve() {
    let res = Resolution {
        k_max: 16,
        c0: 1.0,
        ..Resolution::default()
    };
    let settings = PhaseSettings::default();
    let grow = classify_cell(4, 1.0, 1.4, 1.0, &res, &settings).unwrap();
    assert_eq!(grow.class, CellClass::Growing);
    assert!((grow.p_crit - 5.0 / 3.0).abs() < 1e-15);
    let decay = classify_cell(4, 1.0, 2.5, 0.05, &res, &settings).unwrap();
    assert_eq!(decay.class, CellClass::Decaying, "{decay:?}");
}

#[test]
fn power_law_examples() {
    let eps = [1.0, 0.7, 0.5, 0.35, 0.25, 0.18, 0.12];
    let exact: Vec<_> = eps.iter().map(|e: &f64| (*e, 3.0 * e.powf(-4.0 / 3.0))).collect();
    assert!((fit_power_law(&exact).unwrap().exponent + 4.0 / 3.0).abs() < 1e-10);
    let flat: Vec<_> = eps.iter().map(|e| (*e, 5.0)).collect();
    assert!(fit_power_law(&flat).unwrap().exponent.abs() < 1e-12);
    assert!(fit_power_law(&exact[..3]).is_err());
    assert!(fit_power_law(&[(1.0, 1.0), (0.9, 1.0), (0.8, 1.0), (0.7, 1.0)]).is_err());
    assert!(fit_power_law(&[(1.0, 1.0), (0.5, 0.0), (0.3, 1.0), (0.1, 1.0)]).is_err());
}

proptest! {
    #[test]
    fn power_law_tolerates_five_percent_noise(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs: Vec<_> = DEFAULT_EPS
            .iter()
            .map(|e| (*e, 3.0 * e.powf(-4.0 / 3.0) * (1.0 + 0.05 * rng.gen_range(-1.0..1.0))))
            .collect();
        let fit = fit_power_law(&pairs).unwrap();
        prop_assert!((fit.exponent + 4.0 / 3.0).abs() < 0.1);
    }
}
