use projsq::kv;
use projsq::scenario::{run_scenario, write_outputs, ScenarioConfig, SCENARIOS};
use projsq::Error;

fn cfg(name: &str, text: &str) -> ScenarioConfig {
    let dir = std::env::temp_dir().join(format!("projsq-test-{name}-{}", std::process::id()));
    ScenarioConfig::new(name, kv::parse(text).unwrap(), dir).unwrap()
}

#[test]
fn csv_rows_are_sorted_and_formatted() {
    let c = cfg("gkp-prob", "delta_sq = 0.15\ns_grid = 3, 1.5, 2\ndim = 120\n");
    let t = run_scenario(&c).unwrap();
    assert_eq!(t.column("s").unwrap(), vec![1.5, 2.0, 3.0]);
    let csv = t.to_csv();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s,q_sum,q_dense,q_ref,dev_ref,dev_dense,valid,valid_margin,trunc_delta"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1.50000000000e0");
    assert!(!csv.contains('\r'));
    assert!(csv.ends_with('\n'));
}

#[test]
fn reruns_are_byte_identical() {
    let text = "code = sc\nz = 0.5\ndz_grid = 0.5, 0.25\nshots = 3000\nseed = 4\ndim = 60\nout_dim = 200\n";
    let c = cfg("vqed-convergence", text);
    let a = run_scenario(&c).unwrap();
    let b = run_scenario(&c).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    let paths = write_outputs(&c, &a, true).unwrap();
    assert_eq!(std::fs::read_to_string(&paths[0]).unwrap(), a.to_csv());
    assert!(std::fs::read_to_string(&paths[1]).unwrap().starts_with("<svg"));
    std::fs::remove_dir_all(&c.output_dir).unwrap();
}

#[test]
fn unconverged_truncation_fails() {
    let c = cfg("sc-prob", "xi = 0.9\nz = 1.2039728043259361\ndz_grid = 0.4\ndim = 100\n");
    assert!(matches!(run_scenario(&c), Err(Error::TruncationNotConverged { .. })));
    let mut loose = c.clone();
    loose.set("trunc_tol", 1e-4);
    assert!(run_scenario(&loose).is_ok());
}

#[test]
fn missing_and_invalid_params_are_reported() {
    let c = cfg("fig2", "dz_grid = 0.5\ndim = 100\n");
    assert!(matches!(run_scenario(&c), Err(Error::Parse { .. })));
    let c = cfg("fig2", "delta_sq = 0.05\ndz_grid = 0.5\ndim = 10\n");
    assert!(matches!(run_scenario(&c), Err(Error::InvalidArgument(_))));
    assert!(ScenarioConfig::new("fig3", Default::default(), "x").is_err());
    assert_eq!(SCENARIOS.len(), 8);
}

#[test]
fn vacuum_scenario_is_exact() {
    let c = cfg("vacuum-exact", "z_grid = 0.5, 0\ngamma_grid = 2, 0.5\ndim = 60\n");
    let t = run_scenario(&c).unwrap();
    assert_eq!(t.rows.len(), 4);
    assert_eq!((t.rows[0][0], t.rows[0][1]), (0.0, 0.5));
    for e in t.column("dz_err").unwrap().into_iter().chain(t.column("q_err").unwrap()) {
        assert!(e < 1e-6);
    }
}
