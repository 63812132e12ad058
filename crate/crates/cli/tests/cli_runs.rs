use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use ftopt_cli::{run, Mode, RunConfig};
use ftopt_core::problem_file::{load_problem, ProblemDocument};
use ftopt_core::ConfidenceLevels;
use serde_json::Value;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn fixture(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn ftopt(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ftopt")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn crisp_table1_matches_fixture() {
    let dir = TempDir::new().unwrap();
    let report = run(&RunConfig::new(Mode::Crisp, data("table1.json"), dir.path())).unwrap();
    assert_eq!(report.summary, "crisp: D = 781030");
    let v = read_json(&dir.path().join("crisp_solution.json"));
    assert_eq!(v["benefit"].as_f64(), Some(781030.0));
    assert_eq!(v["shipments"][0][0].as_f64(), Some(410.0));
    assert_eq!(fs::read_to_string(dir.path().join("crisp_solution.json")).unwrap(), fixture("table1_crisp_solution.json"));
}

#[test]
fn fuzzy_table1_matches_fixture() {
    let dir = TempDir::new().unwrap();
    run(&RunConfig::new(Mode::Fuzzy, data("table1.json"), dir.path())).unwrap();
    let table = fs::read_to_string(dir.path().join("fuzzy_alpha_table.csv")).unwrap();
    assert!(table.starts_with("alpha,D_lo,D_hi,x_11_lo,x_11_hi,x_12_lo,"));
    assert!(table.lines().next().unwrap().ends_with(",x_33_lo,x_33_hi,feasible,repaired"));
    assert_eq!(table.lines().count(), 12);
    assert_eq!(table, fixture("table1_fuzzy_alpha_table.csv"));
    assert_eq!(
        fs::read_to_string(dir.path().join("fuzzy_quadruples.json")).unwrap(),
        fixture("table1_fuzzy_quadruples.json")
    );
    let q = read_json(&dir.path().join("fuzzy_quadruples.json"));
    let d: Vec<f64> = q["quadruples"]["D"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(d[1] <= 781030.0 && 781030.0 <= d[2]);
}

#[test]
fn ingest_gaussian_samples() {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    let dir = TempDir::new().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let normal = Normal::new(100.0, 10.0).unwrap();
    let text: String = (0..100_000).map(|_| format!("{}\n", normal.sample(&mut rng))).collect();
    let samples = dir.path().join("samples.txt");
    fs::write(&samples, text).unwrap();
    run(&RunConfig::new(Mode::Ingest, &samples, dir.path())).unwrap();
    let v = read_json(&dir.path().join("ingest_quadruple.json"));
    assert_eq!(v["kind"], "samples");
    let expected = [83.55, 96.15, 103.85, 116.45];
    for (k, want) in expected.iter().enumerate() {
        let got = v["quadruple"][k].as_f64().unwrap();
        assert!((got - want).abs() <= 0.5, "component {k}: {got}");
    }
}

#[test]
fn ingest_histogram_csv() {
    let dir = TempDir::new().unwrap();
    run(&RunConfig::new(Mode::Ingest, data("demand1.csv"), dir.path())).unwrap();
    let v = read_json(&dir.path().join("ingest_quadruple.json"));
    assert_eq!(v["kind"], "histogram");
    assert_eq!(v["count"].as_f64(), Some(75.0));
    let q: Vec<f64> = v["quadruple"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(q.windows(2).all(|w| w[0] <= w[1]));
    assert!(q[0] >= 380.0 && q[3] <= 440.0);
}

#[test]
fn compare_is_byte_identical_across_runs() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        let mut config = RunConfig::new(Mode::Compare, data("table1.json"), dir.path());
        config.mc_steps = 10_000;
        config.seed = 42;
        run(&config).unwrap();
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 14);
    for name in names {
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert!(x == y, "{name:?} differs");
    }
    let cmp = read_json(&a.path().join("comparison.json"));
    let d = &cmp["report"]["entries"][0];
    assert_eq!(d["quantity"], "D");
    assert!(d["width_ratio"].as_f64().unwrap() >= 1.0);
    assert_eq!(d["mc_mean_within_fuzzy_core"], true);
}

#[test]
fn transport_instance_is_optimized() {
    let dir = TempDir::new().unwrap();
    run(&RunConfig::new(Mode::Crisp, data("transport_min.json"), dir.path())).unwrap();
    let v = read_json(&dir.path().join("crisp_solution.json"));
    assert_eq!(v["objective"].as_f64(), Some(585.0));
    assert!(v["vogel_objective"].as_f64().unwrap() >= 585.0);
    assert!(v["north_west_corner_objective"].as_f64().unwrap() >= 585.0);
}

#[test]
fn exported_problem_round_trips() {
    let dir = TempDir::new().unwrap();
    let exported = dir.path().join("exported.json");
    let mut config = RunConfig::new(Mode::Fuzzy, data("mixed.json"), dir.path());
    config.export_problem = Some(exported.clone());
    run(&config).unwrap();
    let levels = ConfidenceLevels::default();
    let problem = |p: &Path| match load_problem(p, levels).unwrap() {
        ProblemDocument::Distribution { problem, .. } => problem,
        other => panic!("unexpected {other:?}"),
    };
    let (original, reread) = (problem(&data("mixed.json")), problem(&exported));
    // the export is rounded to 9 significant digits
    for (a, b) in original.supply.iter().chain(&original.demand).zip(reread.supply.iter().chain(&reread.demand)) {
        for (x, y) in a.quadruple().iter().zip(b.quadruple()) {
            assert!((x - y).abs() <= 1e-8 * x.abs().max(1.0));
        }
    }
    assert_eq!(original.transport_cost, reread.transport_cost);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();

    let (code, err) = ftopt(&["--mode", "crisp", "no/such/file.json", "-o", out]);
    assert_eq!(code, 3, "{err}");

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"schema_version": 1, "distribution": {"supply": [[5, 4, 3, 2]]}}"#).unwrap();
    let (code, err) = ftopt(&["--mode", "crisp", bad.to_str().unwrap(), "-o", out]);
    assert_eq!(code, 4);
    assert!(err.contains("$.distribution"), "{err}");

    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(ftopt(&["--mode", "fuzzy", bad.to_str().unwrap(), "-o", out]).0, 4);

    // minimum purchases exceed what consumers can take
    let infeasible = dir.path().join("infeasible.json");
    fs::write(
        &infeasible,
        r#"{"schema_version": 1, "distribution": {
            "supply": [100], "demand": [50], "min_purchase": [80], "min_sale": [0],
            "purchase_price": [1], "sale_price": [5], "transport_cost": [[1]]}}"#,
    )
    .unwrap();
    let (code, err) = ftopt(&["--mode", "crisp", infeasible.to_str().unwrap(), "-o", out]);
    assert_eq!(code, 5, "{err}");
    assert!(dir.path().join("crisp_solution.json").exists());

    let table1 = data("table1.json");
    let t = table1.to_str().unwrap();
    assert_eq!(ftopt(&["--mode", "fuzzy", t, "-o", out, "--gamma-core", "0.95"]).0, 2);
    assert_eq!(ftopt(&["--mode", "montecarlo", t, "-o", out, "--mc-steps", "0"]).0, 2);
    assert_eq!(ftopt(&["--mode", "montecarlo", data("mixed.json").to_str().unwrap(), "-o", out]).0, 4);
    assert_eq!(ftopt(&["--mode", "crisp", t, "-o", out]).0, 0);
}
