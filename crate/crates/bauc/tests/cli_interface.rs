//! Black-box tests of the `bauc` binary: exit codes, determinism of
//! outputs, file formats, and error reporting.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bauc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bauc"))
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bauc()
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary should execute")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_demo_csv(dir: &Path) -> String {
    let path = dir.join("demo.csv");
    let mut rows = String::from("f1,f2,y\n");
    // two shifted, slightly overlapping point clouds
    let coords = [
        (-0.9, 0.2),
        (-0.3, -0.6),
        (-1.2, -0.1),
        (-0.5, 0.4),
        (-0.8, -0.7),
        (-0.2, -0.3),
        (0.9, 1.3),
        (1.4, 0.6),
        (0.7, 0.8),
        (1.1, 1.5),
        (1.6, 0.9),
        (0.8, 1.1),
    ];
    for (i, (a, b)) in coords.iter().enumerate() {
        let label = if i < 6 { "neg" } else { "pos" };
        rows.push_str(&format!("{a},{b},{label}\n"));
    }
    fs::write(&path, rows).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn estimate_is_deterministic_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_demo_csv(dir.path());
    let args = [
        "estimate",
        csv.as_str(),
        "--label",
        "y",
        "--positive",
        "pos",
        "--cv-folds",
        "3",
        "--seed",
        "9",
    ];
    let a = run(&args, dir.path());
    let b = run(&args, dir.path());
    assert!(a.status.success(), "stderr: {}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    assert!(text.starts_with("estimator,value,wall_us"));
    for name in ["cbauc", "ebauc", "cv", "binormal", "empirical"] {
        assert!(text.contains(name), "missing row {name}: {text}");
    }
}

#[test]
fn estimate_supports_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_demo_csv(dir.path());
    let out = run(
        &[
            "estimate",
            csv.as_str(),
            "--label",
            "y",
            "--positive",
            "pos",
            "--estimators",
            "cbauc",
            "--format",
            "json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let value = parsed[0]["value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&value));
}

#[test]
fn estimate_rejects_bad_inputs_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_demo_csv(dir.path());

    // three distinct label values
    let tri = dir.path().join("tri.csv");
    fs::write(&tri, "f1,y\n1.0,a\n2.0,b\n3.0,c\n").unwrap();
    let out = run(
        &["estimate", tri.to_str().unwrap(), "--label", "y", "--positive", "b"],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(stderr(&out).contains('c'), "stderr: {}", stderr(&out));

    // cv with too few samples per class
    let out = run(
        &[
            "estimate",
            csv.as_str(),
            "--label",
            "y",
            "--positive",
            "pos",
            "--estimators",
            "cv",
            "--cv-folds",
            "10",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(stderr(&out).contains("folds"), "stderr: {}", stderr(&out));

    // unknown estimator name
    let out = run(
        &[
            "estimate",
            csv.as_str(),
            "--label",
            "y",
            "--positive",
            "pos",
            "--estimators",
            "magic",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
}

#[test]
fn estimate_with_orthogonal_weights_returns_half() {
    let dir = tempfile::tempdir().unwrap();
    // class means differ only in the first coordinate, so the posterior
    // mean difference is along e0 and w = e1 is orthogonal to it.
    let csv = dir.path().join("orth.csv");
    fs::write(
        &csv,
        "f1,f2,y\n0,1,a\n0,-1,a\n2,1,b\n2,-1,b\n",
    )
    .unwrap();
    let weights = dir.path().join("w.json");
    fs::write(&weights, r#"{"w": [0.0, 1.0], "b": 0.0}"#).unwrap();
    let out = run(
        &[
            "estimate",
            csv.to_str().unwrap(),
            "--label",
            "y",
            "--positive",
            "b",
            "--weights",
            weights.to_str().unwrap(),
            "--estimators",
            "cbauc",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let value: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(value, 0.5, "orthogonal direction must give exactly 1/2");
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("config.json");
    fs::write(
        &path,
        r#"{
            "master_seed": 42,
            "replications": 12,
            "estimators": ["cbauc", "ebauc", "cvauc"],
            "scenarios": [
                {"kind": "equal_cov", "p": 2, "n_per_class": [8, 12]}
            ]
        }"#,
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn experiment_writes_byte_identical_csvs_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let out1 = run(&["experiment", &config, "--out", "run1"], dir.path());
    assert!(out1.status.success(), "stderr: {}", stderr(&out1));
    let out2 = run(&["experiment", &config, "--out", "run2"], dir.path());
    assert!(out2.status.success());

    for name in ["aggregates.csv", "replications.csv"] {
        let a = fs::read(dir.path().join("run1").join(name)).unwrap();
        let b = fs::read(dir.path().join("run2").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    // 2 scenarios x 3 estimators = 6 aggregate rows (+ header)
    let aggregates = fs::read_to_string(dir.path().join("run1/aggregates.csv")).unwrap();
    assert_eq!(aggregates.lines().count(), 7, "{aggregates}");
    assert!(aggregates.starts_with(
        "kind,p,n1,n2,ratio_or_target,estimator,mae,std_of_error,mean_bias,reps_used,mean_wall_us"
    ));
    // 2 scenarios x 12 replications x 3 estimators = 72 rows (+ header)
    let replications = fs::read_to_string(dir.path().join("run1/replications.csv")).unwrap();
    assert_eq!(replications.lines().count(), 73);
}

#[test]
fn experiment_rejects_unknown_config_keys_with_json_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        r#"{"replications": 5, "scenarios": [{"kind": "equal_cov", "p": 2, "n_per_class": [8], "oops": true}]}"#,
    )
    .unwrap();
    let out = run(
        &["experiment", path.to_str().unwrap(), "--out", "x"],
        dir.path(),
    );
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("scenarios[0]"), "stderr: {err}");
    assert!(err.contains("oops"), "stderr: {err}");
}

#[test]
fn experiment_rejects_zero_replications() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    fs::write(
        &path,
        r#"{"replications": 0, "scenarios": [{"kind": "equal_cov", "p": 2, "n_per_class": [8]}]}"#,
    )
    .unwrap();
    let out = run(
        &["experiment", path.to_str().unwrap(), "--out", "x"],
        dir.path(),
    );
    assert!(!out.status.success());
}

#[test]
fn oracle_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "oracle", "--P", "2", "--n1", "6", "--n2", "6", "--draws", "2000", "--trials", "5",
        "--seed", "3",
    ];
    let a = run(&args, dir.path());
    let b = run(&args, dir.path());
    assert!(a.status.success(), "stderr: {}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    assert!(text.lines().last().unwrap().starts_with("fraction,"));
}

#[test]
fn oracle_rejects_tiny_draw_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["oracle", "--draws", "10"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn plot_renders_deterministic_svg_with_one_polyline_per_series() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let out = run(&["experiment", &config, "--out", "run"], dir.path());
    assert!(out.status.success());

    let agg = dir.path().join("run/aggregates.csv");
    let svg1 = dir.path().join("a.svg");
    let svg2 = dir.path().join("b.svg");
    for target in [&svg1, &svg2] {
        let out = run(
            &[
                "plot",
                agg.to_str().unwrap(),
                "--x",
                "n1",
                "--y",
                "mae",
                "--series",
                "estimator",
                "--out",
                target.to_str().unwrap(),
            ],
            dir.path(),
        );
        assert!(out.status.success(), "stderr: {}", stderr(&out));
    }
    let a = fs::read(&svg1).unwrap();
    let b = fs::read(&svg2).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.matches("<polyline").count(), 3);

    let missing = run(
        &[
            "plot",
            agg.to_str().unwrap(),
            "--x",
            "nope",
            "--y",
            "mae",
            "--series",
            "estimator",
            "--out",
            svg1.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(!missing.status.success());
}

#[test]
fn bundled_configs_parse() {
    // keep the shipped configs loadable
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in fs::read_dir(configs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            bauc::cli::load_experiment_config(&path, 42)
                .unwrap_or_else(|e| panic!("{} failed to parse: {e}", path.display()));
        }
    }
}
