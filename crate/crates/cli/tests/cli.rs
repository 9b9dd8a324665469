use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_nodal-radial");
const LAMBDA1_BALL_N4: f64 = 14.681970642123893;

fn run_in(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).current_dir(dir).env_remove("NODAL_RADIAL_OUT_DIR");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(dir: &Path, args: &[&str]) -> Output {
    run_in(dir, args, &[])
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn assert_ok(o: &Output) {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(o));
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(format!("{name}.schema.json"))
}

fn validate(name: &str, instance: &Value) {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path(name)).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("stdout is JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

fn read_dat(path: &Path) -> (Vec<String>, Vec<(f64, f64)>) {
    let text = std::fs::read_to_string(path).unwrap();
    let (comments, data): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| l.starts_with('#'));
    let points = data
        .iter()
        .map(|l| {
            let c: Vec<f64> = l.split_whitespace().map(|x| x.parse().unwrap()).collect();
            assert_eq!(c.len(), 2, "two columns in {l}");
            (c[0], c[1])
        })
        .collect();
    (comments.into_iter().map(String::from).collect(), points)
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn shoot_six_dimensions_half_matches_golden() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["shoot", "--dim", "6", "--gamma", "0.5", "--json", "--out-dir", "o"]);
    assert_ok(&o);
    let got = json(&o);
    validate("shoot", &got);
    let golden: Value =
        serde_json::from_str(include_str!("golden/shoot_N6_gamma0.5.json")).expect("golden parses");
    for key in ["T1", "T2", "t0", "y0", "lambda2"] {
        let (a, b) = (f(&got[key]), f(&golden[key]));
        assert!((a - b).abs() <= 1e-9 * b.abs(), "{key}: {a} vs {b}");
    }
    for key in ["zeros", "slopes"] {
        let (a, b) = (got[key].as_array().unwrap(), golden[key].as_array().unwrap());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((f(x) - f(y)).abs() <= 1e-9 * f(y).abs(), "{key}: {x} vs {y}");
        }
    }
    let written = std::fs::read_to_string(tmp.path().join("o/shoot_N6.json")).unwrap();
    assert_eq!(written, stdout(&o));
}

#[test]
fn schemas_reject_malformed_documents() {
    let mut doc: Value =
        serde_json::from_str(include_str!("golden/shoot_N6_gamma0.5.json")).expect("golden parses");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path("shoot")).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    assert!(validator.is_valid(&doc));
    doc["T1"] = Value::from("0.5");
    assert!(!validator.is_valid(&doc));
    doc.as_object_mut().unwrap().remove("T1");
    assert!(!validator.is_valid(&doc));
}

#[test]
fn negative_gamma_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["shoot", "--dim", "6", "--gamma", "-1", "--out-dir", "o"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("gamma"), "{err}");
    assert!(!tmp.path().join("o").exists(), "nothing written on usage errors");
}

#[test]
fn usage_errors_exit_two_with_one_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["frobnicate"],
        &["shoot", "--dim", "2", "--gamma", "1"],
        &["shoot", "--dim", "6"],
        &["shoot", "--dim", "6", "--gamma", "abc"],
        &["curve", "--dim", "4", "--gamma-min", "1e4", "--gamma-max", "1e2"],
        &["curve", "--dim", "4", "--rel-tol", "0.5"],
        &["solution", "--dim", "6", "--gamma", "1", "--mesh", "3"],
        &["asymptotics", "--dim", "5", "--gamma-min", "1e2", "--gamma-max", "1.1e2"],
        &["report", "--config", "missing.toml"],
    ];
    for args in cases {
        let o = run(tmp.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert_eq!(stderr(&o).lines().count(), 1, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn unwritable_output_is_an_io_failure() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("blocker"), "").unwrap();
    let o = run(tmp.path(), &["shoot", "--dim", "6", "--gamma", "0.5", "--out-dir", "blocker"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("blocker"), "{}", stderr(&o));
}

#[test]
fn three_dimensional_curve_has_the_table_header() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["curve", "--dim", "3", "--gamma-min", "1", "--gamma-max", "1e4", "--out-dir", "o"]);
    assert_ok(&o);
    let text = stdout(&o);
    assert_eq!(
        text.lines().next().unwrap(),
        "gamma,lambda2,T1,T2,t0,y0,r_node,s_min,M_plus,M_minus,J_plus,J_minus"
    );
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4 * 12 + 1);
    for r in &rows {
        assert_eq!(r.len(), 12);
        for cell in r {
            assert!(cell.parse::<f64>().unwrap().is_finite());
        }
    }
    assert_eq!(std::fs::read_to_string(tmp.path().join("o/curve_N3.csv")).unwrap(), text);
}

#[test]
fn four_dimensional_curve_plot_data() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["curve", "--dim", "4", "--plot", "--json", "--out-dir", "o"]);
    assert_ok(&o);
    validate("curve", &json(&o));
    let (comments, points) = read_dat(&tmp.path().join("o/lambda2_N4.dat"));
    assert_eq!(comments[0], "# gamma lambda2");
    let reference: f64 = comments[1].rsplit(' ').next().unwrap().parse().unwrap();
    assert!((reference - LAMBDA1_BALL_N4).abs() < 1e-9);
    assert!(points.len() > 2);
    assert!(points.windows(2).all(|w| w[1].0 > w[0].0));
    assert!(points.windows(2).all(|w| w[1].1 < w[0].1), "lambda2 decreasing in gamma");
    let svg = std::fs::read_to_string(tmp.path().join("o/lambda2_N4.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("stroke-dasharray"));
}

#[test]
fn six_dimensional_overlay_agrees_with_the_bubble() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["solution", "--dim", "6", "--gamma", "1e4", "--plot", "--json", "--out-dir", "o"]);
    assert_ok(&o);
    validate("solution", &json(&o));
    let (_, scaled) = read_dat(&tmp.path().join("o/overlay_rescaled_N6.dat"));
    let (_, bubble) = read_dat(&tmp.path().join("o/overlay_bubble_N6.dat"));
    assert_eq!(scaled.len(), bubble.len());
    assert_eq!(scaled.first().unwrap().0, 0.0);
    assert_eq!(scaled.last().unwrap().0, 5.0);
    let worst = scaled
        .iter()
        .zip(&bubble)
        .map(|(a, b)| {
            assert_eq!(a.0, b.0);
            (a.1 - b.1).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst <= 0.02, "sup difference {worst}");
    assert!(tmp.path().join("o/overlay_N6.svg").exists());
    assert!(tmp.path().join("o/profile_N6.dat").exists());
}

#[test]
fn every_json_output_validates() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: &[(&str, &[&str])] = &[
        ("energy", &["energy", "--dim", "6", "--gamma", "1e4"]),
        ("energy", &["energy", "--dim", "3", "--gamma", "0.01"]),
        ("solution", &["solution", "--dim", "3", "--gamma", "1"]),
        ("asymptotics", &["asymptotics", "--dim", "6", "--fast"]),
        ("asymptotics", &["asymptotics", "--dim", "4", "--fast"]),
        ("lambda0", &["lambda0"]),
        ("report", &["report", "--fast"]),
        ("shoot", &["shoot", "--dim", "3", "--gamma", "1e4"]),
    ];
    for (schema, args) in cases {
        let mut a = args.to_vec();
        a.extend(["--json", "--out-dir", "o"]);
        let o = run(tmp.path(), &a);
        assert_ok(&o);
        validate(schema, &json(&o));
    }
}

#[test]
fn report_lists_every_gate() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["report", "--fast", "--out-dir", "o"]);
    assert_ok(&o);
    let text = std::fs::read_to_string(tmp.path().join("o/report.txt")).unwrap();
    for id in 1..=12 {
        assert!(text.contains(&format!("[{id:2}]")), "gate {id} missing");
    }
    let csv = std::fs::read_to_string(tmp.path().join("o/report.csv")).unwrap();
    assert!(csv.starts_with("id,name,verdict,failing_checks\n"));
    assert_eq!(csv.lines().count(), 13);
}

#[test]
fn identical_configuration_gives_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |dir: &'static str| {
        vec!["curve", "--dim", "5", "--fast", "--json", "--csv", "--plot", "--out-dir", dir]
    };
    let a = run(tmp.path(), &args("a"));
    let b = run(tmp.path(), &args("b"));
    assert_ok(&a);
    assert_ok(&b);
    assert_eq!(a.stdout, b.stdout);
    let (fa, fb) = (files(&tmp.path().join("a")), files(&tmp.path().join("b")));
    assert_eq!(fa.len(), 4);
    assert_eq!(fa, fb);
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("run.toml"),
        "dim = 5\ngamma = 2.0\nout-dir = \"from_file\"\njson = true\n",
    )
    .unwrap();
    let o = run(tmp.path(), &["shoot", "--config", "run.toml"]);
    assert_ok(&o);
    let v = json(&o);
    assert_eq!(v["N"], 5);
    assert_eq!(f(&v["gamma"]), 2.0);
    assert!(tmp.path().join("from_file/shoot_N5.json").exists());

    let o = run(tmp.path(), &["shoot", "--config", "run.toml", "--dim", "4", "--out-dir", "from_flag"]);
    assert_ok(&o);
    assert_eq!(json(&o)["N"], 4);
    assert!(tmp.path().join("from_flag/shoot_N4.json").exists());

    std::fs::write(tmp.path().join("bad.toml"), "dimension = 5\n").unwrap();
    let o = run(tmp.path(), &["shoot", "--config", "bad.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn environment_sets_the_default_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let env = [("NODAL_RADIAL_OUT_DIR", "from_env")];
    let o = run_in(tmp.path(), &["shoot", "--dim", "6", "--gamma", "0.5"], &env);
    assert_ok(&o);
    assert!(tmp.path().join("from_env/shoot_N6.csv").exists());

    let o = run_in(tmp.path(), &["shoot", "--dim", "6", "--gamma", "0.5", "--out-dir", "flag"], &env);
    assert_ok(&o);
    assert!(tmp.path().join("flag/shoot_N6.csv").exists());

    let o = run(tmp.path(), &["shoot", "--dim", "6", "--gamma", "0.5"]);
    assert_ok(&o);
    assert!(tmp.path().join("out/shoot_N6.csv").exists());
}
