use std::path::PathBuf;
use std::process::{Command, Output};

use toboggan::config::parse_potential;
use toboggan::liouville::map_potential;
use toboggan::potential::PowerLawPotential;
use toboggan::rational::Rational;

fn toboggan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toboggan"))
        .args(args)
        .output()
        .unwrap()
}

fn toboggan_with_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toboggan"))
        .env("TOBOGGAN_THREADS", threads)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn numbers(o: &Output) -> Vec<f64> {
    stdout(o).lines().map(|l| l.trim().parse().unwrap()).collect()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toboggan-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn oracle_levels() {
    let o = toboggan(&["oracle", "--n", "0", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(numbers(&o), vec![1.0, 3.0]);
    let o = toboggan(&["oracle", "--n", "1", "--ell", "1"]);
    assert_eq!(numbers(&o), vec![9.0]);
}

#[test]
fn resonance_list() {
    let o = toboggan(&["resonances", "--alpha", "3.5", "--count", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(numbers(&o), vec![5.0, 1.0]);
}

#[test]
fn empty_window_gives_empty_table() {
    let o = toboggan(&["spectrum", "--alpha", "0.3", "--window", "3,3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(csv_rows(&o).is_empty());
    assert!(stdout(&o).starts_with("re_E,im_E,residual"));
}

#[test]
fn spectrum_table_matches_closed_form() {
    let alpha = 0.3;
    let o = toboggan(&["spectrum", "--alpha", "0.3", "--window", "0,12", "--eps", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&o);
    let mut expected: Vec<f64> = (0..3)
        .flat_map(|n| [-1.0, 1.0].map(|s| 4.0 * n as f64 + 2.0 + 2.0 * s * alpha))
        .collect();
    expected.sort_by(f64::total_cmp);
    assert_eq!(rows.len(), expected.len());
    for (row, e) in rows.iter().zip(expected) {
        let re: f64 = row[0].parse().unwrap();
        assert!((re - e).abs() < 1e-6, "{re} vs {e}");
        assert_eq!(row[3], "true");
    }
}

#[test]
fn output_independent_of_thread_count() {
    let args = ["spectrum", "--alpha", "1.7", "--window", "0,12", "--format", "json"];
    let one = toboggan_with_threads("1", &args);
    let four = toboggan_with_threads("4", &args);
    let again = toboggan_with_threads("4", &args);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(four.stdout, again.stdout);
}

#[test]
fn json_carries_schema() {
    for args in [
        vec!["spectrum", "--alpha", "0.5", "--window", "0,4", "--format", "json"],
        vec!["contour", "--contour-N", "1", "--format", "json"],
        vec!["scatter", "--alpha", "0.3", "--energy", "2.2", "--N", "1"],
    ] {
        let o = toboggan(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["schema"], 1, "{args:?}");
    }
}

#[test]
fn contour_csv_columns() {
    let o = toboggan(&["contour", "--contour-N", "2", "--samples-per-turn", "64"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "t,modulus,argument,re,im");
    for row in csv_rows(&o) {
        let v: Vec<f64> = row.iter().map(|x| x.parse().unwrap()).collect();
        assert!((v[1] * v[2].cos() - v[3]).abs() < 1e-12 * v[1].max(1.0));
        assert!((v[1] * v[2].sin() - v[4]).abs() < 1e-12 * v[1].max(1.0));
    }
}

#[test]
fn scatter_fields_and_resonance_flag() {
    let o = toboggan(&["scatter", "--alpha", "0.3", "--energy", "2.2", "--branch", "upper"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["backward", "forward", "conditioning", "resonance_proximity"] {
        assert!(!v[key].is_null(), "{key}");
    }
    let o = toboggan(&["scatter", "--alpha", "3.5", "--energy", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["resonance"], true);
}

#[test]
fn numerical_scatter_agrees_with_closed_form() {
    let run = |method: &str| {
        let o = toboggan(&["scatter", "--alpha", "0.3", "--energy", "2.2", "--method", method]);
        assert_eq!(o.status.code(), Some(0));
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()
    };
    let (a, n) = (run("analytic"), run("numerical"));
    for amp in ["backward", "forward"] {
        for part in ["re", "im"] {
            let (x, y) = (a[amp][part].as_f64().unwrap(), n[amp][part].as_f64().unwrap());
            assert!((x - y).abs() < 1e-4, "{amp}.{part}: {x} vs {y}");
        }
    }
}

#[test]
fn wavefunction_is_one_at_vertex() {
    let o = toboggan(&["wavefunction", "--alpha", "0.3", "--energy", "1.4", "--points", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 5);
    let mid: Vec<f64> = rows[2].iter().map(|x| x.parse().unwrap()).collect();
    assert!((mid[1] - 1.0).abs() < 1e-12 && mid[2].abs() < 1e-12);
}

#[test]
fn transform_round_trip() {
    let source = PowerLawPotential::from_alpha(0.8).with_term(Rational::integer(1), 0.1);
    let path = scratch("source.cfg", &source.to_config());
    let o = toboggan(&[
        "transform",
        "--tau",
        "2",
        "--potential",
        path.to_str().unwrap(),
        "--contour-N",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("N' = 0"));
    let target = parse_potential(&text).unwrap();
    let back = map_potential(&target, Rational::new(1, 2).unwrap()).unwrap();
    let exponents = |v: &PowerLawPotential| {
        let mut e: Vec<Rational> = v.terms.iter().filter(|t| t.g != 0.0).map(|t| t.beta).collect();
        if v.harmonic != 0.0 {
            e.push(Rational::integer(2));
        }
        e.sort();
        e
    };
    assert_eq!(exponents(&back), exponents(&source));
    assert!((back.centrifugal - source.centrifugal).abs() < 1e-12);
}

#[test]
fn canonical_flag_rejects_third_integer_tau() {
    let path = scratch("plain.cfg", "alpha = 0.4\n");
    let o = toboggan(&[
        "transform",
        "--tau",
        "4/3",
        "--potential",
        path.to_str().unwrap(),
        "--canonical",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn susy_config_feeds_back() {
    let o = toboggan(&["susy", "--n", "0", "--alpha", "1.5", "--q", "minus"]);
    assert_eq!(o.status.code(), Some(0));
    let v = parse_potential(&stdout(&o)).unwrap();
    assert_eq!(v, PowerLawPotential::default());
    let o = toboggan(&["susy", "--n", "1", "--alpha", "0.3", "--q", "plus"]);
    assert_eq!(o.status.code(), Some(0));
    let v = parse_potential(&stdout(&o)).unwrap();
    assert_eq!(v.poles.len(), 2);
    for p in &v.poles {
        assert!((p.location.re.abs() - 1.3f64.sqrt()).abs() < 1e-10 && p.location.im == 0.0);
        assert!((p.strength.re - 2.0).abs() < 1e-10);
    }
}

#[test]
fn usage_and_input_errors_exit_one() {
    assert_eq!(toboggan(&["bogus"]).status.code(), Some(1));
    assert_eq!(
        toboggan(&["oracle", "--n", "0", "--alpha", "0.5", "--frobnicate"])
            .status
            .code(),
        Some(1)
    );
    let bad = scratch("bad.cfg", "harmonic = 1\nterm { beta = \"x\", g = 1 }\n");
    let o = toboggan(&["spectrum", "--potential", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = toboggan_with_threads("zero", &["oracle", "--n", "0", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn probe_evaluates_special_functions() {
    let o = toboggan(&["specfun-probe", "--function", "gamma", "--z", "0.5"]);
    let parts: Vec<f64> = stdout(&o).trim().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((parts[0] - std::f64::consts::PI.sqrt()).abs() < 1e-14 && parts[1] == 0.0);
    let o = toboggan(&[
        "specfun-probe",
        "--function",
        "kummer",
        "--a",
        "-1",
        "--b",
        "2",
        "--z",
        "3",
    ]);
    let parts: Vec<f64> = stdout(&o).trim().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((parts[0] + 0.5).abs() < 1e-14);
}
