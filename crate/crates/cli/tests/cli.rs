use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn keps(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_keps"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("run keps")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// A small people table and a Mondrian configuration over it.
fn small_config(dir: &Path) -> PathBuf {
    let mut csv = String::from("name,age,sex,height\n");
    for i in 0..300 {
        let sex = if i % 3 == 0 { "Female" } else { "Male" };
        csv.push_str(&format!("p{i},{},{sex},{}\n", 18 + i % 60, 150 + (i * 7) % 45));
    }
    std::fs::write(dir.join("people.csv"), csv).unwrap();
    let cfg = r#"
input = "people.csv"
algorithm = "mondrian"
k = 5
eps = 2.0
confidence = 0.9
seed = 3
runs = 2

[[column]]
name = "name"
kind = "categorical"
role = "explicit"

[[column]]
name = "age"
kind = "numeric"
role = "k_quasi"

[[column]]
name = "sex"
kind = "categorical"
role = "k_quasi"
order = ["Female", "Male"]

[[column]]
name = "height"
kind = "numeric"
role = "eps_quasi"
"#;
    let path = dir.join("people.toml");
    std::fs::write(&path, cfg).unwrap();
    path
}

#[test]
fn anonymise_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg = cfg.to_str().unwrap();
    for out in ["a", "b"] {
        ok(&keps(&["anonymise", "--config", cfg, "--out", out], dir.path()));
    }
    let a = std::fs::read_to_string(dir.path().join("a/anonymised.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b/anonymised.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.lines().next().unwrap(), "age,sex,height");
    assert!(!a.contains("p1,"));
    assert!(dir.path().join("a/report.json").exists());
    assert!(!dir.path().join("a/linkage.DEBUG-NOT-FOR-RELEASE.csv").exists());

    ok(&keps(&["anonymise", "--config", cfg, "--out", "c", "--seed", "99"], dir.path()));
    let c = std::fs::read_to_string(dir.path().join("c/anonymised.csv")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn linkage_feeds_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg = cfg.to_str().unwrap();
    let out = keps(&["anonymise", "--config", cfg, "--out", "o", "--keep-linkage"], dir.path());
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("do not release"));
    let link = dir.path().join("o/linkage.DEBUG-NOT-FOR-RELEASE.csv");
    assert!(link.exists());

    let json = ok(&keps(
        &[
            "evaluate",
            "--config",
            cfg,
            "--published",
            "o/anonymised.csv",
            "--linkage",
            link.to_str().unwrap(),
        ],
        dir.path(),
    ));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["empirical_error"].as_f64().unwrap() > 0.0);
    assert!(v["risk"]["risk"].as_f64().unwrap() <= 1.0);
}

#[test]
fn evaluate_identity_has_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let original = std::fs::read_to_string(dir.path().join("people.csv")).unwrap();
    let published: String = original
        .lines()
        .map(|l| l.split_once(',').unwrap().1.to_string() + "\n")
        .collect();
    std::fs::write(dir.path().join("same.csv"), published).unwrap();
    let json = ok(&keps(
        &["evaluate", "--config", cfg.to_str().unwrap(), "--published", "same.csv", "--k", "2"],
        dir.path(),
    ));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["empirical_error"].as_f64().unwrap(), 0.0);
    assert_eq!(v["risk"]["risk"].as_f64().unwrap(), 1.0);
}

#[test]
fn grid_default_lists() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    ok(&keps(&["grid", "--config", cfg.to_str().unwrap(), "--runs", "1", "--out", "g"], dir.path()));
    let text = std::fs::read_to_string(dir.path().join("g/grid.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,eps,expected_error,empirical_error,risk,conf_suppression_pct,ola_suppression_pct"
    );
    assert_eq!(lines.count(), 42);
}

#[test]
fn synth_appends_columns() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("in.csv"), "age,sex\n30,Male\n45,Female\n71,F\n").unwrap();
    let out = keps(&["synth", "--input", "in.csv"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--params"));

    ok(&keps(
        &["synth", "--input", "in.csv", "--params", "builtin:plausible", "--measures", "height,weight", "--out", "s"],
        dir.path(),
    ));
    let text = std::fs::read_to_string(dir.path().join("s/synth.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "age,sex,height,weight");
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn hierarchies_lists_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&keps(&["hierarchies"], dir.path()));
    for name in ["year_of_birth", "gender", "race", "marital_status"] {
        assert!(text.contains(&format!("builtin:{name}")), "{text}");
    }
}

#[test]
fn errors_name_their_stage() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let text = std::fs::read_to_string(&cfg).unwrap().replace("people.csv", "absent.csv");
    std::fs::write(&cfg, text).unwrap();
    let out = keps(&["anonymise", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("load"), "{err}");

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "k = 1\n").unwrap();
    let out = keps(&["anonymise", "--config", bad.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
