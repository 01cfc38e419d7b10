use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn radfrac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radfrac"))
        .args(args)
        .env_remove("OML_OUT")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn smoke() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/smoke.cfg").display().to_string()
}

fn write_cfg(dir: &Path, body: &str) -> String {
    let p = dir.join("x.cfg");
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn list_formats() {
    let o = radfrac(&["list"]);
    assert_eq!(code(&o), 0);
    let out = text(&o.stdout);
    assert_eq!(out.lines().count(), 9);
    for id in ["weak_modular", "two_weight", "condition_wtl", "pointwise_control", "lp_bounds", "a1", "bp_inheritance", "gaussian_failure", "ahlfors_gap"] {
        assert!(out.lines().any(|l| l.split_whitespace().next() == Some(id)), "{id}");
    }
    let verbose = text(&radfrac(&["list", "--verbose"]).stdout);
    assert_eq!(verbose.lines().count(), 18);
    let csv = text(&radfrac(&["list", "--format", "csv"]).stdout);
    assert_eq!(csv.lines().next(), Some("id,summary"));
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn smoke_run_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = radfrac(&["run", "--config", &smoke(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let stdout = text(&o.stdout);
    for id in ["weak_modular", "lp_bounds", "a1"] {
        assert!(stdout.contains(&format!("{id}: pass")), "{stdout}");
    }
    let again = tmp.path().join("p");
    let o = radfrac(&["run", "--config", &smoke(), "--out", again.to_str().unwrap(), "--override", "family.k_max=+1"]);
    assert_eq!(code(&o), 0);
    let r = radfrac(&["report", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", text(&r.stderr));
    let table = text(&r.stdout);
    assert!(table.contains("a1") && table.contains("weak_modular"));
}

#[test]
fn same_seed_same_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "measure.resolution=2^-7\nexp.id=a1\n");
    for d in ["a", "b"] {
        let o = radfrac(&["run", "--config", &cfg, "--out", tmp.path().join(d).to_str().unwrap(), "--seed", "9"]);
        assert_eq!(code(&o), 0);
    }
    for f in ["a1_report.csv", "a1_summary.csv", "a1_plot.csv", "run.cfg"] {
        assert_eq!(fs::read(tmp.path().join("a").join(f)).unwrap(), fs::read(tmp.path().join("b").join(f)).unwrap(), "{f}");
    }
    let saved = fs::read_to_string(tmp.path().join("a/run.cfg")).unwrap();
    assert!(saved.contains("seed=9"));
}

#[test]
fn hypothesis_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "measure.resolution=2^-6\nyoung.B=power:p=2,c=0.5\nexp.id=two_weight\n");
    let o = radfrac(&["run", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(text(&o.stderr).contains("check_submultiplicative"));
}

#[test]
fn config_problems_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cfg = write_cfg(tmp.path(), "exp.id=a1\nmeasure.kind lebesgue\n");
    let o = radfrac(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    let err = text(&o.stderr);
    assert!(err.contains("line 2") && err.contains("column"), "{err}");

    let cfg = write_cfg(tmp.path(), "exp.id=not_an_experiment\n");
    let o = radfrac(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert!(text(&o.stderr).contains("not_an_experiment"));

    let o = radfrac(&["run", "--config", tmp.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    let o = radfrac(&["report", "--out", tmp.path().join("empty").to_str().unwrap()]);
    assert_eq!(code(&o), 4);
}

#[test]
fn failing_verdict_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "measure.kind=cantor\nmeasure.levels=6\nexp.id=condition_wtl\ncondition_wtl.expect=ahlfors\n");
    let o = radfrac(&["run", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(text(&o.stdout).contains("condition_wtl: fail"));
}

#[test]
fn report_schema_error_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("x_summary.csv"), "experiment_id\nx\n").unwrap();
    let o = radfrac(&["report", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 4);
}

#[test]
fn usage() {
    assert_eq!(code(&radfrac(&["--help"])), 0);
    assert_eq!(code(&radfrac(&["--version"])), 0);
    assert_eq!(code(&radfrac(&["run", "--bogus"])), 4);
    assert_eq!(code(&radfrac(&[])), 4);
}

#[test]
fn dump_fields_writes_sidecars() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "measure.resolution=2^-6\nexp.id=a1\n");
    let out = tmp.path().join("o");
    let o = radfrac(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--dump-fields"]);
    assert_eq!(code(&o), 0);
    assert!(out.join("a1_field.atoms").is_file());
    assert!(out.join("a1_field_cubes.csv").is_file());
}
