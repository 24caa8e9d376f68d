use std::path::PathBuf;
use std::process::{Command, Output};

use isogap_cli::{CliError, Exit};

fn isogap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isogap")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("isogap-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn constants_pass_on_uniform() {
    let o = isogap(&["constants", "--fixture", "uniform01"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("reference_d_che") && out.ends_with("PASS\n"), "{out}");
}

#[test]
fn json_report_envelope() {
    let o = isogap(&["bounds", "--fixture", "gaussian1d", "--json", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "bounds");
    assert_eq!(v["seeds"]["resolution"], 7);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(v["summary"]["pass"], true);
}

#[test]
fn profile_csv_on_stdout() {
    let o = isogap(&["profile", "--fixture", "counterexample3"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("t,I,err,method,minimizer\n"), "{out}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS"));
}

#[test]
fn config_errors_exit_4() {
    assert_eq!(code(&isogap(&["constants"])), 4);
    assert_eq!(code(&isogap(&["constants", "--fixture", "no_such_fixture"])), 4);
    assert_eq!(code(&isogap(&["constants", "--fixture", "uniform01", "--h=-1"])), 4);
    assert_eq!(code(&isogap(&["profile", "--fixture", "uniform01", "--power", "0"])), 4);
    assert_eq!(code(&isogap(&["verify", "--fixture-set", "nope"])), 4);
    assert_eq!(code(&isogap(&["frobnicate"])), 4);
    assert_eq!(code(&isogap(&["--help"])), 0);
}

#[test]
fn numerical_errors_map_to_3() {
    let e = CliError::Core(isogap::Error::NoConvergence { iterations: 10, residual: 1.0 });
    assert_eq!(e.exit(), Exit::Numerical);
    assert_eq!(CliError::Config("x".into()).exit(), Exit::Config);
}

#[test]
fn strict_band_violation_exits_2() {
    let dir = scratch("strict");
    let manifest = dir.join("manifest.txt");
    // uniform01 has D_Che / D_Poin = 2/π, below this band.
    std::fs::write(&manifest, "set.one=uniform01\nband.che_over_poin=0.7,2.1\n").unwrap();
    let m = manifest.to_str().unwrap();
    let lax = isogap(&["constants", "--fixture-set", "one", "--manifest", m]);
    assert_eq!(code(&lax), 0);
    assert!(stdout(&lax).contains("warning: uniform01.che_over_poin"));
    let strict = isogap(&["constants", "--fixture-set", "one", "--manifest", m, "--strict"]);
    assert_eq!(code(&strict), 2);
    assert!(stdout(&strict).ends_with("(strict): FAIL\n"));
}

#[test]
fn fixture_file_is_accepted() {
    let dir = scratch("file");
    let f = dir.join("mine.kv");
    std::fs::write(&f, "name=wide\nkind=uniform\nlo=0\nhi=2\nexpect.d_che=1\ntol.d_che=1e-6\n").unwrap();
    let o = isogap(&["constants", "--fixture", f.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("wide"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    for d in [&a, &b] {
        let o = isogap(&["verify", "--fixture-set", "minimal", "--out", d.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
    }
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "report.json"));
    assert!(names.iter().any(|n| n == "uniform01.csv"));
    for n in names {
        assert_eq!(std::fs::read(a.join(&n)).unwrap(), std::fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
}
