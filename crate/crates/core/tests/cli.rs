use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pinch-curvature")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sweep_is_byte_identical_and_reportable() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--grid", "1024", "--workers", "4"];
    let a = run(&args, dir.path());
    let b = run(&["sweep", "--grid", "1024", "--workers", "1"], dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("l,K,R,Pi,inner00,inner11,inner01,lemma7Bound,gridSize,bcMode,profileC1,schema_version\n"));

    let path = dir.path().join("sweep.csv");
    let o = run(&["sweep", "--grid", "1024", "--out", path.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(&path).unwrap(), text);

    let rep = run(&["report", path.to_str().unwrap()], dir.path());
    assert!(rep.status.success());
    let shown = stdout(&rep);
    assert_eq!(shown.matches(" pass").count(), 3, "{shown}");
}

#[test]
fn json_sweep_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    let o = run(&["sweep", "--grid", "512", "--format", "json", "--out", path.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["meta"]["grid"], 512);
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert!(run(&["report", path.to_str().unwrap()], dir.path()).status.success());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    fs::write(&cfg, "# short sweep\nlengths = 0.3, 0.2, 0.1\ngrid = 2048\nbc-mode = dirichlet\n").unwrap();
    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--grid", "512"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.contains(",512,dirichlet,")), "{rows:?}");

    fs::write(&cfg, "lengths = 0.3\ncolour = red\n").unwrap();
    let o = run(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn invalid_length_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["sweep", "--lengths", "0.3,1.5"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert_eq!(run(&["sweep", "--grid", "lots"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["sweep", "--unknown-flag", "1"], dir.path()).status.code(), Some(1));
}

#[test]
fn single_length_warns() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["sweep", "--lengths", "0.1", "--grid", "512"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("0.1,")).count(), 1);
    assert!(text.contains("# warning: fits require at least 3 lengths"));
    let path = dir.path().join("one.csv");
    fs::write(&path, &text).unwrap();
    let rep = run(&["report", path.to_str().unwrap()], dir.path());
    assert!(rep.status.success());
    assert_eq!(stdout(&rep).matches("insufficient-data").count(), 3);
}

#[test]
fn truncated_file_reports_offset() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&run(&["sweep", "--grid", "512"], dir.path()));
    let second_row = text.lines().take(2).map(|l| l.len() + 1).sum::<usize>();
    let path = dir.path().join("cut.csv");
    fs::write(&path, &text[..second_row + 30]).unwrap();
    let o = run(&["report", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(&format!("byte {second_row}")), "{err}");

    let missing = dir.path().join("absent.csv");
    assert_eq!(run(&["report", missing.to_str().unwrap()], dir.path()).status.code(), Some(3));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("no/such/dir/out.csv");
    let o = run(&["sweep", "--lengths", "0.3", "--grid", "256", "--out", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn solve_map_and_operator_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve-map", "0.3", "0.25", "--json"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["c0"].as_f64().unwrap() > 0.0);
    assert_eq!(run(&["solve-map", "0.3", "1.2"], dir.path()).status.code(), Some(1));

    let o = run(&["operator-check", "0.2"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 9);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");

    let coarse = stdout(&run(&["operator-check", "0.2", "--fd-n", "64"], dir.path()));
    let fd: Vec<&str> = coarse.lines().filter(|l| l.contains("finite differences")).collect();
    assert_eq!(fd.len(), 2);
    assert!(fd.iter().all(|l| l.starts_with("FAIL")), "{coarse}");
}
