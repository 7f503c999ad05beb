use std::path::Path;
use std::process::{Command, Output};

fn inc_sim(dir: &Path, args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_inc-sim"));
    cmd.args(args).arg("--out-dir").arg(dir.join("runs"));
    cmd.env_remove("INC_SIM_SEED");
    if let Some(s) = env_seed {
        cmd.env("INC_SIM_SEED", s);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL: &str = "seed = 3\n[learning]\nepisode_len = 5\nhidden_width = 8\n";

fn run_dirs(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir.join("runs")).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

fn summary_of(out: &Output, dir: &Path) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let id = text.split_whitespace().nth(1).unwrap();
    let raw = std::fs::read_to_string(dir.join("runs").join(id).join("summary.json")).unwrap();
    serde_json::from_str(&raw).unwrap()
}

#[test]
fn invalid_config_exits_with_config_code() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "[topology]\nnum_users = 0\n");
    let out = inc_sim(d.path(), &["train", "--config", &cfg, "--episodes", "1"], None);
    assert_eq!(out.status.code(), Some(2));
    let unknown = write_config(d.path(), "[topology]\nusers = 3\n");
    let out = inc_sim(d.path(), &["baseline", "--config", &unknown, "--episodes", "1"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_precedence_file_env_flag() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), SMALL);
    let base = ["baseline", "--config", &cfg, "--episodes", "1"];
    let out = inc_sim(d.path(), &base, None);
    assert!(out.status.success());
    assert_eq!(summary_of(&out, d.path())["seed"], 3);
    let out = inc_sim(d.path(), &base, Some("17"));
    assert_eq!(summary_of(&out, d.path())["seed"], 17);
    let mut with_flag = base.to_vec();
    with_flag.extend(["--seed", "29"]);
    let out = inc_sim(d.path(), &with_flag, Some("17"));
    assert_eq!(summary_of(&out, d.path())["seed"], 29);
}

#[test]
fn train_then_eval_against_baseline() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), SMALL);
    let out = inc_sim(d.path(), &["train", "--config", &cfg, "--episodes", "2", "--arch", "masc"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trained = run_dirs(d.path()).pop().unwrap();
    let ck = trained.join("checkpoint.bin");
    assert!(ck.exists() && trained.join("slots.csv").exists() && trained.join("episodes.csv").exists());
    let out = inc_sim(d.path(), &["baseline", "--config", &cfg, "--episodes", "2", "--baseline", "equal"], None);
    let reference = summary_of(&out, d.path())["run_id"].as_str().unwrap().to_string();
    let out = inc_sim(
        d.path(),
        &["eval", "--config", &cfg, "--episodes", "2", "--checkpoint", ck.to_str().unwrap(), "--reference", &reference],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary_of(&out, d.path());
    assert_eq!(s["mode"], "eval");
    assert_eq!(s["pg"]["reference"], reference.as_str());
    assert!(String::from_utf8_lossy(&out.stdout).contains("median user PG"));
}

#[test]
fn missing_reference_fails() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), SMALL);
    let out = inc_sim(d.path(), &["baseline", "--config", &cfg, "--episodes", "1", "--reference", "absent"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eval_needs_a_target() {
    let d = tempfile::tempdir().unwrap();
    let out = inc_sim(d.path(), &["eval", "--episodes", "1"], None);
    assert!(!out.status.success());
}
