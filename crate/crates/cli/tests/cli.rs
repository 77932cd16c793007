//! End-to-end CLI checks: regime dispatch lines, exit codes, cache
//! corruption recovery, and byte-identical reruns.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cusplf"))
}

fn workdir(name: &str) -> (PathBuf, PathBuf) {
    let base = std::env::temp_dir().join(format!("cusplf-cli-{name}"));
    fs::remove_dir_all(&base).ok();
    fs::create_dir_all(&base).unwrap();
    (base.join("out"), base.join("cache"))
}

fn common_args(cmd: &mut Command, out: &PathBuf, cache: &PathBuf) {
    cmd.arg("--weight")
        .arg("12")
        .arg("--length")
        .arg("4000")
        .arg("--out")
        .arg(out)
        .arg("--cache")
        .arg(cache);
}

#[test]
fn eval_regime_dispatch() {
    // Default-length table: the dispatch thresholds of the shipped
    // configuration are what the contract describes.
    let (out, cache) = workdir("eval");
    for (s, m, want) in [
        ("3,0", "0", "series"),
        ("0.5,14", "0", "completed"),
        ("-3,0", "1", "reflected"),
    ] {
        let mut cmd = bin();
        cmd.arg("--weight")
            .arg("12")
            .arg("--out")
            .arg(&out)
            .arg("--cache")
            .arg(&cache);
        let output = cmd
            .arg("eval")
            .arg("--s")
            .arg(s)
            .arg("--order")
            .arg(m)
            .output()
            .unwrap();
        assert!(output.status.success());
        let stdout = String::from_utf8(output.stdout).unwrap();
        assert!(
            stdout.contains(&format!("regime={want}")),
            "s={s}: {stdout}"
        );
    }
}

#[test]
fn empty_grid_is_usage_error() {
    let (out, cache) = workdir("grid");
    let mut cmd = bin();
    common_args(&mut cmd, &out, &cache);
    let output = cmd.arg("--T").arg("").arg("count").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unknown_weight_is_usage_error() {
    let (out, cache) = workdir("weight");
    let mut cmd = bin();
    cmd.arg("--weight")
        .arg("14")
        .arg("--out")
        .arg(&out)
        .arg("--cache")
        .arg(&cache)
        .arg("coeffs");
    let output = cmd.output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn corrupted_cache_triggers_rebuild() {
    let (out, cache) = workdir("corrupt");
    let mut cmd = bin();
    common_args(&mut cmd, &out, &cache);
    assert!(cmd.arg("coeffs").output().unwrap().status.success());
    let cache_file = cache.join("w12_n4000.coeffs");
    let text = fs::read_to_string(&cache_file).unwrap();
    fs::write(&cache_file, text.replace("-24", "-23")).unwrap();
    let mut cmd = bin();
    common_args(&mut cmd, &out, &cache);
    let output = cmd.arg("coeffs").output().unwrap();
    assert!(output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("rebuilt"), "{stderr}");
    // cache is sane again
    let text = fs::read_to_string(&cache_file).unwrap();
    assert!(text.lines().nth(2).unwrap().trim() == "-24");
}

#[test]
fn count_csv_columns() {
    let (out, cache) = workdir("count");
    let mut cmd = bin();
    common_args(&mut cmd, &out, &cache);
    let output = cmd
        .arg("--T")
        .arg("12")
        .arg("--m")
        .arg("0")
        .arg("count")
        .output()
        .unwrap();
    assert!(output.status.success());
    let csv = fs::read_to_string(out.join("count_w12.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "m,T,count,main_term,deviation,deviation_over_logT"
    );
    // one zero (t ~ 9.22) below T = 12
    let row = lines.next().unwrap();
    assert!(row.starts_with("0,12.0,1,"), "{row}");
}

/// Acceptance criterion: rerunning verify on the same cache produces
/// byte-identical reports.
#[test]
fn verify_determinism() {
    let (out, cache) = workdir("determinism");
    let run = |out: &PathBuf| {
        let mut cmd = bin();
        cmd.arg("--weight")
            .arg("12")
            .arg("--length")
            .arg("20000")
            .arg("--T")
            .arg("20")
            .arg("--m")
            .arg("0,1")
            .arg("--sigma")
            .arg("0.6,0.8")
            .arg("--out")
            .arg(out)
            .arg("--cache")
            .arg(&cache)
            .arg("verify");
        let output = cmd.output().unwrap();
        assert!(
            output.status.success(),
            "verify failed: {}",
            String::from_utf8_lossy(&output.stdout)
        );
        fs::read(out.join("verify_w12.json")).unwrap()
    };
    let report1 = run(&out);
    let out2 = out.with_file_name("out2");
    let report2 = run(&out2);
    assert_eq!(report1, report2, "verify reports differ between runs");
    println!("ACCEPTANCE 11 [PRIMARY] determinism: PASS (byte-identical verify reports)");
}
