use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use hmlab::config::Method;
use hmlab::experiments::{RunOptions, TableSpec};
use hmlab::io::{RunManifest, MANIFEST_NAME};
use hmlab::jobs::{execute, rerun, Job};
use hmlab::Exec;

fn contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn quick_table() -> Job {
    let mut spec = TableSpec::published(7).unwrap().with_refinements(vec![0]);
    spec.methods = vec![Method::Berenger, Method::HmlV3];
    Job::RunTable { spec }
}

#[test]
fn reruns_from_the_manifest_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    let opts = RunOptions {
        exec: Exec::Parallel,
        snapshots: true,
        timings: false,
    };
    execute(&quick_table(), &opts, &a).unwrap();
    execute(&quick_table(), &RunOptions { exec: Exec::Sequential, ..opts }, &b).unwrap();
    rerun(&a.join(MANIFEST_NAME), &c, Exec::Parallel).unwrap();
    let first = contents(&a);
    assert!(first.keys().any(|k| k.ends_with(".pgm")));
    assert_eq!(first, contents(&b));
    assert_eq!(first, contents(&c));
}

#[test]
fn manifest_lists_every_file_with_its_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let out = execute(&quick_table(), &RunOptions { timings: false, ..RunOptions::default() }, tmp.path()).unwrap();
    let m = RunManifest::read(&tmp.path().join(MANIFEST_NAME)).unwrap();
    assert_eq!(m, out.manifest);
    assert_eq!(m.seeds, vec![hmlab::experiments::DEFAULT_SEED]);
    for f in &m.files {
        let bytes = fs::read(tmp.path().join(&f.path)).unwrap();
        assert_eq!(hmlab::io::sha256_hex(&bytes), f.sha256);
        assert_eq!(bytes.len() as u64, f.bytes);
    }
    let table = fs::read_to_string(tmp.path().join("table7.csv")).unwrap();
    let header = table.lines().next().unwrap();
    assert!(header.starts_with("method,"), "{header}");
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hmlab")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = |name: &str| tmp.path().join(name).to_string_lossy().into_owned();

    assert_eq!(cli(&["no-such-command"]).0, 1);
    assert_eq!(cli(&["run-table", "0", "--out", &out("x")]).0, 1);
    assert_eq!(cli(&["amplification-map", "--sigma", "1", "--out", &out("x")]).0, 1);

    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "method = \"smart\"\nbogus_key = 1\n").unwrap();
    assert_eq!(cli(&["run", bad.to_str().unwrap(), "--out", &out("x")]).0, 1);

    let (code, stdout) = cli(&["amplification-map", "--check", "--out", &out("am")]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("PASS classifier matches the sign rule"));

    // a single refinement level cannot show the refinement ratios
    let (code, stdout) = cli(&[
        "run-table", "2", "--refinements", "0", "--methods", "smart,hml_v3", "--check", "--out", &out("t2"),
    ]);
    assert_eq!(code, 3, "{stdout}");
    assert!(stdout.contains("FAIL"));
    assert!(Path::new(&out("t2")).join("table2.csv").exists());
}

#[test]
fn cli_rerun_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let (code, _) = cli(&["symbol-check", "--no-timings", "--out", a.to_str().unwrap()]);
    assert_eq!(code, 0);
    let manifest = a.join(MANIFEST_NAME);
    let (code, _) = cli(&["rerun", manifest.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(contents(&a), contents(&b));
}
