use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_musicpref");

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(cwd).output().unwrap()
}

fn ok(args: &[&str], cwd: &Path) {
    let out = run(args, cwd);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "run.json" {
                out.push(p.strip_prefix(dir).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn pipeline(work: &Path) {
    fs::write(
        work.join("effect.json"),
        r#"{"region":"Frontal_Right","band":"alpha","power_ratio":2.0,"fam_shift":0.3,"resr_ratio":1.3,"blink_rate":6.0,"seed":4,"sample_rate_hz":150.0}"#,
    )
    .unwrap();
    fs::write(
        work.join("dsp.json"),
        r#"{"notch_hz":50,"notch_q":30,"hp_hz":0.1,"hp_order":5,"bp_hz":[2,45],"bp_order":4,"ica":{"enabled":false,"threshold":0.6,"seed":0,"decimate_hz":null}}"#,
    )
    .unwrap();
    fs::write(
        work.join("grid.json"),
        r#"{"SVM":[{"family":"svm","c":1,"gamma":0.1,"kernel":"rbf","degree":3},{"family":"svm","c":0.1,"gamma":0.1,"kernel":"linear","degree":3}]}"#,
    )
    .unwrap();
    ok(&["synth", "effect.json", "-o", "raw", "--participants", "10", "--music", "8"], work);
    ok(&["ingest", "raw", "-o", "corpus"], work);
    ok(&["preprocess", "corpus", "-c", "dsp.json", "-o", "pre"], work);
    ok(&["features", "pre", "-o", "feat"], work);
    ok(&["stats", "feat", "-o", "stats/stats.csv"], work);
    ok(
        &[
            "classify", "feat", "--models", "svm", "--grid", "grid.json", "--behaviors", "none,fam+resr",
            "--regions", "Frontal_Right", "--music-types", "melody", "-o", "reports",
        ],
        work,
    );
    ok(&["report", "reports", "--format", "md", "-o", "reports/table.md"], work);
}

#[test]
fn rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    pipeline(a.path());
    pipeline(b.path());
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert_eq!(fa, fb);
    assert!(fa.len() > 20);
    for f in &fa {
        assert!(fs::read(a.path().join(f)).unwrap() == fs::read(b.path().join(f)).unwrap(), "{f:?} differs");
    }
    let table = fs::read_to_string(a.path().join("reports/table.md")).unwrap();
    assert!(table.contains("SVM"), "{table}");
    assert!(a.path().join("pre/run.json").exists());
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn bad_flag_values_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("effect.json"), "{not json").unwrap();
    let out = run(&["synth", "effect.json", "-o", "x"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["classify", "feat", "--models", "tree", "-o", "r"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_corpus_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["ingest", "nowhere", "-o", "corpus"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}
