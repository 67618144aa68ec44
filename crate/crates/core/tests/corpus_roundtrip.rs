use std::fs;
use std::path::Path;

use musicpref::corpus::{export_corpus, import_corpus, label_census, PreferenceLabel};
use musicpref::synth::{generate_corpus, EffectSpec};

fn bytes(dir: &Path, rel: &Path) -> Vec<u8> {
    fs::read(dir.join(rel)).unwrap()
}

fn small_effect() -> EffectSpec {
    let mut e = EffectSpec::null(21);
    e.sample_rate_hz = 100.0;
    e.blink_rate = 10.0;
    e
}

#[test]
fn same_effect_gives_identical_corpus() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ca = generate_corpus(3, 4, &small_effect(), a.path()).unwrap();
    generate_corpus(3, 4, &small_effect(), b.path()).unwrap();
    for name in ["manifest.json", "trials.csv"] {
        assert_eq!(bytes(a.path(), Path::new(name)), bytes(b.path(), Path::new(name)));
    }
    for t in &ca.trials {
        assert_eq!(bytes(a.path(), &t.eeg_path), bytes(b.path(), &t.eeg_path));
    }
}

#[test]
fn import_export_import_is_bit_identical() {
    let (raw, out) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    generate_corpus(3, 4, &small_effect(), raw.path()).unwrap();
    let first = import_corpus(raw.path(), &raw.path().join("manifest.json")).unwrap();
    assert!(first.rejected.is_empty());
    export_corpus(&first, out.path()).unwrap();
    let second = import_corpus(out.path(), &out.path().join("manifest.json")).unwrap();
    assert_eq!(first.trials, second.trials);
    for t in &first.trials {
        assert_eq!(bytes(raw.path(), &t.eeg_path), bytes(out.path(), &t.eeg_path));
        assert_eq!(first.load_epoch(t).unwrap(), second.load_epoch(t).unwrap());
    }

    let census = label_census(&second.trials);
    let summed: usize = PreferenceLabel::ALL.iter().map(|&l| census.total_of(l)).sum();
    assert_eq!(summed, second.trials.len());
    assert_eq!(census.total_trials(), second.trials.len());
}
