//! Writes a small synthetic corpus in canonical form, re-imports it and
//! prints the label census.

use musicpref::corpus::{import_corpus, label_census, MusicType, PreferenceLabel};
use musicpref::synth::{generate_corpus, EffectSpec};

fn main() {
    let dir = std::env::temp_dir().join("musicpref-corpus-example");
    let _ = std::fs::remove_dir_all(&dir);
    let mut effect = EffectSpec::null(5);
    effect.sample_rate_hz = 150.0;
    effect.blink_rate = 12.0;
    generate_corpus(4, 6, &effect, &dir).unwrap();

    let corpus = import_corpus(&dir, &dir.join("manifest.json")).unwrap();
    println!("{} trials, {} rejected, {} channels", corpus.trials.len(), corpus.rejected.len(), corpus.channel_layout().len());
    let census = label_census(&corpus.trials);
    for label in PreferenceLabel::ALL {
        println!(
            "{:>11}: melody {}, song {}, items {}",
            label.as_str(),
            census.trials_of(MusicType::Melody, label),
            census.trials_of(MusicType::Song, label),
            census.items_of(label)
        );
    }
    let first = &corpus.trials[0];
    let epoch = corpus.load_epoch(first).unwrap();
    println!(
        "{} {} {}: {} x {} samples at {} Hz, eog {:?}",
        first.participant_id,
        first.music_id,
        first.music_type.as_str(),
        epoch.n_channels(),
        epoch.n_samples(),
        epoch.sample_rate,
        epoch.eog_indices
    );
    println!("written to {}", dir.display());
}
