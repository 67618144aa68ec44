//! End to end in memory: synthetic corpus with a right-frontal alpha
//! effect, preprocessing, band features, group tests and an SVM study.
//!
//! `cargo run --release --example synth_study -- 8 12` sets participants
//! and stimuli.

use std::collections::BTreeMap;

use musicpref::corpus::{MusicType, PreferenceLabel};
use musicpref::dsp::PreprocessConfig;
use musicpref::learn::{Kernel, ModelFamily, Params, SvmParams};
use musicpref::modelsel::{run_study, Behaviors, StudyPlan};
use musicpref::pipeline::synth_feature_table;
use musicpref::spectral::{Band, RegionName, SpectralConfig};
use musicpref::stats::{compare_groups, Comparison, Group, Variable};
use musicpref::synth::{plan, EffectSpec};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("counts are integers"));
    let participants = args.next().unwrap_or(10);
    let music = args.next().unwrap_or(16);

    let mut effect = EffectSpec::null(42);
    effect.sample_rate_hz = 300.0;
    effect.power_ratio = 2.0;
    effect.fam_shift = 0.3;
    effect.resr_ratio = 1.3;
    let p = plan(participants, music, &effect).unwrap();
    println!("{} trials planned", p.trials.len());

    let mut pre = PreprocessConfig::default();
    pre.ica.enabled = false;
    let regions = [RegionName::FrontalRight, RegionName::FrontalLeft];
    let table = synth_feature_table(&p, &regions, |t| t.music_type == MusicType::Melody, &pre, &SpectralConfig::default()).unwrap();

    let g = |l| Group::new(l, MusicType::Melody);
    for variable in [
        Variable::Familiarity,
        Variable::ResponseRate,
        Variable::BandPower { region: RegionName::FrontalRight, band: Band::Alpha },
        Variable::BandPower { region: RegionName::FrontalLeft, band: Band::Alpha },
    ] {
        let rec = compare_groups(&table, Comparison { a: g(PreferenceLabel::Favored), b: g(PreferenceLabel::NonFavored), variable }, 0.05).unwrap();
        println!("{}: p = {:.2e}", rec.label(), rec.result.p_value);
    }

    let mut grids = BTreeMap::new();
    grids.insert(
        ModelFamily::Svm,
        [(Kernel::Linear, 1.0, 0.01), (Kernel::Rbf, 1.0, 0.01), (Kernel::Rbf, 10.0, 0.11)]
            .iter()
            .map(|&(k, c, gamma)| Params::Svm(SvmParams::new(k, c, gamma, 3)))
            .collect(),
    );
    let study = run_study(
        &table,
        &StudyPlan {
            models: vec![ModelFamily::Svm],
            regions: regions.to_vec(),
            behaviors: vec![Behaviors::None, Behaviors::FamResR],
            music_types: vec![MusicType::Melody],
            grids,
            ..StudyPlan::default()
        },
    );
    print!("{}", study.to_markdown());
}
