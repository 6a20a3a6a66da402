//! Fixtures shared by the benchmarks.

use sentiskew::experiment::{prepare, CorpusSource, ExperimentConfig};
use sentiskew::synth::SyntheticProfile;
use sentiskew::Dataset;

/// A vectorized synthetic corpus with Table-1 class proportions, reduced to
/// `features` columns by information gain.
pub fn corpus_dataset(docs: usize, features: usize, seed: u64) -> Dataset {
    let profile = SyntheticProfile::scaled(docs).with_seed(seed);
    let mut config = ExperimentConfig::new(CorpusSource::Synthetic(profile), vec![]);
    config.features = Some(features);
    config.seed = seed;
    let prepared = prepare(&config).expect("synthetic corpus prepares");
    let split = &prepared.splits[0];
    prepared.dataset.project(&split.features)
}

/// Same corpus over its full vocabulary, for feature ranking.
pub fn full_vocabulary_dataset(docs: usize, seed: u64) -> Dataset {
    let profile = SyntheticProfile::scaled(docs).with_seed(seed);
    let config = ExperimentConfig::new(CorpusSource::Synthetic(profile), vec![]);
    prepare(&config).expect("synthetic corpus prepares").dataset
}
