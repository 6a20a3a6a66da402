//! The end-to-end pipeline: corpus, preprocessing, n-gram features,
//! information-gain selection, resampling sweeps, SVM training, evaluation
//! and result tables.
//!
//! Every random choice derives from the config seed, and outputs are
//! assembled in a fixed order, so a config fully determines the output tree.

mod config;
mod report;

pub use config::{
    CorpusSource, Criterion, ExperimentConfig, Protocol, Sampler, SamplerSpec, SelectionScope,
};
pub use report::{select_representative, sweep_csv, ExperimentOutput, SamplerOutcome, SweepPoint};

use rayon::prelude::*;

use crate::adapt::{self, Scheme};
use crate::classify::{predict, train_multiclass, SvmSettings};
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::evaluate::{aggregate_folds, confusion, ConfusionMatrix, FScore};
use crate::igselect::{rank_features, select_top, IgMode};
use crate::resample::{Method, ResamplePlan};
use crate::rng::derive;
use crate::synth::{generate_synthetic, SyntheticProfile};
use crate::textprep::{normalize, tokenize, RawDocument, TokenStream};
use crate::vectorize::{
    build_vocabulary, complement, stratified_kfold_indices, stratified_split_indices,
    vectorize_corpus, Vocabulary,
};

/// Loads or generates the corpus and the number of classes it declares.
pub fn load_corpus(source: &CorpusSource) -> Result<(Vec<RawDocument>, usize)> {
    let from_profile = |p: &SyntheticProfile| Ok((generate_synthetic(p)?, p.class_counts.len()));
    match source {
        CorpusSource::Path(p) => {
            let docs = crate::io::read_corpus(p)?;
            let m = docs.iter().map(|d| d.label).max().unwrap_or(0) as usize;
            Ok((docs, m))
        }
        CorpusSource::Profile(name) => from_profile(&SyntheticProfile::named(name)?),
        CorpusSource::Synthetic(p) => from_profile(p),
    }
}

/// Normalization (when enabled) followed by tokenization.
pub fn token_streams(docs: &[RawDocument], preprocess: bool) -> Vec<TokenStream> {
    docs.par_iter()
        .map(|d| {
            if preprocess {
                tokenize(&normalize(d))
            } else {
                tokenize(d)
            }
        })
        .collect()
}

/// Training and test rows of one evaluation split, with the features used.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Selected feature indices of the full vocabulary, ascending.
    pub features: Vec<usize>,
}

/// Everything before resampling: the vectorized corpus over the full
/// vocabulary and the evaluation splits.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub vocabulary: Vocabulary,
    pub dataset: Dataset,
    pub splits: Vec<Split>,
}

impl Prepared {
    /// The dataset restricted to one split's features, as train and test sets.
    pub fn split_datasets(&self, split: &Split) -> (Dataset, Dataset) {
        let projected = self.dataset.project(&split.features);
        (
            projected.subset(&split.train),
            projected.subset(&split.test),
        )
    }
}

fn select(ds: &Dataset, mode: IgMode, target: Option<usize>) -> Vec<usize> {
    match target {
        None => (0..ds.dim()).collect(),
        Some(k) => {
            let sel = select_top(&rank_features(ds, mode), k);
            if sel.overshoot {
                log::warn!(
                    "top tie group holds {} features, more than the {k} requested",
                    sel.features.len()
                );
            }
            sel.features
        }
    }
}

pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    let (docs, m) = load_corpus(&config.corpus)?;
    if docs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    config.validate_classes(m)?;
    let streams = token_streams(&docs, config.preprocess);
    let vocabulary = build_vocabulary(&streams, config.remove_leq);
    let labels: Vec<Label> = docs.iter().map(|d| d.label).collect();
    let dataset = vectorize_corpus(&streams, &labels, m, &vocabulary)?;
    log::info!(
        "{} documents, {} classes, {} features",
        dataset.len(),
        m,
        vocabulary.len()
    );

    let split_seed = derive(config.seed, "split", 0);
    let index_pairs: Vec<(Vec<usize>, Vec<usize>)> = match config.protocol {
        Protocol::Holdout { train_fraction } => vec![stratified_split_indices(
            &dataset,
            train_fraction,
            split_seed,
        )],
        Protocol::Kfold { k } => stratified_kfold_indices(&dataset, k, split_seed)?
            .into_iter()
            .map(|test| (complement(dataset.len(), &test), test))
            .collect(),
    };
    let full_selection = match config.selection_scope {
        SelectionScope::Full => Some(select(&dataset, config.ig_mode, config.features)),
        SelectionScope::Train => None,
    };
    let splits = index_pairs
        .into_iter()
        .map(|(train, test)| {
            let features = full_selection.clone().unwrap_or_else(|| {
                select(&dataset.subset(&train), config.ig_mode, config.features)
            });
            Split {
                train,
                test,
                features,
            }
        })
        .collect();
    Ok(Prepared {
        vocabulary,
        dataset,
        splits,
    })
}

/// The plan an experiment uses for `method` at one sweep position. ENN and
/// RENN spare the smallest class of the training data.
pub fn experiment_plan(
    method: Method,
    train: &Dataset,
    k: Option<usize>,
    ratio: Option<f64>,
    seed: u64,
) -> ResamplePlan {
    let mut plan = ResamplePlan::new(method).with_seed(seed);
    plan.ratio = ratio;
    if let Some(k) = k {
        plan.k_neighbors = k;
    }
    if matches!(method, Method::Enn | Method::Renn) {
        plan.protect = train.minority_class().into_iter().collect();
    }
    plan
}

/// Resamples the training set (unless `plan` is `None`), trains the SVM and
/// predicts the test set.
pub fn evaluate_plan(
    train: &Dataset,
    test: &Dataset,
    plan: Option<&ResamplePlan>,
    scheme: Scheme,
    svm: &SvmSettings,
    svm_seed: u64,
) -> Result<Vec<Label>> {
    let resampled;
    let train = match plan {
        None => train,
        Some(p) => {
            resampled = adapt::apply(train, p, scheme)?.dataset;
            &resampled
        }
    };
    let model = train_multiclass(train, svm.reg, svm.epochs, svm_seed)?;
    predict(&model, test.rows())
}

fn run_point(
    config: &ExperimentConfig,
    prepared: &Prepared,
    folds: &[(Dataset, Dataset)],
    spec: &SamplerSpec,
    ratio_index: usize,
    ratio: Option<f64>,
) -> Result<SweepPoint> {
    let m = prepared.dataset.n_classes();
    let mut matrices: Vec<ConfusionMatrix> = Vec::with_capacity(folds.len());
    let mut rows = Vec::new();
    let mut truth = Vec::new();
    let mut predicted = Vec::new();
    for (f, ((train, test), split)) in folds.iter().zip(&prepared.splits).enumerate() {
        let plan = match spec.method {
            Sampler::None => None,
            Sampler::Method(method) => {
                let seed =
                    derive(config.seed, &spec.key(), f as u64).wrapping_add(ratio_index as u64);
                Some(experiment_plan(method, train, spec.k, ratio, seed))
            }
        };
        let pred = evaluate_plan(
            train,
            test,
            plan.as_ref(),
            spec.scheme,
            &config.svm,
            derive(config.seed, "svm", f as u64),
        )?;
        matrices.push(confusion(test.labels(), &pred, m)?);
        rows.extend_from_slice(&split.test);
        truth.extend_from_slice(test.labels());
        predicted.extend(pred);
    }
    Ok(SweepPoint {
        ratio,
        report: aggregate_folds(&matrices, config.fscore)?,
        rows,
        truth,
        predicted,
    })
}

/// Runs every sampler over its ratio grid and assembles the output tree.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let prepared = prepare(config)?;
    run_prepared(config, &prepared)
}

pub fn run_prepared(config: &ExperimentConfig, prepared: &Prepared) -> Result<ExperimentOutput> {
    let folds: Vec<(Dataset, Dataset)> = prepared
        .splits
        .iter()
        .map(|s| prepared.split_datasets(s))
        .collect();
    let mut jobs = Vec::new();
    for (s, spec) in config.samplers.iter().enumerate() {
        if spec.swept() {
            let ratios = spec.ratios.as_ref().unwrap_or(&config.ratios);
            jobs.extend(ratios.iter().enumerate().map(|(i, &r)| (s, i, Some(r))));
        } else {
            jobs.push((s, 0, None));
        }
    }
    let results: Vec<(usize, Result<SweepPoint>)> = jobs
        .par_iter()
        .map(|&(s, i, r)| {
            let spec = &config.samplers[s];
            let out = run_point(config, prepared, &folds, spec, i, r);
            if let Err(e) = &out {
                log::warn!("{} at ratio {r:?} failed: {e}", spec.key());
            }
            (s, out)
        })
        .collect();
    let mut outcomes: Vec<SamplerOutcome> = config
        .samplers
        .iter()
        .map(|spec| SamplerOutcome {
            spec: spec.clone(),
            points: Vec::new(),
            failure: None,
        })
        .collect();
    for (s, res) in results {
        match res {
            Ok(p) => outcomes[s].points.push(p),
            Err(e) => {
                outcomes[s].failure.get_or_insert_with(|| e.to_string());
            }
        }
    }
    Ok(ExperimentOutput::assemble(
        config,
        &prepared.dataset,
        outcomes,
    ))
}

/// Evaluates one method over a ratio grid on fixed train and test sets,
/// the building block of the `sweep` command. Non-ratio methods give one point.
#[allow(clippy::too_many_arguments)]
pub fn sweep_on(
    train: &Dataset,
    test: &Dataset,
    method: Method,
    scheme: Scheme,
    ratios: &[f64],
    svm: &SvmSettings,
    fscore: FScore,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    let grid: Vec<Option<f64>> = if method.uses_ratio() {
        ratios.iter().map(|&r| Some(r)).collect()
    } else {
        vec![None]
    };
    grid.par_iter()
        .enumerate()
        .map(|(i, &ratio)| {
            let plan = experiment_plan(method, train, None, ratio, seed.wrapping_add(i as u64));
            let pred = evaluate_plan(
                train,
                test,
                Some(&plan),
                scheme,
                svm,
                derive(seed, "svm", 0),
            )?;
            let cm = confusion(test.labels(), &pred, train.n_classes())?;
            Ok(SweepPoint {
                ratio,
                report: aggregate_folds(&[cm], fscore)?,
                rows: (0..test.len()).collect(),
                truth: test.labels().to_vec(),
                predicted: pred,
            })
        })
        .collect()
}
