//! Bag of 1–3-grams with a corpus-frequency threshold, plus stratified splits.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::dataset::{Dataset, Label, SparseVector};
use crate::error::{Error, Result};
use crate::rng;
use crate::textprep::TokenStream;

pub const MAX_NGRAM: usize = 3;

/// N-gram vocabulary. Entries are sorted lexicographically by n-gram (tokens
/// joined with a single space), so indices do not depend on corpus order.
#[derive(Clone, Debug, PartialEq)]
pub struct Vocabulary {
    entries: Vec<(String, u64)>,
    index: HashMap<String, usize>,
    remove_leq: u64,
}

impl Vocabulary {
    pub fn from_entries(mut entries: Vec<(String, u64)>, remove_leq: u64) -> Self {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (g, _))| (g.clone(), i))
            .collect();
        Vocabulary {
            entries,
            index,
            remove_leq,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn remove_leq(&self) -> u64 {
        self.remove_leq
    }

    pub fn get(&self, ngram: &str) -> Option<usize> {
        self.index.get(ngram).copied()
    }

    pub fn ngram(&self, index: usize) -> &str {
        &self.entries[index].0
    }

    pub fn frequency(&self, index: usize) -> u64 {
        self.entries[index].1
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    /// Keeps the listed feature indices (sorted ascending), renumbered 0..k.
    pub fn project(&self, keep: &[usize]) -> Vocabulary {
        Vocabulary::from_entries(
            keep.iter().map(|&i| self.entries[i].clone()).collect(),
            self.remove_leq,
        )
    }
}

fn for_each_ngram(tokens: &[String], mut f: impl FnMut(String)) {
    for n in 1..=MAX_NGRAM {
        for w in tokens.windows(n) {
            f(w.join(" "));
        }
    }
}

fn count_ngrams(docs: &[TokenStream]) -> HashMap<String, u64> {
    let mut counts = HashMap::new();
    for doc in docs {
        for_each_ngram(&doc.tokens, |g| *counts.entry(g).or_insert(0) += 1);
    }
    counts
}

/// All n-grams (n = 1..=3) whose total corpus frequency exceeds `remove_leq`.
pub fn build_vocabulary(corpus: &[TokenStream], remove_leq: u64) -> Vocabulary {
    let counts = corpus
        .par_chunks(256)
        .map(count_ngrams)
        .reduce(HashMap::new, |mut a, b| {
            for (g, c) in b {
                *a.entry(g).or_insert(0) += c;
            }
            a
        });
    let entries = counts
        .into_iter()
        .filter(|&(_, c)| c > remove_leq)
        .collect();
    Vocabulary::from_entries(entries, remove_leq)
}

/// Occurrence counts of the document's in-vocabulary n-grams.
pub fn vectorize(doc: &TokenStream, vocab: &Vocabulary) -> SparseVector {
    let mut pairs = Vec::new();
    for_each_ngram(&doc.tokens, |g| {
        if let Some(i) = vocab.get(&g) {
            pairs.push((i, 1.0));
        }
    });
    SparseVector::from_pairs(vocab.len(), pairs).expect("vocabulary indices are in range")
}

pub fn vectorize_corpus(
    docs: &[TokenStream],
    labels: &[Label],
    n_classes: usize,
    vocab: &Vocabulary,
) -> Result<Dataset> {
    let rows = docs.par_iter().map(|d| vectorize(d, vocab)).collect();
    Dataset::new(rows, labels.to_vec(), n_classes, vocab.len())
}

/// An exact fraction in (0, 1), e.g. the 2:1 train/test ratio as `2/3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num >= den {
            return Err(Error::InvalidArgument(format!(
                "fraction {num}/{den} must lie strictly between 0 and 1"
            )));
        }
        Ok(Fraction { num, den })
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    /// Accepts `a/b` or a decimal such as `0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse fraction {s:?}"));
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            return Fraction::new(a, b);
        }
        let (int, frac) = s.split_once('.').ok_or_else(bad)?;
        if !int.trim_start_matches('0').is_empty() || frac.is_empty() || frac.len() > 12 {
            return Err(bad());
        }
        let num: u64 = frac.parse().map_err(|_| bad())?;
        let den = 10u64.pow(frac.len() as u32);
        let g = gcd(num, den);
        Fraction::new(num / g.max(1), den / g.max(1))
    }
}

impl serde::Serialize for Fraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Fraction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Per-class train counts: `fraction * n_c` rounded with the largest-remainder
/// method, so the total equals `round(fraction * n)`. Ties go to the lower class.
pub fn stratified_train_counts(class_counts: &[usize], fraction: Fraction) -> Vec<usize> {
    let (num, den) = (fraction.num as u128, fraction.den as u128);
    let total: u128 = class_counts.iter().map(|&n| n as u128).sum();
    let target = (2 * total * num + den) / (2 * den);
    let mut out: Vec<usize> = class_counts
        .iter()
        .map(|&n| (n as u128 * num / den) as usize)
        .collect();
    let assigned: u128 = out.iter().map(|&n| n as u128).sum();
    let mut order: Vec<usize> = (0..class_counts.len()).collect();
    order.sort_by_key(|&c| (std::cmp::Reverse(class_counts[c] as u128 * num % den), c));
    for &c in order.iter().take((target - assigned) as usize) {
        out[c] += 1;
    }
    out
}

/// Row indices of a stratified train/test split. Membership is shuffled per
/// class with `seed`; both index lists are returned ascending.
pub fn stratified_split_indices(
    ds: &Dataset,
    train_fraction: Fraction,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let quotas = stratified_train_counts(&ds.class_counts(), train_fraction);
    let mut rng = rng::seeded(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (mut rows, quota) in ds.class_rows().into_iter().zip(quotas) {
        rows.shuffle(&mut rng);
        train.extend_from_slice(&rows[..quota]);
        test.extend_from_slice(&rows[quota..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

pub fn stratified_split(ds: &Dataset, train_fraction: Fraction, seed: u64) -> (Dataset, Dataset) {
    let (train, test) = stratified_split_indices(ds, train_fraction, seed);
    (ds.subset(&train), ds.subset(&test))
}

/// Test-fold row indices (ascending) for stratified k-fold cross validation.
///
/// Each class is shuffled, the classes are concatenated, and the sequence is
/// dealt round-robin over the folds, so per-class fold sizes and total fold
/// sizes each differ by at most one.
pub fn stratified_kfold_indices(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "k-fold needs k >= 2, got {k}"
        )));
    }
    let counts = ds.class_counts();
    if let Some((c, &n)) = counts.iter().enumerate().find(|(_, &n)| n > 0 && n < k) {
        log::warn!(
            "class {} has {n} rows, fewer than {k} folds; some folds will hold none",
            c + 1
        );
    }
    let mut rng = rng::seeded(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for mut rows in ds.class_rows() {
        rows.shuffle(&mut rng);
        for r in rows {
            folds[next % k].push(r);
            next += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// `(train, test)` datasets for each fold.
pub fn stratified_kfold(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<(Dataset, Dataset)>> {
    let folds = stratified_kfold_indices(ds, k, seed)?;
    Ok(folds
        .iter()
        .map(|test| {
            let train = complement(ds.len(), test);
            (ds.subset(&train), ds.subset(test))
        })
        .collect())
}

/// Indices in `0..n` not in `sorted`.
pub fn complement(n: usize, sorted: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(n - sorted.len());
    let mut it = sorted.iter().peekable();
    for i in 0..n {
        if it.peek() == Some(&&i) {
            it.next();
        } else {
            out.push(i);
        }
    }
    out
}
