//! Synthetic review corpora with controllable class skew and separability.
//!
//! Words are pronounceable consonant-vowel strings. Every class draws from a
//! shared Zipf-distributed vocabulary; with probability `separability` a token
//! comes instead from a vocabulary exclusive to the document's class, and with
//! probability `polarity` from an ordered polarity vocabulary, weighted by a
//! Gaussian window centred on the class's position, so that neighboring
//! classes overlap the way adjacent ratings do. A small
//! rate of noise tokens (links, emoticons, numbers, elongated words,
//! contractions) gives the preprocessing rules something to do.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::resample::adasyn_allocation;
use crate::rng::{derive, seeded, stream};
use crate::textprep::RawDocument;

/// Class counts of the recipe-review corpus (ratings 1 to 4).
pub const EPICURIOUS_COUNTS: [usize; 4] = [108, 787, 5648, 3546];
/// Class counts of the clinic-comment corpus (five classes, 386 documents).
pub const PLANNED_PARENTHOOD_COUNTS: [usize; 5] = [188, 100, 25, 23, 50];

const CONSONANTS: &[u8] = b"bcdfghjklmnprstvwxyz";
const VOWELS: &[u8] = b"aeiou";
const EMOTICONS: &[&str] = &[":)", ":(", ":D", ";)", ":-)", ":P", "<3", ":/"];
const CONTRACTIONS: &[&str] = &[
    "don't", "it's", "we're", "i've", "you'll", "i'd", "i'm", "can't",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticProfile {
    pub name: String,
    pub class_counts: Vec<usize>,
    /// Size of the vocabulary every class draws from.
    pub shared_vocab: usize,
    /// Size of each class's exclusive vocabulary.
    pub class_vocab: usize,
    /// Probability that a token comes from the class-exclusive vocabulary.
    pub separability: f64,
    /// Probability that a token comes from the polarity vocabulary.
    pub polarity: f64,
    pub polarity_vocab: usize,
    /// Width of each class's polarity window, as a fraction of the gap
    /// between neighboring class centres.
    pub polarity_spread: f64,
    pub zipf_exponent: f64,
    pub min_len: usize,
    pub max_len: usize,
    /// Probability that a token is replaced by a noise token.
    pub noise_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticProfile {
    fn default() -> Self {
        SyntheticProfile {
            name: "custom".into(),
            class_counts: vec![50, 50],
            shared_vocab: 2000,
            class_vocab: 150,
            separability: 0.05,
            polarity: 0.2,
            polarity_vocab: 400,
            polarity_spread: 0.8,
            zipf_exponent: 1.0,
            min_len: 15,
            max_len: 60,
            noise_rate: 0.02,
            seed: 0,
        }
    }
}

impl SyntheticProfile {
    pub fn epicurious() -> Self {
        SyntheticProfile {
            name: "epicurious".into(),
            class_counts: EPICURIOUS_COUNTS.to_vec(),
            ..Default::default()
        }
    }

    pub fn planned_parenthood() -> Self {
        SyntheticProfile {
            name: "planned_parenthood".into(),
            class_counts: PLANNED_PARENTHOOD_COUNTS.to_vec(),
            ..Default::default()
        }
    }

    /// The recipe-review proportions scaled to `total` documents by largest
    /// remainder.
    pub fn scaled(total: usize) -> Self {
        SyntheticProfile {
            name: "scaled".into(),
            class_counts: adasyn_allocation(&EPICURIOUS_COUNTS, total),
            ..Default::default()
        }
    }

    /// Looks up `epicurious`, `planned_parenthood` or `scaled:<total>`.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "epicurious" => Ok(Self::epicurious()),
            "planned_parenthood" => Ok(Self::planned_parenthood()),
            _ => match name.strip_prefix("scaled:").map(str::parse::<usize>) {
                Some(Ok(n)) if n > 0 => Ok(Self::scaled(n)),
                _ => Err(Error::InvalidArgument(format!(
                    "unknown synthetic profile {name:?}"
                ))),
            },
        }
    }

    pub fn with_separability(mut self, s: f64) -> Self {
        self.separability = s;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.class_counts.is_empty() || self.class_counts.contains(&0) {
            return bad(format!(
                "class counts must be positive, got {:?}",
                self.class_counts
            ));
        }
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.separability) || !unit(self.polarity) || !unit(self.noise_rate) {
            return bad("separability, polarity and noise_rate must lie in [0, 1]".into());
        }
        if self.separability + self.polarity > 1.0 {
            return bad("separability + polarity must not exceed 1".into());
        }
        if self.polarity > 0.0 && (self.polarity_vocab == 0 || !(self.polarity_spread > 0.0)) {
            return bad("polarity needs a vocabulary and a positive spread".into());
        }
        if self.shared_vocab == 0 || (self.separability > 0.0 && self.class_vocab == 0) {
            return bad("vocabulary sizes must be positive".into());
        }
        if self.min_len == 0 || self.min_len > self.max_len {
            return bad(format!(
                "bad length range {}..={}",
                self.min_len, self.max_len
            ));
        }
        if !(self.zipf_exponent >= 0.0) {
            return bad("zipf_exponent must be nonnegative".into());
        }
        Ok(())
    }
}

/// A distinct word for every `n`: base-100 digits, each spelled as one
/// consonant-vowel syllable, at least two syllables long.
pub fn word(n: usize) -> String {
    let base = CONSONANTS.len() * VOWELS.len();
    let mut digits = Vec::new();
    let mut x = n;
    loop {
        digits.push(x % base);
        x /= base;
        if x == 0 && digits.len() >= 2 {
            break;
        }
    }
    let mut s = String::with_capacity(digits.len() * 2);
    for &d in digits.iter().rev() {
        s.push(CONSONANTS[d / VOWELS.len()] as char);
        s.push(VOWELS[d % VOWELS.len()] as char);
    }
    s
}

fn zipf(n: usize, exponent: f64) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|r| (r as f64).powf(-exponent))).expect("nonempty vocabulary")
}

/// Per-class weights over the polarity vocabulary: a Gaussian centred at
/// `(c - 0.5) / m` of the way along it.
fn polarity_windows(p: &SyntheticProfile) -> Vec<WeightedIndex<f64>> {
    let m = p.class_counts.len();
    let v = p.polarity_vocab.max(1);
    let gap = v as f64 / m as f64;
    let sigma = p.polarity_spread * gap;
    (0..m)
        .map(|c| {
            let centre = (c as f64 + 0.5) * gap;
            WeightedIndex::new((0..v).map(|j| {
                let z = (j as f64 + 0.5 - centre) / sigma;
                (-0.5 * z * z).exp().max(1e-300)
            }))
            .expect("positive weights")
        })
        .collect()
}

fn noise_token(rng: &mut crate::rng::Rng, shared: &str) -> String {
    match rng.random_range(0..6) {
        0 => format!(
            "http://www.{}.com/{}",
            word(rng.random_range(0..500)),
            rng.random_range(1..100)
        ),
        1 => EMOTICONS[rng.random_range(0..EMOTICONS.len())].to_string(),
        2 => rng.random_range(1..500).to_string(),
        3 => format!("{}:{:02}", rng.random_range(1..13), rng.random_range(0..60)),
        4 => {
            // stretch the final letter
            let mut w = shared.to_string();
            let last = w.pop().unwrap_or('o');
            w.extend(std::iter::repeat_n(last, 4));
            w
        }
        _ => CONTRACTIONS[rng.random_range(0..CONTRACTIONS.len())].to_string(),
    }
}

/// Documents in a seeded shuffled class order.
pub fn generate_synthetic(profile: &SyntheticProfile) -> Result<Vec<RawDocument>> {
    profile.validate()?;
    let mut labels: Vec<Label> = profile
        .class_counts
        .iter()
        .enumerate()
        .flat_map(|(c, &n)| std::iter::repeat_n(c as Label + 1, n))
        .collect();
    labels.shuffle(&mut seeded(derive(profile.seed, "labels", 0)));
    let shared = zipf(profile.shared_vocab, profile.zipf_exponent);
    let exclusive = zipf(profile.class_vocab.max(1), profile.zipf_exponent);
    let windows = polarity_windows(profile);
    let polarity_offset = profile.shared_vocab + profile.class_counts.len() * profile.class_vocab;
    let doc_seed = derive(profile.seed, "docs", 0);
    Ok(labels
        .par_iter()
        .enumerate()
        .map(|(i, &label)| {
            let mut rng = stream(doc_seed, i as u64);
            let len = rng.random_range(profile.min_len..=profile.max_len);
            let mut tokens = Vec::with_capacity(len + 1);
            for _ in 0..len {
                let u = rng.random::<f64>();
                let tok = if u < profile.separability {
                    let offset = profile.shared_vocab + (label as usize - 1) * profile.class_vocab;
                    word(offset + exclusive.sample(&mut rng))
                } else if u < profile.separability + profile.polarity {
                    word(polarity_offset + windows[label as usize - 1].sample(&mut rng))
                } else {
                    word(shared.sample(&mut rng))
                };
                if rng.random::<f64>() < profile.noise_rate {
                    tokens.push(noise_token(&mut rng, &tok));
                } else {
                    tokens.push(tok);
                }
            }
            tokens.push(if rng.random::<f64>() < 0.3 {
                "!!!".into()
            } else {
                ".".into()
            });
            RawDocument::new(label, tokens.join(" "))
        })
        .collect())
}
