//! Confusion matrices, per-class precision and recall, and cross-fold
//! aggregation by pooling counts.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};

/// Rows are true classes, columns predicted classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    m: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(m: usize) -> Self {
        ConfusionMatrix {
            m,
            counts: vec![0; m * m],
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidArgument(
                "confusion matrix must be square".into(),
            ));
        }
        Ok(ConfusionMatrix {
            m,
            counts: rows.concat(),
        })
    }

    pub fn n_classes(&self) -> usize {
        self.m
    }

    /// Count for true class `t` predicted as `p`, both 1-based.
    pub fn get(&self, t: Label, p: Label) -> u64 {
        self.counts[(t as usize - 1) * self.m + p as usize - 1]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts
            .chunks(self.m.max(1))
            .map(<[u64]>::to_vec)
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.m).map(|c| self.counts[c * self.m + c]).sum()
    }

    fn true_count(&self, c: usize) -> u64 {
        self.counts[c * self.m..(c + 1) * self.m].iter().sum()
    }

    fn predicted_count(&self, c: usize) -> u64 {
        (0..self.m).map(|t| self.counts[t * self.m + c]).sum()
    }

    /// Elementwise sum.
    pub fn add(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.m != self.m {
            return Err(Error::InvalidArgument(format!(
                "cannot pool a {}-class matrix into a {}-class one",
                other.m, self.m
            )));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }
}

pub fn confusion(truth: &[Label], predicted: &[Label], m: usize) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: predicted.len(),
        });
    }
    let mut cm = ConfusionMatrix::new(m);
    for (&t, &p) in truth.iter().zip(predicted) {
        for l in [t, p] {
            if l == 0 || l as usize > m {
                return Err(Error::LabelOutOfRange {
                    label: l,
                    classes: m,
                });
            }
        }
        cm.counts[(t as usize - 1) * m + p as usize - 1] += 1;
    }
    Ok(cm)
}

/// How the single f-score column is computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FScore {
    /// Unweighted mean of per-class F1.
    #[default]
    Macro,
    /// F1 over pooled decisions; equals accuracy for single-label data.
    Micro,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub fscore: f64,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub matrix: ConfusionMatrix,
    /// Mean of the per-fold f-scores, kept for comparison only.
    pub fold_mean_fscore: Option<f64>,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Metrics with the macro f-score. An empty matrix yields all zeros.
pub fn metrics(cm: &ConfusionMatrix) -> MetricsReport {
    metrics_with(cm, FScore::Macro)
}

pub fn metrics_with(cm: &ConfusionMatrix, mode: FScore) -> MetricsReport {
    let m = cm.m;
    let tp = |c: usize| cm.counts[c * m + c];
    let precision: Vec<f64> = (0..m)
        .map(|c| ratio(tp(c), cm.predicted_count(c)))
        .collect();
    let recall: Vec<f64> = (0..m).map(|c| ratio(tp(c), cm.true_count(c))).collect();
    let f1: Vec<f64> = precision
        .iter()
        .zip(&recall)
        .map(|(&p, &r)| harmonic(p, r))
        .collect();
    let accuracy = ratio(cm.trace(), cm.total());
    let fscore = match mode {
        FScore::Macro if m > 0 => f1.iter().sum::<f64>() / m as f64,
        FScore::Macro => 0.0,
        FScore::Micro => accuracy,
    };
    MetricsReport {
        accuracy,
        fscore,
        precision,
        recall,
        f1,
        matrix: cm.clone(),
        fold_mean_fscore: None,
    }
}

/// Pools the fold matrices and reports metrics of the sum. The mean of the
/// per-fold f-scores is attached for comparison.
pub fn aggregate_folds(folds: &[ConfusionMatrix], mode: FScore) -> Result<MetricsReport> {
    let (first, rest) = folds
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("no folds to aggregate".into()))?;
    let mut pooled = first.clone();
    for f in rest {
        pooled.add(f)?;
    }
    let mut report = metrics_with(&pooled, mode);
    report.fold_mean_fscore = Some(mean_fold_fscore(folds, mode));
    Ok(report)
}

pub fn mean_fold_fscore(folds: &[ConfusionMatrix], mode: FScore) -> f64 {
    if folds.is_empty() {
        return 0.0;
    }
    folds
        .iter()
        .map(|f| metrics_with(f, mode).fscore)
        .sum::<f64>()
        / folds.len() as f64
}

/// `name,accuracy,f-score,prec_1,rec_1,...,prec_m,rec_m`
pub fn csv_header(m: usize) -> String {
    let mut s = String::from("name,accuracy,f-score");
    for c in 1..=m {
        write!(s, ",prec_{c},rec_{c}").unwrap();
    }
    s
}

impl MetricsReport {
    /// One CSV row with six decimals. Names containing commas or quotes
    /// are quoted.
    pub fn csv_row(&self, name: &str) -> String {
        let mut s = csv_field(name);
        write!(s, ",{:.6},{:.6}", self.accuracy, self.fscore).unwrap();
        for (p, r) in self.precision.iter().zip(&self.recall) {
            write!(s, ",{p:.6},{r:.6}").unwrap();
        }
        s
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
