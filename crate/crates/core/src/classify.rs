//! Linear SVMs.
//!
//! Multiclass training is one-vs-rest Pegasos (primal subgradient steps with
//! step size `1/(reg * t)`, projection onto the `1/sqrt(reg)` ball, and
//! iterate averaging with weights proportional to `t`). The bias is an extra constant feature, so it is
//! regularized along with the weights. Each step touches only the nonzero
//! entries of its row: the weight vector is stored as `scale * v`, and the
//! running average is kept in closed form.
//!
//! The binary trainer used for support-vector detection solves the hinge-loss
//! dual by coordinate descent, which yields the dual variables directly.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label, SparseVector};
use crate::error::{Error, Result};
use crate::rng::{seeded, stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmSettings {
    pub reg: f64,
    pub epochs: usize,
    /// Rows with `|decision value| <= 1 + margin_tol` count as support vectors.
    pub margin_tol: f64,
}

impl Default for SvmSettings {
    fn default() -> Self {
        SvmSettings {
            reg: 1e-4,
            epochs: 50,
            margin_tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub dim: usize,
    /// One dense weight vector per class; entry `c - 1` is class `c`.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub reg: f64,
    pub epochs: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportSet {
    /// Training row positions, ascending: minority rows first, then majority.
    pub indices: Vec<usize>,
}

impl LinearModel {
    pub fn n_classes(&self) -> usize {
        self.weights.len()
    }

    pub fn scores(&self, row: &SparseVector) -> Result<Vec<f64>> {
        if row.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: row.dim(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| row.dot_dense(w) + b)
            .collect())
    }

    /// Highest-scoring class; ties go to the lower class id.
    pub fn predict_row(&self, row: &SparseVector) -> Result<Label> {
        let scores = self.scores(row)?;
        let mut best = 0;
        for c in 1..scores.len() {
            if scores[c] > scores[best] {
                best = c;
            }
        }
        Ok(best as Label + 1)
    }
}

pub fn predict(model: &LinearModel, rows: &[SparseVector]) -> Result<Vec<Label>> {
    rows.par_iter().map(|r| model.predict_row(r)).collect()
}

/// Regularized hinge objective `reg/2 |w|^2 + mean(max(0, 1 - y (w.x + b)))`,
/// with the bias counted in the norm as it is during training.
pub fn hinge_objective(w: &[f64], b: f64, rows: &[&SparseVector], y: &[f64], reg: f64) -> f64 {
    let norm: f64 = w.iter().map(|v| v * v).sum::<f64>() + b * b;
    let loss: f64 = rows
        .iter()
        .zip(y)
        .map(|(x, &yi)| (1.0 - yi * (x.dot_dense(w) + b)).max(0.0))
        .sum();
    0.5 * reg * norm + loss / rows.len().max(1) as f64
}

const RESCALE_BELOW: f64 = 1e-3;

struct Pegasos<'a> {
    rows: &'a [&'a SparseVector],
    y: &'a [f64],
    dim: usize,
    reg: f64,
}

impl Pegasos<'_> {
    /// Returns the averaged weights and bias, and, when `trace` is set, the
    /// objective of the averaged iterate after every epoch.
    fn run(
        &self,
        epochs: usize,
        rng: &mut crate::rng::Rng,
        trace: bool,
    ) -> (Vec<f64>, f64, Vec<f64>) {
        let d = self.dim;
        let n = self.rows.len();
        let radius = 1.0 / self.reg.sqrt();
        // w_{t+1} = scale_t * v_t. With weights t, sum_t t * w_{t+1} equals
        // frozen + sum_s * v - a where sum_s accumulates t * scale_t and each
        // update dv made at step t adds dv * sum_s(t - 1) to a. When scale
        // gets small it is folded into v and the running sum into frozen.
        let mut v = vec![0.0; d + 1];
        let mut a = vec![0.0; d + 1];
        let mut frozen = vec![0.0; d + 1];
        let mut v_norm2 = 0.0;
        let mut scale = 1.0;
        let mut sum_s = 0.0;
        let mut t: u64 = 0;
        let mut order: Vec<usize> = (0..n).collect();
        let mut objectives = Vec::new();

        for _ in 0..epochs {
            order.shuffle(rng);
            for &i in &order {
                t += 1;
                let x = self.rows[i];
                let yi = self.y[i];
                let margin = yi * scale * (x.dot_dense(&v[..d]) + v[d]);
                scale = if t == 1 {
                    1.0
                } else {
                    scale * (1.0 - 1.0 / t as f64)
                };
                if margin < 1.0 {
                    let g = yi / (self.reg * t as f64 * scale);
                    let mut bump = |j: usize, xj: f64| {
                        let dv = g * xj;
                        v_norm2 += dv * (2.0 * v[j] + dv);
                        v[j] += dv;
                        a[j] += dv * sum_s;
                    };
                    for (j, xj) in x.iter() {
                        bump(j, xj);
                    }
                    bump(d, 1.0);
                }
                let norm = scale * v_norm2.max(0.0).sqrt();
                if norm > radius {
                    scale *= radius / norm;
                }
                sum_s += t as f64 * scale;
                if scale < RESCALE_BELOW {
                    for j in 0..=d {
                        frozen[j] += sum_s * v[j] - a[j];
                        v[j] *= scale;
                        a[j] = 0.0;
                    }
                    sum_s = 0.0;
                    scale = 1.0;
                    v_norm2 = v.iter().map(|x| x * x).sum();
                }
            }
            v_norm2 = v.iter().map(|x| x * x).sum();
            if trace {
                let (w, b) = Self::average(&frozen, &v, &a, sum_s, t, d);
                objectives.push(hinge_objective(&w, b, self.rows, self.y, self.reg));
            }
        }
        let (w, b) = Self::average(&frozen, &v, &a, sum_s, t, d);
        (w, b, objectives)
    }

    fn average(
        frozen: &[f64],
        v: &[f64],
        a: &[f64],
        sum_s: f64,
        t: u64,
        d: usize,
    ) -> (Vec<f64>, f64) {
        if t == 0 {
            return (vec![0.0; d], 0.0);
        }
        let total = t as f64 * (t as f64 + 1.0) / 2.0;
        let mut w: Vec<f64> = (0..=d)
            .map(|j| (frozen[j] + sum_s * v[j] - a[j]) / total)
            .collect();
        let b = w.pop().unwrap();
        (w, b)
    }
}

fn check_trainable(ds: &Dataset) -> Result<()> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let present: Vec<usize> = ds
        .class_counts()
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(c, _)| c)
        .collect();
    if present.len() < 2 {
        return Err(Error::SingleClass(present[0] as Label + 1));
    }
    Ok(())
}

/// One-vs-rest Pegasos. Classes without rows get an all-negative model.
pub fn train_multiclass(ds: &Dataset, reg: f64, epochs: usize, seed: u64) -> Result<LinearModel> {
    Ok(train_ovr(ds, reg, epochs, seed, false)?.0)
}

/// As [`train_multiclass`], also returning each class's per-epoch objective.
pub fn train_multiclass_traced(
    ds: &Dataset,
    reg: f64,
    epochs: usize,
    seed: u64,
) -> Result<(LinearModel, Vec<Vec<f64>>)> {
    train_ovr(ds, reg, epochs, seed, true)
}

fn train_ovr(
    ds: &Dataset,
    reg: f64,
    epochs: usize,
    seed: u64,
    trace: bool,
) -> Result<(LinearModel, Vec<Vec<f64>>)> {
    check_trainable(ds)?;
    if !(reg > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "reg must be positive, got {reg}"
        )));
    }
    let rows: Vec<&SparseVector> = ds.rows().iter().collect();
    let per_class: Vec<(Vec<f64>, f64, Vec<f64>)> = (1..=ds.n_classes() as Label)
        .into_par_iter()
        .map(|c| {
            let y: Vec<f64> = ds
                .labels()
                .iter()
                .map(|&l| if l == c { 1.0 } else { -1.0 })
                .collect();
            let p = Pegasos {
                rows: &rows,
                y: &y,
                dim: ds.dim(),
                reg,
            };
            p.run(epochs, &mut stream(seed, u64::from(c)), trace)
        })
        .collect();
    let mut model = LinearModel {
        dim: ds.dim(),
        weights: Vec::new(),
        bias: Vec::new(),
        reg,
        epochs,
        seed,
    };
    let mut traces = Vec::new();
    for (w, b, tr) in per_class {
        model.weights.push(w);
        model.bias.push(b);
        traces.push(tr);
    }
    Ok((model, traces))
}

const DCD_TOL: f64 = 1e-4;
const DCD_MAX_PASSES: usize = 2000;

/// Binary soft-margin SVM on `pos` (+1) against `neg` (-1), solved in the
/// dual with `C = 1 / (reg * n)`. The returned model scores class 1 as the
/// positive side and class 2 as its negation. The support set holds every row
/// with a positive dual variable or `|decision value| <= 1 + margin_tol`.
pub fn train_binary_with_support(
    pos: &[&SparseVector],
    neg: &[&SparseVector],
    settings: &SvmSettings,
    seed: u64,
) -> Result<(LinearModel, SupportSet)> {
    if pos.is_empty() {
        return Err(Error::TooFewMinority {
            found: 0,
            required: 1,
        });
    }
    if neg.is_empty() {
        return Err(Error::EmptyMajority);
    }
    let dim = pos[0].dim();
    let rows: Vec<&SparseVector> = pos.iter().chain(neg).copied().collect();
    for r in &rows {
        if r.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.dim(),
            });
        }
    }
    let n = rows.len();
    let y: Vec<f64> = (0..n)
        .map(|i| if i < pos.len() { 1.0 } else { -1.0 })
        .collect();
    let c = 1.0 / (settings.reg * n as f64);
    let qd: Vec<f64> = rows.iter().map(|r| r.squared_norm() + 1.0).collect();
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; dim + 1];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = seeded(seed);
    let dot = |w: &[f64], x: &SparseVector| x.dot_dense(&w[..dim]) + w[dim];

    for _ in 0..DCD_MAX_PASSES {
        order.shuffle(&mut rng);
        let (mut pg_max, mut pg_min) = (f64::NEG_INFINITY, f64::INFINITY);
        for &i in &order {
            let g = y[i] * dot(&w, rows[i]) - 1.0;
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == c {
                g.max(0.0)
            } else {
                g
            };
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg != 0.0 {
                let old = alpha[i];
                alpha[i] = (old - g / qd[i]).clamp(0.0, c);
                let step = (alpha[i] - old) * y[i];
                if step != 0.0 {
                    for (j, xj) in rows[i].iter() {
                        w[j] += step * xj;
                    }
                    w[dim] += step;
                }
            }
        }
        if pg_max - pg_min < DCD_TOL {
            break;
        }
    }

    let indices = (0..n)
        .filter(|&i| alpha[i] > 0.0 || dot(&w, rows[i]).abs() <= 1.0 + settings.margin_tol)
        .collect();
    let b = w.pop().unwrap();
    let model = LinearModel {
        dim,
        weights: vec![w.clone(), w.iter().map(|v| -v).collect()],
        bias: vec![b, -b],
        reg: settings.reg,
        epochs: settings.epochs,
        seed,
    };
    Ok((model, SupportSet { indices }))
}
