//! Multiclass information-gain feature ranking.
//!
//! `IG(f) = H(C) - H(C | f)` where `f` ranges over the observed values of the
//! feature: `{0, 1}` in presence mode, every observed count in count mode.
//! Zero-probability terms contribute nothing.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;

/// Scores closer than this (relative to the larger, floored at 1) are one tie group.
pub const TIE_EPSILON: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IgMode {
    Presence,
    Count,
}

impl std::str::FromStr for IgMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "presence" => Ok(IgMode::Presence),
            "count" => Ok(IgMode::Count),
            _ => Err(crate::Error::InvalidArgument(format!(
                "unknown IG mode {s:?} (expected presence or count)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IgRanking {
    pub scores: Vec<f64>,
    /// Feature indices by descending score; ties by ascending index.
    pub order: Vec<usize>,
    /// Half-open ranges into `order`, one per group of equal scores.
    pub tie_groups: Vec<std::ops::Range<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    /// Selected feature indices, ascending.
    pub features: Vec<usize>,
    /// Set when the first tie group alone is larger than the requested size.
    pub overshoot: bool,
}

/// Column-major view: per feature, the `(row, value)` pairs of nonzero entries.
fn columns(ds: &Dataset) -> Vec<Vec<(u32, f64)>> {
    let mut cols = vec![Vec::new(); ds.dim()];
    for (r, row) in ds.rows().iter().enumerate() {
        for (i, v) in row.iter() {
            cols[i].push((r as u32, v));
        }
    }
    cols
}

fn entropy(counts: &[u64], total: u64, log: impl Fn(f64) -> f64) -> f64 {
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / total as f64;
            h -= p * log(p);
        }
    }
    h
}

/// IG of one column given per-class totals. Value buckets and the counts inside
/// each bucket are canonicalized (sorted) first, so features with the same
/// contingency table up to relabeling score bit-identically.
fn column_ig(
    column: &[(u32, f64)],
    labels: &[crate::Label],
    class_totals: &[u64],
    mode: IgMode,
    log: &impl Fn(f64) -> f64,
) -> f64 {
    let n: u64 = class_totals.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let m = class_totals.len();
    let mut buckets: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut nonzero = vec![0u64; m];
    for &(r, v) in column {
        let key = match mode {
            IgMode::Presence => 1,
            IgMode::Count => v.to_bits(),
        };
        let c = labels[r as usize] as usize - 1;
        buckets.entry(key).or_insert_with(|| vec![0; m])[c] += 1;
        nonzero[c] += 1;
    }
    let zero: Vec<u64> = class_totals
        .iter()
        .zip(&nonzero)
        .map(|(t, z)| t - z)
        .collect();
    let mut tables: Vec<Vec<u64>> = buckets.into_values().collect();
    tables.push(zero);
    for t in &mut tables {
        t.sort_unstable();
    }
    tables.retain(|t| t.iter().any(|&c| c > 0));
    tables.sort_unstable();

    let h_c = {
        let mut totals = class_totals.to_vec();
        totals.sort_unstable();
        entropy(&totals, n, log)
    };
    let mut h_cond = 0.0;
    for t in &tables {
        let size: u64 = t.iter().sum();
        h_cond += size as f64 / n as f64 * entropy(t, size, log);
    }
    h_c - h_cond
}

fn class_totals(ds: &Dataset) -> Vec<u64> {
    ds.class_counts().into_iter().map(|c| c as u64).collect()
}

/// Information gain of one feature, in bits.
pub fn information_gain(ds: &Dataset, feature: usize, mode: IgMode) -> f64 {
    information_gain_base(ds, feature, mode, 2.0)
}

pub fn information_gain_base(ds: &Dataset, feature: usize, mode: IgMode, base: f64) -> f64 {
    let column: Vec<(u32, f64)> = ds
        .rows()
        .iter()
        .enumerate()
        .filter_map(|(r, row)| {
            let v = row.get(feature);
            (v != 0.0).then_some((r as u32, v))
        })
        .collect();
    let ln_base = base.ln();
    column_ig(&column, ds.labels(), &class_totals(ds), mode, &|p: f64| {
        p.ln() / ln_base
    })
}

/// Scores every feature (in bits) and orders them.
pub fn rank_features(ds: &Dataset, mode: IgMode) -> IgRanking {
    rank_features_base(ds, mode, 2.0)
}

pub fn rank_features_base(ds: &Dataset, mode: IgMode, base: f64) -> IgRanking {
    let cols = columns(ds);
    let totals = class_totals(ds);
    let ln_base = base.ln();
    let log = move |p: f64| p.ln() / ln_base;
    let scores: Vec<f64> = cols
        .par_iter()
        .map(|col| column_ig(col, ds.labels(), &totals, mode, &log))
        .collect();
    ranking_from_scores(scores)
}

/// Sorts descending, merges adjacent scores within `TIE_EPSILON` into tie
/// groups, and orders each group by ascending feature index.
pub fn ranking_from_scores(scores: Vec<f64>) -> IgRanking {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut tie_groups = Vec::new();
    let mut start = 0;
    for i in 1..=order.len() {
        let split = i == order.len() || {
            let (x, y) = (scores[order[i - 1]], scores[order[i]]);
            (x - y).abs() > TIE_EPSILON * x.abs().max(y.abs()).max(1.0)
        };
        if split {
            order[start..i].sort_unstable();
            tie_groups.push(start..i);
            start = i;
        }
    }
    IgRanking {
        scores,
        order,
        tie_groups,
    }
}

/// Largest prefix of the ranking with at most `target_k` features that does
/// not split a tie group. If even the first group exceeds `target_k`, that
/// whole group is returned and `overshoot` is set.
pub fn select_top(ranking: &IgRanking, target_k: usize) -> Selection {
    let mut end = 0;
    let mut overshoot = false;
    for g in &ranking.tie_groups {
        if g.end <= target_k {
            end = g.end;
        } else {
            if end == 0 {
                end = g.end;
                overshoot = g.end > target_k;
            }
            break;
        }
    }
    let mut features = ranking.order[..end].to_vec();
    features.sort_unstable();
    Selection {
        features,
        overshoot,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::SparseVector;

    fn column_dataset(labels: &[u32], cols: &[&[f64]]) -> Dataset {
        let m = *labels.iter().max().unwrap() as usize;
        let rows = (0..labels.len())
            .map(|r| SparseVector::from_dense(&cols.iter().map(|c| c[r]).collect::<Vec<_>>()))
            .collect();
        Dataset::new(rows, labels.to_vec(), m, cols.len()).unwrap()
    }

    #[test]
    fn perfectly_predictive_presence_is_one_bit() {
        let ds = column_dataset(&[1, 1, 2, 2], &[&[1.0, 1.0, 0.0, 0.0]]);
        assert!((information_gain(&ds, 0, IgMode::Presence) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_feature_scores_zero() {
        let ds = column_dataset(&[1, 2, 2, 3], &[&[2.0; 4], &[0.0; 4]]);
        assert_eq!(information_gain(&ds, 0, IgMode::Count), 0.0);
        assert_eq!(information_gain(&ds, 1, IgMode::Presence), 0.0);
    }

    #[test]
    fn count_mode_uses_every_observed_value() {
        // values {0,1,2}: H(C) = 1, H(C|f) = 1/4*0 + 1/2*1 + 1/4*0
        let ds = column_dataset(&[1, 1, 2, 2], &[&[0.0, 1.0, 1.0, 2.0]]);
        assert!((information_gain(&ds, 0, IgMode::Count) - 0.5).abs() < 1e-12);
        // presence collapses 1 and 2: buckets {c1} and {c1,c2,c2}
        let p = information_gain(&ds, 0, IgMode::Presence);
        let expected = 1.0
            - 0.75
                * (-(1.0 / 3.0f64) * (1.0 / 3.0f64).log2()
                    - (2.0 / 3.0f64) * (2.0 / 3.0f64).log2());
        assert!((p - expected).abs() < 1e-12);
    }

    #[test]
    fn ranking_orders_and_groups() {
        let ds = column_dataset(
            &[1, 1, 2, 2],
            &[&[3.0; 4], &[1.0, 1.0, 0.0, 0.0], &[1.0, 1.0, 0.0, 0.0]],
        );
        let r = rank_features(&ds, IgMode::Count);
        assert_eq!(r.order, [1, 2, 0]);
        assert_eq!(r.tie_groups, [0..2, 2..3]);
        assert_eq!(r.scores[1], r.scores[2]);
    }

    #[test]
    fn select_top_keeps_tie_groups_whole() {
        let r = ranking_from_scores(vec![0.9, 0.5, 0.5, 0.5, 0.1]);
        assert_eq!(
            select_top(&r, 3),
            Selection {
                features: vec![0],
                overshoot: false
            }
        );
        assert_eq!(select_top(&r, 4).features, [0, 1, 2, 3]);

        let r = ranking_from_scores(vec![0.3, 0.9, 0.1, 0.5]);
        assert_eq!(select_top(&r, 3).features, [0, 1, 3]);

        let r = ranking_from_scores(vec![0.2; 5]);
        assert_eq!(
            select_top(&r, 2),
            Selection {
                features: vec![0, 1, 2, 3, 4],
                overshoot: true
            }
        );
    }

    #[test]
    fn symmetric_features_tie_exactly() {
        // feature 0 marks class 1, feature 1 marks class 2; equal class sizes
        let ds = column_dataset(
            &[1, 1, 2, 2, 3],
            &[&[1.0, 1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 1.0, 0.0]],
        );
        let r = rank_features(&ds, IgMode::Presence);
        assert_eq!(r.scores[0].to_bits(), r.scores[1].to_bits());
        assert_eq!(r.tie_groups.len(), 1);
    }
}
