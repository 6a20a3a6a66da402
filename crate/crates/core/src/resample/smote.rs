use rand::Rng as _;

use super::{
    check_ratio, Flag, Generated, Groups, OversampleOptions, Provenance, ResampleResult,
    SmoteVariant, SyntheticOrigin,
};
use crate::classify::train_binary_with_support;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::neighbors::DistanceIndex;
use crate::rng::{seeded, Rng};

/// SMOTE and its borderline and SVM variants on a binary view.
///
/// New rows follow `x_i + (x_hat - x_i) * delta` with `x_hat` one of the
/// `k` nearest minority rows of the base `x_i`. Bases are visited round-robin
/// in minority order until the minority reaches `ceil(ratio * |majority|)`.
pub fn smote(
    ds: &Dataset,
    groups: &Groups,
    variant: SmoteVariant,
    opts: &OversampleOptions,
) -> Result<ResampleResult> {
    let generated = smote_rows(ds, groups, variant, opts)?;
    ResampleResult::augment(ds, generated)
}

/// For each minority row (in `groups.minority` order): how many of its `k`
/// nearest rows in the union are majority rows, and how many neighbors it has.
pub fn majority_counts(ds: &Dataset, groups: &Groups, k: usize) -> Vec<(usize, usize)> {
    let index = DistanceIndex::new(ds.rows());
    let union = groups.union();
    let is_major = membership(ds.len(), &groups.majority);
    index
        .knn_many(&groups.minority, k, &union)
        .into_iter()
        .map(|nb| (nb.iter().filter(|&&j| is_major[j]).count(), nb.len()))
        .collect()
}

/// Minority rows with at least half, but not all, of their `k` nearest
/// neighbors in the majority.
pub fn danger_rows(ds: &Dataset, groups: &Groups, k: usize) -> Vec<usize> {
    groups
        .minority
        .iter()
        .zip(majority_counts(ds, groups, k))
        .filter(|&(_, (kp, kk))| 2 * kp >= kk && kp < kk)
        .map(|(&i, _)| i)
        .collect()
}

fn membership(n: usize, rows: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &r in rows {
        m[r] = true;
    }
    m
}

/// Shared setup for SMOTE and ADASYN: validated sizes and the minority
/// neighbor lists, keyed by dataset row.
pub(super) struct Prepared<'a> {
    pub index: DistanceIndex<'a>,
    pub need: usize,
    pub neighbors: Vec<Vec<usize>>,
    pub rng: Rng,
}

pub(super) fn prepare<'a>(
    ds: &'a Dataset,
    groups: &Groups,
    opts: &OversampleOptions,
) -> Result<Option<Prepared<'a>>> {
    check_ratio(opts.ratio)?;
    if opts.k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if groups.majority.is_empty() {
        return Err(Error::EmptyMajority);
    }
    if groups.minority.len() < 2 {
        return Err(Error::TooFewMinority {
            found: groups.minority.len(),
            required: 2,
        });
    }
    let target = groups.target(opts.ratio);
    if target <= groups.minority.len() {
        return Ok(None);
    }
    let index = DistanceIndex::new(ds.rows());
    let k_eff = opts.k.min(groups.minority.len() - 1);
    let mut neighbors = vec![Vec::new(); ds.len()];
    for (&i, nb) in
        groups
            .minority
            .iter()
            .zip(index.knn_many(&groups.minority, k_eff, &groups.minority))
    {
        neighbors[i] = nb;
    }
    Ok(Some(Prepared {
        index,
        need: target - groups.minority.len(),
        neighbors,
        rng: seeded(opts.seed),
    }))
}

impl Prepared<'_> {
    pub fn random_neighbor(&mut self, base: usize) -> usize {
        let nb = &self.neighbors[base];
        nb[self.rng.random_range(0..nb.len())]
    }

    pub fn emit(&self, out: &mut Generated, label: u32, base: usize, partner: usize, delta: f64) {
        let row = self
            .index
            .row(base)
            .interpolate(self.index.row(partner), delta);
        out.rows.push((
            row,
            label,
            Provenance::Synthetic(SyntheticOrigin {
                base,
                partner,
                delta,
            }),
        ));
    }

    /// Round-robin over `bases`, each step toward a random minority neighbor.
    pub fn interpolate_round_robin(
        &mut self,
        out: &mut Generated,
        label: u32,
        bases: &[usize],
        delta: super::DeltaMode,
    ) {
        for t in 0..self.need {
            let base = bases[t % bases.len()];
            let partner = self.random_neighbor(base);
            let d = delta.draw(&mut self.rng);
            self.emit(out, label, base, partner, d);
        }
    }
}

pub(crate) fn smote_rows(
    ds: &Dataset,
    groups: &Groups,
    variant: SmoteVariant,
    opts: &OversampleOptions,
) -> Result<Generated> {
    let mut out = Generated::default();
    let Some(mut p) = prepare(ds, groups, opts)? else {
        out.flags.push(Flag::TargetMet);
        return Ok(out);
    };
    let label = groups.label;
    match variant {
        SmoteVariant::Regular => {
            p.interpolate_round_robin(&mut out, label, &groups.minority, opts.delta);
        }
        SmoteVariant::Borderline1 => {
            let danger = danger_rows(ds, groups, opts.k);
            if danger.is_empty() {
                log::warn!("borderline SMOTE: no DANGER rows for class {label}");
                out.flags.push(Flag::NoDangerRows);
                return Ok(out);
            }
            p.interpolate_round_robin(&mut out, label, &danger, opts.delta);
        }
        SmoteVariant::Borderline2 => {
            let danger = danger_rows(ds, groups, opts.k);
            if danger.is_empty() {
                log::warn!("borderline SMOTE: no DANGER rows for class {label}");
                out.flags.push(Flag::NoDangerRows);
                return Ok(out);
            }
            let nearest_major: Vec<usize> = p
                .index
                .knn_many(&danger, 1, &groups.majority)
                .into_iter()
                .map(|nb| nb[0])
                .collect();
            // even steps toward a minority neighbor, odd steps toward the
            // nearest majority row with half the step range
            for t in 0..p.need {
                let slot = (t / 2) % danger.len();
                let base = danger[slot];
                if t % 2 == 0 {
                    let partner = p.random_neighbor(base);
                    let d = opts.delta.draw(&mut p.rng);
                    p.emit(&mut out, label, base, partner, d);
                } else {
                    let d = 0.5 * opts.delta.draw(&mut p.rng);
                    p.emit(&mut out, label, base, nearest_major[slot], d);
                }
            }
        }
        SmoteVariant::Svm => {
            let pos: Vec<_> = groups.minority.iter().map(|&i| ds.row(i)).collect();
            let neg: Vec<_> = groups.majority.iter().map(|&i| ds.row(i)).collect();
            let (_, support) = train_binary_with_support(&pos, &neg, &opts.svm, opts.seed)?;
            let sv: Vec<usize> = support
                .indices
                .iter()
                .filter(|&&s| s < pos.len())
                .map(|&s| groups.minority[s])
                .collect();
            if sv.is_empty() {
                log::warn!(
                    "SVM-SMOTE: no minority support vectors for class {label}; using regular SMOTE"
                );
                out.flags.push(Flag::NoSupportVectors);
                p.interpolate_round_robin(&mut out, label, &groups.minority, opts.delta);
                return Ok(out);
            }
            // majority counts over the full union, as for borderline SMOTE
            let union = groups.union();
            let is_major = membership(ds.len(), &groups.majority);
            let counts: Vec<(usize, usize)> = p
                .index
                .knn_many(&sv, opts.k, &union)
                .into_iter()
                .map(|nb| (nb.iter().filter(|&&j| is_major[j]).count(), nb.len()))
                .collect();
            for t in 0..p.need {
                let slot = t % sv.len();
                let base = sv[slot];
                let (kp, kk) = counts[slot];
                let partner = p.random_neighbor(base);
                let u = opts.delta.draw(&mut p.rng);
                let d = if 2 * kp < kk { u } else { -0.5 * u };
                p.emit(&mut out, label, base, partner, d);
            }
        }
    }
    Ok(out)
}
