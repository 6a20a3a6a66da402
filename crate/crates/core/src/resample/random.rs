use rand::seq::index;
use rand::Rng as _;

use super::{check_ratio, Generated, Groups, Provenance, ResampleResult};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{ceil_tol, seeded};

/// Caps every class at `ceil(n_min / ratio)` rows by uniform sampling without
/// replacement, where `n_min` is the smallest nonempty class count.
pub fn random_under(ds: &Dataset, ratio: f64, seed: u64) -> Result<ResampleResult> {
    check_ratio(ratio)?;
    let counts = ds.class_counts();
    let n_min = counts
        .iter()
        .copied()
        .filter(|&n| n > 0)
        .min()
        .ok_or(Error::EmptyDataset)?;
    let target = ceil_tol(n_min as f64 / ratio);
    let mut rng = seeded(seed);
    let mut keep = Vec::with_capacity(ds.len());
    for rows in ds.class_rows() {
        if rows.len() > target {
            keep.extend(
                index::sample(&mut rng, rows.len(), target)
                    .into_iter()
                    .map(|p| rows[p]),
            );
        } else {
            keep.extend_from_slice(&rows);
        }
    }
    keep.sort_unstable();
    Ok(ResampleResult::keep(ds, &keep))
}

/// Grows the minority to `ceil(ratio * |majority|)` rows by copying minority
/// rows chosen uniformly with replacement.
pub fn random_over(ds: &Dataset, groups: &Groups, ratio: f64, seed: u64) -> Result<ResampleResult> {
    let generated = random_over_rows(ds, groups, ratio, seed)?;
    ResampleResult::augment(ds, generated)
}

pub(crate) fn random_over_rows(
    ds: &Dataset,
    groups: &Groups,
    ratio: f64,
    seed: u64,
) -> Result<Generated> {
    check_ratio(ratio)?;
    if groups.minority.is_empty() {
        return Err(Error::TooFewMinority {
            found: 0,
            required: 1,
        });
    }
    let target = groups.target(ratio);
    let mut out = Generated::default();
    if groups.minority.len() >= target {
        out.flags.push(super::Flag::TargetMet);
        return Ok(out);
    }
    let mut rng = seeded(seed);
    for _ in groups.minority.len()..target {
        let i = groups.minority[rng.random_range(0..groups.minority.len())];
        out.rows
            .push((ds.row(i).clone(), groups.label, Provenance::Duplicate(i)));
    }
    Ok(out)
}
