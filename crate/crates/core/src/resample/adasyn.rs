use super::smote::{majority_counts, prepare};
use super::{Flag, Generated, Groups, OversampleOptions, ResampleResult};
use crate::dataset::Dataset;
use crate::error::Result;

/// Adaptive synthetic sampling: minority rows with more majority rows among
/// their `k` nearest neighbors generate proportionally more synthetic rows.
pub fn adasyn(ds: &Dataset, groups: &Groups, opts: &OversampleOptions) -> Result<ResampleResult> {
    let generated = adasyn_rows(ds, groups, opts)?;
    ResampleResult::augment(ds, generated)
}

/// Normalized densities `r_i / sum(r)` with `r_i = k'_i / K`, in minority
/// order. `None` when no minority row has a majority neighbor.
pub fn adasyn_weights(ds: &Dataset, groups: &Groups, k: usize) -> Option<Vec<f64>> {
    let counts = majority_counts(ds, groups, k);
    let total: usize = counts.iter().map(|c| c.0).sum();
    if total == 0 {
        return None;
    }
    Some(counts.iter().map(|c| c.0 as f64 / total as f64).collect())
}

/// Splits `g` rows in proportion to integer weights by largest remainder;
/// equal remainders favor the lower index. Every neighbor count shares the
/// same `K`, so the proportions are exact ratios of the majority counts.
pub fn adasyn_allocation(weights: &[usize], g: usize) -> Vec<usize> {
    let total: u128 = weights.iter().map(|&w| w as u128).sum();
    assert!(total > 0, "allocation needs a positive weight");
    let g128 = g as u128;
    let mut alloc: Vec<usize> = weights
        .iter()
        .map(|&w| (w as u128 * g128 / total) as usize)
        .collect();
    let left = g - alloc.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = weights[a] as u128 * g128 % total;
        let rb = weights[b] as u128 * g128 % total;
        rb.cmp(&ra).then(a.cmp(&b))
    });
    for &i in &order[..left] {
        alloc[i] += 1;
    }
    alloc
}

pub(crate) fn adasyn_rows(
    ds: &Dataset,
    groups: &Groups,
    opts: &OversampleOptions,
) -> Result<Generated> {
    let mut out = Generated::default();
    let Some(mut p) = prepare(ds, groups, opts)? else {
        out.flags.push(Flag::TargetMet);
        return Ok(out);
    };
    let kprime: Vec<usize> = majority_counts(ds, groups, opts.k)
        .into_iter()
        .map(|c| c.0)
        .collect();
    if kprime.iter().all(|&k| k == 0) {
        log::warn!(
            "ADASYN: no majority neighbors for class {}; using regular SMOTE",
            groups.label
        );
        out.flags.push(Flag::ZeroDensity);
        p.interpolate_round_robin(&mut out, groups.label, &groups.minority, opts.delta);
        return Ok(out);
    }
    let alloc = adasyn_allocation(&kprime, p.need);
    for (&base, &n) in groups.minority.iter().zip(&alloc) {
        for _ in 0..n {
            let partner = p.random_neighbor(base);
            let d = opts.delta.draw(&mut p.rng);
            p.emit(&mut out, groups.label, base, partner, d);
        }
    }
    Ok(out)
}
