use super::{check_ratio, ResampleResult};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::neighbors::DistanceIndex;
use crate::rng::ceil_tol;

/// Minority rows averaged over when scoring a majority row.
pub const NEAR_MISS_NEIGHBORS: usize = 3;

/// NearMiss-1. Every class larger than `ceil(n_min / ratio)` keeps that many
/// rows: those with the smallest mean squared distance to their nearest
/// minority rows, ties to the lower row index.
pub fn near_miss1(ds: &Dataset, ratio: f64) -> Result<ResampleResult> {
    check_ratio(ratio)?;
    let minority = ds.minority_class().ok_or(Error::EmptyDataset)?;
    let class_rows = ds.class_rows();
    let min_rows = &class_rows[minority as usize - 1];
    let target = ceil_tol(min_rows.len() as f64 / ratio);
    let index = DistanceIndex::new(ds.rows());
    let mut keep = Vec::with_capacity(ds.len());
    for (c, rows) in class_rows.iter().enumerate() {
        if c as u32 + 1 == minority || rows.len() <= target {
            keep.extend_from_slice(rows);
            continue;
        }
        let mut scored: Vec<(f64, usize)> = rows
            .iter()
            .map(|&r| {
                let nb = index.knn(r, NEAR_MISS_NEIGHBORS, Some(min_rows));
                let sum: f64 = nb.iter().map(|&j| index.distance(r, j)).sum();
                (sum / nb.len() as f64, r)
            })
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        keep.extend(scored[..target].iter().map(|&(_, r)| r));
    }
    keep.sort_unstable();
    Ok(ResampleResult::keep(ds, &keep))
}
