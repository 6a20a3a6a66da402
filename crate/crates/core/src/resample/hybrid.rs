use super::editing::enn_misclassified;
use super::smote::smote;
use super::{Groups, OversampleOptions, ResampleResult, SmoteVariant};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::neighbors::DistanceIndex;

/// Neighbors used by the editing stage of SMOTE + ENN.
pub const SMOTE_ENN_K: usize = 3;

/// Removes both members of every Tomek link, repeating until none remain.
/// Removing a link can expose a new one, hence the loop.
pub fn clean_tomek(mut result: ResampleResult) -> ResampleResult {
    loop {
        let index = DistanceIndex::new(result.dataset.rows());
        let links = index.tomek_links(result.dataset.labels());
        if links.is_empty() {
            return result;
        }
        let mut drop: Vec<usize> = links.iter().flat_map(|l| [l.i, l.j]).collect();
        drop.sort_unstable();
        drop.dedup();
        result.drop_rows(&drop);
    }
}

/// One unprotected editing pass with `k = 3` over the whole result.
pub fn clean_enn(mut result: ResampleResult) -> ResampleResult {
    let mis = enn_misclassified(&result.dataset, SMOTE_ENN_K);
    let drop: Vec<usize> = (0..mis.len()).filter(|&i| mis[i]).collect();
    result.drop_rows(&drop);
    result
}

pub fn smote_tomek(
    ds: &Dataset,
    groups: &Groups,
    opts: &OversampleOptions,
) -> Result<ResampleResult> {
    Ok(clean_tomek(smote(ds, groups, SmoteVariant::Regular, opts)?))
}

pub fn smote_enn(
    ds: &Dataset,
    groups: &Groups,
    opts: &OversampleOptions,
) -> Result<ResampleResult> {
    Ok(clean_enn(smote(ds, groups, SmoteVariant::Regular, opts)?))
}
