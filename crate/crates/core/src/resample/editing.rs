use super::{Flag, ResampleResult};
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::neighbors::DistanceIndex;

/// Leave-one-out k-NN vote for every row. A row counts as misclassified
/// unless its own label strictly outpolls every other class; a row with no
/// neighbors at all is left alone. Also returns the neighbor lists.
fn enn_votes(ds: &Dataset, k: usize) -> (Vec<bool>, Vec<Vec<usize>>) {
    let neighbors = DistanceIndex::new(ds.rows()).all_knn(k);
    let m = ds.n_classes();
    let mis = neighbors
        .iter()
        .enumerate()
        .map(|(i, nb)| {
            if nb.is_empty() {
                return false;
            }
            let mut votes = vec![0usize; m];
            for &j in nb {
                votes[ds.label(j) as usize - 1] += 1;
            }
            let own = ds.label(i) as usize - 1;
            votes
                .iter()
                .enumerate()
                .any(|(c, &v)| c != own && v >= votes[own])
        })
        .collect();
    (mis, neighbors)
}

pub fn enn_misclassified(ds: &Dataset, k: usize) -> Vec<bool> {
    enn_votes(ds, k).0
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidArgument("k must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Wilson editing: removes every misclassified row whose class is not in `protect`.
pub fn edited_nn(ds: &Dataset, k: usize, protect: &[Label]) -> Result<ResampleResult> {
    check_k(k)?;
    let mis = enn_misclassified(ds, k);
    let keep: Vec<usize> = (0..ds.len())
        .filter(|&i| !mis[i] || protect.contains(&ds.label(i)))
        .collect();
    Ok(ResampleResult::keep(ds, &keep))
}

/// One editing pass that never empties a class: if every current row of a
/// class is marked, that class is spared for the pass. Returns the positions
/// to remove and the spared classes.
pub fn guarded_enn_step(ds: &Dataset, k: usize, protect: &[Label]) -> (Vec<usize>, Vec<Label>) {
    let mis = enn_misclassified(ds, k);
    let counts = ds.class_counts();
    let mut marked = vec![0usize; ds.n_classes()];
    for i in 0..ds.len() {
        if mis[i] && !protect.contains(&ds.label(i)) {
            marked[ds.label(i) as usize - 1] += 1;
        }
    }
    let spared: Vec<Label> = (0..ds.n_classes())
        .filter(|&c| counts[c] > 0 && marked[c] == counts[c])
        .map(|c| c as Label + 1)
        .collect();
    let remove = (0..ds.len())
        .filter(|&i| {
            let l = ds.label(i);
            mis[i] && !protect.contains(&l) && !spared.contains(&l)
        })
        .collect();
    (remove, spared)
}

/// Repeats guarded editing passes until one removes nothing. The output is a
/// fixpoint of [`guarded_enn_step`].
pub fn repeated_edited_nn(ds: &Dataset, k: usize, protect: &[Label]) -> Result<ResampleResult> {
    check_k(k)?;
    let mut current: Vec<usize> = (0..ds.len()).collect();
    let mut flags = Vec::new();
    loop {
        let (remove, spared) = guarded_enn_step(&ds.subset(&current), k, protect);
        for c in spared {
            let f = Flag::ClassSpared(c);
            if !flags.contains(&f) {
                flags.push(f);
            }
        }
        if remove.is_empty() {
            break;
        }
        let mut gone = vec![false; current.len()];
        for p in remove {
            gone[p] = true;
        }
        current = current
            .iter()
            .zip(&gone)
            .filter(|(_, &g)| !g)
            .map(|(&i, _)| i)
            .collect();
    }
    let mut out = ResampleResult::keep(ds, &current);
    out.flags = flags;
    Ok(out)
}

/// Editing that spares the smallest class, plus removal of the non-minority
/// neighbors of every misclassified minority row.
pub fn neighborhood_cleaning(ds: &Dataset, k: usize) -> Result<ResampleResult> {
    check_k(k)?;
    let minority = ds.minority_class().ok_or(Error::EmptyDataset)?;
    let (mis, neighbors) = enn_votes(ds, k);
    let mut drop = vec![false; ds.len()];
    for i in 0..ds.len() {
        if !mis[i] {
            continue;
        }
        if ds.label(i) != minority {
            drop[i] = true;
        } else {
            for &j in &neighbors[i] {
                if ds.label(j) != minority {
                    drop[j] = true;
                }
            }
        }
    }
    let keep: Vec<usize> = (0..ds.len()).filter(|&i| !drop[i]).collect();
    Ok(ResampleResult::keep(ds, &keep))
}
