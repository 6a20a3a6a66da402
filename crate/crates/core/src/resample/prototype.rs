use rand::seq::SliceRandom;
use rand::Rng as _;

use super::ResampleResult;
use crate::dataset::{squared_distance, Dataset};
use crate::error::{Error, Result};
use crate::neighbors::DistanceIndex;
use crate::rng::seeded;

/// Hart's condensing with every minority row kept.
///
/// The store starts with all rows of the smallest class and one random row of
/// each other class. The remaining rows are scanned in a seeded random order;
/// a row misclassified by 1-NN against the current store joins it. Scans
/// repeat until one adds nothing, so the store classifies every row correctly.
/// Returns the store, ascending.
pub fn condensed_store(ds: &Dataset, seed: u64) -> Result<Vec<usize>> {
    let minority = ds.minority_class().ok_or(Error::EmptyDataset)?;
    let mut rng = seeded(seed);
    let n = ds.len();
    let mut in_store = vec![false; n];
    let mut store = Vec::new();
    for (c, rows) in ds.class_rows().iter().enumerate() {
        if rows.is_empty() {
            continue;
        }
        if c as u32 + 1 == minority {
            store.extend_from_slice(rows);
        } else {
            store.push(rows[rng.random_range(0..rows.len())]);
        }
    }
    for &s in &store {
        in_store[s] = true;
    }
    let mut order: Vec<usize> = (0..n).filter(|&i| !in_store[i]).collect();
    order.shuffle(&mut rng);

    // per row: nearest store member so far and how much of the store it has seen
    let mut nearest = vec![(f64::INFINITY, usize::MAX, 0usize); n];
    loop {
        let mut added = false;
        for &r in &order {
            if in_store[r] {
                continue;
            }
            let (mut bd, mut bi, seen) = nearest[r];
            for &s in &store[seen..] {
                let d = squared_distance(ds.row(r), ds.row(s));
                if d < bd || (d == bd && s < bi) {
                    bd = d;
                    bi = s;
                }
            }
            nearest[r] = (bd, bi, store.len());
            if ds.label(bi) != ds.label(r) {
                in_store[r] = true;
                store.push(r);
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    store.sort_unstable();
    Ok(store)
}

pub fn condensed_nn(ds: &Dataset, seed: u64) -> Result<ResampleResult> {
    let store = condensed_store(ds, seed)?;
    Ok(ResampleResult::keep(ds, &store))
}

/// Condensed store, then removal of the non-minority members of every Tomek
/// link among the store's rows.
pub fn one_sided_selection(ds: &Dataset, seed: u64) -> Result<ResampleResult> {
    let minority = ds.minority_class().ok_or(Error::EmptyDataset)?;
    let store = condensed_store(ds, seed)?;
    let index = DistanceIndex::from_refs(store.iter().map(|&i| ds.row(i)).collect());
    let labels: Vec<u32> = store.iter().map(|&i| ds.label(i)).collect();
    let mut drop = vec![false; store.len()];
    for link in index.tomek_links(&labels) {
        for p in [link.i, link.j] {
            if labels[p] != minority {
                drop[p] = true;
            }
        }
    }
    let keep: Vec<usize> = store
        .iter()
        .zip(&drop)
        .filter(|(_, &d)| !d)
        .map(|(&i, _)| i)
        .collect();
    Ok(ResampleResult::keep(ds, &keep))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_nn(ds: &Dataset, store: &[usize], r: usize) -> u32 {
        let best = store
            .iter()
            .min_by(|&&a, &&b| {
                squared_distance(ds.row(r), ds.row(a))
                    .total_cmp(&squared_distance(ds.row(r), ds.row(b)))
                    .then(a.cmp(&b))
            })
            .unwrap();
        ds.label(*best)
    }

    fn line() -> Dataset {
        let xs = [0.0, 0.1, 0.2, 0.9, 1.0, 1.3];
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        Dataset::from_dense(&rows, &[1, 1, 1, 1, 2, 2], 2).unwrap()
    }

    #[test]
    fn store_is_consistent() {
        let ds = line();
        for seed in 0..20 {
            let store = condensed_store(&ds, seed).unwrap();
            assert!(store.contains(&4) && store.contains(&5));
            for r in 0..ds.len() {
                assert_eq!(one_nn(&ds, &store, r), ds.label(r), "seed {seed} row {r}");
            }
        }
    }

    #[test]
    fn repeated_points_condense_to_two() {
        let rows = vec![
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            vec![5.0, 5.0],
        ];
        let ds = Dataset::from_dense(&rows, &[1, 1, 1, 2], 2).unwrap();
        assert_eq!(condensed_store(&ds, 4).unwrap().len(), 2);
    }

    #[test]
    fn separated_clusters() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            rows.push(vec![i as f64 * 0.1, 0.0]);
            labels.push(1);
        }
        for i in 0..3 {
            rows.push(vec![50.0 + i as f64 * 0.1, 0.0]);
            labels.push(2);
        }
        let ds = Dataset::from_dense(&rows, &labels, 2).unwrap();
        let r = condensed_nn(&ds, 9).unwrap();
        assert_eq!(r.dataset.class_counts(), [1, 3]);
        let r = one_sided_selection(&ds, 9).unwrap();
        assert_eq!(r.dataset.class_counts()[1], 3);
        assert!(r.dataset.class_counts()[0] < 10);
    }

    #[test]
    fn oss_keeps_every_minority_row() {
        let ds = line();
        for seed in 0..20 {
            let r = one_sided_selection(&ds, seed).unwrap();
            assert_eq!(r.dataset.class_counts()[1], 2);
        }
    }
}
