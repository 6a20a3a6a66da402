//! Brute-force neighbor search over sparse rows and Tomek-link detection.
//!
//! The metric is squared Euclidean distance. Neighbor lists are ordered by
//! `(distance, row index)`, so equidistant rows resolve to the lower index.

use rayon::prelude::*;

use crate::dataset::{squared_distance, Label, SparseVector};

/// A read-only view over rows that answers neighbor queries. Row positions in
/// the view are the indices used by every query and result.
#[derive(Clone, Debug)]
pub struct DistanceIndex<'a> {
    rows: Vec<&'a SparseVector>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TomekPair {
    pub i: usize,
    pub j: usize,
}

/// The `k` smallest `(distance, index)` pairs seen so far, kept sorted.
#[derive(Clone, Debug)]
struct TopK {
    k: usize,
    items: Vec<(f64, usize)>,
}

impl TopK {
    fn new(k: usize) -> Self {
        TopK {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    #[inline]
    fn offer(&mut self, d: f64, idx: usize) {
        if self.k == 0 {
            return;
        }
        if self.items.len() == self.k {
            let &(ld, li) = self.items.last().unwrap();
            if d > ld || (d == ld && idx > li) {
                return;
            }
        }
        let pos = self
            .items
            .partition_point(|&(x, i)| x < d || (x == d && i < idx));
        self.items.insert(pos, (d, idx));
        self.items.truncate(self.k);
    }

    fn indices(&self) -> Vec<usize> {
        self.items.iter().map(|&(_, i)| i).collect()
    }
}

impl<'a> DistanceIndex<'a> {
    pub fn new(rows: &'a [SparseVector]) -> Self {
        DistanceIndex {
            rows: rows.iter().collect(),
        }
    }

    pub fn from_refs(rows: Vec<&'a SparseVector>) -> Self {
        DistanceIndex { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &'a SparseVector {
        self.rows[i]
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        squared_distance(self.rows[i], self.rows[j])
    }

    /// The `k` nearest rows to `query`, excluding `query` itself, drawn from
    /// `restrict_to` when given. Returns fewer than `k` if candidates run out.
    pub fn knn(&self, query: usize, k: usize, restrict_to: Option<&[usize]>) -> Vec<usize> {
        self.knn_point(self.rows[query], k, restrict_to, Some(query))
    }

    /// Neighbors of an arbitrary point among the indexed rows.
    pub fn knn_point(
        &self,
        point: &SparseVector,
        k: usize,
        restrict_to: Option<&[usize]>,
        exclude: Option<usize>,
    ) -> Vec<usize> {
        let mut top = TopK::new(k);
        let mut visit = |j: usize| {
            if Some(j) != exclude {
                top.offer(squared_distance(point, self.rows[j]), j);
            }
        };
        match restrict_to {
            Some(c) => c.iter().copied().for_each(&mut visit),
            None => (0..self.rows.len()).for_each(&mut visit),
        }
        top.indices()
    }

    /// `knn(i, k, None)` for every row, sharing each pairwise distance.
    pub fn all_knn(&self, k: usize) -> Vec<Vec<usize>> {
        let n = self.rows.len();
        if rayon::current_num_threads() > 1 {
            return (0..n)
                .into_par_iter()
                .map(|i| self.knn(i, k, None))
                .collect();
        }
        let mut tops = vec![TopK::new(k); n];
        for i in 0..n {
            for j in i + 1..n {
                let d = self.distance(i, j);
                tops[i].offer(d, j);
                tops[j].offer(d, i);
            }
        }
        tops.iter().map(TopK::indices).collect()
    }

    /// `knn(q, k, Some(candidates))` for each query in `queries`.
    pub fn knn_many(&self, queries: &[usize], k: usize, candidates: &[usize]) -> Vec<Vec<usize>> {
        queries
            .par_iter()
            .map(|&q| self.knn(q, k, Some(candidates)))
            .collect()
    }

    /// Opposite-class pairs `(x, y)` with no third row `z` such that
    /// `d(x,z) < d(x,y)` or `d(y,z) < d(y,x)`.
    pub fn tomek_links(&self, labels: &[Label]) -> Vec<TomekPair> {
        let n = self.rows.len();
        assert_eq!(labels.len(), n, "one label per indexed row");
        // per row: smallest distance to any other row and every row attaining it
        let mut best: Vec<(f64, Vec<usize>)> = vec![(f64::INFINITY, Vec::new()); n];
        let record = |best: &mut Vec<(f64, Vec<usize>)>, i: usize, j: usize, d: f64| {
            let b = &mut best[i];
            if d < b.0 {
                b.0 = d;
                b.1.clear();
                b.1.push(j);
            } else if d == b.0 {
                b.1.push(j);
            }
        };
        for i in 0..n {
            for j in i + 1..n {
                let d = self.distance(i, j);
                record(&mut best, i, j, d);
                record(&mut best, j, i, d);
            }
        }
        let mut links = Vec::new();
        for i in 0..n {
            for &j in &best[i].1 {
                if j > i && labels[i] != labels[j] && best[j].1.contains(&i) {
                    links.push(TomekPair { i, j });
                }
            }
        }
        links.sort_unstable();
        links
    }
}
