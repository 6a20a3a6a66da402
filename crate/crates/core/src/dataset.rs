//! Sparse feature vectors and labeled datasets.
//!
//! Rows produced by vectorization hold positive integer counts. Rows produced by
//! the SMOTE family hold real values; extrapolating variants may produce negative
//! entries, so the stored-value invariant is "nonzero", not "positive".

use crate::error::{Error, Result};

/// Ordinal class id, 1-based.
pub type Label = u32;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn empty(dim: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a vector from `(index, value)` pairs in any order. Duplicate
    /// indices are summed and zero values dropped.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut pairs: Vec<(usize, f64)> = pairs.into_iter().collect();
        pairs.sort_by_key(|&(i, _)| i);
        let mut indices = Vec::with_capacity(pairs.len());
        let mut values: Vec<f64> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            if i >= dim {
                return Err(Error::InvalidArgument(format!(
                    "feature index {i} out of range for dimension {dim}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite value at feature {i}"
                )));
            }
            if indices.last() == Some(&(i as u32)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(i as u32);
                values.push(v);
            }
        }
        let mut out = SparseVector {
            dim,
            indices,
            values,
        };
        out.drop_zeros();
        Ok(out)
    }

    pub fn from_dense(values: &[f64]) -> Self {
        let mut indices = Vec::new();
        let mut vals = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            if v != 0.0 {
                indices.push(i as u32);
                vals.push(v);
            }
        }
        SparseVector {
            dim: values.len(),
            indices,
            values: vals,
        }
    }

    fn drop_zeros(&mut self) {
        if self.values.iter().all(|&v| v != 0.0) {
            return;
        }
        let mut w = 0;
        for r in 0..self.values.len() {
            if self.values[r] != 0.0 {
                self.indices[w] = self.indices[r];
                self.values[w] = self.values[r];
                w += 1;
            }
        }
        self.indices.truncate(w);
        self.values.truncate(w);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&i, &v)| (i as usize, v))
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&(index as u32)) {
            Ok(p) => self.values[p],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// `self + (other - self) * delta`, evaluated coordinate-wise over the union
    /// of both supports. Coordinates that land exactly on zero are dropped.
    pub fn interpolate(&self, other: &SparseVector, delta: f64) -> SparseVector {
        debug_assert_eq!(self.dim, other.dim);
        let mut indices = Vec::with_capacity(self.nnz() + other.nnz());
        let mut values = Vec::with_capacity(self.nnz() + other.nnz());
        let mut push = |i: u32, a: f64, b: f64| {
            let v = a + (b - a) * delta;
            if v != 0.0 {
                indices.push(i);
                values.push(v);
            }
        };
        let (ai, av, bi, bv) = (&self.indices, &self.values, &other.indices, &other.values);
        let (mut p, mut q) = (0, 0);
        while p < ai.len() && q < bi.len() {
            if ai[p] < bi[q] {
                push(ai[p], av[p], 0.0);
                p += 1;
            } else if ai[p] > bi[q] {
                push(bi[q], 0.0, bv[q]);
                q += 1;
            } else {
                push(ai[p], av[p], bv[q]);
                p += 1;
                q += 1;
            }
        }
        for k in p..ai.len() {
            push(ai[k], av[k], 0.0);
        }
        for k in q..bi.len() {
            push(bi[k], 0.0, bv[k]);
        }
        SparseVector {
            dim: self.dim,
            indices,
            values,
        }
    }

    /// Keeps only the listed features, renumbered to their position in `keep`.
    /// `keep` must be sorted ascending.
    pub fn project(&self, keep: &[usize]) -> SparseVector {
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (i, v) in self.iter() {
            if let Ok(pos) = keep.binary_search(&i) {
                indices.push(pos as u32);
                values.push(v);
            }
        }
        SparseVector {
            dim: keep.len(),
            indices,
            values,
        }
    }

    /// Rounds every entry to the nearest integer, dropping entries that become 0.
    pub fn rounded(&self) -> SparseVector {
        let mut out = self.clone();
        for v in &mut out.values {
            *v = v.round();
        }
        out.drop_zeros();
        out
    }
}

/// Squared Euclidean distance, accumulated in ascending feature order so the
/// result is bit-identical to a dense loop over all coordinates.
#[inline]
pub fn squared_distance(a: &SparseVector, b: &SparseVector) -> f64 {
    let (ai, av, bi, bv) = (&a.indices, &a.values, &b.indices, &b.values);
    let (mut p, mut q) = (0, 0);
    let mut acc = 0.0;
    while p < ai.len() && q < bi.len() {
        let (x, y) = (ai[p], bi[q]);
        if x < y {
            acc += av[p] * av[p];
            p += 1;
        } else if x > y {
            acc += bv[q] * bv[q];
            q += 1;
        } else {
            let d = av[p] - bv[q];
            acc += d * d;
            p += 1;
            q += 1;
        }
    }
    for v in &av[p..] {
        acc += v * v;
    }
    for v in &bv[q..] {
        acc += v * v;
    }
    acc
}

/// Rows paired with 1-based labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    rows: Vec<SparseVector>,
    labels: Vec<Label>,
    n_classes: usize,
    dim: usize,
}

impl Dataset {
    pub fn new(
        rows: Vec<SparseVector>,
        labels: Vec<Label>,
        n_classes: usize,
        dim: usize,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: rows.len(),
            });
        }
        for &l in &labels {
            if l == 0 || l as usize > n_classes {
                return Err(Error::LabelOutOfRange {
                    label: l,
                    classes: n_classes,
                });
            }
        }
        for r in &rows {
            if r.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.dim(),
                });
            }
        }
        Ok(Dataset {
            rows,
            labels,
            n_classes,
            dim,
        })
    }

    /// Builds a dataset from dense rows; handy for small geometric fixtures.
    pub fn from_dense(rows: &[Vec<f64>], labels: &[Label], n_classes: usize) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let rows = rows.iter().map(|r| SparseVector::from_dense(r)).collect();
        Dataset::new(rows, labels.to_vec(), n_classes, dim)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &SparseVector {
        &self.rows[i]
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row counts per class; entry `c - 1` holds the count for class `c`.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l as usize - 1] += 1;
        }
        counts
    }

    /// Row indices per class, ascending; entry `c - 1` is class `c`.
    pub fn class_rows(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_classes];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l as usize - 1].push(i);
        }
        out
    }

    /// The smallest nonempty class; ties go to the lower class id.
    pub fn minority_class(&self) -> Option<Label> {
        self.class_counts()
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .min_by_key(|&(c, &n)| (n, c))
            .map(|(c, _)| c as Label + 1)
    }

    /// The largest class; ties go to the lower class id.
    pub fn majority_class(&self) -> Option<Label> {
        self.class_counts()
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .max_by_key(|&(c, &n)| (n, std::cmp::Reverse(c)))
            .map(|(c, _)| c as Label + 1)
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            n_classes: self.n_classes,
            dim: self.dim,
        }
    }

    /// Keeps only the listed feature columns (sorted ascending), renumbered 0..k.
    pub fn project(&self, keep: &[usize]) -> Dataset {
        Dataset {
            rows: self.rows.iter().map(|r| r.project(keep)).collect(),
            labels: self.labels.clone(),
            n_classes: self.n_classes,
            dim: keep.len(),
        }
    }

    pub fn push(&mut self, row: SparseVector, label: Label) -> Result<()> {
        if row.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: row.dim(),
            });
        }
        if label == 0 || label as usize > self.n_classes {
            return Err(Error::LabelOutOfRange {
                label,
                classes: self.n_classes,
            });
        }
        self.rows.push(row);
        self.labels.push(label);
        Ok(())
    }

    pub fn into_parts(self) -> (Vec<SparseVector>, Vec<Label>) {
        (self.rows, self.labels)
    }
}
