//! Symmetric d-linear integer intersection forms.
//!
//! Entries are stored sparsely, keyed by sorted multi-indices, so symmetry
//! holds by construction and only nonzero values are kept.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{MarkedPartition, ProximityForest};

/// A sorted multiset of component indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        MultiIndex(indices)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn multiplicity(&self, i: usize) -> usize {
        self.0.iter().filter(|&&x| x == i).count()
    }

    /// `i` repeated `s` times and `j` repeated `r` times.
    pub fn powers(i: usize, s: usize, j: usize, r: usize) -> Self {
        let mut v = vec![i; s];
        v.extend(std::iter::repeat_n(j, r));
        MultiIndex::new(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntersectionTensor {
    dimension: usize,
    size: usize,
    entries: BTreeMap<MultiIndex, i64>,
}

impl IntersectionTensor {
    pub fn zero(dimension: usize, size: usize) -> Self {
        IntersectionTensor {
            dimension,
            size,
            entries: BTreeMap::new(),
        }
    }

    /// Build from `(indices, value)` pairs. Indices may be given in any
    /// order; a multiset given twice is rejected and zero values dropped.
    pub fn from_entries<I>(dimension: usize, size: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, i64)>,
    {
        if dimension < 1 {
            return Err(Error::InvalidTensor("dimension must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (indices, value) in entries {
            if indices.len() != dimension {
                return Err(Error::InvalidTensor(format!(
                    "index of length {} in a {dimension}-linear form",
                    indices.len()
                )));
            }
            if let Some(&bad) = indices.iter().find(|&&i| i >= size) {
                return Err(Error::IndexOutOfRange {
                    index: bad + 1,
                    size,
                });
            }
            let key = MultiIndex::new(indices);
            if map.contains_key(&key) {
                return Err(Error::InvalidTensor(format!(
                    "duplicate index {:?}",
                    one_based(key.as_slice())
                )));
            }
            if value != 0 {
                map.insert(key, value);
            }
        }
        Ok(IntersectionTensor {
            dimension,
            size,
            entries: map,
        })
    }

    pub(crate) fn from_map(dimension: usize, size: usize, mut entries: BTreeMap<MultiIndex, i64>) -> Self {
        entries.retain(|_, v| *v != 0);
        IntersectionTensor {
            dimension,
            size,
            entries,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, i64)> + '_ {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    /// Value at an arbitrary (unsorted) index tuple.
    pub fn get(&self, indices: &[usize]) -> i64 {
        let key = MultiIndex::new(indices.to_vec());
        self.entries.get(&key).copied().unwrap_or(0)
    }

    pub fn get_multi(&self, key: &MultiIndex) -> i64 {
        self.entries.get(key).copied().unwrap_or(0)
    }

    /// `T(i^s j^r)`.
    pub fn power_product(&self, i: usize, s: usize, j: usize, r: usize) -> i64 {
        self.get_multi(&MultiIndex::powers(i, s, j, r))
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.size)
            .map(|i| self.get_multi(&MultiIndex(vec![i; self.dimension])))
            .collect()
    }

    /// Multilinear extension to integer vectors of length `size`.
    pub fn evaluate(&self, vectors: &[&[i64]]) -> Result<i64> {
        if vectors.len() != self.dimension {
            return Err(Error::SizeMismatch {
                expected: self.dimension,
                found: vectors.len(),
            });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.size) {
            return Err(Error::SizeMismatch {
                expected: self.size,
                found: v.len(),
            });
        }
        let mut total: i64 = 0;
        for (key, value) in &self.entries {
            let mut arrangement = key.0.clone();
            loop {
                let mut term = *value;
                for (slot, &i) in arrangement.iter().enumerate() {
                    term = term.checked_mul(vectors[slot][i]).ok_or(Error::Overflow)?;
                    if term == 0 {
                        break;
                    }
                }
                total = total.checked_add(term).ok_or(Error::Overflow)?;
                if !next_permutation(&mut arrangement) {
                    break;
                }
            }
        }
        Ok(total)
    }

    /// Form induced on block sums: block `B` stands for the sum of its
    /// members' basis vectors.
    pub fn quotient(&self, partition: &MarkedPartition) -> Result<IntersectionTensor> {
        partition.check_size(self.size)?;
        let of = partition.block_of();
        let mut out: BTreeMap<MultiIndex, i64> = BTreeMap::new();
        for (key, value) in &self.entries {
            let blocks = MultiIndex::new(key.0.iter().map(|&i| of[i]).collect());
            // Arrangements of this entry's members over the slots of each block.
            let mut count: u64 = 1;
            for run in runs(&blocks.0) {
                count = count
                    .checked_mul(factorial(run.1).ok_or(Error::Overflow)?)
                    .ok_or(Error::Overflow)?;
            }
            for run in runs(&key.0) {
                count /= factorial(run.1).ok_or(Error::Overflow)?;
            }
            let add = i64::try_from(count)
                .ok()
                .and_then(|c| c.checked_mul(*value))
                .ok_or(Error::Overflow)?;
            let slot = out.entry(blocks).or_insert(0);
            *slot = slot.checked_add(add).ok_or(Error::Overflow)?;
        }
        Ok(IntersectionTensor::from_map(self.dimension, partition.len(), out))
    }

    /// Rename index `i` to `perm[i]`: the result `R` satisfies
    /// `R(perm(i_1), ..., perm(i_d)) = T(i_1, ..., i_d)`.
    pub fn relabel(&self, perm: &[usize]) -> Result<IntersectionTensor> {
        check_permutation(perm, self.size)?;
        let entries = self
            .entries
            .iter()
            .map(|(k, &v)| (MultiIndex::new(k.0.iter().map(|&i| perm[i]).collect()), v))
            .collect();
        Ok(IntersectionTensor::from_map(self.dimension, self.size, entries))
    }
}

/// Strict transforms in terms of total transforms: row `i` holds the
/// coefficients of `H_i = H_i^* - sum_{k -> i} H_k^*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalTransformMatrix {
    rows: Vec<Vec<i64>>,
}

impl TotalTransformMatrix {
    pub fn from_forest(forest: &ProximityForest) -> Self {
        let m = forest.len();
        let mut rows = vec![vec![0i64; m]; m];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1;
        }
        for (k, i) in forest.edges() {
            rows[i][k] = -1;
        }
        TotalTransformMatrix { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, k: usize) -> i64 {
        self.rows[i][k]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Rows of `C^-1`: row `k` holds the coordinates of `H_k^*` in the
    /// strict-transform basis, from `H_k^* = H_k + sum_{j -> k} H_j^*`.
    /// These are the vectors to hand to [`IntersectionTensor::evaluate`].
    pub fn inverse(&self) -> Vec<Vec<i64>> {
        let m = self.rows.len();
        let mut inv = vec![vec![0i64; m]; m];
        for k in (0..m).rev() {
            inv[k][k] = 1;
            for j in (k + 1)..m {
                if self.rows[k][j] != 0 {
                    let (head, tail) = inv.split_at_mut(j);
                    for (x, y) in head[k].iter_mut().zip(&tail[0]) {
                        *x -= self.rows[k][j] * y;
                    }
                }
            }
        }
        inv
    }
}

pub fn total_transform_matrix(forest: &ProximityForest) -> TotalTransformMatrix {
    TotalTransformMatrix::from_forest(forest)
}

/// Intersection form of the exceptional components of a forest.
///
/// Expanding every strict transform in total transforms, only pure powers
/// of a single total transform survive, and `(H_k^*)^d = (-1)^(d-1) deg(k)`.
/// Hence `T(i_1..i_d) = (-1)^(d-1) sum_k prod_t C[i_t][k] deg(k)`, where the
/// column `k` of `C` is supported on `k` and the targets of `k`.
pub fn tensor_from_forest(forest: &ProximityForest) -> Result<IntersectionTensor> {
    forest.ensure_valid()?;
    let d = forest.dimension();
    let sign: i64 = if d % 2 == 1 { 1 } else { -1 };
    let mut entries: BTreeMap<MultiIndex, i64> = BTreeMap::new();
    for k in 0..forest.len() {
        let degree = i64::try_from(forest.degree(k)).map_err(|_| Error::Overflow)?;
        let base = sign.checked_mul(degree).ok_or(Error::Overflow)?;
        let mut support: Vec<usize> = forest.targets(k).iter().copied().collect();
        support.push(k);
        support.sort_unstable();
        for key in multisets(&support, d) {
            let negatives = key.iter().filter(|&&i| i != k).count();
            let term = if negatives % 2 == 0 { base } else { -base };
            let slot = entries.entry(MultiIndex(key)).or_insert(0);
            *slot = slot.checked_add(term).ok_or(Error::Overflow)?;
        }
    }
    Ok(IntersectionTensor::from_map(d, forest.len(), entries))
}

/// All sorted multisets of size `d` drawn from sorted `items`.
pub(crate) fn multisets(items: &[usize], d: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], d: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for pos in start..items.len() {
            cur.push(items[pos]);
            go(items, d, pos, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, d, 0, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Lexicographic successor; false when `v` was the last arrangement.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `(value, run length)` for each run of equal values in a sorted slice.
pub(crate) fn runs(sorted: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &x in sorted {
        match out.last_mut() {
            Some((v, n)) if *v == x => *n += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

fn factorial(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

pub(crate) fn check_permutation(perm: &[usize], size: usize) -> Result<()> {
    if perm.len() != size {
        return Err(Error::SizeMismatch {
            expected: size,
            found: perm.len(),
        });
    }
    let mut seen = vec![false; size];
    for &p in perm {
        if p >= size || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!("{:?}", one_based(perm))));
        }
    }
    Ok(())
}

pub(crate) fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}
