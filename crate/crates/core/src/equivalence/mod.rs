//! Combinatorial equivalence of forests, tensors and their marked versions;
//! canonical forms, automorphism orbits and partition compatibility.
//!
//! Tensor equivalence goes through recovery: both tensors are contracted
//! back to forests, the forests are compared, and the induced index map is
//! checked against every tensor entry. Tensors that do not come from a
//! forest fall back to the direct matcher in [`direct_tensor_match`].

mod matcher;
mod search;
mod structures;

use std::fmt;

use sha2::{Digest, Sha256};

use crate::contraction::recover_sequence;
use crate::error::{Error, Result};
use crate::model::{block_degree, block_proximity, MarkedPartition, ProximityForest};
use crate::tensor::{check_permutation, tensor_from_forest, IntersectionTensor};

pub use search::NODE_LIMIT;
use search::{canonical_search, SearchOutcome};
use structures::LabeledDigraph;

/// A bijection on `0..n`; `apply(i)` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexPermutation(Vec<usize>);

impl IndexPermutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        check_permutation(&images, images.len())?;
        Ok(IndexPermutation(images))
    }

    pub fn identity(n: usize) -> Self {
        IndexPermutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        IndexPermutation(inv)
    }

    /// `self` after `first`: `i -> self(first(i))`.
    pub fn after(&self, first: &IndexPermutation) -> Self {
        IndexPermutation(first.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }
}

impl fmt::Display for IndexPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| (p + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Canonical representative of an equivalence class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm<T> {
    /// Old index `i` becomes `labeling.apply(i)` in `object`.
    pub labeling: IndexPermutation,
    pub object: T,
    /// Lowercase hex SHA-256 of [`forest_serialization`] or
    /// [`tensor_serialization`] of `object`.
    pub hash: String,
}

fn check_dimensions(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

/// Map sending each vertex of the first structure to the vertex of the
/// second with the same canonical label, if certificates agree.
fn match_outcomes(a: &SearchOutcome, b: &SearchOutcome) -> Option<Vec<usize>> {
    if a.certificate != b.certificate || a.labeling.len() != b.labeling.len() {
        return None;
    }
    let mut inverse_b = vec![0; b.labeling.len()];
    for (v, &l) in b.labeling.iter().enumerate() {
        inverse_b[l] = v;
    }
    Some(a.labeling.iter().map(|&l| inverse_b[l]).collect())
}

fn digraph_isomorphism(a: &LabeledDigraph, b: &LabeledDigraph) -> Result<Option<IndexPermutation>> {
    if a.order() != b.order() {
        return Ok(None);
    }
    let sa = canonical_search(a, NODE_LIMIT)?;
    let sb = canonical_search(b, NODE_LIMIT)?;
    match match_outcomes(&sa, &sb) {
        Some(perm) if a.maps_onto(b, &perm) => Ok(Some(IndexPermutation(perm))),
        Some(_) => unreachable!("equal certificates describe equal digraphs"),
        None => Ok(None),
    }
}

/// Bijection preserving degrees and proximity in both directions.
pub fn forest_isomorphic(a: &ProximityForest, b: &ProximityForest) -> Result<Option<IndexPermutation>> {
    check_dimensions(a.dimension(), b.dimension())?;
    a.ensure_valid()?;
    b.ensure_valid()?;
    digraph_isomorphism(&LabeledDigraph::from_forest(a), &LabeledDigraph::from_forest(b))
}

fn block_digraph(forest: &ProximityForest, partition: &MarkedPartition) -> Result<LabeledDigraph> {
    let labels = (0..partition.len())
        .map(|b| block_degree(forest, partition, b).map(|g| vec![g as i64]))
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledDigraph::new(labels, block_proximity(forest, partition)?))
}

/// Block bijection preserving block proximity (self-proximity included)
/// and block degrees.
pub fn marked_forest_equivalent(
    a: &ProximityForest,
    pa: &MarkedPartition,
    b: &ProximityForest,
    pb: &MarkedPartition,
) -> Result<Option<IndexPermutation>> {
    check_dimensions(a.dimension(), b.dimension())?;
    pa.check_size(a.len())?;
    pb.check_size(b.len())?;
    a.ensure_valid()?;
    b.ensure_valid()?;
    if pa.len() != pb.len() {
        return Ok(None);
    }
    digraph_isomorphism(&block_digraph(a, pa)?, &block_digraph(b, pb)?)
}

/// Recovered forest of a tensor and the map from creation index to tensor
/// index, provided the forest reproduces the tensor exactly.
fn forest_of(t: &IntersectionTensor) -> Option<(ProximityForest, Vec<usize>)> {
    let (forest, trace) = recover_sequence(t).ok()?;
    let to_original = trace.creation_to_original();
    let rebuilt = tensor_from_forest(&forest).ok()?.relabel(&to_original).ok()?;
    (rebuilt == *t).then_some((forest, to_original))
}

/// Index map `p` with `b(p(i_1), ..., p(i_d)) = a(i_1, ..., i_d)`, or `None`.
pub fn tensor_equivalent(a: &IntersectionTensor, b: &IntersectionTensor) -> Result<Option<IndexPermutation>> {
    check_dimensions(a.dimension(), b.dimension())?;
    if a.size() != b.size() || a.nnz() != b.nnz() {
        return Ok(None);
    }
    let mut da = a.diagonal();
    let mut db = b.diagonal();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return Ok(None);
    }
    if let (Some((fa, oa)), Some((fb, ob))) = (forest_of(a), forest_of(b)) {
        let Some(sigma) = forest_isomorphic(&fa, &fb)? else {
            return Ok(None);
        };
        // tensor index -> creation index in fa -> creation index in fb -> tensor index
        let mut creation_a = vec![0; oa.len()];
        for (c, &o) in oa.iter().enumerate() {
            creation_a[o] = c;
        }
        let perm: Vec<usize> = (0..a.size()).map(|i| ob[sigma.apply(creation_a[i])]).collect();
        if matcher::verify(a, b, &perm) {
            return Ok(Some(IndexPermutation(perm)));
        }
    }
    direct_tensor_match(a, b)
}

/// Backtracking tensor matcher, independent of recovery.
pub fn direct_tensor_match(a: &IntersectionTensor, b: &IntersectionTensor) -> Result<Option<IndexPermutation>> {
    check_dimensions(a.dimension(), b.dimension())?;
    Ok(matcher::match_tensors(a, b, NODE_LIMIT)?.map(IndexPermutation))
}

/// Equivalence of the block-sum forms.
pub fn marked_tensor_equivalent(
    a: &IntersectionTensor,
    pa: &MarkedPartition,
    b: &IntersectionTensor,
    pb: &MarkedPartition,
) -> Result<Option<IndexPermutation>> {
    check_dimensions(a.dimension(), b.dimension())?;
    let qa = a.quotient(pa)?;
    let qb = b.quotient(pb)?;
    if pa.len() != pb.len() {
        return Ok(None);
    }
    tensor_equivalent(&qa, &qb)
}

/// Byte layout hashed for forests:
///
/// ```text
/// blowup-forest-v1\n
/// dimension <d>\n
/// points <m>\n
/// <id> <degree> <targets>\n      one line per point, ids 1..m
/// ```
///
/// `<targets>` is the ascending comma-separated list of 1-based target ids,
/// or `-` when empty. Numbers are decimal ASCII without padding.
pub fn forest_serialization(forest: &ProximityForest) -> String {
    let mut out = format!(
        "blowup-forest-v1\ndimension {}\npoints {}\n",
        forest.dimension(),
        forest.len()
    );
    for (i, p) in forest.points().iter().enumerate() {
        let targets = if p.proximate_to.is_empty() {
            "-".to_string()
        } else {
            p.proximate_to
                .iter()
                .map(|j| (j + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        out.push_str(&format!("{} {} {}\n", i + 1, p.degree, targets));
    }
    out
}

/// Byte layout hashed for tensors:
///
/// ```text
/// blowup-tensor-v1\n
/// dimension <d>\n
/// size <m>\n
/// entries <n>\n
/// <i_1>,...,<i_d> <value>\n      one line per nonzero entry
/// ```
///
/// Index tuples are 1-based and nondecreasing; lines are in lexicographic
/// order of the numeric tuples; values are signed decimal ASCII.
pub fn tensor_serialization(t: &IntersectionTensor) -> String {
    let mut out = format!(
        "blowup-tensor-v1\ndimension {}\nsize {}\nentries {}\n",
        t.dimension(),
        t.size(),
        t.nnz()
    );
    for (k, v) in t.entries() {
        let idx: Vec<String> = k.as_slice().iter().map(|i| (i + 1).to_string()).collect();
        out.push_str(&format!("{} {}\n", idx.join(","), v));
    }
    out
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn canonical_form_forest(forest: &ProximityForest) -> Result<CanonicalForm<ProximityForest>> {
    forest.ensure_valid()?;
    let outcome = canonical_search(&LabeledDigraph::from_forest(forest), NODE_LIMIT)?;
    let object = forest.relabel(&outcome.labeling)?;
    let hash = sha256_hex(&forest_serialization(&object));
    Ok(CanonicalForm {
        labeling: IndexPermutation(outcome.labeling),
        object,
        hash,
    })
}

pub fn canonical_form_tensor(t: &IntersectionTensor) -> Result<CanonicalForm<IntersectionTensor>> {
    let outcome = canonical_search(t, NODE_LIMIT)?;
    let object = t.relabel(&outcome.labeling)?;
    let hash = sha256_hex(&tensor_serialization(&object));
    Ok(CanonicalForm {
        labeling: IndexPermutation(outcome.labeling),
        object,
        hash,
    })
}

/// Orbits of the full automorphism group of the tensor acting on indices.
pub fn automorphism_orbits(t: &IntersectionTensor) -> Result<MarkedPartition> {
    let outcome = canonical_search(t, NODE_LIMIT)?;
    MarkedPartition::new(t.size(), outcome.orbits())
}

/// Orbits of the automorphism group of the degree-labeled proximity DAG.
pub fn forest_automorphism_orbits(forest: &ProximityForest) -> Result<MarkedPartition> {
    forest.ensure_valid()?;
    let outcome = canonical_search(&LabeledDigraph::from_forest(forest), NODE_LIMIT)?;
    MarkedPartition::new(forest.len(), outcome.orbits())
}

fn blocks_within(partition: &MarkedPartition, orbits: &MarkedPartition) -> bool {
    let orbit_of = orbits.block_of();
    partition
        .blocks()
        .iter()
        .all(|block| block.iter().all(|&i| orbit_of[i] == orbit_of[block[0]]))
}

/// Every block lies inside one orbit of the tensor's automorphism group.
pub fn partition_compatible_morphism(t: &IntersectionTensor, partition: &MarkedPartition) -> Result<bool> {
    partition.check_size(t.size())?;
    Ok(blocks_within(partition, &automorphism_orbits(t)?))
}

/// Every block lies inside one orbit of the forest's automorphism group.
pub fn partition_compatible_sequence(forest: &ProximityForest, partition: &MarkedPartition) -> Result<bool> {
    partition.check_size(forest.len())?;
    Ok(blocks_within(partition, &forest_automorphism_orbits(forest)?))
}
