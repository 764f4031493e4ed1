//! [`Structure`] adapters for forests, block digraphs and tensors.

use std::collections::BTreeSet;

use super::search::Structure;
use crate::model::ProximityForest;
use crate::tensor::{IntersectionTensor, MultiIndex};

/// Vertex-labeled digraph, loops allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LabeledDigraph {
    labels: Vec<Vec<i64>>,
    arcs: Vec<BTreeSet<usize>>,
}

impl LabeledDigraph {
    pub fn new(labels: Vec<Vec<i64>>, arcs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut out = vec![BTreeSet::new(); labels.len()];
        for (a, b) in arcs {
            out[a].insert(b);
        }
        LabeledDigraph { labels, arcs: out }
    }

    /// Degree-labeled proximity DAG. The height (longest proximity chain
    /// below a point) leads the label, so canonical labelings list targets
    /// before their sources.
    pub fn from_forest(forest: &ProximityForest) -> Self {
        let mut height = vec![0i64; forest.len()];
        for i in 0..forest.len() {
            height[i] = forest
                .targets(i)
                .iter()
                .map(|&j| height[j] + 1)
                .max()
                .unwrap_or(0);
        }
        let labels = (0..forest.len())
            .map(|i| vec![height[i], forest.degree(i) as i64])
            .collect();
        LabeledDigraph::new(labels, forest.edges())
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn has_arc(&self, a: usize, b: usize) -> bool {
        self.arcs[a].contains(&b)
    }

    /// Whether `perm` maps this digraph exactly onto `other`.
    pub fn maps_onto(&self, other: &LabeledDigraph, perm: &[usize]) -> bool {
        let n = self.order();
        if other.order() != n || perm.len() != n {
            return false;
        }
        (0..n).all(|v| self.labels[v] == other.labels[perm[v]])
            && (0..n).all(|v| {
                self.arcs[v].len() == other.arcs[perm[v]].len()
                    && self.arcs[v].iter().all(|&w| other.has_arc(perm[v], perm[w]))
            })
    }
}

impl Structure for LabeledDigraph {
    fn order(&self) -> usize {
        self.labels.len()
    }

    fn vertex_invariant(&self, v: usize) -> Vec<i64> {
        let mut key = self.labels[v].clone();
        key.push(self.has_arc(v, v) as i64);
        key
    }

    fn pair_invariant(&self, u: usize, v: usize) -> Option<Vec<i64>> {
        let code = self.has_arc(u, v) as i64 + 2 * self.has_arc(v, u) as i64;
        (code != 0).then(|| vec![code])
    }

    fn certificate(&self, labeling: &[usize]) -> Vec<i64> {
        let n = self.order();
        let mut inverse = vec![0; n];
        for (v, &l) in labeling.iter().enumerate() {
            inverse[l] = v;
        }
        let mut out = Vec::new();
        for &v in &inverse {
            out.extend_from_slice(&self.labels[v]);
            let mut targets: Vec<i64> = self.arcs[v].iter().map(|&w| labeling[w] as i64).collect();
            targets.sort_unstable();
            out.push(targets.len() as i64);
            out.extend(targets);
        }
        out
    }
}

impl Structure for IntersectionTensor {
    fn order(&self) -> usize {
        self.size()
    }

    fn vertex_invariant(&self, v: usize) -> Vec<i64> {
        vec![self.power_product(v, self.dimension(), v, 0)]
    }

    fn pair_invariant(&self, u: usize, v: usize) -> Option<Vec<i64>> {
        let d = self.dimension();
        let mixed: Vec<i64> = (1..d).map(|r| self.power_product(u, d - r, v, r)).collect();
        mixed.iter().any(|&x| x != 0).then_some(mixed)
    }

    fn certificate(&self, labeling: &[usize]) -> Vec<i64> {
        let mut entries: Vec<(MultiIndex, i64)> = self
            .entries()
            .map(|(k, v)| (MultiIndex::new(k.as_slice().iter().map(|&i| labeling[i]).collect()), v))
            .collect();
        entries.sort();
        let mut out = Vec::with_capacity(entries.len() * (self.dimension() + 1));
        for (k, v) in entries {
            out.extend(k.as_slice().iter().map(|&i| i as i64));
            out.push(v);
        }
        out
    }
}
