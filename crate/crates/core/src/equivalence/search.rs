//! Canonical labeling by color refinement and individualization.
//!
//! The search walks the tree of individualization sequences. Leaves are
//! discrete colorings, read as labelings; the canonical labeling is the one
//! whose certificate is lexicographically smallest. Two leaves with equal
//! certificates differ by an automorphism, which is recorded and used to
//! prune sibling subtrees lying in the same orbit.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Maximum number of search-tree nodes visited per call.
pub const NODE_LIMIT: usize = 2_000_000;

/// A finite structure on vertices `0..order()` that can be relabeled.
pub(crate) trait Structure {
    fn order(&self) -> usize;
    /// Label-invariant description of a vertex.
    fn vertex_invariant(&self, v: usize) -> Vec<i64>;
    /// Label-invariant description of how `u` relates to `v`, `None` when
    /// unrelated. Need not be symmetric.
    fn pair_invariant(&self, u: usize, v: usize) -> Option<Vec<i64>>;
    /// Complete description of the structure after renaming vertex `v` to
    /// `labeling[v]`. Equal certificates mean equal relabeled structures.
    fn certificate(&self, labeling: &[usize]) -> Vec<i64>;
}

#[derive(Debug, Clone)]
pub(crate) struct SearchOutcome {
    /// Canonical labeling: vertex `v` becomes `labeling[v]`.
    pub labeling: Vec<usize>,
    pub certificate: Vec<i64>,
    /// Automorphisms found on the way, as vertex maps.
    pub generators: Vec<Vec<usize>>,
}

impl SearchOutcome {
    /// Orbits of the group generated by the recorded automorphisms, each
    /// sorted, ordered by smallest member.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.labeling.len();
        let mut uf = UnionFind::new(n);
        for g in &self.generators {
            for (v, &w) in g.iter().enumerate() {
                uf.union(v, w);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            groups.entry(uf.find(v)).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by_key(|g| g[0]);
        out
    }
}

pub(crate) fn canonical_search<S: Structure>(structure: &S, node_limit: usize) -> Result<SearchOutcome> {
    let mut engine = Engine::new(structure, node_limit);
    let start = engine.refine(engine.initial.clone());
    engine.search(start, &mut Vec::new(), true)?;
    let best = engine.best.expect("search reaches at least one leaf");
    Ok(SearchOutcome {
        labeling: best.labeling,
        certificate: best.certificate,
        generators: engine.generators,
    })
}

struct Leaf {
    labeling: Vec<usize>,
    certificate: Vec<i64>,
}

struct Engine<'a, S> {
    structure: &'a S,
    n: usize,
    initial: Vec<usize>,
    /// Interned pair invariants, `None` for unrelated pairs.
    pairs: Vec<Vec<Option<u32>>>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<usize>>,
    nodes: usize,
    node_limit: usize,
}

impl<'a, S: Structure> Engine<'a, S> {
    fn new(structure: &'a S, node_limit: usize) -> Self {
        let n = structure.order();
        let vertex: Vec<Vec<i64>> = (0..n).map(|v| structure.vertex_invariant(v)).collect();
        let initial = ranks(&vertex);

        let mut raw = vec![vec![None; n]; n];
        let mut seen: Vec<Vec<i64>> = Vec::new();
        for (u, row) in raw.iter_mut().enumerate() {
            for (v, slot) in row.iter_mut().enumerate() {
                if u != v {
                    *slot = structure.pair_invariant(u, v);
                    if let Some(k) = slot {
                        seen.push(k.clone());
                    }
                }
            }
        }
        seen.sort();
        seen.dedup();
        let pairs = raw
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|k| k.map(|k| seen.binary_search(&k).expect("interned") as u32))
                    .collect()
            })
            .collect();

        Engine {
            structure,
            n,
            initial,
            pairs,
            first: None,
            best: None,
            generators: Vec::new(),
            nodes: 0,
            node_limit,
        }
    }

    /// Refine to the coarsest equitable coloring below `colors`. Colors stay
    /// dense ranks and the order of existing cells is preserved.
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let mut cells = distinct(&colors);
        loop {
            let signatures: Vec<(usize, Vec<(usize, u32)>)> = (0..self.n)
                .map(|v| {
                    let mut around: Vec<(usize, u32)> = (0..self.n)
                        .filter_map(|u| self.pairs[v][u].map(|p| (colors[u], p)))
                        .collect();
                    around.sort_unstable();
                    (colors[v], around)
                })
                .collect();
            colors = ranks(&signatures);
            let now = distinct(&colors);
            if now == cells {
                return colors;
            }
            cells = now;
        }
    }

    fn individualize(&self, colors: &[usize], v: usize) -> Vec<usize> {
        let keys: Vec<(usize, bool)> = colors.iter().enumerate().map(|(u, &c)| (c, u != v)).collect();
        self.refine(ranks(&keys))
    }

    /// Returns `true` when a leaf equivalent to the first leaf was found
    /// below a node off the first path; the caller then abandons subtrees up
    /// to the nearest first-path ancestor.
    fn search(&mut self, colors: Vec<usize>, prefix: &mut Vec<usize>, first_path: bool) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::SearchLimit(self.node_limit));
        }
        let Some(cell) = target_cell(&colors) else {
            return Ok(self.leaf(colors));
        };
        let mut explored: Vec<usize> = Vec::new();
        for w in cell {
            if !explored.is_empty() && self.pruned(prefix, &explored, w) {
                continue;
            }
            let child_first = first_path && explored.is_empty();
            explored.push(w);
            let child = self.individualize(&colors, w);
            prefix.push(w);
            let abort = self.search(child, prefix, child_first)?;
            prefix.pop();
            if abort && !first_path {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn leaf(&mut self, labeling: Vec<usize>) -> bool {
        let certificate = self.structure.certificate(&labeling);
        let Some(first) = &self.first else {
            self.first = Some(Leaf {
                labeling: labeling.clone(),
                certificate: certificate.clone(),
            });
            self.best = Some(Leaf { labeling, certificate });
            return false;
        };
        if certificate == first.certificate {
            let g = automorphism(&first.labeling, &labeling);
            self.record(g);
            return true;
        }
        let best = self.best.as_ref().expect("best set with first");
        if certificate == best.certificate {
            let g = automorphism(&best.labeling, &labeling);
            self.record(g);
        } else if certificate < best.certificate {
            self.best = Some(Leaf { labeling, certificate });
        }
        false
    }

    fn record(&mut self, g: Vec<usize>) {
        if g.iter().enumerate().any(|(v, &w)| v != w) && !self.generators.contains(&g) {
            self.generators.push(g);
        }
    }

    /// Whether `w` lies in the orbit of an explored sibling under the
    /// recorded automorphisms that fix the current prefix pointwise.
    fn pruned(&self, prefix: &[usize], explored: &[usize], w: usize) -> bool {
        let mut uf = UnionFind::new(self.n);
        for g in &self.generators {
            if prefix.iter().all(|&p| g[p] == p) {
                for (v, &x) in g.iter().enumerate() {
                    uf.union(v, x);
                }
            }
        }
        let root = uf.find(w);
        explored.iter().any(|&e| uf.find(e) == root)
    }
}

/// `lab1^-1 . lab2`: maps each vertex to the vertex holding the same label
/// in the other leaf.
fn automorphism(lab1: &[usize], lab2: &[usize]) -> Vec<usize> {
    let mut inverse = vec![0; lab1.len()];
    for (v, &l) in lab1.iter().enumerate() {
        inverse[l] = v;
    }
    lab2.iter().map(|&l| inverse[l]).collect()
}

/// First non-singleton cell (by color), members in vertex order.
fn target_cell(colors: &[usize]) -> Option<Vec<usize>> {
    let mut counts = vec![0usize; colors.len()];
    for &c in colors {
        counts[c] += 1;
    }
    let c = counts.iter().position(|&k| k > 1)?;
    Some((0..colors.len()).filter(|&v| colors[v] == c).collect())
}

/// Dense rank of each key among the distinct keys.
fn ranks<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("key present"))
        .collect()
}

fn distinct(colors: &[usize]) -> usize {
    colors.iter().copied().max().map_or(0, |m| m + 1)
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
