//! Direct backtracking matcher for tensor equivalence.
//!
//! Works on arbitrary symmetric tensors, blow-up or not. Candidates for each
//! index are pruned by diagonal value and by the multiset of mixed-power
//! fingerprints towards other indices; partial maps must preserve every
//! pairwise fingerprint, and complete maps are verified entry by entry.

use super::search::Structure;
use crate::error::{Error, Result};
use crate::tensor::IntersectionTensor;

pub(crate) fn match_tensors(
    left: &IntersectionTensor,
    right: &IntersectionTensor,
    node_limit: usize,
) -> Result<Option<Vec<usize>>> {
    let n = left.size();
    if right.size() != n || left.dimension() != right.dimension() || left.nnz() != right.nnz() {
        return Ok(None);
    }
    let pl = pair_table(left);
    let pr = pair_table(right);
    let fl = fingerprints(left, &pl);
    let fr = fingerprints(right, &pr);

    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| fl[i] == fr[j]).collect())
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    // Most constrained first, then prefer indices related to those placed.
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let next = (0..n)
            .filter(|&i| !placed[i])
            .min_by_key(|&i| {
                let linked = order.iter().any(|&k| pl[i][k].is_some());
                (candidates[i].len(), !linked, i)
            })
            .expect("unplaced index exists");
        placed[next] = true;
        order.push(next);
    }

    let mut state = Matcher {
        left,
        right,
        pl: &pl,
        pr: &pr,
        candidates: &candidates,
        order: &order,
        map: vec![usize::MAX; n],
        used: vec![false; n],
        nodes: 0,
        node_limit,
    };
    if state.extend(0)? {
        Ok(Some(state.map))
    } else {
        Ok(None)
    }
}

type PairTable = Vec<Vec<Option<Vec<i64>>>>;

fn pair_table(t: &IntersectionTensor) -> PairTable {
    let n = t.size();
    (0..n)
        .map(|u| (0..n).map(|v| if u == v { None } else { t.pair_invariant(u, v) }).collect())
        .collect()
}

fn fingerprints(t: &IntersectionTensor, pairs: &PairTable) -> Vec<(i64, Vec<Vec<i64>>)> {
    (0..t.size())
        .map(|v| {
            let mut around: Vec<Vec<i64>> = pairs[v].iter().flatten().cloned().collect();
            around.sort();
            (t.vertex_invariant(v)[0], around)
        })
        .collect()
}

struct Matcher<'a> {
    left: &'a IntersectionTensor,
    right: &'a IntersectionTensor,
    pl: &'a PairTable,
    pr: &'a PairTable,
    candidates: &'a [Vec<usize>],
    order: &'a [usize],
    map: Vec<usize>,
    used: Vec<bool>,
    nodes: usize,
    node_limit: usize,
}

impl Matcher<'_> {
    fn extend(&mut self, depth: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::SearchLimit(self.node_limit));
        }
        if depth == self.order.len() {
            return Ok(verify(self.left, self.right, &self.map));
        }
        let i = self.order[depth];
        for &j in &self.candidates[i] {
            if self.used[j] {
                continue;
            }
            let consistent = self.order[..depth]
                .iter()
                .all(|&k| self.pl[i][k] == self.pr[j][self.map[k]]);
            if !consistent {
                continue;
            }
            self.map[i] = j;
            self.used[j] = true;
            if self.extend(depth + 1)? {
                return Ok(true);
            }
            self.used[j] = false;
            self.map[i] = usize::MAX;
        }
        Ok(false)
    }
}

/// `right(perm(i_1), ..., perm(i_d)) = left(i_1, ..., i_d)` for every
/// stored entry, with matching entry counts.
pub(crate) fn verify(left: &IntersectionTensor, right: &IntersectionTensor, perm: &[usize]) -> bool {
    left.size() == right.size()
        && left.dimension() == right.dimension()
        && left.nnz() == right.nnz()
        && perm.len() == left.size()
        && left.entries().all(|(k, v)| {
            let image: Vec<usize> = k.as_slice().iter().map(|&i| perm[i]).collect();
            right.get(&image) == v
        })
}
