//! Numerical detection of final components and recovery of a blow-up
//! sequence from its intersection form by repeated blow-downs.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{Point, ProximityForest};
use crate::tensor::{multisets, runs, IntersectionTensor, MultiIndex};

/// One blow-down. Indices refer to the tensor current at that stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionStep {
    pub contracted: usize,
    pub degree: u64,
    pub proximate_to_current: BTreeSet<usize>,
    /// `kept[new] = old`: the surviving indices, renumbered in order.
    pub kept: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ContractionTrace {
    pub steps: Vec<ContractionStep>,
    /// `index_maps[t][original]` is the index of an original component in
    /// the tensor contracted at step `t`, or `None` once it is gone.
    pub index_maps: Vec<Vec<Option<usize>>>,
}

impl ContractionTrace {
    /// Original tensor index of the component removed at step `t`.
    pub fn original_of_step(&self, t: usize) -> usize {
        let target = Some(self.steps[t].contracted);
        self.index_maps[t]
            .iter()
            .position(|&c| c == target)
            .expect("index maps cover every contracted component")
    }

    /// For each creation index of the recovered forest, the original tensor
    /// index it came from. The component contracted first is created last.
    pub fn creation_to_original(&self) -> Vec<usize> {
        let m = self.steps.len();
        (0..m).map(|c| self.original_of_step(m - 1 - c)).collect()
    }
}

fn check_index(t: &IntersectionTensor, i: usize) -> Result<()> {
    if i < t.size() {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange {
            index: i + 1,
            size: t.size(),
        })
    }
}

fn sign_pow(r: usize) -> i64 {
    if r.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Components `i` and `j` are disjoint exactly when every mixed power
/// `T(i^s j^r)` with `r, s >= 1` vanishes.
pub fn empty_intersection(t: &IntersectionTensor, i: usize, j: usize) -> Result<bool> {
    check_index(t, i)?;
    check_index(t, j)?;
    if i == j {
        return Err(Error::SameIndex(i + 1));
    }
    Ok(mixed_vanish(t, i, j))
}

fn mixed_vanish(t: &IntersectionTensor, i: usize, j: usize) -> bool {
    let d = t.dimension();
    (1..d).all(|r| t.power_product(i, d - r, j, r) == 0)
}

/// Components meeting `i`.
pub fn neighbors(t: &IntersectionTensor, i: usize) -> Result<Vec<usize>> {
    check_index(t, i)?;
    Ok((0..t.size()).filter(|&j| j != i && !mixed_vanish(t, i, j)).collect())
}

/// Numerical finality: for every component `j` meeting `i` and all
/// `r, s >= 1` with `r + s = d`, `T(i^d) = (-1)^r T(i^s j^r)` and
/// `T(i j^(d-1)) > 0`. The self-intersection must also have the sign of
/// `(-1)^(d-1)` and be nonzero, which is automatic when `i` has a neighbor.
pub fn is_final(t: &IntersectionTensor, i: usize) -> Result<bool> {
    check_index(t, i)?;
    Ok(final_unchecked(t, i))
}

fn final_unchecked(t: &IntersectionTensor, i: usize) -> bool {
    let d = t.dimension();
    let diag = t.power_product(i, d, i, 0);
    if diag == 0 || diag.signum() != sign_pow(d - 1) {
        return false;
    }
    for j in (0..t.size()).filter(|&j| j != i) {
        if mixed_vanish(t, i, j) {
            continue;
        }
        if t.power_product(i, 1, j, d - 1) <= 0 {
            return false;
        }
        if (1..d).any(|r| diag != sign_pow(r) * t.power_product(i, d - r, j, r)) {
            return false;
        }
    }
    true
}

pub fn final_set(t: &IntersectionTensor) -> Vec<usize> {
    (0..t.size()).filter(|&i| final_unchecked(t, i)).collect()
}

/// Blow down the final component `i`.
///
/// Each surviving component `j` pulls back to `H_j + delta_j H_i`, where
/// `delta_j = 1` when `j` meets `i`; the new form is the old one evaluated
/// on those pullbacks. Surviving indices keep their relative order.
pub fn contract(t: &IntersectionTensor, i: usize) -> Result<(IntersectionTensor, ContractionStep)> {
    check_index(t, i)?;
    if !final_unchecked(t, i) {
        return Err(Error::NotFinal(i + 1));
    }
    let d = t.dimension();
    let meeting: Vec<usize> = neighbors(t, i)?;
    let renumber = |j: usize| if j < i { j } else { j - 1 };

    let mut out: BTreeMap<MultiIndex, i64> = BTreeMap::new();
    for (key, value) in t.entries() {
        let copies = key.multiplicity(i);
        let rest: Vec<usize> = key.as_slice().iter().copied().filter(|&x| x != i).collect();
        // Every slot holding `i` is filled by one of the meeting components.
        for fill in multisets(&meeting, copies) {
            let mut merged = rest.clone();
            merged.extend_from_slice(&fill);
            merged.sort_unstable();
            let mut coefficient: i64 = 1;
            for (a, taken) in runs(&fill) {
                let total = merged.iter().filter(|&&x| x == a).count();
                coefficient *= binomial(total, taken);
            }
            let add = value.checked_mul(coefficient).ok_or(Error::Overflow)?;
            let key = MultiIndex::new(merged.into_iter().map(renumber).collect());
            let slot = out.entry(key).or_insert(0);
            *slot = slot.checked_add(add).ok_or(Error::Overflow)?;
        }
    }

    let diag = t.power_product(i, d, i, 0);
    let step = ContractionStep {
        contracted: i,
        degree: (sign_pow(d - 1) * diag) as u64,
        proximate_to_current: meeting.into_iter().collect(),
        kept: (0..t.size()).filter(|&j| j != i).collect(),
    };
    Ok((IntersectionTensor::from_map(d, t.size() - 1, out), step))
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, x| acc * (n - x) as i64 / (x + 1) as i64)
}

/// Partial recovery state: the current tensor plus the bookkeeping needed
/// to translate its indices back to the input.
#[derive(Clone)]
struct Stage {
    tensor: IntersectionTensor,
    original_size: usize,
    to_original: Vec<usize>,
    trace: ContractionTrace,
}

impl Stage {
    fn start(t: &IntersectionTensor) -> Self {
        Stage {
            tensor: t.clone(),
            original_size: t.size(),
            to_original: (0..t.size()).collect(),
            trace: ContractionTrace::default(),
        }
    }

    fn advance(&self, i: usize) -> Result<Stage> {
        let (tensor, step) = contract(&self.tensor, i)?;
        let mut map = vec![None; self.original_size];
        for (current, &orig) in self.to_original.iter().enumerate() {
            map[orig] = Some(current);
        }
        let to_original = step.kept.iter().map(|&k| self.to_original[k]).collect();
        let mut trace = self.trace.clone();
        trace.index_maps.push(map);
        trace.steps.push(step);
        Ok(Stage {
            tensor,
            original_size: self.original_size,
            to_original,
            trace,
        })
    }

    fn finish(self, dimension: usize) -> (ProximityForest, ContractionTrace) {
        let trace = self.trace;
        let m = trace.steps.len();
        let mut creation = vec![0; m];
        for t in 0..m {
            creation[trace.original_of_step(t)] = m - 1 - t;
        }
        let mut points = vec![Point::new(0, []); m];
        for (t, step) in trace.steps.iter().enumerate() {
            let map = &trace.index_maps[t];
            let targets = step.proximate_to_current.iter().map(|&c| {
                let orig = map.iter().position(|&x| x == Some(c)).expect("current index is mapped");
                creation[orig]
            });
            points[m - 1 - t] = Point::new(step.degree, targets);
        }
        (ProximityForest::new(dimension, points), trace)
    }
}

/// Recover a proximity forest by contracting the smallest-index final
/// component until nothing is left. The component contracted at step `t`
/// becomes point `m - 1 - t` of the forest.
pub fn recover_sequence(t: &IntersectionTensor) -> Result<(ProximityForest, ContractionTrace)> {
    let mut stage = Stage::start(t);
    while stage.tensor.size() > 0 {
        let next = *final_set(&stage.tensor)
            .first()
            .ok_or(Error::NotContractible {
                remaining: stage.tensor.size(),
            })?;
        stage = stage.advance(next)?;
    }
    Ok(stage.finish(t.dimension()))
}

/// Every admissible contraction order, depth first with final components
/// tried in increasing index order. Fails when more than `limit` complete
/// orders exist.
pub fn recover_all_orders(
    t: &IntersectionTensor,
    limit: usize,
) -> Result<Vec<(ProximityForest, ContractionTrace)>> {
    fn walk(
        stage: Stage,
        dimension: usize,
        limit: usize,
        out: &mut Vec<(ProximityForest, ContractionTrace)>,
    ) -> Result<()> {
        if stage.tensor.size() == 0 {
            if out.len() == limit {
                return Err(Error::LimitExceeded(limit));
            }
            out.push(stage.finish(dimension));
            return Ok(());
        }
        let finals = final_set(&stage.tensor);
        if finals.is_empty() {
            return Err(Error::NotContractible {
                remaining: stage.tensor.size(),
            });
        }
        for i in finals {
            walk(stage.advance(i)?, dimension, limit, out)?;
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(Stage::start(t), t.dimension(), limit, &mut out)?;
    Ok(out)
}
