//! Combinatorial model of a sequence of point blow-ups.
//!
//! A [`ProximityForest`] lists the blown-up points in creation order. Each
//! point carries the degree of its residue field over the base field and the
//! set of earlier points it is proximate to, i.e. the earlier exceptional
//! components (strict transforms) it lies on. All indices are 0-based in the
//! API; the JSON formats in [`crate::io`] are 1-based.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// One blown-up point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub degree: u64,
    pub proximate_to: BTreeSet<usize>,
}

impl Point {
    pub fn new(degree: u64, proximate_to: impl IntoIterator<Item = usize>) -> Self {
        Point {
            degree,
            proximate_to: proximate_to.into_iter().collect(),
        }
    }
}

/// Creation-ordered points with degrees and proximity edges.
///
/// Construction does not validate; use [`validate_forest`] to inspect a
/// candidate and [`ProximityForest::ensure_valid`] to reject it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProximityForest {
    dimension: usize,
    points: Vec<Point>,
}

impl ProximityForest {
    pub fn new(dimension: usize, points: Vec<Point>) -> Self {
        ProximityForest { dimension, points }
    }

    pub fn empty(dimension: usize) -> Self {
        ProximityForest::new(dimension, Vec::new())
    }

    /// Build from `(degree, targets)` pairs.
    pub fn from_spec(dimension: usize, spec: &[(u64, &[usize])]) -> Self {
        let points = spec
            .iter()
            .map(|(deg, targets)| Point::new(*deg, targets.iter().copied()))
            .collect();
        ProximityForest::new(dimension, points)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn degree(&self, i: usize) -> u64 {
        self.points[i].degree
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.points.iter().map(|p| p.degree).collect()
    }

    pub fn targets(&self, i: usize) -> &BTreeSet<usize> {
        &self.points[i].proximate_to
    }

    pub fn is_proximate(&self, i: usize, j: usize) -> bool {
        self.points[i].proximate_to.contains(&j)
    }

    /// Points proximate to `j`.
    pub fn proximate_from(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.points
            .iter()
            .enumerate()
            .filter(move |(_, p)| p.proximate_to.contains(&j))
            .map(|(i, _)| i)
    }

    /// All proximity edges `(i, j)` meaning `i -> j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.points
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.proximate_to.iter().map(move |&j| (i, j)))
    }

    pub fn total_degree(&self) -> u64 {
        self.points.iter().map(|p| p.degree).sum()
    }

    pub fn validate(&self, strict: bool) -> ValidationReport {
        validate_forest(self, strict)
    }

    /// Errors with the list of violations unless the forest passes the
    /// non-strict rules.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_forest(self, false);
        if report.ok {
            Ok(())
        } else {
            Err(Error::InvalidForest(report.violations))
        }
    }

    /// Rename point `i` to `perm[i]`. The result must still list every
    /// proximity target before its source.
    pub fn relabel(&self, perm: &[usize]) -> Result<ProximityForest> {
        if perm.len() != self.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found: perm.len(),
            });
        }
        let mut points = vec![Point::new(0, []); self.len()];
        let mut seen = vec![false; self.len()];
        for (i, p) in self.points.iter().enumerate() {
            let to = perm[i];
            if to >= self.len() || seen[to] {
                return Err(Error::InvalidPermutation(format!("{perm:?}")));
            }
            seen[to] = true;
            points[to] = Point::new(p.degree, p.proximate_to.iter().map(|&j| perm[j]));
        }
        let forest = ProximityForest::new(self.dimension, points);
        forest.ensure_valid()?;
        Ok(forest)
    }
}

/// A single broken rule. `indices` are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: String,
    pub indices: Vec<usize>,
    pub message: String,
}

impl Violation {
    fn new(rule: &str, indices: Vec<usize>, message: String) -> Self {
        Violation {
            rule: rule.to_string(),
            indices,
            message,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport {
            ok: violations.is_empty(),
            violations,
        }
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

pub mod rules {
    pub const DIMENSION: &str = "dimension";
    pub const DEGREE: &str = "degree";
    pub const TARGET_ORDER: &str = "target-order";
    pub const TARGET_COUNT: &str = "target-count";
    pub const DIVISIBILITY: &str = "degree-divisibility";
    pub const SEPARATION: &str = "separation";
}

/// Report every violated invariant of a candidate forest.
///
/// Non-strict rules: `d >= 2`, positive degrees, targets created earlier,
/// at most `d` targets per point. Strict mode adds divisibility of degrees
/// along proximity edges and, on surfaces, that two targets of a point meet
/// (one is proximate to the other) and still have positive intersection
/// before that point is blown up.
pub fn validate_forest(forest: &ProximityForest, strict: bool) -> ValidationReport {
    let d = forest.dimension;
    let mut out = Vec::new();
    if d < 2 {
        out.push(Violation::new(
            rules::DIMENSION,
            vec![],
            format!("dimension must be at least 2, got {d}"),
        ));
    }
    for (i, p) in forest.points.iter().enumerate() {
        if p.degree == 0 {
            out.push(Violation::new(
                rules::DEGREE,
                vec![i],
                format!("point {} has degree 0", i + 1),
            ));
        }
        for &j in &p.proximate_to {
            if j >= i {
                out.push(Violation::new(
                    rules::TARGET_ORDER,
                    vec![i, j],
                    format!("point {} is proximate to {} which is not earlier", i + 1, j + 1),
                ));
            }
        }
        if p.proximate_to.len() > d {
            out.push(Violation::new(
                rules::TARGET_COUNT,
                vec![i],
                format!(
                    "point {} has {} targets; at most d = {d} targets allowed",
                    i + 1,
                    p.proximate_to.len()
                ),
            ));
        }
    }
    if strict {
        strict_rules(forest, &mut out);
    }
    ValidationReport::from_violations(out)
}

fn strict_rules(forest: &ProximityForest, out: &mut Vec<Violation>) {
    let points = &forest.points;
    for (i, p) in points.iter().enumerate() {
        for &j in p.proximate_to.iter().filter(|&&j| j < i) {
            let (di, dj) = (p.degree, points[j].degree);
            if dj != 0 && di % dj != 0 {
                out.push(Violation::new(
                    rules::DIVISIBILITY,
                    vec![i, j],
                    format!(
                        "degree {dj} of point {} does not divide degree {di} of point {}",
                        j + 1,
                        i + 1
                    ),
                ));
            }
        }
    }
    if forest.dimension != 2 {
        return;
    }
    for (k, p) in points.iter().enumerate() {
        let targets: Vec<usize> = p.proximate_to.iter().copied().filter(|&j| j < k).collect();
        for (a_pos, &a) in targets.iter().enumerate() {
            for &b in &targets[a_pos + 1..] {
                // a < b: b must be proximate to a, and their intersection
                // must survive the points blown up on it before k.
                if !points[b].proximate_to.contains(&a) {
                    out.push(Violation::new(
                        rules::SEPARATION,
                        vec![k, a, b],
                        format!(
                            "point {} lies on {} and {} which do not meet",
                            k + 1,
                            a + 1,
                            b + 1
                        ),
                    ));
                    continue;
                }
                let used: i128 = points[..k]
                    .iter()
                    .filter(|q| q.proximate_to.contains(&a) && q.proximate_to.contains(&b))
                    .map(|q| q.degree as i128)
                    .sum();
                let remaining = points[b].degree as i128 - used;
                if remaining <= 0 {
                    out.push(Violation::new(
                        rules::SEPARATION,
                        vec![k, a, b],
                        format!(
                            "point {}'s targets {} and {} are already separated (remaining degree {remaining})",
                            k + 1,
                            a + 1,
                            b + 1
                        ),
                    ));
                }
            }
        }
    }
}

/// Disjoint, exhaustive, nonempty blocks of component indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkedPartition {
    size: usize,
    blocks: Vec<Vec<usize>>,
}

impl MarkedPartition {
    /// Blocks are kept in the given order; members are sorted.
    pub fn new(size: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; size];
        let mut sorted = Vec::with_capacity(blocks.len());
        for (b, block) in blocks.into_iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {} is empty", b + 1)));
            }
            let mut block = block;
            block.sort_unstable();
            for &i in &block {
                if i >= size {
                    return Err(Error::InvalidPartition(format!(
                        "index {} out of range 1..={size}",
                        i + 1
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidPartition(format!(
                        "index {} appears more than once",
                        i + 1
                    )));
                }
                seen[i] = true;
            }
            sorted.push(block);
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!(
                "index {} is not covered",
                missing + 1
            )));
        }
        Ok(MarkedPartition {
            size,
            blocks: sorted,
        })
    }

    pub fn singletons(size: usize) -> Self {
        MarkedPartition {
            size,
            blocks: (0..size).map(|i| vec![i]).collect(),
        }
    }

    /// Number of indices partitioned.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> Option<&[usize]> {
        self.blocks.get(b).map(Vec::as_slice)
    }

    /// `block_of()[i]` is the block containing index `i`.
    pub fn block_of(&self) -> Vec<usize> {
        let mut of = vec![0; self.size];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                of[i] = b;
            }
        }
        of
    }

    pub(crate) fn check_size(&self, size: usize) -> Result<()> {
        if self.size == size {
            Ok(())
        } else {
            Err(Error::SizeMismatch {
                expected: size,
                found: self.size,
            })
        }
    }
}

/// Ordered block pairs `(A, B)` such that some member of `A` is proximate to
/// some member of `B`.
pub fn block_proximity(
    forest: &ProximityForest,
    partition: &MarkedPartition,
) -> Result<BTreeSet<(usize, usize)>> {
    partition.check_size(forest.len())?;
    let of = partition.block_of();
    Ok(forest.edges().map(|(i, j)| (of[i], of[j])).collect())
}

pub fn block_degree(
    forest: &ProximityForest,
    partition: &MarkedPartition,
    block: usize,
) -> Result<u64> {
    partition.check_size(forest.len())?;
    let members = partition.block(block).ok_or(Error::IndexOutOfRange {
        index: block + 1,
        size: partition.len(),
    })?;
    Ok(members.iter().map(|&i| forest.degree(i)).sum())
}

/// Deterministic pseudo-random forest whose configurations are plausible
/// blow-up sequences.
///
/// Each point is either free or lies on a first target plus further earlier
/// components that currently meet every target chosen so far (on surfaces,
/// meeting also requires a positive remaining intersection degree, and a
/// point on two components may not use more of it than is left). Degrees
/// are multiples of the least common multiple of the target degrees, so the
/// output passes strict validation as well.
pub fn random_forest(seed: u64, dimension: usize, m: usize, max_degree: u64) -> Result<ProximityForest> {
    check_bounds(dimension, max_degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Point> = Vec::with_capacity(m);
    for i in 0..m {
        let mut targets: Vec<usize> = Vec::new();
        if i > 0 && rng.random_bool(0.75) {
            targets.push(rng.random_range(0..i));
            let mut candidates: Vec<usize> = (0..i).filter(|&j| j != targets[0]).collect();
            candidates.shuffle(&mut rng);
            for c in candidates {
                if targets.len() >= dimension {
                    break;
                }
                if targets.iter().all(|&t| meets(&points, dimension, c, t)) && rng.random_bool(0.5) {
                    targets.push(c);
                }
            }
        }
        let mut step = targets.iter().fold(1u64, |acc, &t| lcm(acc, points[t].degree));
        let mut limit = max_degree;
        if dimension == 2 && targets.len() == 2 {
            limit = limit.min(room(&points, targets[0], targets[1]));
        }
        if step > limit {
            targets.truncate(1);
            step = points[targets[0]].degree;
            limit = max_degree;
        }
        let degree = step * rng.random_range(1..=limit / step);
        points.push(Point::new(degree, targets));
    }
    Ok(ProximityForest::new(dimension, points))
}

/// Deterministic pseudo-random forest with unconstrained target sets: any
/// subset of earlier points of size at most `d`. Passes non-strict
/// validation only.
pub fn random_forest_arbitrary(
    seed: u64,
    dimension: usize,
    m: usize,
    max_degree: u64,
) -> Result<ProximityForest> {
    check_bounds(dimension, max_degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..m)
        .map(|i| {
            let count = rng.random_range(0..=dimension.min(i));
            let mut earlier: Vec<usize> = (0..i).collect();
            earlier.shuffle(&mut rng);
            earlier.truncate(count);
            Point::new(rng.random_range(1..=max_degree), earlier)
        })
        .collect();
    Ok(ProximityForest::new(dimension, points))
}

fn check_bounds(dimension: usize, max_degree: u64) -> Result<()> {
    if dimension < 2 {
        return Err(Error::InvalidBounds(format!("dimension {dimension} < 2")));
    }
    if max_degree < 1 {
        return Err(Error::InvalidBounds("max degree must be at least 1".into()));
    }
    Ok(())
}

/// Whether the strict transforms of `a` and `b` currently intersect, given
/// the points blown up so far.
fn meets(points: &[Point], dimension: usize, a: usize, b: usize) -> bool {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if !points[hi].proximate_to.contains(&lo) {
        return false;
    }
    if dimension > 2 {
        return true;
    }
    room(points, lo, hi) > 0
}

/// Surface intersection degree of the strict transforms of `a` and `b`
/// left for further points, when one is proximate to the other.
fn room(points: &[Point], a: usize, b: usize) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let used: u64 = points
        .iter()
        .filter(|q| q.proximate_to.contains(&lo) && q.proximate_to.contains(&hi))
        .map(|q| q.degree)
        .sum();
    points[hi].degree.saturating_sub(used)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_chain_is_valid() {
        let f = ProximityForest::from_spec(2, &[(1, &[]), (1, &[0])]);
        assert!(validate_forest(&f, false).ok);
        assert!(validate_forest(&f, true).ok);
    }

    #[test]
    fn separated_targets_rejected_in_strict_mode() {
        let f = ProximityForest::from_spec(2, &[(1, &[]), (1, &[0]), (1, &[0, 1]), (1, &[0, 1])]);
        assert!(validate_forest(&f, false).ok);
        let report = validate_forest(&f, true);
        assert!(!report.ok);
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.rule, rules::SEPARATION);
        assert_eq!(v.indices, vec![3, 0, 1]);
        assert!(v.message.contains("remaining degree 0"), "{}", v.message);
    }

    #[test]
    fn non_meeting_targets_rejected_in_strict_mode() {
        let f = ProximityForest::from_spec(2, &[(1, &[]), (1, &[]), (1, &[0, 1])]);
        assert!(validate_forest(&f, true).has_rule(rules::SEPARATION));
        // the separation rule is surface-only
        let f3 = ProximityForest::new(3, f.points().to_vec());
        assert!(validate_forest(&f3, true).ok);
    }

    #[test]
    fn too_many_targets() {
        let f = ProximityForest::from_spec(
            3,
            &[(1, &[]), (1, &[0]), (1, &[0, 1]), (1, &[0, 1, 2]), (1, &[0, 1, 2, 3])],
        );
        let report = validate_forest(&f, false);
        assert!(!report.ok);
        assert!(report.has_rule(rules::TARGET_COUNT));
        assert!(report.violations[0].message.contains("at most d"));
    }

    #[test]
    fn structural_violations_all_reported() {
        let f = ProximityForest::from_spec(1, &[(0, &[0]), (1, &[5])]);
        let report = validate_forest(&f, false);
        assert!(report.has_rule(rules::DIMENSION));
        assert!(report.has_rule(rules::DEGREE));
        assert_eq!(
            report.violations.iter().filter(|v| v.rule == rules::TARGET_ORDER).count(),
            2
        );
        assert!(f.ensure_valid().is_err());
    }

    #[test]
    fn divisibility_is_strict_only() {
        let f = ProximityForest::from_spec(3, &[(2, &[]), (3, &[0])]);
        assert!(validate_forest(&f, false).ok);
        assert!(validate_forest(&f, true).has_rule(rules::DIVISIBILITY));
    }

    #[test]
    fn block_proximity_examples() {
        let f = ProximityForest::from_spec(2, &[(1, &[]), (1, &[0]), (1, &[1])]);
        let singles = MarkedPartition::singletons(3);
        let got = block_proximity(&f, &singles).unwrap();
        assert_eq!(got, BTreeSet::from([(1, 0), (2, 1)]));

        let p = MarkedPartition::new(3, vec![vec![0], vec![1, 2]]).unwrap();
        let got = block_proximity(&f, &p).unwrap();
        assert_eq!(got, BTreeSet::from([(1, 0), (1, 1)]));

        let whole = MarkedPartition::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(block_proximity(&f, &whole).unwrap(), BTreeSet::from([(0, 0)]));

        let wrong = MarkedPartition::singletons(2);
        assert!(matches!(
            block_proximity(&f, &wrong),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn block_degree_examples() {
        let f = ProximityForest::from_spec(4, &[(1, &[]), (2, &[0]), (2, &[1])]);
        let p = MarkedPartition::new(3, vec![vec![0], vec![1, 2]]).unwrap();
        assert_eq!(block_degree(&f, &p, 1).unwrap(), 4);
        assert_eq!(block_degree(&f, &p, 0).unwrap(), 1);
        assert!(block_degree(&f, &p, 2).is_err());

        let g = ProximityForest::from_spec(4, &[(1, &[]), (1, &[]), (3, &[1])]);
        let p = MarkedPartition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        assert_eq!(block_degree(&g, &p, 0).unwrap(), 2);
        assert_eq!(block_degree(&g, &p, 1).unwrap(), 3);
    }

    #[test]
    fn partition_rejects_malformed_blocks() {
        assert!(MarkedPartition::new(3, vec![vec![0, 1]]).is_err());
        assert!(MarkedPartition::new(2, vec![vec![0, 1], vec![1]]).is_err());
        assert!(MarkedPartition::new(2, vec![vec![0, 1], vec![]]).is_err());
        assert!(MarkedPartition::new(2, vec![vec![0, 2]]).is_err());
        let p = MarkedPartition::new(3, vec![vec![2, 0], vec![1]]).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1]]);
        assert_eq!(p.block_of(), vec![0, 1, 0]);
    }

    #[test]
    fn random_forest_bounds_and_determinism() {
        assert!(random_forest(1, 1, 3, 1).is_err());
        assert!(random_forest(1, 2, 3, 0).is_err());
        assert!(random_forest(7, 3, 0, 2).unwrap().is_empty());
        assert_eq!(
            random_forest(42, 3, 7, 3).unwrap(),
            random_forest(42, 3, 7, 3).unwrap()
        );
        assert_eq!(
            random_forest_arbitrary(42, 3, 7, 3).unwrap(),
            random_forest_arbitrary(42, 3, 7, 3).unwrap()
        );
    }

    #[test]
    fn random_forest_passes_every_rule() {
        let f = random_forest(2024, 2, 6, 3).unwrap();
        assert_eq!(f.len(), 6);
        assert!(validate_forest(&f, true).ok, "{:?}", validate_forest(&f, true));
        for seed in 0..300 {
            for d in 2..=5 {
                let f = random_forest(seed, d, 9, 4).unwrap();
                let report = validate_forest(&f, true);
                assert!(report.ok, "seed {seed} d {d}: {report:?}");
                assert!(f.degrees().iter().all(|&g| (1..=4).contains(&g)));
                let a = random_forest_arbitrary(seed, d, 9, 4).unwrap();
                assert!(validate_forest(&a, false).ok);
            }
        }
    }

    #[test]
    fn relabel_keeps_creation_order() {
        let f = ProximityForest::from_spec(2, &[(1, &[]), (2, &[]), (2, &[1])]);
        let g = f.relabel(&[1, 0, 2]).unwrap();
        assert_eq!(g.degrees(), vec![2, 1, 2]);
        assert!(g.is_proximate(2, 0));
        assert!(f.relabel(&[2, 1, 0]).is_err());
    }
}
