#![allow(dead_code)]

use std::collections::BTreeMap;

use blowup_core::{IntersectionTensor, Point, ProximityForest};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `T(i_1..i_d)` by expanding every `H_i = H_i^* - sum_{k -> i} H_k^*` and
/// keeping the d-tuples of expansion terms that name a single point.
pub fn brute_tensor(forest: &ProximityForest) -> IntersectionTensor {
    let m = forest.len();
    let d = forest.dimension();
    let sign = if d % 2 == 1 { 1 } else { -1 };
    let expansion: Vec<Vec<(usize, i64)>> = (0..m)
        .map(|i| {
            let mut terms = vec![(i, 1)];
            terms.extend(forest.proximate_from(i).map(|k| (k, -1)));
            terms
        })
        .collect();
    let mut entries = BTreeMap::new();
    for idx in tuples(m, d).into_iter().filter(|t| t.windows(2).all(|w| w[0] <= w[1])) {
        let mut total = 0i64;
        for choice in tuples_over(&idx.iter().map(|&i| expansion[i].len()).collect::<Vec<_>>()) {
            let picked: Vec<(usize, i64)> = idx.iter().zip(&choice).map(|(&i, &c)| expansion[i][c]).collect();
            if picked.iter().all(|p| p.0 == picked[0].0) {
                let coeff: i64 = picked.iter().map(|p| p.1).product();
                total += coeff * sign * forest.degree(picked[0].0) as i64;
            }
        }
        entries.insert(idx, total);
    }
    IntersectionTensor::from_entries(d, m, entries).unwrap()
}

/// All `d`-tuples over `0..m`.
pub fn tuples(m: usize, d: usize) -> Vec<Vec<usize>> {
    tuples_over(&vec![m; d])
}

fn tuples_over(ranges: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &r in ranges {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..r).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Does `perm` carry `a` onto `b` (degrees and proximities, both ways)?
pub fn forest_map_ok(a: &ProximityForest, b: &ProximityForest, perm: &[usize]) -> bool {
    let m = a.len();
    b.len() == m
        && (0..m).all(|i| a.degree(i) == b.degree(perm[i]))
        && (0..m).all(|i| (0..m).all(|j| a.is_proximate(i, j) == b.is_proximate(perm[i], perm[j])))
}

pub fn tensor_map_ok(a: &IntersectionTensor, b: &IntersectionTensor, perm: &[usize]) -> bool {
    let d = a.dimension();
    a.size() == b.size()
        && tuples(a.size(), d)
            .into_iter()
            .filter(|t| t.windows(2).all(|w| w[0] <= w[1]))
            .all(|t| {
                let image: Vec<usize> = t.iter().map(|&i| perm[i]).collect();
                a.get(&t) == b.get(&image)
            })
}

pub fn brute_forest_iso(a: &ProximityForest, b: &ProximityForest) -> bool {
    a.len() == b.len() && permutations(a.len()).iter().any(|p| forest_map_ok(a, b, p))
}

pub fn brute_tensor_equiv(a: &IntersectionTensor, b: &IntersectionTensor) -> bool {
    a.size() == b.size()
        && a.dimension() == b.dimension()
        && permutations(a.size()).iter().any(|p| tensor_map_ok(a, b, p))
}

/// Orbits of the brute-force automorphism group, as sorted blocks.
pub fn brute_forest_orbits(f: &ProximityForest) -> Vec<Vec<usize>> {
    let autos: Vec<Vec<usize>> = permutations(f.len())
        .into_iter()
        .filter(|p| forest_map_ok(f, f, p))
        .collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..f.len() {
        if blocks.iter().any(|b| b.contains(&i)) {
            continue;
        }
        let mut orbit: Vec<usize> = autos.iter().map(|p| p[i]).collect();
        orbit.sort_unstable();
        orbit.dedup();
        blocks.push(orbit);
    }
    blocks
}

/// Uniformly chosen creation-order-preserving relabeling: a random linear
/// extension of the proximity order.
pub fn random_relabel(f: &ProximityForest, seed: u64) -> (ProximityForest, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = f.len();
    let mut perm = vec![usize::MAX; m];
    for next in 0..m {
        let ready: Vec<usize> = (0..m)
            .filter(|&i| perm[i] == usize::MAX && f.targets(i).iter().all(|&j| perm[j] != usize::MAX))
            .collect();
        let &pick = ready.choose(&mut rng).expect("targets come earlier");
        perm[pick] = next;
    }
    (f.relabel(&perm).unwrap(), perm)
}

/// Small random perturbation: bump one degree or toggle one proximity,
/// keeping non-strict validity.
pub fn perturb(f: &ProximityForest, seed: u64) -> ProximityForest {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Point> = f.points().to_vec();
    let m = points.len();
    if m == 0 {
        return f.clone();
    }
    for _ in 0..8 {
        let i = rng.random_range(0..m);
        if i > 0 && rng.random_bool(0.5) {
            let j = rng.random_range(0..i);
            let mut p = points[i].clone();
            if !p.proximate_to.remove(&j) {
                p.proximate_to.insert(j);
            }
            if p.proximate_to.len() <= f.dimension() {
                points[i] = p;
                break;
            }
        } else {
            points[i].degree += 1;
            break;
        }
    }
    ProximityForest::new(f.dimension(), points)
}

/// Every non-strictly valid forest with `m` points in dimension `d` and
/// degrees in `1..=max_degree`.
pub fn enumerate_forests(d: usize, m: usize, max_degree: u64) -> Vec<ProximityForest> {
    let mut out = vec![Vec::<Point>::new()];
    for i in 0..m {
        let subsets: Vec<Vec<usize>> = (0u32..1 << i)
            .filter(|mask| mask.count_ones() as usize <= d)
            .map(|mask| (0..i).filter(|&j| mask >> j & 1 == 1).collect())
            .collect();
        let mut next = Vec::with_capacity(out.len() * subsets.len() * max_degree as usize);
        for prefix in &out {
            for s in &subsets {
                for deg in 1..=max_degree {
                    let mut p = prefix.clone();
                    p.push(Point::new(deg, s.iter().copied()));
                    next.push(p);
                }
            }
        }
        out = next;
    }
    out.into_iter().map(|p| ProximityForest::new(d, p)).collect()
}

/// Surface intersection number of distinct components `i`, `j`, computed
/// from the forest alone.
pub fn surface_intersection(f: &ProximityForest, i: usize, j: usize) -> i64 {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    if !f.is_proximate(hi, lo) {
        return 0;
    }
    let shared: u64 = (0..f.len())
        .filter(|&k| f.is_proximate(k, lo) && f.is_proximate(k, hi))
        .map(|k| f.degree(k))
        .sum();
    f.degree(hi) as i64 - shared as i64
}
