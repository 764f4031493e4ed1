#![allow(clippy::needless_range_loop)]

mod common;

use blowup_core::{
    random_forest, random_forest_arbitrary, tensor_from_forest, total_transform_matrix, IntersectionTensor,
    MarkedPartition, ProximityForest,
};
use common::{brute_tensor, tuples};
use proptest::prelude::*;

fn forest(max_d: usize, max_m: usize) -> impl Strategy<Value = ProximityForest> {
    (any::<u64>(), 2usize..=max_d, 0usize..=max_m, 1u64..=4, any::<bool>()).prop_map(|(seed, d, m, k, plausible)| {
        if plausible {
            random_forest(seed, d, m, k).unwrap()
        } else {
            random_forest_arbitrary(seed, d, m, k).unwrap()
        }
    })
}

fn sign(d: usize) -> i64 {
    if d % 2 == 1 {
        1
    } else {
        -1
    }
}

#[test]
fn matches_brute_force_on_every_small_forest() {
    for d in 2..=3 {
        for m in 0..=4 {
            for f in common::enumerate_forests(d, m, 2) {
                assert_eq!(tensor_from_forest(&f).unwrap(), brute_tensor(&f), "{f:?}");
            }
        }
    }
}

proptest! {
    #[test]
    fn matches_brute_force(f in forest(4, 6)) {
        prop_assert_eq!(tensor_from_forest(&f).unwrap(), brute_tensor(&f));
    }

    #[test]
    fn total_transforms_are_normalized(f in forest(5, 8)) {
        let t = tensor_from_forest(&f).unwrap();
        let c = total_transform_matrix(&f);
        let inv = c.inverse();
        let d = f.dimension();
        // C * C^-1 = 1
        for i in 0..f.len() {
            for j in 0..f.len() {
                let dot: i64 = (0..f.len()).map(|k| c.get(i, k) * inv[k][j]).sum();
                prop_assert_eq!(dot, (i == j) as i64);
            }
        }
        for i in 0..f.len() {
            let args = vec![inv[i].as_slice(); d];
            prop_assert_eq!(t.evaluate(&args).unwrap(), sign(d) * f.degree(i) as i64);
            for j in (0..f.len()).filter(|&j| j != i) {
                for r in 1..d {
                    let mut args = vec![inv[i].as_slice(); d - r];
                    args.extend(std::iter::repeat_n(inv[j].as_slice(), r));
                    prop_assert_eq!(t.evaluate(&args).unwrap(), 0);
                }
            }
        }
    }

    #[test]
    fn evaluate_is_symmetric(f in forest(4, 6), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng, seq::SliceRandom};
        let t = tensor_from_forest(&f).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d = t.dimension();
        let vectors: Vec<Vec<i64>> = (0..d).map(|_| (0..t.size()).map(|_| rng.random_range(-5..=5)).collect()).collect();
        let args: Vec<&[i64]> = vectors.iter().map(Vec::as_slice).collect();
        let value = t.evaluate(&args).unwrap();
        let mut shuffled = args.clone();
        shuffled.shuffle(&mut rng);
        prop_assert_eq!(t.evaluate(&shuffled).unwrap(), value);
    }

    #[test]
    fn evaluate_on_basis_vectors_reads_entries(f in forest(3, 5)) {
        let t = tensor_from_forest(&f).unwrap();
        let m = t.size();
        let basis: Vec<Vec<i64>> = (0..m).map(|i| (0..m).map(|j| (i == j) as i64).collect()).collect();
        for idx in tuples(m, t.dimension()) {
            let args: Vec<&[i64]> = idx.iter().map(|&i| basis[i].as_slice()).collect();
            prop_assert_eq!(t.evaluate(&args).unwrap(), t.get(&idx));
        }
    }

    #[test]
    fn quotient_agrees_with_evaluate(f in forest(3, 6), labels in proptest::collection::vec(0usize..3, 6)) {
        let t = tensor_from_forest(&f).unwrap();
        let m = t.size();
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); 3];
        for i in 0..m {
            blocks[labels[i]].push(i);
        }
        blocks.retain(|b| !b.is_empty());
        let p = MarkedPartition::new(m, blocks).unwrap();
        let q = t.quotient(&p).unwrap();
        let sums: Vec<Vec<i64>> = p.blocks().iter().map(|b| (0..m).map(|i| b.contains(&i) as i64).collect()).collect();
        for idx in tuples(p.len(), t.dimension()) {
            let args: Vec<&[i64]> = idx.iter().map(|&b| sums[b].as_slice()).collect();
            prop_assert_eq!(q.get(&idx), t.evaluate(&args).unwrap());
        }
        prop_assert_eq!(t.quotient(&MarkedPartition::singletons(m)).unwrap(), t);
    }

    #[test]
    fn relabel_moves_entries(f in forest(3, 6), seed in any::<u64>()) {
        let t = tensor_from_forest(&f).unwrap();
        let perm = common::permutations(t.size());
        let perm = &perm[(seed % perm.len() as u64) as usize];
        let r = t.relabel(perm).unwrap();
        prop_assert!(common::tensor_map_ok(&t, &r, perm));
    }
}

#[test]
fn zero_and_empty_tensors() {
    let empty = tensor_from_forest(&ProximityForest::empty(3)).unwrap();
    assert_eq!(empty.size(), 0);
    assert!(empty.diagonal().is_empty());
    assert_eq!(empty.evaluate(&[&[], &[], &[]]).unwrap(), 0);
    assert_eq!(IntersectionTensor::zero(2, 3).nnz(), 0);
}
