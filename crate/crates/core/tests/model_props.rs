mod common;

use std::collections::BTreeSet;

use blowup_core::io::{forest_to_json, parse_forest};
use blowup_core::{
    block_degree, block_proximity, random_forest, random_forest_arbitrary, validate_forest, MarkedPartition,
    ProximityForest,
};
use proptest::prelude::*;

fn any_forest() -> impl Strategy<Value = ProximityForest> {
    (any::<u64>(), 2usize..=4, 0usize..=8, 1u64..=4, any::<bool>()).prop_map(|(seed, d, m, k, plausible)| {
        if plausible {
            random_forest(seed, d, m, k).unwrap()
        } else {
            random_forest_arbitrary(seed, d, m, k).unwrap()
        }
    })
}

/// A forest together with a random partition of its points.
fn forest_with_partition() -> impl Strategy<Value = (ProximityForest, MarkedPartition)> {
    any_forest().prop_flat_map(|f| {
        let m = f.len();
        (Just(f), proptest::collection::vec(0..m.max(1), m)).prop_map(move |(f, labels)| {
            let mut blocks: Vec<Vec<usize>> = Vec::new();
            let mut seen: Vec<usize> = Vec::new();
            for (i, &l) in labels.iter().enumerate() {
                match seen.iter().position(|&s| s == l) {
                    Some(b) => blocks[b].push(i),
                    None => {
                        seen.push(l);
                        blocks.push(vec![i]);
                    }
                }
            }
            let p = MarkedPartition::new(m, blocks).unwrap();
            (f, p)
        })
    })
}

proptest! {
    #[test]
    fn json_round_trip(f in any_forest()) {
        prop_assert!(f.validate(false).ok);
        let text = forest_to_json(&f);
        let back = parse_forest(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(forest_to_json(&back), text);
    }

    #[test]
    fn plausible_generator_passes_strict_validation(seed in any::<u64>(), d in 2usize..=4, m in 0usize..=8, k in 1u64..=6) {
        let f = random_forest(seed, d, m, k).unwrap();
        prop_assert_eq!(f.len(), m);
        let report = validate_forest(&f, true);
        prop_assert!(report.ok, "{:?}", report.violations);
        prop_assert_eq!(random_forest(seed, d, m, k).unwrap(), f);
    }

    #[test]
    fn singleton_block_proximity_is_edge_set(f in any_forest()) {
        let p = MarkedPartition::singletons(f.len());
        let edges: BTreeSet<(usize, usize)> = f.edges().collect();
        prop_assert_eq!(block_proximity(&f, &p).unwrap(), edges);
    }

    #[test]
    fn block_degrees_sum_to_total((f, p) in forest_with_partition()) {
        let sum: u64 = (0..p.len()).map(|b| block_degree(&f, &p, b).unwrap()).sum();
        prop_assert_eq!(sum, f.total_degree());
    }

    #[test]
    fn block_proximity_is_image_of_edges((f, p) in forest_with_partition()) {
        let of = p.block_of();
        let image: BTreeSet<(usize, usize)> = f.edges().map(|(i, j)| (of[i], of[j])).collect();
        prop_assert_eq!(block_proximity(&f, &p).unwrap(), image);
    }

    #[test]
    fn report_ok_iff_no_violations(seed in any::<u64>(), m in 0usize..=6) {
        // Scramble a forest so that some rules may fail.
        let f = random_forest_arbitrary(seed, 2, m, 3).unwrap();
        let mut points = f.points().to_vec();
        if let Some(p) = points.last_mut() {
            p.degree = seed % 3;
            p.proximate_to.insert(m - 1);
        }
        let g = ProximityForest::new(2, points);
        for strict in [false, true] {
            let r = g.validate(strict);
            prop_assert_eq!(r.ok, r.violations.is_empty());
            prop_assert!(m == 0 || !r.ok);
        }
    }
}

#[test]
fn seeded_generator_example() {
    let f = random_forest(7, 2, 6, 3).unwrap();
    assert_eq!(f.len(), 6);
    assert!(validate_forest(&f, true).ok);
    assert!(random_forest(7, 2, 0, 3).unwrap().is_empty());
}
