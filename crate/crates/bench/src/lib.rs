//! Shared inputs for the benchmarks.

use blowup_core::{random_forest, tensor_from_forest, IntersectionTensor, ProximityForest};

/// Plausible forest with degrees up to 3.
pub fn forest(dimension: usize, m: usize, seed: u64) -> ProximityForest {
    random_forest(seed, dimension, m, 3).expect("generator accepts these bounds")
}

pub fn tensor(dimension: usize, m: usize, seed: u64) -> IntersectionTensor {
    tensor_from_forest(&forest(dimension, m, seed)).expect("plausible forests have tensors")
}

/// The same tensor with its indices reversed.
pub fn reversed(t: &IntersectionTensor) -> IntersectionTensor {
    let perm: Vec<usize> = (0..t.size()).rev().collect();
    t.relabel(&perm).expect("reversal is a permutation")
}
