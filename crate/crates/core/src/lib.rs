//! Combinatorics of sequences of point blow-ups.
//!
//! A sequence of point blow-ups is modeled by a [`ProximityForest`]: points
//! in creation order, each with a residue degree and the earlier points it
//! is proximate to. From it, [`tensor_from_forest`] computes the d-ary
//! intersection form of the exceptional components. The
//! [`contraction`] module inverts that map by detecting final components
//! numerically and blowing them down one at a time, and [`equivalence`]
//! decides when two forests, tensors or marked versions of them are the
//! same up to relabeling.
//!
//! ```
//! use blowup_core::{ProximityForest, tensor_from_forest, recover_sequence, forest_isomorphic};
//!
//! // P1; P2 on the first exceptional divisor; P3 of degree 3 on the second.
//! let forest = ProximityForest::from_spec(4, &[(1, &[]), (1, &[0]), (3, &[1])]);
//! let t = tensor_from_forest(&forest).unwrap();
//! assert_eq!(t.diagonal(), vec![-2, -4, -3]);
//!
//! let (back, _trace) = recover_sequence(&t).unwrap();
//! assert!(forest_isomorphic(&forest, &back).unwrap().is_some());
//! ```

pub mod contraction;
pub mod equivalence;
pub mod error;
pub mod io;
pub mod model;
pub mod tensor;

pub use contraction::{
    contract, empty_intersection, final_set, is_final, recover_all_orders, recover_sequence, ContractionStep,
    ContractionTrace,
};
pub use equivalence::{
    automorphism_orbits, canonical_form_forest, canonical_form_tensor, direct_tensor_match, forest_automorphism_orbits,
    forest_isomorphic, marked_forest_equivalent, marked_tensor_equivalent, partition_compatible_morphism,
    partition_compatible_sequence, tensor_equivalent, CanonicalForm, IndexPermutation,
};
pub use error::{Error, Result};
pub use model::{
    block_degree, block_proximity, random_forest, random_forest_arbitrary, validate_forest, MarkedPartition, Point,
    ProximityForest, ValidationReport, Violation,
};
pub use tensor::{tensor_from_forest, total_transform_matrix, IntersectionTensor, MultiIndex, TotalTransformMatrix};
