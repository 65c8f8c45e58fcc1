//! Exact-arithmetic laboratory for low-rank decompositions of tensors over
//! the rationals and the prime fields F_2, F_3, F_5, F_7.
//!
//! The crate provides:
//! - exact scalars and dense linear algebra ([`scalar`], [`matrix`]),
//! - product vectors, dense tensors and their structural ops ([`tensor`]),
//! - Kruskal ranks, general position and uniqueness certificates ([`kruskal`]),
//! - zero-sum subset combinatorics, partitions and chain covers ([`zerosum`]),
//! - brute-force rank and uniqueness oracles over small prime fields ([`oracle`]),
//! - verifiers for the structural statements under test and a tight example
//!   generator ([`verify`]),
//! - an exhaustive, deterministic counterexample search ([`search`]),
//! - a JSON instance format shared with the command line tool ([`jsonio`]).
//!
//! Everything is exact: no floating point, no tolerances. Hot sweeps run on
//! rayon when the default `parallel` feature is enabled and fall back to
//! sequential loops without it; results are identical either way.

pub mod error;
mod exec;
pub mod jsonio;
pub mod kruskal;
pub mod matrix;
pub mod oracle;
pub mod scalar;
pub mod search;
pub mod tensor;
pub mod verify;
pub mod zerosum;

pub use error::{Error, Result};
pub use kruskal::{
    bipartite_nonzero_check, certify_uniqueness, check_general_position, classify_gamma_rank,
    kruskal_rank, UniquenessCertificate,
};
pub use matrix::{annihilator, Matrix};
pub use oracle::{
    classify_2d_subspace, enumerate_product_vectors, nonparallel_mode_bound_check,
    product_sum_pair, tensor_rank, unique_decomposition_check, DecompositionUniqueness, PairSum,
    RankResult, SubspaceCategory, DEFAULT_BUDGET,
};
pub use scalar::{FieldSpec, Scalar};
pub use search::{
    search_counterexamples, search_counterexamples_seq, SearchReport, SearchSpace, SearchTarget,
    SymmetryOptions,
};
pub use tensor::{DenseTensor, ModeSignature, ProductVector, ProductVectorSet};
pub use verify::{
    reduction_pairing, tight_example, verify_conjecture_instance, verify_rank_version,
    verify_two_dim_case, PairingOutcome, RankBound, Verdict, VerdictStatus,
};
pub use zerosum::{
    build_chain, check_lemma_conditions, is_irreducible, minimal_zero_partition, zero_sum_subsets,
    Chain, ChainProblem, LemmaCheck, Partition,
};
