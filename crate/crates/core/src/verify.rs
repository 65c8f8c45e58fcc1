//! Instance verifiers for the structural statements under test.
//!
//! Each verifier takes a concrete product-vector set, evaluates the
//! statement's premises in order (stopping at the first failure), and
//! returns a [`Verdict`]. A failed premise is `NotApplicable`, never an
//! error: sweeping a large space means most instances miss the premises,
//! and the search must keep moving. `Counterexample` is reserved for
//! instances where every premise holds and the conclusion still fails; the
//! verdict then carries enough data to recheck that claim independently.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::oracle::tensor_rank;
use crate::scalar::{FieldSpec, Scalar};
use crate::tensor::{ModeSignature, ProductVector, ProductVectorSet};
use crate::zerosum::{is_irreducible, minimal_zero_partition, zero_sum_subsets, Partition};

/// Outcome of checking one statement against one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    /// All premises hold and the conclusion holds.
    Holds,
    /// Some premise fails; the statement says nothing about this instance.
    NotApplicable,
    /// All premises hold and the conclusion fails.
    Counterexample,
}

/// One named hypothesis and whether it held.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Premise {
    pub name: &'static str,
    pub held: bool,
}

/// Full report for one instance: the premises actually evaluated (in
/// order, ending at the first failure), the instance profile, and the
/// conclusion's witness. `subset_witness` is the zero-sum subset found by
/// the subset statement; `inequality` is `(lhs, rhs)` for statements whose
/// conclusion is `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub premises: Vec<Premise>,
    pub n: usize,
    pub m: usize,
    pub subset_witness: Option<Vec<usize>>,
    pub inequality: Option<(i64, i64)>,
}

impl Verdict {
    fn not_applicable(n: usize, m: usize, premises: Vec<Premise>) -> Verdict {
        Verdict {
            status: VerdictStatus::NotApplicable,
            premises,
            n,
            m,
            subset_witness: None,
            inequality: None,
        }
    }
}

fn span_deficiency(s: &ProductVectorSet) -> i64 {
    s.span_dims().iter().map(|&d| d as i64 - 1).sum()
}

/// Subset statement: when the total sum vanishes and n - 1 is at most the
/// summed span deficiencies, some nonempty strict subset must also vanish.
/// The witness is the first such subset in (size, lexicographic) order.
pub fn verify_conjecture_instance(s: &ProductVectorSet) -> Result<Verdict> {
    let n = s.len();
    let m = s.signature().mode_count();
    let mut premises = Vec::new();

    let zero_sum = s.sum_all().is_zero();
    premises.push(Premise { name: "zero_sum", held: zero_sum });
    if !zero_sum {
        return Ok(Verdict::not_applicable(n, m, premises));
    }
    let bound = span_deficiency(s);
    let dimension_bound = n as i64 - 1 <= bound;
    premises.push(Premise { name: "dimension_bound", held: dimension_bound });
    if !dimension_bound {
        return Ok(Verdict::not_applicable(n, m, premises));
    }
    let witness = zero_sum_subsets(s)?.into_iter().find(|sub| sub.len() < n);
    let status =
        if witness.is_some() { VerdictStatus::Holds } else { VerdictStatus::Counterexample };
    Ok(Verdict { status, premises, n, m, subset_witness: witness, inequality: None })
}

/// Two-dimensional bound: an irreducible zero sum whose factors span at
/// least two dimensions in every mode needs n >= m + 2 summands.
pub fn verify_two_dim_case(s: &ProductVectorSet) -> Result<Verdict> {
    let n = s.len();
    let m = s.signature().mode_count();
    let mut premises = Vec::new();

    let spans_ok = s.span_dims().iter().all(|&d| d >= 2);
    premises.push(Premise { name: "spans_two_dimensional", held: spans_ok });
    if !spans_ok {
        return Ok(Verdict::not_applicable(n, m, premises));
    }
    let zero_sum = s.sum_all().is_zero();
    premises.push(Premise { name: "zero_sum", held: zero_sum });
    if !zero_sum {
        return Ok(Verdict::not_applicable(n, m, premises));
    }
    let irreducible = is_irreducible(s)?;
    premises.push(Premise { name: "irreducible", held: irreducible });
    if !irreducible {
        return Ok(Verdict::not_applicable(n, m, premises));
    }
    let inequality = (m as i64 + 2, n as i64);
    let status = if inequality.0 <= inequality.1 {
        VerdictStatus::Holds
    } else {
        VerdictStatus::Counterexample
    };
    Ok(Verdict { status, premises, n, m, subset_witness: None, inequality: Some(inequality) })
}

/// Which inequality the rank-relative statement asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankBound {
    /// n + r >= m + 2: the bound counts modes.
    ModeCount,
    /// n + r - 2 >= sum of (d_j - 1): the bound sums span deficiencies.
    SpanSum,
}

/// Rank-relative bound: the total sums to a tensor of rank exactly `r`,
/// every strict subset with more than r summands keeps rank above r, and
/// the chosen inequality must then hold.
///
/// `r = 0` degenerates to the irreducible-zero-sum premises and runs over
/// any field; positive `r` needs the exhaustive rank oracle, hence a
/// finite field and a budget.
pub fn verify_rank_version(
    s: &ProductVectorSet,
    r: usize,
    kind: RankBound,
    budget: u64,
) -> Result<Verdict> {
    let n = s.len();
    let m = s.signature().mode_count();
    if n < 2 || r > n - 2 {
        return Err(Error::InvalidArgument(format!(
            "rank parameter {} outside 0..={}",
            r,
            n.saturating_sub(2)
        )));
    }
    if r >= 1 && !s.signature().field().is_finite() {
        return Err(Error::RationalsNotEnumerable);
    }
    let mut premises = Vec::new();

    if kind == RankBound::ModeCount {
        let spans_ok = s.span_dims().iter().all(|&d| d >= 2);
        premises.push(Premise { name: "spans_two_dimensional", held: spans_ok });
        if !spans_ok {
            return Ok(Verdict::not_applicable(n, m, premises));
        }
    }

    let total = s.sum_all();
    let total_rank_ok = if r == 0 {
        total.is_zero()
    } else {
        match tensor_rank(&total, r, budget) {
            Ok(res) => res.rank == r,
            Err(Error::RankExceedsBound { .. }) => false,
            Err(e) => return Err(e),
        }
    };
    premises.push(Premise { name: "total_rank_is_r", held: total_rank_ok });
    if !total_rank_ok {
        return Ok(Verdict::not_applicable(n, m, premises));
    }

    // Strict subsets larger than r must keep rank at least r + 1. For
    // r = 0 that is exactly irreducibility, no oracle required.
    let subsets_ok = if r == 0 {
        is_irreducible(s)?
    } else {
        let mut ok = true;
        'sizes: for size in (r + 1)..n {
            for subset in (0..n).combinations(size) {
                let sub = s.sum_subset(&subset)?;
                match tensor_rank(&sub, r, budget) {
                    Ok(_) => {
                        ok = false;
                        break 'sizes;
                    }
                    Err(Error::RankExceedsBound { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        ok
    };
    premises.push(Premise { name: "strict_subsets_rank_exceeds_r", held: subsets_ok });
    if !subsets_ok {
        return Ok(Verdict::not_applicable(n, m, premises));
    }

    let inequality = match kind {
        RankBound::ModeCount => (m as i64 + 2, (n + r) as i64),
        RankBound::SpanSum => (span_deficiency(s), (n + r) as i64 - 2),
    };
    let status = if inequality.0 <= inequality.1 {
        VerdictStatus::Holds
    } else {
        VerdictStatus::Counterexample
    };
    Ok(Verdict { status, premises, n, m, subset_witness: None, inequality: Some(inequality) })
}

fn prepend_mode(v: &ProductVector, factor: Vec<Scalar>) -> Result<ProductVector> {
    let field = v.signature().field();
    let mut dims = vec![factor.len()];
    dims.extend_from_slice(v.signature().dims());
    let sig = ModeSignature::new(field, dims)?;
    let mut factors = vec![factor];
    factors.extend(v.factors().iter().cloned());
    ProductVector::new(sig, factors)
}

/// The extremal family for the two-dimensional bound: n product vectors in
/// n - 2 binary modes with zero total sum, no vanishing strict subset, and
/// every mode spanning both dimensions. Starts from {e0, e1, -e0-e1} in
/// one mode; each step prepends a mode and splits the last vector in two.
pub fn tight_example(n: usize, field: FieldSpec) -> Result<ProductVectorSet> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("tight example needs n >= 3, got {}", n)));
    }
    let one = Scalar::one(field);
    let zero = Scalar::zero(field);
    let minus = one.neg();
    let base = ModeSignature::new(field, vec![2])?;
    let mut vectors = vec![
        ProductVector::new(base.clone(), vec![vec![one.clone(), zero.clone()]])?,
        ProductVector::new(base.clone(), vec![vec![zero.clone(), one.clone()]])?,
        ProductVector::new(base, vec![vec![minus.clone(), minus.clone()]])?,
    ];
    for k in 4..=n {
        let prev = std::mem::take(&mut vectors);
        let last = &prev[k - 2];
        for x in &prev[..k - 2] {
            vectors.push(prepend_mode(x, vec![one.clone(), zero.clone()])?);
        }
        vectors.push(prepend_mode(last, vec![zero.clone(), minus.clone()])?);
        vectors.push(prepend_mode(last, vec![one.clone(), one.clone()])?);
    }
    let sig = vectors[0].signature().clone();
    ProductVectorSet::new(sig, vectors)
}

/// Outcome of trying to match two decompositions summand by summand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairingOutcome {
    /// `sigma[a] = b` means the a-th vector of `xs` equals the b-th of
    /// `ys`.
    Pairing(Vec<usize>),
    /// The minimal zero partition of {x_a} with {-y_b} has a block that is
    /// not an x/y pair; that partition is returned for analysis.
    Obstruction(Partition),
}

/// Try to pair two equal-sum decompositions vector by vector.
///
/// The combined set {x_1..x_n, -y_1..-y_n} sums to zero; its minimal zero
/// partition either consists of n blocks {x_a, -y_b} (yielding the
/// permutation) or contains a larger mixed block, which is exactly the
/// failure object worth inspecting.
pub fn reduction_pairing(xs: &ProductVectorSet, ys: &ProductVectorSet) -> Result<PairingOutcome> {
    if xs.signature() != ys.signature() {
        return Err(Error::SignatureMismatch);
    }
    let n = xs.len();
    if ys.len() != n {
        return Err(Error::InvalidArgument(format!(
            "decomposition sizes differ: {} vs {}",
            n,
            ys.len()
        )));
    }
    if xs.sum_all() != ys.sum_all() {
        return Err(Error::SumsDiffer);
    }
    let mut combined = xs.vectors().to_vec();
    combined.extend(ys.vectors().iter().map(|y| y.neg()));
    let combined = ProductVectorSet::new(xs.signature().clone(), combined)?;
    let partition = minimal_zero_partition(&combined)?;

    let mut sigma = vec![usize::MAX; n];
    for block in partition.blocks() {
        let is_pair = block.len() == 2 && block[0] < n && block[1] >= n;
        if !is_pair {
            return Ok(PairingOutcome::Obstruction(partition));
        }
        sigma[block[0]] = block[1] - n;
    }
    debug_assert!(sigma.iter().all(|&b| b < n), "blocks partition both sides");
    Ok(PairingOutcome::Pairing(sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{unique_decomposition_check, DecompositionUniqueness};
    use crate::tensor::test_support::set;

    const F2: FieldSpec = FieldSpec::PrimeField(2);
    const F3: FieldSpec = FieldSpec::PrimeField(3);
    const Q: FieldSpec = FieldSpec::Rationals;

    #[test]
    fn cancelling_pairs_satisfy_the_subset_statement() {
        let s = set(
            Q,
            &[
                &[&[1, 0], &[1, 0], &[1, 0]],
                &[&[-1, 0], &[1, 0], &[1, 0]],
                &[&[0, 1], &[0, 1], &[0, 1]],
                &[&[0, -1], &[0, 1], &[0, 1]],
            ],
        );
        let v = verify_conjecture_instance(&s).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds);
        assert!(v.premises.iter().all(|p| p.held));
        assert_eq!(v.subset_witness, Some(vec![0, 1]));
    }

    #[test]
    fn subset_statement_skips_instances_missing_a_premise() {
        // The tight family misses the dimension bound: n - 1 = m + 1 > m.
        let t = tight_example(5, Q).unwrap();
        let v = verify_conjecture_instance(&t).unwrap();
        assert_eq!(v.status, VerdictStatus::NotApplicable);
        assert_eq!(v.premises.last().unwrap().name, "dimension_bound");

        let nonzero = set(Q, &[&[&[1, 0], &[1, 0]], &[&[0, 1], &[0, 1]]]);
        let v = verify_conjecture_instance(&nonzero).unwrap();
        assert_eq!(v.status, VerdictStatus::NotApplicable);
        assert_eq!(v.premises, vec![Premise { name: "zero_sum", held: false }]);
    }

    #[test]
    fn tight_examples_hold_the_two_dim_bound_with_equality() {
        for n in 3..=8 {
            let t = tight_example(n, Q).unwrap();
            assert_eq!(t.len(), n);
            assert_eq!(t.signature().mode_count(), n - 2);
            assert!(t.span_dims().iter().all(|&d| d == 2), "n = {}", n);
            assert!(t.sum_all().is_zero(), "n = {}", n);
            assert!(is_irreducible(&t).unwrap(), "n = {}", n);
            let v = verify_two_dim_case(&t).unwrap();
            assert_eq!(v.status, VerdictStatus::Holds);
            assert_eq!(v.inequality, Some((n as i64, n as i64)));
        }
    }

    #[test]
    fn tight_example_four_matches_the_construction_trace() {
        let t = tight_example(4, Q).unwrap();
        let expected = set(
            Q,
            &[&[&[1, 0], &[1, 0]], &[&[1, 0], &[0, 1]], &[&[0, 1], &[1, 1]], &[&[-1, -1], &[1, 1]]],
        );
        assert_eq!(t.vectors(), expected.vectors());
    }

    #[test]
    fn tight_example_works_over_prime_fields() {
        for field in [F2, F3] {
            let t = tight_example(6, field).unwrap();
            assert!(t.sum_all().is_zero());
            assert!(is_irreducible(&t).unwrap());
            assert!(t.span_dims().iter().all(|&d| d == 2));
        }
        assert!(matches!(tight_example(2, Q), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn parallel_mode_makes_the_two_dim_bound_not_applicable() {
        let s = set(Q, &[&[&[1, 0], &[1, 0]], &[&[0, 1], &[1, 0]], &[&[-1, -1], &[1, 0]]]);
        let v = verify_two_dim_case(&s).unwrap();
        assert_eq!(v.status, VerdictStatus::NotApplicable);
        assert_eq!(v.premises, vec![Premise { name: "spans_two_dimensional", held: false }]);
    }

    #[test]
    fn rank_zero_bound_agrees_with_the_two_dim_case() {
        let inputs = [tight_example(4, Q).unwrap(), tight_example(5, Q).unwrap()];
        for s in &inputs {
            let a = verify_two_dim_case(s).unwrap();
            let b = verify_rank_version(s, 0, RankBound::ModeCount, 1000).unwrap();
            assert_eq!(a.status, b.status);
            assert_eq!(a.inequality, b.inequality);
        }
    }

    #[test]
    fn rank_version_validates_r_and_the_field() {
        let t = tight_example(4, Q).unwrap();
        assert!(matches!(
            verify_rank_version(&t, 3, RankBound::ModeCount, 1000),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            verify_rank_version(&t, 1, RankBound::ModeCount, 1000),
            Err(Error::RationalsNotEnumerable)
        ));
    }

    #[test]
    fn rank_version_rejects_wrong_total_rank_as_not_applicable() {
        let t = tight_example(4, F2).unwrap();
        let v = verify_rank_version(&t, 1, RankBound::ModeCount, 100_000).unwrap();
        assert_eq!(v.status, VerdictStatus::NotApplicable);
        assert_eq!(v.premises.last().unwrap().name, "total_rank_is_r");
    }

    #[test]
    fn smallest_rank_one_mode_count_instance_holds() {
        // Exhaustive sweeps find no rank-1 instance with n = 4 over F_2 up
        // to dims (2,2,3); the first one lives at dims (2,2,2), n = 5. Its
        // total is the product (e0+e1)(x)(e0+e1)(x)e1, every pair of
        // summands disagrees in at least two modes, and each mode spans
        // both dimensions.
        let s = set(
            F2,
            &[
                &[&[0, 1], &[0, 1], &[0, 1]],
                &[&[0, 1], &[1, 0], &[1, 0]],
                &[&[1, 0], &[0, 1], &[1, 1]],
                &[&[1, 0], &[1, 1], &[1, 0]],
                &[&[1, 1], &[1, 0], &[1, 1]],
            ],
        );
        let product = set(F2, &[&[&[1, 1], &[1, 1], &[0, 1]]]);
        assert_eq!(s.sum_all(), product.sum_all());
        let v = verify_rank_version(&s, 1, RankBound::ModeCount, 1_000_000).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds);
        assert!(v.premises.iter().all(|p| p.held));
        assert_eq!(v.inequality, Some((5, 6)));
    }

    #[test]
    fn span_sum_bound_holds_tightly_on_the_four_vector_example() {
        let t = tight_example(4, Q).unwrap();
        let v = verify_rank_version(&t, 0, RankBound::SpanSum, 1000).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds);
        assert_eq!(v.inequality, Some((2, 2)));
    }

    #[test]
    fn identical_decompositions_pair_by_identity() {
        let s = set(F3, &[&[&[1, 0], &[1, 0]], &[&[0, 1], &[0, 1]]]);
        match reduction_pairing(&s, &s).unwrap() {
            PairingOutcome::Pairing(sigma) => assert_eq!(sigma, vec![0, 1]),
            other => panic!("expected a pairing, got {:?}", other),
        }
    }

    #[test]
    fn permuted_decompositions_recover_the_permutation() {
        let xs = set(F3, &[&[&[1, 0], &[1, 0]], &[&[0, 1], &[0, 1]], &[&[1, 1], &[1, 2]]]);
        let ys = ProductVectorSet::new(
            xs.signature().clone(),
            vec![xs.vector(2).clone(), xs.vector(0).clone(), xs.vector(1).clone()],
        )
        .unwrap();
        match reduction_pairing(&xs, &ys).unwrap() {
            PairingOutcome::Pairing(sigma) => {
                assert_eq!(sigma, vec![1, 2, 0]);
                for (a, &b) in sigma.iter().enumerate() {
                    assert_eq!(xs.vector(a), ys.vector(b));
                }
            }
            other => panic!("expected a pairing, got {:?}", other),
        }
    }

    #[test]
    fn inequivalent_identity_decompositions_obstruct_with_a_big_block() {
        let xs = set(F2, &[&[&[1, 0], &[1, 0]], &[&[0, 1], &[0, 1]]]);
        let t = xs.sum_all();
        let mut mine = xs.vectors().to_vec();
        mine.sort();
        let ys = match unique_decomposition_check(&t, 2, 100_000).unwrap() {
            DecompositionUniqueness::Multiple { decompositions } => {
                // Listed decompositions are sorted, so this comparison is
                // by multiset, not by order.
                let alt = decompositions.into_iter().find(|d| *d != mine).unwrap();
                ProductVectorSet::new(xs.signature().clone(), alt).unwrap()
            }
            other => panic!("identity should decompose in several ways: {:?}", other),
        };
        match reduction_pairing(&xs, &ys).unwrap() {
            PairingOutcome::Obstruction(p) => {
                assert!(p.blocks().iter().any(|b| b.len() >= 4));
            }
            other => panic!("expected an obstruction, got {:?}", other),
        }
    }

    #[test]
    fn pairing_checks_signatures_sizes_and_sums() {
        let xs = set(F2, &[&[&[1, 0], &[1, 0]], &[&[0, 1], &[0, 1]]]);
        let wrong_sum = set(F2, &[&[&[1, 0], &[1, 0]], &[&[0, 1], &[1, 1]]]);
        assert!(matches!(reduction_pairing(&xs, &wrong_sum), Err(Error::SumsDiffer)));
        let smaller = set(F2, &[&[&[1, 1], &[1, 1]]]);
        assert!(matches!(reduction_pairing(&xs, &smaller), Err(Error::InvalidArgument(_))));
    }
}
