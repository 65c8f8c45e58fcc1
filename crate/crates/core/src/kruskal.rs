//! Kruskal ranks and what they buy: general position certificates, the
//! classical sufficient condition for unique rank-n decompositions, a
//! rank classifier for subset sums, and the bipartite nonzero guarantee.
//!
//! The underlying facts, checked exhaustively by the test suite at small
//! sizes: if 2n - 1 <= sum_j (k_j - 1) with at least three modes, the sum of
//! the n product vectors has rank exactly n and a unique decomposition; if
//! the set is in (d_1, ..., d_m)-general position with n + r - 1 <=
//! sum_j (d_j - 1), a subset sum has rank r exactly when the subset has r
//! elements; and a bipartite sum with n + 1 <= d_1 + d_2 is never zero.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::tensor::ProductVectorSet;

/// Largest k such that every k of the mode-`mode` factors are linearly
/// independent. At least 1 because factors are nonzero.
pub fn kruskal_rank(set: &ProductVectorSet, mode: usize) -> usize {
    let n = set.len();
    let rows: Vec<Vec<Scalar>> = set.vectors().iter().map(|v| v.factor(mode).to_vec()).collect();
    let max_k = n.min(set.signature().dims()[mode]);
    for k in (1..=max_k).rev() {
        let all_independent = (0..n).combinations(k).all(|subset| {
            let chosen: Vec<Vec<Scalar>> = subset.iter().map(|&a| rows[a].clone()).collect();
            Matrix::from_rows(set.signature().field(), &chosen).rank() == k
        });
        if all_independent {
            return k;
        }
    }
    0 // unreachable: singletons are nonzero
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralPositionWitness {
    /// Zero-based mode whose factors violate the requested dimension.
    pub mode: usize,
    /// Zero-based vector indices whose mode factors span too little.
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralPositionReport {
    pub requested: Vec<usize>,
    pub holds: bool,
    /// The lexicographically first violating (mode, index set), if any.
    pub witness: Option<GeneralPositionWitness>,
}

/// Does every choice of d_j of the mode-j factors span d_j dimensions?
pub fn check_general_position(
    set: &ProductVectorSet,
    requested: &[usize],
) -> Result<GeneralPositionReport> {
    let n = set.len();
    let dims = set.signature().dims();
    if requested.len() != dims.len() {
        return Err(Error::BadDimensionRequest(format!(
            "{} requested dimensions for {} modes",
            requested.len(),
            dims.len()
        )));
    }
    for (j, &d) in requested.iter().enumerate() {
        if d < 1 || d > n || d > dims[j] {
            return Err(Error::BadDimensionRequest(format!(
                "d_{} = {d} is outside 1..=min(n = {n}, dim = {})",
                j + 1,
                dims[j]
            )));
        }
    }
    for (j, &d) in requested.iter().enumerate() {
        let rows: Vec<Vec<Scalar>> = set.vectors().iter().map(|v| v.factor(j).to_vec()).collect();
        for subset in (0..n).combinations(d) {
            let chosen: Vec<Vec<Scalar>> = subset.iter().map(|&a| rows[a].clone()).collect();
            if Matrix::from_rows(set.signature().field(), &chosen).rank() < d {
                return Ok(GeneralPositionReport {
                    requested: requested.to_vec(),
                    holds: false,
                    witness: Some(GeneralPositionWitness { mode: j, indices: subset }),
                });
            }
        }
    }
    Ok(GeneralPositionReport { requested: requested.to_vec(), holds: true, witness: None })
}

/// The sufficient condition for a unique rank-n decomposition:
/// 2n - 1 <= sum_j (d_j - 1).
pub fn kruskal_inequality(n: usize, d: &[usize]) -> bool {
    let rhs: usize = d.iter().map(|&x| x - 1).sum();
    2 * n - 1 <= rhs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotCertifiedReason {
    /// Fewer than three modes: the criterion never applies.
    TooFewModes,
    InequalityFails,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniquenessCertificate {
    pub n: usize,
    pub m: usize,
    pub kruskal_ranks: Vec<usize>,
    /// 2n - 1
    pub inequality_lhs: usize,
    /// sum_j (kruskal rank_j - 1)
    pub inequality_rhs: usize,
    pub certified: bool,
    pub reason: Option<NotCertifiedReason>,
}

/// Certify that the sum of the set has rank n and a unique decomposition,
/// using the Kruskal ranks of the factor families.
pub fn certify_uniqueness(set: &ProductVectorSet) -> Result<UniquenessCertificate> {
    let n = set.len();
    if n < 2 {
        return Err(Error::InvalidArgument("uniqueness needs at least two vectors".into()));
    }
    let m = set.signature().mode_count();
    let kruskal_ranks: Vec<usize> = (0..m).map(|j| kruskal_rank(set, j)).collect();
    let inequality_lhs = 2 * n - 1;
    let inequality_rhs = kruskal_ranks.iter().map(|&k| k - 1).sum();
    let inequality_ok = inequality_lhs <= inequality_rhs;
    let certified = m >= 3 && inequality_ok;
    let reason = if certified {
        None
    } else if m < 3 {
        Some(NotCertifiedReason::TooFewModes)
    } else {
        Some(NotCertifiedReason::InequalityFails)
    };
    Ok(UniquenessCertificate {
        n,
        m,
        kruskal_ranks,
        inequality_lhs,
        inequality_rhs,
        certified,
        reason,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GammaRankPrediction {
    /// |Gamma| = r, so the subset sum has rank exactly r.
    ExactRank(usize),
    /// |Gamma| != r, so the subset sum cannot have rank r.
    ExcludedRank(usize),
    /// The Kruskal ranks are too small for the classifier to say anything:
    /// it needs n + r - 1 <= sum_j (k_j - 1).
    NotApplicable { needed: usize, available: usize },
}

/// Predict whether the sum over `subset` has rank `r`, from Kruskal ranks
/// alone. The set is always in general position at its own Kruskal ranks,
/// so applicability reduces to the inequality n + r - 1 <= sum_j (k_j - 1).
pub fn classify_gamma_rank(
    set: &ProductVectorSet,
    subset: &[usize],
    r: usize,
) -> Result<GammaRankPrediction> {
    let n = set.len();
    if r > n {
        return Err(Error::InvalidArgument(format!("rank {r} exceeds the set size {n}")));
    }
    let mut seen = vec![false; n];
    for &a in subset {
        if a >= n {
            return Err(Error::IndexOutOfRange(format!("vector {} of {n}", a + 1)));
        }
        if seen[a] {
            return Err(Error::InvalidArgument(format!("index {} repeated in subset", a + 1)));
        }
        seen[a] = true;
    }
    let m = set.signature().mode_count();
    let available: usize = (0..m).map(|j| kruskal_rank(set, j) - 1).sum();
    let needed = (n + r).saturating_sub(1);
    if n < 2 || needed > available {
        return Ok(GammaRankPrediction::NotApplicable { needed, available });
    }
    if subset.len() == r {
        Ok(GammaRankPrediction::ExactRank(r))
    } else {
        Ok(GammaRankPrediction::ExcludedRank(r))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BipartiteVerdict {
    /// Premises held and the sum was verified nonzero, entry by entry.
    NonzeroConfirmed,
    PremiseFailed {
        reason: String,
    },
}

/// For two modes: if the factor spans reach the requested dimensions and
/// n + 1 <= d_1 + d_2, the sum cannot be zero. Verified exactly; a zero sum
/// under the premises is a contradiction with a proved statement.
pub fn bipartite_nonzero_check(
    set: &ProductVectorSet,
    requested: (usize, usize),
) -> Result<BipartiteVerdict> {
    let m = set.signature().mode_count();
    if m != 2 {
        return Err(Error::WrongModeCount { expected: 2, got: m });
    }
    let n = set.len();
    let spans = set.span_dims();
    let (d1, d2) = requested;
    if spans[0] < d1 || spans[1] < d2 {
        return Ok(BipartiteVerdict::PremiseFailed {
            reason: format!(
                "factor spans ({}, {}) fall short of the requested ({d1}, {d2})",
                spans[0], spans[1]
            ),
        });
    }
    if n + 1 > d1 + d2 {
        return Ok(BipartiteVerdict::PremiseFailed {
            reason: format!("n + 1 = {} exceeds d_1 + d_2 = {}", n + 1, d1 + d2),
        });
    }
    if set.sum_all().is_zero() {
        return Err(Error::ContradictionDetected(format!(
            "bipartite sum of {n} vectors vanished although {} <= {}",
            n + 1,
            d1 + d2
        )));
    }
    Ok(BipartiteVerdict::NonzeroConfirmed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldSpec;
    use crate::tensor::test_support::set;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn three_lines(field: FieldSpec) -> ProductVectorSet {
        set(field, &[&[&[1, 0], &[1, 0]], &[&[0, 1], &[0, 1]], &[&[1, 1], &[1, 1]]])
    }

    #[test]
    fn kruskal_rank_sees_pairwise_independence() {
        let s = three_lines(q());
        assert_eq!(kruskal_rank(&s, 0), 2);
        assert_eq!(kruskal_rank(&s, 1), 2);
        // Parallel factors in a mode cap its Kruskal rank at 1.
        let t = set(q(), &[&[&[1, 0], &[1, 0]], &[&[2, 0], &[0, 1]]]);
        assert_eq!(kruskal_rank(&t, 0), 1);
        assert_eq!(kruskal_rank(&t, 1), 2);
    }

    #[test]
    fn general_position_report_carries_the_first_witness() {
        let s = three_lines(q());
        let ok = check_general_position(&s, &[2, 2]).unwrap();
        assert!(ok.holds && ok.witness.is_none());

        // Mode 0 factors e_0, e_0, e_1: the pair {0, 1} is the first violation.
        let bad = set(q(), &[&[&[1, 0], &[1, 0]], &[&[1, 0], &[0, 1]], &[&[0, 1], &[1, 1]]]);
        let report = check_general_position(&bad, &[2, 2]).unwrap();
        assert!(!report.holds);
        assert_eq!(report.witness, Some(GeneralPositionWitness { mode: 0, indices: vec![0, 1] }));
    }

    #[test]
    fn general_position_rejects_infeasible_requests() {
        let s = three_lines(q());
        assert!(matches!(check_general_position(&s, &[3, 2]), Err(Error::BadDimensionRequest(_))));
        assert!(matches!(check_general_position(&s, &[2]), Err(Error::BadDimensionRequest(_))));
        assert!(matches!(check_general_position(&s, &[2, 0]), Err(Error::BadDimensionRequest(_))));
    }

    #[test]
    fn general_position_matches_kruskal_rank_threshold() {
        // Equivalence of the subset-quantified statement with k_j >= d_j,
        // checked over every admissible request for a few small sets.
        let sets = [
            three_lines(f2()),
            three_lines(q()),
            set(
                q(),
                &[
                    &[&[1, 0, 0], &[1, 0]],
                    &[&[0, 1, 0], &[0, 1]],
                    &[&[0, 0, 1], &[1, 1]],
                    &[&[1, 1, 1], &[1, 2]],
                ],
            ),
        ];
        for s in &sets {
            let n = s.len();
            let ks: Vec<usize> =
                (0..s.signature().mode_count()).map(|j| kruskal_rank(s, j)).collect();
            let caps: Vec<usize> = s.signature().dims().iter().map(|&d| d.min(n)).collect();
            let mut request = vec![1; caps.len()];
            loop {
                let report = check_general_position(s, &request).unwrap();
                let expected = request.iter().zip(&ks).all(|(&d, &k)| k >= d);
                assert_eq!(report.holds, expected, "request {request:?}");
                // odometer over 1..=caps
                let mut j = 0;
                loop {
                    if j == request.len() {
                        break;
                    }
                    request[j] += 1;
                    if request[j] <= caps[j] {
                        break;
                    }
                    request[j] = 1;
                    j += 1;
                }
                if j == request.len() {
                    break;
                }
            }
        }
    }

    #[test]
    fn inequality_examples() {
        assert!(kruskal_inequality(4, &[4, 4, 2]));
        assert!(!kruskal_inequality(4, &[2, 2, 2]));
        assert!(kruskal_inequality(2, &[2, 2, 2]));
    }

    #[test]
    fn certificate_for_two_diagonal_lines() {
        let s = set(f2(), &[&[&[1, 0], &[1, 0], &[1, 0]], &[&[0, 1], &[0, 1], &[0, 1]]]);
        let cert = certify_uniqueness(&s).unwrap();
        assert!(cert.certified);
        assert_eq!(cert.kruskal_ranks, vec![2, 2, 2]);
        assert_eq!((cert.inequality_lhs, cert.inequality_rhs), (3, 3));
        assert_eq!(cert.reason, None);
    }

    #[test]
    fn two_modes_never_certify() {
        let s = three_lines(q());
        let cert = certify_uniqueness(&s).unwrap();
        assert!(!cert.certified);
        assert_eq!(cert.reason, Some(NotCertifiedReason::TooFewModes));
    }

    #[test]
    fn single_vector_certification_is_rejected() {
        let s = set(q(), &[&[&[1, 0], &[1, 0]]]);
        assert!(matches!(certify_uniqueness(&s), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn gamma_rank_classifier_desk_cases() {
        let s = set(
            q(),
            &[
                &[&[1, 0], &[1, 0], &[1, 0]],
                &[&[0, 1], &[0, 1], &[0, 1]],
                &[&[1, 1], &[1, 1], &[1, 1]],
            ],
        );
        // k = (2, 2, 2): available 3; r <= 1 applicable for n = 3.
        assert_eq!(classify_gamma_rank(&s, &[1], 1).unwrap(), GammaRankPrediction::ExactRank(1));
        assert_eq!(classify_gamma_rank(&s, &[], 0).unwrap(), GammaRankPrediction::ExactRank(0));
        assert_eq!(
            classify_gamma_rank(&s, &[0, 2], 1).unwrap(),
            GammaRankPrediction::ExcludedRank(1)
        );
        assert_eq!(
            classify_gamma_rank(&s, &[0, 2], 2).unwrap(),
            GammaRankPrediction::NotApplicable { needed: 4, available: 3 }
        );
        assert!(classify_gamma_rank(&s, &[3], 1).is_err());
        assert!(classify_gamma_rank(&s, &[0], 4).is_err());
    }

    #[test]
    fn bipartite_check_separates_premises_from_conclusion() {
        let s = three_lines(q());
        assert_eq!(
            bipartite_nonzero_check(&s, (2, 2)).unwrap(),
            BipartiteVerdict::NonzeroConfirmed
        );
        let cancel = set(q(), &[&[&[1, 0], &[1, 0]], &[&[-1, 0], &[1, 0]]]);
        assert!(matches!(
            bipartite_nonzero_check(&cancel, (1, 1)).unwrap(),
            BipartiteVerdict::PremiseFailed { .. }
        ));
        let triple = set(q(), &[&[&[1, 0], &[1, 0], &[1, 0]], &[&[0, 1], &[0, 1], &[0, 1]]]);
        assert_eq!(
            bipartite_nonzero_check(&triple, (2, 2)),
            Err(Error::WrongModeCount { expected: 2, got: 3 })
        );
    }
}
