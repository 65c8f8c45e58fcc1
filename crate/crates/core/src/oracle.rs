//! Brute-force ground truth over small prime fields.
//!
//! Everything here trades generality for certainty: ranks are found by
//! exhausting multisets of canonical product vectors, uniqueness by listing
//! every decomposition of the stated size. The only shortcuts are provably
//! safe ones (flattening lower bounds, a hash lookup for the last summand).
//! Budgets are checked before a sweep starts, so a call either finishes or
//! refuses up front.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exec::run_indexed;
use crate::matrix::Matrix;
use crate::scalar::{FieldSpec, Scalar};
use crate::tensor::{DenseTensor, ModeSignature, ProductVector, ProductVectorSet};

/// Default ceiling on enumeration work, in candidate tuples.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Number of canonical product vectors with this signature, before any
/// budget considerations. `None` when the field is not finite or the count
/// overflows u128.
pub(crate) fn canonical_count(signature: &ModeSignature) -> Option<u128> {
    let p = signature.field().order()? as u128;
    let mut total: u128 = 1;
    for (j, &d) in signature.dims().iter().enumerate() {
        let lines = checked_pow(p, d)? - 1;
        // Modes past the first hold one monic representative per line.
        let count = if j == 0 { lines } else { lines / (p - 1) };
        total = total.checked_mul(count)?;
    }
    Some(total)
}

/// All nonzero vectors of F_p^d in lexicographic order.
fn nonzero_vectors(field: FieldSpec, d: usize) -> Vec<Vec<Scalar>> {
    let p = field.order().expect("finite field") as usize;
    let total = p.pow(d as u32);
    let mut out = Vec::with_capacity(total - 1);
    for code in 1..total {
        let mut v = vec![Scalar::zero(field); d];
        let mut rest = code;
        for k in (0..d).rev() {
            v[k] = Scalar::from_integer(field, (rest % p) as i64);
            rest /= p;
        }
        out.push(v);
    }
    out
}

/// Monic nonzero vectors of F_p^d (leading nonzero entry is 1), one per
/// projective line, in lexicographic order.
fn monic_vectors(field: FieldSpec, d: usize) -> Vec<Vec<Scalar>> {
    nonzero_vectors(field, d)
        .into_iter()
        .filter(|v| v.iter().find(|a| !a.is_zero()).expect("nonzero").is_one())
        .collect()
}

/// Enumerate every canonical product vector with the given signature, in
/// ascending order. Errors with `RationalsNotEnumerable` over Q and with
/// `BudgetExceeded` when the count tops `budget`.
pub fn enumerate_product_vectors(
    signature: &ModeSignature,
    budget: u64,
) -> Result<Vec<ProductVector>> {
    if !signature.field().is_finite() {
        return Err(Error::RationalsNotEnumerable);
    }
    let count = canonical_count(signature).ok_or(Error::BudgetExceeded(u128::MAX, budget))?;
    if count > budget as u128 {
        return Err(Error::BudgetExceeded(count, budget));
    }
    let field = signature.field();
    let per_mode: Vec<Vec<Vec<Scalar>>> = signature
        .dims()
        .iter()
        .enumerate()
        .map(|(j, &d)| if j == 0 { nonzero_vectors(field, d) } else { monic_vectors(field, d) })
        .collect();

    // Odometer over the per-mode lists; combined with ascending per-mode
    // orders this emits candidates in their derived lexicographic order.
    let m = per_mode.len();
    let mut out = Vec::with_capacity(count as usize);
    let mut slot = vec![0usize; m];
    loop {
        let factors: Vec<Vec<Scalar>> = (0..m).map(|j| per_mode[j][slot[j]].clone()).collect();
        let pv = ProductVector::new(signature.clone(), factors)?;
        out.push(pv);
        let mut j = m;
        while j > 0 {
            j -= 1;
            slot[j] += 1;
            if slot[j] < per_mode[j].len() {
                break;
            }
            slot[j] = 0;
            if j == 0 {
                debug_assert_eq!(out.len() as u128, count);
                return Ok(out);
            }
        }
    }
}

/// Candidate product vectors with precomputed expansions and a reverse
/// lookup from dense entries to candidate index.
pub(crate) struct CandidateTable {
    pvs: Vec<ProductVector>,
    dense: Vec<DenseTensor>,
    index: HashMap<Vec<Scalar>, usize>,
}

impl CandidateTable {
    pub(crate) fn build(signature: &ModeSignature, budget: u64) -> Result<Self> {
        let pvs = enumerate_product_vectors(signature, budget)?;
        let dense: Vec<DenseTensor> = pvs.iter().map(|v| v.expand()).collect();
        let mut index = HashMap::with_capacity(dense.len());
        for (i, t) in dense.iter().enumerate() {
            let previous = index.insert(t.entries().to_vec(), i);
            debug_assert!(previous.is_none(), "canonical candidates expand distinctly");
        }
        Ok(CandidateTable { pvs, dense, index })
    }

    pub(crate) fn len(&self) -> usize {
        self.pvs.len()
    }

    pub(crate) fn vector(&self, i: usize) -> &ProductVector {
        &self.pvs[i]
    }
}

/// Number of r-multisets over n candidates, `None` on overflow.
pub(crate) fn multiset_count(n: u128, r: usize) -> Option<u128> {
    // C(n + r - 1, r) with the running product kept exact.
    let mut acc: u128 = 1;
    for i in 0..r as u128 {
        acc = acc.checked_mul(n.checked_add(i)?)?;
        acc /= i + 1;
    }
    Some(acc)
}

/// Enumerate nondecreasing index tuples of length `r` summing to `target`,
/// in lexicographic order. `limit` bounds how many tuples each first-index
/// shard may emit; pass `None` to list them all.
fn scan_decompositions(
    table: &CandidateTable,
    target: &DenseTensor,
    r: usize,
    limit: Option<usize>,
    parallel: bool,
) -> Vec<Vec<usize>> {
    if r == 0 {
        return if target.is_zero() { vec![vec![]] } else { vec![] };
    }
    if r == 1 {
        return match table.index.get(target.entries()) {
            Some(&i) => vec![vec![i]],
            None => vec![],
        };
    }
    let n = table.len();
    let per_shard = run_indexed(n, parallel, |first| {
        let mut found: Vec<Vec<usize>> = Vec::new();
        let mut residual = target.clone();
        residual.sub_assign(&table.dense[first]);
        let mut prefix = vec![first];
        descend(table, &residual, r - 1, first, &mut prefix, limit, &mut found);
        found
    });
    match limit {
        // Shards are merged in first-index order, so the first nonempty
        // shard holds the lexicographically least tuple.
        Some(k) => per_shard
            .into_iter()
            .find(|v| !v.is_empty())
            .map(|v| v.into_iter().take(k).collect())
            .unwrap_or_default(),
        None => per_shard.into_iter().flatten().collect(),
    }
}

fn descend(
    table: &CandidateTable,
    residual: &DenseTensor,
    slots: usize,
    min_index: usize,
    prefix: &mut Vec<usize>,
    limit: Option<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    if limit.is_some_and(|k| found.len() >= k) {
        return;
    }
    if slots == 1 {
        // The last summand is forced; one hash probe replaces the loop.
        if let Some(&i) = table.index.get(residual.entries()) {
            if i >= min_index {
                let mut tuple = prefix.clone();
                tuple.push(i);
                found.push(tuple);
            }
        }
        return;
    }
    for i in min_index..table.len() {
        if limit.is_some_and(|k| found.len() >= k) {
            return;
        }
        let mut next = residual.clone();
        next.sub_assign(&table.dense[i]);
        prefix.push(i);
        descend(table, &next, slots - 1, i, prefix, limit, found);
        prefix.pop();
    }
}

/// Largest single-mode unfolding rank; a lower bound for the rank that is
/// valid over every field.
fn flattening_bound(t: &DenseTensor) -> usize {
    (0..t.signature().mode_count())
        .map(|j| t.unfold(j).expect("mode in range").rank())
        .max()
        .expect("at least one mode")
}

/// Rebuild the product vector of a tensor whose unfoldings all have rank at
/// most one. The caller guarantees `t` is nonzero.
fn recover_product(t: &DenseTensor) -> ProductVector {
    let sig = t.signature().clone();
    let m = sig.mode_count();
    // In each mode the first nonzero column of the unfolding spans the
    // mode-j factor line.
    let mut factors: Vec<Vec<Scalar>> = Vec::with_capacity(m);
    for j in 0..m {
        let unfolded = t.unfold(j).expect("mode in range");
        let col = (0..unfolded.cols())
            .find(|&c| (0..unfolded.rows()).any(|r| !unfolded[(r, c)].is_zero()))
            .expect("nonzero tensor");
        factors.push((0..unfolded.rows()).map(|r| unfolded[(r, col)].clone()).collect());
    }
    // Mode 0 must be rebuilt exactly: read entries along the pivot position
    // of every later factor and divide out those pivot values.
    let pivots: Vec<usize> = factors[1..]
        .iter()
        .map(|f| f.iter().position(|a| !a.is_zero()).expect("nonzero factor"))
        .collect();
    let mut denom = Scalar::one(sig.field());
    for (f, &k) in factors[1..].iter().zip(&pivots) {
        denom = denom.mul(&f[k]);
    }
    let d0 = sig.dims()[0];
    let mut index = vec![0usize; m];
    index[1..].copy_from_slice(&pivots);
    let mut first = Vec::with_capacity(d0);
    for i in 0..d0 {
        index[0] = i;
        first.push(t.entry(&index).div(&denom));
    }
    factors[0] = first;
    let pv = ProductVector::new(sig, factors).expect("factors are nonzero");
    debug_assert_eq!(pv.expand(), *t);
    pv
}

/// How a rank verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMethod {
    /// The flattening lower bound alone settled the question (rank 0 or 1).
    FlatteningBoundMet,
    /// An exhaustive multiset search found a witness at the returned rank
    /// after the flattening bound ruled out everything smaller.
    Exhaustive,
}

/// A rank together with a decomposition witnessing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankResult {
    pub rank: usize,
    /// Product vectors summing to the tensor; empty exactly for rank 0.
    pub witness: Vec<ProductVector>,
    pub method: RankMethod,
}

/// Exact rank of `t`, provided it is at most `max_r`.
///
/// Ranks 0 and 1 are decided by flattenings alone and work over any field.
/// Anything higher needs the exhaustive sweep, hence a finite field; over Q
/// that path reports `RationalsNotEnumerable`. When every rank up to
/// `max_r` is ruled out the error carries the best lower bound known.
pub fn tensor_rank(t: &DenseTensor, max_r: usize, budget: u64) -> Result<RankResult> {
    if t.is_zero() {
        return Ok(RankResult { rank: 0, witness: vec![], method: RankMethod::FlatteningBoundMet });
    }
    let lower = flattening_bound(t);
    if lower > max_r {
        return Err(Error::RankExceedsBound { lower_bound: lower });
    }
    if lower <= 1 {
        let pv = recover_product(t);
        return Ok(RankResult {
            rank: 1,
            witness: vec![pv],
            method: RankMethod::FlatteningBoundMet,
        });
    }
    let table = CandidateTable::build(t.signature(), budget)?;
    for r in lower..=max_r {
        let work = multiset_count(table.len() as u128, r)
            .ok_or(Error::BudgetExceeded(u128::MAX, budget))?;
        if work > budget as u128 {
            return Err(Error::BudgetExceeded(work, budget));
        }
        let found = scan_decompositions(&table, t, r, Some(1), true);
        if let Some(tuple) = found.into_iter().next() {
            let witness = tuple.iter().map(|&i| table.vector(i).clone()).collect();
            return Ok(RankResult { rank: r, witness, method: RankMethod::Exhaustive });
        }
    }
    Err(Error::RankExceedsBound { lower_bound: max_r + 1 })
}

/// Whether a tensor of known rank decomposes in one way or several.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionUniqueness {
    Unique { decomposition: Vec<ProductVector> },
    Multiple { decompositions: Vec<Vec<ProductVector>> },
}

/// List every rank-`r` decomposition of `t` (as multisets of canonical
/// product vectors) and report whether there is exactly one.
///
/// The stated rank is verified first; a mismatch is an error carrying the
/// true rank, so callers cannot silently probe at the wrong level.
pub fn unique_decomposition_check(
    t: &DenseTensor,
    r: usize,
    budget: u64,
) -> Result<DecompositionUniqueness> {
    // Rank never exceeds the entry count, so this bound is safe.
    let actual = match tensor_rank(t, t.signature().entry_count(), budget) {
        Ok(res) => res.rank,
        Err(Error::RankExceedsBound { .. }) => unreachable!("entry count bounds the rank"),
        Err(e) => return Err(e),
    };
    if actual != r {
        return Err(Error::WrongRank { stated: r, actual });
    }
    if r == 0 {
        return Ok(DecompositionUniqueness::Unique { decomposition: vec![] });
    }
    if r == 1 {
        // A nonzero product tensor determines its canonical vector.
        return Ok(DecompositionUniqueness::Unique { decomposition: vec![recover_product(t)] });
    }
    let table = CandidateTable::build(t.signature(), budget)?;
    let work =
        multiset_count(table.len() as u128, r).ok_or(Error::BudgetExceeded(u128::MAX, budget))?;
    if work > budget as u128 {
        return Err(Error::BudgetExceeded(work, budget));
    }
    let tuples = scan_decompositions(&table, t, r, None, true);
    debug_assert!(!tuples.is_empty(), "rank was just verified");
    let mut decomps: Vec<Vec<ProductVector>> = tuples
        .into_iter()
        .map(|tuple| tuple.iter().map(|&i| table.vector(i).clone()).collect())
        .collect();
    if decomps.len() == 1 {
        Ok(DecompositionUniqueness::Unique { decomposition: decomps.remove(0) })
    } else {
        decomps.sort();
        Ok(DecompositionUniqueness::Multiple { decompositions: decomps })
    }
}

/// Shape of a weighted sum of two product vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairSum {
    /// The sum is again a product vector (returned in canonical form).
    Product(ProductVector),
    /// The sum has rank two: the factors disagree in at least two modes.
    Entangled,
    Zero,
}

/// Classify `a1 x1 + a2 x2`. The sum is a product vector exactly when at
/// most one mode has non-parallel factors, and in that case the product
/// form is written down directly instead of searched for.
pub fn product_sum_pair(
    x1: &ProductVector,
    x2: &ProductVector,
    a1: &Scalar,
    a2: &Scalar,
) -> Result<PairSum> {
    if x1.signature() != x2.signature() {
        return Err(Error::SignatureMismatch);
    }
    let sig = x1.signature().clone();
    let field = sig.field();
    if a1.field() != field || a2.field() != field {
        return Err(Error::FieldMismatch);
    }
    match (a1.is_zero(), a2.is_zero()) {
        (true, true) => return Ok(PairSum::Zero),
        (true, false) => return Ok(PairSum::Product(x2.scale(a2)?)),
        (false, true) => return Ok(PairSum::Product(x1.scale(a1)?)),
        (false, false) => {}
    }
    let m = sig.mode_count();
    // beta[j]: the ratio making x2's mode-j factor equal beta * x1's, if any.
    let mut beta: Vec<Option<Scalar>> = Vec::with_capacity(m);
    for j in 0..m {
        let rows = [x1.factor(j).to_vec(), x2.factor(j).to_vec()];
        if Matrix::from_rows(field, &rows).rank() == 1 {
            let k = x1.factor(j).iter().position(|a| !a.is_zero()).expect("nonzero factor");
            beta.push(Some(x2.factor(j)[k].div(&x1.factor(j)[k])));
        } else {
            beta.push(None);
        }
    }
    let free: Vec<usize> = (0..m).filter(|&j| beta[j].is_none()).collect();
    if free.len() >= 2 {
        return Ok(PairSum::Entangled);
    }
    // With at most one non-parallel mode the sum collapses onto x1's
    // factors outside that mode. Fold the parallel ratios into a single
    // coefficient b2 so that the combination happens in one mode.
    let pivot = free.first().copied().unwrap_or(0);
    let mut b2 = a2.clone();
    for (j, ratio) in beta.iter().enumerate() {
        if j != pivot {
            b2 = b2.mul(ratio.as_ref().expect("parallel mode"));
        }
    }
    let combined: Vec<Scalar> = x1
        .factor(pivot)
        .iter()
        .zip(x2.factor(pivot))
        .map(|(u, v)| a1.mul(u).add(&b2.mul(v)))
        .collect();
    if combined.iter().all(|a| a.is_zero()) {
        return Ok(PairSum::Zero);
    }
    let factors: Vec<Vec<Scalar>> =
        (0..m).map(|j| if j == pivot { combined.clone() } else { x1.factor(j).to_vec() }).collect();
    let pv = ProductVector::new(sig, factors)?;
    debug_assert_eq!(
        pv.expand(),
        x1.expand().scale(a1).add(&x2.expand().scale(a2)).expect("same signature")
    );
    Ok(PairSum::Product(pv))
}

/// Count the modes in which not all of the set's factors are parallel,
/// given that the weighted sum of the set is a nonzero product tensor and
/// the expansions are linearly independent. Both premises are rechecked;
/// the returned count is then certified to be at most n - 1, and a larger
/// count is reported as `ContradictionDetected`.
pub fn nonparallel_mode_bound_check(set: &ProductVectorSet, coeffs: &[Scalar]) -> Result<usize> {
    let n = set.len();
    if coeffs.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {} coefficients, got {}",
            n,
            coeffs.len()
        )));
    }
    let field = set.signature().field();
    if coeffs.iter().any(|a| a.field() != field) {
        return Err(Error::FieldMismatch);
    }
    // Premise 1: the expanded tensors are linearly independent.
    let rows: Vec<Vec<Scalar>> = set.expanded().iter().map(|t| t.entries().to_vec()).collect();
    if Matrix::from_rows(field, &rows).rank() != n {
        return Err(Error::PreconditionFailed(
            "the expanded tensors are linearly dependent".into(),
        ));
    }
    // Premise 2: the weighted sum is a nonzero product tensor.
    let mut sum = DenseTensor::zero(set.signature().clone());
    for (a, t) in coeffs.iter().zip(set.expanded()) {
        sum.add_assign(&t.scale(a));
    }
    if sum.is_zero() || flattening_bound(&sum) > 1 {
        return Err(Error::PreconditionFailed(
            "the weighted sum is not a nonzero product tensor".into(),
        ));
    }
    let m = set.signature().mode_count();
    let nonparallel = (0..m)
        .filter(|&j| {
            let rows: Vec<Vec<Scalar>> = (0..n).map(|a| set.vector(a).factor(j).to_vec()).collect();
            Matrix::from_rows(field, &rows).rank() > 1
        })
        .count();
    if nonparallel > n - 1 {
        return Err(Error::ContradictionDetected(format!(
            "{} non-parallel modes with only {} summands",
            nonparallel, n
        )));
    }
    Ok(nonparallel)
}

/// Classification of the plane spanned by two tensors, by its product
/// lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceCategory {
    /// 1: every line is a product line; 2: exactly two are; 3: exactly one;
    /// 4: none are.
    pub category: u8,
    /// Canonical product vectors spanning the product lines found.
    pub product_lines: Vec<ProductVector>,
}

fn try_recover_product(t: &DenseTensor) -> Option<ProductVector> {
    if t.is_zero() || flattening_bound(t) > 1 {
        None
    } else {
        Some(recover_product(t))
    }
}

/// Classify the 2-dimensional span of two linearly independent tensors by
/// counting its product lines.
///
/// Over a finite field all p + 1 lines are tested and the count must land
/// in {0, 1, 2, p + 1}; any other count is a `ContradictionDetected`. Over
/// the rationals the lines cannot be exhausted, so both spanning tensors
/// must themselves be products; their span then has category 1 or 2
/// depending on how many modes separate them.
pub fn classify_2d_subspace(t1: &DenseTensor, t2: &DenseTensor) -> Result<SubspaceCategory> {
    if t1.signature() != t2.signature() {
        return Err(Error::SignatureMismatch);
    }
    let field = t1.signature().field();
    let rows = vec![t1.entries().to_vec(), t2.entries().to_vec()];
    if Matrix::from_rows(field, &rows).rank() != 2 {
        return Err(Error::NotIndependent);
    }
    match field.order() {
        Some(p) => {
            // Lines of the span: [t2] and [t1 + c t2] for each c in F_p.
            let mut product_lines = Vec::new();
            if let Some(pv) = try_recover_product(t2) {
                product_lines.push(pv);
            }
            for c in 0..p {
                let rep = t1.add(&t2.scale(&Scalar::from_integer(field, c as i64)))?;
                if let Some(pv) = try_recover_product(&rep) {
                    product_lines.push(pv);
                }
            }
            let lines = p as usize + 1;
            let category = match product_lines.len() {
                k if k == lines => 1,
                2 => 2,
                1 => 3,
                0 => 4,
                k => {
                    return Err(Error::ContradictionDetected(format!(
                        "{} of {} lines in a plane are product lines",
                        k, lines
                    )))
                }
            };
            product_lines.sort();
            Ok(SubspaceCategory { category, product_lines })
        }
        None => {
            // Over Q only spans of two product tensors are classifiable.
            let p1 = try_recover_product(t1).ok_or(Error::RationalsRequireProductSpan)?;
            let p2 = try_recover_product(t2).ok_or(Error::RationalsRequireProductSpan)?;
            let one = Scalar::one(field);
            let category = match product_sum_pair(&p1, &p2, &one, &one)? {
                // Independent products whose sum is again a product span a
                // plane of products.
                PairSum::Product(_) => 1,
                PairSum::Entangled => 2,
                PairSum::Zero => unreachable!("independent tensors"),
            };
            Ok(SubspaceCategory { category, product_lines: vec![p1, p2] })
        }
    }
}
