//! Exhaustive counterexample search over a finite space of instances.
//!
//! The space is every n-multiset of canonical product vectors for each
//! admissible signature; the engine runs the chosen verifier on each and
//! reports `Counterexample` verdicts verbatim. Two symmetry reductions
//! keep the sweep honest but smaller: multisets are enumerated in sorted
//! order only (never permuted), and optionally the least vector must be
//! lexicographically least within its orbit under per-mode basis
//! relabeling. Every orbit of instances keeps at least one representative,
//! and all verdicts are invariant under relabeling, so the reductions
//! cannot hide a counterexample.
//!
//! Reports are deterministic: shards are merged in enumeration order, so
//! worker count and scheduling never change the output.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::exec::run_indexed;
use crate::oracle::{canonical_count, enumerate_product_vectors, multiset_count, tensor_rank};
use crate::scalar::FieldSpec;
use crate::tensor::{ModeSignature, ProductVector, ProductVectorSet};
use crate::verify::{
    verify_conjecture_instance, verify_rank_version, verify_two_dim_case, Premise, RankBound,
    Verdict, VerdictStatus,
};
use crate::zerosum::MAX_SUBSET_VECTORS;

/// Which statement the sweep tries to break.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchTarget {
    /// Zero sums under the dimension bound must contain a vanishing strict
    /// subset.
    Subset,
    /// Irreducible zero sums with two-dimensional spans need n >= m + 2.
    TwoDim,
    /// Rank-relative bound counting modes: n + r >= m + 2.
    RankModeCount,
    /// Rank-relative bound summing span deficiencies:
    /// n + r - 2 >= sum of (d_j - 1).
    RankSpanSum,
}

/// Toggles for the optional reductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryOptions {
    /// Require the least vector of each multiset to be lexicographically
    /// least in its orbit under per-mode basis relabeling.
    pub fix_first_vector_orbit: bool,
}

impl Default for SymmetryOptions {
    fn default() -> Self {
        SymmetryOptions { fix_first_vector_orbit: true }
    }
}

/// A finite family of instances: for each mode count m in `m_range` the
/// signature is the first m entries of `dims_template`, and for each n in
/// `n_range` every n-multiset of canonical product vectors is visited.
/// Ranges are inclusive and may be empty (start above end).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpace {
    field: FieldSpec,
    dims_template: Vec<usize>,
    m_range: (usize, usize),
    n_range: (usize, usize),
    symmetry: SymmetryOptions,
}

impl SearchSpace {
    pub fn new(
        field: FieldSpec,
        dims_template: Vec<usize>,
        m_range: (usize, usize),
        n_range: (usize, usize),
        symmetry: SymmetryOptions,
    ) -> Result<SearchSpace> {
        if !field.is_finite() {
            return Err(Error::InvalidArgument("searching needs a finite field".into()));
        }
        let nonempty = m_range.0 <= m_range.1 && n_range.0 <= n_range.1;
        if nonempty {
            if m_range.0 < 1 || m_range.1 > dims_template.len() {
                return Err(Error::InvalidArgument(format!(
                    "mode range {}..={} outside the {}-entry dims template",
                    m_range.0,
                    m_range.1,
                    dims_template.len()
                )));
            }
            if n_range.0 < 1 || n_range.1 > MAX_SUBSET_VECTORS {
                return Err(Error::InvalidArgument(format!(
                    "vector count range {}..={} outside 1..={}",
                    n_range.0, n_range.1, MAX_SUBSET_VECTORS
                )));
            }
            // Validates the dims themselves (positive, bounded product).
            ModeSignature::new(field, dims_template[..m_range.1].to_vec())?;
        }
        Ok(SearchSpace { field, dims_template, m_range, n_range, symmetry })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dims_template(&self) -> &[usize] {
        &self.dims_template
    }

    pub fn m_range(&self) -> (usize, usize) {
        self.m_range
    }

    pub fn n_range(&self) -> (usize, usize) {
        self.n_range
    }

    pub fn symmetry(&self) -> SymmetryOptions {
        self.symmetry
    }

    fn signature(&self, m: usize) -> Result<ModeSignature> {
        ModeSignature::new(self.field, self.dims_template[..m].to_vec())
    }

    /// Upper bound on verifier calls, before symmetry filtering.
    pub fn candidate_count(&self) -> Result<u128> {
        let mut total: u128 = 0;
        for m in self.m_range.0..=self.m_range.1 {
            let sig = self.signature(m)?;
            let candidates = canonical_count(&sig).ok_or(Error::BudgetExceeded(u128::MAX, 0))?;
            for n in self.n_range.0..=self.n_range.1 {
                let multisets =
                    multiset_count(candidates, n).ok_or(Error::BudgetExceeded(u128::MAX, 0))?;
                total = total.checked_add(multisets).ok_or(Error::BudgetExceeded(u128::MAX, 0))?;
            }
        }
        Ok(total)
    }
}

/// Outcome of a sweep. `scanned` counts the instances actually examined
/// (after symmetry filtering); `holds` and `not_applicable` partition the
/// non-counterexample verdicts; counterexamples carry the full instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub target: SearchTarget,
    pub scanned: u64,
    pub holds: u64,
    pub not_applicable: u64,
    pub counterexamples: Vec<(ProductVectorSet, Verdict)>,
}

/// True when no per-mode basis relabeling sends `pv` to a strictly
/// smaller canonical product vector.
fn orbit_least(pv: &ProductVector) -> bool {
    let sig = pv.signature();
    let perms: Vec<Vec<Vec<usize>>> =
        sig.dims().iter().map(|&d| (0..d).permutations(d).collect()).collect();
    let m = sig.mode_count();
    let mut choice = vec![0usize; m];
    loop {
        let factors: Vec<Vec<_>> = (0..m)
            .map(|j| {
                let perm = &perms[j][choice[j]];
                perm.iter().map(|&k| pv.factor(j)[k].clone()).collect()
            })
            .collect();
        let image =
            ProductVector::new(sig.clone(), factors).expect("permuted factors stay nonzero");
        if image < *pv {
            return false;
        }
        let mut j = m;
        loop {
            if j == 0 {
                return true;
            }
            j -= 1;
            choice[j] += 1;
            if choice[j] < perms[j].len() {
                break;
            }
            choice[j] = 0;
        }
    }
}

fn verdict_for(target: SearchTarget, s: &ProductVectorSet, budget: u64) -> Result<Verdict> {
    match target {
        SearchTarget::Subset => verify_conjecture_instance(s),
        SearchTarget::TwoDim => verify_two_dim_case(s),
        SearchTarget::RankModeCount | SearchTarget::RankSpanSum => {
            let kind = if target == SearchTarget::RankModeCount {
                RankBound::ModeCount
            } else {
                RankBound::SpanSum
            };
            // The premise "rank of the total equals r" pins r to one value
            // per instance, so the sweep derives it instead of iterating.
            let n = s.len();
            let no_admissible_r = |s: &ProductVectorSet| Verdict {
                status: VerdictStatus::NotApplicable,
                premises: vec![Premise { name: "rank_within_n_minus_2", held: false }],
                n,
                m: s.signature().mode_count(),
                subset_witness: None,
                inequality: None,
            };
            if n < 2 {
                return Ok(no_admissible_r(s));
            }
            let r = match tensor_rank(&s.sum_all(), n - 2, budget) {
                Ok(res) => res.rank,
                Err(Error::RankExceedsBound { .. }) => return Ok(no_admissible_r(s)),
                Err(e) => return Err(e),
            };
            verify_rank_version(s, r, kind, budget)
        }
    }
}

struct ShardOutcome {
    scanned: u64,
    holds: u64,
    not_applicable: u64,
    counterexamples: Vec<(ProductVectorSet, Verdict)>,
}

/// Visit every sorted index tuple of length `n` starting with `first` and
/// fold the verdicts of one shard.
fn sweep_shard(
    target: SearchTarget,
    candidates: &[ProductVector],
    sig: &ModeSignature,
    n: usize,
    first: usize,
    budget: u64,
) -> Result<ShardOutcome> {
    let mut out =
        ShardOutcome { scanned: 0, holds: 0, not_applicable: 0, counterexamples: Vec::new() };
    let mut tuple = vec![first];
    loop {
        if tuple.len() == n {
            let vectors: Vec<ProductVector> =
                tuple.iter().map(|&i| candidates[i].clone()).collect();
            let s = ProductVectorSet::new(sig.clone(), vectors)?;
            let v = verdict_for(target, &s, budget)?;
            out.scanned += 1;
            match v.status {
                VerdictStatus::Holds => out.holds += 1,
                VerdictStatus::NotApplicable => out.not_applicable += 1,
                VerdictStatus::Counterexample => out.counterexamples.push((s, v)),
            }
        } else {
            tuple.push(*tuple.last().expect("nonempty tuple"));
            continue;
        }
        // Odometer step over nondecreasing tuples with fixed head.
        loop {
            let last = tuple.pop().expect("tuple holds the head");
            if tuple.is_empty() {
                return Ok(out);
            }
            if last + 1 < candidates.len() {
                tuple.push(last + 1);
                break;
            }
        }
    }
}

fn run_search(
    space: &SearchSpace,
    target: SearchTarget,
    budget: u64,
    parallel: bool,
) -> Result<SearchReport> {
    let work = space.candidate_count()?;
    if work > budget as u128 {
        return Err(Error::BudgetExceeded(work, budget));
    }
    let mut report = SearchReport {
        target,
        scanned: 0,
        holds: 0,
        not_applicable: 0,
        counterexamples: Vec::new(),
    };
    for m in space.m_range.0..=space.m_range.1 {
        let sig = space.signature(m)?;
        let candidates = enumerate_product_vectors(&sig, budget)?;
        let admissible: Vec<bool> = if space.symmetry.fix_first_vector_orbit {
            candidates.iter().map(orbit_least).collect()
        } else {
            vec![true; candidates.len()]
        };
        for n in space.n_range.0..=space.n_range.1 {
            let shards = run_indexed(candidates.len(), parallel, |first| {
                if !admissible[first] {
                    return Ok(ShardOutcome {
                        scanned: 0,
                        holds: 0,
                        not_applicable: 0,
                        counterexamples: Vec::new(),
                    });
                }
                sweep_shard(target, &candidates, &sig, n, first, budget)
            });
            for shard in shards {
                let shard = shard?;
                report.scanned += shard.scanned;
                report.holds += shard.holds;
                report.not_applicable += shard.not_applicable;
                report.counterexamples.extend(shard.counterexamples);
            }
        }
    }
    Ok(report)
}

/// Sweep the space and report; shards run on the rayon pool when the
/// `parallel` feature is enabled.
pub fn search_counterexamples(
    space: &SearchSpace,
    target: SearchTarget,
    budget: u64,
) -> Result<SearchReport> {
    run_search(space, target, budget, true)
}

/// Sequential twin of [`search_counterexamples`]; same report, one thread.
pub fn search_counterexamples_seq(
    space: &SearchSpace,
    target: SearchTarget,
    budget: u64,
) -> Result<SearchReport> {
    run_search(space, target, budget, false)
}
