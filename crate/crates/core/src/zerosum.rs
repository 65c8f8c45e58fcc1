//! Zero-sum subset combinatorics: exhaustive subset scans, greedy minimal
//! partitions, irreducibility, and the chain covers built from two block
//! families with no common proper sub-union.
//!
//! Subsets are ordered by (size, lexicographic index list) everywhere, and
//! every exhaustive scan is a Gray-code walk over bitmasks, sharded into
//! ranges when running on the thread pool.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::exec::run_indexed;
use crate::tensor::{DenseTensor, ProductVectorSet};

pub const MAX_SUBSET_VECTORS: usize = 24;

fn subset_indices(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask & (1 << i) != 0).collect()
}

fn subset_order(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// All masks whose subset sums vanish, found by a Gray-code walk that keeps
/// one running sum per shard. Includes the full mask when the total is zero.
fn zero_sum_masks(set: &ProductVectorSet, parallel: bool) -> Result<Vec<u32>> {
    let n = set.len();
    if n > MAX_SUBSET_VECTORS {
        return Err(Error::TooManyVectors(n));
    }
    let tensors = set.expanded();
    let total: u64 = 1 << n;
    let chunk: u64 = (total / 64).max(4096);
    let shards = total.div_ceil(chunk) as usize;
    let scan_shard = |shard: usize| -> Vec<u32> {
        let lo = shard as u64 * chunk;
        let hi = (lo + chunk).min(total);
        let mut hits = Vec::new();
        let mut mask = (lo ^ (lo >> 1)) as u32;
        let mut sum = DenseTensor::zero(set.signature().clone());
        for (i, t) in tensors.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum.add_assign(t);
            }
        }
        if mask != 0 && sum.is_zero() {
            hits.push(mask);
        }
        for pos in lo + 1..hi {
            let bit = pos.trailing_zeros();
            mask = (pos ^ (pos >> 1)) as u32;
            if mask & (1 << bit) != 0 {
                sum.add_assign(&tensors[bit as usize]);
            } else {
                sum.sub_assign(&tensors[bit as usize]);
            }
            if mask != 0 && sum.is_zero() {
                hits.push(mask);
            }
        }
        hits
    };
    Ok(run_indexed(shards, parallel, scan_shard).into_iter().flatten().collect())
}

fn zero_sum_subsets_impl(set: &ProductVectorSet, parallel: bool) -> Result<Vec<Vec<usize>>> {
    let n = set.len();
    let mut subsets: Vec<Vec<usize>> =
        zero_sum_masks(set, parallel)?.into_iter().map(|mask| subset_indices(mask, n)).collect();
    subsets.sort_by(|a, b| subset_order(a, b));
    Ok(subsets)
}

/// Every nonempty subset with a vanishing sum, ordered by
/// (size, lexicographic index list). Zero-based indices.
pub fn zero_sum_subsets(set: &ProductVectorSet) -> Result<Vec<Vec<usize>>> {
    zero_sum_subsets_impl(set, true)
}

/// Single-threaded reference path of [`zero_sum_subsets`].
pub fn zero_sum_subsets_seq(set: &ProductVectorSet) -> Result<Vec<Vec<usize>>> {
    zero_sum_subsets_impl(set, false)
}

/// Disjoint blocks covering 0..n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::NotAPartition("empty block".into()));
            }
            for &i in block {
                if i >= n {
                    return Err(Error::NotAPartition(format!("index {} exceeds n = {n}", i + 1)));
                }
                if seen[i] {
                    return Err(Error::NotAPartition(format!("index {} repeated", i + 1)));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::NotAPartition(format!("index {} missing", missing + 1)));
        }
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Ok(Partition { n, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

/// Greedy minimal zero partition: repeatedly remove the (size, lex)-smallest
/// zero-sum subset of what remains. Smallest-first makes every block free of
/// proper zero-sum subsets.
pub fn minimal_zero_partition(set: &ProductVectorSet) -> Result<Partition> {
    let n = set.len();
    if n > MAX_SUBSET_VECTORS {
        return Err(Error::TooManyVectors(n));
    }
    if !set.sum_all().is_zero() {
        return Err(Error::NonzeroTotalSum);
    }
    let tensors = set.expanded();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut blocks = Vec::new();
    while !remaining.is_empty() {
        let mut found: Option<Vec<usize>> = None;
        'sizes: for k in 1..=remaining.len() {
            for combo in remaining.iter().copied().combinations(k) {
                let mut sum = DenseTensor::zero(set.signature().clone());
                for &i in &combo {
                    sum.add_assign(&tensors[i]);
                }
                if sum.is_zero() {
                    found = Some(combo);
                    break 'sizes;
                }
            }
        }
        let block = found.expect("the remaining indices sum to zero");
        remaining.retain(|i| !block.contains(i));
        blocks.push(block);
    }
    Partition::new(n, blocks)
}

/// True when no nonempty proper subset sums to zero. Computed twice, as the
/// full scan and as the half-size scan justified by complementation, and the
/// two answers are asserted equal.
pub fn is_irreducible(set: &ProductVectorSet) -> Result<bool> {
    let n = set.len();
    if n > MAX_SUBSET_VECTORS {
        return Err(Error::TooManyVectors(n));
    }
    if !set.sum_all().is_zero() {
        return Err(Error::NonzeroTotalSum);
    }
    let full: u32 = ((1u64 << n) - 1) as u32;
    let masks = zero_sum_masks(set, true)?;
    let full_scan = !masks.iter().any(|&m| m != full);
    let half_scan = !masks.iter().any(|&m| m != full && (m.count_ones() as usize) <= n / 2);
    assert_eq!(full_scan, half_scan, "complementation argument violated");
    Ok(full_scan)
}

/// Two block families over a common index range, each partitioning it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainProblem {
    n: usize,
    s_blocks: Vec<Vec<usize>>,
    t_blocks: Vec<Vec<usize>>,
}

impl ChainProblem {
    pub fn new(n: usize, s_blocks: Vec<Vec<usize>>, t_blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("the index range is empty".into()));
        }
        if n > MAX_SUBSET_VECTORS {
            return Err(Error::TooManyVectors(n));
        }
        let s = Partition::new(n, s_blocks)
            .map_err(|e| Error::NotAPartition(format!("first family: {e}")))?;
        let t = Partition::new(n, t_blocks)
            .map_err(|e| Error::NotAPartition(format!("second family: {e}")))?;
        Ok(ChainProblem { n, s_blocks: s.blocks().to_vec(), t_blocks: t.blocks().to_vec() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s_blocks(&self) -> &[Vec<usize>] {
        &self.s_blocks
    }

    pub fn t_blocks(&self) -> &[Vec<usize>] {
        &self.t_blocks
    }

    fn masks(blocks: &[Vec<usize>]) -> Vec<u32> {
        blocks.iter().map(|b| b.iter().fold(0u32, |m, &i| m | (1 << i))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LemmaCheck {
    Ok,
    /// A common proper sub-union: the named S-blocks and T-blocks both
    /// union to `union`. All indices zero-based.
    Violation {
        s_subfamily: Vec<usize>,
        t_subfamily: Vec<usize>,
        union: Vec<usize>,
    },
}

/// Check that no proper nonempty subfamily of the S-blocks unions to the
/// same set as some subfamily of the T-blocks.
pub fn check_lemma_conditions(problem: &ChainProblem) -> LemmaCheck {
    let s_masks = ChainProblem::masks(&problem.s_blocks);
    let t_masks = ChainProblem::masks(&problem.t_blocks);
    let s = s_masks.len();
    for choice in 1..(1u64 << s) - 1 {
        let mut union = 0u32;
        for (p, &mask) in s_masks.iter().enumerate() {
            if choice & (1 << p) != 0 {
                union |= mask;
            }
        }
        let mut t_subfamily = Vec::new();
        let mut t_union = 0u32;
        for (q, &mask) in t_masks.iter().enumerate() {
            if mask & union == mask {
                t_subfamily.push(q);
                t_union |= mask;
            }
        }
        if t_union == union {
            return LemmaCheck::Violation {
                s_subfamily: (0..s).filter(|&p| choice & (1 << p) != 0).collect(),
                t_subfamily,
                union: subset_indices(union, problem.n),
            };
        }
    }
    LemmaCheck::Ok
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainOrigin {
    S,
    T,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLink {
    pub origin: ChainOrigin,
    pub indices: Vec<usize>,
}

/// Blocks listed so that each one meets the union of its predecessors, with
/// the whole sequence covering the index range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub links: Vec<ChainLink>,
}

/// Deterministic chain construction. Start from the S-block containing index
/// 0; repeatedly append the unused block that intersects the running union,
/// choosing the smallest minimum element and S before T on ties. When the
/// conditions of [`check_lemma_conditions`] hold this covers everything;
/// stopping short would contradict the lemma and reports `Stalled`.
pub fn build_chain(problem: &ChainProblem) -> Result<Chain> {
    if check_lemma_conditions(problem) != LemmaCheck::Ok {
        return Err(Error::ConditionsViolated);
    }
    struct Block<'a> {
        origin: ChainOrigin,
        mask: u32,
        min: usize,
        indices: &'a [usize],
        used: bool,
    }
    let mut blocks: Vec<Block> = Vec::new();
    for (family, origin) in
        [(&problem.s_blocks, ChainOrigin::S), (&problem.t_blocks, ChainOrigin::T)]
    {
        for b in family.iter() {
            blocks.push(Block {
                origin,
                mask: b.iter().fold(0u32, |m, &i| m | (1 << i)),
                min: b[0],
                indices: b,
                used: false,
            });
        }
    }
    let first = blocks
        .iter()
        .position(|b| b.origin == ChainOrigin::S && b.mask & 1 != 0)
        .expect("some S-block contains index 0");
    blocks[first].used = true;
    let mut union = blocks[first].mask;
    let mut links =
        vec![ChainLink { origin: ChainOrigin::S, indices: blocks[first].indices.to_vec() }];
    loop {
        let next = blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.used && b.mask & union != 0)
            .min_by_key(|(_, b)| (b.min, b.origin == ChainOrigin::T))
            .map(|(i, _)| i);
        let Some(i) = next else { break };
        blocks[i].used = true;
        union |= blocks[i].mask;
        links.push(ChainLink { origin: blocks[i].origin, indices: blocks[i].indices.to_vec() });
    }
    let full: u32 = ((1u64 << problem.n) - 1) as u32;
    if union != full {
        return Err(Error::Stalled);
    }
    debug_assert!(links.len() >= 2);
    Ok(Chain { links })
}
