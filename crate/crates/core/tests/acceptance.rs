//! The acceptance gate. One test per criterion; each prints a single
//! `acceptance <name>: pass|FAIL` line (visible with `--nocapture`) and
//! fails the build on any discrepancy. Everything is exact, so "agree"
//! always means equality, never closeness.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use ranklab::error::Error;
use ranklab::kruskal::{BipartiteVerdict, GammaRankPrediction};
use ranklab::oracle::RankMethod;
use ranklab::zerosum::ChainOrigin;
use ranklab::{
    bipartite_nonzero_check, build_chain, certify_uniqueness, check_lemma_conditions,
    classify_gamma_rank, enumerate_product_vectors, is_irreducible, kruskal_rank,
    nonparallel_mode_bound_check, product_sum_pair, reduction_pairing, search_counterexamples,
    tensor_rank, tight_example, unique_decomposition_check, verify_conjecture_instance,
    ChainProblem, DecompositionUniqueness, DenseTensor, FieldSpec, Matrix, ModeSignature, PairSum,
    PairingOutcome, ProductVector, ProductVectorSet, Scalar, SearchSpace, SearchTarget,
    SymmetryOptions, VerdictStatus, DEFAULT_BUDGET,
};

use common::{pv, random_set, rng, set};

const Q: FieldSpec = FieldSpec::Rationals;
const F2: FieldSpec = FieldSpec::PrimeField(2);
const F3: FieldSpec = FieldSpec::PrimeField(3);
const F5: FieldSpec = FieldSpec::PrimeField(5);

macro_rules! ensure {
    ($cond:expr, $($why:tt)+) => {
        if !$cond {
            return Err(format!($($why)+));
        }
    };
}

fn report(name: &str, outcome: Result<(), String>) {
    match &outcome {
        Ok(()) => println!("acceptance {name}: pass"),
        Err(why) => println!("acceptance {name}: FAIL ({why})"),
    }
    if let Err(why) = outcome {
        panic!("acceptance {name}: {why}");
    }
}

#[test]
fn c01_tightness_family() {
    report(
        "01 tightness-family",
        (|| {
            let start = Instant::now();
            for field in [Q, F2, F3] {
                for n in 3..=8 {
                    let t = tight_example(n, field).map_err(|e| e.to_string())?;
                    ensure!(t.len() == n, "{field:?} n={n}: wrong size {}", t.len());
                    ensure!(
                        t.signature().mode_count() == n - 2,
                        "{field:?} n={n}: m={} is not n-2",
                        t.signature().mode_count()
                    );
                    ensure!(t.sum_all().is_zero(), "{field:?} n={n}: total sum is nonzero");
                    ensure!(
                        t.span_dims().iter().all(|&d| d == 2),
                        "{field:?} n={n}: span dims {:?} are not all 2",
                        t.span_dims()
                    );
                    let irreducible = is_irreducible(&t).map_err(|e| e.to_string())?;
                    ensure!(irreducible, "{field:?} n={n}: a strict subset sums to zero");
                }
            }
            let elapsed = start.elapsed();
            ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}, expected < 1 s");
            Ok(())
        })(),
    );
}

fn all_two_dims_space() -> SearchSpace {
    SearchSpace::new(F2, vec![2, 2, 2], (1, 3), (2, 5), SymmetryOptions::default()).unwrap()
}

#[test]
fn c02_two_dim_case_sweep() {
    report(
        "02 two-dim-case-sweep",
        (|| {
            let start = Instant::now();
            let space = all_two_dims_space();
            let r = search_counterexamples(&space, SearchTarget::TwoDim, DEFAULT_BUDGET)
                .map_err(|e| e.to_string())?;
            ensure!(r.scanned > 0, "nothing scanned");
            ensure!(
                r.counterexamples.is_empty(),
                "{} counterexamples, first instance has n={}",
                r.counterexamples.len(),
                r.counterexamples[0].0.len()
            );
            let elapsed = start.elapsed();
            ensure!(elapsed.as_secs() < 300, "took {elapsed:?}, expected < 5 min");
            Ok(())
        })(),
    );
}

#[test]
fn c03_subset_statement_sweep() {
    report(
        "03 subset-statement-sweep",
        (|| {
            let start = Instant::now();
            let space = all_two_dims_space();
            let r = search_counterexamples(&space, SearchTarget::Subset, DEFAULT_BUDGET)
                .map_err(|e| e.to_string())?;
            ensure!(r.counterexamples.is_empty(), "{} counterexamples", r.counterexamples.len());
            ensure!(r.holds >= 1, "no instance in the sweep satisfied the premises");

            // The cancelling-pairs instance must hold with an explicit subset.
            let pairs = set(
                F2,
                &[
                    &[&[1, 0], &[1, 0], &[1, 0]],
                    &[&[1, 0], &[1, 0], &[1, 0]],
                    &[&[0, 1], &[0, 1], &[0, 1]],
                    &[&[0, 1], &[0, 1], &[0, 1]],
                ],
            );
            let v = verify_conjecture_instance(&pairs).map_err(|e| e.to_string())?;
            ensure!(v.status == VerdictStatus::Holds, "pairs instance: {:?}", v.status);
            ensure!(
                v.subset_witness == Some(vec![0, 1]),
                "pairs instance witness {:?}",
                v.subset_witness
            );
            let elapsed = start.elapsed();
            ensure!(elapsed.as_secs() < 300, "took {elapsed:?}, expected < 5 min");
            Ok(())
        })(),
    );
}

#[test]
fn c04_kruskal_desk_check() {
    report(
        "04 kruskal-desk-check",
        (|| {
            let start = Instant::now();
            let sig = ModeSignature::new(F2, vec![2, 2, 2]).unwrap();
            let products =
                enumerate_product_vectors(&sig, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            ensure!(products.len() == 27, "expected 27 product vectors, got {}", products.len());

            let mut checked = 0usize;
            for i in 0..products.len() {
                for j in i + 1..products.len() {
                    let s = ProductVectorSet::new(
                        sig.clone(),
                        vec![products[i].clone(), products[j].clone()],
                    )
                    .unwrap();
                    if (0..3).any(|mode| kruskal_rank(&s, mode) != 2) {
                        continue;
                    }
                    checked += 1;
                    let cert = certify_uniqueness(&s).map_err(|e| e.to_string())?;
                    ensure!(
                        cert.certified,
                        "pair ({i},{j}) with all Kruskal ranks 2 was not certified"
                    );
                    let total = s.sum_all();
                    match unique_decomposition_check(&total, 2, DEFAULT_BUDGET)
                        .map_err(|e| format!("pair ({i},{j}): {e}"))?
                    {
                        DecompositionUniqueness::Unique { decomposition } => {
                            let mut mine = s.vectors().to_vec();
                            mine.sort();
                            ensure!(
                                decomposition == mine,
                                "pair ({i},{j}): the unique decomposition is a different one"
                            );
                        }
                        DecompositionUniqueness::Multiple { decompositions } => {
                            ensure!(
                                false,
                                "pair ({i},{j}) certified but has {} decompositions",
                                decompositions.len()
                            );
                        }
                    }
                }
            }
            // 27 choices, then 2 per mode that stay independent: 27*8/2 pairs.
            ensure!(checked == 108, "expected 108 qualifying pairs, saw {checked}");
            let elapsed = start.elapsed();
            ensure!(elapsed.as_secs() < 60, "took {elapsed:?}, expected < 1 min");
            Ok(())
        })(),
    );
}

#[test]
fn c05_gamma_rank_desk_check() {
    report(
        "05 gamma-rank-desk-check",
        (|| {
            for field in [Q, F3] {
                let s = set(
                    field,
                    &[
                        &[&[1, 0], &[1, 0], &[1, 0]],
                        &[&[0, 1], &[0, 1], &[0, 1]],
                        &[&[1, 1], &[1, 1], &[1, 1]],
                    ],
                );
                for bits in 0u8..8 {
                    let subset: Vec<usize> = (0..3).filter(|a| bits & (1 << a) != 0).collect();
                    let mut sum = DenseTensor::zero(s.signature().clone());
                    for &a in &subset {
                        sum = sum.add(&s.vector(a).expand()).unwrap();
                    }
                    for r in 0..=1usize {
                        let predicted =
                            match classify_gamma_rank(&s, &subset, r).map_err(|e| e.to_string())? {
                                GammaRankPrediction::ExactRank(_) => true,
                                GammaRankPrediction::ExcludedRank(_) => false,
                                GammaRankPrediction::NotApplicable { needed, available } => {
                                    ensure!(
                                        false,
                                        "{field:?} subset {subset:?} r={r}: classifier begged off \
                                 (needs {needed}, has {available})"
                                    );
                                    unreachable!()
                                }
                            };
                        // Ranks 0 and 1 are flattening questions, exact over any
                        // field, so the oracle can referee both ground fields.
                        let actual = if r == 0 {
                            sum.is_zero()
                        } else {
                            match tensor_rank(&sum, 1, DEFAULT_BUDGET) {
                                Ok(rr) => rr.rank == 1,
                                Err(Error::RankExceedsBound { .. }) => false,
                                Err(e) => return Err(e.to_string()),
                            }
                        };
                        ensure!(
                            predicted == actual,
                            "{field:?} subset {subset:?}: predicted rank-{r} = {predicted}, \
                         oracle says {actual}"
                        );
                    }
                }
            }

            // Over F_3 the oracle can also pin the exact ranks; the predictions
            // for |subset| = r must match them all the way up.
            let s = set(
                F3,
                &[
                    &[&[1, 0], &[1, 0], &[1, 0]],
                    &[&[0, 1], &[0, 1], &[0, 1]],
                    &[&[1, 1], &[1, 1], &[1, 1]],
                ],
            );
            for bits in 0u8..8 {
                let subset: Vec<usize> = (0..3).filter(|a| bits & (1 << a) != 0).collect();
                let mut sum = DenseTensor::zero(s.signature().clone());
                for &a in &subset {
                    sum = sum.add(&s.vector(a).expand()).unwrap();
                }
                let actual = tensor_rank(&sum, 3, DEFAULT_BUDGET).map_err(|e| e.to_string())?.rank;
                ensure!(
                    actual == subset.len(),
                    "F_3 subset {subset:?} has rank {actual}, not {}",
                    subset.len()
                );
            }
            Ok(())
        })(),
    );
}

#[test]
fn c06_chain_construction() {
    report(
        "06 chain-construction",
        (|| {
            let mut r = rng(0x6c33);
            let mut accepted = 0usize;
            let mut attempts = 0usize;
            while accepted < 200 {
                attempts += 1;
                ensure!(attempts < 20_000, "generator stalled after {attempts} attempts");
                let n = r.gen_range(3..=10);
                let problem = ChainProblem::new(
                    n,
                    common::random_partition(&mut r, n, 4),
                    common::random_partition(&mut r, n, 4),
                )
                .map_err(|e| e.to_string())?;
                if check_lemma_conditions(&problem) != ranklab::LemmaCheck::Ok {
                    continue;
                }
                accepted += 1;
                let chain = match build_chain(&problem) {
                    Ok(c) => c,
                    Err(Error::Stalled) => {
                        ensure!(false, "attempt {attempts}: chain stalled on {problem:?}");
                        unreachable!()
                    }
                    Err(e) => return Err(e.to_string()),
                };

                // Every block of both families appears exactly once.
                let key = |origin: ChainOrigin, b: &[usize]| -> (u8, Vec<usize>) {
                    (if origin == ChainOrigin::S { 0 } else { 1 }, b.to_vec())
                };
                let mut expected: Vec<(u8, Vec<usize>)> = problem
                    .s_blocks()
                    .iter()
                    .map(|b| key(ChainOrigin::S, b))
                    .chain(problem.t_blocks().iter().map(|b| key(ChainOrigin::T, b)))
                    .collect();
                let mut actual: Vec<(u8, Vec<usize>)> =
                    chain.links.iter().map(|l| key(l.origin, &l.indices)).collect();
                expected.sort();
                actual.sort();
                ensure!(expected == actual, "attempt {attempts}: blocks used {actual:?}");

                // Cover and overlapping-prefix invariants.
                let mut seen: BTreeSet<usize> = chain.links[0].indices.iter().copied().collect();
                for link in &chain.links[1..] {
                    ensure!(
                        link.indices.iter().any(|i| seen.contains(i)),
                        "attempt {attempts}: link {link:?} misses the prefix"
                    );
                    seen.extend(link.indices.iter().copied());
                }
                ensure!(
                    seen == (0..n).collect::<BTreeSet<_>>(),
                    "attempt {attempts}: chain covers {seen:?}, not 0..{n}"
                );
            }
            Ok(())
        })(),
    );
}

#[test]
fn c07_product_pair_equivalence() {
    report(
        "07 product-pair-equivalence",
        (|| {
            let start = Instant::now();
            let sig = ModeSignature::new(F2, vec![2, 2, 2]).unwrap();
            let products =
                enumerate_product_vectors(&sig, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            let one = Scalar::one(F2);
            for (i, x1) in products.iter().enumerate() {
                for (j, x2) in products.iter().enumerate() {
                    let cls = product_sum_pair(x1, x2, &one, &one).map_err(|e| e.to_string())?;
                    let sum = x1.expand().add(&x2.expand()).unwrap();
                    let oracle_rank = if sum.is_zero() {
                        0
                    } else {
                        match tensor_rank(&sum, 2, DEFAULT_BUDGET) {
                            Ok(rr) => rr.rank,
                            Err(e) => return Err(format!("pair ({i},{j}): {e}")),
                        }
                    };
                    let nonparallel = (0..3)
                        .filter(|&mode| {
                            let rows = vec![x1.factor(mode).to_vec(), x2.factor(mode).to_vec()];
                            Matrix::from_rows(F2, &rows).rank() > 1
                        })
                        .count();
                    match &cls {
                        PairSum::Zero => {
                            ensure!(oracle_rank == 0, "pair ({i},{j}): zero vs rank {oracle_rank}")
                        }
                        PairSum::Product(w) => {
                            ensure!(
                                oracle_rank == 1,
                                "pair ({i},{j}): product vs rank {oracle_rank}"
                            );
                            ensure!(w.expand() == sum, "pair ({i},{j}): wrong product form");
                        }
                        PairSum::Entangled => {
                            ensure!(
                                oracle_rank == 2,
                                "pair ({i},{j}): entangled vs rank {oracle_rank}"
                            )
                        }
                    }
                    // The structural criterion: a product (or zero) sum happens
                    // exactly when at most one mode is non-parallel.
                    let is_low = !matches!(cls, PairSum::Entangled);
                    ensure!(
                        is_low == (nonparallel <= 1),
                        "pair ({i},{j}): {nonparallel} non-parallel modes vs {cls:?}"
                    );
                }
            }
            let elapsed = start.elapsed();
            ensure!(elapsed.as_secs() < 60, "took {elapsed:?}, expected < 1 min");
            Ok(())
        })(),
    );
}

#[test]
fn c08_nonparallel_mode_bound() {
    report(
        "08 nonparallel-mode-bound",
        (|| {
            let sig = ModeSignature::new(F2, vec![2, 2, 2]).unwrap();
            let products =
                enumerate_product_vectors(&sig, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            let one = Scalar::one(F2);
            let mut qualifying = 0usize;
            for (i, x1) in products.iter().enumerate() {
                for (j, x2) in products.iter().enumerate() {
                    let independent = {
                        let rows =
                            vec![x1.expand().entries().to_vec(), x2.expand().entries().to_vec()];
                        Matrix::from_rows(F2, &rows).rank() == 2
                    };
                    if !independent {
                        continue;
                    }
                    let cls = product_sum_pair(x1, x2, &one, &one).map_err(|e| e.to_string())?;
                    if !matches!(cls, PairSum::Product(_)) {
                        continue;
                    }
                    qualifying += 1;
                    let s =
                        ProductVectorSet::new(sig.clone(), vec![x1.clone(), x2.clone()]).unwrap();
                    match nonparallel_mode_bound_check(&s, &[one.clone(), one.clone()]) {
                        Ok(count) => {
                            ensure!(count <= 1, "pair ({i},{j}): {count} non-parallel modes")
                        }
                        Err(Error::ContradictionDetected(why)) => {
                            ensure!(false, "pair ({i},{j}): contradiction: {why}");
                        }
                        Err(e) => return Err(format!("pair ({i},{j}): {e}")),
                    }
                }
            }
            ensure!(qualifying > 0, "no independent product-sum pairs found");
            Ok(())
        })(),
    );
}

#[test]
fn c09_bipartite_nonzero() {
    report(
        "09 bipartite-nonzero",
        (|| {
            let mut r = rng(0xb1b2);
            let fields = [F2, F3, F5, Q];
            let mut accepted = 0usize;
            let mut attempts = 0usize;
            while accepted < 1000 {
                attempts += 1;
                ensure!(attempts < 100_000, "generator stalled after {attempts} attempts");
                let field = fields[attempts % fields.len()];
                let d1 = r.gen_range(2..=4);
                let d2 = r.gen_range(2..=4);
                let n = r.gen_range(1..=5);
                let sig = ModeSignature::new(field, vec![d1, d2]).unwrap();
                let s = random_set(&mut r, &sig, n);
                let spans = s.span_dims();
                if n + 1 > spans[0] + spans[1] {
                    continue;
                }
                accepted += 1;
                match bipartite_nonzero_check(&s, (spans[0], spans[1])) {
                    Ok(BipartiteVerdict::NonzeroConfirmed) => {}
                    Ok(BipartiteVerdict::PremiseFailed { reason }) => {
                        ensure!(false, "attempt {attempts}: premise refused: {reason}");
                    }
                    Err(e) => {
                        ensure!(false, "attempt {attempts}: a sum vanished: {e}");
                    }
                }
            }
            Ok(())
        })(),
    );
}

#[test]
fn c10_reduction_pairing() {
    report(
        "10 reduction-pairing",
        (|| {
            let mut r = rng(0x9a1e);
            for round in 0..50usize {
                let (field, dim, n) = match round % 3 {
                    0 => (F2, 2, 2),
                    1 => (F3, 2, 2),
                    _ => (F3, 3, 3),
                };
                let sig = ModeSignature::new(field, vec![dim, dim, dim]).unwrap();
                // Per mode, n factors forming an independent family, so that
                // every Kruskal rank is n and the decomposition is certifiably
                // unique.
                let mut factors_by_mode: Vec<Vec<Vec<Scalar>>> = Vec::new();
                for _ in 0..3 {
                    loop {
                        let family: Vec<Vec<Scalar>> = (0..n)
                            .map(|_| common::random_nonzero_vector(&mut r, field, dim))
                            .collect();
                        if Matrix::from_rows(field, &family).rank() == n {
                            factors_by_mode.push(family);
                            break;
                        }
                    }
                }
                let xs_vectors: Vec<ProductVector> = (0..n)
                    .map(|a| {
                        ProductVector::new(
                            sig.clone(),
                            (0..3).map(|j| factors_by_mode[j][a].clone()).collect(),
                        )
                        .unwrap()
                    })
                    .collect();
                let xs = ProductVectorSet::new(sig.clone(), xs_vectors).unwrap();
                let cert = certify_uniqueness(&xs).map_err(|e| e.to_string())?;
                ensure!(cert.certified, "round {round}: instance fell out of the regime");

                // ys: a shuffled copy, with each vector regauged by scalings of
                // product one. The pairing must land back on the shuffle.
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut r);
                let ys_vectors: Vec<ProductVector> = order
                    .iter()
                    .map(|&a| {
                        let mut factors = xs.vector(a).factors().to_vec();
                        let c = Scalar::from_integer(
                            field,
                            r.gen_range(1..field.order().unwrap()) as i64,
                        );
                        for x in factors[0].iter_mut() {
                            *x = x.mul(&c);
                        }
                        let c_inv = c.inv();
                        for x in factors[1].iter_mut() {
                            *x = x.mul(&c_inv);
                        }
                        ProductVector::new(sig.clone(), factors).unwrap()
                    })
                    .collect();
                let ys = ProductVectorSet::new(sig.clone(), ys_vectors).unwrap();

                match reduction_pairing(&xs, &ys).map_err(|e| e.to_string())? {
                    PairingOutcome::Pairing(sigma) => {
                        for (a, &b) in sigma.iter().enumerate() {
                            ensure!(
                                xs.vector(a) == ys.vector(b),
                                "round {round}: sigma[{a}] = {b} does not match"
                            );
                        }
                    }
                    PairingOutcome::Obstruction(p) => {
                        ensure!(false, "round {round}: unexpected obstruction {p:?}");
                    }
                }
            }

            // The two decompositions of the bipartite identity do not pair up;
            // the obstruction is one irreducible block of all four vectors.
            let xs = set(F2, &[&[&[1, 0], &[1, 0]], &[&[0, 1], &[0, 1]]]);
            let ys = set(F2, &[&[&[0, 1], &[1, 1]], &[&[1, 1], &[1, 0]]]);
            ensure!(xs.sum_all() == ys.sum_all(), "the two decompositions differ in sum");
            match reduction_pairing(&xs, &ys).map_err(|e| e.to_string())? {
                PairingOutcome::Obstruction(p) => {
                    ensure!(
                        p.blocks().iter().any(|b| b.len() >= 4),
                        "obstruction blocks {:?} are all small",
                        p.blocks()
                    );
                }
                PairingOutcome::Pairing(sigma) => {
                    ensure!(false, "inequivalent decompositions paired as {sigma:?}");
                }
            }
            Ok(())
        })(),
    );
}

// Keep the oracle's method tags honest in one visible place: rank 0/1 come
// from flattenings, higher ranks from the exhaustive sweep.
#[test]
fn oracle_method_tags() {
    let zero = DenseTensor::zero(ModeSignature::new(F2, vec![2, 2]).unwrap());
    assert_eq!(
        tensor_rank(&zero, 0, DEFAULT_BUDGET).unwrap().method,
        RankMethod::FlatteningBoundMet
    );
    let w = pv(F2, &[&[1, 0], &[1, 1]]);
    assert_eq!(
        tensor_rank(&w.expand(), 1, DEFAULT_BUDGET).unwrap().method,
        RankMethod::FlatteningBoundMet
    );
    let id = w.expand().add(&pv(F2, &[&[0, 1], &[1, 0]]).expand()).unwrap();
    assert_eq!(tensor_rank(&id, 2, DEFAULT_BUDGET).unwrap().method, RankMethod::Exhaustive);
}
