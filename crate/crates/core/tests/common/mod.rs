//! Builders and seeded generators shared by the integration suites.
// Each test binary compiles its own copy and uses its own subset.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ranklab::{FieldSpec, ModeSignature, ProductVector, ProductVectorSet, Scalar};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ints(field: FieldSpec, entries: &[i64]) -> Vec<Scalar> {
    entries.iter().map(|&n| Scalar::from_integer(field, n)).collect()
}

pub fn pv(field: FieldSpec, factors: &[&[i64]]) -> ProductVector {
    let dims: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let signature = ModeSignature::new(field, dims).unwrap();
    let factors = factors.iter().map(|f| ints(field, f)).collect();
    ProductVector::new(signature, factors).unwrap()
}

pub fn set(field: FieldSpec, vectors: &[&[&[i64]]]) -> ProductVectorSet {
    let pvs: Vec<ProductVector> = vectors.iter().map(|v| pv(field, v)).collect();
    ProductVectorSet::new(pvs[0].signature().clone(), pvs).unwrap()
}

/// A uniformly random scalar; rationals draw small numerators and
/// denominators so instances stay readable in failure output.
pub fn random_scalar(rng: &mut ChaCha8Rng, field: FieldSpec) -> Scalar {
    match field {
        FieldSpec::PrimeField(p) => Scalar::from_integer(field, rng.gen_range(0..p) as i64),
        FieldSpec::Rationals => {
            let num = rng.gen_range(-4..=4);
            let den = rng.gen_range(1..=4);
            Scalar::parse(field, &format!("{num}/{den}")).unwrap()
        }
    }
}

pub fn random_nonzero_vector(rng: &mut ChaCha8Rng, field: FieldSpec, dim: usize) -> Vec<Scalar> {
    loop {
        let v: Vec<Scalar> = (0..dim).map(|_| random_scalar(rng, field)).collect();
        if v.iter().any(|a| !a.is_zero()) {
            return v;
        }
    }
}

pub fn random_product_vector(rng: &mut ChaCha8Rng, signature: &ModeSignature) -> ProductVector {
    let factors = signature
        .dims()
        .iter()
        .map(|&d| random_nonzero_vector(rng, signature.field(), d))
        .collect();
    ProductVector::new(signature.clone(), factors).unwrap()
}

pub fn random_set(rng: &mut ChaCha8Rng, signature: &ModeSignature, n: usize) -> ProductVectorSet {
    let vectors = (0..n).map(|_| random_product_vector(rng, signature)).collect();
    ProductVectorSet::new(signature.clone(), vectors).unwrap()
}

/// A uniformly assigned partition of 0..n into at most `max_blocks` blocks,
/// with empty blocks dropped.
pub fn random_partition(rng: &mut ChaCha8Rng, n: usize, max_blocks: usize) -> Vec<Vec<usize>> {
    let k = rng.gen_range(1..=max_blocks);
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); k];
    for i in 0..n {
        blocks[rng.gen_range(0..k)].push(i);
    }
    blocks.retain(|b| !b.is_empty());
    blocks
}
