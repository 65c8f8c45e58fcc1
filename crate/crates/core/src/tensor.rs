//! Product vectors, dense tensors and the structural operations connecting
//! them: expansion, subset sums, unfoldings, mode removal and span profiles.
//!
//! A product vector x = x_1 ⊗ ... ⊗ x_m is stored in a canonical form: in
//! every mode after the first the leading nonzero entry is 1, and the
//! aggregate scalar is folded into the first factor. Two product vectors are
//! equal as tensors exactly when their canonical forms are equal, which makes
//! structural equality, ordering and hashing meaningful.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{FieldSpec, Scalar};

pub const MAX_DENSE_ENTRIES: usize = 1 << 20;

/// Shape and field of a tensor space: m >= 1 modes, every dimension >= 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeSignature {
    field: FieldSpec,
    dims: Vec<usize>,
}

impl ModeSignature {
    pub fn new(field: FieldSpec, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("a tensor needs at least one mode".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidArgument("every mode dimension must be >= 1".into()));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total.checked_mul(d).ok_or(Error::TensorTooLarge)?;
            if total > MAX_DENSE_ENTRIES {
                return Err(Error::TensorTooLarge);
            }
        }
        Ok(ModeSignature { field, dims })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn mode_count(&self) -> usize {
        self.dims.len()
    }

    pub fn entry_count(&self) -> usize {
        self.dims.iter().product()
    }

    /// Signature with mode `j` removed; errors when only one mode is left.
    pub fn without_mode(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        if self.mode_count() == 1 {
            return Err(Error::LastMode);
        }
        let dims =
            self.dims.iter().enumerate().filter_map(|(k, &d)| (k != mode).then_some(d)).collect();
        ModeSignature::new(self.field, dims)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.mode_count() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange(format!("mode {} of {} modes", mode + 1, self.mode_count())))
        }
    }
}

/// Decode a flat row-major position (first mode slowest) into a multi-index.
fn decode_index(dims: &[usize], mut flat: usize, out: &mut [usize]) {
    for j in (0..dims.len()).rev() {
        out[j] = flat % dims[j];
        flat /= dims[j];
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductVector {
    signature: ModeSignature,
    factors: Vec<Vec<Scalar>>,
}

impl ProductVector {
    /// Validate the factors and put them into canonical form.
    pub fn new(signature: ModeSignature, factors: Vec<Vec<Scalar>>) -> Result<Self> {
        if factors.len() != signature.mode_count() {
            return Err(Error::InvalidArgument(format!(
                "{} factors for {} modes",
                factors.len(),
                signature.mode_count()
            )));
        }
        for (j, factor) in factors.iter().enumerate() {
            if factor.len() != signature.dims()[j] {
                return Err(Error::InvalidArgument(format!(
                    "factor {} has length {}, expected {}",
                    j + 1,
                    factor.len(),
                    signature.dims()[j]
                )));
            }
            if factor.iter().any(|x| x.field() != signature.field()) {
                return Err(Error::FieldMismatch);
            }
            if factor.iter().all(Scalar::is_zero) {
                return Err(Error::ZeroFactor { vector: 0, mode: j });
            }
        }
        let mut pv = ProductVector { signature, factors };
        pv.canonicalize();
        Ok(pv)
    }

    /// Fold leading coefficients of every factor after the first into the
    /// first factor, leaving those factors with leading entry 1.
    fn canonicalize(&mut self) {
        let mut carry = Scalar::one(self.signature.field());
        for factor in self.factors.iter_mut().skip(1) {
            let lead = factor.iter().find(|x| !x.is_zero()).expect("nonzero factor").clone();
            if !lead.is_one() {
                let inv = lead.inv();
                for x in factor.iter_mut() {
                    *x = x.mul(&inv);
                }
                carry = carry.mul(&lead);
            }
        }
        if !carry.is_one() {
            for x in self.factors[0].iter_mut() {
                *x = x.mul(&carry);
            }
        }
    }

    pub fn signature(&self) -> &ModeSignature {
        &self.signature
    }

    pub fn factor(&self, mode: usize) -> &[Scalar] {
        &self.factors[mode]
    }

    pub fn factors(&self) -> &[Vec<Scalar>] {
        &self.factors
    }

    /// Multiply by a nonzero scalar (folded into the first factor).
    pub fn scale(&self, a: &Scalar) -> Result<ProductVector> {
        if a.is_zero() {
            return Err(Error::InvalidArgument("scaling a product vector by zero".into()));
        }
        let mut factors = self.factors.clone();
        for x in factors[0].iter_mut() {
            *x = x.mul(a);
        }
        ProductVector::new(self.signature.clone(), factors)
    }

    pub fn neg(&self) -> ProductVector {
        self.scale(&Scalar::one(self.signature.field()).neg()).expect("nonzero scalar")
    }

    /// Full outer product as a dense tensor.
    pub fn expand(&self) -> DenseTensor {
        let dims = self.signature.dims();
        let total = self.signature.entry_count();
        let mut idx = vec![0usize; dims.len()];
        let mut entries = Vec::with_capacity(total);
        for flat in 0..total {
            decode_index(dims, flat, &mut idx);
            let mut acc = self.factors[0][idx[0]].clone();
            for (f, &i) in self.factors.iter().zip(&idx).skip(1) {
                acc = acc.mul(&f[i]);
            }
            entries.push(acc);
        }
        DenseTensor { signature: self.signature.clone(), entries }
    }

    /// Remove mode `j` and renormalize the remaining factors.
    pub fn drop_mode(&self, mode: usize) -> Result<ProductVector> {
        let signature = self.signature.without_mode(mode)?;
        let factors = self
            .factors
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != mode)
            .map(|(_, f)| f.clone())
            .collect();
        ProductVector::new(signature, factors)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DenseTensor {
    signature: ModeSignature,
    entries: Vec<Scalar>, // row-major, first mode slowest
}

impl DenseTensor {
    pub fn new(signature: ModeSignature, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != signature.entry_count() {
            return Err(Error::InvalidArgument(format!(
                "{} entries for shape with {}",
                entries.len(),
                signature.entry_count()
            )));
        }
        if entries.iter().any(|x| x.field() != signature.field()) {
            return Err(Error::FieldMismatch);
        }
        Ok(DenseTensor { signature, entries })
    }

    pub fn zero(signature: ModeSignature) -> Self {
        let entries = vec![Scalar::zero(signature.field()); signature.entry_count()];
        DenseTensor { signature, entries }
    }

    pub fn signature(&self) -> &ModeSignature {
        &self.signature
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn entry(&self, index: &[usize]) -> &Scalar {
        assert_eq!(index.len(), self.signature.mode_count());
        let mut flat = 0;
        for (j, &i) in index.iter().enumerate() {
            assert!(i < self.signature.dims()[j], "index out of bounds");
            flat = flat * self.signature.dims()[j] + i;
        }
        &self.entries[flat]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, rhs: &DenseTensor) -> Result<DenseTensor> {
        if self.signature != rhs.signature {
            return Err(Error::SignatureMismatch);
        }
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.add(b)).collect();
        Ok(DenseTensor { signature: self.signature.clone(), entries })
    }

    pub fn sub(&self, rhs: &DenseTensor) -> Result<DenseTensor> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> DenseTensor {
        let entries = self.entries.iter().map(Scalar::neg).collect();
        DenseTensor { signature: self.signature.clone(), entries }
    }

    pub fn scale(&self, a: &Scalar) -> DenseTensor {
        let entries = self.entries.iter().map(|x| x.mul(a)).collect();
        DenseTensor { signature: self.signature.clone(), entries }
    }

    pub(crate) fn add_assign(&mut self, rhs: &DenseTensor) {
        debug_assert_eq!(self.signature, rhs.signature);
        for (a, b) in self.entries.iter_mut().zip(&rhs.entries) {
            *a = a.add(b);
        }
    }

    pub(crate) fn sub_assign(&mut self, rhs: &DenseTensor) {
        debug_assert_eq!(self.signature, rhs.signature);
        for (a, b) in self.entries.iter_mut().zip(&rhs.entries) {
            *a = a.sub(b);
        }
    }

    /// Mode-`j` unfolding: a dims[j] x (product of the other dims) matrix.
    /// Columns are ordered lexicographically in the remaining modes, kept in
    /// their original order.
    pub fn unfold(&self, mode: usize) -> Result<Matrix> {
        self.signature.check_mode(mode)?;
        let dims = self.signature.dims();
        let rows = dims[mode];
        let cols = self.signature.entry_count() / rows;
        let mut out = Matrix::zeros(self.signature.field(), rows, cols);
        let mut idx = vec![0usize; dims.len()];
        for (flat, x) in self.entries.iter().enumerate() {
            decode_index(dims, flat, &mut idx);
            let mut col = 0;
            for (j, &i) in idx.iter().enumerate() {
                if j != mode {
                    col = col * dims[j] + i;
                }
            }
            out[(idx[mode], col)] = x.clone();
        }
        Ok(out)
    }
}

/// An ordered collection of product vectors sharing one signature.
/// Repeats are allowed; the collection behaves as a multiset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductVectorSet {
    signature: ModeSignature,
    vectors: Vec<ProductVector>,
}

impl ProductVectorSet {
    pub fn new(signature: ModeSignature, vectors: Vec<ProductVector>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidArgument("a set needs at least one vector".into()));
        }
        if vectors.iter().any(|v| v.signature() != &signature) {
            return Err(Error::SignatureMismatch);
        }
        Ok(ProductVectorSet { signature, vectors })
    }

    pub fn signature(&self) -> &ModeSignature {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, a: usize) -> &ProductVector {
        &self.vectors[a]
    }

    pub fn vectors(&self) -> &[ProductVector] {
        &self.vectors
    }

    /// Dense expansions of all vectors, in order.
    pub fn expanded(&self) -> Vec<DenseTensor> {
        self.vectors.iter().map(ProductVector::expand).collect()
    }

    /// Exact sum over a subset of zero-based indices; the empty subset gives
    /// the zero tensor. Indices must be distinct and in range.
    pub fn sum_subset(&self, subset: &[usize]) -> Result<DenseTensor> {
        let mut seen = vec![false; self.len()];
        let mut acc = DenseTensor::zero(self.signature.clone());
        for &a in subset {
            if a >= self.len() {
                return Err(Error::IndexOutOfRange(format!("vector {} of {}", a + 1, self.len())));
            }
            if seen[a] {
                return Err(Error::InvalidArgument(format!("index {} repeated in subset", a + 1)));
            }
            seen[a] = true;
            acc.add_assign(&self.vectors[a].expand());
        }
        Ok(acc)
    }

    pub fn sum_all(&self) -> DenseTensor {
        let all: Vec<usize> = (0..self.len()).collect();
        self.sum_subset(&all).expect("full index range is valid")
    }

    /// Dimension of the span of the mode-j factors, for every mode.
    pub fn span_dims(&self) -> Vec<usize> {
        (0..self.signature.mode_count())
            .map(|j| {
                let rows: Vec<Vec<Scalar>> =
                    self.vectors.iter().map(|v| v.factor(j).to_vec()).collect();
                Matrix::from_rows(self.signature.field(), &rows).rank()
            })
            .collect()
    }

    /// The same vectors with one mode dropped everywhere.
    pub fn drop_mode(&self, mode: usize) -> Result<ProductVectorSet> {
        let vectors: Result<Vec<ProductVector>> =
            self.vectors.iter().map(|v| v.drop_mode(mode)).collect();
        ProductVectorSet::new(self.signature.without_mode(mode)?, vectors?)
    }
}
