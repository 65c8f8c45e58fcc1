//! Exact scalar arithmetic over the rationals and the prime fields
//! F_2, F_3, F_5, F_7.
//!
//! Rationals are kept as reduced fractions with a positive denominator,
//! residues as canonical representatives in `0..p`. Mixing scalars from
//! different fields is a programming error and panics.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub const SUPPORTED_PRIMES: [u64; 4] = [2, 3, 5, 7];

/// The coefficient field of an instance: the rationals or F_p for a small prime p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec::Rationals
    }

    pub fn prime(p: u64) -> Result<Self> {
        if SUPPORTED_PRIMES.contains(&p) {
            Ok(FieldSpec::PrimeField(p))
        } else {
            Err(Error::UnsupportedPrime(p))
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FieldSpec::PrimeField(_))
    }

    /// Number of field elements, `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        match self {
            FieldSpec::Rationals => None,
            FieldSpec::PrimeField(p) => Some(*p),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

/// An exact field element. The variant determines the field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    /// Residue `value` modulo the prime `p`, with `value < p`.
    Residue {
        p: u64,
        value: u64,
    },
}

impl Scalar {
    pub fn zero(field: FieldSpec) -> Self {
        match field {
            FieldSpec::Rationals => Scalar::Rational(BigRational::zero()),
            FieldSpec::PrimeField(p) => Scalar::Residue { p, value: 0 },
        }
    }

    pub fn one(field: FieldSpec) -> Self {
        match field {
            FieldSpec::Rationals => Scalar::Rational(BigRational::one()),
            FieldSpec::PrimeField(p) => Scalar::Residue { p, value: 1 % p },
        }
    }

    pub fn from_integer(field: FieldSpec, n: i64) -> Self {
        match field {
            FieldSpec::Rationals => Scalar::Rational(BigRational::from(BigInt::from(n))),
            FieldSpec::PrimeField(p) => {
                let value = n.rem_euclid(p as i64) as u64;
                Scalar::Residue { p, value }
            }
        }
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rationals,
            Scalar::Residue { p, .. } => FieldSpec::PrimeField(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Residue { p, value } => *value == 1 % p,
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Residue { p, value: a }, Scalar::Residue { p: q, value: b }) => {
                assert_eq!(p, q, "field mismatch");
                Scalar::Residue { p: *p, value: (a + b) % p }
            }
            _ => panic!("field mismatch"),
        }
    }

    pub fn sub(&self, rhs: &Scalar) -> Scalar {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Residue { p, value: a }, Scalar::Residue { p: q, value: b }) => {
                assert_eq!(p, q, "field mismatch");
                Scalar::Residue { p: *p, value: (a * b) % p }
            }
            _ => panic!("field mismatch"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Residue { p, value } => Scalar::Residue { p: *p, value: (p - value) % p },
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Scalar::Rational(a) => Scalar::Rational(a.recip()),
            Scalar::Residue { p, value } => {
                // Fermat: value^(p-2) mod p, fine for the tiny primes we support.
                let mut acc: u64 = 1;
                let mut base = *value % p;
                let mut e = p - 2;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc * base % p;
                    }
                    base = base * base % p;
                    e >>= 1;
                }
                Scalar::Residue { p: *p, value: acc }
            }
        }
    }

    pub fn div(&self, rhs: &Scalar) -> Scalar {
        self.mul(&rhs.inv())
    }

    /// Parse a decimal integer or `num/den` string in the given field.
    /// Residues accept any integer and reduce it modulo p.
    pub fn parse(field: FieldSpec, text: &str) -> Result<Scalar> {
        let bad = |msg: &str| Error::Parse {
            location: format!("scalar {text:?}"),
            message: msg.to_string(),
        };
        let (num_text, den_text) = match text.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (text, None),
        };
        match field {
            FieldSpec::Rationals => {
                let num: BigInt = num_text.trim().parse().map_err(|_| bad("bad numerator"))?;
                let den: BigInt = match den_text {
                    Some(d) => d.trim().parse().map_err(|_| bad("bad denominator"))?,
                    None => BigInt::one(),
                };
                if den.is_zero() {
                    return Err(bad("zero denominator"));
                }
                Ok(Scalar::Rational(BigRational::new(num, den)))
            }
            FieldSpec::PrimeField(p) => {
                if den_text.is_some() {
                    return Err(bad("fractions are not residues"));
                }
                let n: i128 = num_text.trim().parse().map_err(|_| bad("bad integer"))?;
                let value = n.rem_euclid(p as i128) as u64;
                Ok(Scalar::Residue { p, value })
            }
        }
    }

    /// Residue value in `0..p`; `None` for rationals.
    pub fn residue_value(&self) -> Option<u64> {
        match self {
            Scalar::Residue { value, .. } => Some(*value),
            Scalar::Rational(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Residue { .. } => None,
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order used only for deterministic tie-breaking: scalars of the same
/// field compare by value, different fields by field tag.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            (Scalar::Residue { p, value: a }, Scalar::Residue { p: q, value: b }) => {
                p.cmp(q).then(a.cmp(b))
            }
            (Scalar::Rational(_), Scalar::Residue { .. }) => Ordering::Less,
            (Scalar::Residue { .. }, Scalar::Rational(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Residue { value, .. } => write!(f, "{value}"),
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else if r.denom().is_negative() {
                    // num-rational keeps denominators positive; guard anyway.
                    write!(f, "{}/{}", -r.numer(), -r.denom())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}
