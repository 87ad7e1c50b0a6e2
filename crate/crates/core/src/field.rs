//! Exact scalar fields: arbitrary-precision rationals and prime fields.
//!
//! All linear algebra in the crate is generic over [`Field`]. The two
//! implementations are [`Rationals`] (backed by `BigRational`) and
//! [`PrimeField`] (word-sized residues). There is no floating point anywhere.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} is too large (must be below 2^31)")]
    PrimeTooLarge(u64),
    #[error("cannot parse scalar {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// Tag naming a ground field. Characteristic zero means the rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub enum ExactField {
    Rational,
    Prime(u64),
}

impl ExactField {
    pub fn characteristic(self) -> u64 {
        match self {
            ExactField::Rational => 0,
            ExactField::Prime(p) => p,
        }
    }
}

impl TryFrom<u64> for ExactField {
    type Error = FieldError;

    fn try_from(c: u64) -> Result<Self, FieldError> {
        if c == 0 {
            Ok(ExactField::Rational)
        } else {
            PrimeField::new(c).map(|f| ExactField::Prime(f.modulus()))
        }
    }
}

impl From<ExactField> for u64 {
    fn from(f: ExactField) -> u64 {
        f.characteristic()
    }
}

impl fmt::Display for ExactField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactField::Rational => write!(f, "Q"),
            ExactField::Prime(p) => write!(f, "F{p}"),
        }
    }
}

/// An exact field with runtime parameters (the modulus for prime fields).
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync;

    fn kind(&self) -> ExactField;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Parses `"a"` or `"a/b"` (integers, optionally negative).
    fn parse(&self, text: &str) -> Result<Self::Elem, FieldError>;

    fn characteristic(&self) -> u64 {
        self.kind().characteristic()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// `acc += a * b`
    fn add_mul_assign(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        let prod = self.mul(a, b);
        *acc = self.add(acc, &prod);
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// Canonical text form, inverse of [`Field::parse`].
    fn format(&self, a: &Self::Elem) -> String {
        a.to_string()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Rationals;

fn parse_ratio(text: &str) -> Result<(BigInt, BigInt), FieldError> {
    let err = |reason: &str| FieldError::Parse {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let d: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if d.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok((n, d))
}

impl Field for Rationals {
    type Elem = BigRational;

    fn kind(&self) -> ExactField {
        ExactField::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn parse(&self, text: &str) -> Result<BigRational, FieldError> {
        let (n, d) = parse_ratio(text)?;
        Ok(BigRational::new(n, d))
    }
    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }
}

/// The prime field of order `p`, elements stored as reduced residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= 1 << 31 {
            return Err(FieldError::PrimeTooLarge(p));
        }
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn kind(&self) -> ExactField {
        ExactField::Prime(self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            Some(self.pow(*a, self.p - 2))
        }
    }
    fn parse(&self, text: &str) -> Result<u64, FieldError> {
        let (n, d) = parse_ratio(text)?;
        let p = BigInt::from(self.p);
        let reduce = |x: &BigInt| -> u64 {
            let r = x % &p;
            let r = if r.is_negative() { r + &p } else { r };
            r.to_u64().expect("residue fits in u64")
        };
        let (n, d) = (reduce(&n), reduce(&d));
        self.div(&n, &d).ok_or_else(|| FieldError::Parse {
            text: text.to_string(),
            reason: format!("denominator vanishes mod {}", self.p),
        })
    }
    fn add_mul_assign(&self, acc: &mut u64, a: &u64, b: &u64) {
        *acc = (*acc + a * b) % self.p;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            let inv = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &inv), 1);
        }
        assert_eq!(f.inv(&0), None);
    }

    #[test]
    fn rejects_composites() {
        assert_eq!(PrimeField::new(9), Err(FieldError::NotPrime(9)));
        assert_eq!(PrimeField::new(1), Err(FieldError::NotPrime(1)));
        assert!(ExactField::try_from(4).is_err());
        assert_eq!(ExactField::try_from(0).unwrap(), ExactField::Rational);
    }

    #[test]
    fn parse_fractions() {
        let q = Rationals;
        assert_eq!(q.parse("-3/6").unwrap(), q.div(&q.from_i64(-1), &q.from_i64(2)).unwrap());
        let f = PrimeField::new(5).unwrap();
        // 1/2 = 3 mod 5
        assert_eq!(f.parse("1/2").unwrap(), 3);
        assert_eq!(f.parse("-1").unwrap(), 4);
        assert!(f.parse("1/5").is_err());
        assert!(q.parse("x").is_err());
    }

    proptest::proptest! {
        #[test]
        fn rational_text_round_trip(n in -1000i64..1000, d in 1i64..1000) {
            let q = Rationals;
            let x = q.div(&q.from_i64(n), &q.from_i64(d)).unwrap();
            proptest::prop_assert_eq!(q.parse(&q.format(&x)).unwrap(), x);
        }

        #[test]
        fn prime_text_round_trip(a in 0u64..101) {
            let f = PrimeField::new(101).unwrap();
            proptest::prop_assert_eq!(f.parse(&f.format(&a)).unwrap(), a);
        }
    }
}
