//! Coefficient rings.
//!
//! Everything in this crate is generic over a [`Coeff`] type: the rationals
//! ([`Rational`]) or residues modulo a rational polynomial ([`Residue`](super::Residue)).
//! Ring arithmetic goes through [`Ring`], which takes its operands by
//! reference so big-number coefficients are not cloned on every operation.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::residue::QuotientRing;

/// Exact rational numbers, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// A commutative ring with identity.
pub trait Ring: Clone + PartialEq + fmt::Debug + Zero + One + Send + Sync + 'static {
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
}

/// The runtime description of a coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffRing {
    Rationals,
    Quotient(Arc<QuotientRing>),
}

impl CoeffRing {
    /// Dimension of the ring as a vector space over the rationals.
    pub fn rank(&self) -> usize {
        match self {
            CoeffRing::Rationals => 1,
            CoeffRing::Quotient(r) => r.degree(),
        }
    }

    pub fn quotient(modulus: Vec<Rational>) -> Result<Self, crate::Error> {
        Ok(CoeffRing::Quotient(Arc::new(QuotientRing::new(modulus)?)))
    }

    pub fn is_field_of_rationals(&self) -> bool {
        matches!(self, CoeffRing::Rationals)
    }
}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffRing::Rationals => write!(f, "Q"),
            CoeffRing::Quotient(r) => write!(f, "Q[t]/({})", r),
        }
    }
}

/// An element of a coefficient ring: a commutative algebra over the
/// rationals that is free of finite rank.
pub trait Coeff: Ring + fmt::Display {
    /// The structural map from the rationals.
    fn from_rational(r: Rational) -> Self;

    /// Multiplicative inverse, if `self` is a unit.
    fn inverse(&self) -> Option<Self>;

    /// Whether this element can live in `ring`.
    fn belongs_to(&self, ring: &CoeffRing) -> bool;

    /// Coordinates over the rationals in the monomial basis `1, t, t², …`
    /// of `ring`; the result has length `ring.rank()`.
    fn coordinates(&self, ring: &CoeffRing) -> Vec<Rational>;

    /// Inverse of [`Coeff::coordinates`].
    fn from_coordinates(ring: &CoeffRing, coords: &[Rational]) -> Self;

    /// Image under the ring morphism determined by where the generator `t`
    /// goes. Rationals ignore `generator_image` (constants are fixed).
    fn evaluate<T: Coeff>(&self, generator_image: Option<&T>) -> T;

    fn scale_rational(&self, r: &Rational) -> Self {
        self.mul_ref(&Self::from_rational(r.clone()))
    }
}

impl Ring for Rational {
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

impl Coeff for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn belongs_to(&self, ring: &CoeffRing) -> bool {
        ring.is_field_of_rationals()
    }

    fn coordinates(&self, _ring: &CoeffRing) -> Vec<Rational> {
        vec![self.clone()]
    }

    fn from_coordinates(_ring: &CoeffRing, coords: &[Rational]) -> Self {
        coords.first().cloned().unwrap_or_else(Rational::zero)
    }

    fn evaluate<T: Coeff>(&self, _generator_image: Option<&T>) -> T {
        T::from_rational(self.clone())
    }

    fn scale_rational(&self, r: &Rational) -> Self {
        self * r
    }
}

/// `n/d` as a rational; panics on a zero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"n"` or `"n/d"` with `d > 0`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let valid_int = |t: &str, signed: bool| {
        let digits = if signed {
            t.strip_prefix('-').unwrap_or(t)
        } else {
            t
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid_int(num, true) {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = match den {
        Some(d) => {
            if !valid_int(d, false) {
                return None;
            }
            d.parse().ok()?
        }
        None => BigInt::one(),
    };
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn rational_pow(base: &Rational, exp: i64) -> Rational {
    let mut result = Rational::one();
    let mut b = if exp < 0 { base.recip() } else { base.clone() };
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3"), Some(int(3)));
        assert_eq!(parse_rational("-2/4"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/-2"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational(""), None);
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&rat(-4, 2)), "-2");
    }

    #[test]
    fn pow_handles_negative_exponents() {
        assert_eq!(rational_pow(&int(2), 3), int(8));
        assert_eq!(rational_pow(&int(2), -3), rat(1, 8));
        assert_eq!(rational_pow(&rat(2, 3), 0), int(1));
    }
}
