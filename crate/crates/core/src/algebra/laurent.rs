//! Sparse Laurent polynomials `C[z, z⁻¹]` and the dilation `σ(z) = qz`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::scalar::{format_rational, int, rational_pow, Coeff, Rational, Ring};
use crate::Error;

/// A finitely supported map from degrees to nonzero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly<C> {
    terms: BTreeMap<i64, C>,
}

impl<C: Coeff> LaurentPoly<C> {
    pub fn monomial(coeff: C, degree: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(degree, coeff);
        }
        Self { terms }
    }

    pub fn constant(coeff: C) -> Self {
        Self::monomial(coeff, 0)
    }

    /// `z`
    pub fn z() -> Self {
        Self::monomial(C::one(), 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, C)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (d, c) in terms {
            p.add_term(d, &c);
        }
        p
    }

    pub fn coeff(&self, degree: i64) -> Option<&C> {
        self.terms.get(&degree)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &C)> + '_ {
        self.terms.iter().map(|(&d, c)| (d, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add_term(&mut self, degree: i64, coeff: &C) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&degree) {
            Some(c) => {
                let sum = c.add_ref(coeff);
                if sum.is_zero() {
                    self.terms.remove(&degree);
                } else {
                    *c = sum;
                }
            }
            None => {
                self.terms.insert(degree, coeff.clone());
            }
        }
    }

    /// Removes and returns the coefficient at `degree`.
    pub fn take(&mut self, degree: i64) -> Option<C> {
        self.terms.remove(&degree)
    }

    pub fn shift(&self, by: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(d, c)| (d + by, c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(&d, c)| (d, c.mul_ref(s))))
    }

    pub fn map_coeffs<T: Coeff>(&self, f: impl Fn(&C) -> T) -> LaurentPoly<T> {
        LaurentPoly::from_terms(self.terms.iter().map(|(&d, c)| (d, f(c))))
    }

    /// Unit test for `C[z, z⁻¹]`: a single term `c·z^m` with `c` a unit.
    pub fn unit_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&d, c) = self.terms.iter().next().unwrap();
        c.inverse().map(|inv| Self::monomial(inv, -d))
    }

    /// Keeps only the terms with degree in `lo..=hi`.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        Self {
            terms: self
                .terms
                .range(lo..=hi)
                .map(|(&d, c)| (d, c.clone()))
                .collect(),
        }
    }
}

impl<C: Coeff> Zero for LaurentPoly<C> {
    fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Coeff> One for LaurentPoly<C> {
    fn one() -> Self {
        Self::constant(C::one())
    }
}

impl<C: Coeff> Ring for LaurentPoly<C> {
    fn add_ref(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&d, c) in &rhs.terms {
            out.add_term(d, c);
        }
        out
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&d, c) in &rhs.terms {
            out.add_term(d, &c.neg_ref());
        }
        out
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (&da, a) in &self.terms {
            for (&db, b) in &rhs.terms {
                out.add_term(da + db, &a.mul_ref(b));
            }
        }
        out
    }

    fn neg_ref(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&d, c)| (d, c.neg_ref())).collect(),
        }
    }
}

impl<C: Coeff> Add for LaurentPoly<C> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl<C: Coeff> Sub for LaurentPoly<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.sub_ref(&rhs)
    }
}

impl<C: Coeff> Mul for LaurentPoly<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<C: Coeff> Neg for LaurentPoly<C> {
    type Output = Self;
    fn neg(self) -> Self {
        self.neg_ref()
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(d, c)| match d {
                0 => format!("({})", c),
                1 => format!("({})*z", c),
                _ => format!("({})*z^{}", c, d),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The dilation `σ(z) = qz`, with `q` a rational other than `0, 1, −1`.
///
/// Such a `q` is never a root of unity, so the constants of `σ` are exactly
/// the coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dilation {
    q: Rational,
}

impl Dilation {
    pub fn new(q: Rational) -> Result<Self, Error> {
        if q.is_zero() || q.abs() == int(1) {
            return Err(Error::InvalidDilation(format_rational(&q)));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn pow(&self, m: i64) -> Rational {
        rational_pow(&self.q, m)
    }

    /// `σ(Σ a_m z^m) = Σ q^m a_m z^m`.
    pub fn apply<C: Coeff>(&self, f: &LaurentPoly<C>) -> LaurentPoly<C> {
        LaurentPoly {
            terms: f
                .terms
                .iter()
                .map(|(&d, c)| (d, c.scale_rational(&self.pow(d))))
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self { q: self.q.recip() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::rat;

    type P = LaurentPoly<Rational>;

    fn p(terms: &[(i64, Rational)]) -> P {
        P::from_terms(terms.iter().cloned())
    }

    #[test]
    fn sigma_examples() {
        let s2 = Dilation::new(int(2)).unwrap();
        assert_eq!(s2.apply(&p(&[(3, int(1))])), p(&[(3, int(8))]));
        assert_eq!(s2.apply(&P::zero()), P::zero());
        let s3 = Dilation::new(int(3)).unwrap();
        let f = p(&[(0, int(1)), (-1, int(1))]);
        assert_eq!(s3.apply(&f), p(&[(0, int(1)), (-1, rat(1, 3))]));
        // σ respects products of such elements
        let g = p(&[(2, int(5)), (-1, int(-1))]);
        assert_eq!(
            s3.apply(&f.mul_ref(&g)),
            s3.apply(&f).mul_ref(&s3.apply(&g))
        );
    }

    #[test]
    fn rejects_roots_of_unity() {
        assert!(Dilation::new(int(0)).is_err());
        assert!(Dilation::new(int(1)).is_err());
        assert!(Dilation::new(int(-1)).is_err());
        assert!(Dilation::new(rat(1, 2)).is_ok());
    }

    #[test]
    fn powers_of_q_are_never_one() {
        for q in [int(2), int(-2), rat(1, 3), rat(-3, 2)] {
            let s = Dilation::new(q).unwrap();
            for m in -50..=50 {
                assert_eq!(s.pow(m) == int(1), m == 0);
            }
        }
    }

    #[test]
    fn cancellation_drops_terms() {
        let a = p(&[(1, int(1)), (2, int(3))]);
        let b = p(&[(1, int(-1))]);
        let s = a.add_ref(&b);
        assert_eq!(s.len(), 1);
        assert_eq!(s.min_degree(), Some(2));
        assert!(a.sub_ref(&a).is_zero());
    }

    #[test]
    fn units() {
        assert_eq!(
            p(&[(1, int(1))]).unit_inverse(),
            Some(p(&[(-1, int(1))]))
        );
        assert!(p(&[(0, int(1)), (1, int(1))]).unit_inverse().is_none());
        assert!(P::zero().unit_inverse().is_none());
        let z = P::z();
        assert_eq!(z.mul_ref(&p(&[(-1, int(1))])), P::one());
    }
}
