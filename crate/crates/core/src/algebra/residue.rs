//! Residue rings `Q[t]/(p(t))`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use super::scalar::{format_rational, CoeffRing, Coeff, Rational, Ring};
use crate::Error;

/// The ring `Q[t]/(p(t))` with `p` stored monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientRing {
    modulus: Vec<Rational>,
}

impl QuotientRing {
    /// `modulus` lists the coefficients of `1, t, t², …`. It is normalized to
    /// be monic and must have degree at least one.
    pub fn new(modulus: Vec<Rational>) -> Result<Self, Error> {
        let mut modulus = modulus;
        trim(&mut modulus);
        if modulus.len() < 2 {
            return Err(Error::InvalidRing(
                "modulus must have degree at least 1".into(),
            ));
        }
        let lead = modulus.last().unwrap().clone();
        for c in &mut modulus {
            *c = &*c / &lead;
        }
        Ok(Self { modulus })
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Monic modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[Rational] {
        &self.modulus
    }

    fn reduce(&self, mut coeffs: Vec<Rational>) -> Vec<Rational> {
        let d = self.degree();
        while coeffs.len() > d {
            let top = coeffs.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = coeffs.len() - d;
            for (k, m) in self.modulus[..d].iter().enumerate() {
                let v = &coeffs[shift + k] - &(&top * m);
                coeffs[shift + k] = v;
            }
        }
        trim(&mut coeffs);
        coeffs
    }
}

impl fmt::Display for QuotientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", poly_to_string(&self.modulus))
    }
}

/// An element of some `Q[t]/(p)`.
///
/// Residues built from rationals alone (`zero`, `one`, `from_rational`) do
/// not know their ring yet; they are constants and combine with residues of
/// any ring. A residue of positive degree always carries its ring.
#[derive(Clone, Debug)]
pub struct Residue {
    ring: Option<Arc<QuotientRing>>,
    coeffs: Vec<Rational>,
}

impl Residue {
    pub fn new(ring: &Arc<QuotientRing>, coeffs: Vec<Rational>) -> Self {
        Self {
            ring: Some(ring.clone()),
            coeffs: ring.reduce(coeffs),
        }
    }

    /// The class of `t`.
    pub fn generator(ring: &Arc<QuotientRing>) -> Self {
        Self::new(ring, vec![Rational::zero(), Rational::one()])
    }

    /// Coefficients of `1, t, …` with trailing zeros removed.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn ring(&self) -> Option<&Arc<QuotientRing>> {
        self.ring.as_ref()
    }

    fn join_ring(&self, other: &Self) -> Option<Arc<QuotientRing>> {
        match (&self.ring, &other.ring) {
            (Some(a), Some(b)) => {
                assert!(
                    Arc::ptr_eq(a, b) || a == b,
                    "residues from different quotient rings: {} and {}",
                    a,
                    b
                );
                Some(a.clone())
            }
            (Some(a), None) => Some(a.clone()),
            (None, b) => b.clone(),
        }
    }

    fn from_parts(ring: Option<Arc<QuotientRing>>, coeffs: Vec<Rational>) -> Self {
        match ring {
            Some(r) => Self::new(&r, coeffs),
            None => {
                let mut coeffs = coeffs;
                trim(&mut coeffs);
                debug_assert!(coeffs.len() <= 1);
                Self { ring: None, coeffs }
            }
        }
    }
}

impl PartialEq for Residue {
    fn eq(&self, other: &Self) -> bool {
        if let (Some(a), Some(b)) = (&self.ring, &other.ring) {
            if a != b {
                return false;
            }
        }
        self.coeffs == other.coeffs
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", poly_to_string(&self.coeffs))
    }
}

impl Zero for Residue {
    fn zero() -> Self {
        Self {
            ring: None,
            coeffs: Vec::new(),
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for Residue {
    fn one() -> Self {
        Self {
            ring: None,
            coeffs: vec![Rational::one()],
        }
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Self) -> Self {
        self.sub_ref(&rhs)
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Self {
        self.neg_ref()
    }
}

impl Ring for Residue {
    fn add_ref(&self, rhs: &Self) -> Self {
        let ring = self.join_ring(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::from_parts(ring, coeffs)
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&rhs.neg_ref())
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let ring = self.join_ring(rhs);
        Self::from_parts(ring, poly_mul(&self.coeffs, &rhs.coeffs))
    }

    fn neg_ref(&self) -> Self {
        Self {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Coeff for Residue {
    fn from_rational(r: Rational) -> Self {
        Self::from_parts(None, vec![r])
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        match &self.ring {
            None => Some(Self::from_rational(self.coeffs[0].recip())),
            Some(ring) => {
                let (g, s) = ext_gcd(&self.coeffs, ring.modulus());
                // g is a nonzero constant exactly when self is a unit
                if g.len() != 1 {
                    return None;
                }
                let inv_g = g[0].recip();
                let s = s.iter().map(|c| c * &inv_g).collect();
                Some(Self::new(ring, s))
            }
        }
    }

    fn belongs_to(&self, ring: &CoeffRing) -> bool {
        match ring {
            CoeffRing::Rationals => false,
            CoeffRing::Quotient(r) => self.ring.as_ref().is_none_or(|own| own == r),
        }
    }

    fn coordinates(&self, ring: &CoeffRing) -> Vec<Rational> {
        let mut out = self.coeffs.clone();
        out.resize(ring.rank(), Rational::zero());
        out
    }

    fn from_coordinates(ring: &CoeffRing, coords: &[Rational]) -> Self {
        match ring {
            CoeffRing::Quotient(r) => Self::new(r, coords.to_vec()),
            CoeffRing::Rationals => Self::from_parts(None, coords[..1].to_vec()),
        }
    }

    fn evaluate<T: Coeff>(&self, generator_image: Option<&T>) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            if let Some(tau) = generator_image {
                acc = acc.mul_ref(tau);
            } else {
                assert!(
                    self.coeffs.len() <= 1,
                    "evaluating a non-constant residue needs an image for t"
                );
            }
            acc = acc.add_ref(&T::from_rational(c.clone()));
        }
        acc
    }
}

fn trim(v: &mut Vec<Rational>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let zero = Rational::zero();
    let mut out: Vec<Rational> = (0..n)
        .map(|k| a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero))
        .collect();
    trim(&mut out);
    out
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = a.to_vec();
    trim(&mut rem);
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let lead = b.last().unwrap();
    let mut quot = vec![Rational::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let factor = rem.last().unwrap() / lead;
        for (k, c) in b.iter().enumerate() {
            let v = &rem[shift + k] - &(&factor * c);
            rem[shift + k] = v;
        }
        quot[shift] = factor;
        rem.pop();
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

/// Returns `(g, s)` with `g = gcd(a, m)` and `s·a ≡ g (mod m)`.
fn ext_gcd(a: &[Rational], m: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    let (mut s0, mut s1): (Vec<Rational>, Vec<Rational>) = (Vec::new(), vec![Rational::one()]);
    trim(&mut r1);
    while !r1.is_empty() {
        let (q, r) = poly_divrem(&r0, &r1);
        let s = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    (r0, s0)
}

fn poly_to_string(coeffs: &[Rational]) -> String {
    if coeffs.is_empty() {
        return "0".into();
    }
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| match k {
            0 => format_rational(c),
            1 => format!("{}*t", format_rational(c)),
            _ => format!("{}*t^{}", format_rational(c), k),
        })
        .collect();
    terms.join(" + ")
}
