//! Extension of scalars along a ring morphism `C → C′`.
//!
//! Every object is free over its coefficient ring, so `C′ ⊗_C (−)` is
//! realized by applying the morphism to each coefficient. The two check
//! functions compare computations done before and after extending.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::linalg::RowSpace;
use crate::algebra::{CoeffRing, Coeff, LaurentPoly, Matrix, MatrixK, QuotientRing, Rational};
use crate::diffmod::{hom_space, is_morphism, DiffModule, Layout, PureModule};
use crate::ext::{ExtClass, SylvesterPair};
use crate::moduli::{FilteredPresentation, GradedSpec, UnipotentGauge};
use crate::sample::Sampler;
use crate::Error;

/// A morphism of coefficient rings, fixed by the image of the generator `t`
/// (absent when the source is the rationals).
#[derive(Clone, Debug, PartialEq)]
pub struct RingMorphism<S, T> {
    source: CoeffRing,
    target: CoeffRing,
    generator_image: Option<T>,
    _source: std::marker::PhantomData<fn(S)>,
}

impl<S: Coeff, T: Coeff> RingMorphism<S, T> {
    /// Checks that `generator_image` lies in `target` and is a root of the
    /// source modulus.
    pub fn new(source: CoeffRing, target: CoeffRing, generator_image: Option<T>) -> Result<Self, Error> {
        match (&source, &generator_image) {
            (CoeffRing::Rationals, Some(_)) => {
                return Err(Error::InvalidRing("a map out of the rationals has no generator to send".into()))
            }
            (CoeffRing::Quotient(_), None) => {
                return Err(Error::InvalidRing("a map out of a quotient ring needs the image of t".into()))
            }
            (CoeffRing::Quotient(r), Some(tau)) => {
                if !tau.belongs_to(&target) {
                    return Err(Error::RingMismatch(format!("the image of t is not in {}", target)));
                }
                let mut value = T::zero();
                for c in r.modulus().iter().rev() {
                    value = value.mul_ref(tau).add_ref(&T::from_rational(c.clone()));
                }
                if !value.is_zero() {
                    return Err(Error::InvalidRing(format!(
                        "the image of t is not a root of {} in {}",
                        r, target
                    )));
                }
            }
            (CoeffRing::Rationals, None) => {}
        }
        Ok(Self {
            source,
            target,
            generator_image,
            _source: std::marker::PhantomData,
        })
    }

    pub fn source(&self) -> &CoeffRing {
        &self.source
    }

    pub fn target(&self) -> &CoeffRing {
        &self.target
    }

    pub fn generator_image(&self) -> Option<&T> {
        self.generator_image.as_ref()
    }

    pub fn apply(&self, x: &S) -> T {
        x.evaluate(self.generator_image.as_ref())
    }

    /// `next ∘ self`.
    pub fn then<U: Coeff>(&self, next: &RingMorphism<T, U>) -> Result<RingMorphism<S, U>, Error> {
        if self.target != next.source {
            return Err(Error::RingMismatch(format!(
                "cannot compose a map into {} with a map out of {}",
                self.target, next.source
            )));
        }
        Ok(RingMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            generator_image: self.generator_image.as_ref().map(|tau| next.apply(tau)),
            _source: std::marker::PhantomData,
        })
    }

    fn check_source(&self, ring: &CoeffRing) -> Result<(), Error> {
        if ring != &self.source {
            return Err(Error::RingMismatch(format!(
                "object is over {}, the morphism starts at {}",
                ring, self.source
            )));
        }
        Ok(())
    }

    fn check_coeffs<'a>(&self, mut coeffs: impl Iterator<Item = &'a S>) -> Result<(), Error> {
        match coeffs.find(|c| !c.belongs_to(&self.source)) {
            Some(c) => Err(Error::RingMismatch(format!("{:?} is not in {}", c, self.source))),
            None => Ok(()),
        }
    }

    fn poly(&self, p: &LaurentPoly<S>) -> LaurentPoly<T> {
        p.map_coeffs(|c| self.apply(c))
    }

    fn matrix_k(&self, m: &MatrixK<S>) -> MatrixK<T> {
        m.map_coeffs(|c| self.apply(c))
    }

    fn constant(&self, m: &Matrix<S>) -> Matrix<T> {
        m.map(|c| self.apply(c))
    }
}

impl<C: Coeff> RingMorphism<C, C> {
    pub fn identity(ring: CoeffRing) -> Self {
        let generator_image = match &ring {
            CoeffRing::Rationals => None,
            CoeffRing::Quotient(r) => Some(C::from_coordinates(&ring, &generator_coords(r))),
        };
        Self {
            source: ring.clone(),
            target: ring,
            generator_image,
            _source: std::marker::PhantomData,
        }
    }
}

impl<T: Coeff> RingMorphism<Rational, T> {
    /// The structural map `Q → C′`.
    pub fn structural(target: CoeffRing) -> Self {
        Self {
            source: CoeffRing::Rationals,
            target,
            generator_image: None,
            _source: std::marker::PhantomData,
        }
    }
}

/// Coordinates of `t` in `Q[t]/(p)`; for linear monic `p = t + a` that is `−a`.
fn generator_coords(r: &QuotientRing) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); r.degree()];
    if r.degree() > 1 {
        v[1] = Rational::one();
    } else {
        v[0] = -r.modulus()[0].clone();
    }
    v
}

/// Objects that can be carried along a ring morphism.
pub trait Extend<S: Coeff, T: Coeff> {
    type Output;

    fn extend(&self, phi: &RingMorphism<S, T>) -> Result<Self::Output, Error>;
}

impl<S: Coeff, T: Coeff> Extend<S, T> for S {
    type Output = T;

    fn extend(&self, phi: &RingMorphism<S, T>) -> Result<T, Error> {
        phi.check_coeffs(std::iter::once(self))?;
        Ok(phi.apply(self))
    }
}

impl<S: Coeff, T: Coeff> Extend<S, T> for LaurentPoly<S> {
    type Output = LaurentPoly<T>;

    fn extend(&self, phi: &RingMorphism<S, T>) -> Result<LaurentPoly<T>, Error> {
        phi.check_coeffs(self.terms().map(|(_, c)| c))?;
        Ok(phi.poly(self))
    }
}

impl<S: Coeff, T: Coeff> Extend<S, T> for Matrix<S> {
    type Output = Matrix<T>;

    fn extend(&self, phi: &RingMorphism<S, T>) -> Result<Matrix<T>, Error> {
        phi.check_coeffs(self.entries())?;
        Ok(phi.constant(self))
    }
}

impl<S: Coeff, T: Coeff> Extend<S, T> for MatrixK<S> {
    type Output = MatrixK<T>;

    fn extend(&self, phi: &RingMorphism<S, T>) -> Result<MatrixK<T>, Error> {
        phi.check_coeffs(self.entries().flat_map(|p| p.terms().map(|(_, c)| c)))?;
        Ok(phi.matrix_k(self))
    }
}

impl<S: Coeff, T: Coeff> Extend<S, T> for PureModule<S> {
    type Output = PureModule<T>;

    fn extend(&self, phi: &RingMorphism<S, T>) -> Result<PureModule<T>, Error> {
        phi.check_source(self.ring())?;
        PureModule::new(
            self.dilation().clone(),
            phi.target.clone(),
            self.slope(),
            phi.constant(self.leading()),
        )
    }
}

impl<S: Coeff, T: Coeff> Extend<S, T> for DiffModule<S> {
    type Output = DiffModule<T>;

    fn extend(&self, phi: &RingMorphism<S, T>) -> Result<DiffModule<T>, Error> {
        phi.check_source(self.ring())?;
        DiffModule::new(self.dilation().clone(), phi.target.clone(), phi.matrix_k(self.matrix()))
    }
}

impl<S: Coeff, T: Coeff> Extend<S, T> for GradedSpec<S> {
    type Output = GradedSpec<T>;

    fn extend(&self, phi: &RingMorphism<S, T>) -> Result<GradedSpec<T>, Error> {
        phi.check_source(self.ring())?;
        let blocks = self
            .blocks()
            .iter()
            .map(|b| b.extend(phi))
            .collect::<Result<_, _>>()?;
        GradedSpec::new(self.dilation().clone(), phi.target.clone(), blocks)
    }
}

impl<S: Coeff, T: Coeff> Extend<S, T> for SylvesterPair<S> {
    type Output = SylvesterPair<T>;

    fn extend(&self, phi: &RingMorphism<S, T>) -> Result<SylvesterPair<T>, Error> {
        SylvesterPair::new(self.sub().extend(phi)?, self.quot().extend(phi)?)
    }
}

impl<S: Coeff, T: Coeff> Extend<S, T> for FilteredPresentation<S> {
    type Output = FilteredPresentation<T>;

    fn extend(&self, phi: &RingMorphism<S, T>) -> Result<FilteredPresentation<T>, Error> {
        let spec = Arc::new(self.spec().extend(phi)?);
        let blocks = self.blocks().iter().map(|(&k, b)| (k, phi.matrix_k(b))).collect();
        FilteredPresentation::new(spec, blocks)
    }
}

impl<S: Coeff, T: Coeff> Extend<S, T> for UnipotentGauge<S> {
    type Output = UnipotentGauge<T>;

    fn extend(&self, phi: &RingMorphism<S, T>) -> Result<UnipotentGauge<T>, Error> {
        let spec = Arc::new(self.spec().extend(phi)?);
        let blocks = self.blocks().iter().map(|(&k, b)| (k, phi.matrix_k(b))).collect();
        UnipotentGauge::new(spec, blocks)
    }
}

impl<S: Coeff, T: Coeff> Extend<S, T> for ExtClass<S> {
    type Output = ExtClass<T>;

    fn extend(&self, phi: &RingMorphism<S, T>) -> Result<ExtClass<T>, Error> {
        Ok(ExtClass::from_parts(
            self.pair().extend(phi)?,
            phi.matrix_k(self.rep()),
            phi.matrix_k(self.reduced()),
            phi.matrix_k(self.certificate()),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub checks: Vec<Check>,
}

impl CheckReport {
    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Compares the extension classes of `pair` before and after extending.
///
/// Checks that the window dimension is unchanged, that reduction of
/// `samples` random representatives (degrees two beyond the window on each
/// side) commutes with the morphism, and that the target window basis is the
/// image of the source basis, so the target is free on it.
pub fn check_ext_basechange<S: Coeff, T: Coeff>(
    phi: &RingMorphism<S, T>,
    pair: &SylvesterPair<S>,
    samples: usize,
    seed: u64,
) -> Result<CheckReport, Error> {
    let mut report = CheckReport::default();
    let target = pair.extend(phi)?;

    let (ds, dt) = (pair.delta(), target.delta());
    let (bs, bt) = (pair.ext_basis(), target.ext_basis());
    report.push(
        "delta",
        ds == dt && bs.len() == ds && bt.len() == dt,
        format!("source {}, target {}", ds, dt),
    );

    let mut sampler = Sampler::new(seed);
    let (lo, hi) = pair.window();
    let (r, s) = pair.block_shape();
    let mut failures = 0;
    for _ in 0..samples {
        let u: MatrixK<S> = sampler.matrix_k(pair.sub().ring(), r, s, lo - 2, hi + 2);
        let before = pair.reduce(&u)?;
        let after = target.reduce(&phi.matrix_k(&u))?;
        if phi.matrix_k(before.reduced()) != *after.reduced()
            || phi.matrix_k(before.certificate()) != *after.certificate()
        {
            failures += 1;
        }
    }
    report.push(
        "reduce-commutes",
        failures == 0,
        format!("{} of {} samples disagree", failures, samples),
    );

    let image: Vec<MatrixK<T>> = bs.iter().map(|b| phi.matrix_k(b)).collect();
    report.push(
        "image-basis",
        image == bt,
        format!("{} basis elements", bt.len()),
    );
    Ok(report)
}

/// Compares Hom spaces in a fixed window before and after extending.
///
/// Checks that images of source morphisms are target morphisms, and records
/// the rational dimensions of the target Hom and of the `C′`-span of the
/// images. The last check passes when the images span the target.
pub fn check_hom_basechange<S: Coeff, T: Coeff>(
    phi: &RingMorphism<S, T>,
    m: &DiffModule<S>,
    n: &DiffModule<S>,
    window: (i64, i64),
) -> Result<CheckReport, Error> {
    let mut report = CheckReport::default();
    let (m2, n2) = (m.extend(phi)?, n.extend(phi)?);
    let source = hom_space(m, n, window)?;
    let target = hom_space(&m2, &n2, window)?;

    let images: Vec<MatrixK<T>> = source.basis.iter().map(|f| phi.matrix_k(f)).collect();
    let mut bad = 0;
    for f in &images {
        if !is_morphism(f, &m2, &n2)? {
            bad += 1;
        }
    }
    report.push(
        "images-are-morphisms",
        bad == 0,
        format!("{} of {} images fail", bad, images.len()),
    );

    let ring = &phi.target;
    let span = if window.0 <= window.1 {
        let layout = Layout {
            lo: window.0,
            hi: window.1,
            rows: n2.rank(),
            cols: m2.rank(),
            rank: ring.rank(),
        };
        let mut space = RowSpace::new();
        for f in &images {
            for k in 0..ring.rank() {
                let mut e = vec![Rational::zero(); ring.rank()];
                e[k] = Rational::one();
                let scaled = f.scale_coeff(&T::from_coordinates(ring, &e));
                space.insert(&layout.flatten(ring, &scaled));
            }
        }
        space.dim()
    } else {
        0
    };
    report.push(
        "onto",
        span == target.rational_dim,
        format!(
            "source generators {}, source rational dim {}, image span {}, target rational dim {}",
            source.basis.len(),
            source.rational_dim,
            span,
            target.rational_dim
        ),
    );
    Ok(report)
}
