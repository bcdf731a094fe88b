//! Seeded random objects for tests, property checks and base-change reports.

use std::sync::Arc;

use num_traits::Zero;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{rat, CoeffRing, Coeff, Dilation, LaurentPoly, Matrix, MatrixK, Rational};
use crate::diffmod::PureModule;
use crate::moduli::{FilteredPresentation, GradedSpec, UnipotentGauge};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn usize_in(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn i64_in(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    /// `n/d` with `|n| ≤ 5`, `1 ≤ d ≤ 3`.
    pub fn rational(&mut self) -> Rational {
        rat(self.rng.random_range(-5..=5), self.rng.random_range(1..=3))
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if !r.is_zero() {
                return r;
            }
        }
    }

    pub fn dilation(&mut self) -> Dilation {
        let choices = [rat(2, 1), rat(3, 1), rat(-2, 1), rat(1, 2), rat(3, 2), rat(-1, 3)];
        Dilation::new(choices.choose(&mut self.rng).unwrap().clone()).unwrap()
    }

    pub fn coeff<C: Coeff>(&mut self, ring: &CoeffRing) -> C {
        let coords: Vec<Rational> = (0..ring.rank()).map(|_| self.rational()).collect();
        C::from_coordinates(ring, &coords)
    }

    /// Each degree in `lo..=hi` is filled with probability one half.
    pub fn poly<C: Coeff>(&mut self, ring: &CoeffRing, lo: i64, hi: i64) -> LaurentPoly<C> {
        let mut p = LaurentPoly::zero();
        for d in lo..=hi {
            if self.rng.random_bool(0.5) {
                let c: C = self.coeff(ring);
                p.add_term(d, &c);
            }
        }
        p
    }

    pub fn matrix_k<C: Coeff>(&mut self, ring: &CoeffRing, rows: usize, cols: usize, lo: i64, hi: i64) -> MatrixK<C> {
        Matrix::from_fn(rows, cols, |_, _| self.poly(ring, lo, hi))
    }

    /// `L·U` with unit lower `L` and upper `U` whose diagonal is a nonzero
    /// rational, so the determinant is a nonzero rational.
    pub fn invertible_constant<C: Coeff>(&mut self, ring: &CoeffRing, n: usize) -> Matrix<C> {
        let l = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => C::one(),
            std::cmp::Ordering::Greater => self.coeff(ring),
            std::cmp::Ordering::Less => C::zero(),
        });
        let u = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => C::from_rational(self.nonzero_rational()),
            std::cmp::Ordering::Less => self.coeff(ring),
            std::cmp::Ordering::Greater => C::zero(),
        });
        l.mul(&u).unwrap()
    }

    pub fn pure<C: Coeff>(&mut self, dilation: &Dilation, ring: &CoeffRing, slope: i64, rank: usize) -> PureModule<C> {
        let a = self.invertible_constant(ring, rank);
        PureModule::new(dilation.clone(), ring.clone(), slope, a).unwrap()
    }

    /// `k` distinct slopes drawn from `slopes.0..=slopes.1`, ranks in
    /// `1..=max_rank`.
    pub fn graded_spec<C: Coeff>(
        &mut self,
        dilation: &Dilation,
        ring: &CoeffRing,
        k: usize,
        max_rank: usize,
        slopes: (i64, i64),
    ) -> Arc<GradedSpec<C>> {
        let pool: Vec<i64> = (slopes.0..=slopes.1).collect();
        assert!(k <= pool.len(), "not enough distinct slopes");
        let mut chosen: Vec<i64> = pool.choose_multiple(&mut self.rng, k).copied().collect();
        chosen.sort_unstable();
        let blocks = chosen
            .into_iter()
            .map(|s| {
                let r = self.usize_in(1, max_rank);
                self.pure(dilation, ring, s, r)
            })
            .collect();
        Arc::new(GradedSpec::new(dilation.clone(), ring.clone(), blocks).unwrap())
    }

    /// Every strict-upper block supported in `lo..=hi`.
    pub fn presentation<C: Coeff>(&mut self, spec: &Arc<GradedSpec<C>>, lo: i64, hi: i64) -> FilteredPresentation<C> {
        let blocks = spec
            .pairs()
            .map(|(i, j)| {
                let m = self.matrix_k(spec.ring(), spec.block(i).rank(), spec.block(j).rank(), lo, hi);
                ((i, j), m)
            })
            .collect();
        FilteredPresentation::new(spec.clone(), blocks).unwrap()
    }

    pub fn unipotent<C: Coeff>(&mut self, spec: &Arc<GradedSpec<C>>, lo: i64, hi: i64) -> UnipotentGauge<C> {
        let blocks = spec
            .pairs()
            .map(|(i, j)| {
                let m = self.matrix_k(spec.ring(), spec.block(i).rank(), spec.block(j).rank(), lo, hi);
                ((i, j), m)
            })
            .collect();
        UnipotentGauge::new(spec.clone(), blocks).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{QuotientRing, Residue};

    #[test]
    fn seeded_and_valid() {
        let mut a = Sampler::new(7);
        let mut b = Sampler::new(7);
        let d = a.dilation();
        assert_eq!(d, b.dilation());
        let spec: Arc<GradedSpec<Rational>> = a.graded_spec(&d, &CoeffRing::Rationals, 3, 2, (-3, 6));
        let again: Arc<GradedSpec<Rational>> = b.graded_spec(&d, &CoeffRing::Rationals, 3, 2, (-3, 6));
        assert_eq!(spec, again);
        assert_eq!(spec.k(), 3);

        let ring = CoeffRing::Quotient(Arc::new(QuotientRing::new(vec![rat(-2, 1), rat(0, 1), rat(0, 1), rat(1, 1)]).unwrap()));
        for _ in 0..5 {
            let m: Matrix<Residue> = a.invertible_constant(&ring, 3);
            assert!(m.try_invert_const().is_ok());
        }
    }
}
