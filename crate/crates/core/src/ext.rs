//! Extensions of pure modules.
//!
//! For pure modules `P_i = z^{μ_i}A_i` and `P_j = z^{μ_j}A_j` with
//! `μ_i < μ_j`, extensions of `P_j` by `P_i` are the cokernel of
//!
//! ```text
//! t(X) = (σX)·B − A·X,   A = z^{μ_i}A_i,  B = z^{μ_j}A_j,
//! ```
//!
//! acting on `r_i × r_j` matrices over `K`. Every coset has exactly one
//! representative supported in degrees `μ_i..μ_j` (the *window*), which is
//! what [`SylvesterPair::reduce`] computes, along with a certificate `X`
//! such that `t(X) = rep − reduced`.

use std::collections::BTreeMap;
use std::sync::Arc;



use crate::algebra::{Coeff, LaurentPoly, Matrix, MatrixK};
use crate::diffmod::{is_morphism, DiffModule, PureModule};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct SylvesterPair<C> {
    sub: PureModule<C>,
    quot: PureModule<C>,
}

impl<C: Coeff> SylvesterPair<C> {
    pub fn new(sub: PureModule<C>, quot: PureModule<C>) -> Result<Self, Error> {
        if sub.dilation() != quot.dilation() {
            return Err(Error::SpecMismatch("pure modules use different dilations".into()));
        }
        if sub.ring() != quot.ring() {
            return Err(Error::RingMismatch(format!("{} vs {}", sub.ring(), quot.ring())));
        }
        if sub.slope() >= quot.slope() {
            return Err(Error::InvalidModule(format!(
                "sub slope {} must be smaller than quotient slope {}",
                sub.slope(),
                quot.slope()
            )));
        }
        Ok(Self { sub, quot })
    }

    pub fn sub(&self) -> &PureModule<C> {
        &self.sub
    }

    pub fn quot(&self) -> &PureModule<C> {
        &self.quot
    }

    pub fn gap(&self) -> i64 {
        self.quot.slope() - self.sub.slope()
    }

    /// Inclusive degree bounds `(μ_i, μ_j − 1)` of window representatives.
    pub fn window(&self) -> (i64, i64) {
        (self.sub.slope(), self.quot.slope() - 1)
    }

    /// Shape `(r_i, r_j)` of blocks.
    pub fn block_shape(&self) -> (usize, usize) {
        (self.sub.rank(), self.quot.rank())
    }

    /// Rank of the extension module: `r_i · r_j · (μ_j − μ_i)`.
    pub fn delta(&self) -> usize {
        self.sub.rank() * self.quot.rank() * self.gap() as usize
    }

    fn check_shape(&self, x: &MatrixK<C>) -> Result<(), Error> {
        if x.shape() != self.block_shape() {
            return Err(Error::Shape(format!(
                "expected a {}x{} block, got {}x{}",
                self.sub.rank(),
                self.quot.rank(),
                x.rows(),
                x.cols()
            )));
        }
        Ok(())
    }

    /// `(σX)·z^{μ_j}A_j − z^{μ_i}A_i·X`
    pub fn t_apply(&self, x: &MatrixK<C>) -> Result<MatrixK<C>, Error> {
        self.check_shape(x)?;
        let dil = self.sub.dilation();
        let left = x.sigma(dil).mul(&self.quot.matrix())?;
        let right = self.sub.matrix().mul(x)?;
        left.sub(&right)
    }

    /// The window representative of `U + im t` with its certificate.
    ///
    /// Highest degrees `d ≥ μ_j` are cleared first: subtracting
    /// `t(q^{−m}·U_d·A_j⁻¹·z^m)`, `m = d − μ_j`, removes degree `d` and adds
    /// mass at `d − g`. Then degrees `d < μ_i` are cleared with
    /// `t(−A_i⁻¹·U_d·z^{d−μ_i})`, which adds mass at `d + g`. Neither phase
    /// pushes mass past the window, so each terminates.
    pub fn reduce(&self, u: &MatrixK<C>) -> Result<ExtClass<C>, Error> {
        self.check_shape(u)?;
        let (mu_i, mu_j) = (self.sub.slope(), self.quot.slope());
        let g = self.gap();
        let dil = self.sub.dilation();
        let a_i = self.sub.leading();
        let a_j = self.quot.leading();
        let a_i_inv = self.sub.leading_inverse();
        let a_j_inv = self.quot.leading_inverse();

        let mut layers = by_degree(u);
        let mut cert: BTreeMap<i64, Matrix<C>> = BTreeMap::new();

        while let Some((&d, _)) = layers.iter().next_back() {
            if d < mu_j {
                break;
            }
            let u_d = layers.remove(&d).unwrap();
            let m = d - mu_j;
            let c = u_d.mul(a_j_inv)?.scale(&C::from_rational(dil.pow(-m)));
            accumulate(&mut layers, d - g, &a_i.mul(&c)?);
            accumulate(&mut cert, m, &c);
        }
        while let Some((&d, _)) = layers.iter().next() {
            if d >= mu_i {
                break;
            }
            let u_d = layers.remove(&d).unwrap();
            let m = d - mu_i;
            let c = a_i_inv.mul(&u_d)?.neg();
            let injected = c.mul(a_j)?.scale(&C::from_rational(dil.pow(m)));
            accumulate(&mut layers, d + g, &injected.neg());
            accumulate(&mut cert, m, &c);
        }

        let (r, s) = self.block_shape();
        Ok(ExtClass {
            pair: Arc::new(self.clone()),
            rep: u.clone(),
            reduced: from_degrees(r, s, &layers),
            certificate: from_degrees(r, s, &cert),
        })
    }

    /// The monomial basis `z^d·E_ab`, `μ_i ≤ d < μ_j`, ordered by degree
    /// then row then column.
    pub fn ext_basis(&self) -> Vec<MatrixK<C>> {
        let (r, s) = self.block_shape();
        let (lo, hi) = self.window();
        let mut out = Vec::with_capacity(self.delta());
        for d in lo..=hi {
            for a in 0..r {
                for b in 0..s {
                    let mut e = MatrixK::zeros(r, s);
                    e.set(a, b, LaurentPoly::monomial(C::one(), d));
                    out.push(e);
                }
            }
        }
        out
    }

    /// The rank `r_i + r_j` module with matrix `[[z^{μ_i}A_i, U], [0, z^{μ_j}A_j]]`.
    pub fn build_extension(&self, u: &MatrixK<C>) -> Result<DiffModule<C>, Error> {
        self.check_shape(u)?;
        let (r, s) = self.block_shape();
        let mut c = MatrixK::zeros(r + s, r + s);
        c.set_block(0, 0, &self.sub.matrix());
        c.set_block(0, r, u);
        c.set_block(r, r, &self.quot.matrix());
        Ok(DiffModule::new_unchecked(
            self.sub.dilation().clone(),
            self.sub.ring().clone(),
            c,
        ))
    }

    /// Matrix of the inclusion `P_i → R_U`.
    pub fn injection(&self) -> MatrixK<C> {
        let (r, s) = self.block_shape();
        let mut m = MatrixK::zeros(r + s, r);
        m.set_block(0, 0, &MatrixK::identity(r));
        m
    }

    /// Matrix of the projection `R_U → P_j`.
    pub fn projection(&self) -> MatrixK<C> {
        let (r, s) = self.block_shape();
        let mut m = MatrixK::zeros(s, r + s);
        m.set_block(0, r, &MatrixK::identity(s));
        m
    }

    /// `[[I, X], [0, I]]`, the morphism of extensions `R_U → R_{U + t(X)}`.
    pub fn unipotent(&self, x: &MatrixK<C>) -> MatrixK<C> {
        let (r, s) = self.block_shape();
        let mut f = MatrixK::identity(r + s);
        f.set_block(0, r, x);
        f
    }
}

fn by_degree<C: Coeff>(u: &MatrixK<C>) -> BTreeMap<i64, Matrix<C>> {
    let mut out: BTreeMap<i64, Matrix<C>> = BTreeMap::new();
    for a in 0..u.rows() {
        for b in 0..u.cols() {
            for (d, c) in u.get(a, b).terms() {
                out.entry(d)
                    .or_insert_with(|| Matrix::zeros(u.rows(), u.cols()))
                    .set(a, b, c.clone());
            }
        }
    }
    out
}

fn accumulate<C: Coeff>(layers: &mut BTreeMap<i64, Matrix<C>>, d: i64, m: &Matrix<C>) {
    let sum = match layers.remove(&d) {
        Some(existing) => existing.add(m).expect("same block shape"),
        None => m.clone(),
    };
    if !sum.is_zero() {
        layers.insert(d, sum);
    }
}

fn from_degrees<C: Coeff>(rows: usize, cols: usize, layers: &BTreeMap<i64, Matrix<C>>) -> MatrixK<C> {
    let mut out = MatrixK::zeros(rows, cols);
    for (&d, m) in layers {
        for a in 0..rows {
            for b in 0..cols {
                out.get_mut(a, b).add_term(d, m.get(a, b));
            }
        }
    }
    out
}

/// An extension class: a representative, its window reduction and the
/// certificate `X` with `t(X) + reduced = rep`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtClass<C> {
    pair: Arc<SylvesterPair<C>>,
    rep: MatrixK<C>,
    reduced: MatrixK<C>,
    certificate: MatrixK<C>,
}

impl<C: Coeff> ExtClass<C> {
    pub(crate) fn from_parts(
        pair: SylvesterPair<C>,
        rep: MatrixK<C>,
        reduced: MatrixK<C>,
        certificate: MatrixK<C>,
    ) -> Self {
        Self {
            pair: Arc::new(pair),
            rep,
            reduced,
            certificate,
        }
    }

    pub fn pair(&self) -> &SylvesterPair<C> {
        &self.pair
    }

    pub fn rep(&self) -> &MatrixK<C> {
        &self.rep
    }

    pub fn reduced(&self) -> &MatrixK<C> {
        &self.reduced
    }

    pub fn certificate(&self) -> &MatrixK<C> {
        &self.certificate
    }

    /// Re-checks `t(certificate) + reduced = rep` and the window support.
    pub fn verify(&self) -> bool {
        let (lo, hi) = self.pair.window();
        if !self.reduced.supported_in(lo, hi) {
            return false;
        }
        match self.pair.t_apply(&self.certificate) {
            Ok(tx) => tx.add(&self.reduced).is_ok_and(|s| s == self.rep),
            Err(_) => false,
        }
    }

    /// Baer sum: the class of `rep + other.rep`.
    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.pair != other.pair {
            return Err(Error::PairMismatch);
        }
        self.pair.reduce(&self.rep.add(&other.rep)?)
    }

    /// The class of `λ·rep`.
    pub fn scale(&self, lambda: &C) -> Self {
        self.pair
            .reduce(&self.rep.scale_coeff(lambda))
            .expect("scaling preserves the block shape")
    }

    pub fn is_split(&self) -> bool {
        self.reduced.is_zero()
    }

    /// For a split class, the gauge `I − [[0, X], [0, 0]]` taking `C_U` to the
    /// direct sum `C_0`; checked before it is returned.
    pub fn splitting_gauge(&self) -> Option<MatrixK<C>> {
        if !self.is_split() {
            return None;
        }
        let f = self.pair.unipotent(&self.certificate.neg());
        let src = self.pair.build_extension(&self.rep).ok()?;
        let (r, s) = self.pair.block_shape();
        let dst = self.pair.build_extension(&MatrixK::zeros(r, s)).ok()?;
        if is_morphism(&f, &src, &dst).ok()? {
            Some(f)
        } else {
            None
        }
    }

    /// Coordinates of `reduced` in [`SylvesterPair::ext_basis`].
    pub fn coordinates(&self) -> Vec<C> {
        let (r, s) = self.pair.block_shape();
        let (lo, hi) = self.pair.window();
        let mut out = Vec::with_capacity(self.pair.delta());
        for d in lo..=hi {
            for a in 0..r {
                for b in 0..s {
                    out.push(self.reduced.get(a, b).coeff(d).cloned().unwrap_or_else(C::zero));
                }
            }
        }
        out
    }
}
