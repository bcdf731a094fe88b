//! Dense matrices over a commutative ring.
//!
//! The same type holds constant matrices (`Matrix<C>`) and matrices over the
//! Laurent ring (`MatrixK<C>`). Determinants and inverses use Berkowitz's
//! division-free characteristic polynomial, which works over any commutative
//! ring, including residue rings with zero divisors.

use std::fmt;

use num_traits::Zero;

use super::laurent::{Dilation, LaurentPoly};
use super::scalar::{Coeff, Ring};
use crate::Error;

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Matrices over `K = C[z, z⁻¹]`.
pub type MatrixK<C> = Matrix<LaurentPoly<C>>;

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).map(|c| c.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn check_same_shape(&self, rhs: &Self) -> Result<(), Error> {
        if self.shape() != rhs.shape() {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, Error> {
        self.check_same_shape(rhs)?;
        Ok(self.zip(rhs, T::add_ref))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, Error> {
        self.check_same_shape(rhs)?;
        Ok(self.zip(rhs, T::sub_ref))
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(T::neg_ref)
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.mul_ref(s))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, Error> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).add_ref(&a.mul_ref(b));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// The `rows × cols` block with top-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    /// Coefficients `[1, c₁, …, cₙ]` of `det(λI − M)`, by Berkowitz's
    /// algorithm (no divisions).
    pub fn charpoly(&self) -> Result<Vec<T>, Error> {
        if !self.is_square() {
            return Err(Error::Shape("characteristic polynomial of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut vect = vec![T::one()];
        for r in 0..n {
            // q_0 = 1, q_1 = -a_rr, q_{i+2} = -R S^i C with S the leading r×r block
            let mut q = Vec::with_capacity(r + 2);
            q.push(T::one());
            q.push(self.get(r, r).neg_ref());
            let mut col: Vec<T> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for _ in 0..r {
                let mut dot = T::zero();
                for (l, c) in col.iter().enumerate() {
                    dot = dot.add_ref(&self.get(r, l).mul_ref(c));
                }
                q.push(dot.neg_ref());
                col = (0..r)
                    .map(|i| {
                        let mut acc = T::zero();
                        for (l, c) in col.iter().enumerate() {
                            let a = self.get(i, l);
                            if !a.is_zero() && !c.is_zero() {
                                acc = acc.add_ref(&a.mul_ref(c));
                            }
                        }
                        acc
                    })
                    .collect();
            }
            let next: Vec<T> = (0..r + 2)
                .map(|i| {
                    let mut acc = T::zero();
                    for (j, v) in vect.iter().enumerate().take(i + 1) {
                        acc = acc.add_ref(&q[i - j].mul_ref(v));
                    }
                    acc
                })
                .collect();
            vect = next;
        }
        Ok(vect)
    }

    pub fn det(&self) -> Result<T, Error> {
        let cp = self.charpoly()?;
        let last = cp.last().unwrap().clone();
        Ok(if self.rows % 2 == 0 { last } else { last.neg_ref() })
    }

    /// Inverse via Cayley–Hamilton: `M⁻¹ = −c_n⁻¹ (M^{n−1} + c₁M^{n−2} + … + c_{n−1})`.
    ///
    /// `unit_inverse` inverts ring elements when they are units. On failure
    /// the determinant is returned.
    pub fn inverse_with(&self, unit_inverse: impl Fn(&T) -> Option<T>) -> Result<Self, InverseError<T>> {
        let cp = self.charpoly().map_err(InverseError::Shape)?;
        let n = self.rows;
        let cn = cp[n].clone();
        let det = if n % 2 == 0 { cn.clone() } else { cn.neg_ref() };
        let Some(cn_inv) = unit_inverse(&cn) else {
            return Err(InverseError::Singular(det));
        };
        let mut acc = Self::identity(n);
        for c in cp.iter().take(n).skip(1) {
            acc = acc.mul(self).expect("square");
            for i in 0..n {
                let v = acc.get(i, i).add_ref(c);
                acc.set(i, i, v);
            }
        }
        let inv = acc.scale(&cn_inv.neg_ref());
        if inv.mul(self).expect("square") != Self::identity(n) {
            return Err(InverseError::Singular(det));
        }
        Ok(inv)
    }
}

#[derive(Debug)]
pub enum InverseError<T> {
    Shape(Error),
    Singular(T),
}

impl<C: Coeff> Matrix<C> {
    /// Inverse over the coefficient ring.
    pub fn try_invert_const(&self) -> Result<Self, Error> {
        self.inverse_with(C::inverse).map_err(|e| match e {
            InverseError::Shape(e) => e,
            InverseError::Singular(det) => Error::NotInvertible(det.to_string()),
        })
    }

    /// The matrix as a Laurent matrix concentrated in `degree`.
    pub fn to_laurent(&self, degree: i64) -> MatrixK<C> {
        self.map(|c| LaurentPoly::monomial(c.clone(), degree))
    }
}

/// Determinant that failed the unit test in `try_invert`.
#[derive(Debug, Clone, PartialEq)]
pub struct NotInvertible<C> {
    pub det: LaurentPoly<C>,
}

impl<C: Coeff> fmt::Display for NotInvertible<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "determinant {} is not a unit of the Laurent ring", self.det)
    }
}

impl<C: Coeff> MatrixK<C> {
    /// Inverse over `K`; succeeds iff the determinant is `c·z^m` with `c` a unit.
    pub fn try_invert(&self) -> Result<Self, NotInvertible<C>> {
        assert!(self.is_square(), "try_invert on a non-square matrix");
        self.inverse_with(LaurentPoly::unit_inverse).map_err(|e| match e {
            InverseError::Singular(det) => NotInvertible { det },
            InverseError::Shape(_) => unreachable!(),
        })
    }

    /// Entrywise `σ`.
    pub fn sigma(&self, dil: &Dilation) -> Self {
        self.map(|f| dil.apply(f))
    }

    /// The coefficient matrix of `z^degree`.
    pub fn coeff_matrix(&self, degree: i64) -> Matrix<C> {
        self.map(|f| f.coeff(degree).cloned().unwrap_or_else(C::zero))
    }

    /// `(min, max)` degree over all entries, `None` for the zero matrix.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        let mut range: Option<(i64, i64)> = None;
        for f in self.entries() {
            if let (Some(lo), Some(hi)) = (f.min_degree(), f.max_degree()) {
                range = Some(match range {
                    None => (lo, hi),
                    Some((a, b)) => (a.min(lo), b.max(hi)),
                });
            }
        }
        range
    }

    /// Whether every entry is supported in `lo..=hi`.
    pub fn supported_in(&self, lo: i64, hi: i64) -> bool {
        self.degree_range().is_none_or(|(a, b)| a >= lo && b <= hi)
    }

    pub fn map_coeffs<T: Coeff>(&self, f: impl Fn(&C) -> T) -> MatrixK<T> {
        self.map(|p| p.map_coeffs(&f))
    }

    pub fn scale_coeff(&self, s: &C) -> Self {
        self.map(|p| p.scale(s))
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for i in 0..self.rows {
            list.entry(&&self.data[i * self.cols..(i + 1) * self.cols]);
        }
        list.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{int, rat, Rational};

    type P = LaurentPoly<Rational>;

    fn lp(terms: &[(i64, i64)]) -> P {
        P::from_terms(terms.iter().map(|&(d, c)| (d, int(c))))
    }

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&c| int(c)).collect()).collect()).unwrap()
    }

    #[test]
    fn charpoly_small() {
        let m = qm(&[&[1, 2], &[3, 4]]);
        assert_eq!(m.charpoly().unwrap(), vec![int(1), int(-5), int(-2)]);
        assert_eq!(m.det().unwrap(), int(-2));
        let m3 = qm(&[&[2, 0, 1], &[1, 3, 0], &[0, 1, 1]]);
        // cofactor expansion: 2(3·1 − 0·1) − 0 + 1(1·1 − 3·0) = 7
        assert_eq!(m3.det().unwrap(), int(7));
    }

    #[test]
    fn const_inverse() {
        let m = qm(&[&[1, 2], &[3, 4]]);
        let inv = m.try_invert_const().unwrap();
        assert_eq!(
            inv,
            Matrix::from_rows(vec![vec![int(-2), int(1)], vec![rat(3, 2), rat(-1, 2)]]).unwrap()
        );
        assert!(qm(&[&[1, 2], &[2, 4]]).try_invert_const().is_err());
    }

    #[test]
    fn laurent_inverse_examples() {
        let id = MatrixK::<Rational>::identity(3);
        assert_eq!(id.try_invert().unwrap(), id);

        let z = Matrix::from_rows(vec![vec![lp(&[(1, 1)])]]).unwrap();
        let zi = Matrix::from_rows(vec![vec![lp(&[(-1, 1)])]]).unwrap();
        assert_eq!(z.try_invert().unwrap(), zi);

        let one_plus_z = Matrix::from_rows(vec![vec![lp(&[(0, 1), (1, 1)])]]).unwrap();
        let err = one_plus_z.try_invert().unwrap_err();
        assert_eq!(err.det, lp(&[(0, 1), (1, 1)]));
    }

    #[test]
    fn unimodular_laurent_matrix() {
        // [[z, 1 + z^2], [0, z^-1]] has determinant 1
        let m = Matrix::from_rows(vec![
            vec![lp(&[(1, 1)]), lp(&[(0, 1), (2, 1)])],
            vec![P::zero(), lp(&[(-1, 1)])],
        ])
        .unwrap();
        let inv = m.try_invert().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), MatrixK::identity(2));
        assert_eq!(inv.mul(&m).unwrap(), MatrixK::identity(2));
    }

    #[test]
    fn shape_errors() {
        let a = MatrixK::<Rational>::zeros(2, 3);
        assert!(matches!(a.mul(&a), Err(Error::Shape(_))));
        assert!(matches!(a.add(&MatrixK::zeros(3, 2)), Err(Error::Shape(_))));
    }

    #[test]
    fn sigma_matrix_examples() {
        let d = Dilation::new(int(2)).unwrap();
        let id = MatrixK::<Rational>::identity(2);
        assert_eq!(id.sigma(&d), id);
        let m = Matrix::from_rows(vec![vec![lp(&[(1, 1)]), P::zero()], vec![P::zero(), lp(&[(-1, 1)])]]).unwrap();
        let expect = Matrix::from_rows(vec![
            vec![lp(&[(1, 2)]), P::zero()],
            vec![P::zero(), P::monomial(rat(1, 2), -1)],
        ])
        .unwrap();
        assert_eq!(m.sigma(&d), expect);
    }
}
