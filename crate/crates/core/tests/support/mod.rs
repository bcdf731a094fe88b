//! Test-side oracles that do not go through the library's arithmetic:
//! Laurent matrices as degree maps, σ by explicit powers of q, and a dense
//! Gaussian eliminator over the rationals.

#![allow(dead_code)]

use std::collections::BTreeMap;

use isograd::algebra::Rational;
use isograd::{Coeff, MatrixK, QPoly};
use num_traits::{One, Zero};

/// A Laurent polynomial as `degree ↦ coefficient`, zeros removed.
pub type Poly = BTreeMap<i64, Rational>;
pub type Mat = Vec<Vec<Poly>>;

pub fn from_lib(m: &MatrixK<Rational>) -> Mat {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| m.get(i, j).terms().map(|(d, c)| (d, c.clone())).collect())
                .collect()
        })
        .collect()
}

pub fn to_lib(m: &Mat) -> MatrixK<Rational> {
    let rows = m
        .iter()
        .map(|row| row.iter().map(|p| QPoly::from_terms(p.iter().map(|(&d, c)| (d, c.clone())))).collect())
        .collect();
    isograd::Matrix::from_rows(rows).unwrap()
}

fn add_into(acc: &mut Poly, d: i64, c: Rational) {
    let e = acc.entry(d).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&d);
    }
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (da, ca) in a {
        for (db, cb) in b {
            add_into(&mut out, da + db, ca * cb);
        }
    }
    out
}

pub fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (&d, c) in b {
        add_into(&mut out, d, c.clone());
    }
    out
}

pub fn poly_scale(a: &Poly, s: &Rational) -> Poly {
    let mut out = Poly::new();
    for (&d, c) in a {
        add_into(&mut out, d, c * s);
    }
    out
}

/// `q^d`, by repeated multiplication.
pub fn qpow(q: &Rational, d: i64) -> Rational {
    let base = if d < 0 { q.recip() } else { q.clone() };
    let mut r = Rational::one();
    for _ in 0..d.unsigned_abs() {
        r *= &base;
    }
    r
}

pub fn sigma(q: &Rational, a: &Poly) -> Poly {
    a.iter().map(|(&d, c)| (d, c * qpow(q, d))).collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), k);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(Poly::new(), |acc, l| poly_add(&acc, &poly_mul(&a[i][l], &b[l][j]))))
                .collect()
        })
        .collect()
}

pub fn mat_sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| poly_add(x, &poly_scale(y, &-Rational::one()))).collect())
        .collect()
}

pub fn mat_sigma(q: &Rational, a: &Mat) -> Mat {
    a.iter().map(|r| r.iter().map(|p| sigma(q, p)).collect()).collect()
}

/// `X ↦ (σX)·right − left·X`.
pub fn t_apply(q: &Rational, left: &Mat, right: &Mat, x: &Mat) -> Mat {
    mat_sub(&mat_mul(&mat_sigma(q, x), right), &mat_mul(left, x))
}

/// Rank of a dense rational matrix by Gaussian elimination.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    rref(rows.to_vec()).1.len()
}

/// Reduced row echelon form and pivot columns.
pub fn rref(mut m: Vec<Vec<Rational>>) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

/// Solves `A x = b`; `None` when inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let ncols = a.first().map_or(0, Vec::len);
    let aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, x)| row.iter().cloned().chain(std::iter::once(x.clone())).collect())
        .collect();
    let (red, pivots) = rref(aug);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (row, &p) in red.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

/// The operator `X ↦ (σX)·right − left·X` restricted to `rows × cols`
/// matrices supported in `xlo..=xhi`, as a dense matrix whose columns are
/// the images of monomial unit matrices and whose rows are output
/// coordinates `(degree, row, col)`.
pub struct TSystem {
    pub rows: usize,
    pub cols: usize,
    pub xlo: i64,
    pub xhi: i64,
    pub keys: Vec<(i64, usize, usize)>,
    pub matrix: Vec<Vec<Rational>>,
}

impl TSystem {
    pub fn new(q: &Rational, left: &Mat, right: &Mat, xlo: i64, xhi: i64) -> Self {
        let rows = left.len();
        let cols = right.len();
        let mut images = Vec::new();
        let mut keyset = std::collections::BTreeSet::new();
        for d in xlo..=xhi {
            for a in 0..rows {
                for b in 0..cols {
                    let mut x: Mat = vec![vec![Poly::new(); cols]; rows];
                    x[a][b].insert(d, Rational::one());
                    let img = t_apply(q, left, right, &x);
                    let mut col = BTreeMap::new();
                    for (i, row) in img.iter().enumerate() {
                        for (j, p) in row.iter().enumerate() {
                            for (&e, c) in p {
                                keyset.insert((e, i, j));
                                col.insert((e, i, j), c.clone());
                            }
                        }
                    }
                    images.push(col);
                }
            }
        }
        let keys: Vec<_> = keyset.into_iter().collect();
        let matrix = keys
            .iter()
            .map(|k| images.iter().map(|col| col.get(k).cloned().unwrap_or_else(Rational::zero)).collect())
            .collect();
        Self {
            rows,
            cols,
            xlo,
            xhi,
            keys,
            matrix,
        }
    }

    pub fn nvars(&self) -> usize {
        ((self.xhi - self.xlo + 1) as usize) * self.rows * self.cols
    }

    /// Dimension of the kernel of the restricted operator.
    pub fn kernel_dim(&self) -> usize {
        self.nvars() - rank(&self.matrix)
    }

    /// A preimage of `target` within the degree range, if one exists.
    pub fn preimage(&self, target: &Mat) -> Option<Mat> {
        let mut b = vec![Rational::zero(); self.keys.len()];
        for (i, row) in target.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                for (&e, c) in p {
                    match self.keys.binary_search(&(e, i, j)) {
                        Ok(k) => b[k] = c.clone(),
                        Err(_) => return None,
                    }
                }
            }
        }
        let x = solve(&self.matrix, &b)?;
        let mut out: Mat = vec![vec![Poly::new(); self.cols]; self.rows];
        let mut it = x.into_iter();
        for d in self.xlo..=self.xhi {
            for row in out.iter_mut() {
                for p in row.iter_mut() {
                    let c = it.next().unwrap();
                    if !c.is_zero() {
                        p.insert(d, c);
                    }
                }
            }
        }
        Some(out)
    }

    /// `dim {X : t(X) supported in lo..=hi}`.
    pub fn dim_landing_in(&self, lo: i64, hi: i64) -> usize {
        let outside: Vec<Vec<Rational>> = self
            .keys
            .iter()
            .zip(&self.matrix)
            .filter(|((e, _, _), _)| *e < lo || *e > hi)
            .map(|(_, row)| row.clone())
            .collect();
        self.nvars() - rank(&outside)
    }
}

/// `z^μ · a` as a test-side matrix.
pub fn shifted(a: &isograd::Matrix<Rational>, mu: i64) -> Mat {
    (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .map(|j| {
                    let c = a.get(i, j);
                    let mut p = Poly::new();
                    if !c.is_zero() {
                        p.insert(mu, c.clone());
                    }
                    p
                })
                .collect()
        })
        .collect()
}

pub fn is_zero(m: &Mat) -> bool {
    m.iter().all(|r| r.iter().all(BTreeMap::is_empty))
}

/// Whether a coefficient of a generic library value equals the rational `r`.
pub fn coeff_is<C: Coeff>(c: &C, r: &Rational) -> bool {
    c.sub_ref(&C::from_rational(r.clone())).is_zero()
}
