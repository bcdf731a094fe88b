//! Linear algebra over the rationals, used to solve coefficientwise systems.

use num_traits::{One, Zero};

use super::scalar::Rational;

/// An incrementally built row-echelon basis of a subspace of `Q^n`.
#[derive(Clone, Debug, Default)]
pub struct RowSpace {
    /// Rows with pivot column `pivots[k]`, normalized to 1 there.
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current basis.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        for x in r.iter_mut() {
            *x *= &inv;
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }
}

pub fn rank(vectors: &[Vec<Rational>]) -> usize {
    let mut space = RowSpace::new();
    for v in vectors {
        space.insert(v);
    }
    space.dim()
}

/// A basis of `{x : A x = 0}` for the `rows × ncols` matrix `a`, in reduced
/// form: each basis vector has a 1 at its own free column and 0 at the others.
pub fn nullspace(a: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut space = RowSpace::new();
    for row in a {
        debug_assert_eq!(row.len(), ncols);
        space.insert(row);
    }
    let pivot_set: std::collections::BTreeSet<usize> = space.pivots.iter().copied().collect();
    let free: Vec<usize> = (0..ncols).filter(|c| !pivot_set.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); ncols];
            x[f] = Rational::one();
            for (row, &p) in space.rows.iter().zip(&space.pivots) {
                if !row[f].is_zero() {
                    x[p] = -row[f].clone();
                }
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::int;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn rank_and_membership() {
        let mut s = RowSpace::new();
        assert!(s.insert(&v(&[1, 2, 3])));
        assert!(s.insert(&v(&[0, 1, 1])));
        assert!(!s.insert(&v(&[2, 5, 7])));
        assert!(s.contains(&v(&[1, 3, 4])));
        assert!(!s.contains(&v(&[0, 0, 1])));
        assert_eq!(rank(&[v(&[1, 1]), v(&[2, 2])]), 1);
    }

    #[test]
    fn nullspace_solves() {
        let a = vec![v(&[1, 2, 3]), v(&[0, 1, 1])];
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        for x in &ns {
            for row in &a {
                let dot: Rational = row.iter().zip(x).map(|(r, y)| r * y).sum();
                assert!(dot.is_zero());
            }
        }
        assert_eq!(nullspace(&[v(&[1, 0]), v(&[0, 1])], 2).len(), 0);
        assert_eq!(nullspace(&[], 3).len(), 3);
    }
}
