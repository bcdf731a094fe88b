//! Difference modules in matrix form.
//!
//! A module is `(Kⁿ, Φ_A)` with `Φ_A(X) = A⁻¹σX` for an invertible `A`. A
//! morphism `(Kⁿ, Φ_A) → (Kᵖ, Φ_B)` is a `p × n` matrix `F` with
//! `(σF)A = BF`, and an invertible `F` moves `A` to `F[A] = (σF)AF⁻¹`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::algebra::linalg::{nullspace, RowSpace};
use crate::algebra::{CoeffRing, Coeff, Dilation, LaurentPoly, Matrix, MatrixK, Rational, Ring};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct DiffModule<C> {
    dilation: Dilation,
    ring: CoeffRing,
    matrix: MatrixK<C>,
}

impl<C: Coeff> DiffModule<C> {
    pub fn new(dilation: Dilation, ring: CoeffRing, matrix: MatrixK<C>) -> Result<Self, Error> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::Shape(format!(
                "module matrix must be square and nonempty, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        check_ring(&ring, &matrix)?;
        matrix
            .try_invert()
            .map_err(|e| Error::InvalidModule(e.to_string()))?;
        Ok(Self {
            dilation,
            ring,
            matrix,
        })
    }

    /// For matrices that are invertible by construction (block triangular
    /// with invertible diagonal).
    pub(crate) fn new_unchecked(dilation: Dilation, ring: CoeffRing, matrix: MatrixK<C>) -> Self {
        Self {
            dilation,
            ring,
            matrix,
        }
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &MatrixK<C> {
        &self.matrix
    }

    pub fn dilation(&self) -> &Dilation {
        &self.dilation
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }
}

pub(crate) fn check_ring<C: Coeff>(ring: &CoeffRing, m: &MatrixK<C>) -> Result<(), Error> {
    for p in m.entries() {
        for (_, c) in p.terms() {
            if !c.belongs_to(ring) {
                return Err(Error::RingMismatch(format!("coefficient {:?} is not in {}", c, ring)));
            }
        }
    }
    Ok(())
}

/// A pure module `z^μ·A₀` with `A₀` a constant invertible matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PureModule<C> {
    dilation: Dilation,
    ring: CoeffRing,
    slope: i64,
    leading: Matrix<C>,
    leading_inv: Matrix<C>,
}

impl<C: Coeff> PureModule<C> {
    pub fn new(dilation: Dilation, ring: CoeffRing, slope: i64, leading: Matrix<C>) -> Result<Self, Error> {
        if !leading.is_square() || leading.rows() == 0 {
            return Err(Error::Shape(format!(
                "leading matrix must be square and nonempty, got {}x{}",
                leading.rows(),
                leading.cols()
            )));
        }
        if let Some(c) = leading.entries().find(|c| !c.belongs_to(&ring)) {
            return Err(Error::RingMismatch(format!("coefficient {:?} is not in {}", c, ring)));
        }
        let leading_inv = leading.try_invert_const().map_err(|e| match e {
            Error::NotInvertible(det) => Error::NotInvertible(format!("leading matrix has determinant {}", det)),
            other => other,
        })?;
        Ok(Self {
            dilation,
            ring,
            slope,
            leading,
            leading_inv,
        })
    }

    pub fn rank(&self) -> usize {
        self.leading.rows()
    }

    pub fn slope(&self) -> i64 {
        self.slope
    }

    pub fn leading(&self) -> &Matrix<C> {
        &self.leading
    }

    pub fn leading_inverse(&self) -> &Matrix<C> {
        &self.leading_inv
    }

    pub fn dilation(&self) -> &Dilation {
        &self.dilation
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    /// `z^μ·A₀`
    pub fn matrix(&self) -> MatrixK<C> {
        self.leading.to_laurent(self.slope)
    }

    pub fn as_diffmodule(&self) -> DiffModule<C> {
        DiffModule::new_unchecked(self.dilation.clone(), self.ring.clone(), self.matrix())
    }
}

fn check_compatible<C: Coeff>(m: &DiffModule<C>, n: &DiffModule<C>) -> Result<(), Error> {
    if m.dilation != n.dilation {
        return Err(Error::SpecMismatch("modules use different dilations".into()));
    }
    if m.ring != n.ring {
        return Err(Error::RingMismatch(format!("{} vs {}", m.ring, n.ring)));
    }
    Ok(())
}

/// `F[A] = (σF)·A·F⁻¹`.
pub fn gauge<C: Coeff>(f: &MatrixK<C>, m: &DiffModule<C>) -> Result<DiffModule<C>, Error> {
    if f.shape() != m.matrix.shape() {
        return Err(Error::Shape(format!(
            "gauge is {}x{} but the module has rank {}",
            f.rows(),
            f.cols(),
            m.rank()
        )));
    }
    let f_inv = f
        .try_invert()
        .map_err(|e| Error::GaugeNotInvertible(e.to_string()))?;
    let matrix = f.sigma(&m.dilation).mul(&m.matrix)?.mul(&f_inv)?;
    Ok(DiffModule::new_unchecked(m.dilation.clone(), m.ring.clone(), matrix))
}

/// Whether `(σF)·A_M = A_N·F`.
pub fn is_morphism<C: Coeff>(f: &MatrixK<C>, m: &DiffModule<C>, n: &DiffModule<C>) -> Result<bool, Error> {
    check_compatible(m, n)?;
    if f.shape() != (n.rank(), m.rank()) {
        return Err(Error::Shape(format!(
            "morphism must be {}x{}, got {}x{}",
            n.rank(),
            m.rank(),
            f.rows(),
            f.cols()
        )));
    }
    Ok(f.sigma(&m.dilation).mul(&m.matrix)? == n.matrix.mul(f)?)
}

/// Morphisms `M → N` supported in a degree window, as a module over the
/// coefficient ring.
#[derive(Clone, Debug, PartialEq)]
pub struct HomSpace<C> {
    pub window: (i64, i64),
    /// Generators of the solution module; a basis when `free` holds.
    pub basis: Vec<MatrixK<C>>,
    /// Dimension of the solution space over the rationals.
    pub rational_dim: usize,
    /// Whether `basis` is a free basis (`rank(C)·|basis| = rational_dim`).
    pub free: bool,
}

/// Solves `(σF)A_M = A_N F` coefficientwise for all `F` supported in
/// `window.0..=window.1`.
pub fn hom_space<C: Coeff>(m: &DiffModule<C>, n: &DiffModule<C>, window: (i64, i64)) -> Result<HomSpace<C>, Error> {
    check_compatible(m, n)?;
    let (lo, hi) = window;
    if lo > hi {
        return Ok(HomSpace {
            window,
            basis: Vec::new(),
            rational_dim: 0,
            free: true,
        });
    }
    let ring = m.ring.clone();
    let layout = Layout {
        lo,
        hi,
        rows: n.rank(),
        cols: m.rank(),
        rank: ring.rank(),
    };
    let ring_basis: Vec<C> = (0..layout.rank)
        .map(|k| C::from_coordinates(&ring, &unit_vector(layout.rank, k)))
        .collect();

    // Columns of the coefficientwise system, keyed by (degree, row, col, coordinate).
    let mut equations: BTreeMap<(i64, usize, usize, usize), usize> = BTreeMap::new();
    let mut columns: Vec<Vec<(usize, Rational)>> = Vec::with_capacity(layout.len());
    for deg in lo..=hi {
        let qd = m.dilation.pow(deg);
        for a in 0..layout.rows {
            for b in 0..layout.cols {
                for e in &ring_basis {
                    let mut residual: BTreeMap<(usize, usize), LaurentPoly<C>> = BTreeMap::new();
                    let lead = e.scale_rational(&qd);
                    for j in 0..layout.cols {
                        let t = m.matrix.get(b, j).scale(&lead).shift(deg);
                        let slot = residual.entry((a, j)).or_insert_with(LaurentPoly::zero);
                        *slot = slot.add_ref(&t);
                    }
                    for i in 0..layout.rows {
                        let t = n.matrix.get(i, a).scale(e).shift(deg);
                        let slot = residual.entry((i, b)).or_insert_with(LaurentPoly::zero);
                        *slot = slot.sub_ref(&t);
                    }
                    let mut col = Vec::new();
                    for ((i, j), p) in residual {
                        for (d, c) in p.terms() {
                            for (k, x) in c.coordinates(&ring).into_iter().enumerate() {
                                if x.is_zero() {
                                    continue;
                                }
                                let next = equations.len();
                                let row = *equations.entry((d, i, j, k)).or_insert(next);
                                col.push((row, x));
                            }
                        }
                    }
                    columns.push(col);
                }
            }
        }
    }
    let nvars = columns.len();
    let mut system = vec![vec![Rational::zero(); nvars]; equations.len()];
    for (var, col) in columns.into_iter().enumerate() {
        for (row, x) in col {
            system[row][var] = x;
        }
    }
    let solutions = nullspace(&system, nvars);
    let rational_dim = solutions.len();

    let basis_vectors = if layout.rank == 1 {
        solutions
    } else {
        select_generators(&ring, &layout, &ring_basis, solutions)
    };
    let free = basis_vectors.len() * layout.rank == rational_dim;
    let basis = basis_vectors
        .iter()
        .map(|v| layout.unflatten(&ring, v))
        .collect();
    Ok(HomSpace {
        window,
        basis,
        rational_dim,
        free,
    })
}

pub fn hom_basis<C: Coeff>(m: &DiffModule<C>, n: &DiffModule<C>, window: (i64, i64)) -> Result<Vec<MatrixK<C>>, Error> {
    Ok(hom_space(m, n, window)?.basis)
}

/// Coordinates of window-supported matrices as flat rational vectors.
pub(crate) struct Layout {
    pub lo: i64,
    pub hi: i64,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
}

impl Layout {
    pub fn len(&self) -> usize {
        ((self.hi - self.lo + 1).max(0) as usize) * self.rows * self.cols * self.rank
    }

    pub fn flatten<C: Coeff>(&self, ring: &CoeffRing, f: &MatrixK<C>) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.len());
        for deg in self.lo..=self.hi {
            for a in 0..self.rows {
                for b in 0..self.cols {
                    match f.get(a, b).coeff(deg) {
                        Some(c) => out.extend(c.coordinates(ring)),
                        None => out.extend(std::iter::repeat_n(Rational::zero(), self.rank)),
                    }
                }
            }
        }
        out
    }

    pub fn unflatten<C: Coeff>(&self, ring: &CoeffRing, v: &[Rational]) -> MatrixK<C> {
        let mut f = MatrixK::zeros(self.rows, self.cols);
        let mut chunks = v.chunks(self.rank);
        for deg in self.lo..=self.hi {
            for a in 0..self.rows {
                for b in 0..self.cols {
                    let c = C::from_coordinates(ring, chunks.next().unwrap());
                    f.get_mut(a, b).add_term(deg, &c);
                }
            }
        }
        f
    }
}

fn unit_vector(n: usize, k: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[k] = Rational::one();
    v
}

/// Greedy choice of module generators: repeatedly take the candidate whose
/// cyclic submodule adds the most rational dimension.
fn select_generators<C: Coeff>(
    ring: &CoeffRing,
    layout: &Layout,
    ring_basis: &[C],
    candidates: Vec<Vec<Rational>>,
) -> Vec<Vec<Rational>> {
    let orbit = |v: &[Rational]| -> Vec<Vec<Rational>> {
        let f: MatrixK<C> = layout.unflatten(ring, v);
        ring_basis
            .iter()
            .map(|b| layout.flatten(ring, &f.scale_coeff(b)))
            .collect()
    };
    let orbits: Vec<Vec<Vec<Rational>>> = candidates.iter().map(|v| orbit(v)).collect();
    let total = candidates.len();
    let mut span = RowSpace::new();
    let mut chosen = Vec::new();
    let mut used = vec![false; candidates.len()];
    while span.dim() < total {
        let mut best: Option<(usize, usize)> = None;
        for (idx, orb) in orbits.iter().enumerate() {
            if used[idx] {
                continue;
            }
            let mut trial = span.clone();
            let gain = orb.iter().filter(|w| trial.insert(w)).count();
            if gain > 0 && best.is_none_or(|(_, g)| gain > g) {
                best = Some((idx, gain));
            }
        }
        let Some((idx, _)) = best else { break };
        used[idx] = true;
        for w in &orbits[idx] {
            span.insert(w);
        }
        chosen.push(candidates[idx].clone());
    }
    chosen
}

/// A degree window containing the support of every Laurent-polynomial
/// morphism between two pure modules.
///
/// Different slopes admit no nonzero morphism (compare top and bottom
/// degrees), giving the empty window `(0, −1)`. For equal slopes a nonzero
/// coefficient `F_m` forces `q^m` to be a ratio of eigenvalues of the
/// leading matrices, and `|q^m|` is bounded by products of operator norms.
pub fn default_hom_window<C: Coeff>(m: &PureModule<C>, n: &PureModule<C>) -> (i64, i64) {
    if m.slope != n.slope {
        return (0, -1);
    }
    let ring = &m.ring;
    let norm = |a: &Matrix<C>| infinity_norm(&regular_representation(ring, a));
    let up = norm(&n.leading) * norm(&m.leading_inv);
    let down = norm(&m.leading) * norm(&n.leading_inv);
    let mut base = m.dilation.q().abs();
    if base < Rational::one() {
        base = base.recip();
    }
    let d = floor_log(&base, &up).max(floor_log(&base, &down));
    (-d, d)
}

/// Largest `e ≥ 0` with `base^e ≤ bound` (0 when `bound < base`).
fn floor_log(base: &Rational, bound: &Rational) -> i64 {
    let mut e = 0;
    let mut p = base.clone();
    while &p <= bound {
        e += 1;
        p = &p * base;
    }
    e
}

fn infinity_norm(m: &[Vec<Rational>]) -> Rational {
    m.iter()
        .map(|row| row.iter().map(|x| x.abs()).fold(Rational::zero(), |a, b| a + b))
        .max()
        .unwrap_or_else(Rational::zero)
}


/// The rational matrix of `v ↦ A·v` on `C^r ≅ Q^{r·rank}`.
pub(crate) fn regular_representation<C: Coeff>(ring: &CoeffRing, a: &Matrix<C>) -> Vec<Vec<Rational>> {
    let d = ring.rank();
    let n = a.rows() * d;
    let mut rep = vec![vec![Rational::zero(); n]; n];
    for b in 0..a.cols() {
        for l in 0..d {
            let e = C::from_coordinates(ring, &unit_vector(d, l));
            for i in 0..a.rows() {
                let coords = a.get(i, b).mul_ref(&e).coordinates(ring);
                for (k, x) in coords.into_iter().enumerate() {
                    rep[i * d + k][b * d + l] = x;
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat, Residue};
    use std::sync::Arc;

    type P = LaurentPoly<Rational>;

    fn q(v: i64) -> Dilation {
        Dilation::new(int(v)).unwrap()
    }

    fn scalar_module(dil: &Dilation, a: P) -> DiffModule<Rational> {
        DiffModule::new(dil.clone(), CoeffRing::Rationals, Matrix::from_rows(vec![vec![a]]).unwrap()).unwrap()
    }

    fn pure(dil: &Dilation, slope: i64, a: i64) -> PureModule<Rational> {
        PureModule::new(
            dil.clone(),
            CoeffRing::Rationals,
            slope,
            Matrix::from_rows(vec![vec![int(a)]]).unwrap(),
        )
        .unwrap()
    }

    fn one_by_one(p: P) -> MatrixK<Rational> {
        Matrix::from_rows(vec![vec![p]]).unwrap()
    }

    #[test]
    fn gauge_examples() {
        let d = q(2);
        let m = scalar_module(&d, P::one());
        assert_eq!(gauge(&MatrixK::identity(1), &m).unwrap(), m);
        let g = gauge(&one_by_one(P::z()), &m).unwrap();
        assert_eq!(g.matrix(), &one_by_one(P::constant(int(2))));
        let bad = one_by_one(P::from_terms([(0, int(1)), (1, int(1))]));
        assert!(matches!(gauge(&bad, &m), Err(Error::GaugeNotInvertible(_))));
    }

    #[test]
    fn morphism_examples() {
        let d = q(2);
        let m = scalar_module(&d, P::one());
        let n = scalar_module(&d, P::constant(int(2)));
        assert!(is_morphism(&MatrixK::identity(1), &m, &m).unwrap());
        assert!(is_morphism(&MatrixK::zeros(1, 1), &m, &n).unwrap());
        assert!(is_morphism(&one_by_one(P::z()), &m, &n).unwrap());
        assert!(!is_morphism(&one_by_one(P::one()), &m, &n).unwrap());
        assert!(matches!(
            is_morphism(&MatrixK::zeros(2, 1), &m, &n),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn gauge_is_isomorphism_onto_image() {
        let d = q(3);
        let a = Matrix::from_rows(vec![
            vec![P::from_terms([(1, int(1))]), P::from_terms([(0, int(2)), (2, int(-1))])],
            vec![P::zero(), P::constant(int(5))],
        ])
        .unwrap();
        let m = DiffModule::new(d, CoeffRing::Rationals, a).unwrap();
        let f = Matrix::from_rows(vec![
            vec![P::one(), P::from_terms([(-1, rat(1, 2)), (3, int(1))])],
            vec![P::zero(), P::from_terms([(2, int(-1))])],
        ])
        .unwrap();
        let gm = gauge(&f, &m).unwrap();
        assert!(is_morphism(&f, &m, &gm).unwrap());
    }

    #[test]
    fn hom_examples() {
        let d = q(2);
        let one = pure(&d, 0, 1).as_diffmodule();
        let two = pure(&d, 0, 2).as_diffmodule();
        assert_eq!(hom_basis(&one, &one, (-3, 3)).unwrap(), vec![one_by_one(P::one())]);
        assert_eq!(hom_basis(&one, &two, (-3, 3)).unwrap(), vec![one_by_one(P::z())]);
        let steep = pure(&d, 2, 1).as_diffmodule();
        assert!(hom_basis(&one, &steep, (-5, 5)).unwrap().is_empty());
        assert!(hom_basis(&steep, &one, (-5, 5)).unwrap().is_empty());
        assert!(hom_basis(&one, &one, (2, -3)).unwrap().is_empty());
    }

    #[test]
    fn hom_of_rank_two_identity() {
        let d = q(2);
        let m = PureModule::<Rational>::new(d, CoeffRing::Rationals, 1, Matrix::identity(2)).unwrap().as_diffmodule();
        let space = hom_space(&m, &m, (-2, 2)).unwrap();
        assert_eq!(space.basis.len(), 4);
        assert!(space.free);
        for f in &space.basis {
            assert!(is_morphism(f, &m, &m).unwrap());
        }
    }

    #[test]
    fn default_windows() {
        let d = q(2);
        assert_eq!(default_hom_window(&pure(&d, 0, 1), &pure(&d, 2, 1)), (0, -1));
        let (lo, hi) = default_hom_window(&pure(&d, 0, 1), &pure(&d, 0, 1));
        assert!(lo <= 0 && 0 <= hi);
        let (lo, hi) = default_hom_window(&pure(&d, 0, 1), &pure(&d, 0, 4));
        assert!(lo <= 2 && 2 <= hi);
        let one = pure(&d, 0, 1).as_diffmodule();
        let four = pure(&d, 0, 4).as_diffmodule();
        let found = hom_basis(&one, &four, (lo, hi)).unwrap();
        assert_eq!(found, vec![one_by_one(P::monomial(int(1), 2))]);

        let dinv = Dilation::new(rat(1, 2)).unwrap();
        let (lo, hi) = default_hom_window(&pure(&dinv, 0, 1), &pure(&dinv, 0, 4));
        assert!(lo <= -2 && -2 <= hi);
    }

    #[test]
    fn hom_over_dual_numbers_is_free() {
        let ring = Arc::new(crate::algebra::QuotientRing::new(vec![int(0), int(0), int(1)]).unwrap());
        let cr = CoeffRing::Quotient(ring.clone());
        let d = q(2);
        let p = |a: i64| {
            PureModule::new(
                d.clone(),
                cr.clone(),
                0,
                Matrix::from_rows(vec![vec![Residue::from_rational(int(a))]]).unwrap(),
            )
            .unwrap()
            .as_diffmodule()
        };
        let space = hom_space(&p(1), &p(2), (-3, 3)).unwrap();
        assert_eq!(space.rational_dim, 2);
        assert_eq!(space.basis.len(), 1);
        assert!(space.free);
        assert!(is_morphism(&space.basis[0], &p(1), &p(2)).unwrap());
    }
}
