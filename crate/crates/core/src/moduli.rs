//! Filtered modules with fixed graded part.
//!
//! A point of the classifying set is a block upper-triangular matrix `A_U`
//! with diagonal blocks `z^{μ_i}A_i` and strict-upper blocks `U_{i,j}`, taken
//! up to the action `F[A] = (σF)AF⁻¹` of the group of block-unipotent
//! matrices (identity diagonal blocks). [`normal_form`] sweeps the
//! super-diagonals in order and reduces each block to its window
//! representative; the window coordinates parametrize the orbits.

use std::collections::BTreeMap;
use std::sync::Arc;


use crate::algebra::{CoeffRing, Coeff, Dilation, MatrixK};
use crate::diffmod::{check_ring, is_morphism, DiffModule, PureModule};
use crate::ext::{ExtClass, SylvesterPair};
use crate::Error;

/// The graded part `P₁ ⊕ … ⊕ P_k`, slopes strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedSpec<C> {
    dilation: Dilation,
    ring: CoeffRing,
    blocks: Vec<PureModule<C>>,
    offsets: Vec<usize>,
}

impl<C: Coeff> GradedSpec<C> {
    pub fn new(dilation: Dilation, ring: CoeffRing, blocks: Vec<PureModule<C>>) -> Result<Self, Error> {
        if blocks.is_empty() {
            return Err(Error::InvalidModule("a graded spec needs at least one block".into()));
        }
        for b in &blocks {
            if b.dilation() != &dilation {
                return Err(Error::SpecMismatch("blocks use different dilations".into()));
            }
            if b.ring() != &ring {
                return Err(Error::RingMismatch(format!("block over {} in a spec over {}", b.ring(), ring)));
            }
        }
        if let Some(w) = blocks.windows(2).find(|w| w[0].slope() >= w[1].slope()) {
            return Err(Error::InvalidModule(format!(
                "slopes must be strictly increasing, got {} then {}",
                w[0].slope(),
                w[1].slope()
            )));
        }
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut acc = 0;
        for b in &blocks {
            offsets.push(acc);
            acc += b.rank();
        }
        offsets.push(acc);
        Ok(Self {
            dilation,
            ring,
            blocks,
            offsets,
        })
    }

    /// Number of graded pieces.
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    /// Total rank `n = Σ r_i`.
    pub fn rank(&self) -> usize {
        self.offsets[self.k()]
    }

    pub fn blocks(&self) -> &[PureModule<C>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &PureModule<C> {
        &self.blocks[i]
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn dilation(&self) -> &Dilation {
        &self.dilation
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    /// Index pairs `(i, j)`, `i < j`, in lexicographic order (0-based).
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let k = self.k();
        (0..k).flat_map(move |i| (i + 1..k).map(move |j| (i, j)))
    }

    pub fn pair(&self, i: usize, j: usize) -> SylvesterPair<C> {
        SylvesterPair::new(self.blocks[i].clone(), self.blocks[j].clone())
            .expect("slopes are strictly increasing")
    }

    /// `δ_{i,j} = r_i r_j (μ_j − μ_i)`
    pub fn delta(&self, i: usize, j: usize) -> usize {
        let (a, b) = (&self.blocks[i], &self.blocks[j]);
        a.rank() * b.rank() * (b.slope() - a.slope()) as usize
    }

    /// Dimension of the classifying space: `Σ_{i<j} δ_{i,j}`.
    pub fn dimension(&self) -> usize {
        self.pairs().map(|(i, j)| self.delta(i, j)).sum()
    }

    /// Window coordinates in the last column: `Σ_{i<k} δ_{i,k}`.
    pub fn fiber_dimension(&self) -> usize {
        let k = self.k();
        (0..k.saturating_sub(1)).map(|i| self.delta(i, k - 1)).sum()
    }

    /// The spec without its last block.
    pub fn truncate(&self) -> Result<Self, Error> {
        if self.k() < 2 {
            return Err(Error::Underflow);
        }
        Self::new(
            self.dilation.clone(),
            self.ring.clone(),
            self.blocks[..self.k() - 1].to_vec(),
        )
    }

    fn block_shape(&self, i: usize, j: usize) -> (usize, usize) {
        (self.blocks[i].rank(), self.blocks[j].rank())
    }

    fn zero_blocks(&self) -> BTreeMap<(usize, usize), MatrixK<C>> {
        self.pairs()
            .map(|(i, j)| {
                let (r, s) = self.block_shape(i, j);
                ((i, j), MatrixK::zeros(r, s))
            })
            .collect()
    }

    /// Block-diagonal matrix with blocks `z^{μ_i}A_i`.
    pub fn block_diagonal(&self) -> MatrixK<C> {
        let n = self.rank();
        let mut a = MatrixK::zeros(n, n);
        for (i, b) in self.blocks.iter().enumerate() {
            a.set_block(self.offsets[i], self.offsets[i], &b.matrix());
        }
        a
    }
}

fn check_same_spec<C: Coeff>(a: &GradedSpec<C>, b: &GradedSpec<C>) -> Result<(), Error> {
    if a != b {
        return Err(Error::SpecMismatch("objects are over different graded specs".into()));
    }
    Ok(())
}

/// Checks a map of strict-upper blocks against `spec` and fills in zeros.
fn complete_blocks<C: Coeff>(
    spec: &GradedSpec<C>,
    blocks: BTreeMap<(usize, usize), MatrixK<C>>,
) -> Result<BTreeMap<(usize, usize), MatrixK<C>>, Error> {
    let mut all = spec.zero_blocks();
    for ((i, j), m) in blocks {
        if i >= j || j >= spec.k() {
            return Err(Error::Shape(format!(
                "block ({}, {}) is not strictly upper triangular for k = {}",
                i + 1,
                j + 1,
                spec.k()
            )));
        }
        if m.shape() != spec.block_shape(i, j) {
            let (r, s) = spec.block_shape(i, j);
            return Err(Error::Shape(format!(
                "block ({}, {}) must be {}x{}, got {}x{}",
                i + 1,
                j + 1,
                r,
                s,
                m.rows(),
                m.cols()
            )));
        }
        check_ring(spec.ring(), &m)?;
        all.insert((i, j), m);
    }
    Ok(all)
}

/// Extracts the strict-upper blocks of a block upper-triangular `n × n`
/// matrix whose diagonal blocks must equal `diagonal(i)`.
fn split_blocks<C: Coeff>(
    spec: &GradedSpec<C>,
    m: &MatrixK<C>,
    diagonal: impl Fn(usize) -> MatrixK<C>,
) -> Result<BTreeMap<(usize, usize), MatrixK<C>>, Error> {
    let n = spec.rank();
    if m.shape() != (n, n) {
        return Err(Error::Shape(format!("expected {}x{}, got {}x{}", n, n, m.rows(), m.cols())));
    }
    let k = spec.k();
    for i in 0..k {
        for j in 0..=i {
            let (r, s) = spec.block_shape(i, j);
            let b = m.block(spec.offset(i), spec.offset(j), r, s);
            let ok = if i == j { b == diagonal(i) } else { b.is_zero() };
            if !ok {
                return Err(Error::InvalidModule(format!(
                    "block ({}, {}) breaks the block upper-triangular form",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(spec
        .pairs()
        .map(|(i, j)| {
            let (r, s) = spec.block_shape(i, j);
            ((i, j), m.block(spec.offset(i), spec.offset(j), r, s))
        })
        .collect())
}

/// Strict-upper blocks `U_{i,j}` over a graded spec; indices are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredPresentation<C> {
    spec: Arc<GradedSpec<C>>,
    blocks: BTreeMap<(usize, usize), MatrixK<C>>,
}

impl<C: Coeff> FilteredPresentation<C> {
    /// Missing blocks are zero.
    pub fn new(spec: Arc<GradedSpec<C>>, blocks: BTreeMap<(usize, usize), MatrixK<C>>) -> Result<Self, Error> {
        let blocks = complete_blocks(&spec, blocks)?;
        Ok(Self { spec, blocks })
    }

    /// The split presentation `A₀`.
    pub fn split(spec: Arc<GradedSpec<C>>) -> Self {
        let blocks = spec.zero_blocks();
        Self { spec, blocks }
    }

    /// Reads the blocks off a block upper-triangular matrix with diagonal
    /// `z^{μ_i}A_i`.
    pub fn from_matrix(spec: Arc<GradedSpec<C>>, m: &MatrixK<C>) -> Result<Self, Error> {
        let blocks = split_blocks(&spec, m, |i| spec.block(i).matrix())?;
        Ok(Self { spec, blocks })
    }

    pub fn spec(&self) -> &Arc<GradedSpec<C>> {
        &self.spec
    }

    pub fn block(&self, i: usize, j: usize) -> &MatrixK<C> {
        &self.blocks[&(i, j)]
    }

    pub fn blocks(&self) -> &BTreeMap<(usize, usize), MatrixK<C>> {
        &self.blocks
    }

    /// `A_U`
    pub fn matrix(&self) -> MatrixK<C> {
        let mut a = self.spec.block_diagonal();
        for (&(i, j), b) in &self.blocks {
            a.set_block(self.spec.offset(i), self.spec.offset(j), b);
        }
        a
    }

    /// The difference module `(Kⁿ, Φ_{A_U})`; invertible by construction.
    pub fn assemble(&self) -> DiffModule<C> {
        DiffModule::new_unchecked(self.spec.dilation().clone(), self.spec.ring().clone(), self.matrix())
    }

    /// Whether every block is supported in its window `[μ_i, μ_j − 1]`.
    pub fn is_window_supported(&self) -> bool {
        self.blocks.iter().all(|(&(i, j), b)| {
            let (lo, hi) = self.spec.pair(i, j).window();
            b.supported_in(lo, hi)
        })
    }

    /// Window coordinates of every block, pairs in lexicographic order and
    /// each block in [`SylvesterPair::ext_basis`] order. Only meaningful
    /// for window-supported presentations.
    pub fn window_coordinates(&self) -> Vec<C> {
        let mut out = Vec::with_capacity(self.spec.dimension());
        for (&(i, j), b) in &self.blocks {
            out.extend(block_coordinates(&self.spec.pair(i, j), b));
        }
        out
    }

    /// Inverse of [`FilteredPresentation::window_coordinates`].
    pub fn from_window_coordinates(spec: Arc<GradedSpec<C>>, coords: &[C]) -> Result<Self, Error> {
        if coords.len() != spec.dimension() {
            return Err(Error::Shape(format!(
                "expected {} coordinates, got {}",
                spec.dimension(),
                coords.len()
            )));
        }
        let mut it = coords.iter();
        let mut blocks = BTreeMap::new();
        for (i, j) in spec.pairs() {
            let pair = spec.pair(i, j);
            let mut b = MatrixK::zeros(pair.block_shape().0, pair.block_shape().1);
            for e in pair.ext_basis() {
                let c = it.next().unwrap();
                b = b.add(&e.scale_coeff(c)).expect("same shape");
            }
            blocks.insert((i, j), b);
        }
        Self::new(spec, blocks)
    }
}

fn block_coordinates<C: Coeff>(pair: &SylvesterPair<C>, b: &MatrixK<C>) -> Vec<C> {
    let (r, s) = pair.block_shape();
    let (lo, hi) = pair.window();
    let mut out = Vec::with_capacity(pair.delta());
    for d in lo..=hi {
        for a in 0..r {
            for c in 0..s {
                out.push(b.get(a, c).coeff(d).cloned().unwrap_or_else(C::zero));
            }
        }
    }
    out
}

/// `F = I + (strict-upper blocks X_{i,j})`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnipotentGauge<C> {
    spec: Arc<GradedSpec<C>>,
    blocks: BTreeMap<(usize, usize), MatrixK<C>>,
}

impl<C: Coeff> UnipotentGauge<C> {
    pub fn new(spec: Arc<GradedSpec<C>>, blocks: BTreeMap<(usize, usize), MatrixK<C>>) -> Result<Self, Error> {
        let blocks = complete_blocks(&spec, blocks)?;
        Ok(Self { spec, blocks })
    }

    pub fn identity(spec: Arc<GradedSpec<C>>) -> Self {
        let blocks = spec.zero_blocks();
        Self { spec, blocks }
    }

    /// `I + X·E^{(i,j)}`
    pub fn single(spec: Arc<GradedSpec<C>>, i: usize, j: usize, x: MatrixK<C>) -> Result<Self, Error> {
        Self::new(spec, BTreeMap::from([((i, j), x)]))
    }

    pub fn from_matrix(spec: Arc<GradedSpec<C>>, m: &MatrixK<C>) -> Result<Self, Error> {
        let blocks = split_blocks(&spec, m, |i| MatrixK::identity(spec.block(i).rank()))?;
        Ok(Self { spec, blocks })
    }

    pub fn spec(&self) -> &Arc<GradedSpec<C>> {
        &self.spec
    }

    pub fn block(&self, i: usize, j: usize) -> &MatrixK<C> {
        &self.blocks[&(i, j)]
    }

    pub fn blocks(&self) -> &BTreeMap<(usize, usize), MatrixK<C>> {
        &self.blocks
    }

    pub fn matrix(&self) -> MatrixK<C> {
        let mut f = MatrixK::identity(self.spec.rank());
        for (&(i, j), b) in &self.blocks {
            f.set_block(self.spec.offset(i), self.spec.offset(j), b);
        }
        f
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.values().all(MatrixK::is_zero)
    }

    /// `self ∘ other`, i.e. the matrix product `F_self · F_other`.
    pub fn compose(&self, other: &Self) -> Result<Self, Error> {
        check_same_spec(&self.spec, &other.spec)?;
        let m = self.matrix().mul(&other.matrix())?;
        Self::from_matrix(self.spec.clone(), &m)
    }

    /// `F⁻¹ = Σ_s (−N)^s` with `N = F − I` nilpotent of order `k`.
    pub fn inverse_matrix(&self) -> MatrixK<C> {
        let n = self.spec.rank();
        let nil = self.matrix().sub(&MatrixK::identity(n)).expect("square").neg();
        let mut term = MatrixK::identity(n);
        let mut acc = MatrixK::identity(n);
        for _ in 1..self.spec.k() {
            term = term.mul(&nil).expect("square");
            acc = acc.add(&term).expect("square");
        }
        acc
    }

    pub fn inverse(&self) -> Self {
        Self::from_matrix(self.spec.clone(), &self.inverse_matrix())
            .expect("inverse of a unipotent gauge is unipotent")
    }
}

/// `F[A_U]`, read back as a presentation.
pub fn act<C: Coeff>(f: &UnipotentGauge<C>, p: &FilteredPresentation<C>) -> Result<FilteredPresentation<C>, Error> {
    check_same_spec(&f.spec, &p.spec)?;
    let a = f
        .matrix()
        .sigma(p.spec.dilation())
        .mul(&p.matrix())?
        .mul(&f.inverse_matrix())?;
    FilteredPresentation::from_matrix(p.spec.clone(), &a)
}

/// A window-supported presentation with the gauge reaching it.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm<C> {
    pub source: FilteredPresentation<C>,
    pub presentation: FilteredPresentation<C>,
    pub gauge: UnipotentGauge<C>,
}

impl<C: Coeff> NormalForm<C> {
    /// Re-checks `(σF)·A_source = A_out·F` and window support.
    pub fn verify(&self) -> bool {
        self.presentation.is_window_supported()
            && verify_gauge(&self.gauge, &self.source, &self.presentation)
    }
}

/// Whether `gauge` maps `from` to `to`, checked as the morphism identity
/// `(σF)·A_from = A_to·F` (no inverse needed).
pub fn verify_gauge<C: Coeff>(
    gauge: &UnipotentGauge<C>,
    from: &FilteredPresentation<C>,
    to: &FilteredPresentation<C>,
) -> bool {
    if gauge.spec != from.spec || from.spec != to.spec {
        return false;
    }
    is_morphism(&gauge.matrix(), &from.assemble(), &to.assemble()).unwrap_or(false)
}

/// Working state of the super-diagonal sweep: the full matrices `A` and
/// accumulated `F`.
struct Sweep<'a, C> {
    spec: &'a GradedSpec<C>,
    a: MatrixK<C>,
    f: MatrixK<C>,
}

impl<C: Coeff> Sweep<'_, C> {
    fn block(&self, i: usize, j: usize) -> MatrixK<C> {
        let (r, s) = self.spec.block_shape(i, j);
        self.a.block(self.spec.offset(i), self.spec.offset(j), r, s)
    }

    /// Applies `G = I + Y·E^{(i,j)}`: `A ← (σG)·A·G⁻¹`, `F ← G·F`.
    fn apply_single(&mut self, i: usize, j: usize, y: &MatrixK<C>) {
        let spec = self.spec;
        let n = spec.rank();
        let (oi, oj) = (spec.offset(i), spec.offset(j));
        let (ri, rj) = spec.block_shape(i, j);
        // row block i += σY · row block j
        let sy = y.sigma(spec.dilation());
        let rows_j = self.a.block(oj, 0, rj, n);
        let upd = self.a.block(oi, 0, ri, n).add(&sy.mul(&rows_j).unwrap()).unwrap();
        self.a.set_block(oi, 0, &upd);
        // column block j −= column block i · Y
        let cols_i = self.a.block(0, oi, n, ri);
        let upd = self.a.block(0, oj, n, rj).sub(&cols_i.mul(y).unwrap()).unwrap();
        self.a.set_block(0, oj, &upd);
        // F ← G·F
        let f_rows_j = self.f.block(oj, 0, rj, n);
        let upd = self.f.block(oi, 0, ri, n).add(&y.mul(&f_rows_j).unwrap()).unwrap();
        self.f.set_block(oi, 0, &upd);
    }
}

/// Reduces every block to its window representative.
///
/// Super-diagonals `s = 1, …, k−1` are processed in order. Clearing block
/// `(i, i+s)` with the gauge `I − X·E^{(i,i+s)}`, where `X` is the
/// reduction certificate, only changes blocks `(i, l)` with `l > i+s` and
/// `(l, i+s)` with `l < i`, all of offset larger than `s`.
pub fn normal_form<C: Coeff>(p: &FilteredPresentation<C>) -> NormalForm<C> {
    sweep(p, false, |_, _| {})
}

/// [`normal_form`] together with the presentation reached after each
/// super-diagonal.
pub fn normal_form_traced<C: Coeff>(p: &FilteredPresentation<C>) -> (NormalForm<C>, Vec<FilteredPresentation<C>>) {
    let mut stages = Vec::new();
    let nf = sweep(p, false, |_, stage| stages.push(stage));
    (nf, stages)
}

fn sweep<C: Coeff>(
    p: &FilteredPresentation<C>,
    right_to_left: bool,
    mut observe: impl FnMut(usize, FilteredPresentation<C>),
) -> NormalForm<C> {
    let spec = &*p.spec;
    let k = spec.k();
    let mut state = Sweep {
        spec,
        a: p.matrix(),
        f: MatrixK::identity(spec.rank()),
    };
    for s in 1..k {
        let mut starts: Vec<usize> = (0..k - s).collect();
        if right_to_left {
            starts.reverse();
        }
        for i in starts {
            let j = i + s;
            let class = spec
                .pair(i, j)
                .reduce(&state.block(i, j))
                .expect("block shape matches its pair");
            if !class.certificate().is_zero() {
                state.apply_single(i, j, &class.certificate().neg());
            }
            debug_assert_eq!(&state.block(i, j), class.reduced());
        }
        observe(
            s,
            FilteredPresentation::from_matrix(p.spec.clone(), &state.a).expect("form is preserved"),
        );
    }
    let presentation = FilteredPresentation::from_matrix(p.spec.clone(), &state.a).expect("form is preserved");
    let gauge = UnipotentGauge::from_matrix(p.spec.clone(), &state.f).expect("product of unipotent gauges");
    NormalForm {
        source: p.clone(),
        presentation,
        gauge,
    }
}

/// `Some(witness)` with `act(witness, p) = p'` when the presentations lie in
/// one orbit, `None` otherwise.
pub fn equivalent<C: Coeff>(
    p: &FilteredPresentation<C>,
    p2: &FilteredPresentation<C>,
) -> Result<Option<UnipotentGauge<C>>, Error> {
    check_same_spec(&p.spec, &p2.spec)?;
    let a = normal_form(p);
    let b = normal_form(p2);
    if a.presentation != b.presentation {
        return Ok(None);
    }
    Ok(Some(b.gauge.inverse().compose(&a.gauge)?))
}

/// `Σ_{i<j} r_i r_j (μ_j − μ_i)`
pub fn moduli_dimension<C: Coeff>(spec: &GradedSpec<C>) -> usize {
    spec.dimension()
}

/// Drops `P_k` and the last column of blocks.
pub fn truncate<C: Coeff>(p: &FilteredPresentation<C>) -> Result<FilteredPresentation<C>, Error> {
    let spec = Arc::new(p.spec.truncate()?);
    let last = p.spec.k() - 1;
    let blocks = p
        .blocks
        .iter()
        .filter(|(&(_, j), _)| j != last)
        .map(|(&key, b)| (key, b.clone()))
        .collect();
    FilteredPresentation::new(spec, blocks)
}

/// For `k = 2`, the extension class of `U₁₂`.
pub fn k2_bridge<C: Coeff>(p: &FilteredPresentation<C>) -> Result<ExtClass<C>, Error> {
    if p.spec.k() != 2 {
        return Err(Error::SpecMismatch(format!(
            "the extension-class view needs exactly two graded pieces, got {}",
            p.spec.k()
        )));
    }
    p.spec.pair(0, 1).reduce(p.block(0, 1))
}

#[doc(hidden)]
pub fn normal_form_right_to_left<C: Coeff>(p: &FilteredPresentation<C>) -> NormalForm<C> {
    sweep(p, true, |_, _| {})
}
