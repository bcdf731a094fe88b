//! Exact classification of filtered q-difference modules with a fixed graded
//! part.
//!
//! Objects live over the Laurent ring `K = C[z, z⁻¹]` with `σ(z) = qz`, where
//! the constants `C` are the rationals or a residue ring `Q[t]/(p)`. All code
//! is generic over the constants through [`Coeff`]; the aliases below fix the
//! two concrete choices.
//!
//! - [`algebra`]: coefficient rings, Laurent polynomials, matrices.
//! - [`diffmod`]: difference modules `(Kⁿ, A⁻¹σ)`, morphisms, gauge
//!   transformations, Hom spaces.
//! - [`ext`]: the semilinear Sylvester operator `X ↦ (σX)B − AX`, its
//!   cokernel (extension classes) and their module structure.
//! - [`moduli`]: block upper-triangular presentations, the unipotent gauge
//!   group, normal forms and the dimension of the classifying space.
//! - [`basechange`]: extension of scalars along ring morphisms.
//! - [`codec`] and [`cli`]: the JSON interchange format and the `isograd`
//!   command line.

pub mod algebra;
pub mod basechange;
pub mod cli;
pub mod codec;
pub mod diffmod;
pub mod ext;
pub mod moduli;
pub mod sample;

pub use algebra::{
    CoeffRing, Coeff, Dilation, LaurentPoly, Matrix, MatrixK, QuotientRing, Rational, Residue, Ring,
};
pub use basechange::{CheckReport, Extend, RingMorphism};
pub use diffmod::{DiffModule, HomSpace, PureModule};
pub use ext::{ExtClass, SylvesterPair};
pub use moduli::{FilteredPresentation, GradedSpec, NormalForm, UnipotentGauge};

/// Laurent polynomials with rational coefficients.
pub type QPoly = LaurentPoly<Rational>;
/// Matrices over `Q[z, z⁻¹]`.
pub type QMatrix = MatrixK<Rational>;
pub type QDiffModule = DiffModule<Rational>;
pub type QPureModule = PureModule<Rational>;
pub type QSylvesterPair = SylvesterPair<Rational>;
pub type QExtClass = ExtClass<Rational>;
pub type QGradedSpec = GradedSpec<Rational>;
pub type QPresentation = FilteredPresentation<Rational>;

/// Laurent polynomials over a residue ring `Q[t]/(p)`.
pub type RPoly = LaurentPoly<Residue>;
pub type RMatrix = MatrixK<Residue>;
pub type RDiffModule = DiffModule<Residue>;
pub type RPureModule = PureModule<Residue>;
pub type RSylvesterPair = SylvesterPair<Residue>;
pub type RExtClass = ExtClass<Residue>;
pub type RGradedSpec = GradedSpec<Residue>;
pub type RPresentation = FilteredPresentation<Residue>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not invertible: {0}")]
    NotInvertible(String),
    #[error("gauge matrix is not invertible over K: {0}")]
    GaugeNotInvertible(String),
    #[error("extension classes belong to different pairs")]
    PairMismatch,
    #[error("graded spec mismatch: {0}")]
    SpecMismatch(String),
    #[error("object is not over the source ring of the morphism: {0}")]
    RingMismatch(String),
    #[error("cannot truncate a presentation with a single graded piece")]
    Underflow,
    #[error("invalid dilation q = {0}: q must be a rational other than 0, 1, -1")]
    InvalidDilation(String),
    #[error("invalid coefficient ring: {0}")]
    InvalidRing(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
}

impl Error {
    /// Stable short code used in JSON error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape",
            Error::NotInvertible(_) => "not-invertible",
            Error::GaugeNotInvertible(_) => "gauge-not-invertible",
            Error::PairMismatch => "pair",
            Error::SpecMismatch(_) => "spec",
            Error::RingMismatch(_) => "ring",
            Error::Underflow => "underflow",
            Error::InvalidDilation(_) => "dilation",
            Error::InvalidRing(_) => "coeff-ring",
            Error::InvalidModule(_) => "module",
        }
    }
}
