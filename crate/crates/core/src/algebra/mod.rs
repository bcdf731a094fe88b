//! Exact coefficient rings, Laurent polynomials with the dilation `σ`, and
//! matrices over them.

pub mod laurent;
pub mod linalg;
pub mod matrix;
pub mod residue;
pub mod scalar;

pub use laurent::{Dilation, LaurentPoly};
pub use matrix::{Matrix, MatrixK, NotInvertible};
pub use residue::{QuotientRing, Residue};
pub use scalar::{format_rational, int, parse_rational, rat, CoeffRing, Coeff, Rational, Ring};
