//! Local shape of generalized offsets to real algebraic plane curves.

pub mod offset;
pub mod poly;
pub mod predictor;
pub mod puiseux;
pub mod roots;
pub mod scalar;
pub mod series;
pub mod shape;
pub mod upoly;
pub mod verifier;

pub use num_rational::BigRational as Rational;
pub use scalar::{Scalar, Tolerance};
pub use series::{SeriesError, TruncSeries};

/// Series with exact rational coefficients.
pub type ExactSeries = TruncSeries<Rational>;
/// Series with `f64` coefficients.
pub type FloatSeries = TruncSeries<f64>;
