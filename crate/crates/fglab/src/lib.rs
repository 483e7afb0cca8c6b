//! Exact computer algebra for p-typical formal group laws and the operations
//! between the free theories they define.
//!
//! The core is generic over the coefficient ring through [`CoefficientRing`];
//! the concrete aliases below fix the two instantiations used in practice.

pub mod addops;
pub mod arith;
pub mod chern;
pub mod error;
pub mod fgl;
pub mod gamma;
pub mod series;

pub use arith::{PadicBall, Prime, Rational, Valuation};
pub use error::{Error, ErrorKind};
pub use series::{CoefficientRing, GradedPolynomial, SeriesError, TruncatedSeries};

/// Series with rational coefficients.
pub type QSeries = TruncatedSeries<Rational>;

/// Series whose coefficients are polynomials in Araki generators.
pub type ArakiSeries = TruncatedSeries<GradedPolynomial>;
