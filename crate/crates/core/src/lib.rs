//! Algebra, torsion, curvature and Laplacian flow of G2-structures on
//! seven-dimensional spaces.
//!
//! All algorithms are generic over a coefficient ring ([`Scalar`]); identities are
//! checked in exact rational arithmetic and flows run in `f64`.
//!
//! ```
//! use g2kit::{g2, Form, Rational, Scalar};
//!
//! let phi = g2::phi::<Rational>();
//! let vol = phi.wedge(&g2::star_phi());
//! assert_eq!(vol, Form::volume().scale(&Rational::from_i64(7)));
//! ```

pub mod definite;
pub mod error;
pub mod exterior;
pub mod flat;
pub mod flow;
pub mod g2;
pub mod invariant;
pub mod matrix;
pub mod scalar;

pub use definite::{metric_from, DefiniteStructure};
pub use error::{Error, Result};
pub use exterior::{Covector, Form, Metric, Orientation, Vector};
pub use invariant::LieAlgebra7;
pub use matrix::Matrix;
pub use scalar::{Rational, Scalar};
