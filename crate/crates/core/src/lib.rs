//! Correction-term deficiencies of rational surgeries on knots and the
//! changemaker lattice-embedding obstruction to Dehn surgeries.

pub mod acceptance;
pub mod changemaker;
pub mod deficiency;
pub mod embedding;
pub mod error;
pub mod linalg;
pub mod numeric;
pub mod oracles;
pub mod plumbing;

pub use error::{Error, Result};
pub use numeric::{hj_evaluate, hj_expand, Rational, SurgerySlope};
