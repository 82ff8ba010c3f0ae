//! Exact decompositions of matrices over Q and GF(p) into products and sums of
//! nilpotent and square-zero matrices.

pub mod canonform;
pub mod certificate;
pub mod densemat;
pub mod error;
pub mod exactfield;
pub mod factorize;
pub mod matdiv;
pub mod oracle;
pub mod random;
pub mod summation;
pub mod unipoly;

#[cfg(test)]
mod testutil;

pub use densemat::{ExactMatrix, InverseStrategy, RrefResult, SubspaceBasis};
pub use error::{Error, Result};
pub use exactfield::{FieldKind, FieldSpec, Scalar};
pub use unipoly::{FactorList, ParityClass, UniPoly};
