//! CM eigenforms from Hecke characters of imaginary quadratic fields, and
//! companion forms modulo odd integers obtained by twisting the character
//! anchors, with exact verification of the resulting coefficient
//! congruences.

pub mod arith;
pub mod companion;
pub mod congruence;
pub mod error;
pub mod formfile;
pub mod heckechar;
pub mod qexpansion;
pub mod quadfield;
pub mod residue;

pub use error::{Error, Result};
