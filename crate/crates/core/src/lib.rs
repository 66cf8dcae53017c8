//! Modular invariants, nimrep graphs, Ocneanu cells, almost Calabi-Yau algebras and
//! spectral measures for SU(3).

pub mod almostcy;
pub mod arith;
pub mod cells;
pub mod cli;
pub mod error;
pub mod fusion;
pub mod graphcat;
pub mod linalg;
pub mod pathalg;
pub mod specmeasure;

pub use error::{Error, Result};
