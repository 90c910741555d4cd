//! Class polynomials for imaginary quadratic orders on modular curves of genus one.

pub mod arith;
pub mod classpoly;
pub mod cli;
pub mod cmmethod;
pub mod ellcurve;
pub mod error;
pub mod lattice;
pub mod nsystem;
pub mod numerics;
pub mod qexp;
pub mod quadforms;

pub use error::{Error, Result};
