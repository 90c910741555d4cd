//! Arbitrary-precision complex arithmetic, truncated Laurent series and
//! integer polynomials.

pub mod apcomplex;
pub mod cpoly;
pub mod poly;
pub mod series;

pub use apcomplex::APComplex;
pub use cpoly::{aberth_roots, mahler_measure, CPoly};
pub use poly::{IntPolyUV, IntPolyXY};
pub use series::{eval_series, series_newton_root, LaurentSeries};
