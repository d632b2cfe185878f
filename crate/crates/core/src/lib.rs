//! Exact computer algebra for q-difference modules over truncated formal
//! Laurent series: classification invariants (Newton polygons, slopes,
//! degrees, Hom/End spaces), canonical forms for q-conjugacy classes in
//! GL_n, SL_n, Sp_2n and O_n, the determinant central extension of GL_n,
//! and the dictionary to vector bundles on Tate elliptic curves.

pub mod error;
pub mod matrix;
pub mod dqmod;
pub mod ore;
pub mod scalars;
pub mod series;

pub use error::{Error, Result};
pub use scalars::{QContext, ScalarElem, ScalarField, TwoTorsion};
pub use series::{coboundary_solve, LaurentSeries, Prec, RamifiedSeries};
