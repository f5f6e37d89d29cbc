//! Exact q-calculus over the integers, truncated p-adic power series in
//! `Z_p[[q^{1/p^h} - 1]]`, and the base-prism computations built on them:
//! the Frobenius lift, the delta operator, Nygaard-filtration certificates,
//! q-divided powers and the q-logarithm.
//!
//! Every claim the library makes about a truncated object is stated at an
//! explicit precision and is backed by a certificate that can be re-checked
//! by multiplication alone (see [`cert`]).

pub mod cert;
pub mod cyclotomic;
pub mod error;
pub mod padic;
pub mod poly;
pub mod prism;
pub mod qcomb;
pub mod qlog;
pub mod series;
pub mod upoly;

pub use error::{Error, Result};
pub use padic::{PadicNum, Valuation};
pub use poly::{LaurentPoly, Var};
pub use series::bivar::{BivarSeries, QSeries};
pub use series::tower::TowerSeries;
