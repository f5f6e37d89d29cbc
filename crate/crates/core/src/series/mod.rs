//! Truncated power-series rings: the tower `A_h = Z_p[[q^{1/p^h} - 1]]`
//! ([`tower`], [`division`]) and the rational rings `Q[[q-1]]`,
//! `Q[[q-1, x-1]]` ([`bivar`]).

pub mod bivar;
pub mod division;
pub mod json;
pub mod tower;

pub use bivar::{pochhammer_minus_one, qtaylor_expand, qtaylor_reconstruct, BivarSeries, QSeries, Shape};
pub use division::{check_distinguished, divide_raw, RawDivision};
pub use tower::{binomial_qpower, TowerSeries};
