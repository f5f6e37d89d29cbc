//! Long division by a distinguished polynomial
//! `d(s) = s^D + d_{D-1} s^{D-1} + ... + d_0` with `p | d_i`, with an honest account of the precision of
//! quotient and remainder.
//!
//! The dividend is only known up to its staircase: an error `p^{n_k} e s^k`
//! (or anything from the order `M` on) moves the quotient by
//! `p^{n_k} e Q_k` and the remainder by `p^{n_k} e R_k`, where
//! `s^k = d Q_k + R_k`. Coefficient `j` of `Q_k` equals coefficient `D-1`
//! of `R_{k-1-j}`, so the valuations of the remainders `R_k` bound both
//! uncertainties. They are computed modulo `p^{n_0}`, which is enough since
//! no bound can exceed `n_0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::padic::{p_pow, vp};
use crate::series::tower::TowerSeries;
use crate::upoly::UPoly;

/// Verify the distinguished shape: leading coefficient 1, every lower
/// coefficient divisible by `p`, positive degree.
pub fn check_distinguished(p: u64, d: &UPoly) -> Result<()> {
    let deg = d.degree().unwrap_or(0);
    if deg == 0 {
        return Err(Error::NotDistinguished("degree must be positive".into()));
    }
    if !d.is_monic() {
        return Err(Error::NotDistinguished("leading coefficient must be 1".into()));
    }
    let pb = BigInt::from(p);
    if let Some(i) = (0..deg).find(|&i| !(&d.coeff(i) % &pb).is_zero()) {
        return Err(Error::NotDistinguished(format!("coefficient of s^{i} is not divisible by {p}")));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct RawDivision {
    /// The quotient at its provable staircase (order `M - D`).
    pub quotient: TowerSeries,
    /// Remainder of the representative, length `D`.
    pub remainder: Vec<BigInt>,
    /// Remainder coefficient `i` is only determined modulo `p^{remainder_precs[i]}`.
    pub remainder_precs: Vec<u32>,
}

impl RawDivision {
    pub fn divisible(&self, p: u64) -> bool {
        self.remainder
            .iter()
            .zip(&self.remainder_precs)
            .all(|(r, &u)| (r % p_pow(p, u)).is_zero())
    }
}

fn capped_val(p: u64, c: &BigInt, cap: u32) -> u32 {
    vp(p, c).map_or(cap, |v| v.min(cap))
}

pub fn divide_raw(f: &TowerSeries, d: &UPoly) -> Result<RawDivision> {
    let p = f.prime();
    check_distinguished(p, d)?;
    let dd = d.degree().unwrap();
    let m = f.order();
    if m <= dd {
        return Err(Error::OrderExhausted { required: dd + 1, available: m });
    }
    let n = f.precisions();
    let n0 = n[0];
    let modulus = p_pow(p, n0);
    let dc = d.coeffs();

    let mut rem: Vec<BigInt> = f.coeffs().to_vec();
    let mut quot = vec![BigInt::zero(); m - dd];
    for k in (dd..m).rev() {
        let c = rem[k].mod_floor(&modulus);
        if c.is_zero() {
            continue;
        }
        for i in 0..dd {
            rem[k - dd + i] -= &c * &dc[i];
        }
        rem[k] = BigInt::zero();
        quot[k - dd] = c;
    }
    let remainder: Vec<BigInt> = rem[..dd].iter().map(|c| c.mod_floor(&modulus)).collect();

    // valuations of R_k = s^k mod d for k < horizon
    let horizon = m + dd * (n0 as usize + 1) + 1;
    let mut val: Vec<Vec<u32>> = Vec::with_capacity(horizon);
    let mut r: Vec<BigInt> = vec![BigInt::zero(); dd];
    for k in 0..horizon {
        if k < dd {
            r = vec![BigInt::zero(); dd];
            r[k] = BigInt::one();
        } else {
            let top = r[dd - 1].clone();
            for i in (1..dd).rev() {
                r[i] = (&r[i - 1] - &top * &dc[i]).mod_floor(&modulus);
            }
            r[0] = (-&top * &dc[0]).mod_floor(&modulus);
        }
        val.push(r.iter().map(|c| capped_val(p, c, n0)).collect());
    }
    let beta = |t: usize| -> u32 {
        if t == 0 || t > horizon {
            n0
        } else {
            val[t - 1][dd - 1]
        }
    };
    // suffix minima of beta, for the unknown tail of the dividend
    let mut beta_suffix = vec![n0; horizon + 2];
    for t in (1..=horizon).rev() {
        beta_suffix[t] = beta_suffix[t + 1].min(beta(t));
    }

    let mut qprecs = Vec::with_capacity(m - dd);
    for j in 0..m - dd {
        let mut kj = beta_suffix[(m - j).min(horizon + 1)];
        for k in j + dd..m {
            kj = kj.min(n[k].saturating_add(beta(k - j)));
        }
        qprecs.push(kj.min(n0));
    }

    let mut remainder_precs = Vec::with_capacity(dd);
    for i in 0..dd {
        let mut u = if i < m { n[i] } else { 0 };
        for (k, vk) in val.iter().enumerate().skip(dd) {
            let known = if k < m { n[k] } else { 0 };
            u = u.min(known.saturating_add(vk[i]));
        }
        remainder_precs.push(u.min(n0));
    }

    Ok(RawDivision {
        quotient: TowerSeries::from_parts(p, f.level(), quot, qprecs),
        remainder,
        remainder_precs,
    })
}
