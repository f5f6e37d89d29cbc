#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use qprism::padic::PadicNum;
use qprism::series::TowerSeries;
use qprism::upoly::UPoly;
use rand::Rng;
use serde_json::Value;

/// Series fields of a certificate, by kind.
fn series_fields(v: &Value) -> &'static [&'static str] {
    match v["kind"].as_str() {
        Some("divisibility") => &["dividend", "quotient"],
        Some("nygaard") => &["element", "quotient"],
        Some("factorization") => &["unit"],
        _ => &[],
    }
}

/// Every `(field, index)` naming a coefficient string in the certificate.
pub fn coefficient_slots(text: &str) -> Vec<(String, usize)> {
    let v: Value = serde_json::from_str(text).unwrap();
    let mut out = Vec::new();
    for f in series_fields(&v) {
        let n = v[f]["coefficients"].as_array().map_or(0, Vec::len);
        out.extend((0..n).map(|i| (f.to_string(), i)));
    }
    out
}

/// Replace byte `pos` of coefficient `slot` with `byte`; `None` when the
/// position is out of range or the byte is unchanged.
pub fn corrupt(text: &str, slot: &(String, usize), pos: usize, byte: u8) -> Option<String> {
    let mut v: Value = serde_json::from_str(text).unwrap();
    let cell = &mut v[slot.0.as_str()]["coefficients"][slot.1];
    let mut bytes = cell.as_str()?.as_bytes().to_vec();
    if pos >= bytes.len() || bytes[pos] == byte {
        return None;
    }
    bytes[pos] = byte;
    *cell = Value::String(String::from_utf8(bytes).ok()?);
    Some(serde_json::to_string(&v).unwrap())
}

/// Replacement bytes tried at every position: all digits plus a few
/// structural characters.
pub const REPLACEMENTS: &[u8] = b"0123456789-+ .a";

/// All single-byte corruptions of every coefficient.
pub fn all_corruptions(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for slot in coefficient_slots(text) {
        let v: Value = serde_json::from_str(text).unwrap();
        let len = v[slot.0.as_str()]["coefficients"][slot.1].as_str().unwrap().len();
        for pos in 0..len {
            for &b in REPLACEMENTS {
                out.extend(corrupt(text, &slot, pos, b));
            }
        }
    }
    out
}

/// Coefficient list of `binom(n, k)_q` by counting partitions that fit in a
/// `k x (n-k)` box, sorted by size.
pub fn box_partitions(n: usize, k: usize) -> Vec<u64> {
    let w = n - k;
    // counts[parts][largest][size]: partitions with at most `parts` parts,
    // each at most `largest`
    let max = k * w;
    let mut prev = vec![vec![0u64; max + 1]; w + 1];
    for row in prev.iter_mut() {
        row[0] = 1;
    }
    for _ in 0..k {
        let mut cur = vec![vec![0u64; max + 1]; w + 1];
        for l in 0..=w {
            for s in 0..=max {
                // the largest part is j <= l; the rest has at most one fewer part
                let mut acc = 0;
                for j in 0..=l.min(s) {
                    acc += prev[j][s - j];
                }
                cur[l][s] = acc;
            }
        }
        prev = cur;
    }
    prev[w].clone()
}

pub fn geometric(k: usize, step: usize) -> UPoly {
    // 1 + q^step + ... + q^{(k-1) step}
    let mut c = vec![BigInt::from(0); (k - 1) * step + 1];
    for i in 0..k {
        c[i * step] = BigInt::one();
    }
    UPoly::new(c)
}

pub fn q_factorial_oracle(n: usize) -> UPoly {
    (1..=n).fold(UPoly::one(), |acc, k| acc.mul(&geometric(k, 1)))
}

/// `x * p` known one digit better than `x`.
pub fn times_p(x: &TowerSeries) -> TowerSeries {
    let p = BigInt::from(x.prime());
    let coeffs = x.coeffs().iter().map(|c| c * &p).collect();
    let precs = x.precisions().iter().map(|n| n + 1).collect();
    TowerSeries::from_parts(x.prime(), x.level(), coeffs, precs)
}

/// `q^{n(n-1)/2} (q-1)^n binom(m, n)_q` assembled from the product formula
/// in `Z[q]`.
pub fn closed_form_oracle(m: usize, n: usize) -> UPoly {
    if n > m {
        return UPoly::zero();
    }
    let mut num = UPoly::one();
    let mut den = UPoly::one();
    for i in 0..n {
        num = num.mul(&geometric(m - i, 1));
        den = den.mul(&geometric(i + 1, 1));
    }
    let binom = num.div_exact_monic(&den).expect("q-binomials are polynomials");
    let mu_n = UPoly::from_i64(&[-1, 1]).pow(n as u64);
    binom.mul(&mu_n).mul(&UPoly::monomial(BigInt::one(), n * (n - 1) / 2))
}

/// `(1 + t)^k` summed directly from binomial coefficients.
pub fn q_pow_oracle(k: i64, order: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(order);
    let mut c = BigRational::one();
    for i in 0..order as i64 {
        out.push(c.clone());
        c = c * BigRational::from_integer((k - i).into()) / BigRational::from_integer((i + 1).into());
    }
    out
}

pub fn mul_trunc(a: &[BigRational], b: &[BigRational], order: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); order];
    for (i, x) in a.iter().enumerate().take(order) {
        for (j, y) in b.iter().enumerate().take(order - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `(-1)^{n-1} q^{-n(n-1)/2} [n-1]_q!` as a series in `t = q - 1`.
pub fn log_coefficient_oracle(n: usize, order: usize) -> Vec<BigRational> {
    let mut acc = q_pow_oracle(-((n * (n - 1) / 2) as i64), order);
    for k in 1..n {
        // [k]_q = ((1+t)^k - 1)/t
        let qk = q_pow_oracle(k as i64, order + 1);
        acc = mul_trunc(&acc, &qk[1..], order);
    }
    if n.is_multiple_of(2) {
        acc.iter_mut().for_each(|c| *c = -c.clone());
    }
    acc
}

pub fn random_exponent(p: u64, prec: u32, rng: &mut impl Rng) -> PadicNum {
    let digits: Vec<u64> = (0..prec).map(|_| rng.gen_range(0..p)).collect();
    let v = digits.iter().rev().fold(BigInt::zero(), |acc, &d| acc * p + d);
    PadicNum::new(p, prec, v)
}

