//! Sparse Laurent polynomials in the variables `q`, `x`, `y` over the
//! integers.
//!
//! Terms are kept in a `BTreeMap` from exponent vectors `[e_q, e_x, e_y]`
//! to nonzero coefficients, so two polynomials are equal exactly when their
//! maps are equal.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::upoly::UPoly;

pub type Exponents = [i64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Q = 0,
    X = 1,
    Y = 2,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::Q, Var::X, Var::Y];

    pub fn name(self) -> &'static str {
        match self {
            Var::Q => "q",
            Var::X => "x",
            Var::Y => "y",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Exponents, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, [0, 0, 0])
    }

    pub fn monomial(c: impl Into<BigInt>, exps: Exponents) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        LaurentPoly { terms }
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; 3];
        e[v as usize] = 1;
        Self::monomial(1, e)
    }

    /// `v^k` for any integer `k`.
    pub fn var_pow(v: Var, k: i64) -> Self {
        let mut e = [0; 3];
        e[v as usize] = k;
        Self::monomial(1, e)
    }

    /// Embed a univariate polynomial in `q`.
    pub fn from_q_poly(f: &UPoly) -> Self {
        let mut out = Self::zero();
        for (k, c) in f.coeffs().iter().enumerate() {
            out.add_term([k as i64, 0, 0], c.clone());
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: Exponents) -> BigInt {
        self.terms.get(&exps).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, exps: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    /// Smallest and largest exponent of `v` among the terms.
    pub fn exponent_range(&self, v: Var) -> Option<(i64, i64)> {
        let i = v as usize;
        let mut it = self.terms.keys().map(|e| e[i]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    /// True when only nonnegative exponents occur.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k >= 0))
    }

    /// True when only the variable `q` occurs.
    pub fn is_univariate_q(&self) -> bool {
        self.terms.keys().all(|e| e[1] == 0 && e[2] == 0)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(e, a)| (*e, a * c)).collect() }
    }

    /// Multiply by the monomial `q^a x^b y^c`.
    pub fn shift(&self, by: Exponents) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| ([e[0] + by[0], e[1] + by[1], e[2] + by[2]], c.clone()))
            .collect();
        LaurentPoly { terms }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitute `v -> q^k v` (for `v = x` this is `f(x) -> f(q^k x)`).
    pub fn scale_var_by_q_power(&self, v: Var, k: i64) -> Self {
        let i = v as usize;
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut ne = *e;
            ne[0] += k * e[i];
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Substitute `q -> q^k` (the Frobenius lift when `k = p`).
    pub fn inflate_q(&self, k: i64) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term([e[0] * k, e[1], e[2]], c.clone());
        }
        out
    }

    /// Substitute `v -> value` for an integer value (`v` must not occur with
    /// negative exponents unless `value` is `+-1`).
    pub fn eval_var(&self, v: Var, value: &BigInt) -> Self {
        let i = v as usize;
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let k = e[i];
            let factor = if k >= 0 {
                num_traits::pow(value.clone(), k as usize)
            } else {
                assert!(value.abs().is_one(), "negative power of a non-unit");
                num_traits::pow(value.clone(), (-k) as usize)
            };
            let mut ne = *e;
            ne[i] = 0;
            out.add_term(ne, c * factor);
        }
        out
    }

    /// Group the terms by their `(x, y)` exponents; each group is returned
    /// as the `q`-exponent offset and a dense polynomial in `q`.
    pub fn q_slices(&self) -> BTreeMap<[i64; 2], (i64, UPoly)> {
        let mut groups: BTreeMap<[i64; 2], Vec<(i64, BigInt)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            groups.entry([e[1], e[2]]).or_default().push((e[0], c.clone()));
        }
        groups
            .into_iter()
            .map(|(xy, ts)| {
                let lo = ts.iter().map(|t| t.0).min().unwrap_or(0);
                let hi = ts.iter().map(|t| t.0).max().unwrap_or(0);
                let mut dense = vec![BigInt::zero(); (hi - lo + 1) as usize];
                for (k, c) in ts {
                    dense[(k - lo) as usize] = c;
                }
                (xy, (lo, UPoly::new(dense)))
            })
            .collect()
    }

    fn from_q_slices(slices: impl IntoIterator<Item = ([i64; 2], i64, UPoly)>) -> Self {
        let mut out = Self::zero();
        for (xy, lo, f) in slices {
            for (k, c) in f.coeffs().iter().enumerate() {
                out.add_term([lo + k as i64, xy[0], xy[1]], c.clone());
            }
        }
        out
    }

    /// Exact division by a univariate polynomial `d(q)` with leading
    /// coefficient `+-1` and nonzero constant term. Returns `None` if the
    /// division leaves a remainder.
    pub fn div_exact_by_q_poly(&self, d: &UPoly) -> Option<Self> {
        assert!(!d.coeff(0).is_zero(), "divisor must not be divisible by q");
        let mut parts = Vec::new();
        for (xy, (lo, f)) in self.q_slices() {
            parts.push((xy, lo, f.div_exact_monic(d)?));
        }
        Some(Self::from_q_slices(parts))
    }

    /// Total bookkeeping view used by displays: univariate `q` polynomial
    /// when the terms allow it.
    pub fn to_q_poly(&self) -> Option<UPoly> {
        if !self.is_univariate_q() {
            return None;
        }
        if self.is_zero() {
            return Some(UPoly::zero());
        }
        let (lo, hi) = self.exponent_range(Var::Q)?;
        if lo < 0 {
            return None;
        }
        let mut v = vec![BigInt::zero(); hi as usize + 1];
        for (e, c) in &self.terms {
            v[e[0] as usize] = c.clone();
        }
        Some(UPoly::new(v))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

fn superscript(n: i64) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    let mut s = String::new();
    if n < 0 {
        s.push('⁻');
    }
    for ch in n.unsigned_abs().to_string().chars() {
        s.push(DIGITS[ch.to_digit(10).unwrap() as usize]);
    }
    s
}

impl fmt::Display for LaurentPoly {
    /// Terms in ascending exponent order, e.g. `1 + q + q² - 2q⁻¹x`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let mut mono = String::new();
            for v in Var::ALL {
                match e[v as usize] {
                    0 => {}
                    1 => mono.push_str(v.name()),
                    k => {
                        mono.push_str(v.name());
                        mono.push_str(&superscript(k));
                    }
                }
            }
            let mag = c.abs();
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mono
            } else {
                format!("{mag}{mono}")
            };
            match (idx, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}
