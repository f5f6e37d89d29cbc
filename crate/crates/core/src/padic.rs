//! Truncated p-adic integers: a residue modulo `p^N` with the precision `N`
//! carried as data.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn p_pow(p: u64, n: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), n as usize)
}

/// `v_p(c)`, or `None` for `c = 0`.
pub fn vp(p: u64, c: &BigInt) -> Option<u32> {
    if c.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut c = c.abs();
    let mut v = 0;
    loop {
        let (q, r) = c.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        c = q;
        v += 1;
    }
}

pub fn vp_u64(p: u64, mut n: u64) -> u32 {
    assert!(n != 0);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// `v_p(n!)` by Legendre's formula.
pub fn vp_factorial(p: u64, n: u64) -> u32 {
    let mut v = 0u64;
    let mut q = n / p;
    while q > 0 {
        v += q;
        q /= p;
    }
    v as u32
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(u32),
    /// The residue is zero, so only `v >= precision` is known.
    IndistinguishableFromZero { at_least: u32 },
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::IndistinguishableFromZero { at_least } => {
                write!(f, "indistinguishable-from-zero (>= {at_least})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicNum {
    prime: u64,
    precision: u32,
    #[serde(with = "crate::series::json::bigint_str")]
    value: BigInt,
}

impl PadicNum {
    /// Reduce an arbitrary integer modulo `p^N`.
    pub fn new(p: u64, precision: u32, value: impl Into<BigInt>) -> Self {
        let value = value.into().mod_floor(&p_pow(p, precision));
        PadicNum { prime: p, precision, value }
    }

    pub fn zero(p: u64, precision: u32) -> Self {
        Self::new(p, precision, 0)
    }

    pub fn one(p: u64, precision: u32) -> Self {
        Self::new(p, precision, 1)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// The representative in `[0, p^N)`.
    pub fn value(&self) -> &BigInt {
        &self.value
    }

    /// The representative in `(-p^N/2, p^N/2]`, handy for small negatives.
    pub fn balanced(&self) -> BigInt {
        let m = p_pow(self.prime, self.precision);
        if &self.value * 2 > m {
            &self.value - m
        } else {
            self.value.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.precision > 0 && !(&self.value % self.prime).is_zero()
    }

    pub fn valuation(&self) -> Valuation {
        match vp(self.prime, &self.value) {
            Some(v) => Valuation::Finite(v),
            None => Valuation::IndistinguishableFromZero { at_least: self.precision },
        }
    }

    /// Forget digits down to `n <= precision`.
    pub fn truncate(&self, n: u32) -> Self {
        assert!(n <= self.precision, "cannot raise precision by truncation");
        Self::new(self.prime, n, self.value.clone())
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        Ok(())
    }

    fn binop(&self, other: &Self, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Result<Self> {
        self.check_prime(other)?;
        let n = self.precision.min(other.precision);
        Ok(Self::new(self.prime, n, f(&self.value, &other.value)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.binop(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.binop(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.binop(other, |a, b| a * b)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.prime, self.precision, -&self.value)
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit(format!("{self} is not a unit")));
        }
        let m = p_pow(self.prime, self.precision);
        let inv = self.value.modinv(&m).expect("units are invertible");
        Ok(Self::new(self.prime, self.precision, inv))
    }

    pub fn pow(&self, e: u64) -> Self {
        let m = p_pow(self.prime, self.precision);
        Self::new(self.prime, self.precision, self.value.modpow(&BigInt::from(e), &m))
    }

    /// Exact division by `p`; the result has one digit less.
    pub fn div_by_p(&self) -> Result<Self> {
        if self.precision == 0 {
            return Err(Error::InsufficientPrecision { required: 1, available: 0 });
        }
        let (q, r) = self.value.div_rem(&BigInt::from(self.prime));
        if !r.is_zero() {
            return Err(Error::NotDivisibleByP);
        }
        Ok(Self::new(self.prime, self.precision - 1, q))
    }
}

impl fmt::Display for PadicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.prime, self.precision)
    }
}

/// Teichmueller representative of `a0 mod p` to precision `N`, by iterating
/// `x -> x^p` until two iterates agree modulo `p^N`.
pub fn teichmuller(p: u64, a0: u64, n: u32) -> PadicNum {
    assert!(n >= 1);
    let mut x = PadicNum::new(p, n, a0 % p);
    // each step gains at least one digit, so N steps always suffice
    for _ in 0..=n {
        let next = x.pow(p);
        if next == x {
            return x;
        }
        x = next;
    }
    unreachable!("Teichmueller iteration stabilizes within N steps")
}

/// `binom(a, k)` to the largest precision the input supports,
/// `N - v_p(k!)`.
pub fn padic_binomial(a: &PadicNum, k: u64) -> Result<PadicNum> {
    let loss = vp_factorial(a.prime, k);
    if a.precision <= loss && k > 0 {
        return Err(Error::InsufficientPrecision { required: loss + 1, available: a.precision });
    }
    padic_binomial_to(a, k, a.precision - loss)
}

/// `binom(a, k)` accurate to `target` digits; needs `target + v_p(k!)`
/// digits of `a`.
pub fn padic_binomial_to(a: &PadicNum, k: u64, target: u32) -> Result<PadicNum> {
    let p = a.prime;
    let loss = vp_factorial(p, k);
    let required = target + loss;
    if a.precision < required {
        return Err(Error::InsufficientPrecision { required, available: a.precision });
    }
    let m = p_pow(p, required);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num = (num * (&a.value - BigInt::from(i))).mod_floor(&m);
        den *= BigInt::from(i + 1);
    }
    let pl = p_pow(p, loss);
    debug_assert!((&num % &pl).is_zero());
    let num = num / &pl;
    let den = den / &pl;
    let mt = p_pow(p, target);
    let dinv = den.mod_floor(&mt).modinv(&mt).unwrap_or_else(BigInt::zero);
    Ok(PadicNum::new(p, target, num * dinv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_examples() {
        let a = PadicNum::new(2, 5, 3);
        let b = PadicNum::new(2, 5, 7);
        assert_eq!(a.add(&b).unwrap(), PadicNum::new(2, 5, 10));
        assert_eq!(a.inv().unwrap(), PadicNum::new(2, 5, 11));
        assert!(PadicNum::new(2, 5, 6).inv().is_err());
        assert!(a.add(&PadicNum::new(3, 5, 1)).is_err());
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(7, 1, 9), PadicNum::one(7, 9));
        assert_eq!(teichmuller(5, 2, 3), PadicNum::new(5, 3, 57));
    }

    #[test]
    fn binomial_examples() {
        let a = PadicNum::new(3, 8, 5);
        assert_eq!(padic_binomial(&a, 2).unwrap(), PadicNum::new(3, 8, 10));
        let m1 = PadicNum::new(2, 10, -1);
        assert_eq!(padic_binomial(&m1, 3).unwrap(), PadicNum::new(2, 9, -1));
        assert_eq!(padic_binomial(&m1, 0).unwrap(), PadicNum::one(2, 10));
        let err = padic_binomial_to(&m1, 4, 10).unwrap_err();
        assert_eq!(err, Error::InsufficientPrecision { required: 13, available: 10 });
    }

    #[test]
    fn valuations() {
        assert_eq!(PadicNum::new(2, 8, 12).valuation(), Valuation::Finite(2));
        assert_eq!(
            PadicNum::zero(2, 8).valuation(),
            Valuation::IndistinguishableFromZero { at_least: 8 }
        );
        assert_eq!(PadicNum::new(5, 4, 15).valuation(), Valuation::Finite(1));
    }

    #[test]
    fn division_by_p() {
        assert_eq!(PadicNum::new(3, 6, 18).div_by_p().unwrap(), PadicNum::new(3, 5, 6));
        assert_eq!(PadicNum::new(3, 6, 19).div_by_p(), Err(Error::NotDivisibleByP));
    }
}
