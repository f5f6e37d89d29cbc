//! Dense univariate integer polynomials, coefficients in ascending order.
//!
//! This is the workhorse behind cyclotomic reduction, the exact
//! factorization of q-factorials, and the conversion of q-polynomials into
//! the level variable of the tower.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UPoly {
    coeffs: Vec<BigInt>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `c * X^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `X^k - 1`.
    pub fn x_pow_minus_one(k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[0] = -BigInt::one();
        v[k] += BigInt::one();
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        UPoly::new(v)
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        UPoly::new(v)
    }

    pub fn neg(&self) -> UPoly {
        UPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        UPoly::new(v)
    }

    pub fn pow(&self, mut e: u64) -> UPoly {
        let mut base = self.clone();
        let mut acc = UPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Substitute `X -> X^k`.
    pub fn inflate(&self, k: usize) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let mut v = vec![BigInt::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * k] = c.clone();
        }
        UPoly::new(v)
    }

    /// Substitute `X -> g(X)` by Horner's rule.
    pub fn compose(&self, g: &UPoly) -> UPoly {
        let mut acc = UPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&UPoly::constant(c.clone()));
        }
        acc
    }

    /// Division with remainder by a divisor whose leading coefficient is
    /// `+1` or `-1`, so that the quotient stays integral.
    pub fn div_rem_monic(&self, d: &UPoly) -> (UPoly, UPoly) {
        let lead = d.leading().expect("division by the zero polynomial");
        assert!(lead.abs().is_one(), "divisor must have leading coefficient +-1");
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = &rem[k] * lead;
            if c.is_zero() {
                continue;
            }
            for (i, di) in d.coeffs.iter().enumerate() {
                rem[k - dd + i] -= &c * di;
            }
            quot[k - dd] = c;
        }
        rem.truncate(dd);
        (UPoly::new(quot), UPoly::new(rem))
    }

    /// Exact quotient, or `None` when the remainder is nonzero.
    pub fn div_exact_monic(&self, d: &UPoly) -> Option<UPoly> {
        let (q, r) = self.div_rem_monic(d);
        r.is_zero().then_some(q)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Taylor shift `X -> 1 + S`, i.e. rewrite the polynomial in `S = X - 1`.
    pub fn shift_by_one(&self) -> UPoly {
        // synthetic division repeated; O(n^2) and exact
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = c[j + 1].clone();
                c[j] += t;
            }
        }
        UPoly::new(c)
    }

    /// Content (gcd of the coefficients), nonnegative.
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }
}

/// The q-integer `[n]_q = 1 + q + ... + q^{n-1}` for `n >= 0`.
pub fn q_int_poly(n: usize) -> UPoly {
    UPoly::new(vec![BigInt::one(); n])
}

/// `Phi_{p^r}(q) = (q^{p^r} - 1) / (q^{p^{r-1}} - 1)`, obtained by exact
/// division.
pub fn cyclotomic_prime_power(p: u64, r: u32) -> UPoly {
    assert!(r >= 1);
    let big = (p as usize).pow(r);
    let small = (p as usize).pow(r - 1);
    UPoly::x_pow_minus_one(big)
        .div_exact_monic(&UPoly::x_pow_minus_one(small))
        .expect("q^{p^{r-1}} - 1 divides q^{p^r} - 1")
}
