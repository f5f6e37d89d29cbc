//! Truncated elements of `A_h = Z_p[[s]]`, `s = q^{1/p^h} - 1`.
//!
//! Precision is a staircase: coefficient `j` is known modulo `p^{n_j}` with
//! `n_0 >= n_1 >= ... > 0`, and nothing is known from the order onwards.
//! A flat staircase `(N, ..., N)` of length `M` is the usual `(N, M)`
//! truncation; the staircase form is what survives exact division by a
//! distinguished polynomial without lying about the lower digits.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::padic::{p_pow, padic_binomial_to, vp_factorial, PadicNum};
use crate::poly::{LaurentPoly, Var};
use crate::upoly::UPoly;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerSeries {
    prime: u64,
    level: u32,
    coeffs: Vec<BigInt>,
    precs: Vec<u32>,
}

impl TowerSeries {
    /// Normalizes the staircase (running minimum, trailing zero-precision
    /// entries dropped) and reduces every coefficient into `[0, p^{n_j})`.
    pub fn from_parts(prime: u64, level: u32, mut coeffs: Vec<BigInt>, precs: Vec<u32>) -> Self {
        let mut out = Vec::with_capacity(precs.len());
        let mut run = u32::MAX;
        for &n in &precs {
            run = run.min(n);
            if run == 0 {
                break;
            }
            out.push(run);
        }
        coeffs.resize(out.len(), BigInt::zero());
        let mut cache: Option<(u32, BigInt)> = None;
        for (c, &n) in coeffs.iter_mut().zip(&out) {
            if cache.as_ref().map(|x| x.0) != Some(n) {
                cache = Some((n, p_pow(prime, n)));
            }
            *c = c.mod_floor(&cache.as_ref().unwrap().1);
        }
        TowerSeries { prime, level, coeffs, precs: out }
    }

    /// Flat `(N, M)` truncation; missing coefficients are zero.
    pub fn flat(prime: u64, level: u32, n: u32, m: usize, coeffs: Vec<BigInt>) -> Self {
        Self::from_parts(prime, level, coeffs, vec![n; m])
    }

    pub fn zero(prime: u64, level: u32, n: u32, m: usize) -> Self {
        Self::flat(prime, level, n, m, Vec::new())
    }

    pub fn constant(prime: u64, level: u32, n: u32, m: usize, c: impl Into<BigInt>) -> Self {
        Self::flat(prime, level, n, m, vec![c.into()])
    }

    pub fn one(prime: u64, level: u32, n: u32, m: usize) -> Self {
        Self::constant(prime, level, n, m, 1)
    }

    /// A polynomial in the level variable `s`.
    pub fn from_s_poly(prime: u64, level: u32, n: u32, m: usize, f: &UPoly) -> Self {
        Self::flat(prime, level, n, m, f.coeffs().to_vec())
    }

    /// A polynomial in `t = q^{1/p^h} = 1 + s`.
    pub fn from_t_poly(prime: u64, level: u32, n: u32, m: usize, f: &UPoly) -> Self {
        Self::from_s_poly(prime, level, n, m, &f.shift_by_one())
    }

    /// A polynomial in `q = t^{p^h}`.
    pub fn from_q_poly(prime: u64, level: u32, n: u32, m: usize, f: &UPoly) -> Self {
        let k = prime.pow(level) as usize;
        Self::from_t_poly(prime, level, n, m, &f.inflate(k))
    }

    /// A Laurent polynomial in `q` alone; negative powers go through the
    /// series inverse of `q`.
    pub fn from_q_laurent(prime: u64, level: u32, n: u32, m: usize, f: &LaurentPoly) -> Result<Self> {
        if !f.is_univariate_q() {
            return Err(Error::InvalidArgument("expected a Laurent polynomial in q only".into()));
        }
        let Some((lo, _)) = f.exponent_range(Var::Q) else {
            return Ok(Self::zero(prime, level, n, m));
        };
        let shift = (-lo).max(0);
        let g = f.shift([shift, 0, 0]).to_q_poly().expect("exponents are nonnegative after shift");
        let base = Self::from_q_poly(prime, level, n, m, &g);
        if shift == 0 {
            return Ok(base);
        }
        let q = Self::from_q_poly(prime, level, n, m, &UPoly::from_i64(&[0, 1]));
        base.mul(&q.inv()?.pow(shift as u64))
    }

    /// `q = 1 + s` at level 0.
    pub fn q(prime: u64, n: u32, m: usize) -> Self {
        Self::flat(prime, 0, n, m, vec![BigInt::one(), BigInt::one()])
    }

    /// `mu = q - 1 = s` at level 0.
    pub fn mu(prime: u64, n: u32, m: usize) -> Self {
        Self::flat(prime, 0, n, m, vec![BigInt::zero(), BigInt::one()])
    }

    /// A uniformly random element at flat precision `(N, M)`.
    pub fn random(prime: u64, level: u32, n: u32, m: usize, rng: &mut impl Rng) -> Self {
        let modulus = p_pow(prime, n);
        let coeffs = (0..m).map(|_| random_below(rng, &modulus)).collect();
        Self::flat(prime, level, n, m, coeffs)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Series order `M`: the number of known coefficients.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Precision of the constant coefficient, the largest on the staircase.
    pub fn coeff_precision(&self) -> u32 {
        self.precs.first().copied().unwrap_or(0)
    }

    pub fn precisions(&self) -> &[u32] {
        &self.precs
    }

    pub fn is_flat(&self) -> bool {
        self.precs.windows(2).all(|w| w[0] == w[1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> PadicNum {
        match self.coeffs.get(j) {
            Some(c) => PadicNum::new(self.prime, self.precs[j], c.clone()),
            None => PadicNum::zero(self.prime, 0),
        }
    }

    /// The representative coefficients as a polynomial in `s`.
    pub fn to_s_poly(&self) -> UPoly {
        UPoly::new(self.coeffs.clone())
    }

    /// True when every known coefficient is zero at its precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Largest `k` with `s^k` dividing the representative, capped at the order.
    pub fn s_valuation(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.order())
    }

    /// Cap the staircase at `(n, m)`.
    pub fn truncate(&self, n: u32, m: usize) -> Self {
        let m = m.min(self.order());
        let precs = self.precs[..m].iter().map(|&x| x.min(n)).collect();
        Self::from_parts(self.prime, self.level, self.coeffs[..m].to_vec(), precs)
    }

    /// Cap the staircase pointwise by another staircase.
    pub fn restrict(&self, precs: &[u32]) -> Self {
        let m = self.order().min(precs.len());
        let p = (0..m).map(|j| self.precs[j].min(precs[j])).collect();
        Self::from_parts(self.prime, self.level, self.coeffs[..m].to_vec(), p)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        Ok(())
    }

    fn meet(&self, other: &Self) -> Vec<u32> {
        self.precs.iter().zip(&other.precs).map(|(a, b)| *a.min(b)).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let precs = self.meet(other);
        let c = precs.iter().enumerate().map(|(j, _)| &self.coeffs[j] + &other.coeffs[j]).collect();
        Ok(Self::from_parts(self.prime, self.level, c, precs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let precs = self.meet(other);
        let c = precs.iter().enumerate().map(|(j, _)| &self.coeffs[j] - &other.coeffs[j]).collect();
        Ok(Self::from_parts(self.prime, self.level, c, precs))
    }

    pub fn neg(&self) -> Self {
        let c = self.coeffs.iter().map(|c| -c).collect();
        Self::from_parts(self.prime, self.level, c, self.precs.clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let precs = self.meet(other);
        let m = precs.len();
        if m == 0 {
            return Ok(Self::from_parts(self.prime, self.level, Vec::new(), precs));
        }
        let modulus = p_pow(self.prime, precs[0]);
        let c = mul_trunc(&self.coeffs[..m], &other.coeffs[..m], m, &modulus);
        Ok(Self::from_parts(self.prime, self.level, c, precs))
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        let v = self.coeffs.iter().map(|x| x * c).collect();
        Self::from_parts(self.prime, self.level, v, self.precs.clone())
    }

    /// Multiply by a p-adic scalar; the staircase is capped at its precision.
    pub fn scale(&self, c: &PadicNum) -> Result<Self> {
        if c.prime() != self.prime {
            return Err(Error::PrimeMismatch(self.prime, c.prime()));
        }
        let precs = self.precs.iter().map(|&n| n.min(c.precision())).collect();
        let v = self.coeffs.iter().map(|x| x * c.value()).collect();
        Ok(Self::from_parts(self.prime, self.level, v, precs))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_parts(self.prime, self.level, vec![BigInt::one()], self.precs.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same ring");
            }
        }
        acc
    }

    /// Inverse of an element whose constant term is a p-adic unit.
    pub fn inv(&self) -> Result<Self> {
        let c0 = self.coeff(0);
        if !c0.is_unit() {
            return Err(Error::NotAUnit(format!(
                "constant term {c0} is divisible by p, so the series is not a unit in A_{}",
                self.level
            )));
        }
        let m = self.order();
        let modulus = p_pow(self.prime, self.precs[0]);
        let u = c0.inv()?.value().clone();
        let mut g: Vec<BigInt> = Vec::with_capacity(m);
        g.push(u.clone());
        for k in 1..m {
            let mut acc = BigInt::zero();
            for i in 1..=k {
                acc += &self.coeffs[i] * &g[k - i];
            }
            g.push((-acc * &u).mod_floor(&modulus));
        }
        Ok(Self::from_parts(self.prime, self.level, g, self.precs.clone()))
    }

    /// Exact division of every coefficient by `p`; each precision drops by one.
    pub fn div_by_p(&self) -> Result<Self> {
        let pb = BigInt::from(self.prime);
        let mut v = Vec::with_capacity(self.order());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(&pb);
            if !r.is_zero() {
                return Err(Error::NotDivisibleByP);
            }
            v.push(q);
        }
        let precs = self.precs.iter().map(|n| n - 1).collect();
        Ok(Self::from_parts(self.prime, self.level, v, precs))
    }

    /// Substitute `s -> sigma(s)` for a series `sigma` without constant term.
    fn substitute(&self, sigma: &[BigInt]) -> Self {
        let m = self.order();
        if m == 0 {
            return self.clone();
        }
        debug_assert!(sigma.first().is_none_or(|c| c.is_zero()));
        let modulus = p_pow(self.prime, self.precs[0]);
        let mut acc = vec![BigInt::zero(); m];
        for j in (0..m).rev() {
            acc = mul_trunc(&acc, sigma, m, &modulus);
            acc[0] += &self.coeffs[j];
        }
        Self::from_parts(self.prime, self.level, acc, self.precs.clone())
    }

    /// The Frobenius lift `q^{1/p^h} -> q^{p/p^h}`, i.e. `s -> (1+s)^p - 1`.
    pub fn frobenius(&self) -> Self {
        self.substitute(UPoly::x_pow_minus_one(self.prime as usize).shift_by_one().coeffs())
    }

    /// Read the same coefficients one level up, in `q^{1/p^{h+1}} - 1`.
    pub fn phi_inverse(&self) -> Self {
        Self::from_parts(self.prime, self.level + 1, self.coeffs.clone(), self.precs.clone())
    }

    /// Embed into a higher level `h' >= h` via `s_h = (1+s_{h'})^{p^{h'-h}} - 1`.
    pub fn embed(&self, target: u32) -> Result<Self> {
        if target < self.level {
            return Err(Error::LevelMismatch(self.level, target));
        }
        let k = self.prime.pow(target - self.level) as usize;
        let sigma = UPoly::x_pow_minus_one(k).shift_by_one();
        let mut out = self.substitute(sigma.coeffs());
        out.level = target;
        Ok(out)
    }

    /// The image under `q -> 1`.
    pub fn evaluate_q1(&self) -> PadicNum {
        self.coeff(0)
    }

    /// Difference at the common staircase.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.sub(other)
    }

    /// Equality at the common staircase.
    pub fn congruent(&self, other: &Self) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// Coefficients in the balanced range, for display.
    pub fn balanced_coeffs(&self) -> Vec<BigInt> {
        (0..self.order()).map(|j| self.coeff(j).balanced()).collect()
    }
}

/// Truncated product of two coefficient vectors reduced modulo `modulus`.
pub(crate) fn mul_trunc(a: &[BigInt], b: &[BigInt], m: usize, modulus: &BigInt) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); m];
    for (i, x) in a.iter().enumerate().take(m) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(m - i) {
            if !y.is_zero() {
                c[i + j] += x * y;
            }
        }
    }
    for x in &mut c {
        *x = x.mod_floor(modulus);
    }
    c
}

pub(crate) fn random_below(rng: &mut impl Rng, bound: &BigInt) -> BigInt {
    use num_bigint::RandBigInt;
    let ubound = bound.to_biguint().expect("positive bound");
    BigInt::from(rng.gen_biguint_below(&ubound))
}

/// `q^a = sum_k binom(a, k) (q - 1)^k` at level 0, flat precision `(N, M)`.
pub fn binomial_qpower(a: &PadicNum, m: usize, n: u32) -> Result<TowerSeries> {
    let p = a.prime();
    let need = n + vp_factorial(p, m.saturating_sub(1) as u64);
    if a.precision() < need {
        return Err(Error::InsufficientPrecision { required: need, available: a.precision() });
    }
    let coeffs = (0..m as u64)
        .map(|k| padic_binomial_to(a, k, n).map(|c| c.value().clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(TowerSeries::flat(p, 0, n, m, coeffs))
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect()
}

impl fmt::Display for TowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.balanced_coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match j {
                0 => String::new(),
                1 => "s".to_string(),
                _ => format!("s{}", superscript(j)),
            };
            let neg = c < &BigInt::zero();
            let mag = if neg { -c } else { c.clone() };
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mono
            } else {
                format!("{mag}{mono}")
            };
            match (first, neg) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(p^{}, s^{})", self.coeff_precision(), self.order())
    }
}
