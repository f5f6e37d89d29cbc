//! Self-verifying witnesses for divisibility, Nygaard-level and q-factorial
//! factorization claims.
//!
//! Every certificate states an identity `L(inputs) = 0` that is checked
//! coefficient-wise modulo `p^{c_k}` for an explicit staircase `c`
//! (`check_precisions`). Each stored input carries its own staircase and the
//! two are tied together in both directions:
//!
//! * well-defined: `c_k <= n_j + v(L_kj)` for every input coefficient `j`
//!   that reaches output `k` (digits of `x_j` we did not store cannot move
//!   the checked digits), and
//! * tight: every stored digit reaches some checked digit, i.e.
//!   `n_j <= max_k (c_k - v(L_kj))`.
//!
//! Tightness is what makes a corrupted coefficient detectable: changing a
//! stored coefficient inside its range changes some checked coefficient.

pub mod recheck;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{p_pow, vp};
use crate::series::division::{divide_raw, RawDivision};
use crate::series::tower::TowerSeries;
use crate::upoly::{q_int_poly, UPoly};

/// Divisors are stored by name and re-derived by whoever checks them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DivisorSpec {
    /// `xi~ = [p]_q`.
    XiTilde,
    /// `phi^r(xi~) = [p]_{q^{p^r}}`.
    PhiPowerXi { r: u32 },
    /// `xi~_r = xi~ phi(xi~) ... phi^{r-1}(xi~) = [p^r]_q`.
    XiR { r: u32 },
    Power { base: Box<DivisorSpec>, exp: u32 },
    Product { factors: Vec<DivisorSpec> },
}

impl DivisorSpec {
    pub fn power(base: DivisorSpec, exp: u32) -> Self {
        DivisorSpec::Power { base: Box::new(base), exp }
    }

    /// The divisor as a polynomial in `q`.
    pub fn q_poly(&self, p: u64) -> UPoly {
        match self {
            DivisorSpec::XiTilde => q_int_poly(p as usize),
            DivisorSpec::PhiPowerXi { r } => q_int_poly(p as usize).inflate(p.pow(*r) as usize),
            DivisorSpec::XiR { r } => q_int_poly(p.pow(*r) as usize),
            DivisorSpec::Power { base, exp } => base.q_poly(p).pow(*exp as u64),
            DivisorSpec::Product { factors } => {
                factors.iter().fold(UPoly::one(), |acc, f| acc.mul(&f.q_poly(p)))
            }
        }
    }

    /// The divisor in the level variable `s = q^{1/p^h} - 1`.
    pub fn s_poly(&self, p: u64, level: u32) -> UPoly {
        self.q_poly(p).inflate(p.pow(level) as usize).shift_by_one()
    }

    pub fn degree(&self, p: u64, level: u32) -> usize {
        self.q_poly(p).degree().unwrap_or(0) * p.pow(level) as usize
    }
}

/// Sparse record of which input coefficient reaches which output
/// coefficient, with the valuation of the connecting weight (capped).
#[derive(Clone, Debug)]
pub(crate) struct Valmap {
    pub entries: Vec<(usize, usize, u32)>,
}

impl Valmap {
    /// Multiplication by a polynomial `d(s)`, outputs below `m`.
    pub fn multiplication(p: u64, d: &UPoly, m: usize, cap: u32) -> Self {
        let mut entries = Vec::new();
        for (i, c) in d.coeffs().iter().enumerate() {
            if let Some(v) = vp(p, c) {
                for j in 0..m.saturating_sub(i) {
                    entries.push((i + j, j, v.min(cap)));
                }
            }
        }
        Valmap { entries }
    }

    /// The Frobenius substitution `s -> (1+s)^p - 1`, outputs below `m`.
    pub fn frobenius(p: u64, m: usize, cap: u32) -> Self {
        let modulus = p_pow(p, cap);
        let sigma = UPoly::x_pow_minus_one(p as usize).shift_by_one();
        let mut power = vec![BigInt::zero(); m];
        if m > 0 {
            power[0] = BigInt::one();
        }
        let mut entries = Vec::new();
        for j in 0..m {
            for (k, c) in power.iter().enumerate() {
                if let Some(v) = vp(p, c) {
                    entries.push((k, j, v.min(cap)));
                }
            }
            power = crate::series::tower::mul_trunc(&power, sigma.coeffs(), m, &modulus);
        }
        Valmap { entries }
    }

    pub fn identity(m: usize) -> Self {
        Valmap { entries: (0..m).map(|k| (k, k, 0)).collect() }
    }
}

fn prefix_min(v: &mut Vec<u32>) {
    let mut run = u32::MAX;
    for x in v.iter_mut() {
        run = run.min(*x);
        *x = run;
    }
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Largest check staircase (and matching input staircases, never above
/// the known ones) satisfying both the well-definedness and the tightness
/// conditions.
pub(crate) fn tighten(m_out: usize, cap: u32, inputs: &[(&Valmap, &[u32])]) -> (Vec<u32>, Vec<Vec<u32>>) {
    let mut px: Vec<Vec<u32>> = inputs.iter().map(|(_, known)| known.to_vec()).collect();
    loop {
        let mut pc = vec![cap; m_out];
        for ((map, _), x) in inputs.iter().zip(&px) {
            for &(k, j, v) in &map.entries {
                if k < m_out {
                    let nj = x.get(j).copied().unwrap_or(0);
                    pc[k] = pc[k].min(nj.saturating_add(v));
                }
            }
        }
        prefix_min(&mut pc);
        let mut changed = false;
        for ((map, _), x) in inputs.iter().zip(px.iter_mut()) {
            let mut reach = vec![0u32; x.len()];
            for &(k, j, v) in &map.entries {
                if j < reach.len() && k < pc.len() {
                    reach[j] = reach[j].max(pc[k].saturating_sub(v));
                }
            }
            let mut next: Vec<u32> = x.iter().zip(&reach).map(|(a, b)| *a.min(b)).collect();
            prefix_min(&mut next);
            if next != *x {
                *x = next;
                changed = true;
            }
        }
        if !changed {
            return (pc, px);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisibilityCertificate {
    pub prime: u64,
    pub level: u32,
    pub divisor: DivisorSpec,
    pub dividend: TowerSeries,
    pub quotient: TowerSeries,
    /// The product `divisor * quotient` agrees with `dividend` modulo
    /// `p^{check_precisions[k]}` in every coefficient `k`.
    pub check_precisions: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NygaardCertificate {
    pub prime: u64,
    pub level: u32,
    pub element: TowerSeries,
    /// `phi(element) = xi~^n * quotient` with `n = nygaard_level`.
    pub nygaard_level: u32,
    pub quotient: TowerSeries,
    pub check_precisions: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorizationCertificate {
    pub prime: u64,
    pub n: u32,
    /// `a_r = floor(n / p^r)` for `r = 1, 2, ...` while `p^r <= n`.
    pub exponents: Vec<u32>,
    pub unit: TowerSeries,
    pub check_precisions: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Divisibility(DivisibilityCertificate),
    Nygaard(NygaardCertificate),
    Factorization(FactorizationCertificate),
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Divisibility(_) => "divisibility",
            Certificate::Nygaard(_) => "nygaard",
            Certificate::Factorization(_) => "factorization",
        }
    }
}

/// `(N', M')`: the top of the check staircase and its length.
pub fn achieved(check: &[u32]) -> (u32, usize) {
    (check.first().copied().unwrap_or(0), check.len())
}

fn self_check(cert: Certificate) -> Result<Certificate> {
    let verdict = recheck::recheck(&cert);
    if !verdict.pass {
        return Err(Error::Internal(format!("freshly built {} certificate fails: {}", cert.kind(), verdict.detail)));
    }
    Ok(cert)
}

impl DivisibilityCertificate {
    /// Package `dividend = divisor * quotient`, where `quotient` is known at
    /// its own staircase.
    pub fn build(dividend: &TowerSeries, divisor: DivisorSpec, quotient: &TowerSeries) -> Result<Self> {
        let (p, h) = (dividend.prime(), dividend.level());
        let d = divisor.s_poly(p, h);
        let m = dividend.order();
        let cap = dividend.coeff_precision();
        let mul = Valmap::multiplication(p, &d, m, cap);
        let id = Valmap::identity(m);
        let (pc, px) = tighten(m, cap, &[(&id, dividend.precisions()), (&mul, quotient.precisions())]);
        let cert = DivisibilityCertificate {
            prime: p,
            level: h,
            divisor,
            dividend: dividend.restrict(&px[0]),
            quotient: quotient.restrict(&px[1]),
            check_precisions: pc,
        };
        match self_check(Certificate::Divisibility(cert))? {
            Certificate::Divisibility(c) => Ok(c),
            _ => unreachable!(),
        }
    }
}

impl NygaardCertificate {
    pub fn build(element: &TowerSeries, n: u32, quotient: &TowerSeries) -> Result<Self> {
        let (p, h) = (element.prime(), element.level());
        let m = element.order();
        let cap = element.coeff_precision();
        let d = DivisorSpec::power(DivisorSpec::XiTilde, n).s_poly(p, h);
        let phi = Valmap::frobenius(p, m, cap);
        let mul = Valmap::multiplication(p, &d, m, cap);
        let (pc, px) = tighten(m, cap, &[(&phi, element.precisions()), (&mul, quotient.precisions())]);
        let cert = NygaardCertificate {
            prime: p,
            level: h,
            element: element.restrict(&px[0]),
            nygaard_level: n,
            quotient: quotient.restrict(&px[1]),
            check_precisions: pc,
        };
        match self_check(Certificate::Nygaard(cert))? {
            Certificate::Nygaard(c) => Ok(c),
            _ => unreachable!(),
        }
    }

    pub fn achieved(&self) -> (u32, usize) {
        achieved(&self.check_precisions)
    }
}

impl FactorizationCertificate {
    /// `unit` is known exactly (it comes from exact division in `Z[q]`).
    pub fn build(p: u64, n: u32, exponents: Vec<u32>, unit: &TowerSeries) -> Result<Self> {
        let m = unit.order();
        let cap = unit.coeff_precision();
        let d = factorization_divisor(&exponents).s_poly(p, 0);
        let mul = Valmap::multiplication(p, &d, m, cap);
        let (pc, px) = tighten(m, cap, &[(&mul, unit.precisions())]);
        let cert = FactorizationCertificate {
            prime: p,
            n,
            exponents,
            unit: unit.restrict(&px[0]),
            check_precisions: pc,
        };
        match self_check(Certificate::Factorization(cert))? {
            Certificate::Factorization(c) => Ok(c),
            _ => unreachable!(),
        }
    }

    pub fn divisor(&self) -> DivisorSpec {
        factorization_divisor(&self.exponents)
    }

    pub fn achieved(&self) -> (u32, usize) {
        achieved(&self.check_precisions)
    }
}

/// `prod_r phi^{r-1}(xi~)^{a_r}`.
pub fn factorization_divisor(exponents: &[u32]) -> DivisorSpec {
    DivisorSpec::Product {
        factors: exponents
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(r, &a)| DivisorSpec::power(DivisorSpec::PhiPowerXi { r: r as u32 }, a))
            .collect(),
    }
}

/// Outcome of dividing by a distinguished polynomial.
#[derive(Clone, Debug)]
pub enum Division {
    /// `quotient` is the provable quotient (the certificate may store it
    /// at a slightly lower, fully checkable staircase).
    Divisible { quotient: TowerSeries, certificate: DivisibilityCertificate },
    /// Remainder coefficients that are nonzero at their known precision.
    NotDivisible { remainder: Vec<BigInt>, remainder_precisions: Vec<u32> },
}

impl Division {
    pub fn is_divisible(&self) -> bool {
        matches!(self, Division::Divisible { .. })
    }
}

/// Divide by a divisor from the catalogue, returning a certificate or the
/// remainder as evidence.
pub fn distinguished_divide(f: &TowerSeries, divisor: &DivisorSpec) -> Result<Division> {
    let d = divisor.s_poly(f.prime(), f.level());
    let raw: RawDivision = divide_raw(f, &d)?;
    if raw.remainder_precs.contains(&0) {
        return Err(Error::PrecisionExhausted { achieved: 0 });
    }
    if !raw.divisible(f.prime()) {
        let p = f.prime();
        let remainder = raw
            .remainder
            .iter()
            .zip(&raw.remainder_precs)
            .map(|(r, &u)| r.mod_floor(&p_pow(p, u)))
            .collect();
        return Ok(Division::NotDivisible { remainder, remainder_precisions: raw.remainder_precs });
    }
    let certificate = DivisibilityCertificate::build(f, divisor.clone(), &raw.quotient)?;
    Ok(Division::Divisible { quotient: raw.quotient, certificate })
}
