//! The base prism `(Z_p[[q-1]], [p]_q)` and its finite-level tower: the
//! delta operator, distinguished elements, Nygaard-level certificates, the
//! factorization of `[n]_q!` and q-divided powers.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cert::{
    distinguished_divide, factorization_divisor, DivisibilityCertificate, Division, DivisorSpec,
    FactorizationCertificate, NygaardCertificate,
};
use crate::cyclotomic::cyclotomic_reduce;
use crate::error::{Error, Result};
use crate::padic::PadicNum;
use crate::poly::LaurentPoly;
use crate::qcomb::{check_identity, q_factorial_poly};
use crate::series::division::divide_raw;
use crate::series::tower::TowerSeries;
use crate::upoly::UPoly;

/// `xi~ = [p]_q` at the given level and truncation.
pub fn xi_tilde(p: u64, level: u32, n: u32, m: usize) -> TowerSeries {
    TowerSeries::from_q_poly(p, level, n, m, &DivisorSpec::XiTilde.q_poly(p))
}

/// `phi^r(xi~) = [p]_{q^{p^r}}`.
pub fn phi_power_xi(p: u64, r: u32, level: u32, n: u32, m: usize) -> TowerSeries {
    TowerSeries::from_q_poly(p, level, n, m, &DivisorSpec::PhiPowerXi { r }.q_poly(p))
}

/// `xi~_r = xi~ phi(xi~) ... phi^{r-1}(xi~)`, formed as the product.
pub fn xi_r(p: u64, r: u32, level: u32, n: u32, m: usize) -> TowerSeries {
    (0..r).fold(TowerSeries::one(p, level, n, m), |acc, i| {
        acc.mul(&phi_power_xi(p, i, level, n, m)).expect("same ring")
    })
}

/// `delta(f) = (phi(f) - f^p) / p`. The caller supplies one guard digit:
/// the result is one digit less precise than `f`.
pub fn delta(f: &TowerSeries) -> Result<TowerSeries> {
    let diff = f.frobenius().sub(&f.pow(f.prime()))?;
    diff.div_by_p().map_err(|e| match e {
        Error::NotDivisibleByP => Error::Internal("phi(f) - f^p is not divisible by p".into()),
        other => other,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistinguishedReport {
    pub distinguished: bool,
    /// `f(1) mod p^N`; must be divisible by `p`.
    pub value_at_1: String,
    /// `delta(f)(1)`; must be a unit.
    pub delta_at_1: String,
}

pub fn is_distinguished(f: &TowerSeries) -> Result<DistinguishedReport> {
    let f1 = f.evaluate_q1();
    let d1 = delta(f)?.evaluate_q1();
    Ok(DistinguishedReport {
        distinguished: !f1.is_unit() && d1.is_unit(),
        value_at_1: f1.to_string(),
        delta_at_1: d1.to_string(),
    })
}

/// Largest `n <= cap` with `xi~^n | phi(f)`, with its certificate.
pub fn nygaard_level(f: &TowerSeries, cap: u32) -> Result<NygaardCertificate> {
    let (p, h) = (f.prime(), f.level());
    let d = DivisorSpec::XiTilde.s_poly(p, h);
    let dd = d.degree().unwrap_or(0);
    if cap as usize * dd > f.order() {
        return Err(Error::OrderExhausted { required: cap as usize * dd, available: f.order() });
    }
    let mut g = f.frobenius();
    let mut level = 0;
    while level < cap {
        let raw = match divide_raw(&g, &d) {
            Ok(r) => r,
            Err(e) if e.is_precision_limit() => return Err(Error::PrecisionExhausted { achieved: level }),
            Err(e) => return Err(e),
        };
        if raw.remainder_precs.contains(&0) {
            return Err(Error::PrecisionExhausted { achieved: level });
        }
        if !raw.divisible(p) {
            break;
        }
        if raw.quotient.order() == 0 {
            return Err(Error::PrecisionExhausted { achieved: level });
        }
        g = raw.quotient;
        level += 1;
    }
    NygaardCertificate::build(f, level, &g)
}

/// `a_r = floor(n / p^r)` for every `r` with `p^r <= n`.
pub fn qfact_exponents(p: u64, n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut pr = p;
    while pr <= n as u64 {
        out.push((n as u64 / pr) as u32);
        pr *= p;
    }
    out
}

/// `[n]_q! = u * prod_r phi^{r-1}(xi~)^{a_r}` with an explicit unit `u`.
pub fn qfact_factorize(p: u64, n: u32, prec: u32, order: usize) -> Result<FactorizationCertificate> {
    if n == 0 {
        return Err(Error::InvalidArgument("factorization needs n >= 1".into()));
    }
    let exps = qfact_exponents(p, n);
    let divisor = factorization_divisor(&exps);
    let dq = divisor.q_poly(p);
    let deg = dq.degree().unwrap_or(0);
    if order <= deg {
        return Err(Error::OrderExhausted { required: deg + 1, available: order });
    }
    // phi^{r-1}(xi~) = Phi_{p^r} occurs in [n]_q! exactly floor(n/p^r) times,
    // so the division in Z[q] is exact
    let u = q_factorial_poly(n as usize)
        .div_exact_monic(&dq)
        .ok_or_else(|| Error::Internal(format!("[{n}]_q! is not divisible by the cyclotomic part")))?;
    let unit = TowerSeries::from_q_poly(p, 0, prec, order, &u);
    if !unit.evaluate_q1().is_unit() {
        return Err(Error::Internal(format!("u(1) = {} is not a unit", unit.evaluate_q1())));
    }
    FactorizationCertificate::build(p, n, exps, &unit)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankOneReport {
    pub rank_one: bool,
    /// `phi(x) - x^p` at the common staircase.
    pub difference: TowerSeries,
}

pub fn rank_one_check(x: &TowerSeries) -> Result<RankOneReport> {
    let difference = x.frobenius().sub(&x.pow(x.prime()))?;
    Ok(RankOneReport { rank_one: difference.is_zero(), difference })
}

#[derive(Clone, Debug, Serialize)]
pub struct QDividedPower {
    pub n: u32,
    pub gamma: TowerSeries,
    pub certificate: NygaardCertificate,
    /// One certificate per distinguished factor of `[n]_q!` divided out.
    pub steps: Vec<DivisibilityCertificate>,
    pub factorization: FactorizationCertificate,
}

/// `gamma_{n,q}(x - 1) = (x - 1)(x - q)...(x - q^{n-1}) / [n]_q!`.
pub fn qdivided_power(x: &TowerSeries, n: u32) -> Result<QDividedPower> {
    if n == 0 {
        return Err(Error::InvalidArgument("q-divided powers need n >= 1".into()));
    }
    let (p, h) = (x.prime(), x.level());
    let (prec, order) = (x.coeff_precision(), x.order());
    if !rank_one_check(x)?.rank_one {
        return Err(Error::Hypothesis("x is not of rank 1 (phi(x) != x^p)".into()));
    }
    let one = TowerSeries::one(p, h, prec, order);
    let x1 = x.sub(&one)?;
    match nygaard_level(&x1, 1) {
        Ok(c) if c.nygaard_level >= 1 => {}
        Ok(_) => return Err(Error::Hypothesis("x - 1 is not in the first Nygaard step".into())),
        Err(e) => return Err(e),
    }

    let q = TowerSeries::from_q_poly(p, h, prec, order, &UPoly::from_i64(&[0, 1]));
    let mut num = one.clone();
    let mut qi = one.clone();
    for _ in 0..n {
        num = num.mul(&x.sub(&qi)?)?;
        qi = qi.mul(&q)?;
    }

    let factorization = qfact_factorize(p, n, prec, order)?;
    let mut cur = num;
    let mut steps = Vec::new();
    for (r, &a) in factorization.exponents.iter().enumerate() {
        let divisor = DivisorSpec::PhiPowerXi { r: r as u32 };
        for _ in 0..a {
            match distinguished_divide(&cur, &divisor)? {
                Division::Divisible { quotient, certificate } => {
                    steps.push(certificate);
                    cur = quotient;
                }
                Division::NotDivisible { remainder, .. } => {
                    return Err(Error::Internal(format!(
                        "Pochhammer product not divisible by phi^{r}(xi~); remainder {remainder:?}"
                    )));
                }
            }
        }
    }
    let unit = factorization.unit.embed(h)?;
    let gamma = cur.mul(&unit.inv()?)?;
    let certificate = nygaard_level(&gamma, n)?;
    if certificate.nygaard_level < n {
        return Err(Error::Internal(format!(
            "gamma_{n} only reaches Nygaard level {}",
            certificate.nygaard_level
        )));
    }
    Ok(QDividedPower { n, gamma, certificate, steps, factorization })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub prime: u64,
    pub r: u32,
    /// `x^{p^r} - y^{p^r} == prod (x - q^i y)` modulo `phi^{r-1}(xi~)`.
    pub congruence: bool,
    /// `phi^r(xi~)` reduced modulo `xi~`, as coefficients of `1, q, ...`.
    pub phi_r_mod_xi: Vec<String>,
    /// The unit `u` with `phi^r(xi~) == p u` modulo `xi~`.
    pub unit: Vec<String>,
    pub unit_check: bool,
}

pub fn congruence_check(p: u64, r: u32) -> Result<CongruenceReport> {
    if r == 0 {
        return Err(Error::InvalidArgument("congruence check needs r >= 1".into()));
    }
    let congruence = check_identity("cyclotomic-congruence", &[p as i64, r as i64])?.pass;
    let phi_r = LaurentPoly::from_q_poly(&DivisorSpec::PhiPowerXi { r }.q_poly(p));
    // xi~ = Phi_p, so reduction modulo xi~ is reduction into Z[zeta_p]
    let red = cyclotomic_reduce(&phi_r, p, 1).constant_part();
    let pb = BigInt::from(p);
    let divisible = red.coeffs.iter().all(|c| (c % &pb).is_zero());
    let unit: Vec<BigInt> = red.coeffs.iter().map(|c| c / &pb).collect();
    // a unit of Z[zeta_p] has norm +-1; here we require the reduction to be
    // exactly p, i.e. u = 1
    let unit_is_one = unit.first().is_some_and(|c| c.is_one()) && unit.iter().skip(1).all(|c| c.is_zero());
    Ok(CongruenceReport {
        prime: p,
        r,
        congruence,
        phi_r_mod_xi: red.coeffs.iter().map(|c| c.to_string()).collect(),
        unit: unit.iter().map(|c| c.to_string()).collect(),
        unit_check: divisible && unit_is_one,
    })
}

/// Exact `q^m` at level 0, flat precision.
pub fn q_power_int(p: u64, m: u32, prec: u32, order: usize) -> TowerSeries {
    TowerSeries::from_q_poly(p, 0, prec, order, &UPoly::monomial(BigInt::one(), m as usize))
}

/// `delta(xi~)(1) = 1 - p^{p-1}`, the value the unit test must see.
pub fn delta_xi_at_1_expected(p: u64, prec: u32) -> PadicNum {
    let pp = num_traits::pow(BigInt::from(p), (p - 1) as usize);
    PadicNum::new(p, prec, BigInt::one() - pp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_tilde_examples() {
        let xi = xi_tilde(2, 0, 10, 4);
        assert_eq!(xi, TowerSeries::flat(2, 0, 10, 4, vec![2.into(), 1.into()]));
        let phi = phi_power_xi(2, 1, 0, 10, 4);
        assert_eq!(phi, TowerSeries::flat(2, 0, 10, 4, vec![2.into(), 2.into(), 1.into()]));
        let x2 = xi_r(3, 2, 0, 10, 12);
        assert_eq!(x2, TowerSeries::from_q_poly(3, 0, 10, 12, &crate::upoly::q_int_poly(9)));
    }

    #[test]
    fn delta_examples() {
        for p in [2u64, 3, 5] {
            let q = TowerSeries::q(p, 9, 12);
            assert!(delta(&q).unwrap().is_zero());
            let d = delta(&xi_tilde(p, 0, 9, 12)).unwrap();
            assert_eq!(d.evaluate_q1(), delta_xi_at_1_expected(p, 8));
        }
    }

    #[test]
    fn distinguished_examples() {
        let p = 3;
        assert!(is_distinguished(&xi_tilde(p, 0, 9, 12)).unwrap().distinguished);
        assert!(!is_distinguished(&TowerSeries::one(p, 0, 9, 12)).unwrap().distinguished);
        for r in 1..=3 {
            assert!(is_distinguished(&phi_power_xi(p, r, 0, 9, 40)).unwrap().distinguished);
        }
    }

    #[test]
    fn nygaard_examples() {
        let mu = TowerSeries::mu(3, 12, 24);
        let c = nygaard_level(&mu, 3).unwrap();
        assert_eq!(c.nygaard_level, 1);
        let c2 = nygaard_level(&mu.mul(&mu).unwrap(), 3).unwrap();
        assert_eq!(c2.nygaard_level, 2);
        let c0 = nygaard_level(&TowerSeries::one(3, 0, 12, 24), 3).unwrap();
        assert_eq!(c0.nygaard_level, 0);
    }

    #[test]
    fn factorization_examples() {
        let c = qfact_factorize(2, 4, 16, 32).unwrap();
        assert_eq!(c.exponents, vec![2, 1]);
        let u3 = TowerSeries::from_q_poly(2, 0, 16, 32, &UPoly::from_i64(&[1, 1, 1]));
        assert!(c.unit.congruent(&u3).unwrap());
        let c = qfact_factorize(3, 3, 16, 32).unwrap();
        assert_eq!(c.exponents, vec![1]);
        let u2 = TowerSeries::from_q_poly(3, 0, 16, 32, &UPoly::from_i64(&[1, 1]));
        assert!(c.unit.congruent(&u2).unwrap());
        let c = qfact_factorize(2, 2, 16, 32).unwrap();
        assert!(c.unit.congruent(&TowerSeries::one(2, 0, 16, 32)).unwrap());
    }

    #[test]
    fn rank_one_examples() {
        let q = TowerSeries::q(3, 10, 16);
        assert!(rank_one_check(&q).unwrap().rank_one);
        let one = TowerSeries::one(3, 0, 10, 16);
        let mu = TowerSeries::mu(3, 10, 16);
        let generic = one.add(&mu.mul(&mu).unwrap()).unwrap();
        assert!(!rank_one_check(&generic).unwrap().rank_one);
    }

    #[test]
    fn qdivided_power_of_q_vanishes() {
        let q = TowerSeries::q(2, 12, 32);
        let g = qdivided_power(&q, 3).unwrap();
        assert!(g.gamma.is_zero());
        assert!(g.certificate.nygaard_level >= 3);
    }

    #[test]
    fn congruence_examples() {
        for (p, r) in [(2, 1), (3, 2), (2, 2)] {
            let rep = congruence_check(p, r).unwrap();
            assert!(rep.congruence && rep.unit_check, "p={p} r={r}");
        }
    }

    #[test]
    fn zero_constant_unit_rejected() {
        assert!(TowerSeries::mu(2, 4, 4).inv().is_err());
    }
}
