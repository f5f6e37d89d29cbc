//! The q-logarithm: its formal bivariate expansion with the checks that pin
//! it down, and its values on rank-one elements `q^a` of `Z_p[[q-1]]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::cert::NygaardCertificate;
use crate::error::{Error, Result};
use crate::padic::{p_pow, padic_binomial_to, vp_factorial, vp_u64, PadicNum};
use crate::prism::{nygaard_level, rank_one_check, xi_tilde};
use crate::series::bivar::{BivarSeries, QSeries, Shape};
use crate::series::tower::{binomial_qpower, TowerSeries};
use crate::upoly::{q_int_poly, UPoly};

/// `log_q(x) = sum_{n>=1} (-1)^{n-1} q^{-n(n-1)/2} (x, -1; q)_n / [n]_q`
/// at shape `(mq, mx)`; terms with `n >= mx` vanish in the truncation.
pub fn qlog_formal(mq: usize, mx: usize) -> Result<BivarSeries> {
    let s = Shape::new(mq, mx);
    let mut poch = BivarSeries::one(s);
    let mut acc = BivarSeries::zero(s);
    for n in 1..mx {
        poch = poch.mul_by_x_minus_qpow(n as i64 - 1);
        let tri = (n * (n - 1) / 2) as i64;
        let mut c = QSeries::q_pow(-tri, mq).mul(&QSeries::q_int(n as u64, mq).inv()?);
        if n % 2 == 0 {
            c = c.neg();
        }
        acc = acc.add(&poch.mul_qseries(&c));
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterizationReport {
    pub order_q: usize,
    pub order_x: usize,
    /// `nabla_q log_q = 1/x`.
    pub derivative: bool,
    /// `log_q(1) = 0`.
    pub value_at_one: bool,
    /// `log(q) log_q(x) = (q - 1) log(x)`.
    pub classical_relation: bool,
    /// Largest numerator or denominator met, as a size indicator.
    pub height: String,
}

impl CharacterizationReport {
    pub fn pass(&self) -> bool {
        self.derivative && self.value_at_one && self.classical_relation
    }
}

/// Check the three defining properties of `log_q` at shape `(mq, mx)`,
/// exactly over `Q`. The series is expanded one step further so that its
/// q-derivative is known on the full shape.
pub fn verify_characterization(mq: usize, mx: usize) -> Result<CharacterizationReport> {
    let s = Shape::new(mq, mx);
    let big = qlog_formal(mq + 1, mx + 1)?;
    let l = big.truncate(s);
    let derivative = big.nabla_q()? == BivarSeries::x(s).inv()?;
    let value_at_one = l.at_x1().is_zero();
    let lhs = l.mul_qseries(&QSeries::log_q(mq));
    let t = QSeries::q_pow(1, mq).sub(&QSeries::one(mq));
    let rhs = BivarSeries::x(s).log()?.mul_qseries(&t);
    Ok(CharacterizationReport {
        order_q: mq,
        order_x: mx,
        derivative,
        value_at_one,
        classical_relation: lhs == rhs,
        height: big.height().to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QLogReport {
    pub input: String,
    pub exponent: PadicNum,
    pub terms_used: usize,
    /// Every omitted term is divisible by this power of `q - 1`.
    pub tail_bound: String,
    pub result: TowerSeries,
    /// `log_q(x)` lies in the first Nygaard step.
    pub level_one: NygaardCertificate,
    /// `log_q(x) - (x - 1)` lies in the second Nygaard step.
    pub level_two: NygaardCertificate,
    pub checks: Vec<Check>,
}

impl QLogReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Largest `v_p(n)` over `1 <= n < m`.
fn max_vp_below(p: u64, m: usize) -> u32 {
    (1..m as u64).map(|n| vp_u64(p, n)).max().unwrap_or(0)
}

/// Digits of `a` that `log_q(q^a)` costs at order `m`.
pub fn qlog_precision_loss(p: u64, m: usize) -> u32 {
    max_vp_below(p, m) + vp_factorial(p, m as u64)
}

fn shift_s(f: &TowerSeries, n: usize) -> TowerSeries {
    let m = f.order();
    let mut coeffs = vec![BigInt::zero(); n.min(m)];
    coeffs.extend_from_slice(&f.coeffs()[..m.saturating_sub(n)]);
    TowerSeries::from_parts(f.prime(), f.level(), coeffs, f.precisions().to_vec())
}

/// `(q^c - 1) / (q - 1) = sum_k binom(c, k+1) (q - 1)^k`.
fn qpow_minus_one_over_mu(c: &PadicNum, n: u32, m: usize) -> Result<TowerSeries> {
    let coeffs = (0..m as u64)
        .map(|k| padic_binomial_to(c, k + 1, n).map(|b| b.value().clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(TowerSeries::flat(c.prime(), 0, n, m, coeffs))
}

/// `(q^{p^v b} - 1) / (q^{p^v} - 1) = sum_{k>=1} binom(b, k) (q^{p^v} - 1)^{k-1}`.
fn geometric_quotient(b: &PadicNum, v: u32, n: u32, m: usize) -> Result<TowerSeries> {
    let p = b.prime();
    let pv = p.pow(v) as usize;
    let w = TowerSeries::from_q_poly(p, 0, n, m, &UPoly::x_pow_minus_one(pv));
    let mut acc = TowerSeries::zero(p, 0, n, m);
    for k in (1..=m as u64).rev() {
        let c = padic_binomial_to(b, k, n)?;
        acc = acc.mul(&w)?.add(&TowerSeries::constant(p, 0, n, m, c.value().clone()))?;
    }
    Ok(acc)
}

/// `log_q(x)` for `x = q^a` at level 0.
///
/// With `x = q^a` the powers of `q` in each term cancel, leaving
/// `(-1)^{n-1} prod_{i<n} (q^{a-i} - 1) / [n]_q`. The non-unit part of
/// `[n]_q` is `[p^v]_q` with `v = v_p(n)`, and it divides the single factor
/// with `i == a mod p^v` exactly, so no lossy division is needed.
pub fn qlog_element(x: &TowerSeries) -> Result<QLogReport> {
    let (p, m) = (x.prime(), x.order());
    if x.level() != 0 {
        return Err(Error::InvalidArgument("the q-logarithm is evaluated at level 0".into()));
    }
    if m < 2 {
        return Err(Error::OrderExhausted { required: 2, available: m });
    }
    if !rank_one_check(x)?.rank_one {
        return Err(Error::Hypothesis("x is not of rank 1 (phi(x) != x^p)".into()));
    }
    let one = TowerSeries::one(p, 0, x.coeff_precision(), m);
    let x1 = x.sub(&one)?;
    if nygaard_level(&x1, 1)?.nygaard_level < 1 {
        return Err(Error::Hypothesis("x - 1 is not in the first Nygaard step".into()));
    }

    let a = x.coeff(1);
    let loss = qlog_precision_loss(p, m);
    let n_out = a.precision().saturating_sub(loss);
    if n_out == 0 {
        return Err(Error::InsufficientPrecision { required: loss + 1, available: a.precision() });
    }
    let check_prec = a.precision().saturating_sub(vp_factorial(p, m as u64 - 1));
    if check_prec == 0 || !x.congruent(&binomial_qpower(&a, m, check_prec)?)? {
        return Err(Error::Hypothesis("x is not a power q^a of q".into()));
    }

    let vmax = max_vp_below(p, m);
    let mut istar = vec![0u64];
    let mut special = vec![TowerSeries::zero(p, 0, n_out, m)];
    for v in 1..=vmax {
        let i = a.value().mod_floor(&p_pow(p, v)).to_u64().expect("small residue");
        let mut b = a.sub(&PadicNum::new(p, a.precision(), i))?;
        for _ in 0..v {
            b = b.div_by_p()?;
        }
        istar.push(i);
        special.push(geometric_quotient(&b, v, n_out, m)?);
    }

    // prods[v] = prod_{i<n} g_i with the factor i == istar[v] divided by [p^v]_q
    let mut prods = vec![TowerSeries::one(p, 0, n_out, m); vmax as usize + 1];
    let mut acc = TowerSeries::zero(p, 0, n_out, m);
    for n in 1..m {
        let i = (n - 1) as u64;
        let g = qpow_minus_one_over_mu(&a.sub(&PadicNum::new(p, a.precision(), i))?, n_out, m)?;
        for (v, prod) in prods.iter_mut().enumerate() {
            let factor = if v > 0 && i == istar[v] { &special[v] } else { &g };
            *prod = prod.mul(factor)?;
        }
        let v = vp_u64(p, n as u64);
        let unit = q_int_poly(n)
            .div_exact_monic(&q_int_poly(p.pow(v) as usize))
            .ok_or_else(|| Error::Internal(format!("[p^{v}]_q does not divide [{n}]_q")))?;
        let unit = TowerSeries::from_q_poly(p, 0, n_out, m, &unit).inv()?;
        let mut term = shift_s(&prods[v as usize].mul(&unit)?, n);
        if n % 2 == 0 {
            term = term.neg();
        }
        acc = acc.add(&term)?;
    }

    let a_out = a.truncate(n_out);
    let expected = TowerSeries::mu(p, n_out, m).scale(&a_out)?;
    let x_out = x1.truncate(n_out, m);
    let level_one = nygaard_level(&acc, 1)?;
    let level_two = nygaard_level(&acc.sub(&x_out)?, 2)?;
    let checks = vec![
        Check::new("equals a(q-1)", acc.congruent(&expected)?, format!("a = {a_out}")),
        Check::new("nygaard level >= 1", level_one.nygaard_level >= 1, level_one.nygaard_level.to_string()),
        Check::new(
            "log minus (x-1) has nygaard level >= 2",
            level_two.nygaard_level >= 2,
            level_two.nygaard_level.to_string(),
        ),
    ];
    Ok(QLogReport {
        input: format!("q^a with a = {a}"),
        exponent: a,
        terms_used: m - 1,
        tail_bound: format!("(q-1)^{m}"),
        result: acc,
        level_one,
        level_two,
        checks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditivityReport {
    pub pass: bool,
    pub log_x: TowerSeries,
    pub log_y: TowerSeries,
    pub log_xy: TowerSeries,
}

/// `log_q(xy) = log_q(x) + log_q(y)`.
pub fn verify_additivity(x: &TowerSeries, y: &TowerSeries) -> Result<AdditivityReport> {
    let lx = qlog_element(x)?.result;
    let ly = qlog_element(y)?.result;
    let lxy = qlog_element(&x.mul(y)?)?.result;
    let pass = lxy.congruent(&lx.add(&ly)?)?;
    Ok(AdditivityReport { pass, log_x: lx, log_y: ly, log_xy: lxy })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EigenspaceReport {
    pub pass: bool,
    /// `phi(y) - xi~ y`.
    pub difference: TowerSeries,
}

/// `phi(y) = xi~ y`, the eigenspace the q-logarithm lands in.
pub fn eigenspace_check(y: &TowerSeries) -> Result<EigenspaceReport> {
    let xi = xi_tilde(y.prime(), y.level(), y.coeff_precision(), y.order());
    let difference = y.frobenius().sub(&xi.mul(y)?)?;
    Ok(EigenspaceReport { pass: difference.is_zero(), difference })
}

/// An element `a` of `Z_p = T_p(mu_{p^infty})`, carried with enough digits
/// for the model at the requested `(N, M)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TateExponent {
    pub a: PadicNum,
}

impl TateExponent {
    pub fn new(a: PadicNum) -> Self {
        TateExponent { a }
    }

    /// An integer exponent, lifted to the digits the model needs.
    pub fn integer(p: u64, a: i64, n: u32, m: usize) -> Self {
        TateExponent { a: PadicNum::new(p, Self::required_precision(p, n, m), a) }
    }

    /// `N + v_p(M!) + max v_p(n) + v_p((M-1)!)`: the last term pays for
    /// expanding `q^a`, the others for the logarithm.
    pub fn required_precision(p: u64, n: u32, m: usize) -> u32 {
        n + qlog_precision_loss(p, m) + vp_factorial(p, m.saturating_sub(1) as u64)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceModelReport {
    pub exponent: PadicNum,
    pub result: TowerSeries,
    pub expected: TowerSeries,
    pub matches: bool,
    pub eigenspace: EigenspaceReport,
    pub qlog: QLogReport,
}

impl TraceModelReport {
    pub fn pass(&self) -> bool {
        self.matches && self.eigenspace.pass && self.qlog.pass()
    }
}

/// `a -> log_q(q^a)` at `(N, M)`, compared with `a (q - 1)`.
pub fn trace_map_model(a: &TateExponent, n: u32, m: usize) -> Result<TraceModelReport> {
    let p = a.a.prime();
    let need = TateExponent::required_precision(p, n, m);
    if a.a.precision() < need {
        return Err(Error::InsufficientPrecision { required: need, available: a.a.precision() });
    }
    let working = n + qlog_precision_loss(p, m);
    let x = binomial_qpower(&a.a, m, working)?;
    let qlog = qlog_element(&x)?;
    let result = qlog.result.truncate(n, m);
    let a_n = a.a.truncate(n);
    let expected = TowerSeries::mu(p, n, m).scale(&a_n)?;
    let matches = result.congruent(&expected)?;
    let eigenspace = eigenspace_check(&result)?;
    Ok(TraceModelReport { exponent: a_n, result, expected, matches, eigenspace, qlog })
}
