//! Independent re-verification of serialized certificates.
//!
//! This module deliberately shares no arithmetic with the producers: it
//! reads the raw JSON value, re-derives every divisor and every recomputed
//! quantity from its definition with its own small polynomial routines, and
//! checks the stated identity by plain multiplication.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::Value;

use super::Certificate;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub kind: String,
    pub detail: String,
}

type Check<T> = std::result::Result<T, String>;

pub fn recheck(cert: &Certificate) -> Verdict {
    match serde_json::to_value(cert) {
        Ok(v) => recheck_value(&v),
        Err(e) => fail("unknown", format!("serialization failed: {e}")),
    }
}

pub fn recheck_json(text: &str) -> Verdict {
    match serde_json::from_str::<Value>(text) {
        Ok(v) => recheck_value(&v),
        Err(e) => fail("unknown", format!("not valid JSON: {e}")),
    }
}

fn fail(kind: &str, detail: String) -> Verdict {
    Verdict { pass: false, kind: kind.into(), detail }
}

pub fn recheck_value(v: &Value) -> Verdict {
    let kind = v.get("kind").and_then(Value::as_str).unwrap_or("unknown").to_string();
    let out = match kind.as_str() {
        "divisibility" => {
            exact_keys(v, &["kind", "prime", "level", "divisor", "dividend", "quotient", "check_precisions"])
                .and_then(|_| check_divisibility(v))
        }
        "nygaard" => {
            exact_keys(v, &["kind", "prime", "level", "element", "nygaard_level", "quotient", "check_precisions"])
                .and_then(|_| check_nygaard(v))
        }
        "factorization" => exact_keys(v, &["kind", "prime", "n", "exponents", "unit", "check_precisions"])
            .and_then(|_| check_factorization(v)),
        other => Err(format!("unknown certificate kind `{other}`")),
    };
    match out {
        Ok(detail) => Verdict { pass: true, kind, detail },
        Err(detail) => Verdict { pass: false, kind, detail },
    }
}

fn exact_keys(v: &Value, keys: &[&str]) -> Check<()> {
    let obj = v.as_object().ok_or("certificate is not a JSON object")?;
    if let Some(k) = obj.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(format!("unexpected field `{k}`"));
    }
    if let Some(k) = keys.iter().find(|k| !obj.contains_key(**k)) {
        return Err(format!("missing field `{k}`"));
    }
    Ok(())
}

// ---- polynomials as coefficient vectors -----------------------------------

type Poly = Vec<BigInt>;

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    c
}

fn poly_mul_trunc(a: &[BigInt], b: &[BigInt], m: usize) -> Poly {
    let mut c = vec![BigInt::zero(); m];
    for (i, x) in a.iter().enumerate().take(m) {
        for (j, y) in b.iter().enumerate().take(m - i) {
            c[i + j] += x * y;
        }
    }
    c
}

/// `1 + q + ... + q^{n-1}`.
fn qint(n: u64) -> Poly {
    vec![BigInt::one(); n as usize]
}

/// `q -> q^k`.
fn substitute_power(f: &[BigInt], k: u64) -> Poly {
    let mut out = vec![BigInt::zero(); (f.len().max(1) - 1) * k as usize + 1];
    for (i, c) in f.iter().enumerate() {
        out[i * k as usize] = c.clone();
    }
    out
}

/// Rewrite `sum a_i t^i` in `s = t - 1`: coefficient `k` is
/// `sum_i a_i binom(i, k)`.
fn in_s(f: &[BigInt]) -> Poly {
    let n = f.len();
    let mut out = vec![BigInt::zero(); n];
    let mut row = vec![BigInt::zero(); n + 1];
    row[0] = BigInt::one();
    for (i, a) in f.iter().enumerate() {
        // row holds binom(i, k)
        if i > 0 {
            for k in (1..=i).rev() {
                let prev = row[k - 1].clone();
                row[k] += prev;
            }
        }
        for k in 0..=i {
            out[k] += a * &row[k];
        }
    }
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

fn val(p: u64, c: &BigInt) -> Option<u32> {
    if c.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut c = c.abs();
    let mut v = 0;
    while (&c % &pb).is_zero() {
        c /= &pb;
        v += 1;
    }
    Some(v)
}

fn ppow(p: u64, n: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), n as usize)
}

// ---- JSON extraction --------------------------------------------------------

fn field<'a>(v: &'a Value, name: &str) -> Check<&'a Value> {
    v.get(name).ok_or_else(|| format!("missing field `{name}`"))
}

fn uint(v: &Value, name: &str) -> Check<u64> {
    field(v, name)?.as_u64().ok_or_else(|| format!("`{name}` is not a nonnegative integer"))
}

fn uint_list(v: &Value, name: &str) -> Check<Vec<u32>> {
    let arr = field(v, name)?.as_array().ok_or_else(|| format!("`{name}` is not an array"))?;
    arr.iter()
        .map(|x| {
            x.as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| format!("`{name}` holds a non-integer"))
        })
        .collect()
}

fn decimal(s: &str) -> Check<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    let ok = !digits.is_empty()
        && digits.bytes().all(|b| b.is_ascii_digit())
        && (digits == "0" || !digits.starts_with('0'));
    if !ok || s == "-0" {
        return Err(format!("`{s}` is not a canonical integer"));
    }
    s.parse::<BigInt>().map_err(|e| e.to_string())
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn staircase_ok(s: &[u32]) -> bool {
    s.iter().all(|&n| n > 0) && s.windows(2).all(|w| w[0] >= w[1])
}

/// A serialized tower element: coefficients with their staircase.
struct Series {
    prime: u64,
    level: u64,
    coeffs: Poly,
    precs: Vec<u32>,
}

fn series(v: &Value, name: &str) -> Check<Series> {
    let s = field(v, name)?;
    let prime = uint(s, "prime")?;
    let level = uint(s, "level")?;
    let top = uint(s, "coeff_precision")? as u32;
    let order = uint(s, "order")? as usize;
    let raw = field(s, "coefficients")?.as_array().ok_or("coefficients must be an array")?;
    if raw.len() != order {
        return Err(format!("{name}: order {order} but {} coefficients", raw.len()));
    }
    let precs = match s.get("precisions") {
        None => vec![top; order],
        Some(_) => {
            let p = uint_list(s, "precisions")?;
            if p.windows(2).all(|w| w[0] == w[1]) {
                return Err(format!("{name}: a flat staircase must not be spelled out"));
            }
            p
        }
    };
    if precs.len() != order || precs.first().is_some_and(|&n| n != top) || !staircase_ok(&precs) {
        return Err(format!("{name}: malformed precision staircase"));
    }
    let mut coeffs = Vec::with_capacity(order);
    for (i, (c, &n)) in raw.iter().zip(&precs).enumerate() {
        let text = c.as_str().ok_or_else(|| format!("{name}: coefficient {i} is not a string"))?;
        let x = decimal(text)?;
        if x.is_negative() || x >= ppow(prime, n) {
            return Err(format!("{name}: coefficient {i} outside its canonical range"));
        }
        coeffs.push(x);
    }
    Ok(Series { prime, level, coeffs, precs })
}

/// Re-derive a catalogue divisor as a polynomial in `q`.
fn divisor_q(p: u64, v: &Value, depth: u32) -> Check<Poly> {
    if depth > 8 {
        return Err("divisor nesting too deep".into());
    }
    let kind = field(v, "kind")?.as_str().ok_or("divisor kind must be a string")?;
    match kind {
        "xi_tilde" => Ok(qint(p)),
        "phi_power_xi" => {
            let r = uint(v, "r")? as u32;
            Ok(substitute_power(&qint(p), p.pow(r)))
        }
        "xi_r" => {
            let r = uint(v, "r")? as u32;
            Ok(qint(p.pow(r)))
        }
        "power" => {
            let base = divisor_q(p, field(v, "base")?, depth + 1)?;
            let e = uint(v, "exp")?;
            Ok((0..e).fold(vec![BigInt::one()], |acc, _| poly_mul(&acc, &base)))
        }
        "product" => {
            let fs = field(v, "factors")?.as_array().ok_or("factors must be an array")?;
            fs.iter().try_fold(vec![BigInt::one()], |acc, f| Ok(poly_mul(&acc, &divisor_q(p, f, depth + 1)?)))
        }
        other => Err(format!("unknown divisor kind `{other}`")),
    }
}

/// `q = (1 + s)^{p^h}`: the divisor in the level variable.
fn at_level(p: u64, f: &[BigInt], h: u64) -> Poly {
    in_s(&substitute_power(f, p.pow(h as u32)))
}

// ---- the core test ----------------------------------------------------------

/// A linear contribution `L(x)` to the checked identity: `weights[k][j]`
/// is the coefficient of `x_j` in output `k`.
struct Term<'a> {
    name: &'static str,
    input: &'a Series,
    weights: Vec<Vec<(usize, BigInt)>>,
    sign: i32,
}

fn mul_weights(d: &[BigInt], m: usize) -> Vec<Vec<(usize, BigInt)>> {
    (0..m)
        .map(|k| (0..=k).filter_map(|j| d.get(k - j).filter(|c| !c.is_zero()).map(|c| (j, c.clone()))).collect())
        .collect()
}

fn frobenius_weights(p: u64, m: usize) -> Vec<Vec<(usize, BigInt)>> {
    // sigma = (1+s)^p - 1
    let sigma: Poly = (0..=p as usize)
        .map(|k| if k == 0 { BigInt::zero() } else { binom(p, k as u64) })
        .collect();
    let mut w: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); m];
    let mut power = vec![BigInt::one()];
    for j in 0..m {
        for (k, c) in power.iter().enumerate().take(m) {
            if !c.is_zero() {
                w[k].push((j, c.clone()));
            }
        }
        power = poly_mul_trunc(&power, &sigma, m);
    }
    w
}

fn binom(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Check `constant + sum sign * L(x) = 0` modulo `p^{check[k]}`, together
/// with the well-definedness and tightness conditions on every input.
fn check_identity(p: u64, check: &[u32], constant: Option<&[BigInt]>, terms: &[Term]) -> Check<()> {
    let m = check.len();
    if m == 0 || !staircase_ok(check) {
        return Err("check staircase must be nonempty, positive and non-increasing".into());
    }
    for t in terms {
        let n = &t.input.precs;
        let mut reach = vec![0u32; n.len()];
        for (k, row) in t.weights.iter().enumerate().take(m) {
            for (j, c) in row {
                let v = val(p, c).unwrap_or(u32::MAX);
                let nj = n.get(*j).copied().unwrap_or(0);
                if check[k] > nj.saturating_add(v) {
                    return Err(format!(
                        "{}: coefficient {j} (known to {nj} digits) does not determine checked coefficient {k}",
                        t.name
                    ));
                }
                if *j < reach.len() {
                    reach[*j] = reach[*j].max(check[k].saturating_sub(v));
                }
            }
        }
        if let Some(j) = (0..n.len()).find(|&j| n[j] > reach[j]) {
            return Err(format!("{}: coefficient {j} carries digits that no check reaches", t.name));
        }
    }
    for k in 0..m {
        let mut acc = constant.and_then(|c| c.get(k)).cloned().unwrap_or_default();
        for t in terms {
            for (j, c) in &t.weights[k] {
                if let Some(x) = t.input.coeffs.get(*j) {
                    let term = c * x;
                    if t.sign > 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
            }
        }
        if !acc.mod_floor(&ppow(p, check[k])).is_zero() {
            return Err(format!("identity fails at coefficient {k} modulo {p}^{}", check[k]));
        }
    }
    Ok(())
}

fn header(v: &Value) -> Check<(u64, u64)> {
    let p = uint(v, "prime")?;
    if !is_prime(p) {
        return Err(format!("{p} is not prime"));
    }
    let h = uint(v, "level")?;
    Ok((p, h))
}

fn same_ring(p: u64, h: u64, parts: &[&Series]) -> Check<()> {
    if parts.iter().any(|s| s.prime != p || s.level != h) {
        return Err("series do not live in the certificate's ring".into());
    }
    Ok(())
}

fn check_divisibility(v: &Value) -> Check<String> {
    let (p, h) = header(v)?;
    let d = at_level(p, &divisor_q(p, field(v, "divisor")?, 0)?, h);
    require_distinguished(p, &d)?;
    let f = series(v, "dividend")?;
    let g = series(v, "quotient")?;
    same_ring(p, h, &[&f, &g])?;
    let check = uint_list(v, "check_precisions")?;
    let m = check.len();
    let id: Vec<Vec<(usize, BigInt)>> = (0..m).map(|k| vec![(k, BigInt::one())]).collect();
    let terms = [
        Term { name: "dividend", input: &f, weights: id, sign: 1 },
        Term { name: "quotient", input: &g, weights: mul_weights(&d, m), sign: -1 },
    ];
    check_identity(p, &check, None, &terms)?;
    Ok(format!("divisor * quotient = dividend at precision ({}, {m})", check[0]))
}

fn require_distinguished(p: u64, d: &[BigInt]) -> Check<()> {
    let ok = d.len() >= 2
        && d.last().is_some_and(|c| c.is_one())
        && d[..d.len() - 1].iter().all(|c| (c % BigInt::from(p)).is_zero());
    if ok {
        Ok(())
    } else {
        Err("divisor is not a distinguished polynomial".into())
    }
}

fn check_nygaard(v: &Value) -> Check<String> {
    let (p, h) = header(v)?;
    let n = uint(v, "nygaard_level")?;
    let f = series(v, "element")?;
    let g = series(v, "quotient")?;
    same_ring(p, h, &[&f, &g])?;
    let check = uint_list(v, "check_precisions")?;
    let m = check.len();
    let xi = at_level(p, &qint(p), h);
    let d = (0..n).fold(vec![BigInt::one()], |acc, _| poly_mul(&acc, &xi));
    let terms = [
        Term { name: "element", input: &f, weights: frobenius_weights(p, m), sign: 1 },
        Term { name: "quotient", input: &g, weights: mul_weights(&d, m), sign: -1 },
    ];
    check_identity(p, &check, None, &terms)?;
    Ok(format!("phi(f) = xi~^{n} * g at precision ({}, {m})", check[0]))
}

fn check_factorization(v: &Value) -> Check<String> {
    let p = uint(v, "prime")?;
    if !is_prime(p) {
        return Err(format!("{p} is not prime"));
    }
    let n = uint(v, "n")?;
    if n == 0 {
        return Err("n must be positive".into());
    }
    let exps = uint_list(v, "exponents")?;
    let mut expected = Vec::new();
    let mut pr = p;
    while pr <= n {
        expected.push((n / pr) as u32);
        pr *= p;
    }
    if exps != expected {
        return Err(format!("exponents {exps:?} differ from floor(n/p^r) = {expected:?}"));
    }
    let u = series(v, "unit")?;
    same_ring(p, 0, &[&u])?;
    if u.coeffs.first().is_none_or(|c| (c % BigInt::from(p)).is_zero()) {
        return Err("unit has a constant term divisible by p".into());
    }
    // phi^{r-1}(xi~) = [p]_{q^{p^{r-1}}}
    let mut divisor = vec![BigInt::one()];
    for (r, &a) in exps.iter().enumerate() {
        let phi = substitute_power(&qint(p), p.pow(r as u32));
        for _ in 0..a {
            divisor = poly_mul(&divisor, &phi);
        }
    }
    let fact = (1..=n).fold(vec![BigInt::one()], |acc, k| poly_mul(&acc, &qint(k)));
    let check = uint_list(v, "check_precisions")?;
    let m = check.len();
    let terms = [Term { name: "unit", input: &u, weights: mul_weights(&in_s(&divisor), m), sign: -1 }];
    check_identity(p, &check, Some(&in_s(&fact)), &terms)?;
    Ok(format!("[{n}]_q! = u * prod phi^(r-1)(xi~)^(a_r) at precision ({}, {m})", check[0]))
}
