//! q-integers, q-factorials, q-binomials, q-Pochhammer symbols and the
//! Jackson q-derivative, together with a small catalogue of identity checks.

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{LaurentPoly, Var};
use crate::upoly::{cyclotomic_prime_power, q_int_poly, UPoly};

/// `[n]_q` for any integer `n`; `[-n]_q = -q^{-n} [n]_q`.
pub fn q_int(n: i64) -> LaurentPoly {
    let pos = LaurentPoly::from_q_poly(&q_int_poly(n.unsigned_abs() as usize));
    if n >= 0 {
        pos
    } else {
        -pos.shift([n, 0, 0])
    }
}

pub fn q_factorial_poly(n: usize) -> UPoly {
    (1..=n).fold(UPoly::one(), |acc, k| acc.mul(&q_int_poly(k)))
}

pub fn q_factorial(n: u32) -> LaurentPoly {
    LaurentPoly::from_q_poly(&q_factorial_poly(n as usize))
}

/// Rows `0..=n` of the q-Pascal triangle, each row holding `k = 0..=row`.
pub fn q_pascal_rows(n: usize) -> Vec<Vec<UPoly>> {
    let mut rows: Vec<Vec<UPoly>> = vec![vec![UPoly::one()]];
    for m in 1..=n {
        let prev = &rows[m - 1];
        let mut row = Vec::with_capacity(m + 1);
        row.push(UPoly::one());
        for k in 1..m {
            let shifted = prev[k].mul(&UPoly::monomial(BigInt::one(), k));
            row.push(shifted.add(&prev[k - 1]));
        }
        row.push(UPoly::one());
        rows.push(row);
    }
    rows
}

pub fn q_binomial_poly(n: usize, k: usize) -> Result<UPoly> {
    if k > n {
        return Err(Error::InvalidArgument(format!("q-binomial needs k <= n, got n={n}, k={k}")));
    }
    // only the needed band of the triangle is kept
    let mut row = vec![UPoly::one()];
    for m in 1..=n {
        let hi = m.min(k);
        let lo = k.saturating_sub(n - m);
        let mut next = Vec::with_capacity(hi + 1);
        for j in 0..=hi {
            if j < lo || j == 0 || j == m {
                next.push(if j == 0 || j == m { UPoly::one() } else { UPoly::zero() });
                continue;
            }
            let carry = row[j].mul(&UPoly::monomial(BigInt::one(), j));
            next.push(carry.add(&row[j - 1]));
        }
        row = next;
    }
    Ok(row.swap_remove(k))
}

pub fn q_binomial(n: i64, k: i64) -> Result<LaurentPoly> {
    if n < 0 || k < 0 {
        return Err(Error::InvalidArgument(format!(
            "q-binomial needs nonnegative arguments, got n={n}, k={k}"
        )));
    }
    if k > n {
        return Ok(LaurentPoly::zero());
    }
    Ok(LaurentPoly::from_q_poly(&q_binomial_poly(n as usize, k as usize)?))
}

/// `(x, y; q)_n = (x + y)(x + qy)...(x + q^{n-1} y)`.
pub fn q_pochhammer(n: u32) -> LaurentPoly {
    let x = LaurentPoly::var(Var::X);
    (0..n as i64).fold(LaurentPoly::one(), |acc, i| {
        &acc * &(&x + &LaurentPoly::monomial(1, [i, 0, 1]))
    })
}

/// `(f(qx) - f(x)) / ((q - 1) x)`, with `y` treated as a coefficient.
pub fn q_derivative(f: &LaurentPoly) -> LaurentPoly {
    let num = &f.scale_var_by_q_power(Var::X, 1) - f;
    num.div_exact_by_q_poly(&UPoly::from_i64(&[-1, 1]))
        .expect("f(qx) - f(x) is divisible by q - 1")
        .shift([0, -1, 0])
}

/// Random Laurent polynomial in `x` over `Z[q^{+-1}]` with bounded degrees.
pub fn random_laurent_in_x(rng: &mut impl Rng, max_deg: i64) -> LaurentPoly {
    let mut f = LaurentPoly::zero();
    for _ in 0..rng.gen_range(1..=6) {
        let c: i64 = rng.gen_range(-9..=9);
        let eq = rng.gen_range(-max_deg..=max_deg);
        let ex = rng.gen_range(-max_deg..=max_deg);
        f = &f + &LaurentPoly::monomial(c, [eq, ex, 0]);
    }
    f
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub params: Vec<i64>,
    pub pass: bool,
    /// `lhs - rhs`; zero exactly when the identity holds.
    #[serde(serialize_with = "ser_display")]
    pub difference: LaurentPoly,
}

fn ser_display<S: serde::Serializer>(p: &LaurentPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

fn report(name: &str, params: &[i64], lhs: LaurentPoly, rhs: LaurentPoly) -> IdentityReport {
    let difference = &lhs - &rhs;
    IdentityReport { name: name.into(), params: params.to_vec(), pass: difference.is_zero(), difference }
}

fn param(params: &[i64], i: usize, name: &str) -> Result<i64> {
    params
        .get(i)
        .copied()
        .ok_or_else(|| Error::InvalidArgument(format!("{name}: missing parameter {}", i + 1)))
}

fn nonneg(v: i64, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::InvalidArgument(format!("{what} must be nonnegative, got {v}")))
}

pub const IDENTITIES: [&str; 7] = [
    "addition",
    "negation",
    "pascal",
    "binomial-theorem",
    "pochhammer-derivative",
    "leibniz",
    "cyclotomic-congruence",
];

pub fn check_identity(name: &str, params: &[i64]) -> Result<IdentityReport> {
    match name {
        "addition" => {
            let (n, k) = (param(params, 0, name)?, param(params, 1, name)?);
            let rhs = &q_int(n).shift([k, 0, 0]) + &q_int(k);
            Ok(report(name, params, q_int(n + k), rhs))
        }
        "negation" => {
            let n = param(params, 0, name)?;
            Ok(report(name, params, q_int(-n), -q_int(n).shift([-n, 0, 0])))
        }
        "pascal" => {
            let (n, k) = (param(params, 0, name)?, param(params, 1, name)?);
            if !(1 <= k && k <= n) {
                return Err(Error::InvalidArgument(format!("pascal needs 1 <= k <= n, got {n}, {k}")));
            }
            let rhs = &q_binomial(n - 1, k)?.shift([k, 0, 0]) + &q_binomial(n - 1, k - 1)?;
            Ok(report(name, params, q_binomial(n, k)?, rhs))
        }
        "binomial-theorem" => {
            let n = nonneg(param(params, 0, name)?, "n")? as i64;
            let mut rhs = LaurentPoly::zero();
            for k in 0..=n {
                let term = q_binomial(n, k)?.shift([k * (k - 1) / 2, n - k, k]);
                rhs = &rhs + &term;
            }
            Ok(report(name, params, q_pochhammer(n as u32), rhs))
        }
        "pochhammer-derivative" => {
            let n = nonneg(param(params, 0, name)?, "n")?;
            if n == 0 {
                return Err(Error::InvalidArgument("pochhammer-derivative needs n >= 1".into()));
            }
            let rhs = &q_int(n as i64) * &q_pochhammer(n - 1);
            Ok(report(name, params, q_derivative(&q_pochhammer(n)), rhs))
        }
        "leibniz" => {
            let seed = param(params, 0, name)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
            let f = random_laurent_in_x(&mut rng, 10);
            let g = random_laurent_in_x(&mut rng, 10);
            let lhs = q_derivative(&(&f * &g));
            let rhs = &(&q_derivative(&f) * &g.scale_var_by_q_power(Var::X, 1)) + &(&f * &q_derivative(&g));
            Ok(report(name, params, lhs, rhs))
        }
        "cyclotomic-congruence" => {
            let p = nonneg(param(params, 0, name)?, "p")? as u64;
            let r = nonneg(param(params, 1, name)?, "r")?;
            if r == 0 || p < 2 {
                return Err(Error::InvalidArgument("cyclotomic-congruence needs p >= 2, r >= 1".into()));
            }
            let pr = p.pow(r) as usize;
            let phi = cyclotomic_prime_power(p, r);
            let reduce = |f: UPoly| f.div_rem_monic(&phi).1;
            // prod_{i<p^r} (x - q^i y), stored by y-degree and reduced after
            // every factor so the q-degrees stay below deg Phi_{p^r}
            let mut prod = vec![UPoly::one()];
            for i in 0..pr {
                let qi = reduce(UPoly::monomial(BigInt::one(), i));
                let mut next = prod.clone();
                next.push(UPoly::zero());
                for (k, c) in prod.iter().enumerate() {
                    next[k + 1] = reduce(next[k + 1].sub(&c.mul(&qi)));
                }
                prod = next;
            }
            let mut diff = LaurentPoly::zero();
            for (k, c) in prod.iter().enumerate() {
                let target = if k == 0 {
                    UPoly::one()
                } else if k == pr {
                    UPoly::from_i64(&[-1])
                } else {
                    UPoly::zero()
                };
                let d = reduce(target.sub(c));
                for (e, a) in d.coeffs().iter().enumerate() {
                    diff = &diff + &LaurentPoly::monomial(a.clone(), [e as i64, (pr - k) as i64, k as i64]);
                }
            }
            Ok(IdentityReport {
                name: name.into(),
                params: params.to_vec(),
                pass: diff.is_zero(),
                difference: diff,
            })
        }
        other => Err(Error::UnknownIdentity(other.into())),
    }
}
