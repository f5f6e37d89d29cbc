use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use qprism::cert::recheck::recheck;
use qprism::cert::{distinguished_divide, Certificate, Division, DivisorSpec};
use qprism::padic::{padic_binomial, teichmuller};
use qprism::prism::{
    congruence_check, delta, delta_xi_at_1_expected, is_distinguished, nygaard_level, q_power_int,
    qdivided_power, qfact_exponents, qfact_factorize, xi_tilde,
};
use qprism::qcomb::check_identity;
use qprism::qcomb::q_binomial_poly;
use qprism::qlog::{
    qlog_formal, qlog_precision_loss, trace_map_model, verify_additivity, verify_characterization, TateExponent,
};
use qprism::series::{binomial_qpower, qtaylor_expand, qtaylor_reconstruct, BivarSeries, QSeries, Shape};
use qprism::upoly::UPoly;
use qprism::{PadicNum, Result, TowerSeries};

use crate::config::{RunConfig, Suite};
use crate::report::Entry;

type Outcome = Result<(bool, Value)>;
type Runner = Box<dyn Fn(&RunConfig, &mut ChaCha8Rng) -> Outcome + Send + Sync>;

pub struct Check {
    pub id: &'static str,
    pub anchor: &'static str,
    pub params: Value,
    run: Runner,
}

fn check(
    id: &'static str,
    anchor: &'static str,
    params: Value,
    run: impl Fn(&RunConfig, &mut ChaCha8Rng) -> Outcome + Send + Sync + 'static,
) -> Check {
    Check { id, anchor, params, run: Box::new(run) }
}

/// Each check draws from its own stream, so results do not depend on
/// scheduling.
fn rng_for(seed: u64, id: &str) -> ChaCha8Rng {
    let h = id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

pub fn run(cfg: &RunConfig) -> Vec<Entry> {
    let checks: Vec<Check> = cfg.suites.iter().flat_map(|s| suite(*s, cfg)).collect();
    checks
        .par_iter()
        .map(|c| {
            let mut rng = rng_for(cfg.seed, c.id);
            Entry::from_result(c.id, c.anchor, c.params.clone(), (c.run)(cfg, &mut rng))
        })
        .collect()
}

pub fn suite(s: Suite, cfg: &RunConfig) -> Vec<Check> {
    match s {
        Suite::Qcomb => qcomb(cfg),
        Suite::Padic => padic(cfg),
        Suite::Series => series(cfg),
        Suite::Prism => prism(cfg),
        Suite::Qlog => qlog(cfg),
    }
}

fn certificate_evidence(cert: Certificate) -> (bool, Value) {
    let v = recheck(&cert);
    if v.pass {
        (true, json!({ "kind": v.kind, "recheck": v.detail }))
    } else {
        (false, json!({ "kind": v.kind, "recheck": v.detail, "certificate": cert }))
    }
}

fn identity_family(name: &str, cases: &[Vec<i64>]) -> Outcome {
    for c in cases {
        let r = check_identity(name, c)?;
        if !r.pass {
            return Ok((false, json!({ "counterexample": r })));
        }
    }
    Ok((true, json!({ "cases": cases.len(), "exact": true })))
}

fn qcomb(cfg: &RunConfig) -> Vec<Check> {
    let p = cfg.prime as i64;
    let family = |id, anchor, name: &'static str, cases: Vec<Vec<i64>>, params| {
        check(id, anchor, params, move |_, _| identity_family(name, &cases))
    };
    let grid = |lo: i64, hi: i64| -> Vec<Vec<i64>> {
        (lo..=hi).flat_map(|n| (lo..=hi).map(move |k| vec![n, k])).collect()
    };
    vec![
        family(
            "qcomb.addition",
            "[n+k]_q = q^k [n]_q + [k]_q",
            "addition",
            grid(-12, 12),
            json!({ "range": [-12, 12] }),
        ),
        family(
            "qcomb.negation",
            "[-n]_q = -q^{-n} [n]_q",
            "negation",
            (-12..=12).map(|n| vec![n]).collect(),
            json!({ "range": [-12, 12] }),
        ),
        family(
            "qcomb.pascal",
            "binom(n,k)_q = q^k binom(n-1,k)_q + binom(n-1,k-1)_q",
            "pascal",
            (1..=16).flat_map(|n| (1..=n).map(move |k| vec![n, k])).collect(),
            json!({ "max_n": 16 }),
        ),
        family(
            "qcomb.binomial_theorem",
            "(x+y)_q^n = sum_k q^{k(k-1)/2} binom(n,k)_q x^{n-k} y^k",
            "binomial-theorem",
            (0..=12).map(|n| vec![n]).collect(),
            json!({ "max_n": 12 }),
        ),
        family(
            "qcomb.pochhammer_derivative",
            "D_q (x+y)_q^n = [n]_q (x+y)_q^{n-1}",
            "pochhammer-derivative",
            (1..=12).map(|n| vec![n]).collect(),
            json!({ "max_n": 12 }),
        ),
        check("qcomb.leibniz", "D_q(fg) = D_q(f) g + f(qx) D_q(g)", json!({ "samples": 8 }), |_, rng| {
            let cases: Vec<Vec<i64>> = (0..8).map(|_| vec![rng.gen_range(0..1i64 << 40)]).collect();
            identity_family("leibniz", &cases)
        }),
        family(
            "qcomb.cyclotomic_congruence",
            "x^{p^r} - y^{p^r} = prod_{i<p^r} (x - zeta^i y) mod Phi_{p^r}(q)",
            "cyclotomic-congruence",
            (1..=2).map(|r| vec![p, r]).collect(),
            json!({ "prime": p, "r": [1, 2] }),
        ),
    ]
}

fn random_padic(p: u64, prec: u32, rng: &mut ChaCha8Rng) -> PadicNum {
    let mut v = BigInt::from(0);
    let mut scale = BigInt::from(1);
    for _ in 0..prec {
        v += &scale * rng.gen_range(0..p);
        scale *= p;
    }
    PadicNum::new(p, prec, v)
}

fn random_unit(p: u64, prec: u32, rng: &mut ChaCha8Rng) -> PadicNum {
    let x = random_padic(p, prec, rng);
    if x.is_unit() {
        x
    } else {
        x.add(&PadicNum::one(p, prec)).expect("same prime and precision")
    }
}

fn padic(cfg: &RunConfig) -> Vec<Check> {
    let (p, n) = (cfg.prime, cfg.precision);
    let params = json!({ "prime": p, "precision": n });
    vec![
        check("padic.inverse", "x x^{-1} = 1 in Z/p^N for units x", params.clone(), move |_, rng| {
            let one = PadicNum::one(p, n);
            for _ in 0..16 {
                let x = random_unit(p, n, rng);
                if x.mul(&x.inv()?)? != one {
                    return Ok((false, json!({ "counterexample": x })));
                }
            }
            Ok((true, json!({ "samples": 16 })))
        }),
        check("padic.teichmuller", "omega(a)^p = omega(a), omega(a) = a mod p", params.clone(), move |_, _| {
            for a in 1..p {
                let w = teichmuller(p, a, n);
                if w.pow(p) != w || w.truncate(1) != PadicNum::new(p, 1, a) {
                    return Ok((false, json!({ "residue": a, "omega": w })));
                }
            }
            Ok((true, json!({ "residues": p - 1 })))
        }),
        check(
            "padic.binomial",
            "k! binom(a,k) = a(a-1)...(a-k+1) to N - v_p(k!) digits",
            json!({ "prime": p, "precision": n, "max_k": 2 * p }),
            move |_, rng| {
                for _ in 0..8 {
                    let a = random_padic(p, n, rng);
                    let mut falling = PadicNum::one(p, n);
                    let mut fact = BigInt::from(1);
                    for k in 0..=2 * p {
                        if k > 0 {
                            falling = falling.mul(&a.sub(&PadicNum::new(p, n, k - 1))?)?;
                            fact *= k;
                        }
                        let b = padic_binomial(&a, k)?;
                        let lhs = b.mul(&PadicNum::new(p, b.precision(), fact.clone()))?;
                        if lhs != falling.truncate(b.precision()) {
                            return Ok((false, json!({ "a": a, "k": k, "binomial": b })));
                        }
                    }
                }
                Ok((true, json!({ "samples": 8 })))
            },
        ),
    ]
}

fn random_series(cfg: &RunConfig, level: u32, prec: u32, rng: &mut ChaCha8Rng) -> TowerSeries {
    TowerSeries::random(cfg.prime, level, prec, cfg.order, rng)
}

fn series(cfg: &RunConfig) -> Vec<Check> {
    let params = json!({ "prime": cfg.prime, "precision": cfg.precision, "order": cfg.order, "level": cfg.level });
    let shape = json!({ "order_q": cfg.bivar_q, "order_x": cfg.bivar_x });
    vec![
        check("series.inverse", "f f^{-1} = 1 in A_h when f(1) is a unit", params.clone(), |cfg, rng| {
            let (p, h, n, m) = (cfg.prime, cfg.level, cfg.precision, cfg.order);
            let one = TowerSeries::one(p, h, n, m);
            for _ in 0..4 {
                let mut f = random_series(cfg, h, n, rng);
                if !f.evaluate_q1().is_unit() {
                    f = f.add(&one)?;
                }
                if !f.mul(&f.inv()?)?.congruent(&one)? {
                    return Ok((false, json!({ "counterexample": f })));
                }
            }
            Ok((true, json!({ "samples": 4 })))
        }),
        check(
            "series.frobenius",
            "phi(f+g) = phi(f)+phi(g), phi(fg) = phi(f)phi(g), phi(q) = q^p",
            params.clone(),
            |cfg, rng| {
                let h = cfg.level;
                let q = TowerSeries::q(cfg.prime, cfg.precision, cfg.order);
                if !q.frobenius().congruent(&q.pow(cfg.prime))? {
                    return Ok((false, json!({ "failed": "phi(q) = q^p" })));
                }
                for _ in 0..4 {
                    let f = random_series(cfg, h, cfg.precision, rng);
                    let g = random_series(cfg, h, cfg.precision, rng);
                    let sum = f.add(&g)?.frobenius().congruent(&f.frobenius().add(&g.frobenius())?)?;
                    let prod = f.mul(&g)?.frobenius().congruent(&f.frobenius().mul(&g.frobenius())?)?;
                    if !(sum && prod) {
                        return Ok((false, json!({ "f": f, "g": g, "additive": sum, "multiplicative": prod })));
                    }
                }
                Ok((true, json!({ "samples": 4 })))
            },
        ),
        check("series.phi_inverse", "phi(phi^{-1}(f)) = f in A_{h+1}", params.clone(), |cfg, rng| {
            for _ in 0..4 {
                let f = random_series(cfg, cfg.level, cfg.precision, rng);
                if !f.phi_inverse().frobenius().congruent(&f.embed(cfg.level + 1)?)? {
                    return Ok((false, json!({ "counterexample": f })));
                }
            }
            Ok((true, json!({ "samples": 4 })))
        }),
        check(
            "series.distinguished_division",
            "g xi~ / xi~ = g with a divisibility certificate",
            params.clone(),
            |cfg, rng| {
                let (p, h, n, m) = (cfg.prime, cfg.level, cfg.precision, cfg.order);
                let g = random_series(cfg, h, n, rng);
                let f = g.mul(&xi_tilde(p, h, n, m))?;
                match distinguished_divide(&f, &DivisorSpec::XiTilde)? {
                    Division::Divisible { quotient, certificate } => {
                        let same = quotient.congruent(&g)?;
                        let (ok, mut ev) = certificate_evidence(Certificate::Divisibility(certificate));
                        ev["quotient_matches"] = same.into();
                        Ok((ok && same, ev))
                    }
                    Division::NotDivisible { .. } => Ok((false, json!({ "dividend": f, "divisible": false }))),
                }
            },
        ),
        check("series.qtaylor_round_trip", "f = sum_n a_n (x-1)(x-q)...(x-q^{n-1})", shape, |cfg, rng| {
            let s = Shape::new(cfg.bivar_q, cfg.bivar_x);
            for _ in 0..3 {
                let f = BivarSeries::random(s, rng);
                let coeffs = qtaylor_expand(&f, cfg.bivar_x)?;
                if qtaylor_reconstruct(&coeffs, s) != f {
                    return Ok((false, json!({ "counterexample": f })));
                }
            }
            Ok((true, json!({ "samples": 3 })))
        }),
    ]
}

/// `p x` with one more digit of precision than `x`.
fn times_p(x: &TowerSeries) -> TowerSeries {
    let p = BigInt::from(x.prime());
    let coeffs = x.coeffs().iter().map(|c| c * &p).collect();
    let precs = x.precisions().iter().map(|n| n + 1).collect();
    TowerSeries::from_parts(x.prime(), x.level(), coeffs, precs)
}

fn closed_form(p: u64, n: u32, m: usize, mm: usize, k: usize) -> Result<TowerSeries> {
    if k > mm {
        return Ok(TowerSeries::zero(p, 0, n, m));
    }
    let binom = q_binomial_poly(mm, k)?;
    let poly = binom.mul(&UPoly::from_i64(&[-1, 1]).pow(k as u64)).mul(&UPoly::monomial(BigInt::from(1), k * (k - 1) / 2));
    Ok(TowerSeries::from_q_poly(p, 0, n, m, &poly))
}

fn prism(cfg: &RunConfig) -> Vec<Check> {
    let p = cfg.prime;
    let params = json!({ "prime": p, "precision": cfg.precision, "order": cfg.order, "level": cfg.level });
    vec![
        check(
            "prism.delta_rules",
            "delta(x+y) = delta(x)+delta(y) - sum_k binom(p,k)/p x^k y^{p-k}; delta(xy) = x^p delta(y) + y^p delta(x) + p delta(x) delta(y)",
            params.clone(),
            |cfg, rng| {
                let p = cfg.prime;
                for _ in 0..6 {
                    let x = random_series(cfg, cfg.level, cfg.precision + 1, rng);
                    let y = random_series(cfg, cfg.level, cfg.precision + 1, rng);
                    let (dx, dy) = (delta(&x)?, delta(&y)?);
                    let mut add_rhs = dx.add(&dy)?;
                    let mut c = BigInt::from(1);
                    for k in 1..p {
                        c = c * (p - k + 1) / k;
                        add_rhs = add_rhs.sub(&x.pow(k).mul(&y.pow(p - k))?.scale_int(&(&c / p)))?;
                    }
                    let add = delta(&x.add(&y)?)?.congruent(&add_rhs)?;
                    let mul_rhs = x.pow(p).mul(&dy)?.add(&y.pow(p).mul(&dx)?)?.add(&times_p(&dx.mul(&dy)?))?;
                    let mul = delta(&x.mul(&y)?)?.congruent(&mul_rhs)?;
                    if !(add && mul) {
                        return Ok((false, json!({ "x": x, "y": y, "additive": add, "multiplicative": mul })));
                    }
                }
                Ok((true, json!({ "samples": 6 })))
            },
        ),
        check(
            "prism.delta_xi",
            "delta(xi~)(1) = 1 - p^{p-1}, a unit, so xi~ is distinguished",
            params.clone(),
            |cfg, _| {
                let xi = xi_tilde(cfg.prime, 0, cfg.precision + 1, cfg.order);
                let value = delta(&xi)?.evaluate_q1();
                let expected = delta_xi_at_1_expected(cfg.prime, cfg.precision);
                let report = is_distinguished(&xi)?;
                let pass = value == expected && report.distinguished;
                Ok((pass, json!({ "value": value, "expected": expected, "report": report })))
            },
        ),
        check(
            "prism.qfact_factorization",
            "[n]_q! = u prod_r phi^{r-1}(xi~)^{floor(n/p^r)}, u(1) a unit",
            json!({ "prime": p, "precision": cfg.precision, "order": cfg.order, "max_n": p * p }),
            |cfg, _| {
                let p = cfg.prime;
                for n in 1..=(p * p) as u32 {
                    let c = qfact_factorize(p, n, cfg.precision, cfg.order)?;
                    let exps_ok = c.exponents == qfact_exponents(p, n);
                    let unit_ok = c.unit.evaluate_q1().is_unit();
                    let (ok, mut ev) = certificate_evidence(Certificate::Factorization(c));
                    if !(ok && exps_ok && unit_ok) {
                        ev["n"] = n.into();
                        ev["exponents_match"] = exps_ok.into();
                        ev["unit_test"] = unit_ok.into();
                        return Ok((false, ev));
                    }
                }
                Ok((true, json!({ "certificates": p * p })))
            },
        ),
        check(
            "prism.qdivided_closed_form",
            "gamma_n(q^m - 1) = q^{n(n-1)/2} (q-1)^n binom(m,n)_q",
            json!({ "prime": p, "precision": cfg.precision, "order": cfg.order, "max_n": 4, "max_m": 6 }),
            |cfg, _| {
                let (p, nn, m) = (cfg.prime, cfg.precision, cfg.order);
                for k in 1..=4u32 {
                    for mm in 0..=6u32 {
                        let g = qdivided_power(&q_power_int(p, mm, nn, m), k)?;
                        if !g.gamma.congruent(&closed_form(p, nn, m, mm as usize, k as usize)?)? {
                            return Ok((false, json!({ "n": k, "m": mm, "gamma": g.gamma })));
                        }
                    }
                }
                Ok((true, json!({ "cases": 28 })))
            },
        ),
        check(
            "prism.qdivided_certificates",
            "gamma_n(x - 1) lies in the n-th Nygaard step for rank-1 x = q^a",
            json!({ "prime": p, "precision": cfg.precision, "order": cfg.order, "samples": 3, "max_n": 4 }),
            |cfg, rng| {
                let (p, nn, m) = (cfg.prime, cfg.precision, cfg.order);
                let prec = nn + qprism::padic::vp_factorial(p, m as u64 - 1);
                for _ in 0..3 {
                    let a = random_padic(p, prec, rng);
                    let x = binomial_qpower(&a, m, nn)?;
                    for k in 1..=4u32 {
                        let g = qdivided_power(&x, k)?;
                        let level = g.certificate.nygaard_level;
                        let (ok, mut ev) = certificate_evidence(Certificate::Nygaard(g.certificate));
                        if !ok || level < k {
                            ev["a"] = json!(a);
                            ev["n"] = k.into();
                            return Ok((false, ev));
                        }
                        for s in g.steps {
                            let (ok, ev) = certificate_evidence(Certificate::Divisibility(s));
                            if !ok {
                                return Ok((false, ev));
                            }
                        }
                    }
                }
                Ok((true, json!({ "certificates": 12 })))
            },
        ),
        check(
            "prism.congruence",
            "phi^r(xi~) = p u mod xi~ with u = 1",
            json!({ "prime": p, "r": [1, 2, 3] }),
            |cfg, _| {
                for r in 1..=3 {
                    let rep = congruence_check(cfg.prime, r)?;
                    if !(rep.congruence && rep.unit_check) {
                        return Ok((false, json!(rep)));
                    }
                }
                Ok((true, json!({ "r": [1, 2, 3] })))
            },
        ),
        check("prism.nygaard_mu", "phi(q-1) = xi~ (q-1), so q-1 has Nygaard level 1", params, |cfg, _| {
            let mu = TowerSeries::mu(cfg.prime, cfg.precision, cfg.order).embed(cfg.level)?;
            let c = nygaard_level(&mu, 2)?;
            let level = c.nygaard_level;
            let (ok, mut ev) = certificate_evidence(Certificate::Nygaard(c));
            ev["level"] = level.into();
            Ok((ok && level == 1, ev))
        }),
    ]
}

fn log_coefficient(n: usize, order: usize) -> QSeries {
    let e = (n * (n - 1) / 2) as i64;
    let f = QSeries::q_pow(-e, order).mul(&QSeries::q_factorial(n as u64 - 1, order));
    if n.is_multiple_of(2) {
        f.neg()
    } else {
        f
    }
}

fn qlog(cfg: &RunConfig) -> Vec<Check> {
    let p = cfg.prime;
    let shape = json!({ "order_q": cfg.bivar_q, "order_x": cfg.bivar_x });
    let params = json!({ "prime": p, "precision": cfg.precision, "order": cfg.order });
    vec![
        check(
            "qlog.characterization",
            "nabla_q log_q = 1/x, log_q(1) = 0, log(q) log_q(x) = (q-1) log(x)",
            shape.clone(),
            |cfg, _| {
                let rep = verify_characterization(cfg.bivar_q, cfg.bivar_x)?;
                Ok((rep.pass(), json!(rep)))
            },
        ),
        check(
            "qlog.taylor_coefficients",
            "log_q(x) = sum_n (-1)^{n-1} q^{-n(n-1)/2} [n-1]_q! (x-1)(x-q)...(x-q^{n-1}) / [n]_q!",
            shape,
            |cfg, _| {
                let f = qlog_formal(cfg.bivar_q, cfg.bivar_x)?;
                let coeffs = qtaylor_expand(&f, cfg.bivar_x)?;
                for (n, a) in coeffs.iter().enumerate().skip(1) {
                    if *a != log_coefficient(n, a.order()) {
                        return Ok((false, json!({ "n": n })));
                    }
                }
                Ok((true, json!({ "coefficients": coeffs.len().saturating_sub(1) })))
            },
        ),
        check(
            "qlog.trace_model",
            "log_q(q^a) = a (q-1), log_q(q^a) = q^a - 1 mod N^{>=2}, phi(y) = xi~ y",
            json!({ "prime": p, "precision": cfg.precision, "order": cfg.order, "samples": 4 }),
            |cfg, rng| {
                let (p, n, m) = (cfg.prime, cfg.precision, cfg.order);
                let prec = TateExponent::required_precision(p, n, m);
                let mut exps = vec![TateExponent::integer(p, 1, n, m)];
                exps.extend((0..3).map(|_| TateExponent::new(random_padic(p, prec, rng))));
                for a in &exps {
                    let rep = trace_map_model(a, n, m)?;
                    let pass = rep.pass() && rep.qlog.level_two.nygaard_level >= 2;
                    if !pass {
                        return Ok((false, json!(rep)));
                    }
                    for c in [rep.qlog.level_one, rep.qlog.level_two] {
                        let (ok, ev) = certificate_evidence(Certificate::Nygaard(c));
                        if !ok {
                            return Ok((false, ev));
                        }
                    }
                }
                Ok((true, json!({ "exponents": exps.len() })))
            },
        ),
        check("qlog.additivity", "log_q(xy) = log_q(x) + log_q(y) for x = q^a, y = q^b", params, |cfg, rng| {
            let (p, n, m) = (cfg.prime, cfg.precision, cfg.order);
            let working = n + qlog_precision_loss(p, m);
            let prec = TateExponent::required_precision(p, n, m);
            for _ in 0..2 {
                let x = binomial_qpower(&random_padic(p, prec, rng), m, working)?;
                let y = binomial_qpower(&random_padic(p, prec, rng), m, working)?;
                let rep = verify_additivity(&x, &y)?;
                if !rep.pass {
                    return Ok((false, json!(rep)));
                }
            }
            Ok((true, json!({ "pairs": 2 })))
        }),
    ]
}
