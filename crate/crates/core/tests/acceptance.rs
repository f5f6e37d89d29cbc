//! Acceptance run: one line per criterion, with the time limit it is held to.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;
use qprism::cert::recheck::recheck_json;
use qprism::cert::Certificate;
use qprism::padic::{vp_factorial, PadicNum};
use qprism::prism::{
    congruence_check, delta, phi_power_xi, q_power_int, qdivided_power, qfact_factorize, xi_tilde,
};
use qprism::qcomb::{check_identity, q_binomial_poly};
use qprism::qlog::{
    qlog_formal, qlog_precision_loss, trace_map_model, verify_additivity, verify_characterization, TateExponent,
};
use qprism::series::{binomial_qpower, qtaylor_expand, qtaylor_reconstruct, BivarSeries, Shape, TowerSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn run(id: u32, name: &str, limit: u64, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = took <= Duration::from_secs(limit);
    let (pass, detail) = match out {
        Ok(d) if in_time => (true, d),
        Ok(d) => (false, format!("{d}; over the time limit")),
        Err(e) => (false, e),
    };
    println!(
        "criterion {id} [{}] {name}: {detail} ({:.2} s, limit {limit} s)",
        if pass { "PASS" } else { "FAIL" },
        took.as_secs_f64()
    );
    pass
}

fn exact_identities() -> Outcome {
    let mut count = 0;
    for n in 1..=30i64 {
        for k in 1..=n {
            let r = check_identity("pascal", &[n, k]).map_err(|e| e.to_string())?;
            ensure(r.pass, || format!("pascal n={n} k={k}: {}", r.difference))?;
            count += 1;
        }
    }
    // the q-binomials themselves against an independent count of partitions
    for n in 0..=30usize {
        for k in 0..=n {
            let got = q_binomial_poly(n, k).map_err(|e| e.to_string())?;
            let want: Vec<BigInt> = common::box_partitions(n, k).into_iter().map(BigInt::from).collect();
            ensure(got.coeffs() == want.as_slice(), || format!("binom({n},{k})_q disagrees with the oracle"))?;
        }
    }
    for n in 0..=20i64 {
        let r = check_identity("binomial-theorem", &[n]).map_err(|e| e.to_string())?;
        ensure(r.pass, || format!("binomial theorem n={n}"))?;
        count += 1;
    }
    for n in 1..=20i64 {
        let r = check_identity("pochhammer-derivative", &[n]).map_err(|e| e.to_string())?;
        ensure(r.pass, || format!("Pochhammer derivative n={n}"))?;
        count += 1;
    }
    for n in -20..=20i64 {
        let r = check_identity("negation", &[n]).map_err(|e| e.to_string())?;
        ensure(r.pass, || format!("negation n={n}"))?;
        for k in -20..=20i64 {
            let r = check_identity("addition", &[n, k]).map_err(|e| e.to_string())?;
            ensure(r.pass, || format!("addition n={n} k={k}"))?;
            count += 1;
        }
        count += 1;
    }
    Ok(format!("{count} identities hold exactly"))
}

fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut acc = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn is_prime(n: u128) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// A prime `l = 1 mod p^r` and an element of exact order `p^r` mod `l`.
fn root_of_unity(p: u128, r: u32) -> (u128, u128) {
    let pr = p.pow(r);
    let l = (1..).map(|k| k * pr + 1).find(|&l| is_prime(l)).unwrap();
    for g in 2..l {
        let z = pow_mod(g, (l - 1) / pr, l);
        if pow_mod(z, pr / p, l) != 1 {
            return (l, z);
        }
    }
    unreachable!()
}

fn cyclotomic_congruences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in [2u64, 3, 5] {
        for r in 1..=3u32 {
            let rep = congruence_check(p, r).map_err(|e| e.to_string())?;
            ensure(rep.congruence, || format!("product congruence p={p} r={r}"))?;
            ensure(rep.unit_check, || format!("phi^{r}(xi~) mod xi~ = {:?} for p={p}", rep.phi_r_mod_xi))?;
            let mut want = vec!["1".to_string()];
            want.resize(p as usize - 1, "0".to_string());
            ensure(rep.unit == want, || format!("u = {:?} for p={p} r={r}", rep.unit))?;
            // the same product identity at a primitive p^r-th root of unity mod l
            let (l, z) = root_of_unity(p as u128, r);
            let pr = (p as u128).pow(r);
            for _ in 0..8 {
                let (x, y) = (rng.gen_range(0..l), rng.gen_range(0..l));
                let lhs = (pow_mod(x, pr, l) + l - pow_mod(y, pr, l)) % l;
                let rhs = (0..pr).fold(1u128, |acc, i| acc * ((x + l - pow_mod(z, i, l) * y % l) % l) % l);
                ensure(lhs == rhs, || format!("numeric check p={p} r={r} fails mod {l}"))?;
            }
        }
    }
    Ok("p in {2,3,5}, r in {1,2,3}: both congruences hold, u = 1".into())
}

fn factorizations(certs: &mut Vec<String>) -> Outcome {
    let mut count = 0;
    for p in [2u64, 3] {
        for n in 1..=p.pow(3) as u32 {
            let c = qfact_factorize(p, n, 32, 128).map_err(|e| e.to_string())?;
            ensure(c.unit.evaluate_q1().is_unit(), || format!("u(1) not a unit for p={p} n={n}"))?;
            ensure(c.achieved() == (32, 128), || format!("p={p} n={n} achieves only {:?}", c.achieved()))?;
            let mut prod = c.unit.clone();
            for (r, &a) in c.exponents.iter().enumerate() {
                for _ in 0..a {
                    prod = prod.mul(&phi_power_xi(p, r as u32, 0, 32, 128)).map_err(|e| e.to_string())?;
                }
            }
            let want = TowerSeries::from_q_poly(p, 0, 32, 128, &common::q_factorial_oracle(n as usize));
            ensure(prod.congruent(&want).unwrap(), || format!("u * divisor != [{n}]_q! for p={p}"))?;
            let text = Certificate::Factorization(c).to_json();
            let v = recheck_json(&text);
            ensure(v.pass, || format!("p={p} n={n}: {}", v.detail))?;
            certs.push(text);
            count += 1;
        }
    }
    Ok(format!("{count} factorizations re-verify at (N, M) = (32, 128)"))
}

fn seeded_exponent(p: u64, prec: u32, seed: u64) -> PadicNum {
    common::random_exponent(p, prec, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn divided_powers(certs: &mut Vec<String>) -> Outcome {
    let (nn, m) = (32u32, 64usize);
    let mut count = 0;
    for p in [2u64, 3] {
        for n in 1..=6u32 {
            for mm in 0..=10u32 {
                let g = qdivided_power(&q_power_int(p, mm, nn, m), n).map_err(|e| e.to_string())?;
                let want = TowerSeries::from_q_poly(p, 0, nn, m, &common::closed_form_oracle(mm as usize, n as usize));
                ensure(g.gamma.congruent(&want).unwrap(), || format!("closed form p={p} n={n} m={mm}"))?;
            }
        }
        let prec = nn + vp_factorial(p, m as u64 - 1);
        for seed in 0..20 {
            let a = seeded_exponent(p, prec, 1000 * p + seed);
            let x = binomial_qpower(&a, m, nn).map_err(|e| e.to_string())?;
            for n in 1..=6u32 {
                let g = qdivided_power(&x, n).map_err(|e| format!("p={p} seed={seed} n={n}: {e}"))?;
                ensure(g.certificate.nygaard_level >= n, || format!("level {} < {n}", g.certificate.nygaard_level))?;
                let text = Certificate::Nygaard(g.certificate.clone()).to_json();
                let v = recheck_json(&text);
                ensure(v.pass, || format!("p={p} seed={seed} n={n}: {}", v.detail))?;
                certs.push(text);
                certs.push(Certificate::Factorization(g.factorization).to_json());
                certs.extend(g.steps.into_iter().map(|s| Certificate::Divisibility(s).to_json()));
                count += 1;
            }
        }
    }
    Ok(format!("{count} seeded divided powers certified; closed form matches for m <= 10"))
}

fn characterization() -> Outcome {
    let rep = verify_characterization(40, 40).map_err(|e| e.to_string())?;
    ensure(rep.derivative, || "nabla_q log_q != 1/x".into())?;
    ensure(rep.value_at_one, || "log_q(1) != 0".into())?;
    ensure(rep.classical_relation, || "log(q) log_q != (q-1) log(x)".into())?;
    Ok(format!("all three hold exactly at (40, 40); height {} digits", rep.height.len()))
}

fn qtaylor() -> Outcome {
    let s = Shape::new(20, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..50 {
        let f = BivarSeries::random(s, &mut rng);
        let coeffs = qtaylor_expand(&f, 20).map_err(|e| e.to_string())?;
        ensure(qtaylor_reconstruct(&coeffs, s) == f, || format!("round trip {i} fails"))?;
    }
    // coefficients of log_q, i.e. of 1/x shifted by one
    let log_coeffs = qtaylor_expand(&qlog_formal(20, 20).map_err(|e| e.to_string())?, 16).map_err(|e| e.to_string())?;
    let inv_coeffs = qtaylor_expand(&BivarSeries::x(s).inv().map_err(|e| e.to_string())?, 15).map_err(|e| e.to_string())?;
    for n in 1..=15 {
        let a = &log_coeffs[n];
        let want = common::log_coefficient_oracle(n, a.order());
        ensure(a.coeffs() == want.as_slice(), || format!("log_q coefficient a_{n}"))?;
        let b = &inv_coeffs[n - 1];
        let want = common::log_coefficient_oracle(n, b.order());
        ensure(b.coeffs() == want.as_slice(), || format!("1/x coefficient {}", n - 1))?;
    }
    Ok("50 round trips exact at (20, 20); a_n matches for n <= 15".into())
}

fn trace_model(certs: &mut Vec<String>) -> Outcome {
    let (n, m) = (32u32, 64usize);
    let mut count = 0;
    for p in [2u64, 3, 5] {
        let prec = TateExponent::required_precision(p, n, m);
        let exps: Vec<PadicNum> = (0..20).map(|s| seeded_exponent(p, prec, 7000 * p + s)).collect();
        for (i, a) in exps.iter().enumerate() {
            let rep = trace_map_model(&TateExponent::new(a.clone()), n, m).map_err(|e| format!("p={p} #{i}: {e}"))?;
            ensure(rep.matches, || format!("p={p} #{i}: trace model != a mu"))?;
            ensure(rep.eigenspace.pass, || format!("p={p} #{i}: eigenspace check"))?;
            ensure(rep.qlog.pass(), || format!("p={p} #{i}: {:?}", rep.qlog.checks))?;
            ensure(rep.qlog.level_two.nygaard_level >= 2, || format!("p={p} #{i}: log - (x-1) below level 2"))?;
            for c in [rep.qlog.level_one, rep.qlog.level_two] {
                let text = Certificate::Nygaard(c).to_json();
                let v = recheck_json(&text);
                ensure(v.pass, || format!("p={p} #{i}: {}", v.detail))?;
                certs.push(text);
            }
            count += 1;
        }
        let working = n + qlog_precision_loss(p, m);
        for pair in exps.chunks(2) {
            let x = binomial_qpower(&pair[0], m, working).map_err(|e| e.to_string())?;
            let y = binomial_qpower(&pair[1], m, working).map_err(|e| e.to_string())?;
            let rep = verify_additivity(&x, &y).map_err(|e| e.to_string())?;
            ensure(rep.pass, || format!("additivity fails for p={p}"))?;
        }
    }
    Ok(format!("{count} exponents: log_q(q^a) = a mu, level-2 congruence certified, additivity on 30 pairs"))
}

fn delta_ring() -> Outcome {
    let (n, m) = (16u32, 32usize);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..100 {
        let p = [2u64, 3, 5][i % 3];
        let level = rng.gen_range(0..2);
        let x = TowerSeries::random(p, level, n + 1, m, &mut rng);
        let y = TowerSeries::random(p, level, n + 1, m, &mut rng);
        let d = |f: &TowerSeries| delta(f).map_err(|e| e.to_string());
        let (dx, dy) = (d(&x)?, d(&y)?);
        ensure(dx.coeff_precision() == n, || "delta does not return precision N".into())?;
        let mut add_rhs = dx.add(&dy).unwrap();
        for k in 1..p {
            let c = num_integer::binomial(BigInt::from(p), BigInt::from(k)) / BigInt::from(p);
            add_rhs = add_rhs.sub(&x.pow(k).mul(&y.pow(p - k)).unwrap().scale_int(&c)).unwrap();
        }
        ensure(d(&x.add(&y).unwrap())?.congruent(&add_rhs).unwrap(), || format!("delta(x+y), input {i}"))?;
        let mul_rhs = x
            .pow(p)
            .mul(&dy)
            .unwrap()
            .add(&y.pow(p).mul(&dx).unwrap())
            .unwrap()
            .add(&common::times_p(&dx.mul(&dy).unwrap()))
            .unwrap();
        ensure(d(&x.mul(&y).unwrap())?.congruent(&mul_rhs).unwrap(), || format!("delta(xy), input {i}"))?;
        let frob = x.pow(p).add(&common::times_p(&dx)).unwrap();
        ensure(x.frobenius().congruent(&frob).unwrap(), || format!("phi = x^p + p delta, input {i}"))?;
        ensure(d(&TowerSeries::zero(p, level, n + 1, m))?.is_zero(), || "delta(0) != 0".into())?;
        ensure(d(&TowerSeries::one(p, level, n + 1, m))?.is_zero(), || "delta(1) != 0".into())?;
    }
    for p in [2u64, 3, 5] {
        let v = d_xi(p, n, m)?;
        let want = PadicNum::new(p, n, BigInt::one() - num_traits::pow(BigInt::from(p), p as usize - 1));
        ensure(v == want, || format!("delta(xi~)(1) = {v} for p={p}"))?;
    }
    Ok("100 inputs satisfy the delta-ring rules; delta(xi~)(1) = 1 - p^{p-1}".into())
}

fn d_xi(p: u64, n: u32, m: usize) -> Result<PadicNum, String> {
    Ok(delta(&xi_tilde(p, 0, n + 1, m)).map_err(|e| e.to_string())?.evaluate_q1())
}

fn recheck_all(certs: &[String]) -> Outcome {
    if certs.is_empty() {
        return Err("no certificates were collected".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut tampered = 0;
    for (i, text) in certs.iter().enumerate() {
        let back = Certificate::from_json(text).map_err(|e| format!("certificate {i}: {e}"))?;
        ensure(&back.to_json() == text, || format!("certificate {i} does not round-trip"))?;
        let v = recheck_json(text);
        ensure(v.pass, || format!("certificate {i} ({}) fails: {}", v.kind, v.detail))?;
        // one random single-byte corruption per certificate
        let slots = common::coefficient_slots(text);
        let slot = &slots[rng.gen_range(0..slots.len())];
        let value: serde_json::Value = serde_json::from_str(text).unwrap();
        let len = value[slot.0.as_str()]["coefficients"][slot.1].as_str().unwrap().len();
        let pos = rng.gen_range(0..len);
        let corrupted = (0..64).find_map(|_| {
            let b = common::REPLACEMENTS[rng.gen_range(0..common::REPLACEMENTS.len())];
            common::corrupt(text, slot, pos, b)
        });
        if let Some(bad) = corrupted {
            ensure(!recheck_json(&bad).pass, || format!("corruption of certificate {i} at {slot:?} undetected"))?;
            tampered += 1;
        }
    }
    // and every corruption of a few certificates
    let mut exhaustive = 0;
    for text in certs.iter().step_by(certs.len() / 4 + 1).take(4) {
        let v: serde_json::Value = serde_json::from_str(text).unwrap();
        for slot in common::coefficient_slots(text).into_iter().step_by(16) {
            let len = v[slot.0.as_str()]["coefficients"][slot.1].as_str().unwrap().len();
            for pos in 0..len {
                for &b in b"0123456789" {
                    if let Some(bad) = common::corrupt(text, &slot, pos, b) {
                        ensure(!recheck_json(&bad).pass, || format!("corruption at {slot:?}:{pos} undetected"))?;
                        exhaustive += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{} certificates re-verify; {tampered} sampled and {exhaustive} systematic corruptions rejected", certs.len()))
}

fn main() -> ExitCode {
    let mut certs = Vec::new();
    let results = [
        run(1, "exact q-identities", 5, exact_identities),
        run(2, "cyclotomic congruence and phi^r(xi~) lemma", 10, cyclotomic_congruences),
        run(3, "[n]_q! factorization certificates", 30, || factorizations(&mut certs)),
        run(4, "q-divided powers", 60, || divided_powers(&mut certs)),
        run(5, "q-logarithm characterization at (40, 40)", 60, characterization),
        run(6, "q-Taylor expansion", 30, qtaylor),
        run(7, "trace map model and q-logarithm on q^a", 120, || trace_model(&mut certs)),
        run(8, "delta-ring axioms", 30, delta_ring),
        run(9, "independent re-check of all certificates", 10, || recheck_all(&certs)),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
