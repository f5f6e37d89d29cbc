mod common;

use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;
use qprism::cert::recheck::recheck;
use qprism::cert::Certificate;
use qprism::padic::{vp_factorial, PadicNum};
use qprism::prism::{
    delta, delta_xi_at_1_expected, is_distinguished, nygaard_level, phi_power_xi, q_power_int, qdivided_power,
    qfact_exponents, qfact_factorize, rank_one_check, xi_r, xi_tilde,
};
use qprism::series::{binomial_qpower, TowerSeries};
use qprism::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_pair(p: u64, seed: u64) -> (TowerSeries, TowerSeries) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let level = rng.gen_range(0..2);
    (TowerSeries::random(p, level, 17, 32, &mut rng), TowerSeries::random(p, level, 17, 32, &mut rng))
}

#[test]
fn delta_of_constants() {
    for p in [2u64, 3, 5] {
        assert!(delta(&TowerSeries::zero(p, 0, 9, 8)).unwrap().is_zero());
        assert!(delta(&TowerSeries::one(p, 0, 9, 8)).unwrap().is_zero());
        // delta(n) = (n - n^p)/p for integers
        let d = delta(&TowerSeries::constant(p, 0, 9, 8, 2)).unwrap();
        let want = (BigInt::from(2) - num_traits::pow(BigInt::from(2), p as usize)) / BigInt::from(p);
        assert_eq!(d.coeff(0), PadicNum::new(p, 8, want));
    }
}

#[test]
fn delta_output_loses_the_guard_digit() {
    let d = delta(&TowerSeries::random(3, 0, 17, 32, &mut ChaCha8Rng::seed_from_u64(1))).unwrap();
    assert!(d.precisions().iter().all(|&n| n == 16));
}

#[test]
fn delta_of_xi_at_one() {
    for p in [2u64, 3, 5] {
        let d = delta(&xi_tilde(p, 0, 17, 32)).unwrap();
        let want = BigInt::one() - num_traits::pow(BigInt::from(p), (p - 1) as usize);
        assert_eq!(d.evaluate_q1(), PadicNum::new(p, 16, want));
        assert_eq!(d.evaluate_q1(), delta_xi_at_1_expected(p, 16));
    }
}

#[test]
fn distinguished_elements() {
    for p in [2u64, 3, 5] {
        assert!(is_distinguished(&xi_tilde(p, 0, 12, 40)).unwrap().distinguished);
        assert!(!is_distinguished(&TowerSeries::one(p, 0, 12, 40)).unwrap().distinguished);
        assert!(!is_distinguished(&TowerSeries::mu(p, 12, 40)).unwrap().distinguished);
        for r in 1..=3 {
            if (p.pow(r + 1) as usize) < 200 {
                assert!(is_distinguished(&phi_power_xi(p, r, 0, 12, 200)).unwrap().distinguished);
            }
        }
    }
}

#[test]
fn xi_r_is_q_integer_of_prime_power() {
    for p in [2u64, 3, 5] {
        for r in 0..=3u32 {
            let pr = p.pow(r) as usize;
            let want = TowerSeries::from_q_poly(p, 0, 20, 140, &common::geometric(pr, 1));
            assert_eq!(xi_r(p, r, 0, 20, 140), want, "p={p} r={r}");
        }
    }
}

#[test]
fn factorization_exponents_match_cyclotomic_multiplicity() {
    // count how often Phi_{p^r} divides [n]_q! by exact division in Z[q]
    for p in [2u64, 3, 5] {
        for n in 1..=(p.pow(3) as u32).min(40) {
            let mut fact = common::q_factorial_oracle(n as usize);
            let mut want = Vec::new();
            let mut r = 1;
            while p.pow(r) <= n as u64 {
                let phi = common::geometric(p as usize, p.pow(r - 1) as usize);
                let mut count = 0;
                while let Some(q) = fact.div_exact_monic(&phi) {
                    fact = q;
                    count += 1;
                }
                want.push(count);
                r += 1;
            }
            assert_eq!(qfact_exponents(p, n), want, "p={p} n={n}");
        }
    }
}

#[test]
fn factorization_reassembles_the_factorial() {
    for p in [2u64, 3] {
        for n in 1..=p.pow(3) as u32 {
            let cert = qfact_factorize(p, n, 32, 128).unwrap();
            assert!(cert.unit.evaluate_q1().is_unit());
            let mut prod = cert.unit.clone();
            for (r, &a) in cert.exponents.iter().enumerate() {
                for _ in 0..a {
                    prod = prod.mul(&phi_power_xi(p, r as u32, 0, 32, 128)).unwrap();
                }
            }
            let want = TowerSeries::from_q_poly(p, 0, 32, 128, &common::q_factorial_oracle(n as usize));
            assert!(prod.congruent(&want).unwrap(), "p={p} n={n}");
            assert_eq!(cert.achieved(), (32, 128));
            assert!(recheck(&Certificate::Factorization(cert)).pass);
        }
    }
}

#[test]
fn factorization_examples() {
    let c = qfact_factorize(2, 2, 16, 32).unwrap();
    assert_eq!(c.exponents, vec![1]);
    assert!(c.unit.congruent(&TowerSeries::one(2, 0, 16, 32)).unwrap());
    let c = qfact_factorize(2, 4, 16, 32).unwrap();
    assert_eq!(c.exponents, vec![2, 1]);
    assert!(c.unit.congruent(&TowerSeries::from_q_poly(2, 0, 16, 32, &common::geometric(3, 1))).unwrap());
    let c = qfact_factorize(3, 3, 16, 32).unwrap();
    assert_eq!(c.exponents, vec![1]);
    assert!(c.unit.congruent(&TowerSeries::from_q_poly(3, 0, 16, 32, &common::geometric(2, 1))).unwrap());
}

#[test]
fn nygaard_examples() {
    for p in [2u64, 3, 5] {
        let mu = TowerSeries::mu(p, 16, 32);
        assert!(nygaard_level(&mu, 2).unwrap().nygaard_level >= 1);
        assert!(nygaard_level(&mu.mul(&mu).unwrap(), 3).unwrap().nygaard_level >= 2);
        assert_eq!(nygaard_level(&TowerSeries::one(p, 0, 16, 32), 3).unwrap().nygaard_level, 0);
    }
}

#[test]
fn nygaard_cap_needs_enough_order() {
    let mu = TowerSeries::mu(5, 16, 8);
    assert!(matches!(nygaard_level(&mu, 3), Err(Error::OrderExhausted { .. })));
}

#[test]
fn rank_one_examples() {
    let mu = TowerSeries::mu(2, 12, 16);
    let one = TowerSeries::one(2, 0, 12, 16);
    assert!(rank_one_check(&TowerSeries::q(2, 12, 16)).unwrap().rank_one);
    assert!(!rank_one_check(&one.add(&mu.mul(&mu).unwrap()).unwrap()).unwrap().rank_one);
}

#[test]
fn qdivided_power_closed_form() {
    for p in [2u64, 3] {
        for n in 1..=6u32 {
            for m in 0..=10u32 {
                let g = qdivided_power(&q_power_int(p, m, 32, 64), n).unwrap();
                let want = TowerSeries::from_q_poly(p, 0, 32, 64, &common::closed_form_oracle(m as usize, n as usize));
                assert!(g.gamma.congruent(&want).unwrap(), "p={p} n={n} m={m}");
                assert!(g.certificate.nygaard_level >= n);
            }
        }
    }
}

#[test]
fn qdivided_power_of_one_plus_p() {
    for p in [2u64, 3] {
        let need = 32 + vp_factorial(p, 63);
        let a = PadicNum::new(p, need, 1 + p);
        let x = binomial_qpower(&a, 64, 32).unwrap();
        let g = qdivided_power(&x, 2).unwrap();
        assert!(g.certificate.nygaard_level >= 2);
    }
}

#[test]
fn qdivided_power_hypotheses() {
    let mu = TowerSeries::mu(3, 16, 32);
    let one = TowerSeries::one(3, 0, 16, 32);
    let generic = one.add(&mu.mul(&mu).unwrap()).unwrap();
    assert!(matches!(qdivided_power(&generic, 2), Err(Error::Hypothesis(_))));
    // 2 is rank one but 2 - 1 = 1 is not in the Nygaard filtration
    let two = TowerSeries::constant(3, 0, 16, 32, 2);
    assert!(rank_one_check(&TowerSeries::one(3, 0, 16, 32)).unwrap().rank_one);
    assert!(qdivided_power(&two, 2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn delta_additive_rule(seed in any::<u64>(), pi in 0usize..3) {
        let p = [2u64, 3, 5][pi];
        let (x, y) = random_pair(p, seed);
        let lhs = delta(&x.add(&y).unwrap()).unwrap();
        let mut rhs = delta(&x).unwrap().add(&delta(&y).unwrap()).unwrap();
        for i in 1..p {
            let c = num_integer::binomial(BigInt::from(p), BigInt::from(i)) / BigInt::from(p);
            let t = x.pow(i).mul(&y.pow(p - i)).unwrap().scale_int(&c);
            rhs = rhs.sub(&t).unwrap();
        }
        prop_assert!(lhs.congruent(&rhs).unwrap());
    }

    #[test]
    fn delta_multiplicative_rule(seed in any::<u64>(), pi in 0usize..3) {
        let p = [2u64, 3, 5][pi];
        let (x, y) = random_pair(p, seed);
        let (dx, dy) = (delta(&x).unwrap(), delta(&y).unwrap());
        let lhs = delta(&x.mul(&y).unwrap()).unwrap();
        let rhs = x.pow(p).mul(&dy).unwrap()
            .add(&y.pow(p).mul(&dx).unwrap()).unwrap()
            .add(&common::times_p(&dx.mul(&dy).unwrap())).unwrap();
        prop_assert!(lhs.congruent(&rhs).unwrap());
    }

    #[test]
    fn frobenius_is_power_plus_p_delta(seed in any::<u64>(), pi in 0usize..3) {
        let p = [2u64, 3, 5][pi];
        let (x, _) = random_pair(p, seed);
        let rhs = x.pow(p).add(&common::times_p(&delta(&x).unwrap())).unwrap();
        prop_assert!(x.frobenius().congruent(&rhs).unwrap());
        prop_assert_eq!(rhs.coeff_precision(), 17);
    }

    #[test]
    fn q_powers_are_rank_one(seed in any::<u64>(), pi in 0usize..3) {
        let p = [2u64, 3, 5][pi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let need = 12 + vp_factorial(p, 23);
        let a = PadicNum::new(p, need, rng.gen::<u64>());
        let x = binomial_qpower(&a, 24, 12).unwrap();
        prop_assert!(rank_one_check(&x).unwrap().rank_one);
    }

    #[test]
    fn nygaard_level_is_superadditive(seed in any::<u64>(), a in 0u32..3, b in 0u32..3, pi in 0usize..2) {
        let p = [2u64, 3][pi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = TowerSeries::mu(p, 16, 32);
        let f = mu.pow(a as u64).mul(&TowerSeries::random(p, 0, 16, 32, &mut rng)).unwrap();
        let g = mu.pow(b as u64).mul(&TowerSeries::random(p, 0, 16, 32, &mut rng)).unwrap();
        let cap = 5;
        let (lf, lg, lfg) = (nygaard_level(&f, cap), nygaard_level(&g, cap), nygaard_level(&f.mul(&g).unwrap(), cap));
        prop_assume!(lf.is_ok() && lg.is_ok() && lfg.is_ok());
        let (lf, lg, lfg) = (lf.unwrap().nygaard_level, lg.unwrap().nygaard_level, lfg.unwrap().nygaard_level);
        prop_assert!(lf >= a && lg >= b);
        prop_assert!(lfg >= (lf + lg).min(cap));
    }
}
