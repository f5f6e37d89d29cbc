mod common;

use qprism::cert::recheck::{recheck, recheck_json};
use qprism::cert::{distinguished_divide, Certificate, Division, DivisorSpec};
use qprism::prism::{nygaard_level, q_power_int, qdivided_power, qfact_factorize};
use qprism::series::TowerSeries;
use qprism::upoly::UPoly;
use serde_json::Value;

fn small_certificates() -> Vec<Certificate> {
    let mut out = Vec::new();
    for p in [2u64, 3] {
        let mu = TowerSeries::mu(p, 4, 6);
        out.push(Certificate::Nygaard(nygaard_level(&mu, 1).unwrap()));
        let f = TowerSeries::from_q_poly(p, 0, 4, 6, &UPoly::x_pow_minus_one(p as usize));
        match distinguished_divide(&f, &DivisorSpec::XiTilde).unwrap() {
            Division::Divisible { certificate, .. } => out.push(Certificate::Divisibility(certificate)),
            Division::NotDivisible { .. } => panic!("q^p - 1 is divisible by xi~"),
        }
        out.push(Certificate::Factorization(qfact_factorize(p, p as u32 + 1, 4, 6).unwrap()));
    }
    out
}

#[test]
fn json_round_trip_is_exact() {
    for cert in small_certificates() {
        let text = cert.to_json();
        let back = Certificate::from_json(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_json(), text);
        assert!(recheck_json(&text).pass, "{}", recheck_json(&text).detail);
    }
}

#[test]
fn every_single_byte_coefficient_corruption_is_caught() {
    for cert in small_certificates() {
        let text = cert.to_json();
        let tampered = common::all_corruptions(&text);
        assert!(!tampered.is_empty());
        for t in &tampered {
            let v = recheck_json(t);
            assert!(!v.pass, "undetected corruption of a {} certificate:\n{t}", cert.kind());
        }
    }
}

fn edit(text: &str, f: impl FnOnce(&mut Value)) -> String {
    let mut v: Value = serde_json::from_str(text).unwrap();
    f(&mut v);
    serde_json::to_string(&v).unwrap()
}

#[test]
fn header_tampering_is_caught() {
    let mu = TowerSeries::mu(3, 6, 8);
    let text = Certificate::Nygaard(nygaard_level(&mu, 2).unwrap()).to_json();
    assert!(!recheck_json(&edit(&text, |v| v["nygaard_level"] = 2.into())).pass);
    assert!(!recheck_json(&edit(&text, |v| v["prime"] = 2.into())).pass);
    assert!(!recheck_json(&edit(&text, |v| v["check_precisions"][0] = 7.into())).pass);
    assert!(!recheck_json(&edit(&text, |v| v["kind"] = "divisibility".into())).pass);
    assert!(!recheck_json(&edit(&text, |v| v["extra"] = 1.into())).pass);
    assert!(!recheck_json("{").pass);
}

#[test]
fn factorization_tampering_is_caught() {
    let text = Certificate::Factorization(qfact_factorize(2, 4, 8, 12).unwrap()).to_json();
    assert!(!recheck_json(&edit(&text, |v| v["exponents"][0] = 1.into())).pass);
    assert!(!recheck_json(&edit(&text, |v| v["n"] = 5.into())).pass);
}

#[test]
fn divisor_tampering_is_caught() {
    let f = TowerSeries::from_q_poly(2, 0, 6, 8, &UPoly::x_pow_minus_one(4));
    let Division::Divisible { certificate, .. } =
        distinguished_divide(&f, &DivisorSpec::PhiPowerXi { r: 1 }).unwrap()
    else {
        panic!("q^4 - 1 is divisible by q^2 + 1");
    };
    let text = Certificate::Divisibility(certificate).to_json();
    assert!(recheck_json(&text).pass);
    let swapped = edit(&text, |v| v["divisor"] = serde_json::json!({"kind": "xi_tilde"}));
    assert!(!recheck_json(&swapped).pass);
}

#[test]
fn qdivided_power_certificates_recheck() {
    let g = qdivided_power(&q_power_int(3, 4, 16, 32), 3).unwrap();
    assert!(recheck(&Certificate::Nygaard(g.certificate.clone())).pass);
    assert!(recheck(&Certificate::Factorization(g.factorization.clone())).pass);
    for s in &g.steps {
        assert!(recheck(&Certificate::Divisibility(s.clone())).pass);
    }
    assert_eq!(g.steps.len(), 1);
}
