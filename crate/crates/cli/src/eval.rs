use std::collections::BTreeMap;
use std::fmt;

use clap::ValueEnum;
use num_bigint::BigInt;
use serde_json::{json, Value};

use qprism::cert::Certificate;
use qprism::padic::vp_factorial;
use qprism::prism::qdivided_power;
use qprism::prism::qfact_factorize;
use qprism::qcomb::{q_binomial, q_int};
use qprism::qlog::{qlog_element, qlog_precision_loss, trace_map_model, TateExponent};
use qprism::series::binomial_qpower;
use qprism::upoly::UPoly;
use qprism::{LaurentPoly, PadicNum, TowerSeries};

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Qint,
    Qbinom,
    QfactFactorize,
    Qdivided,
    Qlog,
    TraceModel,
}

impl Target {
    fn keys(self) -> (&'static [&'static str], &'static [&'static str]) {
        // (required, optional)
        match self {
            Target::Qint => (&["n"], &[]),
            Target::Qbinom => (&["n", "k"], &[]),
            Target::QfactFactorize => (&["n"], &[]),
            Target::Qdivided => (&["n"], &["m", "a"]),
            Target::Qlog => (&["a"], &[]),
            Target::TraceModel => (&["a"], &[]),
        }
    }
}

#[derive(Debug)]
pub enum EvalError {
    Usage(String),
    Compute(qprism::Error),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Usage(s) => write!(f, "{s}"),
            EvalError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl From<qprism::Error> for EvalError {
    fn from(e: qprism::Error) -> Self {
        match e {
            qprism::Error::InvalidArgument(s) | qprism::Error::Parse(s) => EvalError::Usage(s),
            e => EvalError::Compute(e),
        }
    }
}

type Params = BTreeMap<String, String>;

pub fn parse_params(target: Target, raw: &[String]) -> Result<Params, EvalError> {
    let (required, optional) = target.keys();
    let mut out = Params::new();
    for item in raw {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| EvalError::Usage(format!("expected key=value, got `{item}`")))?;
        if !required.contains(&k) && !optional.contains(&k) {
            return Err(EvalError::Usage(format!("unknown parameter `{k}`; expected {required:?} and optionally {optional:?}")));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(EvalError::Usage(format!("parameter `{k}` given twice")));
        }
    }
    if let Some(k) = required.iter().find(|k| !out.contains_key(**k)) {
        return Err(EvalError::Usage(format!("missing parameter `{k}`")));
    }
    Ok(out)
}

fn int<T: std::str::FromStr>(params: &Params, key: &str) -> Result<T, EvalError> {
    let s = &params[key];
    s.parse().map_err(|_| EvalError::Usage(format!("parameter `{key}`: cannot parse `{s}`")))
}

/// A series in `q - 1` at level 0 whose coefficients are small integers,
/// rewritten as a polynomial in `q`.
fn as_q_poly(f: &TowerSeries) -> String {
    let s = UPoly::new(f.balanced_coeffs());
    LaurentPoly::from_q_poly(&s.compose(&UPoly::from_i64(&[-1, 1]))).to_string()
}

fn coefficient_strings(f: &TowerSeries) -> Vec<String> {
    f.balanced_coeffs().iter().map(|c| c.to_string()).collect()
}

pub fn eval(target: Target, params: &Params, cfg: &RunConfig) -> Result<Value, EvalError> {
    let (p, n, m) = (cfg.prime, cfg.precision, cfg.order);
    match target {
        Target::Qint => {
            let k: i64 = int(params, "n")?;
            Ok(json!({ "what": "qint", "n": k, "value": q_int(k).to_string() }))
        }
        Target::Qbinom => {
            let (a, b): (i64, i64) = (int(params, "n")?, int(params, "k")?);
            Ok(json!({ "what": "qbinom", "n": a, "k": b, "value": q_binomial(a, b)?.to_string() }))
        }
        Target::QfactFactorize => {
            let k: u32 = int(params, "n")?;
            let c = qfact_factorize(p, k, n, m)?;
            Ok(json!({
                "what": "qfact-factorize",
                "prime": p,
                "n": k,
                "exponents": c.exponents,
                "unit": as_q_poly(&c.unit),
                "unit_at_1": c.unit.evaluate_q1(),
                "certificate": Certificate::Factorization(c),
            }))
        }
        Target::Qdivided => {
            let k: u32 = int(params, "n")?;
            let (x, exact) = match (params.get("m"), params.get("a")) {
                (Some(_), None) => {
                    let mm: u32 = int(params, "m")?;
                    (qprism::prism::q_power_int(p, mm, n, m), true)
                }
                (None, Some(_)) => {
                    let a: BigInt = int(params, "a")?;
                    let prec = n + vp_factorial(p, m as u64 - 1);
                    (binomial_qpower(&PadicNum::new(p, prec, a), m, n)?, false)
                }
                _ => return Err(EvalError::Usage("qdivided needs exactly one of m= or a=".into())),
            };
            let g = qdivided_power(&x, k)?;
            let mut out = json!({
                "what": "qdivided",
                "n": k,
                "gamma": coefficient_strings(&g.gamma),
                "nygaard_level": g.certificate.nygaard_level,
                "certificate": Certificate::Nygaard(g.certificate.clone()),
            });
            if exact {
                out["gamma_q"] = as_q_poly(&g.gamma).into();
            }
            Ok(out)
        }
        Target::Qlog => {
            let a: BigInt = int(params, "a")?;
            let prec = TateExponent::required_precision(p, n, m);
            let x = binomial_qpower(&PadicNum::new(p, prec, a), m, n + qlog_precision_loss(p, m))?;
            let rep = qlog_element(&x)?;
            Ok(json!({
                "what": "qlog",
                "pass": rep.pass(),
                "result": coefficient_strings(&rep.result),
                "report": rep,
            }))
        }
        Target::TraceModel => {
            let a: BigInt = int(params, "a")?;
            let prec = TateExponent::required_precision(p, n, m);
            let rep = trace_map_model(&TateExponent::new(PadicNum::new(p, prec, a)), n, m)?;
            Ok(json!({
                "what": "trace-model",
                "pass": rep.pass(),
                "matches": rep.matches,
                "eigenspace": rep.eigenspace.pass,
                "result": coefficient_strings(&rep.result),
                "report": rep,
            }))
        }
    }
}
