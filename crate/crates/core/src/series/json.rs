//! JSON forms of series. Integers travel as decimal strings, rationals as
//! `"num/den"` in lowest terms, and parsing insists on the canonical form
//! so that a round trip is byte-for-byte exact.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::p_pow;
use crate::series::bivar::{BivarSeries, Shape};
use crate::series::tower::TowerSeries;

pub mod bigint_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_int(&s).map_err(serde::de::Error::custom)
    }
}

/// Strict decimal parse: optional `-`, no leading zeros, no `-0`.
pub fn parse_int(s: &str) -> Result<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    let canonical = !digits.is_empty()
        && digits.bytes().all(|b| b.is_ascii_digit())
        && (digits == "0" || !digits.starts_with('0'))
        && !(s.starts_with('-') && digits == "0");
    if !canonical {
        return Err(Error::Parse(format!("`{s}` is not a canonical decimal integer")));
    }
    BigInt::from_str(s).map_err(|e| Error::Parse(format!("`{s}`: {e}")))
}

pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("`{s}` is not of the form num/den")))?;
    let (n, d) = (parse_int(n)?, parse_int(d)?);
    if !d.is_positive() || !n.gcd(&d).is_one() {
        return Err(Error::Parse(format!("`{s}` is not in lowest terms")));
    }
    Ok(BigRational::new_raw(n, d))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSeriesJson {
    pub prime: u64,
    pub level: u32,
    pub coeff_precision: u32,
    pub order: usize,
    pub coefficients: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precisions: Option<Vec<u32>>,
}

impl From<&TowerSeries> for TowerSeriesJson {
    fn from(f: &TowerSeries) -> Self {
        TowerSeriesJson {
            prime: f.prime(),
            level: f.level(),
            coeff_precision: f.coeff_precision(),
            order: f.order(),
            coefficients: f.coeffs().iter().map(|c| c.to_string()).collect(),
            precisions: (!f.is_flat()).then(|| f.precisions().to_vec()),
        }
    }
}

impl TryFrom<TowerSeriesJson> for TowerSeries {
    type Error = Error;

    fn try_from(j: TowerSeriesJson) -> Result<Self> {
        if j.prime < 2 || !crate::padic::is_prime(j.prime) {
            return Err(Error::Parse(format!("{} is not prime", j.prime)));
        }
        if j.coefficients.len() != j.order {
            return Err(Error::Parse(format!(
                "order {} but {} coefficients",
                j.order,
                j.coefficients.len()
            )));
        }
        let precs = match j.precisions {
            Some(p) => {
                if p.len() != j.order
                    || p.windows(2).all(|w| w[0] == w[1])
                    || p.first() != Some(&j.coeff_precision)
                {
                    return Err(Error::Parse("precision staircase inconsistent with header".into()));
                }
                p
            }
            None => vec![j.coeff_precision; j.order],
        };
        if precs.windows(2).any(|w| w[0] < w[1]) || precs.contains(&0) {
            return Err(Error::Parse("precision staircase must be positive and non-increasing".into()));
        }
        let mut coeffs = Vec::with_capacity(j.order);
        for (s, &n) in j.coefficients.iter().zip(&precs) {
            let c = parse_int(s)?;
            if c.is_negative() || c >= p_pow(j.prime, n) {
                return Err(Error::Parse(format!("coefficient {s} outside [0, {}^{n})", j.prime)));
            }
            coeffs.push(c);
        }
        Ok(TowerSeries::from_parts(j.prime, j.level, coeffs, precs))
    }
}

impl Serialize for TowerSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TowerSeriesJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TowerSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        TowerSeries::try_from(TowerSeriesJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BivarSeriesJson {
    pub order_q: usize,
    pub order_x: usize,
    pub coefficients: Vec<Vec<String>>,
}

impl From<&BivarSeries> for BivarSeriesJson {
    fn from(f: &BivarSeries) -> Self {
        BivarSeriesJson {
            order_q: f.shape().mq,
            order_x: f.shape().mx,
            coefficients: f.rows().iter().map(|r| r.iter().map(format_rational).collect()).collect(),
        }
    }
}

impl TryFrom<BivarSeriesJson> for BivarSeries {
    type Error = Error;

    fn try_from(j: BivarSeriesJson) -> Result<Self> {
        let shape = Shape::new(j.order_q, j.order_x);
        if j.coefficients.len() != shape.rows() {
            return Err(Error::Parse("row count does not match the truncation orders".into()));
        }
        let mut rows = Vec::with_capacity(shape.rows());
        for (i, r) in j.coefficients.iter().enumerate() {
            if r.len() != shape.row_len(i) {
                return Err(Error::Parse(format!("row {i} has the wrong length")));
            }
            rows.push(r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?);
        }
        Ok(BivarSeries::from_rows(shape, rows))
    }
}

impl Serialize for BivarSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BivarSeriesJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BivarSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        BivarSeries::try_from(BivarSeriesJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// `QSeries` travels as a flat list of `"num/den"` strings.
pub fn qseries_to_json(f: &crate::series::bivar::QSeries) -> Vec<String> {
    f.coeffs().iter().map(format_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_integers() {
        assert!(parse_int("012").is_err());
        assert!(parse_int("-0").is_err());
        assert!(parse_int("+1").is_err());
        assert_eq!(parse_int("-17").unwrap(), BigInt::from(-17));
        assert_eq!(parse_int("0").unwrap(), BigInt::from(0));
    }

    #[test]
    fn strict_rationals() {
        assert!(parse_rational("2/4").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("3").is_err());
        assert_eq!(parse_rational("-1/2").unwrap(), BigRational::new((-1).into(), 2.into()));
    }

    #[test]
    fn tower_round_trip() {
        let f = TowerSeries::from_parts(3, 1, vec![5.into(), 7.into(), 2.into()], vec![4, 3, 3]);
        let text = serde_json::to_string(&f).unwrap();
        let back: TowerSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
