//! Reduction of Laurent polynomials into `Z[zeta_{p^r}] = Z[q] / Phi_{p^r}(q)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::poly::LaurentPoly;
use crate::upoly::{cyclotomic_prime_power, UPoly};

/// An element of `Z[q] / Phi_{p^r}(q)` as its reduced coefficient vector
/// of length `p^r - p^{r-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicElement {
    pub prime: u64,
    pub level: u32,
    pub coeffs: Vec<BigInt>,
}

impl CyclotomicElement {
    pub fn degree_bound(p: u64, r: u32) -> usize {
        (p.pow(r) - p.pow(r - 1)) as usize
    }

    /// Reduce `q^offset * f(q)` modulo `Phi_{p^r}`.
    pub fn reduce(f: &UPoly, offset: i64, p: u64, r: u32) -> Self {
        let period = p.pow(r) as i64;
        // q^{p^r} = 1 in the quotient, so negative exponents can be cleared
        let lift = if offset < 0 { (-offset + period - 1) / period * period } else { 0 };
        let shifted = f.mul(&UPoly::monomial(1.into(), (offset + lift) as usize));
        let (_, rem) = shifted.div_rem_monic(&cyclotomic_prime_power(p, r));
        let mut coeffs = rem.coeffs().to_vec();
        coeffs.resize(Self::degree_bound(p, r), BigInt::zero());
        CyclotomicElement { prime: p, level: r, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn to_upoly(&self) -> UPoly {
        UPoly::new(self.coeffs.clone())
    }
}

/// A polynomial in `x`, `y` with coefficients in `Z[zeta_{p^r}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicPoly {
    pub prime: u64,
    pub level: u32,
    pub terms: BTreeMap<[i64; 2], CyclotomicElement>,
}

impl CyclotomicPoly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The canonical lift with `q`-exponents in `[0, deg Phi)`.
    pub fn to_laurent(&self) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (xy, c) in &self.terms {
            for (k, a) in c.coeffs.iter().enumerate() {
                out = &out + &LaurentPoly::monomial(a.clone(), [k as i64, xy[0], xy[1]]);
            }
        }
        out
    }

    /// The coefficient of `x^0 y^0`, i.e. the image of a polynomial in `q`.
    pub fn constant_part(&self) -> CyclotomicElement {
        self.terms.get(&[0, 0]).cloned().unwrap_or_else(|| CyclotomicElement {
            prime: self.prime,
            level: self.level,
            coeffs: vec![BigInt::zero(); CyclotomicElement::degree_bound(self.prime, self.level)],
        })
    }
}

pub fn cyclotomic_reduce(f: &LaurentPoly, p: u64, r: u32) -> CyclotomicPoly {
    assert!(r >= 1, "cyclotomic level must be at least 1");
    let mut terms = BTreeMap::new();
    for (xy, (lo, g)) in f.q_slices() {
        let c = CyclotomicElement::reduce(&g, lo, p, r);
        if !c.is_zero() {
            terms.insert(xy, c);
        }
    }
    CyclotomicPoly { prime: p, level: r, terms }
}
