//! Truncated series over `Q` in `t = q - 1` (univariate [`QSeries`]) and in
//! `t`, `z = x - 1` (bivariate [`BivarSeries`]).
//!
//! A `BivarSeries` of shape `(mq, mx)` is an element of
//! `Q[[t, z]] / ((t^mq) + (t, z)^mx)`: coefficient `(i, j)` of `t^i z^j` is
//! stored iff `i < mq` and `i + j < mx`. This ideal is stable under
//! `x -> qx` (which sends `z` to `t + z + tz`), so the q-derivative maps
//! shape `(mq, mx)` to `(mq - 1, mx - 1)` without guessing any coefficient.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `binom(k, i)` for integer `k` (possibly negative) as a rational.
fn gen_binom(k: i64, i: usize) -> BigRational {
    let mut acc = BigRational::one();
    for r in 0..i as i64 {
        acc = acc * rat(k - r) / rat(r + 1);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSeries {
    coeffs: Vec<BigRational>,
}

impl QSeries {
    pub fn new(mut coeffs: Vec<BigRational>, order: usize) -> Self {
        coeffs.resize(order, BigRational::zero());
        QSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn constant(order: usize, c: BigRational) -> Self {
        Self::new(vec![c], order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, BigRational::one())
    }

    /// `q^k = (1 + t)^k` for any integer `k`.
    pub fn q_pow(k: i64, order: usize) -> Self {
        Self::new((0..order).map(|i| gen_binom(k, i)).collect(), order)
    }

    /// `[n]_q` for `n >= 0`.
    pub fn q_int(n: u64, order: usize) -> Self {
        // [n]_q = sum_{i>=0} binom(n, i+1) t^i
        Self::new((0..order).map(|i| gen_binom(n as i64, i + 1)).collect(), order)
    }

    pub fn q_factorial(n: u64, order: usize) -> Self {
        (1..=n).fold(Self::one(order), |acc, k| acc.mul(&Self::q_int(k, order)))
    }

    /// `log(q) = log(1 + t)`.
    pub fn log_q(order: usize) -> Self {
        let mut c = vec![BigRational::zero(); order];
        for (i, slot) in c.iter_mut().enumerate().skip(1) {
            let sign = if i % 2 == 1 { 1 } else { -1 };
            *slot = BigRational::new(BigInt::from(sign), BigInt::from(i));
        }
        Self::new(c, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..order.min(self.order())].to_vec(), order.min(self.order()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let m = self.order().min(o.order());
        Self::new((0..m).map(|i| &self.coeffs[i] + &o.coeffs[i]).collect(), m)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let m = self.order().min(o.order());
        Self::new((0..m).map(|i| &self.coeffs[i] - &o.coeffs[i]).collect(), m)
    }

    pub fn neg(&self) -> Self {
        QSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        QSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = self.order().min(o.order());
        let mut c = vec![BigRational::zero(); m];
        for (i, a) in self.coeffs.iter().enumerate().take(m) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(m - i) {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        QSeries { coeffs: c }
    }

    pub fn inv(&self) -> Result<Self> {
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return Err(Error::NotAUnit("series with zero constant term".into()));
        }
        let m = self.order();
        let u = c0.recip();
        let mut g: Vec<BigRational> = vec![u.clone()];
        for k in 1..m {
            let mut acc = BigRational::zero();
            for i in 1..=k {
                acc += &self.coeffs[i] * &g[k - i];
            }
            g.push(-acc * &u);
        }
        Ok(QSeries { coeffs: g })
    }
}

/// Truncation shape `(mq, mx)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    pub mq: usize,
    pub mx: usize,
}

impl Shape {
    pub fn new(mq: usize, mx: usize) -> Self {
        Shape { mq, mx }
    }

    pub fn rows(&self) -> usize {
        self.mq.min(self.mx)
    }

    pub fn row_len(&self, i: usize) -> usize {
        self.mx - i
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.mq && i + j < self.mx
    }

    pub fn meet(&self, o: &Shape) -> Shape {
        Shape::new(self.mq.min(o.mq), self.mx.min(o.mx))
    }

    /// Shape after dividing by `t` (or applying the q-derivative).
    pub fn lowered(&self) -> Shape {
        Shape::new(self.mq.saturating_sub(1), self.mx.saturating_sub(1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BivarSeries {
    shape: Shape,
    rows: Vec<Vec<BigRational>>,
}

impl BivarSeries {
    pub fn zero(shape: Shape) -> Self {
        let rows = (0..shape.rows()).map(|i| vec![BigRational::zero(); shape.row_len(i)]).collect();
        BivarSeries { shape, rows }
    }

    /// Build from a coefficient function, evaluated only inside the shape.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let rows = (0..shape.rows()).map(|i| (0..shape.row_len(i)).map(|j| f(i, j)).collect()).collect();
        BivarSeries { shape, rows }
    }

    /// Rows given explicitly; entries outside the shape are dropped, missing
    /// ones are zero.
    pub fn from_rows(shape: Shape, rows: Vec<Vec<BigRational>>) -> Self {
        Self::from_fn(shape, |i, j| rows.get(i).and_then(|r| r.get(j)).cloned().unwrap_or_else(BigRational::zero))
    }

    pub fn constant(shape: Shape, c: BigRational) -> Self {
        let mut out = Self::zero(shape);
        if shape.contains(0, 0) {
            out.rows[0][0] = c;
        }
        out
    }

    pub fn one(shape: Shape) -> Self {
        Self::constant(shape, BigRational::one())
    }

    /// `x = 1 + z`.
    pub fn x(shape: Shape) -> Self {
        Self::from_fn(shape, |i, j| if i == 0 && j <= 1 { BigRational::one() } else { BigRational::zero() })
    }

    /// `q = 1 + t`.
    pub fn q(shape: Shape) -> Self {
        Self::from_fn(shape, |i, j| if j == 0 && i <= 1 { BigRational::one() } else { BigRational::zero() })
    }

    /// A series in `t` alone; coefficients past its order are taken as zero,
    /// so callers must make sure the missing terms lie in the truncation ideal.
    pub fn from_qseries(shape: Shape, f: &QSeries) -> Self {
        Self::from_fn(shape, |i, j| if j == 0 { f.coeff(i) } else { BigRational::zero() })
    }

    /// Random element with small rational coefficients.
    pub fn random(shape: Shape, rng: &mut impl Rng) -> Self {
        Self::from_fn(shape, |_, _| {
            let n: i64 = rng.gen_range(-9..=9);
            let d: i64 = rng.gen_range(1..=5);
            BigRational::new(n.into(), d.into())
        })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    pub fn coeff(&self, i: usize, j: usize) -> BigRational {
        self.rows.get(i).and_then(|r| r.get(j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|c| c.is_zero())
    }

    pub fn truncate(&self, shape: Shape) -> Self {
        let s = self.shape.meet(&shape);
        Self::from_fn(s, |i, j| self.rows[i][j].clone())
    }

    fn zip(&self, o: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        let s = self.shape.meet(&o.shape);
        Self::from_fn(s, |i, j| f(&self.rows[i][j], &o.rows[i][j]))
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.shape, |i, j| -&self.rows[i][j])
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_fn(self.shape, |i, j| &self.rows[i][j] * c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let s = self.shape.meet(&o.shape);
        let mut out = Self::zero(s);
        for (i1, r1) in self.rows.iter().enumerate().take(s.rows()) {
            for (j1, a) in r1.iter().enumerate() {
                if a.is_zero() || i1 + j1 >= s.mx {
                    continue;
                }
                for (i2, r2) in o.rows.iter().enumerate().take(s.rows().saturating_sub(i1)) {
                    let room = s.mx - (i1 + i2);
                    if room <= j1 {
                        break;
                    }
                    for (j2, b) in r2.iter().enumerate().take(room - j1) {
                        if !b.is_zero() {
                            out.rows[i1 + i2][j1 + j2] += a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// Multiply by a series in `t` alone (truncated to the shape).
    pub fn mul_qseries(&self, f: &QSeries) -> Self {
        let s = Shape::new(self.shape.mq.min(f.order()), self.shape.mx);
        let mut out = Self::zero(s);
        for i in 0..s.rows() {
            for j in 0..s.row_len(i) {
                let mut acc = BigRational::zero();
                for i1 in 0..=i {
                    let a = &f.coeffs()[i1];
                    if !a.is_zero() {
                        acc += a * &self.rows[i - i1][j];
                    }
                }
                out.rows[i][j] = acc;
            }
        }
        out
    }

    /// Inverse of a series with nonzero constant term, by solving
    /// `f * g = 1` in order of increasing total degree.
    pub fn inv(&self) -> Result<Self> {
        let c0 = self.coeff(0, 0);
        if c0.is_zero() {
            return Err(Error::NotAUnit("bivariate series with zero constant term".into()));
        }
        let s = self.shape;
        let u = c0.recip();
        let mut g = Self::zero(s);
        for deg in 0..s.mx {
            for i in 0..=deg.min(s.mq.saturating_sub(1)) {
                let j = deg - i;
                let mut acc = if deg == 0 { BigRational::one() } else { BigRational::zero() };
                for i1 in 0..=i {
                    for j1 in 0..=j {
                        if i1 == 0 && j1 == 0 {
                            continue;
                        }
                        let a = &self.rows[i1][j1];
                        if !a.is_zero() {
                            acc -= a * &g.rows[i - i1][j - j1];
                        }
                    }
                }
                g.rows[i][j] = acc * &u;
            }
        }
        Ok(g)
    }

    /// `f(x) -> f(qx)`, i.e. `z -> t + z + tz`, by Horner's rule in `z`.
    pub fn shift_x_to_qx(&self) -> Self {
        let s = self.shape;
        let column = |j: usize| Self::from_fn(s, |i, jj| if jj == 0 { self.coeff(i, j) } else { BigRational::zero() });
        let mut acc = Self::zero(s);
        for j in (0..s.mx).rev() {
            acc = acc.mul_by_w();
            acc = acc.add(&column(j));
        }
        acc
    }

    /// Multiply by `z = x - 1`.
    pub fn mul_by_z(&self) -> Self {
        Self::from_fn(self.shape, |i, j| if j == 0 { BigRational::zero() } else { self.coeff(i, j - 1) })
    }

    /// Multiply by `x - q^k`, i.e. by `z - (q^k - 1)`.
    pub fn mul_by_x_minus_qpow(&self, k: i64) -> Self {
        let c = QSeries::q_pow(k, self.shape.mq).sub(&QSeries::one(self.shape.mq));
        self.mul_by_z().sub(&self.mul_qseries(&c))
    }

    /// Multiply by `w = t + z + tz`.
    fn mul_by_w(&self) -> Self {
        let s = self.shape;
        Self::from_fn(s, |i, j| {
            let mut acc = BigRational::zero();
            if i >= 1 {
                acc += self.coeff(i - 1, j);
            }
            if j >= 1 {
                acc += self.coeff(i, j - 1);
            }
            if i >= 1 && j >= 1 {
                acc += self.coeff(i - 1, j - 1);
            }
            acc
        })
    }

    /// Divide by `x = 1 + z` (a unit), row by row.
    pub fn div_by_x(&self) -> Self {
        let mut out = self.clone();
        for row in &mut out.rows {
            for j in 1..row.len() {
                let prev = row[j - 1].clone();
                row[j] -= prev;
            }
        }
        out
    }

    /// `nabla_q f = (f(qx) - f(x)) / ((q - 1) x)`, of shape `(mq-1, mx-1)`.
    pub fn nabla_q(&self) -> Result<Self> {
        let g = self.shift_x_to_qx().sub(self);
        if g.rows.first().is_some_and(|r| r.iter().any(|c| !c.is_zero())) {
            return Err(Error::Internal("f(qx) - f(x) is not divisible by q - 1".into()));
        }
        let s = self.shape.lowered();
        let shifted = Self::from_fn(s, |i, j| g.coeff(i + 1, j));
        Ok(shifted.div_by_x())
    }

    /// Partial derivative in `x` (equivalently in `z`), of shape `(mq, mx-1)`.
    pub fn d_dx(&self) -> Self {
        let s = Shape::new(self.shape.mq, self.shape.mx.saturating_sub(1));
        Self::from_fn(s, |i, j| self.coeff(i, j + 1) * rat(j as i64 + 1))
    }

    /// Reduction modulo `q - 1`: the `t^0` row as a shape `(1, mx)` series.
    pub fn mod_t(&self) -> Self {
        self.truncate(Shape::new(1, self.shape.mx))
    }

    /// Evaluation at `x = 1`, a series in `t` of order `min(mq, mx)`.
    pub fn at_x1(&self) -> QSeries {
        let m = self.shape.rows();
        QSeries::new((0..m).map(|i| self.rows[i][0].clone()).collect(), m)
    }

    /// `sum_{k>=1} (-1)^{k-1} (f - 1)^k / k` for `f` with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if self.coeff(0, 0) != BigRational::one() {
            return Err(Error::InvalidArgument("logarithm needs constant term 1".into()));
        }
        let h = self.sub(&Self::one(self.shape));
        let mut power = h.clone();
        let mut acc = Self::zero(self.shape);
        for k in 1..self.shape.mx.max(1) {
            let c = BigRational::new(BigInt::from(if k % 2 == 1 { 1 } else { -1 }), BigInt::from(k));
            acc = acc.add(&power.scale(&c));
            power = power.mul(&h);
            if power.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// Largest absolute numerator or denominator, for reporting sizes.
    pub fn height(&self) -> BigInt {
        self.rows
            .iter()
            .flatten()
            .map(|c| c.numer().abs().max(c.denom().clone()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// `(x, -1; q)_n = (x - 1)(x - q)...(x - q^{n-1})`.
pub fn pochhammer_minus_one(n: usize, shape: Shape) -> BivarSeries {
    (0..n).fold(BivarSeries::one(shape), |acc, i| acc.mul_by_x_minus_qpow(i as i64))
}

/// `a_n = (nabla_q^n f)|_{x=1}` for `n < count`; `a_n` has order
/// `min(mq, mx) - n`.
pub fn qtaylor_expand(f: &BivarSeries, count: usize) -> Result<Vec<QSeries>> {
    let mut out = Vec::with_capacity(count);
    let mut g = f.clone();
    for n in 0..count {
        if g.shape.rows() == 0 {
            break;
        }
        out.push(g.at_x1());
        if n + 1 < count {
            g = g.nabla_q()?;
        }
    }
    Ok(out)
}

/// `sum_n a_n (x, -1; q)_n / [n]_q!` at the given shape.
pub fn qtaylor_reconstruct(coeffs: &[QSeries], shape: Shape) -> BivarSeries {
    let mut poch = BivarSeries::one(shape);
    let mut fact = QSeries::one(shape.mq);
    let mut acc = BivarSeries::zero(shape);
    for (n, a) in coeffs.iter().enumerate() {
        if n >= shape.mx {
            break;
        }
        if n > 0 {
            poch = poch.mul_by_x_minus_qpow(n as i64 - 1);
            fact = fact.mul(&QSeries::q_int(n as u64, shape.mq));
        }
        let padded = QSeries::new(a.coeffs().to_vec(), shape.mq);
        let c = padded.mul(&fact.inv().expect("[n]_q! is a unit over Q"));
        acc = acc.add(&poch.mul_qseries(&c));
    }
    acc
}
