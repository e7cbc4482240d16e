//! Exact arithmetic in the Eisenstein extension `K_e = Q[π]/(π^e - p)`.
//!
//! Elements are stored in the power basis `1, π, …, π^(e-1)` with unbounded
//! rational coefficients. The valuation is normalized so that `v(p) = 1`,
//! hence `v(π) = 1/e` and every nonzero element has valuation in `(1/e)·Z`.
//! Because the terms `c_i π^i` have pairwise distinct valuations modulo 1,
//! the valuation of a sum of such terms is the minimum over its terms.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{self, format_rational, padic_val, parse_rational, Rational};

/// Residue characteristic `p` and ramification index `e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
}

impl FieldSpec {
    pub fn new(p: u64, e: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Parse(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::Parse("ramification index must be positive".into()));
        }
        Ok(Self { p, e })
    }

    /// The field with ramification index `e * factor`, into which this one
    /// embeds.
    pub fn refined(&self, factor: u32) -> Self {
        Self { p: self.p, e: self.e * factor }
    }

    /// Whether `q` lies in the value group `(1/e)·Z`.
    pub fn in_value_group(&self, q: &Rational) -> bool {
        (q * Rational::from_integer(BigInt::from(self.e))).is_integer()
    }

    /// Smallest ramification index, a multiple of `e`, whose value group
    /// contains `q`.
    pub fn ramification_for(&self, q: &Rational) -> u32 {
        let den: u32 = q.denom().try_into().unwrap_or(u32::MAX);
        num_integer::lcm(self.e, den)
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// An additive valuation: a rational or `+∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Val {
    Finite(Rational),
    Infinite,
}

impl Val {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Val::Finite(q) => Some(q),
            Val::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Val::Infinite)
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(q) => write!(f, "{}", format_rational(q)),
            Val::Infinite => write!(f, "inf"),
        }
    }
}

/// An element `Σ c_i π^i` of `K_e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtElem {
    field: FieldSpec,
    coeffs: Vec<Rational>,
}

impl ExtElem {
    pub fn zero(field: FieldSpec) -> Self {
        Self { field, coeffs: vec![Rational::zero(); field.e as usize] }
    }

    pub fn one(field: FieldSpec) -> Self {
        Self::from_rational(field, Rational::one())
    }

    pub fn from_rational(field: FieldSpec, q: Rational) -> Self {
        let mut x = Self::zero(field);
        x.coeffs[0] = q;
        x
    }

    pub fn from_int(field: FieldSpec, n: i64) -> Self {
        Self::from_rational(field, rational::int(n))
    }

    /// Builds an element from exactly `e` power-basis coefficients.
    pub fn from_coeffs(field: FieldSpec, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != field.e as usize {
            return Err(Error::Parse(format!("expected {} coefficients, got {}", field.e, coeffs.len())));
        }
        Ok(Self { field, coeffs })
    }

    /// `π^k` for any integer `k`, using `π^e = p`.
    pub fn pi_pow(field: FieldSpec, k: i64) -> Self {
        let e = field.e as i64;
        let (q, r) = (k.div_euclid(e), k.rem_euclid(e));
        let p = Rational::from_integer(BigInt::from(field.p));
        let scale = if q >= 0 { rational::pow(&p, q as u32) } else { Rational::one() / rational::pow(&p, (-q) as u32) };
        let mut x = Self::zero(field);
        x.coeffs[r as usize] = scale;
        x
    }

    pub fn pi(field: FieldSpec) -> Self {
        Self::pi_pow(field, 1)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// `v(x) = min_i (v_p(c_i) + i/e)`, with `v(0) = +∞`.
    pub fn val(&self) -> Val {
        let e = self.field.e as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| Rational::new(BigInt::from(padic_val(c, self.field.p) * e + i as i64), BigInt::from(e)))
            .min()
            .map_or(Val::Infinite, Val::Finite)
    }

    /// Image in the residue field `F_p` of an element of valuation zero.
    pub fn reduce_unit(&self) -> Result<u64> {
        match self.val() {
            Val::Finite(v) if v.is_zero() => {
                Ok(rational::mod_p(&self.coeffs[0], self.field.p).expect("unit has p-integral constant term"))
            }
            v => Err(Error::NotAUnit(v.to_string())),
        }
    }

    /// Image in `F_p` of an element of nonnegative valuation (zero when the
    /// valuation is positive).
    pub fn reduce(&self) -> Result<u64> {
        match self.val() {
            Val::Infinite => Ok(0),
            Val::Finite(v) if v.is_positive() => Ok(0),
            Val::Finite(v) if v.is_zero() => self.reduce_unit(),
            v => Err(Error::NotAUnit(v.to_string())),
        }
    }

    /// Multiplicative inverse, found by solving `x · y = 1` in the power basis.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let e = self.field.e as usize;
        // column j of the multiplication-by-x matrix is x·π^j
        let mut cols = Vec::with_capacity(e);
        let mut power = self.clone();
        for _ in 0..e {
            cols.push(power.coeffs.clone());
            power = power.mul_pi();
        }
        let a = (0..e).map(|i| (0..e).map(|j| cols[j][i].clone()).collect()).collect();
        let mut rhs = vec![Rational::zero(); e];
        rhs[0] = Rational::one();
        let y = linalg::solve(a, rhs).ok_or(Error::DivisionByZero)?;
        Ok(Self { field: self.field, coeffs: y })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    fn mul_pi(&self) -> Self {
        let e = self.field.e as usize;
        let mut coeffs = vec![Rational::zero(); e];
        for i in 0..e - 1 {
            coeffs[i + 1] = self.coeffs[i].clone();
        }
        coeffs[0] = &self.coeffs[e - 1] * Rational::from_integer(BigInt::from(self.field.p));
        Self { field: self.field, coeffs }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.field);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self { field: self.field, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    /// Re-indexes coefficients into `K_{e·factor}` via `π_e = π_{e·factor}^factor`.
    pub fn embed(&self, factor: u32) -> Self {
        let field = self.field.refined(factor);
        let mut out = Self::zero(field);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[i * factor as usize] = c.clone();
        }
        out
    }

    /// Text form: one `"num/den"` string per power-basis coefficient.
    pub fn to_text(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }

    pub fn from_text(field: FieldSpec, text: &[String]) -> Result<Self> {
        let coeffs = text.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Self::from_coeffs(field, coeffs)
    }

    fn check_field(&self, other: &Self) {
        assert_eq!(self.field, other.field, "mixing elements of different fields");
    }
}

impl fmt::Display for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format_rational(c),
                1 => format!("{}·π", format_rational(c)),
                _ => format!("{}·π^{}", format_rational(c), i),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Add for &ExtElem {
    type Output = ExtElem;
    fn add(self, rhs: &ExtElem) -> ExtElem {
        self.check_field(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        ExtElem { field: self.field, coeffs }
    }
}

impl Sub for &ExtElem {
    type Output = ExtElem;
    fn sub(self, rhs: &ExtElem) -> ExtElem {
        self.check_field(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        ExtElem { field: self.field, coeffs }
    }
}

impl Mul for &ExtElem {
    type Output = ExtElem;
    fn mul(self, rhs: &ExtElem) -> ExtElem {
        self.check_field(rhs);
        let e = self.field.e as usize;
        let mut wide = vec![Rational::zero(); 2 * e];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    wide[i + j] += a * b;
                }
            }
        }
        let p = Rational::from_integer(BigInt::from(self.field.p));
        let (low, high) = wide.split_at_mut(e);
        for (l, h) in low.iter_mut().zip(high.iter()) {
            if !h.is_zero() {
                *l += h * &p;
            }
        }
        wide.truncate(e);
        ExtElem { field: self.field, coeffs: wide }
    }
}

impl Neg for &ExtElem {
    type Output = ExtElem;
    fn neg(self) -> ExtElem {
        ExtElem { field: self.field, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ExtElem {
            type Output = ExtElem;
            fn $m(self, rhs: ExtElem) -> ExtElem {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&ExtElem> for ExtElem {
            type Output = ExtElem;
            fn $m(self, rhs: &ExtElem) -> ExtElem {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ExtElem {
    type Output = ExtElem;
    fn neg(self) -> ExtElem {
        -&self
    }
}
