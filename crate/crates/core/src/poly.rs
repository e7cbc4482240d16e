//! Dense univariate polynomials with coefficients in `K_e`.

use crate::error::{Error, Result};
use crate::ext_field::{ExtElem, FieldSpec, Val};

/// Coefficients in ascending degree, with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtPoly {
    field: FieldSpec,
    coeffs: Vec<ExtElem>,
}

impl ExtPoly {
    pub fn new(field: FieldSpec, coeffs: Vec<ExtElem>) -> Self {
        let mut p = Self { field, coeffs };
        p.trim();
        p
    }

    pub fn zero(field: FieldSpec) -> Self {
        Self { field, coeffs: Vec::new() }
    }

    pub fn constant(c: ExtElem) -> Self {
        Self::new(c.field(), vec![c])
    }

    /// The monomial `z`.
    pub fn x(field: FieldSpec) -> Self {
        Self::new(field, vec![ExtElem::zero(field), ExtElem::one(field)])
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_ints(field: FieldSpec, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| ExtElem::from_int(field, c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(ExtElem::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coeffs(&self) -> &[ExtElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> ExtElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ExtElem::zero(self.field))
    }

    pub fn eval(&self, z: &ExtElem) -> ExtElem {
        self.coeffs.iter().rev().fold(ExtElem::zero(self.field), |acc, c| &(&acc * z) + c)
    }

    /// Minimum coefficient valuation (the Gauss norm in additive form).
    pub fn min_val(&self) -> Val {
        self.coeffs.iter().map(ExtElem::val).min().unwrap_or(Val::Infinite)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.field, (0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.field, (0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field);
        }
        let mut out = vec![ExtElem::zero(self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(self.field, out)
    }

    pub fn scale(&self, c: &ExtElem) -> Self {
        Self::new(self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(ExtElem::one(self.field));
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `f(c + T)` by repeated synthetic division.
    pub fn taylor_shift(&self, c: &ExtElem) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                a[j] = &a[j] + &(c * &a[j + 1]);
            }
        }
        Self::new(self.field, a)
    }

    /// `f(λ·T)`.
    pub fn scale_var(&self, lambda: &ExtElem) -> Self {
        let mut power = ExtElem::one(self.field);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &power);
            power = &power * lambda;
        }
        Self::new(self.field, out)
    }

    /// `T^n f(1/T)` for a formal degree `n ≥ deg f`.
    pub fn reversed(&self, n: usize) -> Self {
        let mut out = vec![ExtElem::zero(self.field); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[n - i] = c.clone();
        }
        Self::new(self.field, out)
    }

    /// Order of vanishing at `T = 0`.
    pub fn order_at_zero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = divisor.coeffs[dd].inv()?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![ExtElem::zero(self.field); self.coeffs.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let factor = &rem[top] * &lead_inv;
            if !factor.is_zero() {
                for (k, dc) in divisor.coeffs.iter().enumerate() {
                    let idx = top - dd + k;
                    rem[idx] = &rem[idx] - &(&factor * dc);
                }
            }
            quot[top - dd] = factor;
            rem.pop();
        }
        Ok((Self::new(self.field, quot), Self::new(self.field, rem)))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        match a.degree() {
            None => Ok(a),
            Some(d) => {
                let inv = a.coeffs[d].inv()?;
                Ok(a.scale(&inv))
            }
        }
    }

    /// Re-indexes every coefficient into `K_{e·factor}`.
    pub fn embed(&self, factor: u32) -> Self {
        Self::new(self.field.refined(factor), self.coeffs.iter().map(|c| c.embed(factor)).collect())
    }
}
