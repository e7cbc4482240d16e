//! Polynomials and rational functions in one variable over `Q`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, Rational};

/// Coefficients in ascending order with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QPoly {
    c: Vec<Rational>,
}

impl QPoly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Self { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
    }

    pub fn zero() -> Self {
        Self { c: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(a: Rational) -> Self {
        Self::new(vec![a])
    }

    /// `a z^k`.
    pub fn monomial(a: Rational, k: usize) -> Self {
        let mut c = vec![Rational::zero(); k];
        c.push(a);
        Self::new(c)
    }

    pub fn z() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.c.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.c.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.c.iter().rev().fold(Rational::zero(), |acc, a| acc * x + a)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self { c: self.c.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Rational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, a: &Rational) -> Self {
        Self::new(self.c.iter().map(|x| x * a).collect())
    }

    /// `p(ρ z)`.
    pub fn scale_var(&self, rho: &Rational) -> Self {
        let mut pw = Rational::one();
        let mut c = Vec::with_capacity(self.c.len());
        for a in &self.c {
            c.push(a * &pw);
            pw *= rho;
        }
        Self::new(c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.c.iter().enumerate().skip(1).map(|(i, a)| a * Rational::from_integer(BigInt::from(i))).collect())
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv = Rational::one() / d.lead();
        let mut r = self.c.clone();
        let mut q = vec![Rational::zero(); self.c.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let t = r.last().unwrap() * &inv;
            for (j, b) in d.c.iter().enumerate() {
                r[k + j] -= &t * b;
            }
            q[k] = t;
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&(Rational::one() / self.lead()))
    }

    /// Monic greatest common divisor; zero only if both inputs are.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn squarefree(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        self.div_rem(&g).0
    }

    /// `z^n p(1/z)` with `n` the degree.
    pub fn reversed(&self) -> Self {
        Self::new(self.c.iter().rev().cloned().collect())
    }

    /// The integer polynomial with content 1 and positive leading
    /// coefficient that is a rational multiple of `self`.
    pub fn primitive(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let den = self.c.iter().fold(BigInt::one(), |l, a| l.lcm(a.denom()));
        let ints: Vec<BigInt> = self.c.iter().map(|a| (a * Rational::from_integer(den.clone())).to_integer()).collect();
        let mut g = ints.iter().fold(BigInt::zero(), |g, a| g.gcd(a));
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        ints.into_iter().map(|a| a / &g).collect()
    }

    pub fn from_bigints(c: &[BigInt]) -> Self {
        Self::new(c.iter().cloned().map(Rational::from_integer).collect())
    }

    /// Rational roots, found among `±(divisors of a_0)/(divisors of a_n)`
    /// after clearing denominators.
    pub fn rational_roots(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut p = self.clone();
        if p.is_zero() {
            return out;
        }
        while p.coeff(0).is_zero() && p.degree() > Some(0) {
            if !out.contains(&Rational::zero()) {
                out.push(Rational::zero());
            }
            p = Self::new(p.c[1..].to_vec());
        }
        let ints = p.primitive();
        if ints.len() < 2 {
            return out;
        }
        let nums = divisors(&ints[0]);
        let dens = divisors(ints.last().unwrap());
        for n in &nums {
            for d in &dens {
                for s in [1, -1] {
                    let x = Rational::new(n * BigInt::from(s), d.clone());
                    if !out.contains(&x) && p.eval(&x).is_zero() {
                        out.push(x);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// First `n` coefficients of the power series `self / den`.
    pub fn series_div(&self, den: &Self, n: usize) -> Vec<Rational> {
        let d0 = den.coeff(0);
        assert!(!d0.is_zero(), "series denominator vanishes at 0");
        let inv = Rational::one() / d0;
        let mut out: Vec<Rational> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = self.coeff(k);
            for j in 1..=k.min(den.c.len().saturating_sub(1)) {
                acc -= den.coeff(j) * &out[k - j];
            }
            out.push(acc * &inv);
        }
        out
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let e = &n / &d;
            if e != d {
                out.push(e);
            }
        }
        d += 1;
    }
    out
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let (neg, mag) = if a.is_negative() { (true, -a) } else { (false, a.clone()) };
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                (true, false) => {}
            }
            first = false;
            let unit = mag.is_one() && i > 0;
            let body = if unit { String::new() } else { format_rational(&mag) };
            match i {
                0 => write!(f, "{body}")?,
                1 => write!(f, "{body}z")?,
                _ => write!(f, "{body}z^{i}")?,
            }
        }
        Ok(())
    }
}

/// `num / den` in lowest terms with `den(0) = 1` (or `den` monic when it
/// vanishes at 0).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    pub num: QPoly,
    pub den: QPoly,
}

impl RatFn {
    pub fn new(num: QPoly, den: QPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (n, d) = (num.div_rem(&g).0, den.div_rem(&g).0);
        let s = if d.coeff(0).is_zero() { d.lead() } else { d.coeff(0) };
        let inv = Rational::one() / s;
        Self { num: n.scale(&inv), den: d.scale(&inv) }
    }

    pub fn poly(p: QPoly) -> Self {
        Self::new(p, QPoly::one())
    }

    pub fn zero() -> Self {
        Self { num: QPoly::zero(), den: QPoly::one() }
    }

    pub fn one() -> Self {
        Self::poly(QPoly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).sub(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        (!o.is_zero()).then(|| Self::new(self.num.mul(&o.den), self.den.mul(&o.num)))
    }

    /// Taylor coefficients at 0, up to (excluding) `z^n`.
    pub fn series(&self, n: usize) -> Vec<Rational> {
        self.num.series_div(&self.den, n)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == QPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn arithmetic() {
        let a = QPoly::from_ints(&[1, -1]);
        let b = QPoly::from_ints(&[1, 1]);
        assert_eq!(a.mul(&b), QPoly::from_ints(&[1, 0, -1]));
        let (q, r) = QPoly::from_ints(&[1, 0, -1]).div_rem(&a);
        assert_eq!((q, r), (b, QPoly::zero()));
        assert_eq!(QPoly::from_ints(&[-2, 0, 2]).gcd(&QPoly::from_ints(&[3, 3])), QPoly::from_ints(&[1, 1]));
        assert_eq!(QPoly::from_ints(&[1, -2, 1]).squarefree().monic(), QPoly::from_ints(&[-1, 1]));
        assert_eq!(QPoly::from_ints(&[1, 2, 3]).scale_var(&int(2)), QPoly::from_ints(&[1, 4, 12]));
        assert_eq!(QPoly::from_ints(&[6, 0, 1]).to_string(), "6 + z^2");
    }

    #[test]
    fn primitive_and_roots() {
        let p = QPoly::new(vec![ratio(1, 2), ratio(-3, 4)]);
        assert_eq!(p.primitive(), vec![BigInt::from(-2), BigInt::from(3)]);
        let c = QPoly::from_ints(&[-6, 11, -6, 1]);
        assert_eq!(c.rational_roots(), vec![int(1), int(2), int(3)]);
        assert!(QPoly::from_ints(&[6, -1, -4, 1]).rational_roots().is_empty());
        assert_eq!(QPoly::from_ints(&[0, 0, -1, 2]).rational_roots(), vec![int(0), ratio(1, 2)]);
    }

    #[test]
    fn rational_functions_canonicalize() {
        let f = RatFn::new(QPoly::from_ints(&[2, 2]), QPoly::from_ints(&[2, 0, -2]));
        assert_eq!(f.num, QPoly::from_ints(&[1]));
        assert_eq!(f.den, QPoly::from_ints(&[1, -1]));
        assert_eq!(f.series(4), vec![int(1); 4]);
        let g = f.sub(&RatFn::one());
        assert_eq!(g.num, QPoly::from_ints(&[0, 1]));
        assert!(f.div(&RatFn::zero()).is_none());
    }
}
