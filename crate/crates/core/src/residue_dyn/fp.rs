//! Polynomials over a prime field `F_p` and their factorization.
//!
//! Factorization runs squarefree decomposition, then distinct-degree
//! splitting, then Cantor-Zassenhaus equal-degree splitting driven by a
//! fixed-seed RNG so results are reproducible.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Polynomial over `F_p`, ascending coefficients, trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        let mut out = Self { p, c: coeffs.into_iter().map(|x| x % p).collect() };
        out.trim();
        out
    }

    /// From signed integer coefficients, reduced mod `p`.
    pub fn from_ints(p: u64, coeffs: &[i64]) -> Self {
        Self::new(p, coeffs.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
    }

    pub fn zero(p: u64) -> Self {
        Self { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::constant(p, 1)
    }

    pub fn constant(p: u64, a: u64) -> Self {
        Self::new(p, vec![a])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    /// `z - a`.
    pub fn linear(p: u64, a: u64) -> Self {
        Self::new(p, vec![(p - a % p) % p, 1])
    }

    fn trim(&mut self) {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        self.c.iter().rev().fold(0, |acc, &a| ((acc as u128 * x as u128 + a as u128) % p as u128) as u64)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(self.p, (0..n).map(|i| (self.coeff(i) + o.coeff(i)) % self.p).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(self.p, (0..n).map(|i| (self.coeff(i) + self.p - o.coeff(i)) % self.p).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p as u128;
        let mut out = vec![0u128; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % p;
            }
        }
        Self::new(self.p, out.into_iter().map(|x| x as u64).collect())
    }

    pub fn scale(&self, a: u64) -> Self {
        let p = self.p as u128;
        Self::new(self.p, self.c.iter().map(|&x| (x as u128 * a as u128 % p) as u64).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.p), |acc, _| acc.mul(self))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.lead(), self.p))
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(p, self.c.iter().enumerate().skip(1).map(|(i, &a)| (i as u64 % p) * a % p).collect())
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = inv_mod(d.lead(), self.p);
        let p = self.p;
        let mut rem = self.c.clone();
        let mut quot = vec![0u64; rem.len().saturating_sub(dd).max(1)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let f = rem[top] * inv % p;
            if f != 0 {
                for (k, &dc) in d.c.iter().enumerate() {
                    let idx = top - dd + k;
                    rem[idx] = (rem[idx] + p - f * dc % p) % p;
                }
            }
            quot[top - dd] = f;
            rem.pop();
        }
        (Self::new(p, quot), Self::new(p, rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn exact_div(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero());
        q
    }

    /// Monic gcd (zero when both inputs are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s·self + t·o = g`, `g` monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(p), Self::zero(p));
        let (mut t0, mut t1) = (Self::zero(p), Self::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = inv_mod(r0.lead(), p);
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    pub fn mul_mod(&self, o: &Self, m: &Self) -> Self {
        self.mul(o).rem(m)
    }

    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = Self::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul_mod(&acc, m);
            if e.bit(i) {
                acc = acc.mul_mod(&base, m);
            }
        }
        acc
    }

    /// Inverse modulo `m`, if it exists.
    pub fn inv_mod(&self, m: &Self) -> Option<Self> {
        let (g, s, _) = self.ext_gcd(m);
        g.is_one().then(|| s.rem(m))
    }

    /// Evaluates at an element of `F_p[x]/(m)`.
    pub fn eval_in(&self, x: &Self, m: &Self) -> Self {
        let p = self.p;
        self.c.iter().rev().fold(Self::zero(p), |acc, &a| acc.mul_mod(x, m).add(&Self::constant(p, a)))
    }

    /// Whether all exponents are multiples of `p`.
    pub fn is_p_power_form(&self) -> bool {
        self.c.iter().enumerate().all(|(i, &a)| a == 0 || i as u64 % self.p == 0)
    }

    /// Coefficient re-indexing `Σ a_{kp} z^{kp} ↦ Σ a_{kp} z^k`; over `F_p`
    /// this takes the p-th root of a polynomial in `z^p`.
    pub fn deflate(&self) -> Self {
        let p = self.p as usize;
        Self::new(self.p, self.c.iter().step_by(p).copied().collect())
    }

    /// `z ↦ z^p` substitution, the inverse of [`deflate`](Self::deflate).
    pub fn inflate(&self) -> Self {
        let p = self.p as usize;
        let mut out = vec![0; self.c.len().saturating_sub(1) * p + 1];
        for (i, &a) in self.c.iter().enumerate() {
            out[i * p] = a;
        }
        Self::new(self.p, out)
    }

    /// Monic irreducible factors with multiplicities, in a canonical order.
    pub fn factor(&self) -> Vec<(FpPoly, u32)> {
        assert!(!self.is_zero(), "factoring the zero polynomial");
        let mut out = Vec::new();
        for (sqf, mult) in squarefree_decomposition(&self.monic()) {
            for (block, d) in distinct_degree(&sqf) {
                for irr in equal_degree(&block, d) {
                    out.push((irr, mult));
                }
            }
        }
        out.sort_by(|a, b| canonical_cmp(&a.0, &b.0));
        out
    }

    /// Roots in `F_p` (without multiplicity).
    pub fn roots_in_base(&self) -> Vec<u64> {
        (0..self.p).filter(|&x| self.eval(x) == 0).collect()
    }
}

// degree first; linear factors by their root, the rest by coefficients
fn canonical_cmp(a: &FpPoly, b: &FpPoly) -> Ordering {
    let root = |f: &FpPoly| if f.c.len() == 2 { (f.p - f.c[0] * inv_mod(f.c[1], f.p) % f.p) % f.p } else { 0 };
    a.c.len().cmp(&b.c.len()).then_with(|| root(a).cmp(&root(b))).then_with(|| a.c.iter().rev().cmp(b.c.iter().rev()))
}

impl PartialOrd for FpPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FpPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        canonical_cmp(self, other)
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &a)| a != 0)
            .map(|(i, &a)| match (i, a) {
                (0, _) => a.to_string(),
                (1, 1) => "z".into(),
                (1, _) => format!("{a}z"),
                (_, 1) => format!("z^{i}"),
                _ => format!("{a}z^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Squarefree parts with multiplicities of a monic polynomial.
fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let p = f.p;
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let mut c = f.gcd(&f.derivative());
    let mut w = f.exact_div(&c);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.exact_div(&y);
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.exact_div(&w);
        i += 1;
    }
    if !c.is_one() {
        let root = c.deflate();
        for (g, m) in squarefree_decomposition(&root.monic()) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of
/// equal degree.
fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x(p);
    let mut frob = x.clone();
    let mut d = 1;
    while rest.degree().unwrap_or(0) >= 2 * d {
        frob = frob.pow_mod(&BigUint::from(p), &rest);
        let g = rest.gcd(&frob.sub(&x));
        if !g.is_one() {
            rest = rest.exact_div(&g);
            frob = frob.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    if let Some(deg) = rest.degree() {
        if deg > 0 {
            out.push((rest, deg));
        }
    }
    out
}

fn equal_degree(f: &FpPoly, d: usize) -> Vec<FpPoly> {
    let n = f.degree().unwrap_or(0);
    if n == d {
        return vec![f.clone()];
    }
    let p = f.p;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ (p << 8) ^ n as u64);
    loop {
        let a = FpPoly::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            // absolute trace a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul_mod(&t, f);
                acc = acc.add(&t);
            }
            acc
        } else {
            let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
            a.pow_mod(&e, f).sub(&FpPoly::one(p))
        };
        let g = f.gcd(&b);
        let gd = g.degree().unwrap_or(0);
        if gd > 0 && gd < n {
            let mut out = equal_degree(&g, d);
            out.extend(equal_degree(&f.exact_div(&g), d));
            return out;
        }
    }
}
