//! Newton polygons in valuation coordinates.
//!
//! For `f = Σ f_i T^i`, `trop_eval(t) = min_i (v(f_i) + i·t)` is the
//! valuation of `f` at the point `ζ(0, t)` (log-radius `t`).

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext_field::{ExtElem, Val};
use crate::poly::ExtPoly;
use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropPoly {
    /// `(i, v(f_i))` for the nonzero coefficients, increasing in `i`.
    pub terms: Vec<(usize, Rational)>,
}

fn r(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl TropPoly {
    pub fn of(f: &ExtPoly) -> Result<Self> {
        let terms: Vec<_> = f
            .coeffs()
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match c.val() {
                Val::Finite(v) => Some((i, v)),
                Val::Infinite => None,
            })
            .collect();
        if terms.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(Self { terms })
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.terms.iter().map(|(i, v)| v + r(*i) * t).min().expect("nonempty")
    }

    fn minimizers(&self, t: &Rational) -> Vec<usize> {
        let m = self.eval(t);
        self.terms.iter().filter(|(i, v)| v + r(*i) * t == m).map(|(i, _)| *i).collect()
    }

    /// One-sided derivatives of `eval` at `t`: `(left, right)`.
    pub fn slopes(&self, t: &Rational) -> (usize, usize) {
        let mins = self.minimizers(t);
        (*mins.iter().max().unwrap(), *mins.iter().min().unwrap())
    }

    /// Points where at least two terms tie for the minimum.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        for (a, (ia, va)) in self.terms.iter().enumerate() {
            for (ib, vb) in &self.terms[a + 1..] {
                let t = (va - vb) / (r(*ib) - r(*ia));
                if self.minimizers(&t).len() >= 2 {
                    out.push(t);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Piece {
    #[serde(serialize_with = "ser_rational")]
    pub start: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub end: Rational,
    pub slope: i64,
    #[serde(serialize_with = "ser_rational")]
    pub intercept: Rational,
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

/// A continuous piecewise-affine function on a closed interval; adjacent
/// pieces share endpoints and have different slopes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PiecewiseAffine {
    pub pieces: Vec<Piece>,
}

impl PiecewiseAffine {
    pub fn eval(&self, t: &Rational) -> Option<Rational> {
        self.pieces
            .iter()
            .find(|p| &p.start <= t && t <= &p.end)
            .map(|p| Rational::from_integer(BigInt::from(p.slope)) * t + &p.intercept)
    }

    pub fn breakpoints(&self) -> Vec<Rational> {
        self.pieces.iter().skip(1).map(|p| p.start.clone()).collect()
    }
}

/// The valuation of `num/den` at `ζ(c, t)` for `t ∈ [t0, t1]`.
pub fn ray_profile(num: &ExtPoly, den: &ExtPoly, c: &ExtElem, t0: &Rational, t1: &Rational) -> Result<PiecewiseAffine> {
    if t0 > t1 {
        return Err(Error::CutOffPath(format!("[{}, {}]", format_rational(t0), format_rational(t1))));
    }
    let tn = TropPoly::of(&num.taylor_shift(c))?;
    let td = TropPoly::of(&den.taylor_shift(c))?;
    let mut cuts: Vec<Rational> =
        tn.breakpoints().into_iter().chain(td.breakpoints()).filter(|b| b > t0 && b < t1).collect();
    cuts.sort();
    cuts.dedup();
    let mut ends = vec![t0.clone()];
    ends.extend(cuts);
    ends.push(t1.clone());
    let value = |t: &Rational| tn.eval(t) - td.eval(t);
    let mut pieces: Vec<Piece> = Vec::new();
    for w in ends.windows(2) {
        let (s, e) = (&w[0], &w[1]);
        let slope = if s == e {
            tn.slopes(s).1 as i64 - td.slopes(s).1 as i64
        } else {
            let mid = (s + e) / Rational::from_integer(BigInt::from(2));
            tn.slopes(&mid).1 as i64 - td.slopes(&mid).1 as i64
        };
        let intercept = value(s) - Rational::from_integer(BigInt::from(slope)) * s;
        match pieces.last_mut() {
            Some(last) if last.slope == slope => last.end = e.clone(),
            _ => pieces.push(Piece { start: s.clone(), end: e.clone(), slope, intercept }),
        }
    }
    if pieces.is_empty() {
        let slope = tn.slopes(t0).1 as i64 - td.slopes(t0).1 as i64;
        let intercept = value(t0) - Rational::from_integer(BigInt::from(slope)) * t0;
        pieces.push(Piece { start: t0.clone(), end: t1.clone(), slope, intercept });
    }
    Ok(PiecewiseAffine { pieces })
}
