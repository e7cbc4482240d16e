//! Points of type I and II on the Berkovich projective line, the hyperbolic
//! metric, intervals and finite subtrees.
//!
//! A finite point `ζ(c, q)` is the closed disk of center `c` and radius
//! `p^(-q)`; `q` is its log-radius and `q = +∞` gives the type I point `c`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ext_field::{ExtElem, FieldSpec, Val};
use crate::rational::{self, format_rational, parse_rational, Rational};

#[derive(Debug, Clone)]
pub enum BerkPoint {
    Finite { center: ExtElem, q: Val },
    Infinity,
}

impl BerkPoint {
    pub fn zeta(center: ExtElem, q: Rational) -> Self {
        BerkPoint::Finite { center, q: Val::Finite(q) }
    }

    pub fn type_one(center: ExtElem) -> Self {
        BerkPoint::Finite { center, q: Val::Infinite }
    }

    pub fn gauss(field: FieldSpec) -> Self {
        Self::zeta(ExtElem::zero(field), Rational::zero())
    }

    /// `ζ(n, q)` for an integer center.
    pub fn at_int(field: FieldSpec, center: i64, q: Rational) -> Self {
        Self::zeta(ExtElem::from_int(field, center), q)
    }

    pub fn center(&self) -> Result<&ExtElem> {
        match self {
            BerkPoint::Finite { center, .. } => Ok(center),
            BerkPoint::Infinity => Err(Error::AtInfinity),
        }
    }

    pub fn logradius(&self) -> Result<&Val> {
        match self {
            BerkPoint::Finite { q, .. } => Ok(q),
            BerkPoint::Infinity => Err(Error::AtInfinity),
        }
    }

    /// Finite log-radius of a point of hyperbolic space.
    pub fn q(&self) -> Result<&Rational> {
        self.logradius()?.finite().ok_or(Error::TypeIPoint)
    }

    pub fn field(&self) -> Option<FieldSpec> {
        match self {
            BerkPoint::Finite { center, .. } => Some(center.field()),
            BerkPoint::Infinity => None,
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, BerkPoint::Finite { q: Val::Finite(_), .. })
    }

    pub fn is_gauss(&self) -> bool {
        self.field().is_some_and(|f| self.same_point(&Self::gauss(f)))
    }

    pub fn same_point(&self, other: &Self) -> bool {
        match (self, other) {
            (BerkPoint::Infinity, BerkPoint::Infinity) => true,
            (BerkPoint::Finite { center: c1, q: q1 }, BerkPoint::Finite { center: c2, q: q2 }) => {
                q1 == q2 && diff_val(c1, c2) >= *q1
            }
            _ => false,
        }
    }

    /// Whether the disk of `self` contains the disk of `other`.
    pub fn is_above(&self, other: &Self) -> bool {
        match (self, other) {
            (BerkPoint::Finite { center: c1, q: q1 }, BerkPoint::Finite { center: c2, q: q2 }) => {
                q1 <= q2 && diff_val(c1, c2) >= *q1
            }
            _ => false,
        }
    }

    /// The smallest disk containing both points.
    pub fn join(&self, other: &Self) -> Result<Self> {
        let (BerkPoint::Finite { center: c1, q: q1 }, BerkPoint::Finite { center: c2, q: q2 }) = (self, other) else {
            return Err(Error::AtInfinity);
        };
        let q = q1.clone().min(q2.clone()).min(diff_val(c1, c2));
        Ok(BerkPoint::Finite { center: c1.clone(), q })
    }

    /// Hyperbolic distance in units of `log p`.
    pub fn dist_h(&self, other: &Self) -> Result<Rational> {
        let (qx, qy) = (self.q()?, other.q()?);
        let j = self.join(other)?;
        let qj = j.q()?;
        Ok((qx - qj) + (qy - qj))
    }

    /// The same point with a reduced, reproducible choice of center.
    pub fn canonical(&self) -> Self {
        match self {
            BerkPoint::Finite { center, q: Val::Finite(q) } => {
                BerkPoint::Finite { center: canonical_center(center, q), q: Val::Finite(q.clone()) }
            }
            other => other.clone(),
        }
    }

    pub fn embed(&self, factor: u32) -> Self {
        match self {
            BerkPoint::Finite { center, q } => BerkPoint::Finite { center: center.embed(factor), q: q.clone() },
            BerkPoint::Infinity => BerkPoint::Infinity,
        }
    }

    /// JSON form: `{"center": [...], "logradius": "q"}` or `{"infinity": true}`.
    pub fn to_json(&self) -> Value {
        match self.canonical() {
            BerkPoint::Infinity => json!({ "infinity": true }),
            BerkPoint::Finite { center, q } => json!({
                "center": center.to_text(),
                "logradius": match q { Val::Finite(q) => format_rational(&q), Val::Infinite => "inf".into() },
            }),
        }
    }

    /// Parses the JSON form. A center may also be given as a single rational
    /// string.
    pub fn from_json(field: FieldSpec, v: &Value) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("point {v}: {msg}"));
        let obj = v.as_object().ok_or_else(|| bad("expected an object"))?;
        if obj.get("infinity").and_then(Value::as_bool) == Some(true) {
            return Ok(BerkPoint::Infinity);
        }
        let center = parse_elem(field, obj.get("center").ok_or_else(|| bad("missing center"))?)?;
        let q = match obj.get("logradius").ok_or_else(|| bad("missing logradius"))? {
            Value::String(s) if s == "inf" => Val::Infinite,
            Value::String(s) => Val::Finite(parse_rational(s)?),
            Value::Number(n) if n.is_i64() => Val::Finite(rational::int(n.as_i64().unwrap())),
            _ => return Err(bad("logradius must be a rational string or \"inf\"")),
        };
        Ok(BerkPoint::Finite { center, q })
    }
}

/// `v(c1 - c2)`, embedding both into a common field when their
/// ramification indices differ.
fn diff_val(c1: &ExtElem, c2: &ExtElem) -> Val {
    let (f1, f2) = (c1.field(), c2.field());
    if f1 == f2 {
        return (c1 - c2).val();
    }
    let l = num_integer::lcm(f1.e, f2.e);
    (&c1.embed(l / f1.e) - &c2.embed(l / f2.e)).val()
}

/// Parses an element given either as its array of `e` coefficient strings or
/// as a single rational string.
pub fn parse_elem(field: FieldSpec, v: &Value) -> Result<ExtElem> {
    match v {
        Value::String(s) => Ok(ExtElem::from_rational(field, parse_rational(s)?)),
        Value::Number(n) if n.is_i64() => Ok(ExtElem::from_int(field, n.as_i64().unwrap())),
        Value::Array(items) => {
            let text = items
                .iter()
                .map(|x| match x {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) if n.is_i64() => Ok(n.to_string()),
                    _ => Err(Error::Parse(format!("bad coefficient {x}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            ExtElem::from_text(field, &text)
        }
        _ => Err(Error::Parse(format!("bad field element {v}"))),
    }
}

/// Replaces each coefficient `c_i` by the representative of `c_i` modulo
/// `p^⌈q - i/e⌉` closest to zero; terms that vanish to that order drop.
fn canonical_center(c: &ExtElem, q: &Rational) -> ExtElem {
    let f = c.field();
    let p = BigInt::from(f.p);
    let e = Rational::from_integer(BigInt::from(f.e));
    let coeffs = c
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, ci)| {
            if ci.is_zero() {
                return Rational::zero();
            }
            let need = (q - Rational::from_integer(BigInt::from(i)) / &e).ceil().to_integer();
            let need: i64 = need.try_into().unwrap_or(i64::MAX);
            let v = rational::padic_val(ci, f.p);
            if v >= need {
                return Rational::zero();
            }
            let scale = pow_p(f.p, v);
            let unit = ci / &scale;
            let modulus = num_traits::pow(p.clone(), (need - v) as usize);
            let inv = mod_inverse(unit.denom(), &modulus);
            let mut r = (unit.numer() * inv).mod_floor(&modulus);
            if &r * 2 > modulus {
                r -= &modulus;
            }
            Rational::from_integer(r) * scale
        })
        .collect();
    ExtElem::from_coeffs(f, coeffs).expect("same length")
}

fn pow_p(p: u64, k: i64) -> Rational {
    let pr = rational::int(p as i64);
    if k >= 0 {
        rational::pow(&pr, k as u32)
    } else {
        Rational::one() / rational::pow(&pr, (-k) as u32)
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    debug_assert!(g.gcd.abs().is_one());
    g.x.mod_floor(m)
}

impl PartialEq for BerkPoint {
    fn eq(&self, other: &Self) -> bool {
        self.same_point(other)
    }
}

impl fmt::Display for BerkPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.canonical() {
            BerkPoint::Infinity => write!(f, "inf"),
            BerkPoint::Finite { center, q } => write!(f, "ζ({center}, {q})"),
        }
    }
}

/// The path `[a, b]` between two points of hyperbolic space.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub a: BerkPoint,
    pub b: BerkPoint,
}

impl Interval {
    pub fn new(a: BerkPoint, b: BerkPoint) -> Result<Self> {
        a.q()?;
        b.q()?;
        Ok(Self { a, b })
    }

    pub fn length(&self) -> Rational {
        self.a.dist_h(&self.b).expect("hyperbolic endpoints")
    }

    pub fn join_point(&self) -> BerkPoint {
        self.a.join(&self.b).expect("finite endpoints")
    }

    /// Whether one endpoint lies above the other.
    pub fn is_nested(&self) -> bool {
        self.a.is_above(&self.b) || self.b.is_above(&self.a)
    }

    pub fn is_degenerate(&self) -> bool {
        self.a.same_point(&self.b)
    }

    pub fn reversed(&self) -> Self {
        Self { a: self.b.clone(), b: self.a.clone() }
    }

    /// Whether `x` lies on the path.
    pub fn contains(&self, x: &BerkPoint) -> bool {
        match (self.a.dist_h(x), x.dist_h(&self.b)) {
            (Ok(d1), Ok(d2)) => d1 + d2 == self.length(),
            _ => false,
        }
    }

    /// Whether `other` is a sub-path.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.contains(&other.a) && self.contains(&other.b)
    }

    /// The point of log-radius `t` on a nested interval.
    pub fn point_at(&self, t: &Rational) -> Result<BerkPoint> {
        let (lo, hi) = self.ordered()?;
        let (ql, qh) = (lo.q()?, hi.q()?);
        if t < qh || t > ql {
            return Err(Error::CutOffPath(format_rational(t)));
        }
        Ok(BerkPoint::zeta(lo.center()?.clone(), t.clone()))
    }

    /// Endpoints as (deeper, higher) for a nested interval.
    fn ordered(&self) -> Result<(&BerkPoint, &BerkPoint)> {
        if self.b.is_above(&self.a) {
            Ok((&self.a, &self.b))
        } else if self.a.is_above(&self.b) {
            Ok((&self.b, &self.a))
        } else {
            Err(Error::NotOnRay)
        }
    }

    /// Splits a nested interval at the given log-radii, keeping the
    /// direction from `a` to `b`.
    pub fn subdivide(&self, cuts: &[Rational]) -> Result<Vec<Interval>> {
        if cuts.is_empty() {
            return Ok(vec![self.clone()]);
        }
        let (qa, qb) = (self.a.q()?.clone(), self.b.q()?.clone());
        let (lo, hi) = if qa < qb { (&qa, &qb) } else { (&qb, &qa) };
        let mut cuts = cuts.to_vec();
        for c in &cuts {
            if c <= lo || c >= hi {
                return Err(Error::CutOffPath(format_rational(c)));
            }
        }
        self.ordered()?;
        cuts.sort();
        cuts.dedup();
        if qa > qb {
            cuts.reverse();
        }
        let mut pts = vec![self.a.clone()];
        for c in &cuts {
            pts.push(self.point_at(c)?);
        }
        pts.push(self.b.clone());
        Ok(pts.windows(2).map(|w| Interval { a: w[0].clone(), b: w[1].clone() }).collect())
    }

    /// `[a, join] ∪ [join, b]`, dropping degenerate halves.
    pub fn split_at_join(&self) -> Vec<Interval> {
        let j = self.join_point();
        [Interval { a: self.a.clone(), b: j.clone() }, Interval { a: j, b: self.b.clone() }]
            .into_iter()
            .filter(|i| !i.is_degenerate())
            .collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// A finite subtree given by its join-closed vertex set; every edge joins a
/// vertex to the lowest vertex above it.
#[derive(Debug, Clone)]
pub struct FiniteTree {
    pub vertices: Vec<BerkPoint>,
    pub edges: Vec<(usize, usize)>,
}

impl FiniteTree {
    pub fn edge_intervals(&self) -> Vec<Interval> {
        self.edges.iter().map(|&(u, v)| Interval { a: self.vertices[u].clone(), b: self.vertices[v].clone() }).collect()
    }

    pub fn contains(&self, x: &BerkPoint) -> bool {
        self.vertices.iter().any(|v| v.same_point(x)) || self.edge_intervals().iter().any(|e| e.contains(x))
    }

    pub fn find_vertex(&self, x: &BerkPoint) -> Option<usize> {
        self.vertices.iter().position(|v| v.same_point(x))
    }
}

/// The convex hull of finitely many points of hyperbolic space.
pub fn convex_hull(points: &[BerkPoint]) -> Result<FiniteTree> {
    let mut vertices: Vec<BerkPoint> = Vec::new();
    let add = |v: BerkPoint, vs: &mut Vec<BerkPoint>| {
        if !vs.iter().any(|w| w.same_point(&v)) {
            vs.push(v.canonical());
        }
    };
    for x in points {
        x.q()?;
        add(x.clone(), &mut vertices);
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            add(points[i].join(&points[j])?, &mut vertices);
        }
    }
    // highest vertices first, so parents precede children
    vertices.sort_by(|a, b| a.q().unwrap().cmp(b.q().unwrap()));
    let mut edges = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        let parent = (0..i)
            .filter(|&j| vertices[j].is_above(v) && !vertices[j].same_point(v))
            .max_by(|&x, &y| vertices[x].q().unwrap().cmp(vertices[y].q().unwrap()));
        if let Some(j) = parent {
            edges.push((j, i));
        }
    }
    Ok(FiniteTree { vertices, edges })
}
