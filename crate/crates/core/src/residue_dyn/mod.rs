//! Rational maps over `F_p`: fibers with multiplicity, critical points,
//! postcritical orbits and the separability classification.
//!
//! Points of `P^1` over the algebraic closure are tracked up to Galois
//! conjugacy by their minimal polynomials.

pub mod fp;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
pub use fp::FpPoly;

/// A Galois orbit of points of `P^1(F̄_p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResPoint {
    /// Roots of a monic irreducible polynomial.
    Orbit(FpPoly),
    Infinity,
}

impl ResPoint {
    /// The rational point `a ∈ F_p`.
    pub fn rational(p: u64, a: u64) -> Self {
        ResPoint::Orbit(FpPoly::linear(p, a))
    }

    /// Number of conjugate points in the orbit.
    pub fn degree(&self) -> usize {
        match self {
            ResPoint::Orbit(g) => g.degree().unwrap_or(0),
            ResPoint::Infinity => 1,
        }
    }

    /// The element of `F_p` when the orbit is a single rational point.
    pub fn as_rational(&self) -> Option<u64> {
        match self {
            ResPoint::Orbit(g) if g.degree() == Some(1) => Some((g.p() - g.coeff(0)) % g.p()),
            _ => None,
        }
    }
}

impl fmt::Display for ResPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self, self.as_rational()) {
            (ResPoint::Infinity, _) => write!(f, "inf"),
            (_, Some(a)) => write!(f, "{a}"),
            (ResPoint::Orbit(g), None) => write!(f, "root of {g}"),
        }
    }
}

impl Serialize for ResPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueEntry {
    pub point: ResPoint,
    /// Multiplicity of each conjugate point.
    pub multiplicity: u32,
    /// Number of conjugate points.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ResiduePointSet {
    pub entries: Vec<ResidueEntry>,
}

impl ResiduePointSet {
    /// `Σ multiplicity × count`.
    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity as usize * e.count).sum()
    }

    /// Number of geometric points, ignoring multiplicity.
    pub fn point_count(&self) -> usize {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn all_simple(&self) -> bool {
        self.entries.iter().all(|e| e.multiplicity == 1)
    }

    pub fn contains(&self, pt: &ResPoint) -> bool {
        self.entries.iter().any(|e| &e.point == pt)
    }

    fn from_factors(factors: Vec<(FpPoly, u32)>) -> Self {
        let entries = factors
            .into_iter()
            .map(|(g, m)| ResidueEntry { count: g.degree().unwrap_or(0), point: ResPoint::Orbit(g), multiplicity: m })
            .collect();
        Self { entries }
    }

    fn push_infinity(&mut self, multiplicity: u32) {
        if multiplicity > 0 {
            self.entries.push(ResidueEntry { point: ResPoint::Infinity, multiplicity, count: 1 });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "r")]
pub enum SeparabilityClass {
    Separable,
    InseparableNotPure,
    PurelyInseparable(u32),
}

/// Forward orbits of the critical points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PostcriticalReport {
    pub avoids: bool,
    /// For each critical point, its forward orbit `ψ(c), ψ²(c), …` up to the
    /// first repetition.
    pub orbits: Vec<(ResPoint, Vec<ResPoint>)>,
}

/// `num / den` over `F_p` with no common factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueMap {
    num: FpPoly,
    den: FpPoly,
}

impl ResidueMap {
    /// Cancels common factors; fails when the quotient is constant.
    pub fn new(num: FpPoly, den: FpPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ConstantMap);
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_zero() { (num, den) } else { (num.exact_div(&g), den.exact_div(&g)) };
        if num.degree().unwrap_or(0) == 0 && den.degree() == Some(0) {
            return Err(Error::ConstantMap);
        }
        let s = fp::inv_mod(den.lead(), den.p());
        Ok(Self { num: num.scale(s), den: den.scale(s) })
    }

    pub fn p(&self) -> u64 {
        self.den.p()
    }

    pub fn num(&self) -> &FpPoly {
        &self.num
    }

    pub fn den(&self) -> &FpPoly {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    /// Value at a point of `P^1(F_p)`, with `None` standing for `∞`.
    pub fn eval(&self, x: Option<u64>) -> Option<u64> {
        let p = self.p();
        match x {
            None => self.value_at_infinity(),
            Some(x) => {
                let d = self.den.eval(x);
                (d != 0).then(|| self.num.eval(x) * fp::inv_mod(d, p) % p)
            }
        }
    }

    fn value_at_infinity(&self) -> Option<u64> {
        let dn = self.num.degree();
        let dd = self.den.degree();
        if dn > dd {
            None
        } else if dn < dd {
            Some(0)
        } else {
            Some(self.num.lead() * fp::inv_mod(self.den.lead(), self.p()) % self.p())
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &ResidueMap) -> ResidueMap {
        let d = self.degree() as u32;
        let p = self.p();
        let homog = |f: &FpPoly| {
            f.coeffs().iter().enumerate().fold(FpPoly::zero(p), |acc, (i, &a)| {
                acc.add(&inner.num.pow(i as u32).mul(&inner.den.pow(d - i as u32)).scale(a))
            })
        };
        ResidueMap::new(homog(&self.num), homog(&self.den)).expect("composition of nonconstant maps")
    }

    fn wronskian(&self) -> FpPoly {
        self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()))
    }

    /// The fiber over `t`, with multiplicities.
    pub fn preimages(&self, t: &ResPoint) -> ResiduePointSet {
        let d = self.degree();
        let p = self.p();
        match t {
            ResPoint::Infinity => {
                let mut set = if self.den.degree() == Some(0) {
                    ResiduePointSet::default()
                } else {
                    ResiduePointSet::from_factors(self.den.factor())
                };
                set.push_infinity(d.saturating_sub(self.den.degree().unwrap_or(0)) as u32);
                set
            }
            ResPoint::Orbit(g) => {
                let m = g.degree().unwrap_or(0);
                // homogenized g(N/D)·D^m
                let h = g.coeffs().iter().enumerate().fold(FpPoly::zero(p), |acc, (j, &gj)| {
                    acc.add(&self.num.pow(j as u32).mul(&self.den.pow((m - j) as u32)).scale(gj))
                });
                let deg_h = h.degree().unwrap_or(0);
                let mut set =
                    if deg_h == 0 { ResiduePointSet::default() } else { ResiduePointSet::from_factors(h.factor()) };
                set.push_infinity((d * m).saturating_sub(deg_h) as u32);
                set
            }
        }
    }

    /// Critical points: zeros of the Wronskian plus the ramification at `∞`
    /// read off from its degree deficit.
    pub fn critical_points(&self) -> Result<ResiduePointSet> {
        let w = self.wronskian();
        if w.is_zero() {
            return Err(Error::InseparableMap);
        }
        let deg_w = w.degree().unwrap_or(0);
        let mut set = if deg_w == 0 { ResiduePointSet::default() } else { ResiduePointSet::from_factors(w.factor()) };
        set.push_infinity((2 * self.degree() - 2 - deg_w) as u32);
        Ok(set)
    }

    /// Follows each critical point forward until its orbit repeats and
    /// reports whether any orbit meets `targets`.
    pub fn postcritical_avoids(&self, targets: &[ResPoint]) -> Result<PostcriticalReport> {
        let crit = self.critical_points()?;
        let mut avoids = true;
        let mut orbits = Vec::new();
        for entry in &crit.entries {
            let orbit = self.forward_orbit(&entry.point);
            if orbit.iter().any(|pt| targets.contains(pt)) {
                avoids = false;
            }
            orbits.push((entry.point.clone(), orbit));
        }
        Ok(PostcriticalReport { avoids, orbits })
    }

    /// `ψ(x), ψ²(x), …` until the first repeat, computed inside the residue
    /// field of `x`.
    pub fn forward_orbit(&self, start: &ResPoint) -> Vec<ResPoint> {
        let p = self.p();
        let (modulus, mut cur) = match start {
            ResPoint::Infinity => (FpPoly::x(p), None),
            ResPoint::Orbit(g) => (g.clone(), Some(FpPoly::x(p).rem(g))),
        };
        let mut seen: Vec<Option<FpPoly>> = Vec::new();
        loop {
            cur = self.eval_in(cur.as_ref(), &modulus);
            if seen.contains(&cur) {
                break;
            }
            seen.push(cur.clone());
        }
        seen.iter().map(|v| to_res_point(v.as_ref(), &modulus, p)).collect()
    }

    fn eval_in(&self, x: Option<&FpPoly>, m: &FpPoly) -> Option<FpPoly> {
        let p = self.p();
        match x {
            None => self.value_at_infinity().map(|a| FpPoly::constant(p, a)),
            Some(x) => {
                let d = self.den.eval_in(x, m);
                if d.is_zero() {
                    return None;
                }
                let inv = d.inv_mod(m).expect("nonzero element of a field");
                Some(self.num.eval_in(x, m).mul_mod(&inv, m))
            }
        }
    }

    pub fn separability_class(&self) -> SeparabilityClass {
        let mut cur = self.clone();
        let mut r = 0;
        while cur.wronskian().is_zero() {
            // N' = D' = 0 for coprime N, D, so both are polynomials in z^p
            cur = ResidueMap { num: cur.num.deflate(), den: cur.den.deflate() };
            r += 1;
        }
        match (r, cur.degree()) {
            (0, _) => SeparabilityClass::Separable,
            (r, 1) => SeparabilityClass::PurelyInseparable(r),
            _ => SeparabilityClass::InseparableNotPure,
        }
    }
}

impl fmt::Display for ResidueMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Minimal polynomial of an element of `F_p[x]/(m)` via its Frobenius
/// conjugates.
fn to_res_point(v: Option<&FpPoly>, m: &FpPoly, p: u64) -> ResPoint {
    let Some(beta) = v else { return ResPoint::Infinity };
    let mut conj = vec![beta.clone()];
    loop {
        let next = conj.last().unwrap().pow_mod(&p.into(), m);
        if next == conj[0] {
            break;
        }
        conj.push(next);
    }
    // ∏ (X − β_i) with coefficients in F_p[x]/(m)
    let mut prod: Vec<FpPoly> = vec![FpPoly::one(p)];
    for c in &conj {
        let mut next = vec![FpPoly::zero(p); prod.len() + 1];
        for (i, a) in prod.iter().enumerate() {
            next[i + 1] = next[i + 1].add(a);
            next[i] = next[i].sub(&a.mul_mod(c, m));
        }
        prod = next;
    }
    let coeffs = prod.iter().map(|a| a.coeff(0)).collect();
    ResPoint::Orbit(FpPoly::new(p, coeffs))
}
