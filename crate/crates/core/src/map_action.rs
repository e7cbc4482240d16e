//! Rational maps over `K_e` acting on Berkovich points and segments.
//!
//! The image of a type II point is found by conjugating the source to the
//! Gauss point and refining a candidate target disk until the reduction of
//! the conjugated map is nonconstant; its degree is then the local degree.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::berk_points::{parse_elem, BerkPoint, FiniteTree, Interval};
use crate::error::{Error, Result};
use crate::ext_field::{ExtElem, FieldSpec, Val};
use crate::poly::ExtPoly;
use crate::rational::{self, Rational};
use crate::residue_dyn::{FpPoly, ResPoint, ResidueMap};
use crate::tropical::{self, PiecewiseAffine, TropPoly};

/// Reduction of a map: a residue map, or the constant it collapses to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    Map(ResidueMap),
    Constant(ResPoint),
}

/// `num / den` over `K_e`, coprime, scaled so that the smallest coefficient
/// valuation is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMap {
    num: ExtPoly,
    den: ExtPoly,
}

#[derive(Debug, Clone)]
pub struct MappedPoint {
    pub image: BerkPoint,
    pub local_degree: u32,
    /// Reduction of the map conjugated to the Gauss point at source and
    /// target (type II sources only).
    pub reduction: Option<ResidueMap>,
}

#[derive(Debug, Clone)]
pub struct SegmentPiece {
    pub source: Interval,
    pub image: Interval,
    pub expansion: u32,
    /// `+1` when source and image log-radii move the same way, `-1` when
    /// they move in opposite directions.
    pub orientation: i8,
}

#[derive(Debug, Clone, Default)]
pub struct SegmentImage {
    pub pieces: Vec<SegmentPiece>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreimageReport {
    pub valid: bool,
    pub degree_sum: u32,
    pub issues: Vec<String>,
}

fn normalize_pair(num: &ExtPoly, den: &ExtPoly) -> (ExtPoly, ExtPoly) {
    let f = num.field();
    let m = num.min_val().min(den.min_val());
    let Val::Finite(m) = m else { return (num.clone(), den.clone()) };
    let k = (m * Rational::from_integer(BigInt::from(f.e))).to_integer();
    let s = ExtElem::pi_pow(f, -i64::try_from(k).expect("valuation fits in i64"));
    (num.scale(&s), den.scale(&s))
}

fn reduce_poly(f: &ExtPoly) -> FpPoly {
    let p = f.field().p;
    FpPoly::new(p, f.coeffs().iter().map(|c| c.reduce().expect("integral after normalization")).collect())
}

/// Reduction of `num/den` after scaling to integral coefficients with a unit.
pub fn reduce_pair(num: &ExtPoly, den: &ExtPoly) -> Reduction {
    let (n, d) = normalize_pair(num, den);
    let p = num.field().p;
    let (nb, db) = (reduce_poly(&n), reduce_poly(&d));
    if db.is_zero() {
        return Reduction::Constant(ResPoint::Infinity);
    }
    if nb.is_zero() {
        return Reduction::Constant(ResPoint::rational(p, 0));
    }
    match ResidueMap::new(nb.clone(), db.clone()) {
        Ok(m) => Reduction::Map(m),
        Err(_) => {
            let g = nb.gcd(&db);
            let a = nb.exact_div(&g).lead();
            let b = db.exact_div(&g).lead();
            Reduction::Constant(ResPoint::rational(p, a * crate::residue_dyn::fp::inv_mod(b, p) % p))
        }
    }
}

/// `w ↦ 1/w` on points; `field` supplies the coordinate field for the
/// image of `∞`.
pub fn invert_point(field: FieldSpec, x: &BerkPoint) -> BerkPoint {
    match x {
        BerkPoint::Infinity => BerkPoint::type_one(ExtElem::zero(field)),
        BerkPoint::Finite { center, q: Val::Infinite } => {
            if center.is_zero() {
                BerkPoint::Infinity
            } else {
                BerkPoint::type_one(center.inv().expect("nonzero"))
            }
        }
        BerkPoint::Finite { center, q: Val::Finite(q) } => match center.val() {
            Val::Finite(vd) if &vd < q => {
                BerkPoint::zeta(center.inv().expect("nonzero"), q - vd * Rational::from_integer(BigInt::from(2)))
            }
            _ => BerkPoint::zeta(ExtElem::zero(center.field()), -q.clone()),
        },
    }
}

impl RationalMap {
    pub fn new(num: ExtPoly, den: ExtPoly) -> Result<Self> {
        if num.field() != den.field() {
            return Err(Error::FieldMismatch("numerator and denominator".into()));
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.degree().unwrap_or(0) == 0 && den.degree() == Some(0) {
            return Err(Error::ConstantMap);
        }
        if num.is_zero() {
            return Err(Error::ConstantMap);
        }
        if num.gcd(&den)?.degree() != Some(0) {
            return Err(Error::NotCoprime);
        }
        let (num, den) = normalize_pair(&num, &den);
        Ok(Self { num, den })
    }

    /// `(a z^6 + 1) / (a z^6 + z (z - 1)(z - b))`.
    pub fn sextic(a: &ExtElem, b: &ExtElem) -> Result<Self> {
        let f = a.field();
        let one = ExtElem::one(f);
        let zero = ExtElem::zero(f);
        let mut num = vec![zero.clone(); 7];
        num[0] = one.clone();
        num[6] = a.clone();
        let mut den = vec![zero; 7];
        den[1] = b.clone();
        den[2] = -(&one + b);
        den[3] = one;
        den[6] = a.clone();
        Self::new(ExtPoly::new(f, num), ExtPoly::new(f, den))
    }

    pub fn field(&self) -> FieldSpec {
        self.num.field()
    }

    pub fn num(&self) -> &ExtPoly {
        &self.num
    }

    pub fn den(&self) -> &ExtPoly {
        &self.den
    }

    pub fn degree(&self) -> u32 {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0)) as u32
    }

    pub fn embed(&self, factor: u32) -> Self {
        if factor == 1 {
            return self.clone();
        }
        Self { num: self.num.embed(factor), den: self.den.embed(factor) }
    }

    /// Value at a type I point; `None` stands for `∞`.
    pub fn eval(&self, z: &ExtElem) -> Option<ExtElem> {
        let d = self.den.eval(z);
        (!d.is_zero()).then(|| self.num.eval(z).div(&d).expect("nonzero"))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &RationalMap) -> Result<RationalMap> {
        let d = self.degree();
        let homog = |f: &ExtPoly| {
            f.coeffs().iter().enumerate().fold(ExtPoly::zero(self.field()), |acc, (i, a)| {
                acc.add(&inner.num.pow(i as u32).mul(&inner.den.pow(d - i as u32)).scale(a))
            })
        };
        RationalMap::new(homog(&self.num), homog(&self.den))
    }

    pub fn reduction(&self) -> Reduction {
        reduce_pair(&self.num, &self.den)
    }

    /// `z ↦ φ(1/z)`.
    fn source_inverted(&self) -> Self {
        let d = self.degree() as usize;
        Self { num: self.num.reversed(d), den: self.den.reversed(d) }
    }

    /// The map and point moved into a common field.
    fn aligned(&self, x: &BerkPoint) -> (RationalMap, BerkPoint) {
        let fe = self.field().e;
        match x.field() {
            Some(xf) if xf.e != fe => {
                let l = num_integer::lcm(fe, xf.e);
                (self.embed(l / fe), x.embed(l / xf.e))
            }
            _ => (self.clone(), x.clone()),
        }
    }

    pub fn image_point(&self, x: &BerkPoint) -> Result<MappedPoint> {
        let (phi, x) = self.aligned(x);
        phi.image_point_same_field(&x)
    }

    fn image_point_same_field(&self, x: &BerkPoint) -> Result<MappedPoint> {
        let f = self.field();
        match x {
            BerkPoint::Infinity => {
                self.source_inverted().image_point_same_field(&BerkPoint::type_one(ExtElem::zero(f)))
            }
            BerkPoint::Finite { center, q: Val::Infinite } => {
                let nc = self.num.taylor_shift(center);
                let dc = self.den.taylor_shift(center);
                let d0 = dc.coeff(0);
                if d0.is_zero() {
                    let k = dc.order_at_zero().expect("coprime");
                    return Ok(MappedPoint { image: BerkPoint::Infinity, local_degree: k as u32, reduction: None });
                }
                let val = nc.coeff(0).div(&d0)?;
                let k = nc.sub(&dc.scale(&val)).order_at_zero().ok_or(Error::ConstantMap)?;
                Ok(MappedPoint { image: BerkPoint::type_one(val), local_degree: k as u32, reduction: None })
            }
            BerkPoint::Finite { center, q: Val::Finite(q) } => {
                if !f.in_value_group(q) {
                    return Err(Error::RamificationNeeded(f.ramification_for(q)));
                }
                let k = (q * Rational::from_integer(BigInt::from(f.e))).to_integer();
                let lambda = ExtElem::pi_pow(f, i64::try_from(k).map_err(|_| Error::CenterNotRepresentable)?);
                let n1 = self.num.taylor_shift(center).scale_var(&lambda);
                let d1 = self.den.taylor_shift(center).scale_var(&lambda);
                let (image, deg, red) = gauss_image(&n1, &d1)?;
                Ok(MappedPoint { image: image.canonical(), local_degree: deg, reduction: Some(red) })
            }
        }
    }

    /// Image of `ζ(c, t)`, moving to a finer field when `t` requires it.
    fn image_at(&self, c: &ExtElem, t: &Rational) -> Result<MappedPoint> {
        let f = c.field();
        let x = if f.in_value_group(t) {
            BerkPoint::zeta(c.clone(), t.clone())
        } else {
            let factor = f.ramification_for(t) / f.e;
            BerkPoint::zeta(c.embed(factor), t.clone())
        };
        self.image_point(&x)
    }

    /// Valuation of the map along the ray `ζ(c, t)`, `t ∈ [t0, t1]`.
    pub fn ray_profile(&self, c: &ExtElem, t0: &Rational, t1: &Rational) -> Result<PiecewiseAffine> {
        let (phi, _) = self.aligned(&BerkPoint::type_one(c.clone()));
        let c = if c.field().e < phi.field().e { c.embed(phi.field().e / c.field().e) } else { c.clone() };
        tropical::ray_profile(&phi.num, &phi.den, &c, t0, t1)
    }

    pub fn image_segment(&self, iv: &Interval) -> Result<SegmentImage> {
        let mut pieces = Vec::new();
        for part in iv.split_at_join() {
            pieces.extend(self.nested_segment(&part)?);
        }
        Ok(SegmentImage { pieces })
    }

    /// Image of an interval with one endpoint above the other.
    fn nested_segment(&self, part: &Interval) -> Result<Vec<SegmentPiece>> {
        let (qa, qb) = (part.a.q()?.clone(), part.b.q()?.clone());
        let deep = if qa > qb { &part.a } else { &part.b };
        let (phi, deep) = self.aligned(deep);
        let c = deep.center()?.clone();
        let (lo, hi) = if qa < qb { (qa.clone(), qb.clone()) } else { (qb.clone(), qa.clone()) };
        let mut cuts = phi.ray_breakpoints(&c)?;
        cuts.retain(|t| t > &lo && t < &hi);
        let mut ends = vec![lo];
        ends.extend(cuts);
        ends.push(hi);
        let mut pieces = Vec::new();
        for w in ends.windows(2) {
            pieces.extend(phi.resolve_piece(&c, &w[0], &w[1], 0)?);
        }
        let mut merged: Vec<SegmentPiece> = Vec::new();
        for p in pieces {
            match merged.last_mut() {
                Some(last) if can_merge(last, &p) => {
                    last.source.b = p.source.b;
                    last.image.b = p.image.b;
                }
                _ => merged.push(p),
            }
        }
        // restore the direction of travel
        if qa > qb {
            merged.reverse();
            for p in &mut merged {
                p.source = p.source.reversed();
                p.image = p.image.reversed();
            }
        }
        Ok(merged)
    }

    /// Log-radii where the Newton polygons along the ray from `c` bend.
    fn ray_breakpoints(&self, c: &ExtElem) -> Result<Vec<Rational>> {
        let nc = self.num.taylor_shift(c);
        let dc = self.den.taylor_shift(c);
        let mut out = TropPoly::of(&nc)?.breakpoints();
        out.extend(TropPoly::of(&dc)?.breakpoints());
        if let Some(v) = self.eval(c) {
            let g = nc.sub(&dc.scale(&v));
            if !g.is_zero() {
                out.extend(TropPoly::of(&g)?.breakpoints());
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Checks that `t ↦ φ(ζ(c, t))` on `[s, e]` traces a geodesic at a
    /// constant rate, sampling the quarter points; bisects otherwise.
    fn resolve_piece(&self, c: &ExtElem, s: &Rational, e: &Rational, depth: u32) -> Result<Vec<SegmentPiece>> {
        let four = Rational::from_integer(BigInt::from(4));
        let h = (e - s) / &four;
        let ts: Vec<Rational> = (0..=4).map(|k| s + &h * Rational::from_integer(BigInt::from(k))).collect();
        let imgs = ts.iter().map(|t| self.image_at(c, t).map(|m| m.image)).collect::<Result<Vec<_>>>()?;
        let steps = imgs.windows(2).map(|w| w[0].dist_h(&w[1])).collect::<Result<Vec<_>>>()?;
        let total = imgs[0].dist_h(&imgs[4])?;
        let rate = &steps[0] / &h;
        let uniform = steps.iter().all(|d| d == &steps[0]) && total == &steps[0] * &four;
        if uniform && rate.is_integer() && rate.is_positive() {
            let m: u32 = rate.to_integer().try_into().map_err(|_| Error::CenterNotRepresentable)?;
            let image = Interval::new(imgs[0].clone(), imgs[4].clone())?;
            if !image.is_nested() {
                // split where the image passes through its join
                let j = image.join_point();
                let t_star = s + imgs[0].dist_h(&j)? / Rational::from_integer(BigInt::from(m));
                let mut out = self.resolve_piece(c, s, &t_star, depth + 1)?;
                out.extend(self.resolve_piece(c, &t_star, e, depth + 1)?);
                return Ok(out);
            }
            let dq = imgs[4].q()? - imgs[0].q()?;
            let source = Interval::new(point_on_ray(c, s), point_on_ray(c, e))?;
            return Ok(vec![SegmentPiece {
                source,
                image,
                expansion: m,
                orientation: if dq.is_negative() { -1 } else { 1 },
            }]);
        }
        if depth >= 6 {
            return Err(Error::SegmentUnresolved(point_on_ray(c, s).to_string(), point_on_ray(c, e).to_string()));
        }
        let mid = (s + e) / Rational::from_integer(BigInt::from(2));
        let mut out = self.resolve_piece(c, s, &mid, depth + 1)?;
        out.extend(self.resolve_piece(c, &mid, e, depth + 1)?);
        Ok(out)
    }

    /// Image of `I` under `φ^n`, provided every stage is a single piece.
    /// Returns the final image and the accumulated expansion.
    pub fn iterate_segment(&self, iv: &Interval, n: u32) -> Result<Option<(Interval, u32)>> {
        let mut cur = iv.clone();
        let mut expansion = 1;
        for _ in 0..n {
            let img = self.image_segment(&cur)?;
            let [piece] = img.pieces.as_slice() else { return Ok(None) };
            expansion *= piece.expansion;
            cur = piece.image.clone();
        }
        Ok(Some((cur, expansion)))
    }

    /// Checks a claimed complete list of preimages of `target` by degree
    /// accounting.
    pub fn verify_preimages(&self, target: &BerkPoint, claimed: &[(BerkPoint, u32)]) -> Result<PreimageReport> {
        let mut issues = Vec::new();
        for (i, (x, _)) in claimed.iter().enumerate() {
            if claimed[..i].iter().any(|(y, _)| y.same_point(x)) {
                issues.push(format!("{x} is listed twice"));
            }
        }
        let mut sum = 0;
        for (x, deg) in claimed {
            let m = self.image_point(x)?;
            if !m.image.same_point(target) {
                issues.push(format!("{x} maps to {}, not {target}", m.image));
            } else if m.local_degree != *deg {
                issues.push(format!("{x} has local degree {}, not {deg}", m.local_degree));
            }
            sum += deg;
        }
        if sum != self.degree() {
            issues.push(format!("degrees sum to {sum}, not {}", self.degree()));
        }
        Ok(PreimageReport { valid: issues.is_empty(), degree_sum: sum, issues })
    }

    /// Preimages of `x` lying on the edges of `tree`, found by inverting the
    /// affine pieces of each edge image.
    pub fn preimages_on_tree(&self, tree: &FiniteTree, x: &BerkPoint) -> Result<Vec<(BerkPoint, u32)>> {
        let mut found: Vec<(BerkPoint, u32)> = Vec::new();
        for edge in tree.edge_intervals() {
            for piece in self.image_segment(&edge)?.pieces {
                if !piece.image.contains(x) {
                    continue;
                }
                let step = piece.image.a.dist_h(x)? / Rational::from_integer(BigInt::from(piece.expansion));
                let (s, t) = (&piece.source.a, &piece.source.b);
                let qa = s.q()?;
                let q = if qa > t.q()? { qa - &step } else { qa + &step };
                let mut pt = piece.source.point_at(&q)?;
                let f = pt.field().expect("finite point");
                if !f.in_value_group(&q) {
                    pt = pt.embed(f.ramification_for(&q) / f.e);
                }
                let m = self.image_point(&pt)?;
                if m.image.same_point(x) && !found.iter().any(|(y, _)| y.same_point(&pt)) {
                    found.push((pt, m.local_degree));
                }
            }
        }
        Ok(found)
    }

    /// JSON descriptor: a sextic template or explicit coefficient lists.
    pub fn from_json(field: FieldSpec, v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("map must be an object".into()))?;
        if let Some(t) = obj.get("template") {
            if t.as_str() != Some("sextic") {
                return Err(Error::Parse(format!("unknown map template {t}")));
            }
            let get = |k: &str| obj.get(k).ok_or_else(|| Error::Parse(format!("sextic template needs \"{k}\"")));
            return Self::sextic(&parse_elem(field, get("a")?)?, &parse_elem(field, get("b")?)?);
        }
        let coeffs = |k: &str| -> Result<ExtPoly> {
            let arr = obj
                .get(k)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("map needs a \"{k}\" coefficient list")))?;
            Ok(ExtPoly::new(field, arr.iter().map(|c| parse_elem(field, c)).collect::<Result<_>>()?))
        };
        Self::new(coeffs("num")?, coeffs("den")?)
    }

    pub fn to_json(&self) -> Value {
        let list = |p: &ExtPoly| p.coeffs().iter().map(ExtElem::to_text).collect::<Vec<_>>();
        json!({ "num": list(&self.num), "den": list(&self.den) })
    }
}

fn can_merge(a: &SegmentPiece, b: &SegmentPiece) -> bool {
    a.expansion == b.expansion
        && a.orientation == b.orientation
        && a.image.b.same_point(&b.image.a)
        && Interval { a: a.image.a.clone(), b: b.image.b.clone() }.contains(&a.image.b)
}

fn point_on_ray(c: &ExtElem, t: &Rational) -> BerkPoint {
    BerkPoint::zeta(c.clone(), t.clone()).canonical()
}

/// Image of the Gauss point under `n/d`, its local degree and the conjugated
/// reduction.
fn gauss_image(n: &ExtPoly, d: &ExtPoly) -> Result<(BerkPoint, u32, ResidueMap)> {
    let f = n.field();
    if d.coeff(0).is_zero() {
        let (pt, deg, red) = gauss_image(d, n)?;
        return Ok((invert_point(f, &pt), deg, red));
    }
    let mut d0 = n.coeff(0).div(&d.coeff(0))?;
    let dv = d.min_val();
    let e = Rational::from_integer(BigInt::from(f.e));
    for _ in 0..100_000 {
        let g = n.sub(&d.scale(&d0));
        let (Val::Finite(gv), Val::Finite(dv)) = (g.min_val(), dv.clone()) else {
            return Err(Error::ConstantMap);
        };
        let q = gv - dv;
        let k = i64::try_from((&q * &e).to_integer()).map_err(|_| Error::CenterNotRepresentable)?;
        let shifted = d.scale(&ExtElem::pi_pow(f, k));
        match reduce_pair(&g, &shifted) {
            Reduction::Map(r) => {
                let deg = r.degree() as u32;
                return Ok((BerkPoint::zeta(d0, q), deg, r));
            }
            Reduction::Constant(gamma) => {
                let lift = gamma.as_rational().filter(|&x| x != 0).ok_or(Error::CenterNotRepresentable)?;
                d0 = &d0 + &ExtElem::pi_pow(f, k).scale(&rational::int(lift as i64));
            }
        }
    }
    Err(Error::CenterNotRepresentable)
}

impl SegmentImage {
    /// Total expansion check: image length equals `m` times source length on
    /// every piece.
    pub fn is_consistent(&self) -> bool {
        self.pieces.iter().all(|p| {
            p.image.length() == p.source.length() * Rational::from_integer(BigInt::from(p.expansion))
                && !p.source.length().is_zero()
        })
    }
}
