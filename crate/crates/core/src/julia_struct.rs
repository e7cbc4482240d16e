//! Certificates for connected Julia sets and infinite branching, the Markov
//! partition of the sextic family in residue characteristic 3, and the
//! cylinder-tree (dendrite) exporter.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::berk_points::{convex_hull, BerkPoint, FiniteTree, Interval};
use crate::error::{Error, Result};
use crate::ext_field::{ExtElem, FieldSpec, Val};
use crate::map_action::{RationalMap, Reduction};
use crate::rational::{self, Rational};
use crate::residue_dyn::{ResPoint, ResidueMap, SeparabilityClass};

#[derive(Debug, Clone)]
pub struct SubPiece {
    pub interval: Interval,
    pub b: u32,
    pub c: u32,
}

/// The data of a connected-Julia-set certificate: a finite tree `Γ`, a
/// marked interval `I ∋ x0`, a subdivision of `I` whose pieces return onto
/// `I` with expansion, the full preimage list of `x0`, and a covering of the
/// edges of `Γ` by iterated preimages of `I`.
#[derive(Debug, Clone)]
pub struct TheoremACertificate {
    pub tree_points: Vec<BerkPoint>,
    pub interval: Interval,
    pub x0: BerkPoint,
    pub subdivision: Vec<SubPiece>,
    pub preimages: Vec<(BerkPoint, u32)>,
    pub covering: Vec<(Interval, u32)>,
}

fn pair(field: FieldSpec, v: Option<&Value>, what: &str) -> Result<Interval> {
    let bad = || Error::MalformedCertificate(format!("{what} needs two endpoints"));
    let arr = v.and_then(Value::as_array).ok_or_else(bad)?;
    let [a, b] = arr.as_slice() else { return Err(bad()) };
    Interval::new(BerkPoint::from_json(field, a)?, BerkPoint::from_json(field, b)?)
}

fn uint(v: &Value, key: &str) -> Result<u32> {
    v.get(key)
        .and_then(Value::as_u64)
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| Error::MalformedCertificate(format!("missing nonnegative integer \"{key}\"")))
}

fn list<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    v.get(key).and_then(Value::as_array).ok_or_else(|| Error::MalformedCertificate(format!("missing list \"{key}\"")))
}

impl TheoremACertificate {
    pub fn from_json(field: FieldSpec, v: &Value) -> Result<Self> {
        let tree_points =
            list(v, "tree")?.iter().map(|p| BerkPoint::from_json(field, p)).collect::<Result<Vec<_>>>()?;
        let iv = v.get("interval").ok_or_else(|| Error::MalformedCertificate("missing \"interval\"".into()))?;
        let interval = pair(field, iv.get("endpoints"), "interval")?;
        let x0 = BerkPoint::from_json(
            field,
            iv.get("x0").ok_or_else(|| Error::MalformedCertificate("missing \"x0\"".into()))?,
        )?;
        let subdivision = list(v, "subdivision")?
            .iter()
            .map(|s| {
                Ok(SubPiece {
                    interval: pair(field, s.get("endpoints"), "subdivision piece")?,
                    b: uint(s, "b")?,
                    c: uint(s, "c")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let preimages = list(v, "preimages")?
            .iter()
            .map(|s| {
                let pt = s.get("point").ok_or_else(|| Error::MalformedCertificate("preimage without point".into()))?;
                Ok((BerkPoint::from_json(field, pt)?, uint(s, "degree")?))
            })
            .collect::<Result<Vec<_>>>()?;
        let covering = list(v, "covering")?
            .iter()
            .map(|s| Ok((pair(field, s.get("edge"), "covering edge")?, uint(s, "n")?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { tree_points, interval, x0, subdivision, preimages, covering })
    }

    pub fn to_json(&self) -> Value {
        let ends = |i: &Interval| json!([i.a.to_json(), i.b.to_json()]);
        json!({
            "tree": self.tree_points.iter().map(BerkPoint::to_json).collect::<Vec<_>>(),
            "interval": { "endpoints": ends(&self.interval), "x0": self.x0.to_json() },
            "subdivision": self.subdivision.iter().map(|s| json!({"endpoints": ends(&s.interval), "b": s.b, "c": s.c})).collect::<Vec<_>>(),
            "preimages": self.preimages.iter().map(|(p, d)| json!({"point": p.to_json(), "degree": d})).collect::<Vec<_>>(),
            "covering": self.covering.iter().map(|(e, n)| json!({"edge": ends(e), "n": n})).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn ok(detail: impl Into<String>) -> Self {
        Self { pass: true, detail: detail.into() }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Self { pass: false, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremAReport {
    /// Well-formedness: `x0 ∈ I ⊆ Γ` and the subdivision partitions `I`.
    pub structure: Check,
    pub a: Check,
    pub b: Check,
    pub c: Check,
    pub d: Check,
}

impl TheoremAReport {
    pub fn passed(&self) -> bool {
        [&self.structure, &self.a, &self.b, &self.c, &self.d].iter().all(|c| c.pass)
    }

    /// Names of the failed hypotheses.
    pub fn failures(&self) -> Vec<&'static str> {
        [("structure", &self.structure), ("a", &self.a), ("b", &self.b), ("c", &self.c), ("d", &self.d)]
            .into_iter()
            .filter(|(_, c)| !c.pass)
            .map(|(n, _)| n)
            .collect()
    }
}

const MAX_PERIOD: u32 = 12;

pub fn verify_theorem_a(phi: &RationalMap, cert: &TheoremACertificate) -> Result<TheoremAReport> {
    let tree = convex_hull(&cert.tree_points)?;
    Ok(TheoremAReport {
        structure: check_structure(&tree, cert),
        a: check_repelling(phi, &cert.x0)?,
        b: check_preimages(phi, &tree, cert)?,
        c: check_covering(phi, &tree, cert)?,
        d: check_subdivision(phi, cert)?,
    })
}

fn on_tree(tree: &FiniteTree, iv: &Interval) -> bool {
    // a path lies in a tree iff its endpoints do
    tree.contains(&iv.a) && tree.contains(&iv.b)
}

fn check_structure(tree: &FiniteTree, cert: &TheoremACertificate) -> Check {
    let i = &cert.interval;
    if !i.contains(&cert.x0) {
        return Check::fail(format!("x0 = {} does not lie on I = {i}", cert.x0));
    }
    if !on_tree(tree, i) {
        return Check::fail(format!("I = {i} is not contained in the tree"));
    }
    if let Err(msg) = partitions(i, cert.subdivision.iter().map(|s| &s.interval)) {
        return Check::fail(msg);
    }
    Check::ok(format!("x0 ∈ I ⊆ Γ; {} pieces partition I", cert.subdivision.len()))
}

/// Whether the pieces tile `i` end to end.
fn partitions<'a>(i: &Interval, pieces: impl Iterator<Item = &'a Interval>) -> std::result::Result<(), String> {
    let mut spans = Vec::new();
    for p in pieces {
        if !i.contains_interval(p) {
            return Err(format!("piece {p} is not inside I"));
        }
        let (da, db) = (i.a.dist_h(&p.a).unwrap(), i.a.dist_h(&p.b).unwrap());
        spans.push(if da <= db { (da, db) } else { (db, da) });
    }
    spans.sort();
    let mut reach = Rational::zero();
    for (s, e) in &spans {
        if s != &reach || e <= s {
            return Err("subdivision pieces overlap or leave gaps".into());
        }
        reach = e.clone();
    }
    if reach != i.length() {
        return Err("subdivision pieces do not reach the end of I".into());
    }
    Ok(())
}

/// Finds the exact period of `x` (up to a bound) and the local degree of
/// the corresponding iterate at `x`.
fn period_and_degree(phi: &RationalMap, x: &BerkPoint) -> Result<Option<(u32, u32)>> {
    let mut cur = x.clone();
    let mut deg = 1;
    for n in 1..=MAX_PERIOD {
        let m = phi.image_point(&cur)?;
        deg *= m.local_degree;
        cur = m.image;
        if cur.same_point(x) {
            return Ok(Some((n, deg)));
        }
    }
    Ok(None)
}

fn check_repelling(phi: &RationalMap, x0: &BerkPoint) -> Result<Check> {
    if !x0.is_hyperbolic() {
        return Ok(Check::fail(format!("x0 = {x0} is not of type II")));
    }
    Ok(match period_and_degree(phi, x0)? {
        Some((n, deg)) if deg >= 2 => Check::ok(format!("x0 has period {n} and φ^{n} has local degree {deg} there")),
        Some((n, deg)) => Check::fail(format!("x0 has period {n} but φ^{n} has local degree {deg}, not repelling")),
        None => Check::fail(format!("x0 = {x0} is not periodic with period ≤ {MAX_PERIOD}")),
    })
}

fn check_preimages(phi: &RationalMap, tree: &FiniteTree, cert: &TheoremACertificate) -> Result<Check> {
    let rep = phi.verify_preimages(&cert.x0, &cert.preimages)?;
    if !rep.valid {
        return Ok(Check::fail(rep.issues.join("; ")));
    }
    if let Some((x, _)) = cert.preimages.iter().find(|(x, _)| !tree.contains(x)) {
        return Ok(Check::fail(format!("preimage {x} is not on Γ")));
    }
    Ok(Check::ok(format!("{} preimages with degree sum {} all on Γ", cert.preimages.len(), rep.degree_sum)))
}

/// All image pieces of `φ^n` on an interval.
pub fn forward_images(phi: &RationalMap, iv: &Interval, n: u32) -> Result<Vec<Interval>> {
    let mut cur = vec![iv.clone()];
    for _ in 0..n {
        let mut next = Vec::new();
        for piece in &cur {
            next.extend(phi.image_segment(piece)?.pieces.into_iter().map(|p| p.image));
        }
        cur = next;
    }
    Ok(cur)
}

fn check_covering(phi: &RationalMap, tree: &FiniteTree, cert: &TheoremACertificate) -> Result<Check> {
    for (u, v) in &tree.edges {
        let (a, b) = (&tree.vertices[*u], &tree.vertices[*v]);
        let listed = cert
            .covering
            .iter()
            .any(|(e, _)| (e.a.same_point(a) && e.b.same_point(b)) || (e.a.same_point(b) && e.b.same_point(a)));
        if !listed {
            return Ok(Check::fail(format!("edge [{a}, {b}] of Γ has no covering claim")));
        }
    }
    for (edge, n) in &cert.covering {
        for img in forward_images(phi, edge, *n)? {
            if !cert.interval.contains_interval(&img) {
                return Ok(Check::fail(format!("φ^{n} maps {edge} onto {img}, which leaves I")));
            }
        }
    }
    Ok(Check::ok(format!("{} edges covered", tree.edges.len())))
}

fn check_subdivision(phi: &RationalMap, cert: &TheoremACertificate) -> Result<Check> {
    let i = &cert.interval;
    let mut notes = Vec::new();
    for s in &cert.subdivision {
        if s.c < 2 {
            return Ok(Check::fail(format!("declared expansion {} on {} is below 2", s.c, s.interval)));
        }
        let Some((img, m)) = phi.iterate_segment(&s.interval, s.b)? else {
            return Ok(Check::fail(format!("φ^{} does not map {} onto a single segment", s.b, s.interval)));
        };
        let onto =
            (img.a.same_point(&i.a) && img.b.same_point(&i.b)) || (img.a.same_point(&i.b) && img.b.same_point(&i.a));
        if !onto {
            return Ok(Check::fail(format!("φ^{} maps {} onto {img}, not I", s.b, s.interval)));
        }
        if m != s.c {
            return Ok(Check::fail(format!("φ^{} expands {} by {m}, certificate says {}", s.b, s.interval, s.c)));
        }
        notes.push(format!("{}: φ^{} onto I, ×{m}", s.interval, s.b));
    }
    Ok(Check::ok(notes.join("; ")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchingReport {
    pub holds: bool,
    pub class: SeparabilityClass,
    pub reduction: String,
}

/// Checks that `y` is periodic and that the reduction of the first return
/// map at `y` is not purely inseparable.
pub fn verify_infinite_branching(phi: &RationalMap, y: &BerkPoint, period: u32) -> Result<BranchingReport> {
    y.q()?;
    let mut cur = y.clone();
    let mut composed: Option<ResidueMap> = None;
    for _ in 0..period {
        let m = phi.image_point(&cur)?;
        let r = m.reduction.ok_or(Error::TypeIPoint)?;
        composed = Some(match composed {
            None => r,
            Some(prev) => r.compose(&prev),
        });
        cur = m.image;
    }
    if period == 0 || !cur.same_point(y) {
        return Err(Error::NotPeriodic);
    }
    let composed = composed.expect("period ≥ 1");
    let class = composed.separability_class();
    Ok(BranchingReport {
        holds: !matches!(class, SeparabilityClass::PurelyInseparable(_)),
        class,
        reduction: composed.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct State {
    pub name: String,
    pub image: Vec<String>,
    pub degree: u32,
    pub countable: bool,
}

/// `multiplicity · branch^k` states at each depth `k ≥ 1`, all entered from
/// `entry` in one step; a state of depth `k` maps bijectively (degree 1)
/// onto one state of depth `k - 1`, and depth-1 states onto `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailFamily {
    pub entry: String,
    pub target: String,
    pub branch: u32,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkovSystem {
    pub d: u32,
    pub states: Vec<State>,
    #[serde(default)]
    pub families: Vec<TailFamily>,
}

impl MarkovSystem {
    pub fn from_json(v: &Value) -> Result<Self> {
        let sys: MarkovSystem = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        sys.validate()?;
        Ok(sys)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.states.iter().position(|s| s.name == name).ok_or_else(|| Error::UnknownState(name.into()))
    }

    pub fn state(&self, name: &str) -> Result<&State> {
        Ok(&self.states[self.index(name)?])
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSystem(m));
        if self.d == 0 {
            return bad("degree must be positive".into());
        }
        let mut names = BTreeSet::new();
        for s in &self.states {
            if !names.insert(s.name.as_str()) {
                return bad(format!("duplicate state {}", s.name));
            }
        }
        for s in &self.states {
            if s.degree == 0 || s.degree > self.d {
                return bad(format!("state {} has degree {} outside [1, {}]", s.name, s.degree, self.d));
            }
            if let Some(t) = s.image.iter().find(|t| !names.contains(t.as_str())) {
                return bad(format!("state {} maps to unknown state {t}", s.name));
            }
        }
        for f in &self.families {
            for n in [&f.entry, &f.target] {
                if self.state(n)?.countable {
                    return bad(format!("family endpoint {n} is countable"));
                }
            }
            if f.branch == 0 || f.multiplicity == 0 {
                return bad("family branch and multiplicity must be positive".into());
            }
        }
        Ok(())
    }

    /// Indices of the uncountable core states, in declaration order.
    pub fn uncountable(&self) -> Vec<usize> {
        (0..self.states.len()).filter(|&i| !self.states[i].countable).collect()
    }

    /// Whether a state maps onto every uncountable state and enters every
    /// tail family, so that its image carries the whole measure.
    pub fn is_full(&self, i: usize) -> bool {
        let name = &self.states[i].name;
        self.uncountable().iter().all(|&j| self.states[i].image.contains(&self.states[j].name))
            && self.families.iter().all(|f| &f.entry == name)
    }

    /// Uncountable successors of a core state.
    pub fn core_successors(&self, i: usize) -> Vec<usize> {
        self.states[i]
            .image
            .iter()
            .map(|n| self.index(n).expect("validated"))
            .filter(|&j| !self.states[j].countable)
            .collect()
    }
}

/// Parameters `(a, b)` of a map of the form
/// `(a z^6 + 1) / (a z^6 + z (z - 1)(z - b))`.
pub fn sextic_parameters(phi: &RationalMap) -> Option<(ExtElem, ExtElem)> {
    let (n, d) = (phi.num(), phi.den());
    if n.degree() != Some(6) || d.degree() != Some(6) {
        return None;
    }
    let s = n.coeff(0).inv().ok()?;
    let n: Vec<ExtElem> = (0..=6).map(|i| &n.coeff(i) * &s).collect();
    let d: Vec<ExtElem> = (0..=6).map(|i| &d.coeff(i) * &s).collect();
    let a = n[6].clone();
    let b = d[1].clone();
    let one = ExtElem::one(phi.field());
    let shape = n[1..6].iter().all(ExtElem::is_zero)
        && d[0].is_zero()
        && d[4].is_zero()
        && d[5].is_zero()
        && d[6] == a
        && d[3].is_one()
        && d[2] == -(&one + &b);
    shape.then_some((a, b))
}

/// Number of points at each backward depth `1..=depth` over `target`, with
/// a flag telling whether every preimage encountered was simple.
pub fn backward_counts(psi: &ResidueMap, target: &ResPoint, depth: usize) -> (Vec<usize>, bool) {
    let mut level = vec![target.clone()];
    let mut counts = Vec::new();
    let mut simple = true;
    for _ in 0..depth {
        let mut next = Vec::new();
        for t in &level {
            let pre = psi.preimages(t);
            simple &= pre.all_simple();
            next.extend(pre.entries.into_iter().map(|e| e.point));
        }
        counts.push(next.iter().map(ResPoint::degree).sum());
        level = next;
    }
    (counts, simple)
}

pub const PARTITION_STATES: [&str; 9] = ["U_inf_1", "U_inf_2", "U_0p", "U_1p", "U_bbar", "V", "V_0", "V_1", "V_inf"];

/// The Markov partition of a sextic map with `p = 3`, `0 < v(a) ≤ 1`,
/// `v(b) = v(b - 1) = 0` and `1, b̄` not postcritical for the reduction.
pub fn build_partition(phi: &RationalMap) -> Result<MarkovSystem> {
    let viol = |m: &str| Err(Error::TemplateViolation(m.into()));
    let f = phi.field();
    if f.p != 3 {
        return viol("residue characteristic must be 3");
    }
    let Some((a, b)) = sextic_parameters(phi) else {
        return viol("map is not of the form (a z^6 + 1) / (a z^6 + z (z - 1)(z - b))");
    };
    let va = match a.val() {
        Val::Finite(v) if v.is_positive() && v <= rational::int(1) => v,
        _ => return viol("need |3| ≤ |a| < 1, i.e. 0 < v(a) ≤ 1"),
    };
    if b.val() != Val::Finite(Rational::zero()) || (&b - &ExtElem::one(f)).val() != Val::Finite(Rational::zero()) {
        return viol("need |b| = |b - 1| = 1");
    }
    let Reduction::Map(red) = phi.reduction() else { return viol("reduction is constant") };
    let b_bar = ResPoint::rational(3, b.reduce_unit()?);
    let one = ResPoint::rational(3, 1);
    let post = red.postcritical_avoids(&[one.clone(), b_bar.clone()])?;
    if !post.avoids {
        return viol("1 or b̄ is postcritical for the reduction");
    }
    for target in [&one, &b_bar] {
        let (counts, simple) = backward_counts(&red, target, 3);
        if !simple || counts != [3, 9, 27] {
            return Err(Error::TemplateViolation(format!("backward orbit counts over {target} are {counts:?}")));
        }
    }
    let [dv, dv0, dv1, dvinf] = check_singletons(phi, &va)?;

    let st = |name: &str, image: &[&str], degree: u32, countable: bool| State {
        name: name.into(),
        image: image.iter().map(|s| s.to_string()).collect(),
        degree,
        countable,
    };
    let to_infinity = ["U_inf_1", "U_inf_2"];
    let states = vec![
        st("U_inf_1", &PARTITION_STATES, 3, false),
        st("U_inf_2", &["U_0p"], 3, false),
        st("U_0p", &to_infinity, 1, false),
        st("U_1p", &to_infinity, 1, false),
        st("U_bbar", &["U_inf_1", "U_inf_2", "V_inf"], 1, false),
        st("V", &["V"], dv, true),
        st("V_0", &["V_inf"], dv0, true),
        st("V_1", &["V_inf"], dv1, true),
        st("V_inf", &["V_1"], dvinf, true),
    ];
    let beta = red.degree() as u32;
    let families = ["U_1p", "U_bbar"]
        .iter()
        .map(|t| TailFamily { entry: "U_inf_1".into(), target: t.to_string(), branch: beta, multiplicity: 1 })
        .collect();
    let sys = MarkovSystem { d: phi.degree(), states, families };
    sys.validate()?;
    Ok(sys)
}

/// Image of `ζ(c, q)`, refining the field when `q` requires it.
fn image_of(phi: &RationalMap, c: i64, q: &Rational) -> Result<(BerkPoint, u32)> {
    let f = phi.field();
    let x = BerkPoint::at_int(f, c, q.clone()).embed(f.ramification_for(q) / f.e);
    let m = phi.image_point(&x)?;
    Ok((m.image, m.local_degree))
}

/// Singleton transitions and the degrees along the two unbounded branches.
/// Returns the local degrees at `V`, `V_0`, `V_1`, `V_∞`.
fn check_singletons(phi: &RationalMap, va: &Rational) -> Result<[u32; 4]> {
    let f = phi.field();
    let q = |num: i64, den: i64| va * rational::ratio(num, den);
    let pt = |c: i64, q: Rational| BerkPoint::at_int(f, c, q);
    let (v0, v1, vinf) = (pt(0, q(1, 2)), pt(1, q(1, 2)), pt(0, q(-1, 2)));
    let singles = [
        image_of(phi, 0, &Rational::zero())?,
        image_of(phi, 0, &q(1, 2))?,
        image_of(phi, 1, &q(1, 2))?,
        image_of(phi, 0, &q(-1, 2))?,
    ];
    let checks = [
        ("y → V_0", image_of(phi, 0, &q(-1, 6))?, v0.clone(), 6),
        ("V → V", singles[0].clone(), BerkPoint::gauss(f), 3),
        ("V_0 → V_inf", singles[1].clone(), vinf.clone(), 0),
        ("V_1 → V_inf", singles[2].clone(), vinf, 0),
        ("V_inf → V_1", singles[3].clone(), v1, 0),
        ("U_inf_2 degree", image_of(phi, 0, &q(-1, 12))?, BerkPoint::Infinity, 3),
        ("U_inf_1 degree", image_of(phi, 0, &q(-1, 4))?, BerkPoint::Infinity, 3),
    ];
    for (what, (img, deg), want, want_deg) in checks {
        let img_ok = matches!(want, BerkPoint::Infinity) || img.same_point(&want);
        let deg_ok = want_deg == 0 || deg == want_deg;
        if !img_ok || !deg_ok {
            return Err(Error::TemplateViolation(format!("{what}: got {img} with degree {deg}")));
        }
    }
    Ok(singles.map(|(_, d)| d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DendriteNode {
    pub id: usize,
    pub label: String,
    pub depth: usize,
    pub kind: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dendrite {
    pub nodes: Vec<DendriteNode>,
    pub edges: Vec<(usize, usize)>,
}

/// A vertex of the symbolic graph: a core state or a family state
/// `(family, depth, index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sym {
    Core(usize),
    Fam(usize, u32, u64),
}

fn successors(sys: &MarkovSystem, s: Sym, max_depth: u32) -> Vec<Sym> {
    match s {
        Sym::Core(i) => {
            let mut out: Vec<Sym> = sys.core_successors(i).into_iter().map(Sym::Core).collect();
            for (fi, fam) in sys.families.iter().enumerate() {
                if sys.states[i].name == fam.entry {
                    for k in 1..=max_depth {
                        let n = fam.multiplicity as u64 * (fam.branch as u64).pow(k);
                        out.extend((0..n).map(|j| Sym::Fam(fi, k, j)));
                    }
                }
            }
            out
        }
        Sym::Fam(fi, 1, _) => vec![Sym::Core(sys.index(&sys.families[fi].target).expect("validated"))],
        Sym::Fam(fi, k, j) => vec![Sym::Fam(fi, k - 1, j / sys.families[fi].branch as u64)],
    }
}

fn label(sys: &MarkovSystem, s: Sym) -> (String, &'static str) {
    match s {
        Sym::Core(i) => (sys.states[i].name.clone(), "core"),
        Sym::Fam(fi, k, j) => (format!("{}^{k}[{j}]", sys.families[fi].target), "family"),
    }
}

/// The tree of admissible words `[U_0, …, U_n]` starting at the first
/// uncountable state, with family states up to depth `depth`.
pub fn emit_dendrite(sys: &MarkovSystem, depth: usize) -> Result<Dendrite> {
    let root = *sys.uncountable().first().ok_or_else(|| Error::InvalidSystem("no uncountable state".into()))?;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut stack = vec![(Sym::Core(root), 0usize, None::<usize>)];
    while let Some((s, d, parent)) = stack.pop() {
        let id = nodes.len();
        let (label, kind) = label(sys, s);
        nodes.push(DendriteNode { id, label, depth: d, kind });
        if let Some(p) = parent {
            edges.push((p, id));
        }
        if d < depth {
            let succ = successors(sys, s, depth as u32);
            stack.extend(succ.into_iter().rev().map(|t| (t, d + 1, Some(id))));
        }
    }
    Ok(Dendrite { nodes, edges })
}

impl Dendrite {
    pub fn to_json(&self) -> Value {
        json!({
            "nodes": self.nodes.iter().map(|n| json!({"id": n.id, "label": n.label, "depth": n.depth, "kind": n.kind})).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dendrite {\n");
        for n in &self.nodes {
            let shape = if n.kind == "core" { "ellipse" } else { "box" };
            let _ = writeln!(out, "  n{} [label=\"{}\", shape={shape}];", n.id, n.label.replace('"', "\\\""));
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  n{a} -> n{b};");
        }
        out.push_str("}\n");
        out
    }
}

/// Local degree of `φ^b` along a subdivision piece, read off the interior
/// midpoint.
pub fn piece_degree(phi: &RationalMap, piece: &Interval, b: u32) -> Result<u32> {
    let (qa, qb) = (piece.a.q()?, piece.b.q()?);
    let mid = (qa + qb) / Rational::from_integer(BigInt::from(2));
    let mut x = piece.point_at(&mid)?;
    let f = x.field().expect("finite point");
    x = x.embed(f.ramification_for(&mid) / f.e);
    let mut deg = 1;
    for _ in 0..b {
        let m = phi.image_point(&x)?;
        deg *= m.local_degree;
        x = m.image;
    }
    Ok(deg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ExtPoly;
    use crate::rational::ratio;

    fn f() -> FieldSpec {
        FieldSpec::new(3, 6).unwrap()
    }

    fn sextic_map() -> RationalMap {
        RationalMap::sextic(&ExtElem::from_int(f(), 3), &ExtElem::from_int(f(), -1)).unwrap()
    }

    fn z(c: i64, q: Rational) -> BerkPoint {
        BerkPoint::at_int(f(), c, q)
    }

    pub(crate) fn sextic_certificate() -> TheoremACertificate {
        let g = BerkPoint::gauss(f());
        let iv = |a: BerkPoint, b: BerkPoint| Interval::new(a, b).unwrap();
        let tips = [z(0, ratio(-1, 2)), z(0, ratio(1, 2)), z(1, ratio(1, 2)), z(-1, ratio(1, 2))];
        let i = iv(g.clone(), tips[0].clone());
        let pieces = i.subdivide(&[ratio(-1, 6), ratio(-1, 3)]).unwrap();
        TheoremACertificate {
            tree_points: tips.to_vec(),
            interval: i.clone(),
            x0: g.clone(),
            subdivision: pieces.into_iter().map(|p| SubPiece { interval: p, b: 2, c: 3 }).collect(),
            preimages: vec![(g.clone(), 3), (z(0, ratio(-1, 3)), 3)],
            covering: vec![
                (i, 0),
                (iv(g.clone(), tips[1].clone()), 1),
                (iv(g.clone(), tips[2].clone()), 1),
                (iv(g, tips[3].clone()), 1),
            ],
        }
    }

    #[test]
    fn sextic_certificate_verifies() {
        let rep = verify_theorem_a(&sextic_map(), &sextic_certificate()).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn tampered_certificates_fail() {
        let phi = sextic_map();
        let mut cert = sextic_certificate();
        cert.subdivision[0].c = 1;
        assert_eq!(verify_theorem_a(&phi, &cert).unwrap().failures(), vec!["d"]);

        let mut cert = sextic_certificate();
        cert.preimages.pop();
        assert_eq!(verify_theorem_a(&phi, &cert).unwrap().failures(), vec!["b"]);

        let mut cert = sextic_certificate();
        cert.covering.pop();
        assert_eq!(verify_theorem_a(&phi, &cert).unwrap().failures(), vec!["c"]);
    }

    #[test]
    fn certificate_json_round_trip() {
        let cert = sextic_certificate();
        let back = TheoremACertificate::from_json(f(), &cert.to_json()).unwrap();
        assert_eq!(back.to_json(), cert.to_json());
        assert!(matches!(
            TheoremACertificate::from_json(f(), &json!({"tree": []})),
            Err(Error::MalformedCertificate(_))
        ));
    }

    #[test]
    fn branching_examples() {
        let phi = sextic_map();
        let rep = verify_infinite_branching(&phi, &BerkPoint::gauss(f()), 1).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.class, SeparabilityClass::Separable);
        let cube = RationalMap::new(ExtPoly::from_ints(f(), &[0, 0, 0, 1]), ExtPoly::from_ints(f(), &[1])).unwrap();
        let rep = verify_infinite_branching(&cube, &BerkPoint::gauss(f()), 1).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.class, SeparabilityClass::PurelyInseparable(1));
        assert_eq!(verify_infinite_branching(&phi, &z(0, ratio(-1, 2)), 1).unwrap_err(), Error::NotPeriodic);
        // ζ(0,-1/2) -> ζ(1,1/2) -> ζ(0,-1/2) whose return reduces to a Frobenius twist
        let rep = verify_infinite_branching(&phi, &z(0, ratio(-1, 2)), 2).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.class, SeparabilityClass::PurelyInseparable(1));
    }

    #[test]
    fn partition_of_sextic_map() {
        let sys = build_partition(&sextic_map()).unwrap();
        assert_eq!(sys.uncountable().len(), 5);
        assert_eq!(sys.states.iter().filter(|s| s.countable).count(), 4);
        assert_eq!(sys.families.len(), 2);
        assert!(sys.families.iter().all(|f| f.branch == 3 && f.multiplicity == 1));
        assert!(sys.is_full(0));
    }

    #[test]
    fn partition_rejects_bad_templates() {
        let b1 = RationalMap::sextic(&ExtElem::from_int(f(), 3), &ExtElem::from_int(f(), 1));
        // b = 1 makes z(z-1)^2 share no factor with the numerator, but |b-1| < 1
        if let Ok(phi) = b1 {
            assert!(matches!(build_partition(&phi), Err(Error::TemplateViolation(_))));
        }
        let f5 = FieldSpec::new(5, 1).unwrap();
        let phi5 = RationalMap::sextic(&ExtElem::from_int(f5, 5), &ExtElem::from_int(f5, -1)).unwrap();
        assert!(matches!(build_partition(&phi5), Err(Error::TemplateViolation(_))));
    }

    #[test]
    fn dendrite_small_depths() {
        let sys = build_partition(&sextic_map()).unwrap();
        let d0 = emit_dendrite(&sys, 0).unwrap();
        assert_eq!((d0.nodes.len(), d0.edges.len()), (1, 0));
        let d1 = emit_dendrite(&sys, 1).unwrap();
        assert_eq!(d1.nodes.len(), 12);
        assert_eq!(d1.edges.len(), 11);
        assert!(d1.to_dot().starts_with("digraph"));
    }

    #[test]
    fn subdivision_piece_degrees() {
        let phi = sextic_map();
        for s in sextic_certificate().subdivision {
            assert_eq!(piece_degree(&phi, &s.interval, s.b).unwrap(), 3);
        }
    }
}
