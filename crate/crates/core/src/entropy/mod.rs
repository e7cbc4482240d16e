//! Invariant-measure masses, measure-theoretic entropy via the Jacobian,
//! and Gurevich entropy of the symbolic system, both through exact
//! first-return generating functions and through finite truncations.

pub mod qpoly;
pub mod roots;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::julia_struct::MarkovSystem;
use crate::linalg;
use crate::rational::{self, format_rational, Rational};

pub use qpoly::{QPoly, RatFn};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMass {
    pub entry: String,
    pub target: String,
    /// Mass of all depth-1 states together.
    pub depth_one: Rational,
    /// Ratio between the masses at depth `k + 1` and `k`.
    pub ratio: Rational,
    pub total: Rational,
}

impl FamilyMass {
    pub fn at_depth(&self, k: u32) -> Rational {
        &self.depth_one * rational::pow(&self.ratio, k.saturating_sub(1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureSolution {
    /// One entry per core state, countable states included with mass 0.
    pub core_masses: Vec<(String, Rational)>,
    pub families: Vec<FamilyMass>,
    pub total_check: Rational,
}

impl MeasureSolution {
    pub fn mass(&self, name: &str) -> Option<&Rational> {
        self.core_masses.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn to_json(&self) -> Value {
        let core: serde_json::Map<String, Value> =
            self.core_masses.iter().map(|(n, m)| (n.clone(), json!(format_rational(m)))).collect();
        json!({
            "core": core,
            "families": self.families.iter().map(|f| json!({
                "entry": f.entry,
                "target": f.target,
                "depth_one": format_rational(&f.depth_one),
                "ratio": format_rational(&f.ratio),
                "total": format_rational(&f.total),
            })).collect::<Vec<_>>(),
            "total_check": format_rational(&self.total_check),
        })
    }
}

fn q(n: u32) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `Σ_{k≥1} (β/d)^k = β / (d - β)`, the family mass per unit target mass.
fn family_factor(sys: &MarkovSystem, multiplicity: u32, branch: u32) -> Result<Rational> {
    if branch >= sys.d {
        return Err(Error::InvalidSystem(format!("family branch {branch} is not below the degree {}", sys.d)));
    }
    Ok(q(multiplicity) * q(branch) / (q(sys.d) - q(branch)))
}

/// Solves the pushforward relations `μ(φ(U)) = (d/δ_U) μ(U)` exactly.
pub fn solve_masses(sys: &MarkovSystem) -> Result<MeasureSolution> {
    sys.validate()?;
    let unc = sys.uncountable();
    let pos = |name: &str| unc.iter().position(|&i| sys.states[i].name == name);
    let n = unc.len();
    let factors: Vec<Rational> =
        sys.families.iter().map(|f| family_factor(sys, f.multiplicity, f.branch)).collect::<Result<_>>()?;
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut b = vec![Rational::zero(); n];
    for (row, &i) in unc.iter().enumerate() {
        let st = &sys.states[i];
        a[row][row] = q(sys.d) / q(st.degree);
        if sys.is_full(i) {
            b[row] = Rational::one();
            continue;
        }
        for j in sys.core_successors(i) {
            a[row][pos(&sys.states[j].name).expect("uncountable")] -= Rational::one();
        }
        for (f, c) in sys.families.iter().zip(&factors) {
            if f.entry == st.name {
                a[row][pos(&f.target).expect("validated")] -= c;
            }
        }
    }
    let x = linalg::solve(a, b).ok_or(Error::SingularSystem)?;
    if let Some(k) = x.iter().position(Signed::is_negative) {
        return Err(Error::NegativeMass(sys.states[unc[k]].name.clone()));
    }
    let core_masses: Vec<(String, Rational)> = sys
        .states
        .iter()
        .map(|s| (s.name.clone(), pos(&s.name).map(|k| x[k].clone()).unwrap_or_else(Rational::zero)))
        .collect();
    let families: Vec<FamilyMass> = sys
        .families
        .iter()
        .zip(&factors)
        .map(|(f, c)| {
            let target = x[pos(&f.target).expect("validated")].clone();
            let ratio = q(f.branch) / q(sys.d);
            FamilyMass {
                entry: f.entry.clone(),
                target: f.target.clone(),
                depth_one: q(f.multiplicity) * &ratio * &target,
                ratio,
                total: c * target,
            }
        })
        .collect();
    let total_check = x.iter().sum::<Rational>() + families.iter().map(|f| &f.total).sum::<Rational>();
    Ok(MeasureSolution { core_masses, families, total_check })
}

/// `Σ q·log n` over primes `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactLogCombo {
    pub terms: Vec<(Rational, u64)>,
    pub nats: f64,
}

impl ExactLogCombo {
    fn from_map(map: BTreeMap<u64, Rational>) -> Self {
        let terms: Vec<(Rational, u64)> = map.into_iter().filter(|(_, c)| !c.is_zero()).map(|(p, c)| (c, p)).collect();
        let nats = terms.iter().map(|(c, p)| rational::to_f64(c) * (*p as f64).ln()).sum();
        Self { terms, nats }
    }

    pub fn to_json(&self) -> Value {
        json!(self.terms.iter().map(|(c, p)| json!([format_rational(c), p])).collect::<Vec<_>>())
    }
}

impl fmt::Display for ExactLogCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, p)| if c.is_one() { format!("log {p}") } else { format!("({}) log {p}", format_rational(c)) })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut k = 0;
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn add_log(map: &mut BTreeMap<u64, Rational>, weight: &Rational, n: u32, sign: i64) {
    for (p, k) in prime_factors(n as u64) {
        *map.entry(p).or_insert_with(Rational::zero) += weight * rational::int(sign * k as i64);
    }
}

/// `∫ log(d/δ) dμ`; family states carry local degree 1.
pub fn measure_entropy(sys: &MarkovSystem, masses: &MeasureSolution) -> ExactLogCombo {
    let mut map = BTreeMap::new();
    for (st, (_, m)) in sys.states.iter().zip(&masses.core_masses) {
        add_log(&mut map, m, sys.d, 1);
        add_log(&mut map, m, st.degree, -1);
    }
    for f in &masses.families {
        add_log(&mut map, &f.total, sys.d, 1);
    }
    ExactLogCombo::from_map(map)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalNull {
    pub coefficient: Rational,
    pub null: bool,
}

/// Given pieces `(b_i, δ_i)` of an interval `I` with `φ^{b_i}` mapping each
/// piece onto `I` with local degree `δ_i`, returns `Σ δ_i / d^{b_i}`. A
/// coefficient below 1 forces `μ(I) = 0`.
pub fn verify_interval_null(pieces: &[(u32, u32)], d: u32) -> IntervalNull {
    let coefficient: Rational = pieces.iter().map(|&(b, delta)| q(delta) / rational::pow(&q(d), b)).sum();
    let null = coefficient < Rational::one();
    IntervalNull { coefficient, null }
}

/// Edge weights between uncountable core states as rational functions of
/// `z`, with each tail family folded into one composite edge.
fn weight_matrix(sys: &MarkovSystem) -> (Vec<usize>, Vec<Vec<RatFn>>) {
    let unc = sys.uncountable();
    let n = unc.len();
    let pos = |i: usize| unc.iter().position(|&u| u == i).expect("uncountable");
    let mut w = vec![vec![RatFn::zero(); n]; n];
    let z = RatFn::poly(QPoly::z());
    for (r, &i) in unc.iter().enumerate() {
        for j in sys.core_successors(i) {
            w[r][pos(j)] = w[r][pos(j)].add(&z);
        }
    }
    for f in &sys.families {
        let (e, t) = (pos(sys.index(&f.entry).unwrap()), pos(sys.index(&f.target).unwrap()));
        let beta = q(f.branch);
        let edge = RatFn::new(QPoly::monomial(q(f.multiplicity) * &beta, 2), QPoly::new(vec![Rational::one(), -beta]));
        w[e][t] = w[e][t].add(&edge);
    }
    (unc, w)
}

fn closure(w: &[Vec<RatFn>], start: usize, forward: bool) -> Vec<bool> {
    let n = w.len();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for v in 0..n {
            let edge = if forward { &w[u][v] } else { &w[v][u] };
            if !edge.is_zero() && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

fn core_position(sys: &MarkovSystem, unc: &[usize], state: &str) -> Result<usize> {
    let i = sys.index(state)?;
    if sys.states[i].countable {
        return Err(Error::CountableState(state.into()));
    }
    Ok(unc.iter().position(|&u| u == i).expect("uncountable"))
}

/// `F_a(z) = Σ_n f_a(n) z^n`, where `f_a(n)` counts loops of length `n` at
/// `a` that do not pass through `a` in between.
pub fn first_return_gf(sys: &MarkovSystem, state: &str) -> Result<RatFn> {
    let (unc, w) = weight_matrix(sys);
    let a = core_position(sys, &unc, state)?;
    let fwd = closure(&w, a, true);
    let back = closure(&w, a, false);
    let others: Vec<usize> = (0..w.len()).filter(|&v| v != a && fwd[v] && back[v]).collect();
    if w[a][a].is_zero() && others.is_empty() {
        return Err(Error::NotStronglyConnected(state.into()));
    }
    // Solve (I - W_SS) x = W_Sa over Q(z).
    let k = others.len();
    let mut m: Vec<Vec<RatFn>> = others
        .iter()
        .map(|&u| {
            let mut row: Vec<RatFn> = others
                .iter()
                .map(|&v| if u == v { RatFn::one().sub(&w[u][v]) } else { RatFn::zero().sub(&w[u][v]) })
                .collect();
            row.push(w[u][a].clone());
            row
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| !m[r][col].is_zero()).ok_or(Error::SingularSystem)?;
        m.swap(col, piv);
        let inv = RatFn::one().div(&m[col][col]).expect("nonzero pivot");
        for c in col..=k {
            m[col][c] = m[col][c].mul(&inv);
        }
        for r in 0..k {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=k {
                    let t = factor.mul(&m[col][c]);
                    m[r][c] = m[r][c].sub(&t);
                }
            }
        }
    }
    let mut f = w[a][a].clone();
    for (idx, &v) in others.iter().enumerate() {
        if !w[a][v].is_zero() {
            f = f.add(&w[a][v].mul(&m[idx][k]));
        }
    }
    Ok(f)
}

/// `λ > 0` as a root of an integer polynomial, with `h = log λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicLog {
    /// Ascending coefficients, content 1, positive leading coefficient.
    pub minpoly: Vec<BigInt>,
    /// Isolating interval for `λ`.
    pub interval: (Rational, Rational),
    pub lambda: f64,
    pub nats: f64,
}

impl AlgebraicLog {
    pub fn to_json(&self) -> Value {
        json!({
            "minpoly": self.minpoly.iter().map(|c| c.to_i64().map(Value::from).unwrap_or_else(|| json!(c.to_string()))).collect::<Vec<_>>(),
            "interval": [format_rational(&self.interval.0), format_rational(&self.interval.1)],
            "lambda": self.lambda,
            "nats": self.nats,
        })
    }
}

const REFINE_STEPS: usize = 400;

/// Gurevich entropy `-log R` from the first-return series at the first
/// uncountable state.
pub fn gurevich_entropy(sys: &MarkovSystem) -> Result<AlgebraicLog> {
    let first =
        sys.uncountable().first().copied().ok_or_else(|| Error::InvalidSystem("no uncountable state".into()))?;
    gurevich_entropy_at(sys, &sys.states[first].name.clone())
}

/// `R` is the smallest positive root `r` of `1 - F_a`, provided `F_a` has no
/// pole and `1 - F_a` no zero in `|z| < r`. Both conditions are certified
/// with exact disc counts.
pub fn gurevich_entropy_at(sys: &MarkovSystem, state: &str) -> Result<AlgebraicLog> {
    let f = first_return_gf(sys, state)?;
    let one_minus = RatFn::one().sub(&f);
    let p = one_minus.num.squarefree();
    let no_root = |m: &str| Error::NoRootInDisk(format!("{state}: {m}"));
    let (mut lo, mut hi) = roots::smallest_positive_root(&p, &rational::ratio(1, 1000))
        .ok_or_else(|| no_root("1 - F has no positive root"))?;
    let mut certified = false;
    for _ in 0..REFINE_STEPS {
        let (Some(inner), Some(outer), Some(poles)) =
            (roots::disk_count(&p, &lo), roots::disk_count(&p, &hi), roots::disk_count(&one_minus.den, &hi))
        else {
            (lo, hi) = roots::refine(&p, &lo, &hi);
            continue;
        };
        if inner > 0 {
            return Err(no_root("1 - F vanishes strictly inside the disc of its smallest positive root"));
        }
        if outer == 1 && poles == 0 {
            certified = true;
            break;
        }
        (lo, hi) = roots::refine(&p, &lo, &hi);
    }
    if !certified {
        return Err(no_root("could not separate the root from other zeros or poles on its circle"));
    }
    let tight = rational::ratio(1, 10).pow(30);
    while &hi - &lo > &tight * &hi {
        (lo, hi) = roots::refine(&p, &lo, &hi);
    }
    let (llo, lhi) = (Rational::one() / &hi, Rational::one() / &lo);
    let mut rev = p.reversed();
    for x in rev.rational_roots() {
        if x < llo || x > lhi {
            rev = rev.div_rem(&QPoly::new(vec![-x, Rational::one()])).0;
        }
    }
    let lambda = rational::to_f64(&((&llo + &lhi) / rational::int(2)));
    Ok(AlgebraicLog { minpoly: rev.primitive(), interval: (llo, lhi), lambda, nats: lambda.ln() })
}

/// The truncated symbolic graph, lumped by the equitable partition whose
/// cells are the core uncountable states and, for each family, the set of
/// its states at each depth. Entry `(i, j, w)` means every vertex of cell
/// `i` has `w` edges into cell `j`.
pub fn lumped_graph(sys: &MarkovSystem, depth: u32) -> (Vec<String>, Vec<Vec<(usize, BigInt)>>) {
    let unc = sys.uncountable();
    let pos = |i: usize| unc.iter().position(|&u| u == i).expect("uncountable");
    let mut labels: Vec<String> = unc.iter().map(|&i| sys.states[i].name.clone()).collect();
    let mut rows: Vec<Vec<(usize, BigInt)>> =
        unc.iter().map(|&i| sys.core_successors(i).into_iter().map(|j| (pos(j), BigInt::one())).collect()).collect();
    for f in &sys.families {
        let (e, t) = (pos(sys.index(&f.entry).unwrap()), pos(sys.index(&f.target).unwrap()));
        let base = labels.len();
        for k in 1..=depth {
            labels.push(format!("{}^{k}", f.target));
            let down = if k == 1 { t } else { base + k as usize - 2 };
            rows.push(vec![(down, BigInt::one())]);
            let count = BigInt::from(f.multiplicity) * num_traits::pow(BigInt::from(f.branch), k as usize);
            rows[e].push((base + k as usize - 1, count));
        }
    }
    (labels, rows)
}

/// Closed paths of each length `0..=order` at a core state, counted in the
/// full symbolic graph.
pub fn return_path_counts(sys: &MarkovSystem, state: &str, order: usize) -> Result<Vec<BigInt>> {
    let unc = sys.uncountable();
    let a = core_position(sys, &unc, state)?;
    let (_, rows) = lumped_graph(sys, order as u32);
    let mut v: Vec<BigInt> = vec![BigInt::zero(); rows.len()];
    v[a] = BigInt::one();
    let mut out = vec![BigInt::one()];
    for _ in 0..order {
        let mut next = vec![BigInt::zero(); rows.len()];
        for (i, row) in rows.iter().enumerate() {
            if v[i].is_zero() {
                continue;
            }
            for (j, w) in row {
                next[*j] += &v[i] * w;
            }
        }
        v = next;
        out.push(v[a].clone());
    }
    Ok(out)
}

const TOL: f64 = 1e-10;
const PLAIN_ITERS: usize = 20_000;
const MAX_ITERS: usize = 1_000_000;

/// Power iteration for the spectral radius of `B + shift·I`, sup-normed.
fn power_radius(rows: &[Vec<(usize, f64)>], shift: f64, iters: usize) -> Option<f64> {
    let n = rows.len();
    let mut x = vec![1.0; n];
    let mut prev = f64::NAN;
    for _ in 0..iters {
        let mut y: Vec<f64> = x.iter().map(|xi| shift * xi).collect();
        for (i, row) in rows.iter().enumerate() {
            for &(j, w) in row {
                y[i] += w * x[j];
            }
        }
        let norm = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if norm == 0.0 {
            return Some(0.0);
        }
        if (norm - prev).abs() <= TOL * norm {
            return Some(norm);
        }
        prev = norm;
        x = y.into_iter().map(|v| v / norm).collect();
    }
    None
}

/// Topological entropy of the finite subgraph keeping core states and family
/// states of depth at most `depth`.
pub fn truncation_entropy(sys: &MarkovSystem, depth: u32) -> f64 {
    let (_, rows) = lumped_graph(sys, depth);
    let rows: Vec<Vec<(usize, f64)>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|(j, w)| (j, rational::to_f64(&Rational::from_integer(w)))).collect())
        .collect();
    let rho = power_radius(&rows, 0.0, PLAIN_ITERS)
        .or_else(|| power_radius(&rows, 1.0, MAX_ITERS - PLAIN_ITERS).map(|r| r - 1.0))
        .unwrap_or(0.0);
    if rho <= 1.0 {
        0.0
    } else {
        rho.ln()
    }
}

/// [`truncation_entropy`] at each depth `0..=max_depth`, computed in parallel.
pub fn truncation_profile(sys: &MarkovSystem, max_depth: u32) -> Vec<f64> {
    (0..=max_depth).into_par_iter().map(|k| truncation_entropy(sys, k)).collect()
}
