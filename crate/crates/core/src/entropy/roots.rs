//! Exact root location for polynomials over `Q`: Sturm sequences on the
//! real line and Cauchy-index root counts on discs.

use num_traits::{One, Signed, Zero};

use super::qpoly::QPoly;
use crate::rational::{self, Rational};

pub struct Sturm {
    seq: Vec<QPoly>,
}

impl Sturm {
    pub fn new(p: &QPoly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1.neg();
            seq.push(r);
        }
        seq.pop();
        Self { seq }
    }

    fn variations(&self, x: &Rational) -> usize {
        let signs: Vec<bool> =
            self.seq.iter().map(|q| q.eval(x)).filter(|v| !v.is_zero()).map(|v| v.is_negative()).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct real roots in `(a, b]`.
    pub fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// A strict upper bound on the moduli of the roots.
pub fn cauchy_bound(p: &QPoly) -> Rational {
    let lead = rational::abs(&p.lead());
    let m = p.coeffs().iter().map(|a| rational::abs(a) / &lead).max().unwrap_or_else(Rational::zero);
    m + Rational::one()
}

/// A point strictly between `lo` and `hi` that is not a root of `p`.
fn split(p: &QPoly, lo: &Rational, hi: &Rational) -> Rational {
    [(1, 2), (1, 3), (2, 3), (2, 5), (3, 5)]
        .iter()
        .map(|&(n, d)| lo + (hi - lo) * rational::ratio(n, d))
        .find(|m| !p.eval(m).is_zero())
        .expect("a squarefree polynomial has few roots")
}

/// An interval `(lo, hi)` with `0 < lo < r < hi` around the smallest positive
/// root `r` of `p`, with `hi - lo ≤ rel·hi`, containing no other real root.
/// `p` must be squarefree with `p(0) ≠ 0`.
pub fn smallest_positive_root(p: &QPoly, rel: &Rational) -> Option<(Rational, Rational)> {
    if p.degree().unwrap_or(0) == 0 || p.coeff(0).is_zero() {
        return None;
    }
    let sturm = Sturm::new(p);
    let mut lo = Rational::zero();
    let mut hi = cauchy_bound(p);
    if sturm.count(&lo, &hi) == 0 {
        return None;
    }
    while sturm.count(&lo, &hi) > 1 || lo.is_zero() || &hi - &lo > rel * &hi {
        let mid = split(p, &lo, &hi);
        if sturm.count(&lo, &mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((lo, hi))
}

/// Refines an isolating interval from [`smallest_positive_root`] by one
/// bisection step.
pub fn refine(p: &QPoly, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    let mid = split(p, lo, hi);
    if (p.eval(lo) * p.eval(&mid)).is_negative() {
        (lo.clone(), mid)
    } else {
        (mid, hi.clone())
    }
}

type CPoly = (QPoly, QPoly);

fn cmul(a: &CPoly, b: &CPoly) -> CPoly {
    (a.0.mul(&b.0).sub(&a.1.mul(&b.1)), a.0.mul(&b.1).add(&a.1.mul(&b.0)))
}

fn sign_changes(vals: impl Iterator<Item = Rational>) -> usize {
    let signs: Vec<bool> = vals.filter(|v| !v.is_zero()).map(|v| v.is_negative()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Cauchy index of `g/f` over the whole real line, with jumps from `-∞` to
/// `+∞` counted positively, and the last nonzero remainder (a gcd of `f`
/// and `g`).
fn cauchy_index(f: &QPoly, g: &QPoly) -> (i64, QPoly) {
    let mut seq = vec![f.clone(), g.clone()];
    while !seq.last().unwrap().is_zero() {
        let n = seq.len();
        let r = seq[n - 2].div_rem(&seq[n - 1]).1.neg();
        seq.push(r);
    }
    seq.pop();
    let at_pos = sign_changes(seq.iter().map(QPoly::lead));
    let at_neg = sign_changes(seq.iter().map(|q| {
        let odd = q.degree().unwrap_or(0) % 2 == 1;
        if odd {
            -q.lead()
        } else {
            q.lead()
        }
    }));
    (at_neg as i64 - at_pos as i64, seq.pop().unwrap())
}

/// Number of roots of `f` (with multiplicity) in the open disc `|z| < ρ`,
/// or `None` when `f` has a root on the circle `|z| = ρ`.
///
/// The circle is parametrized by `z = ρ(1 + it)/(1 - it)`, `t ∈ R`; the
/// argument principle turns the count into a Cauchy index of the real and
/// imaginary parts of `(1 - it)^n f(z)`, which Sturm sequences give exactly.
pub fn disk_count(f: &QPoly, rho: &Rational) -> Option<usize> {
    let Some(n) = f.degree() else { return Some(0) };
    let g = f.scale_var(rho);
    if g.eval(&-Rational::one()).is_zero() {
        return None;
    }
    let one = QPoly::one();
    let plus: CPoly = (one.clone(), QPoly::z());
    let minus: CPoly = (one.clone(), QPoly::z().neg());
    let mut plus_pows = vec![(one.clone(), QPoly::zero())];
    let mut minus_pows = vec![(one, QPoly::zero())];
    for k in 0..n {
        plus_pows.push(cmul(&plus_pows[k], &plus));
        minus_pows.push(cmul(&minus_pows[k], &minus));
    }
    let (mut re, mut im) = (QPoly::zero(), QPoly::zero());
    for (k, a) in g.coeffs().iter().enumerate() {
        let (r, i) = cmul(&plus_pows[k], &minus_pows[n - k]);
        re = re.add(&r.scale(a));
        im = im.add(&i.scale(a));
    }
    // rotate by 1 + i so both parts have full degree and equal limits at ±∞
    let (re, im) = (re.sub(&im), re.add(&im));
    let (index, common) = cauchy_index(&re, &im);
    if common.degree().unwrap_or(0) > 0 {
        let b = cauchy_bound(&common);
        if Sturm::new(&common.squarefree()).count(&-b.clone(), &b) > 0 {
            return None;
        }
    }
    let twice = n as i64 - index;
    debug_assert!(twice >= 0 && twice % 2 == 0 && twice / 2 <= n as i64);
    Some((twice / 2) as usize)
}
