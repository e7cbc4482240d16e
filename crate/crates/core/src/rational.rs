//! Helpers around `BigRational`: canonical text form, p-adic valuation,
//! reduction modulo p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"n"` or `"n/d"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Lowest-terms text form; integers print without a denominator.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn padic_val_int(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn padic_val(q: &Rational, p: u64) -> i64 {
    padic_val_int(q.numer(), p) - padic_val_int(q.denom(), p)
}

/// Image of a p-integral rational in F_p.
pub fn mod_p(q: &Rational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = q.denom().mod_floor(&pb).to_u64()?;
    if den == 0 {
        return None;
    }
    let num = q.numer().mod_floor(&pb).to_u64()?;
    Some(num * crate::residue_dyn::fp::inv_mod(den, p) % p)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // fall back through scaled integers when the ratio overflows f64
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn abs(q: &Rational) -> Rational {
    if q.is_negative() {
        -q.clone()
    } else {
        q.clone()
    }
}

pub fn pow(q: &Rational, k: u32) -> Rational {
    num_traits::pow(q.clone(), k as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-2/4").unwrap(), ratio(-1, 2));
        assert_eq!(format_rational(&ratio(-1, 2)), "-1/2");
        assert_eq!(format_rational(&int(0)), "0");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(padic_val(&int(18), 3), 2);
        assert_eq!(padic_val(&ratio(5, 27), 3), -3);
        assert_eq!(padic_val(&ratio(2, 7), 3), 0);
    }

    #[test]
    fn reduction_mod_p() {
        assert_eq!(mod_p(&ratio(1, 2), 3), Some(2));
        assert_eq!(mod_p(&int(-1), 3), Some(2));
        assert_eq!(mod_p(&ratio(1, 3), 3), None);
    }
}
