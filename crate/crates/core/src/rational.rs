//! Exact rationals and the few float conversions applied to them.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        let top: BigInt = x >> shift;
        top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Natural log of a positive rational, accurate even when the value
/// under- or overflows `f64`.
pub fn ln(r: &Rational) -> f64 {
    assert!(r.is_positive(), "logarithm of a nonpositive rational");
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let v = r.to_f64().unwrap_or(f64::NAN);
    if v.is_finite() && v != 0.0 {
        return v;
    }
    let sign = if r.numer().sign() == Sign::Minus { -1.0 } else { 1.0 };
    sign * ln(&r.abs()).exp()
}

/// `-λ ln λ` for a nonnegative rational, `0` at `0`.
pub fn neg_xlnx(r: &Rational) -> f64 {
    if r.is_zero() {
        0.0
    } else {
        let l = ln(r);
        -l.exp() * l
    }
}

/// Parses `a/b` or a bare integer.
pub fn parse(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => Some(Rational::from_integer(s.trim().parse().ok()?)),
    }
}

/// Always `numerator/denominator`, including integers.
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
