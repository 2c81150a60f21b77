//! Certified enclosures of the logarithms that appear in the guarantees.
//!
//! Every bound is returned as an exact rational on the safe side of the
//! true value: `ln` is evaluated in `f64`, widened by an absolute margin far
//! larger than the floating-point error, and then rounded outward to nine
//! decimals.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::basic::round_down_decimal;
use crate::{ratio, Rational};

const DIGITS: u32 = 9;
const MARGIN: f64 = 1e-12;

fn ln_f64(x: &Rational) -> f64 {
    assert!(x.is_positive(), "ln of a nonpositive rational");
    // split off powers of two so huge or tiny arguments stay representable
    let (num, den) = (x.numer(), x.denom());
    let shift = num.bits() as i64 - den.bits() as i64;
    let mantissa = if shift >= 0 {
        Rational::new(num.clone(), den << shift as usize)
    } else {
        Rational::new(num << (-shift) as usize, den.clone())
    };
    mantissa.to_f64().expect("mantissa is within [1/2, 2]").ln()
        + shift as f64 * std::f64::consts::LN_2
}

fn from_f64_up(v: f64) -> Rational {
    let r = Rational::from_float(v.next_up()).expect("finite");
    -round_down_decimal(&-r, DIGITS)
}

fn from_f64_down(v: f64) -> Rational {
    let r = Rational::from_float(v.next_down()).expect("finite");
    round_down_decimal(&r, DIGITS)
}

/// A rational `>= ln(x)`, within about `1e-9`.
pub fn ln_upper(x: &Rational) -> Rational {
    let v = ln_f64(x);
    from_f64_up(v + MARGIN + v.abs() * 1e-15)
}

/// A rational `<= ln(x)`, within about `1e-9`.
pub fn ln_lower(x: &Rational) -> Rational {
    let v = ln_f64(x);
    from_f64_down(v - MARGIN - v.abs() * 1e-15)
}

/// Upper bound on the factor of the side that is *not* improved.
///
/// For `beta > 0` this is `max(floor, 1 + ln(1/beta))`; for `beta = 0` it is
/// `3 + ln(2 * budget)`, where `budget` is the budget of the improved side.
pub fn other_side_factor(beta: &Rational, floor: &Rational, budget: i64) -> Rational {
    if beta.is_zero() {
        ratio(3, 1) + ln_upper(&ratio(2 * budget, 1))
    } else {
        let log = ratio(1, 1) + ln_upper(&beta.recip());
        log.max(floor.clone())
    }
}

/// `floor(r * budget)`: the largest integral sum allowed by `sum <= r * budget`.
pub fn floor_times(r: &Rational, budget: i64) -> BigInt {
    (r * ratio(budget, 1)).floor().to_integer()
}

/// `true` when `value <= factor * budget`.
pub fn within(value: i64, factor: &Rational, budget: i64) -> bool {
    ratio(value, 1) <= factor * ratio(budget, 1)
}

/// Decimal approximation of a rational, for human-readable output only.
pub fn approx(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
