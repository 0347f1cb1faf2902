//! Numeric foundations.
//!
//! Separations, per-move deltas and the objective are exact integers. Every
//! solver type is generic over a [`Cost`] integer; the crate root exposes
//! concrete `i32` / `i64` aliases for everyday use. Rational parameters
//! (the relinking distance ratio, the tenure coefficient) are kept as exact
//! [`Ratio`]s so that thresholds such as `ceil(0.35 * 20)` never depend on
//! floating-point rounding.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{PrimInt, Signed};

pub use num_rational::Ratio;

/// Integer type used for separations, Q entries and objective values.
///
/// Automatically implemented for every signed primitive integer.
pub trait Cost:
    PrimInt + Signed + Sum + Hash + Debug + Display + FromStr + Send + Sync + 'static
{
}

impl<T> Cost for T where
    T: PrimInt + Signed + Sum + Hash + Debug + Display + FromStr + Send + Sync + 'static
{
}

/// Lossless conversion of a color difference or count into `C`.
#[inline]
pub(crate) fn cost_from_u32<C: Cost>(x: u32) -> C {
    C::from(x).expect("u32 value representable in cost type")
}

/// Conversion of a cost into `u64`; negative values clamp to zero.
#[inline]
pub(crate) fn cost_to_u64<C: Cost>(x: C) -> u64 {
    x.to_u64().unwrap_or(0)
}

/// Parses a rational parameter given as `p/q`, a decimal (`0.35`) or an integer.
pub fn parse_ratio(text: &str) -> Result<Ratio<u32>, String> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: u32 = p.trim().parse().map_err(|_| format!("bad numerator in {t:?}"))?;
        let q: u32 = q.trim().parse().map_err(|_| format!("bad denominator in {t:?}"))?;
        if q == 0 {
            return Err(format!("zero denominator in {t:?}"));
        }
        return Ok(Ratio::new(p, q));
    }
    let (int_part, frac_part) = t.split_once('.').unwrap_or((t, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("empty number {t:?}"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(format!("not a nonnegative decimal: {t:?}"));
    }
    if frac_part.len() > 9 {
        return Err(format!("too many decimal places in {t:?}"));
    }
    let den = 10u64.pow(frac_part.len() as u32);
    let int: u64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| format!("overflow in {t:?}"))? };
    let frac: u64 = if frac_part.is_empty() { 0 } else { frac_part.parse().unwrap() };
    let num = int
        .checked_mul(den)
        .and_then(|x| x.checked_add(frac))
        .filter(|&x| x <= u32::MAX as u64)
        .ok_or_else(|| format!("value out of range: {t:?}"))?;
    Ok(Ratio::new(num as u32, den as u32))
}

/// `ceil(r * x)` computed exactly.
#[inline]
pub fn ceil_mul(r: Ratio<u32>, x: usize) -> usize {
    let num = *r.numer() as u128 * x as u128;
    let den = *r.denom() as u128;
    num.div_ceil(den) as usize
}

/// `floor(r * x)` computed exactly.
#[inline]
pub fn floor_mul(r: Ratio<u32>, x: u64) -> u64 {
    (*r.numer() as u128 * x as u128 / *r.denom() as u128) as u64
}
