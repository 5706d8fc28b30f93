//! Exact nonnegative dyadic rationals `num · 2^(-exp)` with 128-bit numerators.
//!
//! Values are kept normalized (odd numerator, or zero with exponent zero) so
//! structural equality is numeric equality. Every operation that could leave
//! the 128-bit range returns [`Error::Overflow`] instead of wrapping.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported exponent; `2^MAX_EXP` still fits in a `u128` denominator.
pub const MAX_EXP: u32 = 127;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    num: u128,
    exp: u32,
}

pub(crate) fn shl_checked(x: u128, s: u32) -> Result<u128> {
    if x == 0 {
        return Ok(0);
    }
    if s >= 128 || x.leading_zeros() < s {
        return Err(Error::Overflow(format!("{x} << {s}")));
    }
    Ok(x << s)
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    /// Builds `num · 2^(-exp)`, normalizing the representation.
    pub fn new(num: u128, exp: u32) -> Result<Dyadic> {
        if num == 0 {
            return Ok(Dyadic::ZERO);
        }
        let tz = num.trailing_zeros().min(exp);
        let (num, exp) = (num >> tz, exp - tz);
        if exp > MAX_EXP {
            return Err(Error::Overflow(format!("exponent {exp} exceeds {MAX_EXP}")));
        }
        Ok(Dyadic { num, exp })
    }

    pub fn from_int(v: u128) -> Dyadic {
        Dyadic::new(v, 0).expect("integers always fit")
    }

    /// `2^(-k)`.
    pub fn pow2_neg(k: u32) -> Result<Dyadic> {
        Dyadic::new(1, k)
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    /// Numerator of this value on the grid `2^(-scale)`; fails if the value is
    /// not on that grid or the numerator overflows.
    pub fn numerator_at(&self, scale: u32) -> Result<u128> {
        if self.exp > scale {
            return Err(Error::InvalidParam(format!(
                "value {self} is not on the 2^-{scale} grid"
            )));
        }
        shl_checked(self.num, scale - self.exp)
    }

    fn aligned(a: &Dyadic, b: &Dyadic) -> Result<(u128, u128, u32)> {
        let e = a.exp.max(b.exp);
        Ok((shl_checked(a.num, e - a.exp)?, shl_checked(b.num, e - b.exp)?, e))
    }

    pub fn checked_add(&self, other: &Dyadic) -> Result<Dyadic> {
        let (a, b, e) = Dyadic::aligned(self, other)?;
        let s = a
            .checked_add(b)
            .ok_or_else(|| Error::Overflow(format!("{self} + {other}")))?;
        Dyadic::new(s, e)
    }

    /// `self - other`; fails when the result would be negative.
    pub fn checked_sub(&self, other: &Dyadic) -> Result<Dyadic> {
        let (a, b, e) = Dyadic::aligned(self, other)?;
        let s = a
            .checked_sub(b)
            .ok_or_else(|| Error::Overflow(format!("{self} - {other} is negative")))?;
        Dyadic::new(s, e)
    }

    pub fn checked_mul(&self, other: &Dyadic) -> Result<Dyadic> {
        let p = self
            .num
            .checked_mul(other.num)
            .ok_or_else(|| Error::Overflow(format!("{self} * {other}")))?;
        Dyadic::new(p, self.exp + other.exp)
    }

    /// Largest multiple of `2^(-t)` not exceeding `self · other`.
    pub fn mul_floor(&self, other: &Dyadic, t: u32) -> Result<Dyadic> {
        let p = num_bigint::BigUint::from(self.num) * other.num;
        let e = self.exp + other.exp;
        let (p, e) = if e > t { (p >> (e - t), t) } else { (p, e) };
        let num = u128::try_from(p).map_err(|_| Error::Overflow(format!("{self} * {other}")))?;
        Dyadic::new(num, e)
    }

    pub fn half(&self) -> Result<Dyadic> {
        Dyadic::new(self.num, self.exp + 1)
    }

    pub fn double(&self) -> Result<Dyadic> {
        self.mul_pow2(1)
    }

    /// `self · 2^k`.
    pub fn mul_pow2(&self, k: u32) -> Result<Dyadic> {
        if self.exp >= k {
            Dyadic::new(self.num, self.exp - k)
        } else {
            Dyadic::new(shl_checked(self.num, k - self.exp)?, 0)
        }
    }

    /// Largest multiple of `2^(-t)` not exceeding `self`.
    pub fn floor_to(&self, t: u32) -> Dyadic {
        if self.exp <= t {
            *self
        } else {
            Dyadic::new(self.num >> (self.exp - t), t).expect("t <= exp <= MAX_EXP")
        }
    }

    /// Floor of `x · 2^t`, as a dyadic on the `2^(-t)` grid.
    pub fn from_f64_floor(x: f64, t: u32) -> Result<Dyadic> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::NegativeWeight(x));
        }
        let scaled = (x * 2f64.powi(t as i32)).floor();
        if scaled >= 2f64.powi(127) {
            return Err(Error::Overflow(format!("{x} on grid 2^-{t}")));
        }
        Dyadic::new(scaled as u128, t)
    }

    pub fn to_f64(&self) -> f64 {
        if self.num == 0 {
            return 0.0;
        }
        (self.num as f64) * 2f64.powi(-(self.exp as i32))
    }

    /// Smallest power of two (as an exponent `k`, value `2^k`) with `2^k >= self`.
    /// Returns `None` for zero.
    pub fn ceil_log2(&self) -> Option<i64> {
        if self.num == 0 {
            return None;
        }
        let bits = 128 - self.num.leading_zeros() as i64;
        let pow = if self.num.is_power_of_two() { bits - 1 } else { bits };
        Some(pow - self.exp as i64)
    }

    /// Parses an exact decimal literal such as `0.25`, accepting it only if it
    /// is dyadic. Also accepts the graph-format forms `7` and `3/8`.
    pub fn parse_decimal(s: &str) -> Result<Dyadic> {
        let s = s.trim();
        if !s.contains('.') {
            return s.parse();
        }
        let bad = || Error::InvalidWeight(s.to_string());
        let (ip, fp) = s.split_once('.').ok_or_else(bad)?;
        if fp.is_empty() && ip.is_empty() {
            return Err(bad());
        }
        if !ip.chars().all(|c| c.is_ascii_digit()) || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{ip}{fp}");
        let mut num: u128 = digits.parse().map_err(|_| bad())?;
        let k = fp.len() as u32;
        // value = num / 10^k = num / (2^k 5^k); dyadic iff 5^k divides num
        for _ in 0..k {
            if num % 5 != 0 {
                return Err(bad());
            }
            num /= 5;
        }
        Dyadic::new(num, k)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match Dyadic::aligned(self, other) {
            Ok((a, b, _)) => a.cmp(&b),
            // only the operand with the smaller exponent is shifted, and it
            // overflowed, so it is the larger value
            Err(_) => {
                if self.exp < other.exp {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u128 << self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Dyadic> {
        let s = s.trim();
        let bad = || Error::InvalidWeight(s.to_string());
        let digits = |t: &str| !t.is_empty() && t.chars().all(|c| c.is_ascii_digit());
        match s.split_once('/') {
            None => {
                if !digits(s) {
                    return Err(bad());
                }
                Ok(Dyadic::from_int(s.parse().map_err(|_| bad())?))
            }
            Some((a, b)) => {
                if !digits(a) || !digits(b) {
                    return Err(bad());
                }
                let num: u128 = a.parse().map_err(|_| bad())?;
                let den: u128 = b.parse().map_err(|_| bad())?;
                if den == 0 || !den.is_power_of_two() {
                    return Err(bad());
                }
                Dyadic::new(num, den.trailing_zeros())
            }
        }
    }
}

/// Exact sum of a sequence of dyadics.
pub fn sum<'a, I: IntoIterator<Item = &'a Dyadic>>(items: I) -> Result<Dyadic> {
    items
        .into_iter()
        .try_fold(Dyadic::ZERO, |acc, x| acc.checked_add(x))
}
