//! Exact dyadic rationals `m · 2^e` with an arbitrary-precision mantissa.
//!
//! Every value is kept normalized: the mantissa is odd, or the value is zero
//! and stored as `0 · 2^0`. Arithmetic never rounds. The exponent is an `i64`;
//! leaving its range is an [`ArithmeticError`], never a silent wraparound. The
//! operator impls (`+`, `-`, `*`) treat that as a fatal fault and panic; use
//! the `checked_*` methods where the caller wants to recover.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ArithmeticError {
    #[error("dyadic exponent left the i64 range")]
    ExponentOverflow,
    #[error("value is not representable as a dyadic rational")]
    NotDyadic,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

fn overflow() -> ArithmeticError {
    ArithmeticError::ExponentOverflow
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: 0 }
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: e }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::try_new(BigInt::from(v), 0).expect("integer normalization cannot overflow")
    }

    /// Builds `mantissa · 2^exponent`, normalizing.
    pub fn try_new(mantissa: BigInt, exponent: i64) -> Result<Self, ArithmeticError> {
        if mantissa.is_zero() {
            return Ok(Self::zero());
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            return Ok(Dyadic { mantissa, exponent });
        }
        let shift = i64::try_from(tz).map_err(|_| overflow())?;
        let exponent = exponent.checked_add(shift).ok_or_else(overflow)?;
        Ok(Dyadic { mantissa: mantissa >> tz, exponent })
    }

    /// Panicking constructor for literals in code and tests.
    pub fn new(mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        Self::try_new(mantissa.into(), exponent).expect("dyadic exponent overflow")
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn sign(&self) -> Sign {
        self.mantissa.sign()
    }

    pub fn abs(&self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// True when the value is `±2^e` for some `e`.
    pub fn is_signed_power_of_two(&self) -> bool {
        !self.is_zero() && self.mantissa.magnitude().is_one()
    }

    /// Returns `e` when the value is exactly `2^e`.
    pub fn log2_exact(&self) -> Option<i64> {
        if self.is_positive() && self.mantissa.is_one() {
            Some(self.exponent)
        } else {
            None
        }
    }

    /// Multiplication by `2^k`.
    pub fn checked_mul_pow2(&self, k: i64) -> Result<Self, ArithmeticError> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let exponent = self.exponent.checked_add(k).ok_or_else(overflow)?;
        Ok(Dyadic { mantissa: self.mantissa.clone(), exponent })
    }

    /// In-place multiplication by `2^k`, avoiding a mantissa copy.
    pub fn mul_pow2_assign(&mut self, k: i64) -> Result<(), ArithmeticError> {
        if self.is_zero() {
            return Ok(());
        }
        self.exponent = self.exponent.checked_add(k).ok_or_else(overflow)?;
        Ok(())
    }

    pub fn neg_assign(&mut self) {
        let m = std::mem::take(&mut self.mantissa);
        self.mantissa = -m;
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ArithmeticError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let e = self.exponent.min(other.exponent);
        let a = shl(&self.mantissa, self.exponent - e);
        let b = shl(&other.mantissa, other.exponent - e);
        Self::try_new(a + b, e)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ArithmeticError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ArithmeticError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        // product of odd mantissas is odd: already normalized
        let exponent = self.exponent.checked_add(other.exponent).ok_or_else(overflow)?;
        Ok(Dyadic { mantissa: &self.mantissa * &other.mantissa, exponent })
    }

    pub fn checked_pow(&self, k: u64) -> Result<Self, ArithmeticError> {
        if k == 0 {
            return Ok(Self::one());
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let k_i = i64::try_from(k).map_err(|_| overflow())?;
        let exponent = self.exponent.checked_mul(k_i).ok_or_else(overflow)?;
        let k32 = u32::try_from(k).map_err(|_| overflow())?;
        Ok(Dyadic { mantissa: num_traits::pow(self.mantissa.clone(), k32 as usize), exponent })
    }

    /// Position of the leading bit: the unique `p` with `2^(p-1) <= |x| < 2^p`.
    /// Undefined (returns `i64::MIN`) for zero.
    pub fn magnitude_bits(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN;
        }
        self.exponent + self.mantissa.bits() as i64
    }

    /// Compares the value with `2^(num/den)` exactly (`den > 0`).
    pub fn cmp_pow2_ratio(&self, num: i64, den: u64) -> Ordering {
        assert!(den > 0, "zero denominator");
        if !self.is_positive() {
            return Ordering::Less;
        }
        let den_i = den as i128;
        let num = num as i128;
        let bits = self.mantissa.bits() as i128;
        let e = self.exponent as i128;
        // log2(x^den) lies in [den*(e+bits-1), den*(e+bits))
        let lo = den_i * (e + bits - 1);
        let hi = den_i * (e + bits);
        if hi <= num {
            // x^den < 2^hi
            return Ordering::Less;
        }
        if lo > num {
            return Ordering::Greater;
        }
        // exact: m^den * 2^(e*den) vs 2^num
        let lhs = num_traits::pow(self.mantissa.magnitude().clone(), den as usize);
        let shift = num - e * den_i;
        // compare lhs with 2^shift
        if shift < 0 {
            return Ordering::Greater;
        }
        let rhs = num_bigint::BigUint::one() << (shift as u64);
        lhs.cmp(&rhs)
    }

    /// `x <= 2^(num/den)`.
    pub fn le_pow2_ratio(&self, num: i64, den: u64) -> bool {
        self.cmp_pow2_ratio(num, den) != Ordering::Greater
    }

    /// A dyadic upper bound for `2^(num/den)` with `bits` fractional bits of
    /// relative precision (`bits ≤ 50`).
    pub fn pow2_ratio_upper(num: i64, den: u64, bits: u32) -> Dyadic {
        assert!(den > 0 && bits <= 50);
        let d = den as i64;
        let whole = num.div_euclid(d);
        let frac = num.rem_euclid(d);
        let scale = 2f64.powi(bits as i32);
        let est = (2f64.powf(frac as f64 / d as f64) * scale).floor() as i64 - 2;
        let mut k = est.max(1i64 << bits);
        loop {
            let cand = Dyadic::new(k, whole - bits as i64);
            if cand.cmp_pow2_ratio(num, den) != Ordering::Less {
                return cand;
            }
            k += 1;
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        // keep 64 leading bits of the mantissa
        let drop = (bits - 64).max(0);
        let head = (&self.mantissa >> (drop as u64)).to_f64().unwrap_or(f64::NAN);
        let e = self.exponent.saturating_add(drop);
        if e > 2000 {
            return head.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        head * 2f64.powi(e as i32)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(shl(&self.mantissa, self.exponent))
        } else {
            let den = BigInt::one() << (self.exponent.unsigned_abs());
            BigRational::new(self.mantissa.clone(), den)
        }
    }

    /// Exact conversion from a fraction whose reduced denominator is a power of two.
    pub fn from_fraction(num: &BigInt, den: &BigInt) -> Result<Self, ArithmeticError> {
        if den.is_zero() {
            return Err(ArithmeticError::NotDyadic);
        }
        let r = BigRational::new(num.clone(), den.clone());
        let d = r.denom().magnitude();
        let tz = d.trailing_zeros().unwrap_or(0);
        if !(d >> tz).is_one() {
            return Err(ArithmeticError::NotDyadic);
        }
        let tz = i64::try_from(tz).map_err(|_| overflow())?;
        Self::try_new(r.numer().clone(), -tz)
    }
}

fn shl(m: &BigInt, k: i64) -> BigInt {
    debug_assert!(k >= 0);
    if k == 0 {
        m.clone()
    } else {
        m << (k as u64)
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::zero()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (sign_rank(self), sign_rank(other));
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let mag = {
            let (pa, pb) = (self.magnitude_bits(), other.magnitude_bits());
            if pa != pb {
                pa.cmp(&pb)
            } else {
                let e = self.exponent.min(other.exponent);
                let a = shl(&self.mantissa.abs(), self.exponent - e);
                let b = shl(&other.mantissa.abs(), other.exponent - e);
                a.cmp(&b)
            }
        };
        if sa > 0 {
            mag
        } else {
            mag.reverse()
        }
    }
}

fn sign_rank(d: &Dyadic) -> i8 {
    match d.mantissa.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! fatal_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a Dyadic> for &'a Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: &'a Dyadic) -> Dyadic {
                self.$checked(rhs).expect("fatal arithmetic fault: dyadic exponent overflow")
            }
        }
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: &'a Dyadic) -> Dyadic {
                (&self).$method(rhs)
            }
        }
    };
}

fatal_binop!(Add, add, checked_add);
fatal_binop!(Sub, sub, checked_sub);
fatal_binop!(Mul, mul, checked_mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(mut self) -> Dyadic {
        self.neg_assign();
        self
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}*2^{}", self.mantissa, self.exponent)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct DyadicRepr {
    m: String,
    e: i64,
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DyadicRepr { m: self.mantissa.to_string(), e: self.exponent }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = DyadicRepr::deserialize(d)?;
        let m = BigInt::from_str(&repr.m).map_err(serde::de::Error::custom)?;
        Dyadic::try_new(m, repr.e).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(m, e)
    }

    #[test]
    fn halves_sum_to_one() {
        assert_eq!(d(1, -1) + d(1, -1), d(1, 0));
        assert_eq!(d(1, 0).exponent(), 0);
    }

    #[test]
    fn additive_identity() {
        let a = d(-13, 7);
        assert_eq!(&a + &Dyadic::zero(), a);
        assert_eq!(&Dyadic::zero() + &a, a);
    }

    #[test]
    fn sixteenths() {
        let s = d(3, -4) + d(1, -4);
        assert_eq!(s.mantissa(), &BigInt::from(1));
        assert_eq!(s.exponent(), -2);
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(d(3, -4) * d(1, 6), d(3, 2));
        assert_eq!(d(3, -4) * Dyadic::one(), d(3, -4));
        assert_eq!(d(1, -1) * d(1, -1), d(1, -2));
    }

    #[test]
    fn normalization_strips_trailing_zeros() {
        let x = Dyadic::new(12, 0);
        assert_eq!(x.mantissa(), &BigInt::from(3));
        assert_eq!(x.exponent(), 2);
        let z = Dyadic::new(0, 55);
        assert_eq!(z.exponent(), 0);
        assert!(z.is_zero());
    }

    #[test]
    fn overflow_is_reported() {
        let big = Dyadic::pow2(i64::MAX);
        assert_eq!(big.checked_mul(&Dyadic::pow2(1)), Err(ArithmeticError::ExponentOverflow));
        assert!(Dyadic::try_new(BigInt::from(2), i64::MAX).is_err());
    }

    #[test]
    #[should_panic(expected = "fatal arithmetic fault")]
    fn operator_overflow_is_fatal() {
        let _ = Dyadic::pow2(i64::MAX) * Dyadic::pow2(1);
    }

    #[test]
    fn ordering_across_scales() {
        assert!(d(1, -1000) < d(1, -999));
        assert!(d(-1, 5) < d(1, -5));
        assert!(d(3, 0) > d(5, -1));
        assert!(d(-3, 0) < d(-5, -1));
        assert_eq!(d(7, 3).cmp(&d(7, 3)), Ordering::Equal);
    }

    #[test]
    fn pow2_ratio_comparison() {
        // 2^(-1/24) vs 1/2
        assert!(d(1, -1).le_pow2_ratio(-1, 24));
        assert!(!Dyadic::one().le_pow2_ratio(-1, 24));
        assert!(Dyadic::one().le_pow2_ratio(0, 3));
        // 3 vs 2^(3/2) = 2.828..
        assert_eq!(d(3, 0).cmp_pow2_ratio(3, 2), Ordering::Greater);
        // 11/4 = 2.75 < 2.828
        assert_eq!(d(11, -2).cmp_pow2_ratio(3, 2), Ordering::Less);
        assert_eq!(d(1, 5).cmp_pow2_ratio(10, 2), Ordering::Equal);
        assert!(Dyadic::zero().le_pow2_ratio(-100, 1));
        assert!(d(-5, 0).le_pow2_ratio(-100, 1));
    }

    #[test]
    fn serde_round_trip_is_bit_exact() {
        let x = d(-12345, -77);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"m":"-12345","e":-77}"#);
        let back: Dyadic = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        // non-normalized input is normalized on read
        let y: Dyadic = serde_json::from_str(r#"{"m":"8","e":-5}"#).unwrap();
        assert_eq!(y, d(1, -2));
    }

    #[test]
    fn fraction_conversion() {
        let x = Dyadic::from_fraction(&BigInt::from(6), &BigInt::from(16)).unwrap();
        assert_eq!(x, d(3, -3));
        assert!(Dyadic::from_fraction(&BigInt::from(1), &BigInt::from(3)).is_err());
        assert_eq!(d(3, 4).to_f64(), 48.0);
        assert_eq!(d(-1, -2).to_f64(), -0.25);
    }
}
