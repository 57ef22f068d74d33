//! Scalar abstraction shared by every real-valued computation in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigUint;
use num_traits::{Float, FloatConst, FromPrimitive, NumCast, ToPrimitive};

/// Floating point scalar the profile, moment and level-set code is generic over.
///
/// Implemented for `f32` and `f64`. Integer-valued facts (divisor counts, Δ)
/// never pass through this type; only interval lengths, logarithms and the
/// quantities built from them do.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Lossy conversion from any primitive; panics only if `T` cannot hold the
    /// value at all, which does not happen for `f32`/`f64` and finite inputs.
    fn of<N: ToPrimitive>(v: N) -> Self {
        <Self as NumCast>::from(v).expect("value representable as a float")
    }

    /// Conversion from an arbitrary width integer. Saturates to +inf.
    fn of_big(v: &BigUint) -> Self {
        match v.to_f64() {
            Some(f) => Self::of(f),
            None => Self::infinity(),
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `Log x = max{1, log x}`.
pub fn log_floor<T: Real>(x: T) -> T {
    x.ln().max(T::one())
}

/// `Log₂ x = Log(Log x)`.
pub fn log2_floor<T: Real>(x: T) -> T {
    log_floor(log_floor(x))
}

/// Kahan–Babuška (Neumaier) compensated accumulator.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry = self.carry + ((self.sum - t) + v);
        } else {
            self.carry = self.carry + ((v - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

impl<T: Real> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Integer power whose magnitude may exceed 128 bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WideInt {
    Small(u128),
    Big(BigUint),
}

impl WideInt {
    pub fn pow(base: u64, exp: u32) -> Self {
        match (base as u128).checked_pow(exp) {
            Some(v) => WideInt::Small(v),
            None => WideInt::Big(BigUint::from(base).pow(exp)),
        }
    }

    pub fn times(self, other: WideInt) -> Self {
        match (self, other) {
            (WideInt::Small(a), WideInt::Small(b)) => match a.checked_mul(b) {
                Some(v) => WideInt::Small(v),
                None => WideInt::Big(BigUint::from(a) * BigUint::from(b)),
            },
            (a, b) => WideInt::Big(a.into_big() * b.into_big()),
        }
    }

    pub fn into_big(self) -> BigUint {
        match self {
            WideInt::Small(v) => BigUint::from(v),
            WideInt::Big(v) => v,
        }
    }

    pub fn to_real<T: Real>(&self) -> T {
        match self {
            WideInt::Small(v) => T::of(*v),
            WideInt::Big(v) => T::of_big(v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_floor_clamps_below_e() {
        assert_eq!(log_floor(1.0f64), 1.0);
        assert_eq!(log_floor(2.0f64), 1.0);
        assert!((log_floor(100.0f64) - 100f64.ln()).abs() < 1e-15);
        assert_eq!(log2_floor(10.0f64), 1.0);
        assert!((log2_floor(1e10f64) - 1e10f64.ln().ln()).abs() < 1e-15);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::<f64>::new();
        acc.add(1e16);
        for _ in 0..10 {
            acc.add(1.0);
        }
        acc.add(-1e16);
        assert_eq!(acc.value(), 10.0);
    }

    #[test]
    fn wide_pow_switches_to_bigint() {
        assert_eq!(WideInt::pow(3, 4), WideInt::Small(81));
        let big = WideInt::pow(1000, 20);
        assert!(matches!(big, WideInt::Big(_)));
        let v: f64 = big.to_real();
        assert!((v / 1e60 - 1.0).abs() < 1e-12);
    }
}
