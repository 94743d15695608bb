use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact integer arithmetic; `None` signals overflow of a fixed-width backend.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_i64(&self) -> Option<i64>;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn is_unit(&self) -> bool;
    /// |self| < |other|
    fn abs_lt(&self, other: &Self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    /// Quotient rounded toward zero.
    fn div_trunc(&self, o: &Self) -> Option<Self>;
    /// Remainder in `[0, |m|)`.
    fn rem_euclid(&self, m: &Self) -> Option<Self>;
}

impl Scalar for i64 {
    fn zero() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn to_i64(&self) -> Option<i64> {
        Some(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn div_trunc(&self, o: &Self) -> Option<Self> {
        self.checked_div(*o)
    }
    fn rem_euclid(&self, m: &Self) -> Option<Self> {
        self.checked_rem_euclid(*m)
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn to_i64(&self) -> Option<i64> {
        ToPrimitive::to_i64(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn div_trunc(&self, o: &Self) -> Option<Self> {
        if Zero::is_zero(o) {
            None
        } else {
            Some(self / o)
        }
    }
    fn rem_euclid(&self, m: &Self) -> Option<Self> {
        if Zero::is_zero(m) {
            return None;
        }
        let m = m.abs();
        let r = self % &m;
        Some(if Signed::is_negative(&r) { r + m } else { r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i64_overflow_is_reported() {
        assert_eq!(Scalar::mul(&i64::MAX, &2), None);
        assert_eq!(Scalar::neg(&i64::MIN), None);
        assert_eq!(Scalar::rem_euclid(&-7i64, &3), Some(2));
    }

    #[test]
    fn bigint_matches_i64_on_small_values() {
        for a in -20i64..20 {
            for b in [-7i64, -3, 2, 5] {
                let (x, y) = (BigInt::from(a), BigInt::from(b));
                assert_eq!(Scalar::to_i64(&x.div_trunc(&y).unwrap()), a.div_trunc(&b));
                assert_eq!(Scalar::to_i64(&Scalar::rem_euclid(&x, &y).unwrap()), Scalar::rem_euclid(&a, &b));
                assert_eq!(x.abs_lt(&y), a.abs_lt(&b));
            }
        }
    }
}
