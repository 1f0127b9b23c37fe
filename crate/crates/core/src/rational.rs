//! Exact rationals with an inline `i64` fast path.
//!
//! A value whose reduced numerator and denominator fit in `i64` is stored
//! inline and combined through `i128` intermediates, which cannot overflow
//! for a single operation. Results that do not fit are kept as
//! [`BigRational`], and big results are demoted again as soon as they fit.
//! The representation is canonical, so derived equality and hashing agree
//! with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// Reduced, `den > 0`, `num != i64::MIN`.
    Small { num: i64, den: i64 },
    /// Only values that do not fit `Small`.
    Big(BigRational),
}

impl Rational {
    /// `num / den`, reduced. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_integer(v: i64) -> Self {
        Self::new(v, 1)
    }

    pub fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(num), Some(den)) if num != i64::MIN => Rational(Repr::Small { num, den }),
            _ => Rational(Repr::Big(r)),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => BigRational::new_raw(BigInt::from(*num), BigInt::from(*den)),
            Repr::Big(r) => r.clone(),
        }
    }

    /// Whether the value is stored inline.
    pub fn is_small(&self) -> bool {
        matches!(self.0, Repr::Small { .. })
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    /// Reduces `num / den` (`den != 0`) held in `i128`.
    fn from_i128(mut num: i128, mut den: i128) -> Self {
        let g = num.unsigned_abs().gcd(&den.unsigned_abs());
        if g > 1 {
            num /= g as i128;
            den /= g as i128;
        }
        if den < 0 {
            num = -num;
            den = -den;
        }
        match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) if n != i64::MIN => Rational(Repr::Small { num: n, den: d }),
            _ => Rational(Repr::Big(BigRational::new_raw(BigInt::from(num), BigInt::from(den)))),
        }
    }

    fn pair(a: &Self, b: &Self) -> Option<(i128, i128, i128, i128)> {
        match (&a.0, &b.0) {
            (Repr::Small { num: p, den: q }, Repr::Small { num: r, den: s }) => {
                Some((*p as i128, *q as i128, *r as i128, *s as i128))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match Self::pair(self, other) {
            Some((p, q, r, s)) => (p * s).cmp(&(r * q)),
            None => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl Add for Rational {
    type Output = Rational;

    fn add(self, rhs: Rational) -> Rational {
        &self + &rhs
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;

    fn add(self, rhs: &Rational) -> Rational {
        match Rational::pair(self, rhs) {
            Some((p, q, r, s)) if q == s => Rational::from_i128(p + r, q),
            Some((p, q, r, s)) => Rational::from_i128(p * s + r * q, q * s),
            None => Rational::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl Sub for Rational {
    type Output = Rational;

    fn sub(self, rhs: Rational) -> Rational {
        &self - &rhs
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;

    fn sub(self, rhs: &Rational) -> Rational {
        match Rational::pair(self, rhs) {
            Some((p, q, r, s)) if q == s => Rational::from_i128(p - r, q),
            Some((p, q, r, s)) => Rational::from_i128(p * s - r * q, q * s),
            None => Rational::from_big(self.to_big() - rhs.to_big()),
        }
    }
}

impl Mul for Rational {
    type Output = Rational;

    fn mul(self, rhs: Rational) -> Rational {
        &self * &rhs
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;

    fn mul(self, rhs: &Rational) -> Rational {
        match Rational::pair(self, rhs) {
            Some((p, q, r, s)) => Rational::from_i128(p * r, q * s),
            None => Rational::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl Div for Rational {
    type Output = Rational;

    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;

    /// Panics on division by zero.
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        match Rational::pair(self, rhs) {
            Some((p, q, r, s)) => Rational::from_i128(p * s, q * r),
            None => Rational::from_big(self.to_big() / rhs.to_big()),
        }
    }
}

impl Rem for Rational {
    type Output = Rational;

    fn rem(self, rhs: Rational) -> Rational {
        Rational::from_big(self.to_big() % rhs.to_big())
    }
}

impl Neg for Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        match self.0 {
            Repr::Small { num, den } => Rational(Repr::Small { num: -num, den }),
            Repr::Big(r) => Rational::from_big(-r),
        }
    }
}

macro_rules! assign_op {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for Rational {
            fn $method(&mut self, rhs: Rational) {
                *self = &*self $op &rhs;
            }
        }
    };
}

assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, v| acc + v)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational(Repr::Small { num: 0, den: 1 })
    }

    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational(Repr::Small { num: 1, den: 1 })
    }
}

impl Num for Rational {
    type FromStrRadixErr = num_rational::ParseRatioError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        BigRational::from_str_radix(s, radix).map(Rational::from_big)
    }
}

impl Signed for Rational {
    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn abs_sub(&self, other: &Self) -> Self {
        if self <= other {
            Rational::zero()
        } else {
            self - other
        }
    }

    fn signum(&self) -> Self {
        match self.cmp(&Rational::zero()) {
            Ordering::Less => -Rational::one(),
            Ordering::Equal => Rational::zero(),
            Ordering::Greater => Rational::one(),
        }
    }

    fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num > 0,
            Repr::Big(r) => r.is_positive(),
        }
    }

    fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }
}

impl ToPrimitive for Rational {
    fn to_i64(&self) -> Option<i64> {
        self.to_big().to_integer().to_i64()
    }

    fn to_u64(&self) -> Option<u64> {
        self.to_big().to_integer().to_u64()
    }

    fn to_f64(&self) -> Option<f64> {
        match &self.0 {
            Repr::Small { num, den } => num_rational::Ratio::new_raw(*num, *den).to_f64(),
            Repr::Big(r) => r.to_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn edge() -> impl Strategy<Value = i64> {
        prop_oneof![
            -1000i64..1000,
            any::<i64>(),
            Just(i64::MAX),
            Just(i64::MIN + 1),
            Just(i64::MIN),
        ]
    }

    fn nonzero() -> impl Strategy<Value = i64> {
        edge().prop_filter("nonzero", |d| *d != 0)
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(Rational::new(2, -4), Rational::new(-1, 2));
        assert!(Rational::new(i64::MIN, 1).numer() == BigInt::from(i64::MIN));
        assert!(!Rational::new(i64::MIN, 1).is_small());
        assert!(Rational::new(i64::MIN, 2).is_small());
        assert_eq!(Rational::new(6, 3).to_string(), "2");
        assert_eq!(Rational::new(-1, 3).to_string(), "-1/3");
        let huge = Rational::new(i64::MAX, 1) * Rational::new(i64::MAX, 1);
        assert!(!huge.is_small());
        let back = huge / Rational::new(i64::MAX, 1);
        assert!(back.is_small());
        assert_eq!(back, Rational::new(i64::MAX, 1));
    }

    proptest! {
        #[test]
        fn agrees_with_bigrational(a in edge(), b in nonzero(), c in edge(), d in nonzero()) {
            let (x, y) = (Rational::new(a, b), Rational::new(c, d));
            let (bx, by) = (big(a, b), big(c, d));
            prop_assert_eq!((x.clone() + y.clone()).to_big(), &bx + &by);
            prop_assert_eq!((x.clone() - y.clone()).to_big(), &bx - &by);
            prop_assert_eq!((x.clone() * y.clone()).to_big(), &bx * &by);
            if c != 0 {
                prop_assert_eq!((x.clone() / y.clone()).to_big(), &bx / &by);
            }
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
            prop_assert_eq!((-x.clone()).to_big(), -bx.clone());
            prop_assert_eq!(x.to_string(), bx.to_string());
        }

        #[test]
        fn big_results_round_trip(a in edge(), b in nonzero(), c in edge(), d in nonzero()) {
            let x = Rational::new(a, b) * Rational::new(c, d) * Rational::new(c, d);
            let expected = big(a, b) * big(c, d) * big(c, d);
            prop_assert_eq!(x.to_big(), expected.clone());
            prop_assert_eq!(x, Rational::from_big(expected));
        }
    }
}
