//! Scalar types: exact rationals for weights, and the coefficient rings a
//! truncated series may be built over.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};

/// Exact rational used for every weight coordinate and form value.
pub type Q = BigRational;

/// Builds the rational `n/d`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Returns the integer value of `x` if it has denominator one and fits an i64.
pub fn q_to_i64(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

/// A commutative ring a series can carry as coefficients.
///
/// Only ring operations are needed by the expansion code: every factor in a
/// denominator identity has coefficients `±1`, so division never occurs.
pub trait Coeff:
    Num
    + Neg<Output = Self>
    + Clone
    + Debug
    + Display
    + Send
    + Sync
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + 'static
{
    fn from_int(v: i64) -> Self;

    /// Exact rational value, when the ring embeds in ℚ.
    fn to_rational(&self) -> Option<Q>;

    /// `self / d` when the quotient stays in the ring.
    fn div_int(&self, d: i64) -> Option<Self>;

    /// True when the value is an integer.
    fn is_integral(&self) -> bool {
        self.to_rational().map(|r| r.is_integer()).unwrap_or(false)
    }
}

impl Coeff for BigInt {
    fn from_int(v: i64) -> Self {
        BigInt::from(v)
    }
    fn to_rational(&self) -> Option<Q> {
        Some(Q::from_integer(self.clone()))
    }
    fn div_int(&self, d: i64) -> Option<Self> {
        let d = BigInt::from(d);
        if d.is_zero() || !(self % &d).is_zero() {
            None
        } else {
            Some(self / d)
        }
    }
}

impl Coeff for BigRational {
    fn from_int(v: i64) -> Self {
        qi(v)
    }
    fn to_rational(&self) -> Option<Q> {
        Some(self.clone())
    }
    fn div_int(&self, d: i64) -> Option<Self> {
        if d == 0 {
            None
        } else {
            Some(self / qi(d))
        }
    }
}

macro_rules! impl_coeff_int {
    ($($t:ty),*) => {$(
        impl Coeff for $t {
            fn from_int(v: i64) -> Self {
                <$t>::from_i64(v).expect("coefficient out of range")
            }
            fn to_rational(&self) -> Option<Q> {
                Some(Q::from_integer(BigInt::from(*self)))
            }
            fn div_int(&self, d: i64) -> Option<Self> {
                let d = <$t>::from_i64(d)?;
                if d == 0 || self % d != 0 { None } else { Some(self / d) }
            }
        }
    )*};
}
impl_coeff_int!(i64, i128);

macro_rules! impl_coeff_float {
    ($($t:ty),*) => {$(
        impl Coeff for $t {
            fn from_int(v: i64) -> Self {
                v as $t
            }
            fn to_rational(&self) -> Option<Q> {
                Q::from_float(*self)
            }
            fn div_int(&self, d: i64) -> Option<Self> {
                if d == 0 { None } else { Some(self / d as $t) }
            }
            fn is_integral(&self) -> bool {
                self.fract() == 0.0
            }
        }
    )*};
}
impl_coeff_float!(f32, f64);

/// Formats a rational as `p/q` (integers keep the `/1`).
pub fn fmt_pq(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Formats a coefficient as `p/q`.
pub fn fmt_coeff<C: Coeff>(c: &C) -> String {
    match c.to_rational() {
        Some(r) => fmt_pq(&r),
        None => c.to_string(),
    }
}
