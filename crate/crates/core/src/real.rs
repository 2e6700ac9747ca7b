//! Scalar abstraction for the deterministic game machinery.
//!
//! Everything on the deterministic path (responses, gaps, DLFP, verification)
//! is generic over [`Real`], so the same code runs in `f64` and, with the
//! `mpfr` feature, in [`Mp`] extended precision. Extended precision is what
//! makes it possible to follow a linearly convergent gap sequence far below
//! the double-precision round-off floor.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + for<'a> AddAssign<&'a Self>
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn ln_1p(&self) -> Self;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    /// Unit round-off of the representation.
    fn epsilon() -> Self;
    fn is_finite(&self) -> bool;

    /// `self += a * b`.
    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a.clone() * b;
    }

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// `self^k` by repeated squaring.
    fn powu(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }
}

impl Real for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
    #[inline]
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    #[inline]
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    #[inline]
    fn ln_1p(&self) -> Self {
        f64::ln_1p(*self)
    }
    #[inline]
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    #[inline]
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    #[inline]
    fn epsilon() -> Self {
        f64::EPSILON
    }
    #[inline]
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    #[inline]
    fn max(self, other: Self) -> Self {
        f64::max(self, other)
    }
    #[inline]
    fn min(self, other: Self) -> Self {
        f64::min(self, other)
    }
}

pub fn sum<T: Real>(values: &[T]) -> T {
    let mut acc = T::zero();
    for v in values {
        acc += v;
    }
    acc
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (ai, bi) in a.iter().zip(b) {
        acc.mul_add_assign(ai, bi);
    }
    acc
}

pub fn l1_distance<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (ai, bi) in a.iter().zip(b) {
        acc += (ai.clone() - bi).abs();
    }
    acc
}

#[cfg(feature = "mpfr")]
pub use mp::Mp;

#[cfg(feature = "mpfr")]
mod mp {
    use super::Real;
    use rug::Float;
    use std::cmp::Ordering;
    use std::fmt;
    use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

    /// MPFR float with a fixed mantissa width of `BITS` bits.
    #[derive(Clone, PartialEq)]
    pub struct Mp<const BITS: u32>(pub Float);

    impl<const BITS: u32> fmt::Debug for Mp<BITS> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "Mp<{BITS}>({:e})", self.0.to_f64())
        }
    }

    impl<const BITS: u32> PartialOrd for Mp<BITS> {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            self.0.partial_cmp(&other.0)
        }
    }

    macro_rules! binop {
        ($tr:ident, $f:ident) => {
            impl<const BITS: u32> $tr for Mp<BITS> {
                type Output = Self;
                #[inline]
                fn $f(self, rhs: Self) -> Self {
                    Mp($tr::$f(self.0, &rhs.0))
                }
            }
            impl<'a, const BITS: u32> $tr<&'a Mp<BITS>> for Mp<BITS> {
                type Output = Self;
                #[inline]
                fn $f(self, rhs: &'a Self) -> Self {
                    Mp($tr::$f(self.0, &rhs.0))
                }
            }
        };
    }
    binop!(Add, add);
    binop!(Sub, sub);
    binop!(Mul, mul);
    binop!(Div, div);

    impl<const BITS: u32> Neg for Mp<BITS> {
        type Output = Self;
        fn neg(self) -> Self {
            Mp(-self.0)
        }
    }

    impl<const BITS: u32> AddAssign for Mp<BITS> {
        fn add_assign(&mut self, rhs: Self) {
            self.0 += &rhs.0;
        }
    }

    impl<'a, const BITS: u32> AddAssign<&'a Mp<BITS>> for Mp<BITS> {
        fn add_assign(&mut self, rhs: &'a Self) {
            self.0 += &rhs.0;
        }
    }

    impl<const BITS: u32> Real for Mp<BITS> {
        fn from_f64(v: f64) -> Self {
            Mp(Float::with_val(BITS, v))
        }
        fn to_f64(&self) -> f64 {
            self.0.to_f64()
        }
        fn exp(&self) -> Self {
            Mp(Float::with_val(BITS, self.0.exp_ref()))
        }
        fn ln(&self) -> Self {
            Mp(Float::with_val(BITS, self.0.ln_ref()))
        }
        fn ln_1p(&self) -> Self {
            Mp(Float::with_val(BITS, self.0.ln_1p_ref()))
        }
        fn abs(&self) -> Self {
            Mp(Float::with_val(BITS, self.0.abs_ref()))
        }
        fn sqrt(&self) -> Self {
            Mp(Float::with_val(BITS, self.0.sqrt_ref()))
        }
        fn epsilon() -> Self {
            Mp(Float::with_val(BITS, 1) >> (BITS - 1))
        }
        fn is_finite(&self) -> bool {
            self.0.is_finite()
        }
        #[inline]
        fn mul_add_assign(&mut self, a: &Self, b: &Self) {
            self.0 += &a.0 * &b.0;
        }
    }
}
