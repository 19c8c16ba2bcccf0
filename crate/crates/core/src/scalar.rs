//! Scalar traits for the analytic half of the crate.
//!
//! [`Field`] is what exact linear algebra needs: ordered, signed, closed under
//! the four operations, constructible from integers. It is implemented for
//! `f32`, `f64` and [`crate::Rational`] by a blanket impl. [`Real`] adds the
//! transcendental functions needed by entropy formulas.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, Signed};

pub trait Field: Clone + Debug + PartialOrd + Signed + FromPrimitive + Send + Sync + 'static {
    /// Converts a non-negative integer, panicking only on types that cannot
    /// represent it at all (never the case for the implemented scalars).
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("integer not representable in scalar type")
    }

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer not representable in scalar type")
    }

    /// Integer power by repeated multiplication, exact for rationals.
    fn powu(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }
}

impl<T> Field for T where T: Clone + Debug + PartialOrd + Signed + FromPrimitive + Send + Sync + 'static {}

pub trait Real: Field + Float + FloatConst {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }
}

impl<T> Real for T where T: Field + Float + FloatConst {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn third<T: Field>() -> T {
        T::one() / T::from_count(3)
    }

    #[test]
    fn field_works_for_all_scalars() {
        assert!((third::<f32>() - 1.0 / 3.0).abs() < 1e-7);
        assert!((third::<f64>() - 1.0 / 3.0).abs() < 1e-16);
        let r: Rational = third();
        assert_eq!(r * Rational::from_count(3), Rational::from_count(1));
        assert_eq!(Rational::from_count(2).powu(10), Rational::from_count(1024));
    }
}
