//! Scalar abstraction shared by the constellation, analysis, channel and
//! simulation code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Real floating point type the library is generic over.
///
/// On top of `num_traits::Float` this adds the complementary error function
/// (not part of `num_traits`) and the two sampling primitives the Monte Carlo
/// code needs, so generic callers never have to name `rand_distr` bounds.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Complementary error function.
    fn erfc(self) -> Self;

    /// One draw from N(0, 1).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from U[0, 1).
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion from a count.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }

    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    #[inline]
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f64>()
    }
}

impl Scalar for f32 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }

    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    #[inline]
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f32>()
    }
}

/// Decibels to linear power ratio.
#[inline]
pub fn from_db<T: Scalar>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// Linear power ratio to decibels.
#[inline]
pub fn to_db<T: Scalar>(linear: T) -> T {
    T::lit(10.0) * linear.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_round_trip() {
        for &x in &[1e-6_f64, 0.5, 1.0, 16.0, 3.2e9] {
            assert!((from_db(to_db(x)) - x).abs() <= 1e-12 * x);
        }
        assert!((to_db(16.0_f64) - 12.041199826559248).abs() < 1e-12);
    }

    #[test]
    fn erfc_f32_tracks_f64() {
        for i in 0..60 {
            let x = i as f64 * 0.1;
            let a = Scalar::erfc(x);
            let b = Scalar::erfc(x as f32) as f64;
            assert!((a - b).abs() <= 1e-6 * a.max(1e-30) + 1e-7, "x = {x}");
        }
    }
}
