//! Rounded scalar arithmetic.
//!
//! Every kernel that has to run in a reduced precision is written once,
//! generic over [`Arith`]. Values are carried as `f64` and each operation
//! result is rounded to the target format before it is used again. Rounding
//! a correctly rounded binary64 result to binary32 or binary16 is the same as
//! rounding the exact result, because binary64 carries more than
//! `2p + 2` significand bits for both targets, so this reproduces native
//! arithmetic in the narrow format exactly. No fused multiply-add is used.

pub trait Arith: Copy + Default + Send + Sync + 'static {
    const NAME: &'static str;
    /// Largest finite value of the format.
    const MAX: f64;

    fn round(x: f64) -> f64;

    #[inline(always)]
    fn add(a: f64, b: f64) -> f64 {
        Self::round(a + b)
    }
    #[inline(always)]
    fn sub(a: f64, b: f64) -> f64 {
        Self::round(a - b)
    }
    #[inline(always)]
    fn mul(a: f64, b: f64) -> f64 {
        Self::round(a * b)
    }
    #[inline(always)]
    fn div(a: f64, b: f64) -> f64 {
        Self::round(a / b)
    }
    #[inline(always)]
    fn sqrt(a: f64) -> f64 {
        Self::round(a.sqrt())
    }
    /// `acc + a*b` with two roundings.
    #[inline(always)]
    fn mul_add(acc: f64, a: f64, b: f64) -> f64 {
        Self::add(acc, Self::mul(a, b))
    }
    /// `acc - a*b` with two roundings.
    #[inline(always)]
    fn mul_sub(acc: f64, a: f64, b: f64) -> f64 {
        Self::sub(acc, Self::mul(a, b))
    }

    fn dot(x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .fold(0.0, |acc, (&a, &b)| Self::mul_add(acc, a, b))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Binary64;

#[derive(Debug, Clone, Copy, Default)]
pub struct Binary32;

#[derive(Debug, Clone, Copy, Default)]
pub struct Binary16;

impl Arith for Binary64 {
    const NAME: &'static str = "binary64";
    const MAX: f64 = f64::MAX;

    #[inline(always)]
    fn round(x: f64) -> f64 {
        x
    }

    // Plain sequential dot product; the fold above would be identical but
    // this keeps the hot loop free of the identity call in debug builds.
    fn dot(x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (&a, &b) in x.iter().zip(y) {
            acc += a * b;
        }
        acc
    }
}

impl Arith for Binary32 {
    const NAME: &'static str = "binary32";
    const MAX: f64 = f32::MAX as f64;

    #[inline(always)]
    fn round(x: f64) -> f64 {
        x as f32 as f64
    }
}

impl Arith for Binary16 {
    const NAME: &'static str = "binary16";
    const MAX: f64 = 65504.0;

    #[inline(always)]
    fn round(x: f64) -> f64 {
        round_binary16(x)
    }
}

/// Round to nearest binary16, ties to even, straight from binary64.
///
/// Conversions that go through binary32 first round twice and can land on a
/// binary16 midpoint that the original value was not on.
fn round_binary16(x: f64) -> f64 {
    let a = x.abs();
    if !a.is_finite() || a == 0.0 {
        return x;
    }
    // Halfway between 65504 and 2^16 rounds to infinity.
    if a >= 65520.0 {
        return f64::INFINITY.copysign(x);
    }
    // Spacing of binary16 numbers around `a`; subnormals share 2^-24.
    let exp = ((a.to_bits() >> 52) as i32 - 1023).max(-14);
    let quantum = f64::from_bits(((exp - 10 + 1023) as u64) << 52);
    ((a / quantum).round_ties_even() * quantum).copysign(x)
}
