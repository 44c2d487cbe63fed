use std::cell::Cell;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fixed_point::{round_shift, FixedFormat};

/// Scalar arithmetic the solver iteration runs in. Only additions,
/// multiply-accumulates and the projection onto the nonnegative orthant are
/// needed: the iteration is division-free.
pub trait Arithmetic {
    type Scalar: Copy + Debug + PartialEq;

    fn encode(&self, x: f64) -> Result<Self::Scalar>;
    fn decode(&self, x: Self::Scalar) -> f64;
    fn zero(&self) -> Self::Scalar;
    fn add(&self, a: Self::Scalar, b: Self::Scalar) -> Result<Self::Scalar>;
    fn sub(&self, a: Self::Scalar, b: Self::Scalar) -> Result<Self::Scalar>;
    /// `acc + a * b`, with the product rounded before the addition.
    fn mac(&self, acc: Self::Scalar, a: Self::Scalar, b: Self::Scalar) -> Result<Self::Scalar>;
    fn positive_part(&self, a: Self::Scalar) -> Self::Scalar;
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Float64;

impl Arithmetic for Float64 {
    type Scalar = f64;

    fn encode(&self, x: f64) -> Result<f64> {
        Ok(x)
    }
    fn decode(&self, x: f64) -> f64 {
        x
    }
    fn zero(&self) -> f64 {
        0.0
    }
    fn add(&self, a: f64, b: f64) -> Result<f64> {
        Ok(a + b)
    }
    fn sub(&self, a: f64, b: f64) -> Result<f64> {
        Ok(a - b)
    }
    fn mac(&self, acc: f64, a: f64, b: f64) -> Result<f64> {
        // no fused multiply-add, to mirror the two-step fixed-point path
        Ok(acc + a * b)
    }
    fn positive_part(&self, a: f64) -> f64 {
        a.max(0.0)
    }
}

/// Q-format arithmetic on raw mantissas (`value = raw * 2^-p`) with the
/// rounding and overflow rules of [`FixedScalar`]: products rounded to
/// nearest with ties away from zero, every result range-checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint(pub FixedFormat);

impl FixedPoint {
    #[inline]
    fn check(&self, raw: i128) -> Result<i64> {
        if raw < i128::from(self.0.min_raw()) || raw > i128::from(self.0.max_raw()) {
            return self.0.check_raw(raw);
        }
        Ok(raw as i64)
    }
}

impl Arithmetic for FixedPoint {
    type Scalar = i64;

    fn encode(&self, x: f64) -> Result<i64> {
        Ok(self.0.quantize(x)?.raw())
    }
    fn decode(&self, x: i64) -> f64 {
        x as f64 * self.0.step()
    }
    fn zero(&self) -> i64 {
        0
    }
    #[inline]
    fn add(&self, a: i64, b: i64) -> Result<i64> {
        self.check(i128::from(a) + i128::from(b))
    }
    #[inline]
    fn sub(&self, a: i64, b: i64) -> Result<i64> {
        self.check(i128::from(a) - i128::from(b))
    }
    #[inline]
    fn mac(&self, acc: i64, a: i64, b: i64) -> Result<i64> {
        let p = self.check(round_shift(i128::from(a) * i128::from(b), self.0.frac_bits()))?;
        self.add(acc, p)
    }
    fn positive_part(&self, a: i64) -> i64 {
        a.max(0)
    }
}

/// Counts additions and multiply-accumulates passing through it. Projection
/// (a comparison) and `sub` (used only for monitoring) are not counted.
#[derive(Debug)]
pub struct Instrumented<A> {
    inner: A,
    ops: Cell<u64>,
}

impl<A: Arithmetic> Instrumented<A> {
    pub fn new(inner: A) -> Self {
        Self { inner, ops: Cell::new(0) }
    }

    pub fn ops(&self) -> u64 {
        self.ops.get()
    }

    pub fn reset(&self) {
        self.ops.set(0);
    }

    pub fn inner(&self) -> &A {
        &self.inner
    }

    fn tick(&self) {
        self.ops.set(self.ops.get() + 1);
    }
}

impl<A: Arithmetic> Arithmetic for Instrumented<A> {
    type Scalar = A::Scalar;

    fn encode(&self, x: f64) -> Result<A::Scalar> {
        self.inner.encode(x)
    }
    fn decode(&self, x: A::Scalar) -> f64 {
        self.inner.decode(x)
    }
    fn zero(&self) -> A::Scalar {
        self.inner.zero()
    }
    fn add(&self, a: A::Scalar, b: A::Scalar) -> Result<A::Scalar> {
        self.tick();
        self.inner.add(a, b)
    }
    fn sub(&self, a: A::Scalar, b: A::Scalar) -> Result<A::Scalar> {
        self.inner.sub(a, b)
    }
    fn mac(&self, acc: A::Scalar, a: A::Scalar, b: A::Scalar) -> Result<A::Scalar> {
        self.tick();
        self.inner.mac(acc, a, b)
    }
    fn positive_part(&self, a: A::Scalar) -> A::Scalar {
        self.inner.positive_part(a)
    }
}

/// Runtime choice of arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArithmeticKind {
    #[default]
    Float64,
    Fixed {
        word_bits: u32,
        frac_bits: u32,
    },
}

impl ArithmeticKind {
    pub fn fixed(word_bits: u32, frac_bits: u32) -> Self {
        ArithmeticKind::Fixed { word_bits, frac_bits }
    }

    /// Signed format for the fixed variant.
    pub fn format(&self) -> Result<Option<FixedFormat>> {
        match *self {
            ArithmeticKind::Float64 => Ok(None),
            ArithmeticKind::Fixed { word_bits, frac_bits } => FixedFormat::new(word_bits, true, frac_bits).map(Some),
        }
    }

    /// Bytes per stored scalar.
    pub fn word_bytes(&self) -> usize {
        match *self {
            ArithmeticKind::Float64 => 8,
            ArithmeticKind::Fixed { word_bits, .. } => (word_bits as usize).div_ceil(8),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_ticks_on_add_and_mac_only() {
        let a = Instrumented::new(Float64);
        let x = a.mac(1.0, 2.0, 3.0).unwrap();
        let y = a.add(x, 1.0).unwrap();
        let _ = a.sub(y, 1.0).unwrap();
        let _ = a.positive_part(-1.0);
        assert_eq!(y, 8.0);
        assert_eq!(a.ops(), 2);
        a.reset();
        assert_eq!(a.ops(), 0);
    }

    #[test]
    fn fixed_mac_rounds_product_then_adds() {
        let f = FixedPoint(FixedFormat::signed(3, 4).unwrap());
        let acc = f.encode(1.0).unwrap();
        let tiny = f.encode(0.0625).unwrap();
        // 0.0625^2 rounds to zero before the addition
        assert_eq!(f.decode(f.mac(acc, tiny, tiny).unwrap()), 1.0);
        let big = f.encode(4.0).unwrap();
        assert!(f.mac(acc, big, big).is_err());
    }

    #[test]
    fn raw_path_matches_fixed_scalar() {
        let fmt = FixedFormat::signed(15, 16).unwrap();
        let f = FixedPoint(fmt);
        let vals = [-3.7, -1.0 / 3.0, -0.00001, 0.0, 0.00002, 0.5, 1.0 / 7.0, 123.456];
        for &a in &vals {
            for &b in &vals {
                let (qa, qb) = (fmt.quantize(a).unwrap(), fmt.quantize(b).unwrap());
                let acc = fmt.quantize(0.25).unwrap();
                let want = acc.checked_add(qa.checked_mul(qb).unwrap()).unwrap();
                let got = f.mac(f.encode(0.25).unwrap(), f.encode(a).unwrap(), f.encode(b).unwrap()).unwrap();
                assert_eq!(got, want.raw());
            }
        }
    }

    #[test]
    fn kind_formats() {
        assert_eq!(ArithmeticKind::Float64.format().unwrap(), None);
        let f = ArithmeticKind::fixed(32, 16).format().unwrap().unwrap();
        assert_eq!((f.int_bits(), f.frac_bits()), (15, 16));
        assert_eq!(ArithmeticKind::fixed(32, 16).word_bytes(), 4);
        assert!(ArithmeticKind::fixed(16, 16).format().is_err());
    }
}
