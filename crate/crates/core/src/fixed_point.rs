//! Bit-exact emulation of Q-format fixed-point arithmetic.
//!
//! A format is described by its word length `w`, signedness `s`, integer
//! bits `r` and fractional bits `p`, with `w = s + r + p`. Values are held as
//! a 64-bit signed mantissa `raw` and represent `raw * 2^-p`. Rounding is to
//! nearest with ties away from zero; any result outside the representable
//! range is reported as [`Error::Overflow`] rather than wrapped or saturated.
//!
//! There is deliberately no division.

use std::fmt;

use crate::error::{Error, Result};

/// Q-format descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedFormat {
    word_bits: u8,
    signed: bool,
    int_bits: u8,
    frac_bits: u8,
}

impl FixedFormat {
    /// Builds a format from its word length, signedness and fractional bits;
    /// the integer bits are whatever remains.
    pub fn new(word_bits: u32, signed: bool, frac_bits: u32) -> Result<Self> {
        let sign = u32::from(signed);
        if word_bits > 64 {
            return Err(Error::InvalidFormat(format!("word length {word_bits} exceeds 64 bits")));
        }
        if !signed && word_bits > 63 {
            // mantissas live in an i64
            return Err(Error::InvalidFormat("unsigned formats are limited to 63 bits".into()));
        }
        if frac_bits < 1 {
            return Err(Error::InvalidFormat("at least one fractional bit is required".into()));
        }
        if word_bits < sign + frac_bits {
            return Err(Error::InvalidFormat(format!(
                "{word_bits}-bit word cannot hold {frac_bits} fractional bits{}",
                if signed { " and a sign bit" } else { "" }
            )));
        }
        Ok(Self {
            word_bits: word_bits as u8,
            signed,
            int_bits: (word_bits - sign - frac_bits) as u8,
            frac_bits: frac_bits as u8,
        })
    }

    /// Signed format with `int_bits` integer and `frac_bits` fractional bits.
    pub fn signed(int_bits: u32, frac_bits: u32) -> Result<Self> {
        Self::new(1 + int_bits + frac_bits, true, frac_bits)
    }

    pub fn word_bits(&self) -> u32 {
        self.word_bits.into()
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn int_bits(&self) -> u32 {
        self.int_bits.into()
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits.into()
    }

    /// Distance between successive representable values, `2^-p`.
    pub fn step(&self) -> f64 {
        (-(self.frac_bits as f64)).exp2()
    }

    /// Worst-case rounding error of a single quantization or product, `2^-(p+1)`.
    pub fn rounding_bound(&self) -> f64 {
        0.5 * self.step()
    }

    pub fn min_raw(&self) -> i64 {
        if self.signed {
            // -2^(r+p); for w = 64 this is i64::MIN
            (-1i128 << (self.int_bits + self.frac_bits)) as i64
        } else {
            0
        }
    }

    pub fn max_raw(&self) -> i64 {
        ((1i128 << (self.int_bits + self.frac_bits)) - 1) as i64
    }

    /// Smallest representable value.
    pub fn min_value(&self) -> f64 {
        self.min_raw() as f64 * self.step()
    }

    /// Largest representable value, `2^r - 2^-p`.
    pub fn max_value(&self) -> f64 {
        // computed from parts so that w = 64 does not round up to 2^r
        (self.int_bits as f64).exp2() - self.step()
    }

    pub(crate) fn check_raw(&self, raw: i128) -> Result<i64> {
        if raw < i128::from(self.min_raw()) || raw > i128::from(self.max_raw()) {
            Err(Error::Overflow { value: raw as f64 * self.step(), format: *self })
        } else {
            Ok(raw as i64)
        }
    }

    /// Wraps an already-scaled mantissa, checking it against the range.
    pub fn from_raw(&self, raw: i64) -> Result<FixedScalar> {
        let raw = self.check_raw(i128::from(raw))?;
        Ok(FixedScalar { raw, format: *self })
    }

    /// Nearest representable value to `x`, ties away from zero.
    pub fn quantize(&self, x: f64) -> Result<FixedScalar> {
        if !x.is_finite() {
            return Err(Error::Overflow { value: x, format: *self });
        }
        // scaling by a power of two is exact, and f64::round rounds half away from zero
        let scaled = (x * (self.frac_bits as f64).exp2()).round();
        let limit = ((self.int_bits + self.frac_bits) as f64).exp2();
        let lo = if self.signed { -limit } else { 0.0 };
        if scaled < lo || scaled >= limit {
            return Err(Error::Overflow { value: x, format: *self });
        }
        Ok(FixedScalar { raw: scaled as i64, format: *self })
    }

    pub fn zero(&self) -> FixedScalar {
        FixedScalar { raw: 0, format: *self }
    }
}

impl fmt::Display for FixedFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}Q{}.{} ({} bits)",
            if self.signed { "" } else { "U" },
            self.int_bits,
            self.frac_bits,
            self.word_bits
        )
    }
}

/// A fixed-point number: mantissa plus the format it lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedScalar {
    raw: i64,
    format: FixedFormat,
}

impl FixedScalar {
    pub fn raw(&self) -> i64 {
        self.raw
    }

    pub fn format(&self) -> FixedFormat {
        self.format
    }

    pub fn to_f64(&self) -> f64 {
        self.raw as f64 * self.format.step()
    }

    fn same_format(&self, other: &Self) -> Result<FixedFormat> {
        if self.format != other.format {
            return Err(Error::FormatMismatch(self.format, other.format));
        }
        Ok(self.format)
    }

    /// Exact sum; only overflow can go wrong.
    pub fn checked_add(self, other: Self) -> Result<Self> {
        let fmt = self.same_format(&other)?;
        let raw = fmt.check_raw(i128::from(self.raw) + i128::from(other.raw))?;
        Ok(Self { raw, format: fmt })
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        let fmt = self.same_format(&other)?;
        let raw = fmt.check_raw(i128::from(self.raw) - i128::from(other.raw))?;
        Ok(Self { raw, format: fmt })
    }

    /// Product rounded to nearest (ties away from zero).
    pub fn checked_mul(self, other: Self) -> Result<Self> {
        let fmt = self.same_format(&other)?;
        let exact = i128::from(self.raw) * i128::from(other.raw);
        let raw = fmt.check_raw(round_shift(exact, fmt.frac_bits()))?;
        Ok(Self { raw, format: fmt })
    }

    pub fn max_zero(self) -> Self {
        Self { raw: self.raw.max(0), format: self.format }
    }

    pub fn is_negative(&self) -> bool {
        self.raw < 0
    }
}

/// `v / 2^shift` rounded to nearest, ties away from zero.
pub(crate) fn round_shift(v: i128, shift: u32) -> i128 {
    let half = 1i128 << (shift - 1);
    if v >= 0 {
        (v + half) >> shift
    } else {
        -((-v + half) >> shift)
    }
}

pub fn quantize(x: f64, format: FixedFormat) -> Result<FixedScalar> {
    format.quantize(x)
}

pub fn fxp_add(a: FixedScalar, b: FixedScalar) -> Result<FixedScalar> {
    a.checked_add(b)
}

pub fn fxp_mul(a: FixedScalar, b: FixedScalar) -> Result<FixedScalar> {
    a.checked_mul(b)
}

/// Inner product accumulated in ascending index order, each term rounded by
/// [`fxp_mul`] and summed with [`fxp_add`]. An empty product is zero in the
/// format of `zero`.
pub fn fxp_inner_product(x: &[FixedScalar], y: &[FixedScalar], zero: FixedFormat) -> Result<FixedScalar> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!("inner product of lengths {} and {}", x.len(), y.len())));
    }
    x.iter()
        .zip(y)
        .try_fold(zero.zero(), |acc, (a, b)| acc.checked_add(a.checked_mul(*b)?))
}

/// Quantizes a slice element-wise.
pub fn quantize_slice(xs: &[f64], format: FixedFormat) -> Result<Vec<FixedScalar>> {
    xs.iter().map(|&x| format.quantize(x)).collect()
}
