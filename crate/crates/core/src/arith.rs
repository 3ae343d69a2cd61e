//! Arithmetic backends for the decoders: double precision, 32-bit and 8-bit
//! fixed point.
//!
//! The probability-domain backend stores messages as unsigned Qf fixed point
//! (Q16 for 32-bit, Q6 for 8-bit) and widens transform intermediates to twice
//! the storage width. Products are rescaled back to the unit Q format after
//! every multiply, so partial products never grow past one message worth of
//! magnitude. The LLR-domain backend keeps everything in saturating signed
//! integers; only add and compare are needed there.

use std::fmt::Debug;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithMode {
    F64,
    Fixed32,
    Fixed8,
}

impl ArithMode {
    pub fn name(self) -> &'static str {
        match self {
            ArithMode::F64 => "f64",
            ArithMode::Fixed32 => "i32",
            ArithMode::Fixed8 => "i8",
        }
    }
}

impl std::str::FromStr for ArithMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f64" | "float" | "float64" => Ok(ArithMode::F64),
            "i32" | "fixed32" => Ok(ArithMode::Fixed32),
            "i8" | "fixed8" => Ok(ArithMode::Fixed8),
            other => Err(format!("unknown arithmetic mode {other:?}")),
        }
    }
}

/// Probability-domain arithmetic for the transform-based decoder.
pub trait SpaArith: Send + Sync + 'static {
    /// Stored message entry.
    type Msg: Copy + Default + PartialEq + Debug + Send + Sync;
    /// Widened transform/product accumulator.
    type Acc: Copy + Default + PartialEq + Debug + Send + Sync;

    const MODE: ArithMode;

    fn from_prob(p: f64) -> Self::Msg;
    fn widen(m: Self::Msg) -> Self::Acc;
    /// Narrows back to storage width, clamping to the valid message range.
    fn narrow(a: Self::Acc) -> Self::Msg;
    fn add(a: Self::Acc, b: Self::Acc) -> Self::Acc;
    fn sub(a: Self::Acc, b: Self::Acc) -> Self::Acc;
    /// Product rescaled to the unit Q format.
    fn mul(a: Self::Acc, b: Self::Acc) -> Self::Acc;
    /// Division by 2^q (the inverse-transform scale).
    fn div_pow2(a: Self::Acc, q: u32) -> Self::Acc;
    /// The fixed-point "1.0".
    fn unit() -> Self::Acc;
    /// Rescales the vector so it sums to the unit. Returns false when the sum
    /// is zero and the vector was left untouched.
    fn normalize(v: &mut [Self::Acc]) -> bool;
    fn uniform(g: usize) -> Self::Acc;
    /// Whether the mode renormalizes check-node outputs (fixed point only).
    fn renorm_after_cnp() -> bool;
    /// Strictly-greater comparison for the argmax decision.
    fn gt(a: Self::Acc, b: Self::Acc) -> bool;
}

pub struct SpaF64;

impl SpaArith for SpaF64 {
    type Msg = f64;
    type Acc = f64;

    const MODE: ArithMode = ArithMode::F64;

    #[inline]
    fn from_prob(p: f64) -> f64 {
        p
    }

    #[inline]
    fn widen(m: f64) -> f64 {
        m
    }

    #[inline]
    fn narrow(a: f64) -> f64 {
        a
    }

    #[inline]
    fn add(a: f64, b: f64) -> f64 {
        a + b
    }

    #[inline]
    fn sub(a: f64, b: f64) -> f64 {
        a - b
    }

    #[inline]
    fn mul(a: f64, b: f64) -> f64 {
        a * b
    }

    #[inline]
    fn div_pow2(a: f64, q: u32) -> f64 {
        a / (1u64 << q) as f64
    }

    #[inline]
    fn unit() -> f64 {
        1.0
    }

    fn normalize(v: &mut [f64]) -> bool {
        let s: f64 = v.iter().sum();
        if s > 0.0 && s.is_finite() {
            for x in v {
                *x /= s;
            }
            true
        } else {
            false
        }
    }

    #[inline]
    fn uniform(g: usize) -> f64 {
        1.0 / g as f64
    }

    #[inline]
    fn renorm_after_cnp() -> bool {
        false
    }

    #[inline]
    fn gt(a: f64, b: f64) -> bool {
        a > b
    }
}

/// Q16 probabilities in i32 storage, i64 intermediates.
pub struct SpaFixed32;

pub const Q16_UNIT: i64 = 1 << 16;

impl SpaArith for SpaFixed32 {
    type Msg = i32;
    type Acc = i64;

    const MODE: ArithMode = ArithMode::Fixed32;

    #[inline]
    fn from_prob(p: f64) -> i32 {
        (p * Q16_UNIT as f64).round().clamp(0.0, Q16_UNIT as f64) as i32
    }

    #[inline]
    fn widen(m: i32) -> i64 {
        m as i64
    }

    #[inline]
    fn narrow(a: i64) -> i32 {
        a.clamp(0, Q16_UNIT) as i32
    }

    #[inline]
    fn add(a: i64, b: i64) -> i64 {
        a + b
    }

    #[inline]
    fn sub(a: i64, b: i64) -> i64 {
        a - b
    }

    #[inline]
    fn mul(a: i64, b: i64) -> i64 {
        (a * b) >> 16
    }

    #[inline]
    fn div_pow2(a: i64, q: u32) -> i64 {
        a >> q
    }

    #[inline]
    fn unit() -> i64 {
        Q16_UNIT
    }

    fn normalize(v: &mut [i64]) -> bool {
        let s: i64 = v.iter().sum();
        if s > 0 {
            for x in v {
                *x = (*x << 16) / s;
            }
            true
        } else {
            false
        }
    }

    #[inline]
    fn uniform(g: usize) -> i64 {
        Q16_UNIT / g as i64
    }

    #[inline]
    fn renorm_after_cnp() -> bool {
        true
    }

    #[inline]
    fn gt(a: i64, b: i64) -> bool {
        a > b
    }
}

/// Q6 probabilities in i8 storage, i16 intermediates.
pub struct SpaFixed8;

pub const Q6_UNIT: i16 = 1 << 6;

impl SpaArith for SpaFixed8 {
    type Msg = i8;
    type Acc = i16;

    const MODE: ArithMode = ArithMode::Fixed8;

    #[inline]
    fn from_prob(p: f64) -> i8 {
        (p * Q6_UNIT as f64).round().clamp(0.0, Q6_UNIT as f64) as i8
    }

    #[inline]
    fn widen(m: i8) -> i16 {
        m as i16
    }

    #[inline]
    fn narrow(a: i16) -> i8 {
        a.clamp(0, Q6_UNIT) as i8
    }

    #[inline]
    fn add(a: i16, b: i16) -> i16 {
        a + b
    }

    #[inline]
    fn sub(a: i16, b: i16) -> i16 {
        a - b
    }

    #[inline]
    fn mul(a: i16, b: i16) -> i16 {
        ((a as i32 * b as i32) >> 6) as i16
    }

    #[inline]
    fn div_pow2(a: i16, q: u32) -> i16 {
        a >> q
    }

    #[inline]
    fn unit() -> i16 {
        Q6_UNIT
    }

    fn normalize(v: &mut [i16]) -> bool {
        let s: i32 = v.iter().map(|&x| x as i32).sum();
        if s > 0 {
            for x in v {
                *x = (((*x as i32) << 6) / s) as i16;
            }
            true
        } else {
            false
        }
    }

    #[inline]
    fn uniform(g: usize) -> i16 {
        Q6_UNIT / g as i16
    }

    #[inline]
    fn renorm_after_cnp() -> bool {
        true
    }

    #[inline]
    fn gt(a: i16, b: i16) -> bool {
        a > b
    }
}

/// LLR-domain arithmetic for the Min-Max decoder. Implementations carry
/// their quantization scale, so the methods take `&self`.
pub trait MmArith: Send + Sync {
    type Llr: Copy + Default + PartialEq + PartialOrd + Debug + Send + Sync;

    const MODE: ArithMode;

    fn quantize_gamma(&self, gamma: f64) -> Self::Llr;
    /// Saturating addition; values stay non-negative.
    fn add_sat(a: Self::Llr, b: Self::Llr) -> Self::Llr;
    /// a - b with a >= b.
    fn sub(a: Self::Llr, b: Self::Llr) -> Self::Llr;
    fn min(a: Self::Llr, b: Self::Llr) -> Self::Llr;
    fn max(a: Self::Llr, b: Self::Llr) -> Self::Llr;
    /// Upper sentinel for min scans.
    fn max_value() -> Self::Llr;
}

pub struct MmF64;

impl MmArith for MmF64 {
    type Llr = f64;

    const MODE: ArithMode = ArithMode::F64;

    #[inline]
    fn quantize_gamma(&self, gamma: f64) -> f64 {
        gamma
    }

    #[inline]
    fn add_sat(a: f64, b: f64) -> f64 {
        a + b
    }

    #[inline]
    fn sub(a: f64, b: f64) -> f64 {
        a - b
    }

    #[inline]
    fn min(a: f64, b: f64) -> f64 {
        if b < a {
            b
        } else {
            a
        }
    }

    #[inline]
    fn max(a: f64, b: f64) -> f64 {
        if b > a {
            b
        } else {
            a
        }
    }

    #[inline]
    fn max_value() -> f64 {
        f64::INFINITY
    }
}

/// Default delta-LLR quantization scales.
pub const MM_SCALE_I8: f64 = 8.0;
pub const MM_SCALE_I32: f64 = 65536.0;

pub struct MmFixed32 {
    pub scale: f64,
}

impl Default for MmFixed32 {
    fn default() -> Self {
        MmFixed32 { scale: MM_SCALE_I32 }
    }
}

impl MmArith for MmFixed32 {
    type Llr = i32;

    const MODE: ArithMode = ArithMode::Fixed32;

    #[inline]
    fn quantize_gamma(&self, gamma: f64) -> i32 {
        (gamma * self.scale).round().clamp(0.0, i32::MAX as f64) as i32
    }

    #[inline]
    fn add_sat(a: i32, b: i32) -> i32 {
        a.saturating_add(b)
    }

    #[inline]
    fn sub(a: i32, b: i32) -> i32 {
        a - b
    }

    #[inline]
    fn min(a: i32, b: i32) -> i32 {
        a.min(b)
    }

    #[inline]
    fn max(a: i32, b: i32) -> i32 {
        a.max(b)
    }

    #[inline]
    fn max_value() -> i32 {
        i32::MAX
    }
}

pub struct MmFixed8 {
    pub scale: f64,
}

impl Default for MmFixed8 {
    fn default() -> Self {
        MmFixed8 { scale: MM_SCALE_I8 }
    }
}

impl MmArith for MmFixed8 {
    type Llr = i8;

    const MODE: ArithMode = ArithMode::Fixed8;

    #[inline]
    fn quantize_gamma(&self, gamma: f64) -> i8 {
        (gamma * self.scale).round().clamp(0.0, i8::MAX as f64) as i8
    }

    #[inline]
    fn add_sat(a: i8, b: i8) -> i8 {
        a.saturating_add(b)
    }

    #[inline]
    fn sub(a: i8, b: i8) -> i8 {
        a - b
    }

    #[inline]
    fn min(a: i8, b: i8) -> i8 {
        a.min(b)
    }

    #[inline]
    fn max(a: i8, b: i8) -> i8 {
        a.max(b)
    }

    #[inline]
    fn max_value() -> i8 {
        i8::MAX
    }
}
