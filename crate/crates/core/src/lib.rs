//! Non-binary LDPC decoding over GF(2^q), q = 2..8.
//!
//! The crate provides two message-passing decoders, a transform-domain
//! sum-product decoder ([`fft_spa`]) and an LLR-domain min-max decoder
//! ([`min_max`]), in double-precision and two fixed-point arithmetic modes,
//! together with code construction and I/O ([`code`]), a BPSK/AWGN channel
//! model ([`channel`]), and operation-count instrumentation, staged execution
//! and multicodeword batch decoding ([`perf`]).

pub mod arith;
pub mod channel;
pub mod cli;
pub mod code;
mod exec;
pub mod fft_spa;
pub mod gf;
pub mod min_max;
pub mod perf;

pub use arith::ArithMode;
pub use code::Codeword;
pub use gf::{FieldSpec, GfSym};
pub use perf::OpCounters;

use thiserror::Error;

/// Which decoding algorithm to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    FftSpa,
    MinMax,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::FftSpa => "fft-spa",
            Algorithm::MinMax => "min-max",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fft-spa" | "fft_spa" | "spa" => Ok(Algorithm::FftSpa),
            "min-max" | "min_max" | "mm" => Ok(Algorithm::MinMax),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("max_iters must be at least 1")]
pub struct ConfigError;

/// Decoder run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeConfig {
    max_iters: u32,
    pub early_stop: bool,
    pub arith: ArithMode,
    pub counters_enabled: bool,
    /// Delta-LLR quantization scale for the fixed-point min-max modes.
    /// Defaults to 8 for i8 and 2^16 for i32.
    pub llr_scale: Option<f64>,
}

impl DecodeConfig {
    pub fn new(max_iters: u32) -> Result<DecodeConfig, ConfigError> {
        if max_iters == 0 {
            return Err(ConfigError);
        }
        Ok(DecodeConfig {
            max_iters,
            early_stop: true,
            arith: ArithMode::F64,
            counters_enabled: false,
            llr_scale: None,
        })
    }

    pub fn max_iters(&self) -> u32 {
        self.max_iters
    }

    pub fn with_early_stop(mut self, on: bool) -> Self {
        self.early_stop = on;
        self
    }

    pub fn with_arith(mut self, mode: ArithMode) -> Self {
        self.arith = mode;
        self
    }

    pub fn with_counters(mut self, on: bool) -> Self {
        self.counters_enabled = on;
        self
    }

    pub fn with_llr_scale(mut self, scale: f64) -> Self {
        self.llr_scale = Some(scale);
        self
    }
}

/// Outcome of one decode.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub decoded: Codeword,
    pub iterations_run: u32,
    pub syndrome_ok: bool,
    /// Present when the run had counters enabled.
    pub counters: Option<OpCounters>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_iters_rejected() {
        assert_eq!(DecodeConfig::new(0), Err(ConfigError));
        assert!(DecodeConfig::new(1).is_ok());
    }
}
