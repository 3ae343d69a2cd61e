//! BPSK modulation, AWGN corruption, symbol prior computation, delta-LLR
//! initialization and fixed-point quantization of channel values.

use crate::gf::{FieldSpec, GfSym};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Probability floor applied before logs so delta-LLRs stay finite.
pub const PROB_FLOOR: f64 = 1e-30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("code rate {0} is outside (0, 1]")]
    InvalidRate(f64),
}

/// Per-bit channel output for one codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelObservation {
    /// N*q real samples, one per transmitted bit.
    pub samples: Vec<f64>,
    /// Noise standard deviation the samples were produced with.
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorMode {
    /// Per-symbol probabilities, each VN vector sums to 1.
    Probability,
    /// Non-negative log ratios against the most likely symbol.
    DeltaLlr,
}

/// Per-VN length-g vectors in one of the two prior conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPriors {
    values: Vec<f64>,
    g: usize,
    mode: PriorMode,
}

impl SymbolPriors {
    pub fn mode(&self) -> PriorMode {
        self.mode
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn num_vns(&self) -> usize {
        self.values.len() / self.g
    }

    #[inline]
    pub fn vn(&self, n: usize) -> &[f64] {
        &self.values[n * self.g..(n + 1) * self.g]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn from_values(values: Vec<f64>, g: usize, mode: PriorMode) -> SymbolPriors {
        assert!(g > 0 && values.len().is_multiple_of(g), "prior length must be a multiple of g");
        SymbolPriors { values, g, mode }
    }
}

/// Maps each symbol to its q bits, MSB first, with bit 0 -> +1.0 and
/// bit 1 -> -1.0.
pub fn modulate_bpsk(codeword: &[GfSym], field: &FieldSpec) -> Vec<f64> {
    let q = field.q();
    let mut out = Vec::with_capacity(codeword.len() * q as usize);
    for sym in codeword {
        debug_assert!(field.contains(*sym));
        for b in (0..q).rev() {
            out.push(if (sym.0 >> b) & 1 == 0 { 1.0 } else { -1.0 });
        }
    }
    out
}

/// Adds AWGN at the given Eb/N0. The noise variance follows
/// sigma^2 = 1 / (2 * R * 10^(ebn0_db/10)) with R the code rate in
/// information bits per coded bit.
pub fn add_awgn(
    signal: &[f64],
    ebn0_db: f64,
    rate: f64,
    rng: &mut impl Rng,
) -> Result<ChannelObservation, ChannelError> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(ChannelError::InvalidRate(rate));
    }
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    let sigma = (1.0 / (2.0 * rate * ebn0)).sqrt();
    let samples = signal
        .iter()
        .map(|&s| s + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(ChannelObservation { samples, sigma })
}

/// The sigma = 0 limit: samples pass through unchanged.
pub fn add_awgn_noiseless(signal: &[f64]) -> ChannelObservation {
    ChannelObservation { samples: signal.to_vec(), sigma: 0.0 }
}

/// Computes probability-mode priors p(c_n = x | y_n) from per-bit logistic
/// factors, normalized to sum 1 per VN.
pub fn symbol_priors(obs: &ChannelObservation, field: &FieldSpec) -> SymbolPriors {
    let q = field.q() as usize;
    let g = field.order();
    assert!(obs.samples.len().is_multiple_of(q), "observation length must be a multiple of q");
    let n = obs.samples.len() / q;
    let sigma2 = obs.sigma * obs.sigma;
    let mut values = Vec::with_capacity(n * g);
    for vn in 0..n {
        let y = &obs.samples[vn * q..(vn + 1) * q];
        let mut sum = 0.0;
        let base = values.len();
        for x in 0..g {
            let mut p = 1.0;
            for (i, &yi) in y.iter().enumerate() {
                // MSB first: bit i of the pattern is bit (q-1-i) of x
                let bit = (x >> (q - 1 - i)) & 1;
                let b = if bit == 0 { -1.0 } else { 1.0 };
                let factor = 1.0 / (1.0 + (2.0 * yi * b / sigma2).exp());
                p *= if factor.is_finite() { factor } else { 0.0 };
            }
            let p = if p.is_finite() { p } else { 0.0 };
            values.push(p);
            sum += p;
        }
        if sum > 0.0 {
            for v in &mut values[base..] {
                *v /= sum;
            }
        } else {
            // cannot happen for finite samples, guarded anyway
            for v in &mut values[base..] {
                *v = 1.0 / g as f64;
            }
        }
    }
    SymbolPriors { values, g, mode: PriorMode::Probability }
}

/// Converts probability priors to the delta-LLR convention used by the
/// Min-Max decoder: gamma(x) = ln(p(eta) / p(x)) with eta the most likely
/// symbol, so gamma is non-negative with a zero at eta.
pub fn llr_init_minmax(priors: &SymbolPriors) -> SymbolPriors {
    assert_eq!(priors.mode, PriorMode::Probability, "delta-LLR init needs probability priors");
    let g = priors.g;
    let mut values = Vec::with_capacity(priors.values.len());
    for n in 0..priors.num_vns() {
        let p = priors.vn(n);
        let (eta, &pmax) = p
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let pmax = pmax.max(PROB_FLOOR);
        for (x, &px) in p.iter().enumerate() {
            if x == eta {
                values.push(0.0);
            } else {
                values.push((pmax / px.max(PROB_FLOOR)).ln().max(0.0));
            }
        }
    }
    SymbolPriors { values, g, mode: PriorMode::DeltaLlr }
}

/// Rounds to the nearest integer after scaling and saturates to i8.
pub fn quantize_i8(values: &[f64], scale: f64) -> Vec<i8> {
    assert!(scale > 0.0, "quantization scale must be positive");
    values
        .iter()
        .map(|&v| (v * scale).round().clamp(i8::MIN as f64, i8::MAX as f64) as i8)
        .collect()
}

/// Rounds to the nearest integer after scaling and saturates to i32.
pub fn quantize_i32(values: &[f64], scale: f64) -> Vec<i32> {
    assert!(scale > 0.0, "quantization scale must be positive");
    values
        .iter()
        .map(|&v| (v * scale).round().clamp(i32::MIN as f64, i32::MAX as f64) as i32)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::build_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn modulate_zero_codeword() {
        let f = build_field(2, None).unwrap();
        let s = modulate_bpsk(&[GfSym::ZERO; 4], &f);
        assert_eq!(s, vec![1.0; 8]);
    }

    #[test]
    fn modulate_msb_first() {
        let f = build_field(2, None).unwrap();
        // value 3 = 0b11 -> (-1, -1); value 2 = 0b10 -> (-1, +1)
        assert_eq!(modulate_bpsk(&[GfSym(3)], &f), vec![-1.0, -1.0]);
        assert_eq!(modulate_bpsk(&[GfSym(2)], &f), vec![-1.0, 1.0]);
        let f = build_field(3, None).unwrap();
        assert_eq!(modulate_bpsk(&[GfSym(0b100)], &f), vec![-1.0, 1.0, 1.0]);
    }

    #[test]
    fn awgn_sigma_mapping() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let obs = add_awgn(&[1.0; 16], 0.0, 0.5, &mut rng).unwrap();
        assert!((obs.sigma - 1.0).abs() < 1e-12);
        assert!(matches!(add_awgn(&[1.0], 0.0, 0.0, &mut rng), Err(ChannelError::InvalidRate(_))));
        assert!(matches!(add_awgn(&[1.0], 0.0, 1.5, &mut rng), Err(ChannelError::InvalidRate(_))));
    }

    #[test]
    fn awgn_deterministic_under_seed() {
        let sig = vec![1.0, -1.0, 1.0, 1.0];
        let a = add_awgn(&sig, 2.0, 0.5, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = add_awgn(&sig, 2.0, 0.5, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noiseless_passthrough() {
        let sig = vec![1.0, -1.0];
        let obs = add_awgn_noiseless(&sig);
        assert_eq!(obs.samples, sig);
        assert_eq!(obs.sigma, 0.0);
    }

    #[test]
    fn priors_uniform_for_zero_observation() {
        let f = build_field(2, None).unwrap();
        let obs = ChannelObservation { samples: vec![0.0; 4], sigma: 1.0 };
        let p = symbol_priors(&obs, &f);
        for n in 0..2 {
            for &v in p.vn(n) {
                assert!((v - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn priors_concentrate_on_strong_observation() {
        let f = build_field(2, None).unwrap();
        let obs = ChannelObservation { samples: vec![10.0, 10.0], sigma: 1.0 };
        let p = symbol_priors(&obs, &f);
        assert!(p.vn(0)[0] > 0.999);
    }

    #[test]
    fn priors_factorize_over_bits() {
        // direct 2-bit enumeration for GF(4)
        let f = build_field(2, None).unwrap();
        let y = [0.7, -0.3];
        let sigma = 0.8;
        let obs = ChannelObservation { samples: y.to_vec(), sigma };
        let p = symbol_priors(&obs, &f);
        let bit = |yi: f64, b: u8| {
            let s = if b == 0 { -1.0 } else { 1.0 };
            1.0 / (1.0 + (2.0 * yi * s / (sigma * sigma)).exp())
        };
        let mut expected = [0.0; 4];
        for x in 0..4u8 {
            expected[x as usize] = bit(y[0], (x >> 1) & 1) * bit(y[1], x & 1);
        }
        let sum: f64 = expected.iter().sum();
        for x in 0..4 {
            assert!((p.vn(0)[x] - expected[x] / sum).abs() < 1e-12);
        }
    }

    #[test]
    fn priors_sum_to_one() {
        let f = build_field(4, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sig = modulate_bpsk(&[GfSym(9); 8], &f);
        let obs = add_awgn(&sig, 1.0, 0.5, &mut rng).unwrap();
        let p = symbol_priors(&obs, &f);
        for n in 0..8 {
            let s: f64 = p.vn(n).iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn priors_invariant_under_bit_relabeling() {
        // swapping the two bits of every GF(4) pattern permutes the priors
        // consistently: prior(x) computed from swapped samples equals the
        // prior of the bit-swapped symbol from the original samples
        let f = build_field(2, None).unwrap();
        let y = [0.9, -1.4];
        let obs = ChannelObservation { samples: y.to_vec(), sigma: 1.0 };
        let p = symbol_priors(&obs, &f);
        let obs_swapped = ChannelObservation { samples: vec![y[1], y[0]], sigma: 1.0 };
        let ps = symbol_priors(&obs_swapped, &f);
        let swap = |x: usize| ((x & 1) << 1) | (x >> 1);
        for x in 0..4 {
            assert!((ps.vn(0)[x] - p.vn(0)[swap(x)]).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_llr_examples() {
        let uniform = SymbolPriors::from_values(vec![0.25; 4], 4, PriorMode::Probability);
        let g = llr_init_minmax(&uniform);
        assert!(g.values().iter().all(|&v| v == 0.0));

        let p = SymbolPriors::from_values(vec![0.7, 0.1, 0.1, 0.1], 4, PriorMode::Probability);
        let g = llr_init_minmax(&p);
        assert_eq!(g.vn(0)[0], 0.0);
        for x in 1..4 {
            assert!((g.vn(0)[x] - 7.0f64.ln()).abs() < 1e-12);
        }
        let zeros = g.vn(0).iter().filter(|&&v| v == 0.0).count();
        assert_eq!(zeros, 1);
    }

    #[test]
    fn delta_llr_nonnegative_min_zero() {
        let f = build_field(3, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sig = modulate_bpsk(&[GfSym(5); 16], &f);
        let obs = add_awgn(&sig, 2.0, 0.5, &mut rng).unwrap();
        let g = llr_init_minmax(&symbol_priors(&obs, &f));
        for n in 0..16 {
            let v = g.vn(n);
            assert!(v.iter().all(|&x| x >= 0.0));
            assert_eq!(v.iter().cloned().fold(f64::INFINITY, f64::min), 0.0);
        }
    }

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize_i8(&[0.0], 1.0), vec![0]);
        assert_eq!(quantize_i8(&[200.4], 1.0), vec![127]);
        assert_eq!(quantize_i8(&[-200.4], 1.0), vec![-128]);
        assert_eq!(quantize_i8(&[1.26], 100.0), vec![126]);
        assert_eq!(quantize_i32(&[1e12], 1.0), vec![i32::MAX]);
        assert_eq!(quantize_i32(&[-3.7], 2.0), vec![-7]);
    }

    #[test]
    fn quantize_monotone_and_idempotent() {
        let vals: Vec<f64> = (-300..300).map(|i| i as f64 * 0.7).collect();
        let q = quantize_i8(&vals, 1.3);
        for w in q.windows(2) {
            assert!(w[0] <= w[1]);
        }
        // already-saturated integers are fixed points at scale 1
        let ints: Vec<f64> = q.iter().map(|&x| x as f64).collect();
        let q2 = quantize_i8(&ints, 1.0);
        assert_eq!(q, q2);
    }
}
