//! Operation-count instrumentation, the closed-form complexity model,
//! staged execution with barrier counting, and multicodeword batch decoding.
//!
//! # Counting convention
//!
//! Counters tally executed loop bodies at block granularity with fixed
//! per-body charges:
//!
//! * transform butterflies are counted in multiply-accumulate form, one
//!   addition plus one multiplication plus one memory transaction per output
//!   element;
//! * product blocks charge one multiplication, one addition and one memory
//!   transaction per included factor per output element, regardless of how
//!   the fused forward/backward schedule shares the work;
//! * each min-max candidate evaluation charges one comparison, one addition
//!   (the constraint index update) and four memory transactions;
//! * boundary copies charge three memory transactions per element;
//! * loop control charges one addition and one comparison per iteration of
//!   each nesting level of a block's canonical (node, edge, symbol) loops;
//! * exclusion sums in the LLR-domain variable-node update charge one
//!   addition per included term plus one for the channel term and one for
//!   the normalization shift, and one comparison per element for the min
//!   scan.
//!
//! Initialization, a-posteriori computation, hard decision and syndrome
//! checks are not counted. The fixed-point renormalization after check-node
//! processing is tallied in a separate diagnostic block
//! ([`Block::FixedPointRenorm`]) outside the model comparison.

use crate::channel::{self, SymbolPriors};
use crate::code::{SystematicEncoder, TannerGraph};
use crate::fft_spa;
use crate::min_max;
use crate::{Algorithm, DecodeConfig, DecodeResult};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PerfError {
    #[error("the decode ran without counters enabled")]
    CountersDisabled,
}

/// One bundle of operation tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CounterSet {
    pub additions: u64,
    pub multiplications: u64,
    pub divisions: u64,
    pub comparisons: u64,
    pub memory_transactions: u64,
    pub barriers: u64,
}

impl CounterSet {
    pub fn ops(&self) -> u64 {
        self.additions + self.multiplications + self.divisions + self.comparisons
    }

    /// Additions, multiplications and divisions only.
    pub fn arith_ops(&self) -> u64 {
        self.additions + self.multiplications + self.divisions
    }

    pub fn scaled(&self, k: u64) -> CounterSet {
        CounterSet {
            additions: self.additions * k,
            multiplications: self.multiplications * k,
            divisions: self.divisions * k,
            comparisons: self.comparisons * k,
            memory_transactions: self.memory_transactions * k,
            barriers: self.barriers * k,
        }
    }
}

impl std::ops::AddAssign for CounterSet {
    fn add_assign(&mut self, o: CounterSet) {
        self.additions += o.additions;
        self.multiplications += o.multiplications;
        self.divisions += o.divisions;
        self.comparisons += o.comparisons;
        self.memory_transactions += o.memory_transactions;
        self.barriers += o.barriers;
    }
}

/// The per-iteration processing blocks of the two decoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    PermutationLoopControl,
    Permutation,
    CnpLoopControl,
    Fft,
    CnpProduct,
    InverseFft,
    DepermutationLoopControl,
    Depermutation,
    VnpLoopControl,
    Vnp,
    FbFirstLoopControl,
    FbFirst,
    FbRemainingLoopControl,
    FbRemaining,
    BetaEndsLoopControl,
    BetaEnds,
    BetaRemainingLoopControl,
    BetaRemaining,
    /// Fixed-point renormalization after check-node processing; diagnostic,
    /// outside the model.
    FixedPointRenorm,
}

impl Block {
    pub fn name(self) -> &'static str {
        match self {
            Block::PermutationLoopControl => "permutation_loop_control",
            Block::Permutation => "permutation",
            Block::CnpLoopControl => "cnp_loop_control",
            Block::Fft => "fft",
            Block::CnpProduct => "cnp_product",
            Block::InverseFft => "inverse_fft",
            Block::DepermutationLoopControl => "depermutation_loop_control",
            Block::Depermutation => "depermutation",
            Block::VnpLoopControl => "vnp_loop_control",
            Block::Vnp => "vnp",
            Block::FbFirstLoopControl => "fb_first_loop_control",
            Block::FbFirst => "fb_first",
            Block::FbRemainingLoopControl => "fb_remaining_loop_control",
            Block::FbRemaining => "fb_remaining",
            Block::BetaEndsLoopControl => "beta_ends_loop_control",
            Block::BetaEnds => "beta_ends",
            Block::BetaRemainingLoopControl => "beta_remaining_loop_control",
            Block::BetaRemaining => "beta_remaining",
            Block::FixedPointRenorm => "fixed_point_renorm",
        }
    }

    pub fn is_loop_control(self) -> bool {
        matches!(
            self,
            Block::PermutationLoopControl
                | Block::CnpLoopControl
                | Block::DepermutationLoopControl
                | Block::VnpLoopControl
                | Block::FbFirstLoopControl
                | Block::FbRemainingLoopControl
                | Block::BetaEndsLoopControl
                | Block::BetaRemainingLoopControl
        )
    }

    /// Blocks that enter the model comparison for an algorithm, in report
    /// order.
    pub fn model_rows(algo: Algorithm) -> &'static [Block] {
        match algo {
            Algorithm::FftSpa => &[
                Block::PermutationLoopControl,
                Block::Permutation,
                Block::CnpLoopControl,
                Block::Fft,
                Block::CnpProduct,
                Block::InverseFft,
                Block::DepermutationLoopControl,
                Block::Depermutation,
                Block::VnpLoopControl,
                Block::Vnp,
            ],
            Algorithm::MinMax => &[
                Block::FbFirstLoopControl,
                Block::FbFirst,
                Block::FbRemainingLoopControl,
                Block::FbRemaining,
                Block::BetaEndsLoopControl,
                Block::BetaEnds,
                Block::BetaRemainingLoopControl,
                Block::BetaRemaining,
                Block::VnpLoopControl,
                Block::Vnp,
            ],
        }
    }
}

/// Measured operation counters for one decode.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OpCounters {
    pub iterations: u64,
    pub per_iteration: CounterSet,
    pub total: CounterSet,
    /// Per-iteration tallies per block.
    pub blocks: Vec<(Block, CounterSet)>,
    /// Normalization vectors that summed to zero and fell back to uniform.
    pub zero_sum_fallbacks: u64,
}

impl OpCounters {
    pub fn block(&self, b: Block) -> CounterSet {
        self.blocks
            .iter()
            .find(|(name, _)| *name == b)
            .map(|(_, c)| *c)
            .unwrap_or_default()
    }

    /// Per-iteration arithmetic operations over algorithm blocks, the
    /// scale-comparison metric (loop control, comparisons and the diagnostic
    /// renormalization block excluded).
    pub fn arith_ops_per_iteration(&self) -> u64 {
        self.blocks
            .iter()
            .filter(|(b, _)| !b.is_loop_control() && *b != Block::FixedPointRenorm)
            .map(|(_, c)| c.arith_ops())
            .sum()
    }
}

/// Counter accumulation used inside the decoders. Block charges are
/// collected during the first iteration only; every iteration executes the
/// same trip counts, so totals scale by the iteration count.
pub(crate) struct Tally {
    enabled: bool,
    recording: bool,
    blocks: Vec<(Block, CounterSet)>,
    pub zero_sum: AtomicU64,
}

impl Tally {
    pub(crate) fn new(enabled: bool) -> Tally {
        Tally { enabled, recording: enabled, blocks: Vec::new(), zero_sum: AtomicU64::new(0) }
    }

    #[inline]
    pub(crate) fn charge(&mut self, block: Block, c: CounterSet) {
        if self.recording {
            match self.blocks.iter_mut().find(|(b, _)| *b == block) {
                Some((_, acc)) => *acc += c,
                None => self.blocks.push((block, c)),
            }
        }
    }

    pub(crate) fn end_first_iteration(&mut self) {
        self.recording = false;
    }

    pub(crate) fn finalize(self, iterations: u32, barriers_total: u64) -> Option<OpCounters> {
        if !self.enabled {
            return None;
        }
        let iterations = iterations as u64;
        let mut per_iteration = CounterSet::default();
        for (_, c) in &self.blocks {
            per_iteration += *c;
        }
        per_iteration.barriers = barriers_total.checked_div(iterations).unwrap_or(0);
        let mut total = per_iteration.scaled(iterations);
        total.barriers = barriers_total;
        Some(OpCounters {
            iterations,
            per_iteration,
            total,
            blocks: self.blocks,
            zero_sum_fallbacks: self.zero_sum.into_inner(),
        })
    }
}

/// Returns the counters of a decode, or an error when the run had them
/// disabled.
pub fn measured_counts(result: &DecodeResult) -> Result<&OpCounters, PerfError> {
    result.counters.as_ref().ok_or(PerfError::CountersDisabled)
}

// ---------------------------------------------------------------------------
// Closed-form complexity model
// ---------------------------------------------------------------------------

/// One model row: the full predicted counts and the core terms the measured
/// counters reproduce exactly. They differ only where a row carries
/// boundary-comparison terms that do not decompose into executed operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockCounts {
    pub block: Block,
    pub full: CounterSet,
    pub core: CounterSet,
}

/// Per-iteration operation counts predicted from the code parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityModel {
    pub algorithm: Algorithm,
    pub m: u64,
    pub n: u64,
    pub dc: u64,
    pub dv: u64,
    pub g: u64,
    pub rows: Vec<BlockCounts>,
}

impl ComplexityModel {
    pub fn row(&self, b: Block) -> BlockCounts {
        *self.rows.iter().find(|r| r.block == b).expect("block not in model")
    }

    /// Sum of the full rows.
    pub fn total(&self) -> CounterSet {
        let mut t = CounterSet::default();
        for r in &self.rows {
            t += r.full;
        }
        t
    }

    /// Arithmetic operations of the algorithm blocks per iteration, the
    /// scale-comparison metric.
    pub fn arith_total(&self) -> u64 {
        self.rows
            .iter()
            .filter(|r| !r.block.is_loop_control())
            .map(|r| r.full.arith_ops())
            .sum()
    }
}

fn cs(
    additions: u64,
    multiplications: u64,
    divisions: u64,
    comparisons: u64,
    memory_transactions: u64,
) -> CounterSet {
    CounterSet { additions, multiplications, divisions, comparisons, memory_transactions, barriers: 0 }
}

/// Predicts the per-iteration operation counts of one decoding iteration for
/// a regular code. Initialization, a-posteriori computation and hard decision
/// are excluded.
pub fn predict_counts(algo: Algorithm, m: u64, n: u64, dc: u64, dv: u64, g: u64) -> ComplexityModel {
    let lg = g.trailing_zeros() as u64;
    let e = m * dc;
    let ev = n * dv;
    let tc = m + m * dc + m * dc * g;
    let tv = n + n * dv + n * dv * g;
    let rows = match algo {
        Algorithm::FftSpa => vec![
            BlockCounts {
                block: Block::PermutationLoopControl,
                full: cs(tv, 0, 0, tv, 0),
                core: cs(tv, 0, 0, tv, 0),
            },
            BlockCounts {
                block: Block::Permutation,
                full: cs(0, 0, 0, 0, 3 * ev * g),
                core: cs(0, 0, 0, 0, 3 * ev * g),
            },
            BlockCounts {
                block: Block::CnpLoopControl,
                full: cs(tc, 0, 0, tc, 0),
                core: cs(tc, 0, 0, tc, 0),
            },
            BlockCounts {
                block: Block::Fft,
                full: cs(e * g * lg, e * g * lg, 0, 0, e * g * lg),
                core: cs(e * g * lg, e * g * lg, 0, 0, e * g * lg),
            },
            BlockCounts {
                block: Block::CnpProduct,
                full: cs(e * (dc - 1) * g, e * (dc - 1) * g, 0, 0, e * (dc - 1) * g),
                core: cs(e * (dc - 1) * g, e * (dc - 1) * g, 0, 0, e * (dc - 1) * g),
            },
            BlockCounts {
                block: Block::InverseFft,
                full: cs(e * g * lg, e * g * lg, e * g, 0, e * g * lg + e * g),
                core: cs(e * g * lg, e * g * lg, e * g, 0, e * g * lg + e * g),
            },
            BlockCounts {
                block: Block::DepermutationLoopControl,
                full: cs(tc, 0, 0, tc, 0),
                core: cs(tc, 0, 0, tc, 0),
            },
            BlockCounts {
                block: Block::Depermutation,
                full: cs(0, 0, 0, 0, 3 * e * g),
                core: cs(0, 0, 0, 0, 3 * e * g),
            },
            BlockCounts {
                block: Block::VnpLoopControl,
                full: cs(tv, 0, 0, tv, 0),
                core: cs(tv, 0, 0, tv, 0),
            },
            BlockCounts {
                block: Block::Vnp,
                full: cs(
                    ev * g,
                    ev * (dv - 1) * g + ev * g,
                    ev * g,
                    0,
                    5 * ev * g + ev * (dv - 1) * g,
                ),
                core: cs(
                    ev * g,
                    ev * (dv - 1) * g + ev * g,
                    ev * g,
                    0,
                    5 * ev * g + ev * (dv - 1) * g,
                ),
            },
        ],
        Algorithm::MinMax => {
            let rem = dc.saturating_sub(1);
            let int = dc.saturating_sub(2);
            vec![
                BlockCounts {
                    block: Block::FbFirstLoopControl,
                    full: cs(tc, 0, 0, tc, 0),
                    core: cs(tc, 0, 0, tc, 0),
                },
                BlockCounts {
                    block: Block::FbFirst,
                    full: cs(0, 0, 0, m * dc * g, 6 * m * g),
                    core: cs(0, 0, 0, 0, 6 * m * g),
                },
                BlockCounts {
                    block: Block::FbRemainingLoopControl,
                    full: cs(m * rem * g * g, 0, 0, m * rem * g * g, 0),
                    core: cs(m * rem * g * g, 0, 0, m * rem * g * g, 0),
                },
                BlockCounts {
                    block: Block::FbRemaining,
                    full: cs(
                        2 * m * rem * g * g,
                        0,
                        0,
                        2 * m * rem * g * g + 2 * m * rem * g,
                        8 * m * rem * g * g,
                    ),
                    core: cs(2 * m * rem * g * g, 0, 0, 2 * m * rem * g * g, 8 * m * rem * g * g),
                },
                BlockCounts {
                    block: Block::BetaEndsLoopControl,
                    full: cs(tc, 0, 0, tc, 0),
                    core: cs(tc, 0, 0, tc, 0),
                },
                BlockCounts {
                    block: Block::BetaEnds,
                    full: cs(0, 0, 0, 2 * m * dc * g, 6 * m * g),
                    core: cs(0, 0, 0, 0, 6 * m * g),
                },
                BlockCounts {
                    block: Block::BetaRemainingLoopControl,
                    full: cs(m * int * g * g, 0, 0, m * int * g * g, 0),
                    core: cs(m * int * g * g, 0, 0, m * int * g * g, 0),
                },
                BlockCounts {
                    block: Block::BetaRemaining,
                    full: cs(
                        m * int * g * g,
                        0,
                        0,
                        m * int * g * g + m * int * g,
                        4 * m * int * g * g,
                    ),
                    core: cs(m * int * g * g, 0, 0, m * int * g * g, 4 * m * int * g * g),
                },
                BlockCounts {
                    block: Block::VnpLoopControl,
                    full: cs(tv, 0, 0, tv, 0),
                    core: cs(tv, 0, 0, tv, 0),
                },
                BlockCounts {
                    block: Block::Vnp,
                    full: cs(
                        ev * (dv - 1) * g + 2 * ev * g,
                        0,
                        0,
                        ev * g,
                        5 * ev * g + ev * (dv - 1) * g,
                    ),
                    core: cs(
                        ev * (dv - 1) * g + 2 * ev * g,
                        0,
                        0,
                        ev * g,
                        5 * ev * g + ev * (dv - 1) * g,
                    ),
                },
            ]
        }
    };
    ComplexityModel { algorithm: algo, m, n, dc, dv, g, rows }
}

/// Synchronization barriers per decoding iteration of the staged schedule.
pub fn predicted_barriers_per_iteration(algo: Algorithm, g: u64, m: u64, dc: u64) -> u64 {
    match algo {
        Algorithm::FftSpa => 4 * g.trailing_zeros() as u64 + 8,
        Algorithm::MinMax => 2 * m * dc + 1,
    }
}

// ---------------------------------------------------------------------------
// Staged execution
// ---------------------------------------------------------------------------

/// Decodes one codeword with intra-codeword stage parallelism over `threads`
/// workers and a counted barrier after every block boundary. The result is
/// identical to the unstaged decoder; only the schedule differs.
pub fn staged_run(
    graph: &TannerGraph,
    algo: Algorithm,
    priors: &SymbolPriors,
    config: &DecodeConfig,
    threads: usize,
) -> DecodeResult {
    match algo {
        Algorithm::FftSpa => fft_spa::decode_fft_spa_staged(graph, priors, config, threads),
        Algorithm::MinMax => min_max::decode_min_max_staged(graph, priors, config, threads),
    }
}

/// Barriers per iteration of a staged result.
pub fn barriers_per_iteration(result: &DecodeResult) -> Option<u64> {
    result.counters.as_ref().map(|c| c.per_iteration.barriers)
}

// ---------------------------------------------------------------------------
// Multicodeword batch decoding
// ---------------------------------------------------------------------------

/// Channel setting for a batch: an Eb/N0 operating point or the noiseless
/// limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelSpec {
    Awgn { ebn0_db: f64 },
    Noiseless,
}

/// Aggregated outcome of a multicodeword batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub frames: u64,
    pub frame_errors: u64,
    pub symbol_errors: u64,
    pub bit_errors: u64,
    /// Frames whose final syndrome was nonzero.
    pub failures: u64,
    pub total_iterations: u64,
    /// Wall time of the decode phase only.
    pub wall: Duration,
    /// Decoded bits per second, N*q*frames / wall.
    pub throughput_bps: f64,
    /// Frames processed per worker.
    pub per_worker_frames: Vec<u64>,
}

impl BatchReport {
    pub fn fer(&self) -> f64 {
        self.frame_errors as f64 / self.frames as f64
    }

    pub fn ber(&self, n: usize, q: u32) -> f64 {
        self.bit_errors as f64 / (self.frames as f64 * (n as u32 * q) as f64)
    }

    pub fn avg_iterations(&self) -> f64 {
        self.total_iterations as f64 / self.frames as f64
    }
}

struct FrameInput {
    codeword: Vec<crate::gf::GfSym>,
    priors: SymbolPriors,
}

struct FrameOutcome {
    frame_error: bool,
    symbol_errors: u32,
    bit_errors: u32,
    iterations: u32,
    syndrome_ok: bool,
}

/// Generates the frame for index `idx` deterministically from the batch
/// seed, independent of worker scheduling.
fn gen_frame(
    graph: &TannerGraph,
    encoder: &SystematicEncoder,
    chan: ChannelSpec,
    algo: Algorithm,
    seed: u64,
    idx: u64,
) -> FrameInput {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx.wrapping_add(1));
    let field = graph.field();
    let codeword = encoder.encode_random(&mut rng);
    let signal = channel::modulate_bpsk(&codeword, field);
    let obs = match chan {
        ChannelSpec::Awgn { ebn0_db } => {
            channel::add_awgn(&signal, ebn0_db, encoder.rate(), &mut rng)
                .expect("encoder rate is always in (0, 1]")
        }
        ChannelSpec::Noiseless => channel::add_awgn_noiseless(&signal),
    };
    let priors = channel::symbol_priors(&obs, field);
    let priors = match algo {
        Algorithm::FftSpa => priors,
        Algorithm::MinMax => channel::llr_init_minmax(&priors),
    };
    FrameInput { codeword, priors }
}

/// One reusable decoder bound to a worker, dispatched once per batch on
/// (algorithm, arithmetic mode) so banks amortize across frames.
fn make_decoder<'a>(
    graph: &'a TannerGraph,
    algo: Algorithm,
    config: &'a DecodeConfig,
) -> Box<dyn FnMut(&SymbolPriors) -> DecodeResult + Send + 'a> {
    use crate::arith::{
        ArithMode, MmF64, MmFixed32, MmFixed8, SpaF64, SpaFixed32, SpaFixed8, MM_SCALE_I32,
        MM_SCALE_I8,
    };
    use crate::fft_spa::FftSpaDecoder;
    use crate::min_max::MinMaxDecoder;
    match (algo, config.arith) {
        (Algorithm::FftSpa, ArithMode::F64) => {
            let mut d = FftSpaDecoder::<SpaF64>::new(graph);
            Box::new(move |p| d.decode(p, config))
        }
        (Algorithm::FftSpa, ArithMode::Fixed32) => {
            let mut d = FftSpaDecoder::<SpaFixed32>::new(graph);
            Box::new(move |p| d.decode(p, config))
        }
        (Algorithm::FftSpa, ArithMode::Fixed8) => {
            let mut d = FftSpaDecoder::<SpaFixed8>::new(graph);
            Box::new(move |p| d.decode(p, config))
        }
        (Algorithm::MinMax, ArithMode::F64) => {
            let mut d = MinMaxDecoder::new(graph, MmF64);
            Box::new(move |p| d.decode(p, config))
        }
        (Algorithm::MinMax, ArithMode::Fixed32) => {
            let arith = MmFixed32 { scale: config.llr_scale.unwrap_or(MM_SCALE_I32) };
            let mut d = MinMaxDecoder::new(graph, arith);
            Box::new(move |p| d.decode(p, config))
        }
        (Algorithm::MinMax, ArithMode::Fixed8) => {
            let arith = MmFixed8 { scale: config.llr_scale.unwrap_or(MM_SCALE_I8) };
            let mut d = MinMaxDecoder::new(graph, arith);
            Box::new(move |p| d.decode(p, config))
        }
    }
}

fn score_frame(result: &DecodeResult, frame: &FrameInput) -> FrameOutcome {
    let mut symbol_errors = 0u32;
    let mut bit_errors = 0u32;
    for (a, b) in result.decoded.iter().zip(frame.codeword.iter()) {
        if a != b {
            symbol_errors += 1;
            bit_errors += (a.0 ^ b.0).count_ones();
        }
    }
    FrameOutcome {
        frame_error: symbol_errors > 0,
        symbol_errors,
        bit_errors,
        iterations: result.iterations_run,
        syndrome_ok: result.syndrome_ok,
    }
}

/// Decodes `frames` independent frames over `workers` worker threads with
/// frame-granularity work stealing. Each worker reuses one decoder across
/// frames. Frame contents depend only on (seed, frame index), so outcomes
/// are identical for any worker count. Wall time covers the decode phase;
/// frame generation and code construction are excluded.
#[allow(clippy::too_many_arguments)]
pub fn run_batch(
    graph: &TannerGraph,
    encoder: &SystematicEncoder,
    algo: Algorithm,
    config: &DecodeConfig,
    chan: ChannelSpec,
    frames: u64,
    workers: usize,
    seed: u64,
) -> BatchReport {
    run_batch_with_outcomes(graph, encoder, algo, config, chan, frames, workers, seed).0
}

/// [`run_batch`] plus the per-frame (frame_error, iterations) outcomes in
/// frame order, for scheduling-independence checks.
#[allow(clippy::too_many_arguments)]
pub fn run_batch_with_outcomes(
    graph: &TannerGraph,
    encoder: &SystematicEncoder,
    algo: Algorithm,
    config: &DecodeConfig,
    chan: ChannelSpec,
    frames: u64,
    workers: usize,
    seed: u64,
) -> (BatchReport, Vec<(bool, u32)>) {
    assert!(workers >= 1 && frames >= 1);
    const CHUNK: u64 = 4096;
    let mut report = BatchReport {
        frames,
        frame_errors: 0,
        symbol_errors: 0,
        bit_errors: 0,
        failures: 0,
        total_iterations: 0,
        wall: Duration::ZERO,
        throughput_bps: 0.0,
        per_worker_frames: vec![0; workers],
    };
    let mut per_frame = Vec::with_capacity(frames as usize);
    let mut start = 0u64;
    while start < frames {
        let count = CHUNK.min(frames - start);
        let inputs: Vec<FrameInput> = (start..start + count)
            .map(|i| gen_frame(graph, encoder, chan, algo, seed, i))
            .collect();
        let next = AtomicUsize::new(0);
        let t0 = Instant::now();
        let worker_results: Vec<(usize, Vec<(usize, FrameOutcome)>)> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let inputs = &inputs;
                    let next = &next;
                    s.spawn(move || {
                        let mut decode = make_decoder(graph, algo, config);
                        let mut local = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            if i >= inputs.len() {
                                break;
                            }
                            let result = decode(&inputs[i].priors);
                            local.push((i, score_frame(&result, &inputs[i])));
                        }
                        (w, local)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("batch worker panicked")).collect()
        });
        report.wall += t0.elapsed();
        let mut chunk_outcomes: Vec<Option<(bool, u32)>> = vec![None; count as usize];
        for (w, outcomes) in worker_results {
            report.per_worker_frames[w] += outcomes.len() as u64;
            for (i, o) in outcomes {
                report.frame_errors += o.frame_error as u64;
                report.symbol_errors += o.symbol_errors as u64;
                report.bit_errors += o.bit_errors as u64;
                report.failures += (!o.syndrome_ok) as u64;
                report.total_iterations += o.iterations as u64;
                chunk_outcomes[i] = Some((o.frame_error, o.iterations));
            }
        }
        per_frame.extend(chunk_outcomes.into_iter().map(|o| o.expect("frame not decoded")));
        start += count;
    }
    let bits = graph.variable_nodes() as u64 * graph.field().q() as u64 * frames;
    report.throughput_bps = bits as f64 / report.wall.as_secs_f64();
    (report, per_frame)
}

/// Decodes one random frame with counters enabled and returns the measured
/// counters. Counter values depend only on the code structure and iteration
/// count, not on the frame content.
pub fn measure_one_iteration(
    graph: &TannerGraph,
    encoder: &SystematicEncoder,
    algo: Algorithm,
    config: &DecodeConfig,
    seed: u64,
) -> Result<OpCounters, PerfError> {
    let mut config = config.clone();
    config.counters_enabled = true;
    let frame = gen_frame(graph, encoder, ChannelSpec::Awgn { ebn0_db: 2.0 }, algo, seed, 0);
    let result = match algo {
        Algorithm::FftSpa => fft_spa::decode_fft_spa(graph, &frame.priors, &config),
        Algorithm::MinMax => min_max::decode_min_max(graph, &frame.priors, &config),
    };
    result.counters.ok_or(PerfError::CountersDisabled)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_match_closed_forms() {
        // spot checks of the row sums against the aggregate expressions
        for &(m, n, dc, dv) in &[(8u64, 16u64, 4u64, 2u64), (32, 64, 4, 2), (3, 6, 4, 2)] {
            for q in 2..=8u32 {
                let g = 1u64 << q;
                let lg = q as u64;
                let spa = predict_counts(Algorithm::FftSpa, m, n, dc, dv, g).total();
                let spa_ops = 4 * m
                    + 4 * m * dc
                    + 3 * m * dc * g
                    + 2 * m * dc * dc * g
                    + 4 * m * dc * g * lg
                    + 4 * n
                    + 4 * n * dv
                    + 6 * n * dv * g
                    + n * dv * dv * g;
                assert_eq!(spa.ops(), spa_ops, "spa ops at g={g}");
                let spa_mem = 3 * m * dc * g
                    + m * dc * dc * g
                    + 2 * m * dc * g * lg
                    + 7 * n * dv * g
                    + n * dv * dv * g;
                assert_eq!(spa.memory_transactions, spa_mem, "spa mem at g={g}");

                let mm = predict_counts(Algorithm::MinMax, m, n, dc, dv, g).total();
                let mm_ops = (4 * m + 4 * m * dc + 10 * m * dc * g + 10 * m * dc * g * g + 2 * n
                    + 2 * n * dv
                    + 4 * n * dv * g
                    + n * dv * dv * g)
                    - 4 * m * g
                    - 14 * m * g * g;
                assert_eq!(mm.ops(), mm_ops, "mm ops at g={g}");
                let mm_mem = (12 * m * g + 12 * m * dc * g * g + n * dv * dv * g + 4 * n * dv * g)
                    - 16 * m * g * g;
                assert_eq!(mm.memory_transactions, mm_mem, "mm mem at g={g}");
            }
        }
    }

    #[test]
    fn fft_block_example() {
        // C3 parameters at GF(4)
        let model = predict_counts(Algorithm::FftSpa, 32, 64, 4, 2, 4);
        let fft = model.row(Block::Fft);
        assert_eq!(fft.full.additions, 1024);
        assert_eq!(fft.full.multiplications, 1024);
    }

    #[test]
    fn mm_fb_remaining_example() {
        let model = predict_counts(Algorithm::MinMax, 32, 64, 4, 2, 4);
        let row = model.row(Block::FbRemaining);
        let (m, dc, g) = (32u64, 4u64, 4u64);
        assert_eq!(row.full.comparisons, 2 * m * (dc - 1) * g * g + 2 * m * (dc - 1) * g);
        assert_eq!(row.core.comparisons, 2 * m * (dc - 1) * g * g);
    }

    #[test]
    fn arith_total_crossover_for_c3() {
        // the scale comparison: LLR-domain cheaper for q in {2, 3}, the
        // transform decoder cheaper from q = 4 up
        for q in 2..=8u32 {
            let g = 1u64 << q;
            let spa = predict_counts(Algorithm::FftSpa, 32, 64, 4, 2, g).arith_total();
            let mm = predict_counts(Algorithm::MinMax, 32, 64, 4, 2, g).arith_total();
            if q <= 3 {
                assert!(mm < spa, "q={q}: mm={mm} spa={spa}");
            } else {
                assert!(mm > spa, "q={q}: mm={mm} spa={spa}");
            }
        }
    }

    #[test]
    fn barrier_formulas() {
        assert_eq!(predicted_barriers_per_iteration(Algorithm::FftSpa, 16, 8, 4), 24);
        assert_eq!(predicted_barriers_per_iteration(Algorithm::MinMax, 16, 8, 4), 65);
    }

    #[test]
    fn batch_outcomes_independent_of_workers() {
        let field = crate::gf::build_field(3, None).unwrap();
        let pcm = crate::code::gen_regular_code(16, 8, 4, 2, field, 41).unwrap();
        let graph = crate::code::build_tanner(&pcm);
        let enc = SystematicEncoder::new(&pcm);
        let config = DecodeConfig::new(5).unwrap();
        let chan = ChannelSpec::Awgn { ebn0_db: 2.0 };
        let (r1, o1) = run_batch_with_outcomes(
            &graph,
            &enc,
            Algorithm::FftSpa,
            &config,
            chan,
            64,
            1,
            9,
        );
        let (r3, o3) = run_batch_with_outcomes(
            &graph,
            &enc,
            Algorithm::FftSpa,
            &config,
            chan,
            64,
            3,
            9,
        );
        assert_eq!(o1, o3);
        assert_eq!(r1.frame_errors, r3.frame_errors);
        assert_eq!(r1.per_worker_frames.iter().sum::<u64>(), 64);
        assert_eq!(r3.per_worker_frames.iter().sum::<u64>(), 64);
        // throughput identity
        let bits = (16 * 3 * 64) as f64;
        assert!((r1.throughput_bps - bits / r1.wall.as_secs_f64()).abs() < 1e-6);
    }

    #[test]
    fn measured_counts_requires_counters() {
        let result = DecodeResult {
            decoded: vec![],
            iterations_run: 1,
            syndrome_ok: true,
            counters: None,
        };
        assert_eq!(measured_counts(&result), Err(PerfError::CountersDisabled));
    }

    #[test]
    fn staged_runs_match_unstaged_for_both_algorithms() {
        let field = crate::gf::build_field(2, None).unwrap();
        let pcm = crate::code::gen_regular_code(16, 8, 4, 2, field, 43).unwrap();
        let graph = crate::code::build_tanner(&pcm);
        let enc = SystematicEncoder::new(&pcm);
        let config = DecodeConfig::new(2).unwrap().with_early_stop(false).with_counters(true);
        for algo in [Algorithm::FftSpa, Algorithm::MinMax] {
            let frame = gen_frame(&graph, &enc, ChannelSpec::Awgn { ebn0_db: 1.5 }, algo, 7, 0);
            let serial = match algo {
                Algorithm::FftSpa => fft_spa::decode_fft_spa(&graph, &frame.priors, &config),
                Algorithm::MinMax => min_max::decode_min_max(&graph, &frame.priors, &config),
            };
            let staged = staged_run(&graph, algo, &frame.priors, &config, 4);
            assert_eq!(serial.decoded, staged.decoded);
            assert_eq!(
                barriers_per_iteration(&staged).unwrap(),
                predicted_barriers_per_iteration(algo, 4, 8, 4)
            );
        }
    }
}
