//! Python bindings: fields, codes, the channel model, both decoders, batch
//! decoding and the complexity model.
//!
//! Build with `cargo build -p nbldpc-py --release`, then copy
//! `target/release/libnbldpc.so` next to your script as `nbldpc.so` and
//! `import nbldpc`.

use nbldpc_core::arith::ArithMode;
use nbldpc_core::channel;
use nbldpc_core::code::{self, ParityCheckMatrix, SystematicEncoder, TannerGraph};
use nbldpc_core::gf::{build_field, FieldSpec, GfSym};
use nbldpc_core::perf::{self, ChannelSpec, CounterSet};
use nbldpc_core::{fft_spa, min_max, Algorithm, DecodeConfig, DecodeResult};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_algo(s: &str) -> PyResult<Algorithm> {
    s.parse().map_err(err)
}

fn parse_arith(s: &str) -> PyResult<ArithMode> {
    s.parse().map_err(err)
}

fn to_syms(field: &FieldSpec, values: &[u8]) -> PyResult<Vec<GfSym>> {
    values
        .iter()
        .map(|&v| {
            let s = GfSym(v);
            if field.contains(s) {
                Ok(s)
            } else {
                Err(err(format!("symbol {v} outside GF({})", field.order())))
            }
        })
        .collect()
}

fn counter_map(c: &CounterSet) -> HashMap<String, u64> {
    HashMap::from([
        ("additions".to_string(), c.additions),
        ("multiplications".to_string(), c.multiplications),
        ("divisions".to_string(), c.divisions),
        ("comparisons".to_string(), c.comparisons),
        ("memory_transactions".to_string(), c.memory_transactions),
        ("barriers".to_string(), c.barriers),
    ])
}

/// GF(2^q) arithmetic.
#[pyclass(frozen)]
struct Field {
    inner: FieldSpec,
}

#[pymethods]
impl Field {
    #[new]
    #[pyo3(signature = (q, poly=None))]
    fn new(q: u32, poly: Option<u32>) -> PyResult<Self> {
        Ok(Field { inner: build_field(q, poly).map_err(err)? })
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.q()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn poly(&self) -> u32 {
        self.inner.poly()
    }

    fn add(&self, a: u8, b: u8) -> PyResult<u8> {
        let (a, b) = (to_syms(&self.inner, &[a])?[0], to_syms(&self.inner, &[b])?[0]);
        Ok(self.inner.add(a, b).0)
    }

    fn mul(&self, a: u8, b: u8) -> PyResult<u8> {
        let (a, b) = (to_syms(&self.inner, &[a])?[0], to_syms(&self.inner, &[b])?[0]);
        Ok(self.inner.mul(a, b).0)
    }

    fn inv(&self, a: u8) -> PyResult<u8> {
        let a = to_syms(&self.inner, &[a])?[0];
        Ok(self.inner.inv(a).map_err(err)?.0)
    }

    fn exp_table(&self) -> Vec<u8> {
        self.inner.exp_table().to_vec()
    }

    fn log_table(&self) -> Vec<u8> {
        self.inner.log_table().to_vec()
    }

    fn power_notation(&self, a: u8) -> PyResult<String> {
        let a = to_syms(&self.inner, &[a])?[0];
        Ok(self.inner.power_notation(a))
    }

    fn __repr__(&self) -> String {
        format!("Field(q={}, poly={:#b})", self.inner.q(), self.inner.poly())
    }
}

/// A parity-check code with its Tanner graph and systematic encoder.
#[pyclass(frozen)]
struct Code {
    pcm: ParityCheckMatrix,
    graph: TannerGraph,
    encoder: SystematicEncoder,
}

impl Code {
    fn from_pcm(pcm: ParityCheckMatrix) -> Code {
        let graph = code::build_tanner(&pcm);
        let encoder = SystematicEncoder::new(&pcm);
        Code { pcm, graph, encoder }
    }

    fn priors_from(&self, priors: Vec<f64>) -> PyResult<channel::SymbolPriors> {
        let g = self.pcm.field().order();
        let n = self.pcm.cols();
        if priors.len() != n * g {
            return Err(err(format!("expected {} prior values, got {}", n * g, priors.len())));
        }
        Ok(channel::SymbolPriors::from_values(priors, g, channel::PriorMode::Probability))
    }

    #[allow(clippy::too_many_arguments)]
    fn decode_inner(
        &self,
        priors: Vec<f64>,
        algo: &str,
        arith: &str,
        max_iters: u32,
        early_stop: bool,
        counters: bool,
        llr_scale: Option<f64>,
    ) -> PyResult<(Algorithm, DecodeConfig, channel::SymbolPriors)> {
        let algo = parse_algo(algo)?;
        let mut config = DecodeConfig::new(max_iters)
            .map_err(err)?
            .with_early_stop(early_stop)
            .with_arith(parse_arith(arith)?)
            .with_counters(counters);
        if let Some(s) = llr_scale {
            config = config.with_llr_scale(s);
        }
        let p = self.priors_from(priors)?;
        let p = match algo {
            Algorithm::FftSpa => p,
            Algorithm::MinMax => channel::llr_init_minmax(&p),
        };
        Ok((algo, config, p))
    }
}

#[pymethods]
impl Code {
    /// Generates a regular code with the given degrees.
    #[staticmethod]
    #[pyo3(signature = (n, m, dc, dv, q, seed=0, poly=None))]
    fn generate(
        n: usize,
        m: usize,
        dc: usize,
        dv: usize,
        q: u32,
        seed: u64,
        poly: Option<u32>,
    ) -> PyResult<Code> {
        let field = build_field(q, poly).map_err(err)?;
        let pcm = code::gen_regular_code(n, m, dc, dv, field, seed).map_err(err)?;
        Ok(Code::from_pcm(pcm))
    }

    /// Loads a code file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Code> {
        Ok(Code::from_pcm(code::load_code(path).map_err(err)?))
    }

    /// The 3x6 GF(4) example code.
    #[staticmethod]
    fn toy() -> Code {
        Code::from_pcm(ParityCheckMatrix::toy_3x6_gf4())
    }

    fn save(&self, path: &str) -> PyResult<()> {
        code::save_code(&self.pcm, path).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.pcm.cols()
    }

    #[getter]
    fn m(&self) -> usize {
        self.pcm.rows()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.pcm.field().q()
    }

    #[getter]
    fn order(&self) -> usize {
        self.pcm.field().order()
    }

    #[getter]
    fn edges(&self) -> usize {
        self.graph.edges()
    }

    #[getter]
    fn k(&self) -> usize {
        self.encoder.k()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.encoder.rank()
    }

    #[getter]
    fn rate(&self) -> f64 {
        self.encoder.rate()
    }

    /// Nonzero entries as (row, col, coeff) triples.
    fn entries(&self) -> Vec<(usize, usize, u8)> {
        self.pcm.entries().iter().map(|&(r, c, h)| (r, c, h.0)).collect()
    }

    fn encode(&self, message: Vec<u8>) -> PyResult<Vec<u8>> {
        let msg = to_syms(self.pcm.field(), &message)?;
        let cw = self.encoder.encode(&msg).map_err(err)?;
        Ok(cw.into_iter().map(|s| s.0).collect())
    }

    fn random_codeword(&self, seed: u64) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.encoder.encode_random(&mut rng).into_iter().map(|s| s.0).collect()
    }

    fn syndrome(&self, codeword: Vec<u8>) -> PyResult<(Vec<u8>, bool)> {
        let cw = to_syms(self.pcm.field(), &codeword)?;
        let (s, ok) = code::syndrome(&self.pcm, &cw).map_err(err)?;
        Ok((s.into_iter().map(|x| x.0).collect(), ok))
    }

    /// BPSK modulation: one +1/-1 sample per bit, MSB first.
    fn modulate(&self, codeword: Vec<u8>) -> PyResult<Vec<f64>> {
        let cw = to_syms(self.pcm.field(), &codeword)?;
        Ok(channel::modulate_bpsk(&cw, self.pcm.field()))
    }

    /// Probability priors from channel samples (sigma = 0 means noiseless).
    /// Returns a flat N*order vector.
    fn channel_priors(&self, samples: Vec<f64>, sigma: f64) -> PyResult<Vec<f64>> {
        let q = self.pcm.field().q() as usize;
        if samples.len() != self.pcm.cols() * q {
            return Err(err(format!(
                "expected {} samples, got {}",
                self.pcm.cols() * q,
                samples.len()
            )));
        }
        let obs = channel::ChannelObservation { samples, sigma };
        Ok(channel::symbol_priors(&obs, self.pcm.field()).values().to_vec())
    }

    /// Runs one decode over flat probability priors. `algo` is "fft-spa" or
    /// "min-max"; `arith` is "f64", "i32" or "i8".
    #[pyo3(signature = (priors, algo="fft-spa", arith="f64", max_iters=10, early_stop=true, counters=false, llr_scale=None))]
    #[allow(clippy::too_many_arguments)]
    fn decode(
        &self,
        priors: Vec<f64>,
        algo: &str,
        arith: &str,
        max_iters: u32,
        early_stop: bool,
        counters: bool,
        llr_scale: Option<f64>,
    ) -> PyResult<DecodeOutcome> {
        let (algo, config, p) =
            self.decode_inner(priors, algo, arith, max_iters, early_stop, counters, llr_scale)?;
        let result = match algo {
            Algorithm::FftSpa => fft_spa::decode_fft_spa(&self.graph, &p, &config),
            Algorithm::MinMax => min_max::decode_min_max(&self.graph, &p, &config),
        };
        Ok(DecodeOutcome { result })
    }

    /// Decodes one codeword with barrier-counted stage parallelism across
    /// `threads` workers. The output is identical to `decode`.
    #[pyo3(signature = (priors, algo="fft-spa", arith="f64", max_iters=10, early_stop=true, threads=4, llr_scale=None))]
    #[allow(clippy::too_many_arguments)]
    fn staged_decode(
        &self,
        priors: Vec<f64>,
        algo: &str,
        arith: &str,
        max_iters: u32,
        early_stop: bool,
        threads: usize,
        llr_scale: Option<f64>,
    ) -> PyResult<DecodeOutcome> {
        let (algo, config, p) =
            self.decode_inner(priors, algo, arith, max_iters, early_stop, true, llr_scale)?;
        let result = perf::staged_run(&self.graph, algo, &p, &config, threads);
        Ok(DecodeOutcome { result })
    }

    /// Encodes, modulates, corrupts and decodes `frames` independent frames
    /// over `workers` threads. `ebn0_db=None` means noiseless.
    #[pyo3(signature = (algo="min-max", arith="f64", max_iters=10, early_stop=true, ebn0_db=None, frames=1000, workers=1, seed=0))]
    #[allow(clippy::too_many_arguments)]
    fn run_batch(
        &self,
        algo: &str,
        arith: &str,
        max_iters: u32,
        early_stop: bool,
        ebn0_db: Option<f64>,
        frames: u64,
        workers: usize,
        seed: u64,
    ) -> PyResult<HashMap<String, f64>> {
        let algo = parse_algo(algo)?;
        let config = DecodeConfig::new(max_iters)
            .map_err(err)?
            .with_early_stop(early_stop)
            .with_arith(parse_arith(arith)?);
        let chan = match ebn0_db {
            Some(db) => ChannelSpec::Awgn { ebn0_db: db },
            None => ChannelSpec::Noiseless,
        };
        if frames == 0 || workers == 0 {
            return Err(err("frames and workers must be positive"));
        }
        let r = perf::run_batch(&self.graph, &self.encoder, algo, &config, chan, frames, workers, seed);
        Ok(HashMap::from([
            ("frames".to_string(), r.frames as f64),
            ("frame_errors".to_string(), r.frame_errors as f64),
            ("symbol_errors".to_string(), r.symbol_errors as f64),
            ("bit_errors".to_string(), r.bit_errors as f64),
            ("failures".to_string(), r.failures as f64),
            ("fer".to_string(), r.fer()),
            ("ber".to_string(), r.ber(self.pcm.cols(), self.pcm.field().q())),
            ("avg_iterations".to_string(), r.avg_iterations()),
            ("wall_s".to_string(), r.wall.as_secs_f64()),
            ("throughput_bps".to_string(), r.throughput_bps),
        ]))
    }

    fn __repr__(&self) -> String {
        format!(
            "Code(n={}, m={}, g={}, edges={}, k={})",
            self.pcm.cols(),
            self.pcm.rows(),
            self.pcm.field().order(),
            self.graph.edges(),
            self.encoder.k()
        )
    }
}

/// Result of one decode.
#[pyclass(frozen)]
struct DecodeOutcome {
    result: DecodeResult,
}

#[pymethods]
impl DecodeOutcome {
    #[getter]
    fn decoded(&self) -> Vec<u8> {
        self.result.decoded.iter().map(|s| s.0).collect()
    }

    #[getter]
    fn iterations(&self) -> u32 {
        self.result.iterations_run
    }

    #[getter]
    fn syndrome_ok(&self) -> bool {
        self.result.syndrome_ok
    }

    /// Total operation counters, or None when the run had them disabled.
    fn counters(&self) -> Option<HashMap<String, u64>> {
        self.result.counters.as_ref().map(|c| {
            let mut map = counter_map(&c.total);
            map.insert("iterations".to_string(), c.iterations);
            map.insert("zero_sum_fallbacks".to_string(), c.zero_sum_fallbacks);
            map
        })
    }

    fn counters_per_iteration(&self) -> Option<HashMap<String, u64>> {
        self.result.counters.as_ref().map(|c| counter_map(&c.per_iteration))
    }

    /// Per-iteration counters per processing block.
    fn counter_blocks(&self) -> Option<Vec<(String, HashMap<String, u64>)>> {
        self.result.counters.as_ref().map(|c| {
            c.blocks.iter().map(|(b, v)| (b.name().to_string(), counter_map(v))).collect()
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "DecodeOutcome(iterations={}, syndrome_ok={})",
            self.result.iterations_run, self.result.syndrome_ok
        )
    }
}

/// AWGN corruption of a modulated signal. Returns (samples, sigma) with
/// sigma^2 = 1 / (2 * rate * 10^(ebn0_db/10)).
#[pyfunction]
fn add_awgn(signal: Vec<f64>, ebn0_db: f64, rate: f64, seed: u64) -> PyResult<(Vec<f64>, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let obs = channel::add_awgn(&signal, ebn0_db, rate, &mut rng).map_err(err)?;
    Ok((obs.samples, obs.sigma))
}

/// Fixed-point quantization to i8 with saturation.
#[pyfunction]
fn quantize_i8(values: Vec<f64>, scale: f64) -> PyResult<Vec<i8>> {
    if scale <= 0.0 {
        return Err(err("scale must be positive"));
    }
    Ok(channel::quantize_i8(&values, scale))
}

/// Per-iteration operation counts predicted for a regular code: a list of
/// (block, counters) rows plus the arithmetic-operations total under
/// "total/arith_ops".
#[pyfunction]
fn predict_counts(
    algo: &str,
    m: u64,
    n: u64,
    dc: u64,
    dv: u64,
    g: u64,
) -> PyResult<Vec<(String, HashMap<String, u64>)>> {
    let model = perf::predict_counts(parse_algo(algo)?, m, n, dc, dv, g);
    let mut rows: Vec<(String, HashMap<String, u64>)> = model
        .rows
        .iter()
        .map(|r| (r.block.name().to_string(), counter_map(&r.full)))
        .collect();
    rows.push((
        "total/arith_ops".to_string(),
        HashMap::from([("arith_ops".to_string(), model.arith_total())]),
    ));
    Ok(rows)
}

/// Synchronization barriers per staged decoding iteration.
#[pyfunction]
fn predicted_barriers(algo: &str, g: u64, m: u64, dc: u64) -> PyResult<u64> {
    Ok(perf::predicted_barriers_per_iteration(parse_algo(algo)?, g, m, dc))
}

#[pymodule]
fn nbldpc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_class::<Code>()?;
    m.add_class::<DecodeOutcome>()?;
    m.add_function(wrap_pyfunction!(add_awgn, m)?)?;
    m.add_function(wrap_pyfunction!(quantize_i8, m)?)?;
    m.add_function(wrap_pyfunction!(predict_counts, m)?)?;
    m.add_function(wrap_pyfunction!(predicted_barriers, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
