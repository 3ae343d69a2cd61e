//! Command-line surface: code generation and I/O, BER/FER sweeps, throughput
//! benchmarks and complexity reports, all emitting CSV.
//!
//! Exit codes: 0 on success, 2 on input or validation errors, 3 on engine
//! errors. `NBLDPC_SEED` provides the default seed.

use crate::arith::ArithMode;
use crate::code::{self, ParityCheckMatrix};
use crate::gf::build_field;
use crate::perf::{self, ChannelSpec};
use crate::{Algorithm, DecodeConfig};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Bad input or validation failure, exit code 2.
    Input(String),
    /// Decode-engine or I/O failure during a run, exit code 3.
    Engine(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Engine(m) => write!(f, "{m}"),
        }
    }
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn parse_arith(s: &str) -> Result<ArithMode, String> {
    s.parse()
}

#[derive(Parser, Debug)]
#[command(name = "nbldpc", version, about = "Non-binary LDPC decoding toolkit")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a regular code and write it as a code file
    Gen(GenArgs),
    /// Sweep Eb/N0 points and report FER/BER per point as CSV
    Simulate(SimulateArgs),
    /// Measure multicodeword decoding throughput over worker counts
    Bench(BenchArgs),
    /// Compare measured operation counters against the complexity model
    Analyze(AnalyzeArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Number of variable nodes (columns)
    #[arg(long)]
    n: usize,
    /// Number of check nodes (rows)
    #[arg(long)]
    m: usize,
    /// Check-node degree
    #[arg(long, default_value_t = 4)]
    dc: usize,
    /// Variable-node degree
    #[arg(long, default_value_t = 2)]
    dv: usize,
    /// Bits per symbol; the field is GF(2^q)
    #[arg(long)]
    q: u32,
    /// Primitive polynomial override, as a decimal bitmask
    #[arg(long)]
    poly: Option<u32>,
    #[arg(long, env = "NBLDPC_SEED", default_value_t = 0)]
    seed: u64,
    /// Output code file
    #[arg(long)]
    out: PathBuf,
}

/// Where the code comes from: a file or the generator.
#[derive(Args, Debug)]
struct CodeSource {
    /// Code file to load (alternative to the generator parameters)
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    m: usize,
    #[arg(long, default_value_t = 4)]
    dc: usize,
    #[arg(long, default_value_t = 2)]
    dv: usize,
    #[arg(long, default_value_t = 4)]
    q: u32,
    #[arg(long)]
    poly: Option<u32>,
    /// Seed for code generation
    #[arg(long, default_value_t = 1)]
    code_seed: u64,
}

impl CodeSource {
    fn load(&self) -> Result<ParityCheckMatrix, CliError> {
        match &self.code {
            Some(path) => code::load_code(path).map_err(|e| CliError::Input(e.to_string())),
            None => {
                let field =
                    build_field(self.q, self.poly).map_err(|e| CliError::Input(e.to_string()))?;
                code::gen_regular_code(self.n, self.m, self.dc, self.dv, field, self.code_seed)
                    .map_err(|e| CliError::Input(e.to_string()))
            }
        }
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    source: CodeSource,
    #[arg(long, default_value = "fft-spa", value_parser = parse_algo)]
    algo: Algorithm,
    #[arg(long, default_value = "f64", value_parser = parse_arith)]
    arith: ArithMode,
    #[arg(long, default_value_t = 10)]
    iters: u32,
    /// Run exactly `iters` iterations per frame (no early termination)
    #[arg(long)]
    fixed_iters: bool,
    /// Eb/N0 grid in dB, comma separated
    #[arg(long, value_delimiter = ',')]
    ebn0: Vec<f64>,
    /// Replace the grid with a single noiseless point
    #[arg(long)]
    noiseless: bool,
    #[arg(long, default_value_t = 1000)]
    frames: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, env = "NBLDPC_SEED", default_value_t = 0)]
    seed: u64,
    /// Delta-LLR quantization scale for the fixed-point min-max modes
    #[arg(long)]
    llr_scale: Option<f64>,
    /// CSV output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-point status to stderr
    #[arg(long)]
    progress: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    source: CodeSource,
    #[arg(long, default_value = "min-max", value_parser = parse_algo)]
    algo: Algorithm,
    #[arg(long, default_value = "f64", value_parser = parse_arith)]
    arith: ArithMode,
    #[arg(long, default_value_t = 10)]
    iters: u32,
    /// Eb/N0 operating point in dB; noiseless when omitted
    #[arg(long)]
    ebn0: Option<f64>,
    #[arg(long, default_value_t = 256)]
    frames: u64,
    /// Worker counts to sweep, comma separated; 1 is prepended when missing
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    workers: Vec<usize>,
    #[arg(long, env = "NBLDPC_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    llr_scale: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    progress: bool,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Code shape used for the model (regular generator parameters)
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    m: usize,
    #[arg(long, default_value_t = 4)]
    dc: usize,
    #[arg(long, default_value_t = 2)]
    dv: usize,
    #[arg(long, default_value = "fft-spa", value_parser = parse_algo)]
    algo: Algorithm,
    /// Symbol widths to cover
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8")]
    qs: Vec<u32>,
    #[arg(long, default_value_t = 1)]
    code_seed: u64,
    #[arg(long, env = "NBLDPC_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => std::fs::File::create(p)
            .map(|f| Box::new(f) as Box<dyn Write>)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", p.display()))),
        None => Ok(Box::new(std::io::stdout())),
    }
}

fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let field = build_field(args.q, args.poly).map_err(|e| CliError::Input(e.to_string()))?;
    let g = field.order();
    let pcm = code::gen_regular_code(args.n, args.m, args.dc, args.dv, field, args.seed)
        .map_err(|e| CliError::Input(e.to_string()))?;
    code::save_code(&pcm, &args.out).map_err(|e| CliError::Engine(e.to_string()))?;
    println!(
        "wrote {}: N={} M={} dc={} dv={} g={} seed={}",
        args.out.display(),
        args.n,
        args.m,
        args.dc,
        args.dv,
        g,
        args.seed
    );
    Ok(())
}

fn decode_config(
    iters: u32,
    fixed_iters: bool,
    arith: ArithMode,
    llr_scale: Option<f64>,
) -> Result<DecodeConfig, CliError> {
    let mut config = DecodeConfig::new(iters)
        .map_err(|e| CliError::Input(e.to_string()))?
        .with_early_stop(!fixed_iters)
        .with_arith(arith);
    if let Some(s) = llr_scale {
        if s <= 0.0 {
            return Err(CliError::Input("llr-scale must be positive".into()));
        }
        config = config.with_llr_scale(s);
    }
    Ok(config)
}

fn prepare(
    source: &CodeSource,
    algo: Algorithm,
) -> Result<(code::TannerGraph, code::SystematicEncoder), CliError> {
    let pcm = source.load()?;
    let graph = code::build_tanner(&pcm);
    if algo == Algorithm::MinMax && !crate::min_max::supports_graph(&graph) {
        return Err(CliError::Input(
            "min-max needs every check-node degree >= 2 in the code".into(),
        ));
    }
    let encoder = code::SystematicEncoder::new(&pcm);
    Ok((graph, encoder))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    if !args.noiseless && args.ebn0.is_empty() {
        return Err(CliError::Input("simulate needs --ebn0 points or --noiseless".into()));
    }
    if args.workers == 0 || args.frames == 0 {
        return Err(CliError::Input("workers and frames must be positive".into()));
    }
    let (graph, encoder) = prepare(&args.source, args.algo)?;
    let config = decode_config(args.iters, args.fixed_iters, args.arith, args.llr_scale)?;
    let mut out = open_out(&args.out)?;
    writeln!(out, "ebn0_db,frames,frame_errors,symbol_errors,bit_errors,fer,ber,avg_iters")
        .map_err(|e| CliError::Engine(e.to_string()))?;
    let points: Vec<ChannelSpec> = if args.noiseless {
        vec![ChannelSpec::Noiseless]
    } else {
        args.ebn0.iter().map(|&db| ChannelSpec::Awgn { ebn0_db: db }).collect()
    };
    for chan in points {
        let label = match chan {
            ChannelSpec::Awgn { ebn0_db } => format!("{ebn0_db}"),
            ChannelSpec::Noiseless => "inf".to_string(),
        };
        if args.progress {
            eprintln!("simulate: Eb/N0 = {label} dB, {} frames", args.frames);
        }
        let report = perf::run_batch(
            &graph,
            &encoder,
            args.algo,
            &config,
            chan,
            args.frames,
            args.workers,
            args.seed,
        );
        writeln!(
            out,
            "{label},{},{},{},{},{:.6e},{:.6e},{:.3}",
            report.frames,
            report.frame_errors,
            report.symbol_errors,
            report.bit_errors,
            report.fer(),
            report.ber(graph.variable_nodes(), graph.field().q()),
            report.avg_iterations()
        )
        .map_err(|e| CliError::Engine(e.to_string()))?;
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    if args.frames == 0 {
        return Err(CliError::Input("frames must be positive".into()));
    }
    let (graph, encoder) = prepare(&args.source, args.algo)?;
    let config = decode_config(args.iters, true, args.arith, args.llr_scale)?;
    let chan = match args.ebn0 {
        Some(db) => ChannelSpec::Awgn { ebn0_db: db },
        None => ChannelSpec::Noiseless,
    };
    let mut workers = args.workers.clone();
    if !workers.contains(&1) {
        workers.insert(0, 1);
    }
    if workers.contains(&0) {
        return Err(CliError::Input("worker counts must be positive".into()));
    }
    let mut out = open_out(&args.out)?;
    writeln!(out, "workers,frames,wall_s,throughput_bps,speedup_vs_1")
        .map_err(|e| CliError::Engine(e.to_string()))?;
    // single-worker baseline first, whatever the list order
    let run = |w: usize, progress: bool| {
        if progress {
            eprintln!("bench: {w} workers, {} frames", args.frames);
        }
        perf::run_batch(&graph, &encoder, args.algo, &config, chan, args.frames, w, args.seed)
    };
    let baseline = run(1, args.progress);
    let base_tp = baseline.throughput_bps;
    for &w in &workers {
        let report = if w == 1 { baseline.clone() } else { run(w, args.progress) };
        writeln!(
            out,
            "{w},{},{:.6},{:.3},{:.3}",
            report.frames,
            report.wall.as_secs_f64(),
            report.throughput_bps,
            report.throughput_bps / base_tp
        )
        .map_err(|e| CliError::Engine(e.to_string()))?;
    }
    Ok(())
}

/// One analyze row per (q, block, metric) with nonzero content, plus a
/// per-q arithmetic total; exactly five columns.
fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let mut out = open_out(&args.out)?;
    writeln!(out, "q,block_metric,predicted,measured,residual")
        .map_err(|e| CliError::Engine(e.to_string()))?;
    for &q in &args.qs {
        let field = build_field(q, None).map_err(|e| CliError::Input(e.to_string()))?;
        let g = field.order() as u64;
        let pcm =
            code::gen_regular_code(args.n, args.m, args.dc, args.dv, field, args.code_seed)
                .map_err(|e| CliError::Input(e.to_string()))?;
        let graph = code::build_tanner(&pcm);
        let encoder = code::SystematicEncoder::new(&pcm);
        let config = DecodeConfig::new(1)
            .map_err(|e| CliError::Input(e.to_string()))?
            .with_early_stop(false)
            .with_counters(true);
        let counters = perf::measure_one_iteration(
            &graph,
            &encoder,
            args.algo,
            &config,
            args.seed,
        )
        .map_err(|e| CliError::Engine(e.to_string()))?;
        let model = perf::predict_counts(
            args.algo,
            args.m as u64,
            args.n as u64,
            args.dc as u64,
            args.dv as u64,
            g,
        );
        for row in &model.rows {
            let measured = counters.block(row.block);
            let metrics: [(&str, u64, u64); 5] = [
                ("additions", row.full.additions, measured.additions),
                ("multiplications", row.full.multiplications, measured.multiplications),
                ("divisions", row.full.divisions, measured.divisions),
                ("comparisons", row.full.comparisons, measured.comparisons),
                ("memory_transactions", row.full.memory_transactions, measured.memory_transactions),
            ];
            for (name, pred, meas) in metrics {
                if pred != 0 || meas != 0 {
                    writeln!(
                        out,
                        "{q},{}/{name},{pred},{meas},{}",
                        row.block.name(),
                        pred as i64 - meas as i64
                    )
                    .map_err(|e| CliError::Engine(e.to_string()))?;
                }
            }
        }
        let pred_arith = model.arith_total();
        let meas_arith = counters.arith_ops_per_iteration();
        writeln!(
            out,
            "{q},total/arith_ops,{pred_arith},{meas_arith},{}",
            pred_arith as i64 - meas_arith as i64
        )
        .map_err(|e| CliError::Engine(e.to_string()))?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Analyze(args) => cmd_analyze(args),
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Engine(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
