//! LLR-domain min-max decoder.
//!
//! Check-node processing runs a forward/backward recursion over the edges of
//! each check node: the boundary rows are coefficient-permuted copies of the
//! incoming delta-LLRs and every interior step scans the g^2 candidate pairs
//! of the parity constraint, keeping the minimum over the maxima. The
//! extrinsic outputs come from merging the forward and backward rows. Only
//! additions and comparisons are needed, which is why this decoder is the
//! natural fit for the fixed-point modes: messages are saturating signed
//! integers and stay non-negative throughout.
//!
//! The candidate enumeration uses a per-coefficient companion-index table
//! h*x'' so the inner loop is a table lookup, an XOR and one compare-select.

use crate::arith::{ArithMode, MmArith, MmF64, MmFixed32, MmFixed8};
use crate::channel::{PriorMode, SymbolPriors};
use crate::code::{syndrome_ok_graph, TannerGraph};
use crate::exec::Exec;
use crate::gf::{FieldSpec, GfSym};
use crate::perf::{Block, CounterSet, Tally};
use crate::{DecodeConfig, DecodeResult};

/// Whether the min-max decoder accepts this graph: every check node needs
/// degree at least two for the extrinsic recursion to be defined.
pub fn supports_graph(graph: &TannerGraph) -> bool {
    (0..graph.check_nodes()).all(|m| graph.dc(m) >= 2)
}

/// Standalone forward/backward check-node update: takes the incoming
/// delta-LLR rows of one check node and returns the extrinsic outputs per
/// edge. Generic over the arithmetic mode; exact in the integer modes.
pub fn check_node_beta<A: MmArith>(
    field: &FieldSpec,
    coeffs: &[GfSym],
    alpha_rows: &[Vec<A::Llr>],
) -> Vec<Vec<A::Llr>> {
    let g = field.order();
    let dc = coeffs.len();
    assert!(dc >= 2, "check nodes need degree at least 2");
    assert_eq!(alpha_rows.len(), dc);
    let mut fwd = vec![vec![A::Llr::default(); g]; dc];
    let mut bwd = vec![vec![A::Llr::default(); g]; dc];
    for x in 0..g {
        let a0 = field.inv(coeffs[0]).unwrap();
        fwd[0][x] = alpha_rows[0][field.mul_index(a0, x)];
        let al = field.inv(coeffs[dc - 1]).unwrap();
        bwd[dc - 1][x] = alpha_rows[dc - 1][field.mul_index(al, x)];
    }
    for t in 1..dc {
        let hf: Vec<usize> = (0..g).map(|x2| field.mul_index(coeffs[t], x2)).collect();
        for x in 0..g {
            let mut best = A::max_value();
            for x2 in 0..g {
                let cand = A::max(fwd[t - 1][x ^ hf[x2]], alpha_rows[t][x2]);
                best = A::min(best, cand);
            }
            fwd[t][x] = best;
        }
        let j = dc - 1 - t;
        let hb: Vec<usize> = (0..g).map(|x2| field.mul_index(coeffs[j], x2)).collect();
        for x in 0..g {
            let mut best = A::max_value();
            for x2 in 0..g {
                let cand = A::max(bwd[j + 1][x ^ hb[x2]], alpha_rows[j][x2]);
                best = A::min(best, cand);
            }
            bwd[j][x] = best;
        }
    }
    let mut out = vec![vec![A::Llr::default(); g]; dc];
    for x in 0..g {
        out[0][x] = bwd[1][field.mul_index(coeffs[0], x)];
        out[dc - 1][x] = fwd[dc - 2][field.mul_index(coeffs[dc - 1], x)];
    }
    for j in 1..dc.saturating_sub(1) {
        let hj: Vec<usize> = (0..g).map(|x| field.mul_index(coeffs[j], x)).collect();
        for x in 0..g {
            let mut best = A::max_value();
            for x1 in 0..g {
                let cand = A::max(fwd[j - 1][x1 ^ hj[x]], bwd[j + 1][x1]);
                best = A::min(best, cand);
            }
            out[j][x] = best;
        }
    }
    out
}

/// A reusable min-max decoder bound to one graph.
pub struct MinMaxDecoder<'g, A: MmArith> {
    graph: &'g TannerGraph,
    arith: A,
    alpha: Vec<A::Llr>,
    beta: Vec<A::Llr>,
    gamma: Vec<A::Llr>,
    /// Forward rows then backward rows for the check node in flight.
    fb: Vec<A::Llr>,
    decided: Vec<GfSym>,
    max_dc: usize,
    // per-iteration charge amounts
    trips_vn: u64,
    trips_cn: u64,
    sum_rem_g2: u64,
    sum_int_g2: u64,
    excl_vn: u64,
}

impl<'g, A: MmArith> MinMaxDecoder<'g, A> {
    pub fn new(graph: &'g TannerGraph, arith: A) -> Self {
        assert!(supports_graph(graph), "min-max needs every check-node degree >= 2");
        let e = graph.edges();
        let g = graph.field().order();
        let n = graph.variable_nodes();
        let m = graph.check_nodes();
        let max_dc = graph.max_dc();
        let g2 = (g * g) as u64;
        MinMaxDecoder {
            graph,
            arith,
            alpha: vec![A::Llr::default(); e * g],
            beta: vec![A::Llr::default(); e * g],
            gamma: vec![A::Llr::default(); n * g],
            fb: vec![A::Llr::default(); 2 * max_dc * g],
            decided: vec![GfSym::ZERO; n],
            max_dc,
            trips_vn: (n + e + e * g) as u64,
            trips_cn: (m + e + e * g) as u64,
            sum_rem_g2: (0..m).map(|i| (graph.dc(i) - 1) as u64).sum::<u64>() * g2,
            sum_int_g2: (0..m).map(|i| (graph.dc(i) - 2) as u64).sum::<u64>() * g2,
            excl_vn: graph.sum_dv_excl() * g as u64,
        }
    }

    pub fn decode(&mut self, priors: &SymbolPriors, config: &DecodeConfig) -> DecodeResult {
        self.decode_exec(priors, config, None)
    }

    fn decode_exec(
        &mut self,
        priors: &SymbolPriors,
        config: &DecodeConfig,
        staged: Option<usize>,
    ) -> DecodeResult {
        assert_eq!(priors.mode(), PriorMode::DeltaLlr, "this decoder takes delta-LLR priors");
        let graph = self.graph;
        let g = graph.field().order();
        let e = graph.edges();
        assert_eq!(priors.num_vns(), graph.variable_nodes());
        assert_eq!(priors.g(), g);

        for (i, &v) in priors.values().iter().enumerate() {
            self.gamma[i] = self.arith.quantize_gamma(v);
        }
        for edge in 0..e {
            let vn = graph.edge_vn(edge);
            self.alpha[edge * g..(edge + 1) * g].copy_from_slice(&self.gamma[vn * g..(vn + 1) * g]);
        }

        let mut tally = Tally::new(config.counters_enabled);
        let mut barriers_total = 0u64;
        let mut iterations_run = 0u32;
        let mut syndrome_ok = false;
        let mut decided_current = false;

        for iter in 0..config.max_iters() {
            {
                let mut exec = match staged {
                    None => Exec::Serial,
                    Some(t) => Exec::Staged { threads: t, barriers: &mut barriers_total },
                };
                self.run_iteration(&mut exec, &mut tally);
            }
            iterations_run = iter + 1;
            tally.end_first_iteration();
            if config.early_stop {
                self.decide();
                decided_current = true;
                if syndrome_ok_graph(graph, &self.decided) {
                    syndrome_ok = true;
                    break;
                }
            }
        }
        if !decided_current {
            self.decide();
        }
        if !syndrome_ok {
            syndrome_ok = syndrome_ok_graph(graph, &self.decided);
        }
        DecodeResult {
            decoded: self.decided.clone(),
            iterations_run,
            syndrome_ok,
            counters: tally.finalize(iterations_run, barriers_total),
        }
    }

    fn run_iteration(&mut self, exec: &mut Exec, tally: &mut Tally) {
        let graph = self.graph;
        let field = graph.field();
        let g = field.order();
        let e = graph.edges();
        let m = graph.check_nodes();
        let max_dc = self.max_dc;

        // Check-node processing, one check node at a time; the staged
        // schedule splits the symbol axis across workers at every step.
        let mut tmp_row = vec![A::Llr::default(); g];
        let mut hx = vec![0usize; g];
        for cn in 0..m {
            let dc = graph.dc(cn);
            let base = graph.cn_edge_base(cn);
            let coeff = |j: usize| graph.edge_coeff(base + j);
            let (f_part, b_part) = self.fb.split_at_mut(max_dc * g);

            // boundary rows: permuted copies of the first and last inputs
            {
                let alpha = &self.alpha;
                let a0 = field.inv(coeff(0)).unwrap();
                let al = field.inv(coeff(dc - 1)).unwrap();
                let first_src = &alpha[base * g..(base + 1) * g];
                let last_src = &alpha[(base + dc - 1) * g..(base + dc) * g];
                exec.stage_pair(
                    &mut f_part[..g],
                    &mut b_part[(dc - 1) * g..dc * g],
                    g,
                    1,
                    |x0, fa, fb| {
                        for (i, o) in fa.iter_mut().enumerate() {
                            *o = first_src[field.mul_index(a0, x0 + i)];
                        }
                        for (i, o) in fb.iter_mut().enumerate() {
                            *o = last_src[field.mul_index(al, x0 + i)];
                        }
                    },
                );
            }

            // remaining forward and backward rows, one step per barrier
            for t in 1..dc {
                let jb = dc - 1 - t;
                let (tmp_f, tmp_b): (Vec<A::Llr>, Vec<A::Llr>) =
                    (f_part[(t - 1) * g..t * g].to_vec(), b_part[(jb + 1) * g..(jb + 2) * g].to_vec());
                let hf: Vec<usize> = (0..g).map(|x2| field.mul_index(coeff(t), x2)).collect();
                let hb: Vec<usize> = (0..g).map(|x2| field.mul_index(coeff(jb), x2)).collect();
                let alpha = &self.alpha;
                let row_f = &alpha[(base + t) * g..(base + t + 1) * g];
                let row_b = &alpha[(base + jb) * g..(base + jb + 1) * g];
                exec.stage_pair(
                    &mut f_part[t * g..(t + 1) * g],
                    &mut b_part[jb * g..(jb + 1) * g],
                    g,
                    1,
                    |x0, fa, fb| {
                        for (i, o) in fa.iter_mut().enumerate() {
                            let x = x0 + i;
                            let mut best = A::max_value();
                            for x2 in 0..g {
                                let cand = A::max(tmp_f[x ^ hf[x2]], row_f[x2]);
                                best = A::min(best, cand);
                            }
                            *o = best;
                        }
                        for (i, o) in fb.iter_mut().enumerate() {
                            let x = x0 + i;
                            let mut best = A::max_value();
                            for x2 in 0..g {
                                let cand = A::max(tmp_b[x ^ hb[x2]], row_b[x2]);
                                best = A::min(best, cand);
                            }
                            *o = best;
                        }
                    },
                );
            }

            // extrinsic extraction: first edge, last edge, then interiors
            {
                for (x, slot) in hx.iter_mut().enumerate() {
                    *slot = field.mul_index(coeff(0), x);
                }
                let src = &b_part[g..2 * g];
                let hx_ref = &hx;
                exec.stage(&mut self.beta[base * g..(base + 1) * g], g, 1, |x0, chunk| {
                    for (i, o) in chunk.iter_mut().enumerate() {
                        *o = src[hx_ref[x0 + i]];
                    }
                });
            }
            {
                for (x, slot) in hx.iter_mut().enumerate() {
                    *slot = field.mul_index(coeff(dc - 1), x);
                }
                let src = &f_part[(dc - 2) * g..(dc - 1) * g];
                let hx_ref = &hx;
                exec.stage(
                    &mut self.beta[(base + dc - 1) * g..(base + dc) * g],
                    g,
                    1,
                    |x0, chunk| {
                        for (i, o) in chunk.iter_mut().enumerate() {
                            *o = src[hx_ref[x0 + i]];
                        }
                    },
                );
            }
            for j in 1..dc.saturating_sub(1) {
                for (x, slot) in hx.iter_mut().enumerate() {
                    *slot = field.mul_index(coeff(j), x);
                }
                tmp_row.copy_from_slice(&f_part[(j - 1) * g..j * g]);
                let bwd_next = &b_part[(j + 1) * g..(j + 2) * g];
                let tmp_ref = &tmp_row;
                let hx_ref = &hx;
                exec.stage(&mut self.beta[(base + j) * g..(base + j + 1) * g], g, 1, |x0, chunk| {
                    for (i, o) in chunk.iter_mut().enumerate() {
                        let hjx = hx_ref[x0 + i];
                        let mut best = A::max_value();
                        for x1 in 0..g {
                            let cand = A::max(tmp_ref[x1 ^ hjx], bwd_next[x1]);
                            best = A::min(best, cand);
                        }
                        *o = best;
                    }
                });
            }
        }
        tally.charge(
            Block::FbFirstLoopControl,
            CounterSet { additions: self.trips_cn, comparisons: self.trips_cn, ..Default::default() },
        );
        tally.charge(
            Block::FbFirst,
            CounterSet { memory_transactions: 6 * (m * g) as u64, ..Default::default() },
        );
        tally.charge(
            Block::FbRemainingLoopControl,
            CounterSet { additions: self.sum_rem_g2, comparisons: self.sum_rem_g2, ..Default::default() },
        );
        tally.charge(
            Block::FbRemaining,
            CounterSet {
                additions: 2 * self.sum_rem_g2,
                comparisons: 2 * self.sum_rem_g2,
                memory_transactions: 8 * self.sum_rem_g2,
                ..Default::default()
            },
        );
        tally.charge(
            Block::BetaEndsLoopControl,
            CounterSet { additions: self.trips_cn, comparisons: self.trips_cn, ..Default::default() },
        );
        tally.charge(
            Block::BetaEnds,
            CounterSet { memory_transactions: 6 * (m * g) as u64, ..Default::default() },
        );
        tally.charge(
            Block::BetaRemainingLoopControl,
            CounterSet { additions: self.sum_int_g2, comparisons: self.sum_int_g2, ..Default::default() },
        );
        tally.charge(
            Block::BetaRemaining,
            CounterSet {
                additions: self.sum_int_g2,
                comparisons: self.sum_int_g2,
                memory_transactions: 4 * self.sum_int_g2,
                ..Default::default()
            },
        );

        // Variable-node update: exclusion sum with the channel term, then
        // shift so the minimum is exactly zero.
        {
            let beta = &self.beta;
            let gamma = &self.gamma;
            exec.stage(&mut self.alpha, e, g, |first, chunk| {
                for (r, row) in chunk.chunks_mut(g).enumerate() {
                    let edge = first + r;
                    let vn = graph.edge_vn(edge);
                    for (x, o) in row.iter_mut().enumerate() {
                        let mut acc = gamma[vn * g + x];
                        for er in graph.vn(vn) {
                            if er.edge as usize != edge {
                                acc = A::add_sat(acc, beta[er.edge as usize * g + x]);
                            }
                        }
                        *o = acc;
                    }
                    let mut mn = row[0];
                    for &v in row.iter() {
                        mn = A::min(mn, v);
                    }
                    for o in row.iter_mut() {
                        *o = A::sub(*o, mn);
                    }
                }
            });
        }
        tally.charge(
            Block::VnpLoopControl,
            CounterSet { additions: self.trips_vn, comparisons: self.trips_vn, ..Default::default() },
        );
        tally.charge(
            Block::Vnp,
            CounterSet {
                additions: self.excl_vn + 2 * (e * g) as u64,
                comparisons: (e * g) as u64,
                memory_transactions: 5 * (e * g) as u64 + self.excl_vn,
                ..Default::default()
            },
        );
    }

    /// Total delta-LLR per symbol and argmin hard decision; ties take the
    /// lowest index.
    fn decide(&mut self) {
        let graph = self.graph;
        let g = graph.field().order();
        for n in 0..graph.variable_nodes() {
            let mut best_x = 0usize;
            let mut best = A::Llr::default();
            for x in 0..g {
                let mut total = self.gamma[n * g + x];
                for er in graph.vn(n) {
                    total = A::add_sat(total, self.beta[er.edge as usize * g + x]);
                }
                if x == 0 || total < best {
                    best = total;
                    best_x = x;
                }
            }
            self.decided[n] = GfSym(best_x as u8);
        }
    }

    #[cfg(test)]
    pub(crate) fn beta_bank(&self) -> &[A::Llr] {
        &self.beta
    }
}

/// Decodes with the arithmetic mode picked by the config.
pub fn decode_min_max(
    graph: &TannerGraph,
    priors: &SymbolPriors,
    config: &DecodeConfig,
) -> DecodeResult {
    match config.arith {
        ArithMode::F64 => MinMaxDecoder::new(graph, MmF64).decode(priors, config),
        ArithMode::Fixed32 => {
            let arith = MmFixed32 { scale: config.llr_scale.unwrap_or(crate::arith::MM_SCALE_I32) };
            MinMaxDecoder::new(graph, arith).decode(priors, config)
        }
        ArithMode::Fixed8 => {
            let arith = MmFixed8 { scale: config.llr_scale.unwrap_or(crate::arith::MM_SCALE_I8) };
            MinMaxDecoder::new(graph, arith).decode(priors, config)
        }
    }
}

pub(crate) fn decode_min_max_staged(
    graph: &TannerGraph,
    priors: &SymbolPriors,
    config: &DecodeConfig,
    threads: usize,
) -> DecodeResult {
    match config.arith {
        ArithMode::F64 => {
            MinMaxDecoder::new(graph, MmF64).decode_exec(priors, config, Some(threads))
        }
        ArithMode::Fixed32 => {
            let arith = MmFixed32 { scale: config.llr_scale.unwrap_or(crate::arith::MM_SCALE_I32) };
            MinMaxDecoder::new(graph, arith).decode_exec(priors, config, Some(threads))
        }
        ArithMode::Fixed8 => {
            let arith = MmFixed8 { scale: config.llr_scale.unwrap_or(crate::arith::MM_SCALE_I8) };
            MinMaxDecoder::new(graph, arith).decode_exec(priors, config, Some(threads))
        }
    }
}
