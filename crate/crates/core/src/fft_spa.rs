//! Transform-domain sum-product decoder.
//!
//! One iteration runs permutation, a Walsh-Hadamard transform over the
//! GF(2^q) symbol axis, the check-node exclusion product, the inverse
//! transform, depermutation and the variable-node product with
//! normalization. Messages live in edge-major banks of E x g entries;
//! transform intermediates are widened to twice the storage width in the
//! fixed-point modes and every vector is renormalized after check-node and
//! variable-node processing there.
//!
//! The index permutation realizes the coefficient scaling of the parity
//! checks: a message leaving a variable node over an edge with coefficient h
//! is reindexed as out(x) = in(h^-1 * x), so it becomes a belief about
//! h * c; the reverse direction uses out(x) = in(h * x). Index 0 is fixed
//! and the nonzero indices shift cyclically through the exp/log tables.

use crate::arith::{ArithMode, SpaArith, SpaF64, SpaFixed32, SpaFixed8};
use crate::channel::{PriorMode, SymbolPriors};
use crate::code::{syndrome_ok_graph, TannerGraph};
use crate::exec::{balanced_parts, Exec};
use crate::gf::{FieldSpec, GfSym};
use crate::perf::{Block, CounterSet, Tally};
use crate::{DecodeConfig, DecodeResult};
use std::sync::atomic::Ordering;

/// Message direction through the permutation network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermuteDirection {
    VnToCn,
    CnToVn,
}

/// The index map coefficient for a given edge coefficient and direction.
pub fn permute_coeff(field: &FieldSpec, h: GfSym, dir: PermuteDirection) -> GfSym {
    match dir {
        PermuteDirection::VnToCn => field.inv(h).expect("edge coefficients are nonzero"),
        PermuteDirection::CnToVn => h,
    }
}

/// Barrel shift: out[x] = in[a * x]. Entry 0 never moves.
pub fn permute_vector<T: Copy>(field: &FieldSpec, out: &mut [T], inp: &[T], a: GfSym) {
    debug_assert_eq!(out.len(), inp.len());
    debug_assert_eq!(inp.len(), field.order());
    for (x, o) in out.iter_mut().enumerate() {
        *o = inp[field.mul_index(a, x)];
    }
}

/// In-place Walsh-Hadamard butterflies over log2(g) stages.
pub fn fft_gf(v: &mut [f64]) {
    let g = v.len();
    debug_assert!(g.is_power_of_two());
    let mut mask = 1;
    while mask < g {
        for x in 0..g {
            if x & mask == 0 {
                let a = v[x];
                let b = v[x | mask];
                v[x] = a + b;
                v[x | mask] = a - b;
            }
        }
        mask <<= 1;
    }
}

/// Inverse transform: the same butterflies followed by division by g = 2^q.
pub fn ifft_gf(v: &mut [f64]) {
    fft_gf(v);
    let g = v.len() as f64;
    for x in v {
        *x /= g;
    }
}

/// Runs the full check-node pipeline for a single check node in f64:
/// permute, transform, exclusion product, inverse transform, depermute.
/// Returns one outgoing vector per edge.
pub fn check_node_messages_f64(
    field: &FieldSpec,
    coeffs: &[GfSym],
    u_rows: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let g = field.order();
    let dc = coeffs.len();
    assert_eq!(u_rows.len(), dc);
    let mut t = vec![vec![0.0; g]; dc];
    for ((row, &h), u) in t.iter_mut().zip(coeffs).zip(u_rows) {
        let a = permute_coeff(field, h, PermuteDirection::VnToCn);
        permute_vector(field, row, u, a);
        fft_gf(row);
    }
    let mut out = Vec::with_capacity(dc);
    for (j, &h) in coeffs.iter().enumerate() {
        let mut prod = vec![1.0; g];
        for (i, row) in t.iter().enumerate() {
            if i != j {
                for x in 0..g {
                    prod[x] *= row[x];
                }
            }
        }
        ifft_gf(&mut prod);
        let mut v = vec![0.0; g];
        permute_vector(field, &mut v, &prod, h);
        out.push(v);
    }
    out
}

/// Variable-node update in f64 for one variable node: per-edge exclusion
/// product with the prior, normalized to sum 1.
pub fn variable_node_messages_f64(prior: &[f64], v_rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let g = prior.len();
    let dv = v_rows.len();
    let mut out = Vec::with_capacity(dv);
    for j in 0..dv {
        let mut u: Vec<f64> = prior.to_vec();
        for (i, row) in v_rows.iter().enumerate() {
            if i != j {
                for x in 0..g {
                    u[x] *= row[x];
                }
            }
        }
        let s: f64 = u.iter().sum();
        if s > 0.0 {
            for x in &mut u {
                *x /= s;
            }
        } else {
            u.fill(1.0 / g as f64);
        }
        out.push(u);
    }
    out
}

/// A reusable transform-domain decoder bound to one graph.
pub struct FftSpaDecoder<'g, A: SpaArith> {
    graph: &'g TannerGraph,
    /// inv(h_e) per edge, the VN-to-CN permutation coefficients.
    inv_coeff: Vec<GfSym>,
    bank_u: Vec<A::Msg>,
    msg_tmp: Vec<A::Msg>,
    wide: Vec<A::Acc>,
    wide_tmp: Vec<A::Acc>,
    prior_msg: Vec<A::Msg>,
    decided: Vec<GfSym>,
    // per-iteration charge amounts
    trips_vn: u64,
    trips_cn: u64,
    excl_cn: u64,
    excl_vn: u64,
}

impl<'g, A: SpaArith> FftSpaDecoder<'g, A> {
    pub fn new(graph: &'g TannerGraph) -> Self {
        let e = graph.edges();
        let g = graph.field().order();
        let n = graph.variable_nodes();
        let inv_coeff = (0..e)
            .map(|i| permute_coeff(graph.field(), graph.edge_coeff(i), PermuteDirection::VnToCn))
            .collect();
        FftSpaDecoder {
            graph,
            inv_coeff,
            bank_u: vec![A::Msg::default(); e * g],
            msg_tmp: vec![A::Msg::default(); e * g],
            wide: vec![A::Acc::default(); e * g],
            wide_tmp: vec![A::Acc::default(); e * g],
            prior_msg: vec![A::Msg::default(); n * g],
            decided: vec![GfSym::ZERO; n],
            trips_vn: (n + e + e * g) as u64,
            trips_cn: (graph.check_nodes() + e + e * g) as u64,
            excl_cn: graph.sum_dc_excl() * g as u64,
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
        assert_eq!(priors.mode(), PriorMode::Probability, "this decoder takes probability priors");
        let graph = self.graph;
        let field = graph.field();
        let g = field.order();
        let e = graph.edges();
        let n = graph.variable_nodes();
        assert_eq!(priors.num_vns(), n);
        assert_eq!(priors.g(), g);

        for (i, &p) in priors.values().iter().enumerate() {
            self.prior_msg[i] = A::from_prob(p);
        }
        for edge in 0..e {
            let vn = graph.edge_vn(edge);
            self.bank_u[edge * g..(edge + 1) * g]
                .copy_from_slice(&self.prior_msg[vn * g..(vn + 1) * g]);
        }

        let threads = staged.unwrap_or(1);
        let cn_weights: Vec<usize> = (0..graph.check_nodes()).map(|m| graph.dc(m) * g).collect();
        let cn_parts = balanced_parts(&cn_weights, threads);
        let max_dc = graph.max_dc();

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
                self.run_iteration(&mut exec, &cn_parts, max_dc, &mut tally);
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

    fn run_iteration(
        &mut self,
        exec: &mut Exec,
        cn_parts: &[(usize, usize)],
        max_dc: usize,
        tally: &mut Tally,
    ) {
        let graph = self.graph;
        let field = graph.field();
        let g = field.order();
        let q = field.q();
        let e = graph.edges();

        // Permutation: gather into scratch, then commit.
        {
            let bank_u = &self.bank_u;
            let inv_coeff = &self.inv_coeff;
            exec.stage(&mut self.msg_tmp, e, g, |first, chunk| {
                for (r, row) in chunk.chunks_mut(g).enumerate() {
                    let edge = first + r;
                    let src = &bank_u[edge * g..(edge + 1) * g];
                    let a = inv_coeff[edge];
                    for (x, o) in row.iter_mut().enumerate() {
                        *o = src[field.mul_index(a, x)];
                    }
                }
            });
        }
        {
            let msg_tmp = &self.msg_tmp;
            exec.stage(&mut self.bank_u, e, g, |first, chunk| {
                chunk.copy_from_slice(&msg_tmp[first * g..first * g + chunk.len()]);
            });
        }
        tally.charge(
            Block::PermutationLoopControl,
            CounterSet { additions: self.trips_vn, comparisons: self.trips_vn, ..Default::default() },
        );
        tally.charge(
            Block::Permutation,
            CounterSet { memory_transactions: 3 * (e * g) as u64, ..Default::default() },
        );

        // Transform: per stage, copy to scratch then butterfly back.
        for b in 0..q {
            let mask = 1usize << b;
            {
                let bank_u = &self.bank_u;
                let wide = &self.wide;
                exec.stage(&mut self.wide_tmp, e, g, |first, chunk| {
                    if b == 0 {
                        for (i, o) in chunk.iter_mut().enumerate() {
                            *o = A::widen(bank_u[first * g + i]);
                        }
                    } else {
                        chunk.copy_from_slice(&wide[first * g..first * g + chunk.len()]);
                    }
                });
            }
            {
                let wide_tmp = &self.wide_tmp;
                exec.stage(&mut self.wide, e, g, |first, chunk| {
                    for (r, row) in chunk.chunks_mut(g).enumerate() {
                        let src = &wide_tmp[(first + r) * g..(first + r + 1) * g];
                        for (x, o) in row.iter_mut().enumerate() {
                            *o = if x & mask == 0 {
                                A::add(src[x], src[x | mask])
                            } else {
                                A::sub(src[x ^ mask], src[x])
                            };
                        }
                    }
                });
            }
        }
        let egq = (e * g) as u64 * q as u64;
        tally.charge(
            Block::CnpLoopControl,
            CounterSet { additions: self.trips_cn, comparisons: self.trips_cn, ..Default::default() },
        );
        tally.charge(
            Block::Fft,
            CounterSet {
                additions: egq,
                multiplications: egq,
                memory_transactions: egq,
                ..Default::default()
            },
        );

        // Check-node exclusion products, in place per check node.
        {
            let graph_ref = graph;
            exec.stage_parts(&mut self.wide, cn_parts, |first_cn, chunk| {
                let mut pre = vec![A::Acc::default(); max_dc * g];
                let mut suf = vec![A::Acc::default(); max_dc * g];
                let mut offset = 0;
                let mut cn = first_cn;
                while offset < chunk.len() {
                    let dc = graph_ref.dc(cn);
                    let rows = &mut chunk[offset..offset + dc * g];
                    for x in 0..g {
                        pre[x] = A::unit();
                        suf[(dc - 1) * g + x] = A::unit();
                    }
                    for j in 1..dc {
                        for x in 0..g {
                            pre[j * g + x] = A::mul(pre[(j - 1) * g + x], rows[(j - 1) * g + x]);
                        }
                        let k = dc - 1 - j;
                        for x in 0..g {
                            suf[k * g + x] = A::mul(suf[(k + 1) * g + x], rows[(k + 1) * g + x]);
                        }
                    }
                    for j in 0..dc {
                        for x in 0..g {
                            rows[j * g + x] = A::mul(pre[j * g + x], suf[j * g + x]);
                        }
                    }
                    offset += dc * g;
                    cn += 1;
                }
            });
        }
        tally.charge(
            Block::CnpProduct,
            CounterSet {
                additions: self.excl_cn,
                multiplications: self.excl_cn,
                memory_transactions: self.excl_cn,
                ..Default::default()
            },
        );

        // Inverse transform plus the scale pass (and fixed-point renorm).
        for b in 0..q {
            let mask = 1usize << b;
            {
                let wide = &self.wide;
                exec.stage(&mut self.wide_tmp, e, g, |first, chunk| {
                    chunk.copy_from_slice(&wide[first * g..first * g + chunk.len()]);
                });
            }
            {
                let wide_tmp = &self.wide_tmp;
                exec.stage(&mut self.wide, e, g, |first, chunk| {
                    for (r, row) in chunk.chunks_mut(g).enumerate() {
                        let src = &wide_tmp[(first + r) * g..(first + r + 1) * g];
                        for (x, o) in row.iter_mut().enumerate() {
                            *o = if x & mask == 0 {
                                A::add(src[x], src[x | mask])
                            } else {
                                A::sub(src[x ^ mask], src[x])
                            };
                        }
                    }
                });
            }
        }
        {
            let zero_sum = &tally.zero_sum;
            exec.stage(&mut self.wide, e, g, |_first, chunk| {
                for row in chunk.chunks_mut(g) {
                    for v in row.iter_mut() {
                        *v = A::div_pow2(*v, q);
                    }
                    if A::renorm_after_cnp() && !A::normalize(row) {
                        row.fill(A::uniform(g));
                        zero_sum.fetch_add(1, Ordering::Relaxed);
                    }
                }
            });
        }
        tally.charge(
            Block::InverseFft,
            CounterSet {
                additions: egq,
                multiplications: egq,
                divisions: (e * g) as u64,
                memory_transactions: egq + (e * g) as u64,
                ..Default::default()
            },
        );
        if A::renorm_after_cnp() {
            tally.charge(
                Block::FixedPointRenorm,
                CounterSet {
                    additions: (e * g) as u64,
                    divisions: (e * g) as u64,
                    memory_transactions: 2 * (e * g) as u64,
                    ..Default::default()
                },
            );
        }

        // Depermutation: gather by h into scratch, then commit.
        {
            let wide = &self.wide;
            exec.stage(&mut self.wide_tmp, e, g, |first, chunk| {
                for (r, row) in chunk.chunks_mut(g).enumerate() {
                    let edge = first + r;
                    let src = &wide[edge * g..(edge + 1) * g];
                    let h = graph.edge_coeff(edge);
                    for (x, o) in row.iter_mut().enumerate() {
                        *o = src[field.mul_index(h, x)];
                    }
                }
            });
        }
        {
            let wide_tmp = &self.wide_tmp;
            exec.stage(&mut self.wide, e, g, |first, chunk| {
                chunk.copy_from_slice(&wide_tmp[first * g..first * g + chunk.len()]);
            });
        }
        tally.charge(
            Block::DepermutationLoopControl,
            CounterSet { additions: self.trips_cn, comparisons: self.trips_cn, ..Default::default() },
        );
        tally.charge(
            Block::Depermutation,
            CounterSet { memory_transactions: 3 * (e * g) as u64, ..Default::default() },
        );

        // Variable-node exclusion product with the prior, then normalize and
        // narrow back into the message bank.
        {
            let wide = &self.wide;
            let prior_msg = &self.prior_msg;
            exec.stage(&mut self.wide_tmp, e, g, |first, chunk| {
                for (r, row) in chunk.chunks_mut(g).enumerate() {
                    let edge = first + r;
                    let vn = graph.edge_vn(edge);
                    for (x, o) in row.iter_mut().enumerate() {
                        let mut acc = A::widen(prior_msg[vn * g + x]);
                        for er in graph.vn(vn) {
                            if er.edge as usize != edge {
                                acc = A::mul(acc, wide[er.edge as usize * g + x]);
                            }
                        }
                        *o = acc;
                    }
                }
            });
        }
        {
            let wide_tmp = &self.wide_tmp;
            let zero_sum = &tally.zero_sum;
            exec.stage(&mut self.bank_u, e, g, |first, chunk| {
                let mut buf = vec![A::Acc::default(); g];
                for (r, row) in chunk.chunks_mut(g).enumerate() {
                    buf.copy_from_slice(&wide_tmp[(first + r) * g..(first + r + 1) * g]);
                    if A::normalize(&mut buf) {
                        for (o, &v) in row.iter_mut().zip(buf.iter()) {
                            *o = A::narrow(v);
                        }
                    } else {
                        row.fill(A::narrow(A::uniform(g)));
                        zero_sum.fetch_add(1, Ordering::Relaxed);
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
                additions: (e * g) as u64,
                multiplications: self.excl_vn + (e * g) as u64,
                divisions: (e * g) as u64,
                memory_transactions: 5 * (e * g) as u64 + self.excl_vn,
                ..Default::default()
            },
        );
    }

    /// A-posteriori product and hard decision; ties take the lowest index.
    fn decide(&mut self) {
        let graph = self.graph;
        let g = graph.field().order();
        for n in 0..graph.variable_nodes() {
            let mut best_x = 0usize;
            let mut best = A::Acc::default();
            for x in 0..g {
                let mut z = A::widen(self.prior_msg[n * g + x]);
                for er in graph.vn(n) {
                    z = A::mul(z, self.wide[er.edge as usize * g + x]);
                }
                if x == 0 || A::gt(z, best) {
                    best = z;
                    best_x = x;
                }
            }
            self.decided[n] = GfSym(best_x as u8);
        }
    }
}

/// Decodes with the arithmetic mode picked by the config.
pub fn decode_fft_spa(
    graph: &TannerGraph,
    priors: &SymbolPriors,
    config: &DecodeConfig,
) -> DecodeResult {
    match config.arith {
        ArithMode::F64 => FftSpaDecoder::<SpaF64>::new(graph).decode(priors, config),
        ArithMode::Fixed32 => FftSpaDecoder::<SpaFixed32>::new(graph).decode(priors, config),
        ArithMode::Fixed8 => FftSpaDecoder::<SpaFixed8>::new(graph).decode(priors, config),
    }
}

pub(crate) fn decode_fft_spa_staged(
    graph: &TannerGraph,
    priors: &SymbolPriors,
    config: &DecodeConfig,
    threads: usize,
) -> DecodeResult {
    match config.arith {
        ArithMode::F64 => {
            FftSpaDecoder::<SpaF64>::new(graph).decode_exec(priors, config, Some(threads))
        }
        ArithMode::Fixed32 => {
            FftSpaDecoder::<SpaFixed32>::new(graph).decode_exec(priors, config, Some(threads))
        }
        ArithMode::Fixed8 => {
            FftSpaDecoder::<SpaFixed8>::new(graph).decode_exec(priors, config, Some(threads))
        }
    }
}
