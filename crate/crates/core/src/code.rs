//! Parity-check matrices, Tanner graphs, code file I/O, encoding and
//! syndrome checking.
//!
//! Code files use a non-binary alist variant:
//!
//! ```text
//! N M g
//! dv_max dc_max
//! <N column degrees>
//! <M row degrees>
//! <one line per column: "row:coeff" pairs, row indices 0-based,
//!  coeff as decimal polynomial-basis value in [1, g)>
//! ```
//!
//! `#` starts a comment. A `# poly=<decimal>` comment overrides the default
//! primitive polynomial; the writer always emits it. The writer output is
//! canonical: entries sorted by index.

use crate::gf::{build_field, FieldSpec, GfError, GfSym};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

pub type Codeword = Vec<GfSym>;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("field mismatch at line {line}: coefficient {value} is outside [1, {g})")]
    FieldMismatch { line: usize, value: u32, g: usize },
    #[error("infeasible degrees: N*dv = {n}*{dv} != M*dc = {m}*{dc}")]
    InfeasibleDegrees { n: usize, m: usize, dc: usize, dv: usize },
    #[error("check-node degree {dc} exceeds the number of variable nodes {n}")]
    DegreeTooLarge { dc: usize, n: usize },
    #[error("codeword length {got} does not match code length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("message length {got} does not match encoder dimension {expected}")]
    MessageLength { expected: usize, got: usize },
    #[error("random construction failed after {0} restarts")]
    ConstructionFailed(usize),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A sparse parity-check matrix over GF(2^q).
#[derive(Debug, Clone, PartialEq)]
pub struct ParityCheckMatrix {
    m: usize,
    n: usize,
    field: FieldSpec,
    /// Nonzero entries (row, col, coeff), sorted row-major, no duplicates.
    entries: Vec<(usize, usize, GfSym)>,
}

impl ParityCheckMatrix {
    /// Builds a PCM from explicit entries, validating the invariants.
    pub fn from_entries(
        m: usize,
        n: usize,
        field: FieldSpec,
        mut entries: Vec<(usize, usize, GfSym)>,
    ) -> Result<ParityCheckMatrix, CodeError> {
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(CodeError::Parse {
                    line: 0,
                    col: 0,
                    msg: format!("duplicate entry at ({}, {})", w[0].0, w[0].1),
                });
            }
        }
        for &(r, c, h) in &entries {
            if r >= m || c >= n {
                return Err(CodeError::Parse {
                    line: 0,
                    col: 0,
                    msg: format!("entry ({r}, {c}) outside a {m} x {n} matrix"),
                });
            }
            if h.is_zero() || !field.contains(h) {
                return Err(CodeError::FieldMismatch {
                    line: 0,
                    value: h.0 as u32,
                    g: field.order(),
                });
            }
        }
        Ok(ParityCheckMatrix { m, n, field, entries })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn entries(&self) -> &[(usize, usize, GfSym)] {
        &self.entries
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// The example 3x6 GF(4) code used across tests and docs.
    pub fn toy_3x6_gf4() -> ParityCheckMatrix {
        let field = build_field(2, None).unwrap();
        let a = GfSym::ALPHA;
        let a2 = GfSym(3);
        let one = GfSym::ONE;
        let entries = vec![
            (0, 0, a),
            (0, 2, one),
            (0, 3, a),
            (0, 5, one),
            (1, 0, a2),
            (1, 1, a),
            (1, 3, one),
            (1, 4, one),
            (2, 1, a),
            (2, 2, a2),
            (2, 4, a2),
            (2, 5, one),
        ];
        ParityCheckMatrix::from_entries(3, 6, field, entries).unwrap()
    }
}

/// One edge as seen from either side of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRef {
    /// The node on the other side (VN index in the CN view, CN index in the
    /// VN view).
    pub node: u32,
    pub coeff: GfSym,
    /// Global edge id, assigned in CN-major order.
    pub edge: u32,
}

/// Edge-indexed dual view of a parity-check matrix.
#[derive(Debug, Clone)]
pub struct TannerGraph {
    m: usize,
    n: usize,
    e: usize,
    field: FieldSpec,
    cn_ptr: Vec<u32>,
    cn_adj: Vec<EdgeRef>,
    vn_ptr: Vec<u32>,
    vn_adj: Vec<EdgeRef>,
    /// VN index of each edge id.
    edge_vn: Vec<u32>,
    /// CN index of each edge id.
    edge_cn: Vec<u32>,
    /// Coefficient of each edge id.
    edge_coeff: Vec<GfSym>,
}

/// Builds the dual edge-indexed view. Edge ids are assigned CN-major: all
/// edges of CN 0 first (in ascending VN order), then CN 1, and so on.
pub fn build_tanner(pcm: &ParityCheckMatrix) -> TannerGraph {
    let m = pcm.rows();
    let n = pcm.cols();
    let e = pcm.num_entries();
    let mut cn_ptr = vec![0u32; m + 1];
    let mut vn_ptr = vec![0u32; n + 1];
    for &(r, c, _) in pcm.entries() {
        cn_ptr[r + 1] += 1;
        vn_ptr[c + 1] += 1;
    }
    for i in 0..m {
        cn_ptr[i + 1] += cn_ptr[i];
    }
    for i in 0..n {
        vn_ptr[i + 1] += vn_ptr[i];
    }
    // entries are sorted row-major, so the entry order is the edge id order
    let mut cn_adj = Vec::with_capacity(e);
    let mut edge_vn = vec![0u32; e];
    let mut edge_cn = vec![0u32; e];
    let mut edge_coeff = vec![GfSym::ZERO; e];
    let mut vn_adj = vec![EdgeRef { node: 0, coeff: GfSym::ZERO, edge: 0 }; e];
    let mut vn_fill = vn_ptr.clone();
    for (id, &(r, c, h)) in pcm.entries().iter().enumerate() {
        cn_adj.push(EdgeRef { node: c as u32, coeff: h, edge: id as u32 });
        edge_vn[id] = c as u32;
        edge_cn[id] = r as u32;
        edge_coeff[id] = h;
        let slot = vn_fill[c] as usize;
        vn_adj[slot] = EdgeRef { node: r as u32, coeff: h, edge: id as u32 };
        vn_fill[c] += 1;
    }
    TannerGraph {
        m,
        n,
        e,
        field: pcm.field().clone(),
        cn_ptr,
        cn_adj,
        vn_ptr,
        vn_adj,
        edge_vn,
        edge_cn,
        edge_coeff,
    }
}

impl TannerGraph {
    pub fn check_nodes(&self) -> usize {
        self.m
    }

    pub fn variable_nodes(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> usize {
        self.e
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Edges of check node `m`, ascending VN order.
    #[inline]
    pub fn cn(&self, m: usize) -> &[EdgeRef] {
        &self.cn_adj[self.cn_ptr[m] as usize..self.cn_ptr[m + 1] as usize]
    }

    /// Edges of variable node `n`, ascending CN order.
    #[inline]
    pub fn vn(&self, n: usize) -> &[EdgeRef] {
        &self.vn_adj[self.vn_ptr[n] as usize..self.vn_ptr[n + 1] as usize]
    }

    #[inline]
    pub fn dc(&self, m: usize) -> usize {
        (self.cn_ptr[m + 1] - self.cn_ptr[m]) as usize
    }

    #[inline]
    pub fn dv(&self, n: usize) -> usize {
        (self.vn_ptr[n + 1] - self.vn_ptr[n]) as usize
    }

    pub fn max_dc(&self) -> usize {
        (0..self.m).map(|m| self.dc(m)).max().unwrap_or(0)
    }

    pub fn max_dv(&self) -> usize {
        (0..self.n).map(|n| self.dv(n)).max().unwrap_or(0)
    }

    #[inline]
    pub fn edge_vn(&self, e: usize) -> usize {
        self.edge_vn[e] as usize
    }

    #[inline]
    pub fn edge_cn(&self, e: usize) -> usize {
        self.edge_cn[e] as usize
    }

    #[inline]
    pub fn edge_coeff(&self, e: usize) -> GfSym {
        self.edge_coeff[e]
    }

    /// First edge id of check node `m`; CN-major ids make a CN's edges
    /// contiguous.
    #[inline]
    pub fn cn_edge_base(&self, m: usize) -> usize {
        self.cn_ptr[m] as usize
    }

    /// Sum of dc*(dc-1) over check nodes, the exclusion-product trip count.
    pub fn sum_dc_excl(&self) -> u64 {
        (0..self.m).map(|m| (self.dc(m) * (self.dc(m).saturating_sub(1))) as u64).sum()
    }

    /// Sum of dv*(dv-1) over variable nodes.
    pub fn sum_dv_excl(&self) -> u64 {
        (0..self.n).map(|n| (self.dv(n) * (self.dv(n).saturating_sub(1))) as u64).sum()
    }
}

/// Computes the syndrome s_m = XOR_n h_{m,n} * c_n and whether it is zero.
pub fn syndrome(pcm: &ParityCheckMatrix, codeword: &[GfSym]) -> Result<(Vec<GfSym>, bool), CodeError> {
    if codeword.len() != pcm.cols() {
        return Err(CodeError::LengthMismatch { expected: pcm.cols(), got: codeword.len() });
    }
    let f = pcm.field();
    let mut s = vec![GfSym::ZERO; pcm.rows()];
    for &(r, c, h) in pcm.entries() {
        s[r] = f.add(s[r], f.mul(h, codeword[c]));
    }
    let ok = s.iter().all(|x| x.is_zero());
    Ok((s, ok))
}

/// Graph-side syndrome check used inside decoder loops.
pub(crate) fn syndrome_ok_graph(graph: &TannerGraph, codeword: &[GfSym]) -> bool {
    let f = graph.field();
    (0..graph.check_nodes()).all(|m| {
        let mut s = GfSym::ZERO;
        for er in graph.cn(m) {
            s = f.add(s, f.mul(er.coeff, codeword[er.node as usize]));
        }
        s.is_zero()
    })
}

/// Generates a regular (N, M) code with row weight `dc`, column weight `dv`
/// and coefficients drawn uniformly from the nonzero field elements.
///
/// Duplicate edges are always rejected; length-4 cycles are rejected with a
/// budget of 100 retries per edge, then accepted. Deterministic for a given
/// parameter set and seed.
pub fn gen_regular_code(
    n: usize,
    m: usize,
    dc: usize,
    dv: usize,
    field: FieldSpec,
    seed: u64,
) -> Result<ParityCheckMatrix, CodeError> {
    if n * dv != m * dc {
        return Err(CodeError::InfeasibleDegrees { n, m, dc, dv });
    }
    if dc > n {
        return Err(CodeError::DegreeTooLarge { dc, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const MAX_RESTARTS: usize = 1000;
    const EDGE_RETRIES: usize = 100;
    for _ in 0..MAX_RESTARTS {
        let mut sockets: Vec<u32> =
            (0..n).flat_map(|v| std::iter::repeat_n(v as u32, dv)).collect();
        sockets.shuffle(&mut rng);
        let mut rows: Vec<Vec<u32>> = vec![Vec::with_capacity(dc); m];
        let mut vn_rows: Vec<Vec<u32>> = vec![Vec::with_capacity(dv); n];
        let mut failed = false;
        'rows: for r in 0..m {
            for _slot in 0..dc {
                let mut chosen = None;
                for _try in 0..EDGE_RETRIES {
                    let p = rng.random_range(0..sockets.len());
                    let v = sockets[p] as usize;
                    if rows[r].contains(&(v as u32)) {
                        continue;
                    }
                    // 4-cycle: some CN already on v shares another VN with row r
                    let makes_cycle = vn_rows[v].iter().any(|&r2| {
                        rows[r2 as usize].iter().any(|w| rows[r].contains(w))
                    });
                    if !makes_cycle {
                        chosen = Some(p);
                        break;
                    }
                }
                if chosen.is_none() {
                    // budget exhausted: accept any non-duplicate socket
                    chosen = sockets
                        .iter()
                        .position(|&v| !rows[r].contains(&v));
                }
                match chosen {
                    Some(p) => {
                        let v = sockets.swap_remove(p);
                        rows[r].push(v);
                        vn_rows[v as usize].push(r as u32);
                    }
                    None => {
                        failed = true;
                        break 'rows;
                    }
                }
            }
        }
        if failed {
            continue;
        }
        let g = field.order();
        let mut entries = Vec::with_capacity(m * dc);
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            for &v in row.iter() {
                let coeff = GfSym(rng.random_range(1..g) as u8);
                entries.push((r, v as usize, coeff));
            }
        }
        return ParityCheckMatrix::from_entries(m, n, field, entries);
    }
    Err(CodeError::ConstructionFailed(MAX_RESTARTS))
}

// ---------------------------------------------------------------------------
// Code file I/O
// ---------------------------------------------------------------------------

pub fn load_code(path: impl AsRef<Path>) -> Result<ParityCheckMatrix, CodeError> {
    let text = std::fs::read_to_string(path)?;
    parse_code(&text)
}

pub fn save_code(pcm: &ParityCheckMatrix, path: impl AsRef<Path>) -> Result<(), CodeError> {
    std::fs::write(path, format_code(pcm))?;
    Ok(())
}

struct Tok<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

/// Tokens with positions, comments stripped. Also extracts a `poly=`
/// directive if one appears in a comment.
fn tokenize(text: &str) -> (Vec<Tok<'_>>, Option<u32>) {
    let mut toks = Vec::new();
    let mut poly = None;
    for (ln, line) in text.lines().enumerate() {
        let (body, comment) = match line.find('#') {
            Some(i) => (&line[..i], Some(line[i + 1..].trim())),
            None => (line, None),
        };
        if let Some(c) = comment {
            if let Some(rest) = c.strip_prefix("poly=") {
                poly = rest.trim().parse::<u32>().ok().or(poly);
            }
        }
        let mut col = 0;
        for part in body.split_whitespace() {
            col = line[col..].find(part).map(|i| i + col).unwrap_or(col);
            toks.push(Tok { text: part, line: ln + 1, col: col + 1 });
            col += part.len();
        }
    }
    (toks, poly)
}

pub fn parse_code(text: &str) -> Result<ParityCheckMatrix, CodeError> {
    let (toks, poly) = tokenize(text);
    let mut it = toks.iter();
    let mut next = |what: &str| -> Result<&Tok, CodeError> {
        it.next().ok_or_else(|| CodeError::Parse {
            line: text.lines().count(),
            col: 1,
            msg: format!("unexpected end of file, expected {what}"),
        })
    };
    let int = |t: &Tok, what: &str| -> Result<usize, CodeError> {
        t.text.parse::<usize>().map_err(|_| CodeError::Parse {
            line: t.line,
            col: t.col,
            msg: format!("expected {what}, got {:?}", t.text),
        })
    };

    let n = int(next("N")?, "N")?;
    let m = int(next("M")?, "M")?;
    let g = int(next("g")?, "field order g")?;
    if n == 0 || m == 0 {
        return Err(CodeError::Parse { line: 1, col: 1, msg: "N and M must be positive".into() });
    }
    if !g.is_power_of_two() || !(4..=256).contains(&g) {
        return Err(CodeError::Parse {
            line: 1,
            col: 1,
            msg: format!("field order {g} is not a power of two in [4, 256]"),
        });
    }
    let q = g.trailing_zeros();
    let field = build_field(q, poly)?;

    let dv_max = int(next("dv_max")?, "dv_max")?;
    let dc_max = int(next("dc_max")?, "dc_max")?;
    let mut col_deg = Vec::with_capacity(n);
    for _ in 0..n {
        let t = next("a column degree")?;
        let d = int(t, "column degree")?;
        if d == 0 || d > dv_max {
            return Err(CodeError::Parse {
                line: t.line,
                col: t.col,
                msg: format!("column degree {d} outside [1, {dv_max}]"),
            });
        }
        col_deg.push(d);
    }
    let mut row_deg = Vec::with_capacity(m);
    for _ in 0..m {
        let t = next("a row degree")?;
        let d = int(t, "row degree")?;
        if d == 0 || d > dc_max {
            return Err(CodeError::Parse {
                line: t.line,
                col: t.col,
                msg: format!("row degree {d} outside [1, {dc_max}] (empty rows are not allowed)"),
            });
        }
        row_deg.push(d);
    }
    if col_deg.iter().sum::<usize>() != row_deg.iter().sum::<usize>() {
        return Err(CodeError::Parse {
            line: 1,
            col: 1,
            msg: "column degrees and row degrees disagree on the edge count".into(),
        });
    }

    let mut entries = Vec::with_capacity(col_deg.iter().sum());
    for (c, &d) in col_deg.iter().enumerate() {
        for _ in 0..d {
            let t = next("a row:coeff pair")?;
            let (rs, hs) = t.text.split_once(':').ok_or_else(|| CodeError::Parse {
                line: t.line,
                col: t.col,
                msg: format!("expected row:coeff, got {:?}", t.text),
            })?;
            let r: usize = rs.parse().map_err(|_| CodeError::Parse {
                line: t.line,
                col: t.col,
                msg: format!("bad row index {rs:?}"),
            })?;
            let h: u32 = hs.parse().map_err(|_| CodeError::Parse {
                line: t.line,
                col: t.col,
                msg: format!("bad coefficient {hs:?}"),
            })?;
            if r >= m {
                return Err(CodeError::Parse {
                    line: t.line,
                    col: t.col,
                    msg: format!("row index {r} outside [0, {m})"),
                });
            }
            if h == 0 || h as usize >= g {
                return Err(CodeError::FieldMismatch { line: t.line, value: h, g });
            }
            entries.push((r, c, GfSym(h as u8)));
        }
    }
    if let Some(t) = it.next() {
        return Err(CodeError::Parse {
            line: t.line,
            col: t.col,
            msg: format!("trailing data {:?}", t.text),
        });
    }

    let pcm = ParityCheckMatrix::from_entries(m, n, field, entries)?;
    for (r, &d) in row_deg.iter().enumerate() {
        let actual = pcm.entries().iter().filter(|&&(rr, _, _)| rr == r).count();
        if actual != d {
            return Err(CodeError::Parse {
                line: 1,
                col: 1,
                msg: format!("row {r} has {actual} entries but declares degree {d}"),
            });
        }
    }
    Ok(pcm)
}

pub fn format_code(pcm: &ParityCheckMatrix) -> String {
    let n = pcm.cols();
    let m = pcm.rows();
    let mut cols: Vec<Vec<(usize, GfSym)>> = vec![Vec::new(); n];
    let mut row_deg = vec![0usize; m];
    for &(r, c, h) in pcm.entries() {
        cols[c].push((r, h));
        row_deg[r] += 1;
    }
    for col in &mut cols {
        col.sort_unstable_by_key(|&(r, _)| r);
    }
    let dv_max = cols.iter().map(Vec::len).max().unwrap_or(0);
    let dc_max = row_deg.iter().copied().max().unwrap_or(0);

    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", n, m, pcm.field().order());
    let _ = writeln!(out, "# poly={}", pcm.field().poly());
    let _ = writeln!(out, "{} {}", dv_max, dc_max);
    let degs: Vec<String> = cols.iter().map(|c| c.len().to_string()).collect();
    let _ = writeln!(out, "{}", degs.join(" "));
    let degs: Vec<String> = row_deg.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "{}", degs.join(" "));
    for col in &cols {
        let pairs: Vec<String> = col.iter().map(|&(r, h)| format!("{}:{}", r, h.0)).collect();
        let _ = writeln!(out, "{}", pairs.join(" "));
    }
    out
}

// ---------------------------------------------------------------------------
// Systematic encoding
// ---------------------------------------------------------------------------

/// Systematic encoder produced by Gaussian elimination of H over GF(2^q).
///
/// Message symbols land verbatim on the free (non-pivot) columns; pivot
/// columns are solved from the reduced rows. A rank-deficient H shrinks to
/// K = N - rank instead of failing.
#[derive(Debug, Clone)]
pub struct SystematicEncoder {
    n: usize,
    rank: usize,
    field: FieldSpec,
    pivot_cols: Vec<usize>,
    free_cols: Vec<usize>,
    /// For each pivot row, the reduced coefficients on the free columns.
    rows: Vec<Vec<GfSym>>,
}

impl SystematicEncoder {
    pub fn new(pcm: &ParityCheckMatrix) -> SystematicEncoder {
        let f = pcm.field().clone();
        let m = pcm.rows();
        let n = pcm.cols();
        let mut a = vec![vec![GfSym::ZERO; n]; m];
        for &(r, c, h) in pcm.entries() {
            a[r][c] = h;
        }
        // reduced row echelon form
        let mut pivot_cols = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row == m {
                break;
            }
            let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(row, p);
            let inv = f.inv(a[row][col]).unwrap();
            for x in a[row].iter_mut() {
                *x = f.mul(*x, inv);
            }
            for r in 0..m {
                if r != row && !a[r][col].is_zero() {
                    let factor = a[r][col];
                    #[allow(clippy::needless_range_loop)]
                    for c in 0..n {
                        let sub = f.mul(factor, a[row][c]);
                        a[r][c] = f.add(a[r][c], sub);
                    }
                }
            }
            pivot_cols.push(col);
            row += 1;
        }
        let rank = pivot_cols.len();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; n];
            for &c in &pivot_cols {
                v[c] = true;
            }
            v
        };
        let free_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let rows: Vec<Vec<GfSym>> = (0..rank)
            .map(|r| free_cols.iter().map(|&c| a[r][c]).collect())
            .collect();
        SystematicEncoder { n, rank, field: f, pivot_cols, free_cols, rows }
    }

    /// Message length K = N - rank(H).
    pub fn k(&self) -> usize {
        self.n - self.rank
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rank_deficient(&self, pcm_rows: usize) -> bool {
        self.rank < pcm_rows
    }

    /// Code rate K/N.
    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    pub fn encode(&self, message: &[GfSym]) -> Result<Codeword, CodeError> {
        if message.len() != self.k() {
            return Err(CodeError::MessageLength { expected: self.k(), got: message.len() });
        }
        let f = &self.field;
        let mut cw = vec![GfSym::ZERO; self.n];
        for (i, &c) in self.free_cols.iter().enumerate() {
            cw[c] = message[i];
        }
        // pivot value solves row: h_pivot * c_pivot = sum over free cols
        // (negation is identity in characteristic 2)
        for (r, &p) in self.pivot_cols.iter().enumerate() {
            let mut acc = GfSym::ZERO;
            for (i, &c) in self.free_cols.iter().enumerate() {
                acc = f.add(acc, f.mul(self.rows[r][i], cw[c]));
            }
            cw[p] = acc;
        }
        Ok(cw)
    }

    /// Encodes a uniformly random message drawn from `rng`.
    pub fn encode_random(&self, rng: &mut impl Rng) -> Codeword {
        let g = self.field.order();
        let msg: Vec<GfSym> = (0..self.k()).map(|_| GfSym(rng.random_range(0..g) as u8)).collect();
        self.encode(&msg).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_code_shape() {
        let pcm = ParityCheckMatrix::toy_3x6_gf4();
        assert_eq!(pcm.rows(), 3);
        assert_eq!(pcm.cols(), 6);
        assert_eq!(pcm.num_entries(), 12);
        let g = build_tanner(&pcm);
        assert_eq!(g.edges(), 12);
        assert!((0..3).all(|m| g.dc(m) == 4));
        assert!((0..6).all(|n| g.dv(n) == 2));
        // first row connects VN {0, 2, 3, 5} with coefficients {a, 1, a, 1}
        let row: Vec<(u32, u8)> = g.cn(0).iter().map(|e| (e.node, e.coeff.0)).collect();
        assert_eq!(row, vec![(0, 2), (2, 1), (3, 2), (5, 1)]);
    }

    #[test]
    fn tanner_views_agree() {
        let pcm = gen_regular_code(16, 8, 4, 2, build_field(4, None).unwrap(), 7).unwrap();
        let g = build_tanner(&pcm);
        assert_eq!(g.edges(), 32);
        for m in 0..g.check_nodes() {
            for er in g.cn(m) {
                let e = er.edge as usize;
                assert_eq!(g.edge_cn(e), m);
                assert_eq!(g.edge_vn(e), er.node as usize);
                assert_eq!(g.edge_coeff(e), er.coeff);
                let back = g
                    .vn(er.node as usize)
                    .iter()
                    .find(|x| x.edge == er.edge)
                    .expect("edge missing from VN view");
                assert_eq!(back.node as usize, m);
                assert_eq!(back.coeff, er.coeff);
            }
        }
    }

    #[test]
    fn single_entry_graph() {
        let field = build_field(2, None).unwrap();
        let pcm = ParityCheckMatrix::from_entries(1, 1, field, vec![(0, 0, GfSym::ONE)]).unwrap();
        let g = build_tanner(&pcm);
        assert_eq!(g.edges(), 1);
        assert_eq!(g.cn(0), g.vn(0));
    }

    #[test]
    fn gen_regular_shapes() {
        let field = build_field(2, None).unwrap();
        let pcm = gen_regular_code(16, 8, 4, 2, field.clone(), 1).unwrap();
        assert_eq!(pcm.num_entries(), 32);
        let g = build_tanner(&pcm);
        assert!((0..8).all(|m| g.dc(m) == 4));
        assert!((0..16).all(|n| g.dv(n) == 2));

        let pcm = gen_regular_code(6, 3, 4, 2, field, 99).unwrap();
        assert_eq!(pcm.num_entries(), 12);
    }

    #[test]
    fn gen_infeasible() {
        let field = build_field(2, None).unwrap();
        assert!(matches!(
            gen_regular_code(16, 8, 4, 3, field, 1),
            Err(CodeError::InfeasibleDegrees { .. })
        ));
    }

    #[test]
    fn gen_deterministic() {
        let field = build_field(3, None).unwrap();
        let a = gen_regular_code(32, 16, 4, 2, field.clone(), 42).unwrap();
        let b = gen_regular_code(32, 16, 4, 2, field, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn alist_round_trip() {
        let field = build_field(4, None).unwrap();
        let pcm = gen_regular_code(16, 8, 4, 2, field, 3).unwrap();
        let text = format_code(&pcm);
        let back = parse_code(&text).unwrap();
        assert_eq!(pcm, back);
    }

    #[test]
    fn alist_round_trip_custom_poly() {
        // x^4 + x^3 + 1 is primitive as well
        let field = build_field(4, Some(0b11001)).unwrap();
        let pcm = gen_regular_code(8, 4, 4, 2, field, 5).unwrap();
        let back = parse_code(&format_code(&pcm)).unwrap();
        assert_eq!(back.field().poly(), 0b11001);
        assert_eq!(pcm, back);
    }

    #[test]
    fn parse_rejects_degenerate_inputs() {
        assert!(matches!(parse_code(""), Err(CodeError::Parse { .. })));
        // a declared empty row
        let text = "2 1 4\n1 2\n1 1\n0\n0:1\n1:1\n";
        assert!(matches!(parse_code(text), Err(CodeError::Parse { .. })));
        // coefficient outside the field
        let text = "1 1 4\n1 1\n1\n1\n0:5\n";
        assert!(matches!(parse_code(text), Err(CodeError::FieldMismatch { value: 5, .. })));
        // zero coefficient
        let text = "1 1 4\n1 1\n1\n1\n0:0\n";
        assert!(matches!(parse_code(text), Err(CodeError::FieldMismatch { value: 0, .. })));
    }

    #[test]
    fn syndrome_zero_for_zero_codeword() {
        let pcm = ParityCheckMatrix::toy_3x6_gf4();
        let (s, ok) = syndrome(&pcm, &[GfSym::ZERO; 6]).unwrap();
        assert!(ok);
        assert!(s.iter().all(|x| x.is_zero()));
        assert!(matches!(
            syndrome(&pcm, &[GfSym::ZERO; 5]),
            Err(CodeError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn encoder_toy_exhaustive() {
        let pcm = ParityCheckMatrix::toy_3x6_gf4();
        let enc = SystematicEncoder::new(&pcm);
        assert_eq!(enc.rank(), 3);
        assert_eq!(enc.k(), 3);
        let mut seen = std::collections::HashSet::new();
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    let cw = enc.encode(&[GfSym(a), GfSym(b), GfSym(c)]).unwrap();
                    let (_, ok) = syndrome(&pcm, &cw).unwrap();
                    assert!(ok);
                    assert!(seen.insert(cw));
                }
            }
        }
        assert_eq!(seen.len(), 64);
    }

    #[test]
    fn encoder_zero_message() {
        let pcm = ParityCheckMatrix::toy_3x6_gf4();
        let enc = SystematicEncoder::new(&pcm);
        let cw = enc.encode(&[GfSym::ZERO; 3]).unwrap();
        assert!(cw.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn encoder_on_generated_code() {
        use rand::SeedableRng;
        let field = build_field(4, None).unwrap();
        let pcm = gen_regular_code(64, 32, 4, 2, field, 11).unwrap();
        let enc = SystematicEncoder::new(&pcm);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let cw = enc.encode_random(&mut rng);
            let (_, ok) = syndrome(&pcm, &cw).unwrap();
            assert!(ok);
        }
    }

    #[test]
    fn single_flip_breaks_syndrome() {
        let pcm = ParityCheckMatrix::toy_3x6_gf4();
        let enc = SystematicEncoder::new(&pcm);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let mut cw = enc.encode_random(&mut rng);
            let pos = rng.random_range(0..cw.len());
            let old = cw[pos];
            loop {
                let cand = GfSym(rng.random_range(0..4) as u8);
                if cand != old {
                    cw[pos] = cand;
                    break;
                }
            }
            let (_, ok) = syndrome(&pcm, &cw).unwrap();
            assert!(!ok);
        }
    }
}
