//! Stage execution for the decoders.
//!
//! A decoding iteration is a fixed sequence of stages, each writing disjoint
//! rows of one output buffer. `Serial` runs a stage as a plain call. `Staged`
//! splits the output rows into contiguous chunks, runs them on scoped worker
//! threads and counts the join as one synchronization barrier, which mirrors
//! a barrier-per-block multithreaded schedule without changing any value.

pub(crate) enum Exec<'b> {
    Serial,
    Staged { threads: usize, barriers: &'b mut u64 },
}

impl Exec<'_> {
    /// Runs one stage over `rows` rows of `width` elements each.
    /// `kernel(first_row, chunk)` must fill its chunk completely.
    pub(crate) fn stage<T, F>(&mut self, out: &mut [T], rows: usize, width: usize, kernel: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync,
    {
        debug_assert_eq!(out.len(), rows * width);
        match self {
            Exec::Serial => kernel(0, out),
            Exec::Staged { threads, barriers } => {
                let per = rows.div_ceil((*threads).max(1)).max(1);
                std::thread::scope(|s| {
                    for (i, chunk) in out.chunks_mut(per * width).enumerate() {
                        let k = &kernel;
                        s.spawn(move || k(i * per, chunk));
                    }
                });
                **barriers += 1;
            }
        }
    }

    /// Like [`Exec::stage`] but with two output buffers partitioned by the
    /// same row ranges, for blocks that fill a pair of rows per step.
    pub(crate) fn stage_pair<T, F>(
        &mut self,
        out_a: &mut [T],
        out_b: &mut [T],
        rows: usize,
        width: usize,
        kernel: F,
    ) where
        T: Send,
        F: Fn(usize, &mut [T], &mut [T]) + Sync,
    {
        debug_assert_eq!(out_a.len(), rows * width);
        debug_assert_eq!(out_b.len(), rows * width);
        match self {
            Exec::Serial => kernel(0, out_a, out_b),
            Exec::Staged { threads, barriers } => {
                let per = rows.div_ceil((*threads).max(1)).max(1);
                std::thread::scope(|s| {
                    for (i, (ca, cb)) in out_a
                        .chunks_mut(per * width)
                        .zip(out_b.chunks_mut(per * width))
                        .enumerate()
                    {
                        let k = &kernel;
                        s.spawn(move || k(i * per, ca, cb));
                    }
                });
                **barriers += 1;
            }
        }
    }

    /// Stage over uneven parts (used when rows group into variable-degree
    /// units). `parts` holds (first_unit, element_count) per part, covering
    /// `out` exactly in order.
    pub(crate) fn stage_parts<T, F>(&mut self, out: &mut [T], parts: &[(usize, usize)], kernel: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync,
    {
        debug_assert_eq!(parts.iter().map(|p| p.1).sum::<usize>(), out.len());
        match self {
            Exec::Serial => kernel(0, out),
            Exec::Staged { threads: _, barriers } => {
                std::thread::scope(|s| {
                    let mut rest = out;
                    for &(first_unit, len) in parts {
                        let (chunk, tail) = rest.split_at_mut(len);
                        rest = tail;
                        let k = &kernel;
                        s.spawn(move || k(first_unit, chunk));
                    }
                });
                **barriers += 1;
            }
        }
    }

}

/// Splits `units` weighted items into at most `parts` contiguous groups with
/// roughly balanced weight. Returns (first_unit, element_count) per group.
pub(crate) fn balanced_parts(weights: &[usize], parts: usize) -> Vec<(usize, usize)> {
    let total: usize = weights.iter().sum();
    let parts = parts.max(1);
    let target = total.div_ceil(parts).max(1);
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    let mut acc = 0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if acc >= target || i + 1 == weights.len() {
            out.push((start, acc));
            start = i + 1;
            acc = 0;
        }
    }
    if acc > 0 {
        out.push((start, acc));
    }
    out
}
