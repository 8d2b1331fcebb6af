//! Execution mode for the data-parallel kernels.
//!
//! With the `parallel` feature the kernels fan out over rayon; without it
//! every mode runs sequentially. Results never depend on the mode.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Maps `f` over `0..n` and returns the results in index order.
pub fn map_indexed<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Folds chunks of `items` into accumulators and merges them.
pub fn fold_chunks<I, A, F, M, Z>(exec: Exec, items: &[I], chunk: usize, zero: Z, fold: F, merge: M) -> A
where
    I: Sync,
    A: Send,
    Z: Fn() -> A + Sync + Send,
    F: Fn(A, &[I]) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && items.len() > chunk {
        use rayon::prelude::*;
        return items.par_chunks(chunk).map(|c| fold(zero(), c)).reduce(&zero, &merge);
    }
    let _ = (exec, &merge, chunk);
    fold(zero(), items)
}
