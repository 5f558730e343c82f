//! Row-parallel execution of stencil kernels and batch jobs.
//!
//! With the `parallel` feature (on by default) rows and independent jobs are
//! scheduled on the rayon pool. Without it, or with [`Exec::Sequential`], the
//! same closures run in a plain loop, so both paths produce bit-identical
//! results: every row and every job is computed by exactly the same code.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this mode actually fans out to worker threads in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Calls `f(row_index, row)` for every `row_len`-sized chunk of `data`.
    pub fn for_each_row<F>(self, data: &mut [f64], row_len: usize, f: F)
    where
        F: Fn(usize, &mut [f64]) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            data.par_chunks_mut(row_len)
                .enumerate()
                .for_each(|(i, row)| f(i, row));
            return;
        }
        for (i, row) in data.chunks_mut(row_len).enumerate() {
            f(i, row);
        }
    }

    /// Same as [`Exec::for_each_row`] over two equally shaped buffers.
    pub fn for_each_row_pair<F>(self, a: &mut [f64], b: &mut [f64], row_len: usize, f: F)
    where
        F: Fn(usize, &mut [f64], &mut [f64]) + Sync + Send,
    {
        debug_assert_eq!(a.len(), b.len());
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            a.par_chunks_mut(row_len)
                .zip(b.par_chunks_mut(row_len))
                .enumerate()
                .for_each(|(i, (ra, rb))| f(i, ra, rb));
            return;
        }
        for (i, (ra, rb)) in a.chunks_mut(row_len).zip(b.chunks_mut(row_len)).enumerate() {
            f(i, ra, rb);
        }
    }

    /// Maps independent jobs, preserving input order in the output.
    pub fn map<T, R, F>(self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return items.into_par_iter().map(f).collect();
        }
        items.into_iter().map(f).collect()
    }

    /// Runs two closures, concurrently when parallel.
    pub fn join<A, B, RA, RB>(self, a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return rayon::join(a, b);
        }
        (a(), b())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_visit_every_row_once() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            let mut data = vec![0.0; 7 * 5];
            exec.for_each_row(&mut data, 5, |i, row| {
                for (j, v) in row.iter_mut().enumerate() {
                    *v += (i * 10 + j) as f64;
                }
            });
            for (k, v) in data.iter().enumerate() {
                assert_eq!(*v, ((k / 5) * 10 + k % 5) as f64);
            }
        }
    }

    #[test]
    fn map_preserves_order() {
        let out = Exec::Parallel.map((0..100).collect(), |x: i32| x * x);
        assert_eq!(out, (0..100).map(|x| x * x).collect::<Vec<_>>());
    }
}
