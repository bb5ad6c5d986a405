//! Data-parallel helpers with a sequential fallback.
//!
//! With the default `parallel` feature the mapping helpers fan out over
//! rayon's global pool; without it they run sequentially. Both paths
//! produce output in input order, so results are identical either way.
//! The `*_seq` variants are always compiled and exist so benches and
//! tests can compare the two paths inside one binary.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map_slice_seq<T, U>(items: &[T], f: impl Fn(&T) -> U) -> Vec<U> {
    items.iter().map(f).collect()
}

pub fn map_indices_seq<U>(n: usize, f: impl Fn(usize) -> U) -> Vec<U> {
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_slice<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    map_slice_seq(items, f)
}

#[cfg(feature = "parallel")]
pub fn map_indices<U: Send>(n: usize, f: impl Fn(usize) -> U + Sync + Send) -> Vec<U> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indices<U: Send>(n: usize, f: impl Fn(usize) -> U + Sync + Send) -> Vec<U> {
    map_indices_seq(n, f)
}
