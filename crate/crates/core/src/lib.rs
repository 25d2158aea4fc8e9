//! Exact arithmetic in the layers `Z[X_n]`, `X_n = 2cos(2π/2^(n+2))`, of the
//! cyclotomic Z_2-extension of Q, and periodic continued fraction
//! expansions of `X_n` over `Z[X_{n-1}]` built from relative units.

pub mod bounds;
pub mod enumerate;
pub mod error;
pub mod expand;
pub mod galois;
pub mod interval;
pub mod pcf;
pub mod ring;
pub mod suite;
pub mod units;

pub use error::{Error, Result};
pub use ring::{Level, RingElem};

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}
