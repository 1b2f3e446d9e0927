//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) this re-exports the rayon prelude.
//! Without it, sequential stand-ins with the same method names are provided so
//! call sites compile unchanged. Callers only use order-preserving `collect`,
//! so results are identical either way.

#[cfg(feature = "parallel")]
pub use rayon::prelude::*;

#[cfg(not(feature = "parallel"))]
mod sequential_fallbacks {
    pub trait IntoParallelIterator {
        type Iter: Iterator<Item = Self::Item>;
        type Item;
        fn into_par_iter(self) -> Self::Iter;
    }

    impl<I: IntoIterator> IntoParallelIterator for I {
        type Iter = I::IntoIter;
        type Item = I::Item;
        fn into_par_iter(self) -> Self::Iter {
            self.into_iter()
        }
    }

    pub trait IntoParallelRefIterator<'a> {
        type Iter: Iterator<Item = Self::Item>;
        type Item: 'a;
        fn par_iter(&'a self) -> Self::Iter;
    }

    impl<'a, T: 'a> IntoParallelRefIterator<'a> for [T] {
        type Iter = std::slice::Iter<'a, T>;
        type Item = &'a T;
        fn par_iter(&'a self) -> Self::Iter {
            self.iter()
        }
    }

    impl<'a, T: 'a> IntoParallelRefIterator<'a> for Vec<T> {
        type Iter = std::slice::Iter<'a, T>;
        type Item = &'a T;
        fn par_iter(&'a self) -> Self::Iter {
            self.iter()
        }
    }

    /// Marker so `use par::*` brings the same names into scope in both builds.
    pub trait ParallelIterator: Iterator {}
    impl<I: Iterator> ParallelIterator for I {}
}

#[cfg(not(feature = "parallel"))]
pub use sequential_fallbacks::*;

/// Caps the worker count. `0` means automatic. Only the first call has effect.
pub fn configure_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
