//! Data-parallel helpers. With the `parallel` feature the maps run on the
//! rayon pool; without it they run sequentially. Results are returned in
//! input order either way.

/// Execution strategy for the batch loops in the engine and verifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    #[default]
    Auto,
    Sequential,
    Parallel,
}

impl Exec {
    fn parallel(self) -> bool {
        match self {
            Exec::Sequential => false,
            Exec::Auto | Exec::Parallel => cfg!(feature = "parallel"),
        }
    }
}

pub fn map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if exec.parallel() {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}
