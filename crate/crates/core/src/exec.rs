//! Execution mode for the data-parallel sweeps.

/// How a sweep distributes its work. `Parallel` runs on the current rayon pool when the
/// `parallel` feature is enabled and degrades to `Sequential` otherwise.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

/// Maps `f` over `items`, keeping input order in the output regardless of mode.
pub(crate) fn ordered_map<T, R, F>(items: &[T], exec: Exec, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let xs: Vec<u64> = (0..10_000).collect();
        let seq = ordered_map(&xs, Exec::Sequential, |x| x * x % 97);
        let par = ordered_map(&xs, Exec::Parallel, |x| x * x % 97);
        assert_eq!(seq, par);
    }
}
