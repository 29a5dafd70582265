//! Deterministic parallel sweep helper. Thread count comes from the
//! `VDELTA_THREADS` environment variable (default: available parallelism);
//! results always come back in input order regardless of scheduling.

pub fn thread_count() -> usize {
    std::env::var("VDELTA_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

pub fn parallel_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let threads = thread_count().min(items.len().max(1));
    if threads <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let mut out: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut rest_in = items.as_slice();
        let mut rest_out = out.as_mut_slice();
        while !rest_in.is_empty() {
            let take = chunk.min(rest_in.len());
            let (ins, tail_in) = rest_in.split_at(take);
            let (outs, tail_out) = rest_out.split_at_mut(take);
            rest_in = tail_in;
            rest_out = tail_out;
            let f = &f;
            scope.spawn(move || {
                for (slot, item) in outs.iter_mut().zip(ins) {
                    *slot = Some(f(item));
                }
            });
        }
    });
    out.into_iter().map(|r| r.expect("chunk completed")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let items: Vec<u64> = (0..1000).collect();
        let doubled = parallel_map(items, |&x| 2 * x);
        for (i, v) in doubled.iter().enumerate() {
            assert_eq!(*v, 2 * i as u64);
        }
    }

    #[test]
    fn empty_input() {
        let out: Vec<u64> = parallel_map(Vec::<u64>::new(), |&x| x);
        assert!(out.is_empty());
    }
}
