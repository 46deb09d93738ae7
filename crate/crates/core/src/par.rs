//! Chunked map-reduce with fixed chunk boundaries and in-order merging.

use alloc::vec::Vec;
use core::ops::Range;

/// Splits `0..total` into chunks of `chunk` items, maps each chunk and merges
/// the partial results left to right. The split does not depend on the
/// thread pool, so the floating-point result is the same with or without
/// `std`.
pub(crate) fn map_reduce<T, M, R>(total: u64, chunk: u64, map: M, mut merge: R) -> Option<T>
where
    T: Send,
    M: Fn(Range<u64>) -> T + Sync + Send,
    R: FnMut(T, T) -> T,
{
    let chunk = chunk.max(1);
    let count = total.div_ceil(chunk);
    let ranges = move |k: u64| (k * chunk)..((k + 1) * chunk).min(total);

    #[cfg(feature = "std")]
    let parts: Vec<T> = {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(|k| map(ranges(k))).collect()
    };
    #[cfg(not(feature = "std"))]
    let parts: Vec<T> = (0..count).map(|k| map(ranges(k))).collect();

    let mut iter = parts.into_iter();
    let first = iter.next()?;
    Some(iter.fold(first, &mut merge))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_in_order() {
        let s = map_reduce(1001, 64, |r| r.map(|k| k as f64 * 0.1).sum::<f64>(), |a, b| a + b).unwrap();
        let seq: f64 = (0..1001)
            .collect::<Vec<u64>>()
            .chunks(64)
            .map(|c| c.iter().map(|&k| k as f64 * 0.1).sum::<f64>())
            .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a + x)))
            .unwrap();
        assert_eq!(s.to_bits(), seq.to_bits());
        assert!(map_reduce(0, 8, |_| 0.0, |a: f64, b| a + b).is_none());
    }
}
