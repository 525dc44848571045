//! Work-efficient scan primitives: all-prefix-sums and segmented broadcast.
//!
//! Both are instances of one inclusive scan over an associative operator.
//! The parallel path splits the input into chunks, scans chunks
//! independently, combines chunk summaries sequentially, and reseeds each
//! chunk with the summary prefix. Integer addition and "last carrier wins"
//! are exact and associative, so results are identical to the sequential
//! fold regardless of chunking.

use rayon::prelude::*;

use crate::prefix::Weight;

const PARALLEL_CUTOFF: usize = 1 << 14;

/// Generic inclusive scan: `out[i] = xs[0] ∘ xs[1] ∘ … ∘ xs[i]`.
fn inclusive_scan<T, F>(xs: &[T], op: F) -> Vec<T>
where
    T: Copy + Send + Sync,
    F: Fn(T, T) -> T + Send + Sync,
{
    if xs.len() < PARALLEL_CUTOFF {
        let mut out = Vec::with_capacity(xs.len());
        let mut acc: Option<T> = None;
        for &x in xs {
            let v = match acc {
                None => x,
                Some(a) => op(a, x),
            };
            out.push(v);
            acc = Some(v);
        }
        return out;
    }

    let chunk = PARALLEL_CUTOFF / 4;
    let mut out: Vec<Vec<T>> = xs
        .par_chunks(chunk)
        .map(|c| {
            let mut v = Vec::with_capacity(c.len());
            let mut acc: Option<T> = None;
            for &x in c {
                let s = match acc {
                    None => x,
                    Some(a) => op(a, x),
                };
                v.push(s);
                acc = Some(s);
            }
            v
        })
        .collect();
    // Sequential pass over the (few) chunk summaries.
    let mut carry: Option<T> = None;
    let carries: Vec<Option<T>> = out
        .iter()
        .map(|c| {
            let here = carry;
            let last = *c.last().expect("nonempty chunk");
            carry = Some(match here {
                None => last,
                Some(a) => op(a, last),
            });
            here
        })
        .collect();
    out.par_iter_mut().zip(carries).for_each(|(c, carry)| {
        if let Some(a) = carry {
            for v in c.iter_mut() {
                *v = op(a, *v);
            }
        }
    });
    out.concat()
}

/// Inclusive all-prefix-sums: `out[i] = xs[0] + … + xs[i]`.
pub fn all_prefix_sums(xs: &[Weight]) -> Vec<Weight> {
    inclusive_scan(xs, |a, b| a + b)
}

/// One element of a time-sorted carrier/receiver mix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanItem<T> {
    /// Holds a value that is broadcast to every following receiver.
    Carrier(T),
    Receiver,
}

/// Deliver to each receiver the value of the nearest carrier at or before
/// it; receivers that precede every carrier get `default`. Returns one
/// value per receiver, in input order.
pub fn segmented_broadcast<T>(items: &[ScanItem<T>], default: T) -> Vec<T>
where
    T: Copy + Send + Sync,
{
    let marks: Vec<Option<T>> = items
        .iter()
        .map(|it| match it {
            ScanItem::Carrier(v) => Some(*v),
            ScanItem::Receiver => None,
        })
        .collect();
    let scanned = inclusive_scan(&marks, |a, b| b.or(a));
    items
        .iter()
        .zip(scanned)
        .filter_map(|(it, v)| match it {
            ScanItem::Receiver => Some(v.unwrap_or(default)),
            ScanItem::Carrier(_) => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn prefix_sums_basics() {
        assert_eq!(all_prefix_sums(&[]), Vec::<Weight>::new());
        assert_eq!(all_prefix_sums(&[1, 2, 3]), vec![1, 3, 6]);
    }

    #[test]
    fn prefix_sums_match_sequential_fold() {
        let mut rng = crate::rng::stream_rng(11, 0);
        for len in [1usize, 5, 1000, 70_000] {
            let xs: Vec<Weight> = (0..len).map(|_| rng.gen_range(-50..=50)).collect();
            let got = all_prefix_sums(&xs);
            let mut acc = 0;
            let want: Vec<Weight> = xs
                .iter()
                .map(|&x| {
                    acc += x;
                    acc
                })
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn broadcast_basics() {
        use ScanItem::*;
        // carriers at t=2 (value 9); receivers at t=1 and t=3
        let items = [Receiver, Carrier(9), Receiver];
        assert_eq!(segmented_broadcast(&items, 0), vec![0, 9]);
        let all_recv = [Receiver, Receiver, Receiver];
        assert_eq!(segmented_broadcast::<i64>(&all_recv, 7), vec![7, 7, 7]);
    }

    #[test]
    fn broadcast_matches_linear_scan() {
        let mut rng = crate::rng::stream_rng(12, 0);
        for len in [0usize, 1, 17, 4096, 40_000] {
            let items: Vec<ScanItem<i64>> = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        ScanItem::Carrier(rng.gen_range(-100..100))
                    } else {
                        ScanItem::Receiver
                    }
                })
                .collect();
            let got = segmented_broadcast(&items, -1);
            let mut want = Vec::new();
            let mut last = -1;
            for it in &items {
                match it {
                    ScanItem::Carrier(v) => last = *v,
                    ScanItem::Receiver => want.push(last),
                }
            }
            assert_eq!(got, want);
        }
    }
}
