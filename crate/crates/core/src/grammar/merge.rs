use std::cmp::Reverse;
use std::collections::BinaryHeap;

const NONE: usize = usize::MAX;

/// Greedy pairwise merge of a sequence.
///
/// Repeatedly takes the element of smallest height (leftmost on ties) and
/// joins it with its lower neighbour (the left one on ties) through `join`,
/// which receives the operands in text order and returns the merged
/// element with its height. The merged element keeps the left operand's
/// position. Heap entries made stale by a merge are skipped on pop.
pub(crate) fn greedy_merge<T: Copy>(items: Vec<(u8, T)>, mut join: impl FnMut(T, T) -> (u8, T)) -> T {
    let n = items.len();
    assert!(n > 0, "cannot merge an empty sequence");
    let mut height: Vec<u8> = items.iter().map(|&(h, _)| h).collect();
    let mut value: Vec<T> = items.iter().map(|&(_, v)| v).collect();
    let mut prev: Vec<usize> = (0..n).map(|k| if k == 0 { NONE } else { k - 1 }).collect();
    let mut next: Vec<usize> = (0..n).map(|k| if k + 1 == n { NONE } else { k + 1 }).collect();
    let mut stamp = vec![0u32; n];
    let mut alive = vec![true; n];
    let mut heap: BinaryHeap<Reverse<(u8, usize, u32)>> =
        (0..n).map(|k| Reverse((height[k], k, 0))).collect();

    let mut remaining = n;
    while remaining > 1 {
        let Reverse((h, k, s)) = heap.pop().expect("live elements stay queued");
        if !alive[k] || stamp[k] != s || height[k] != h {
            continue;
        }
        let (l, r) = (prev[k], next[k]);
        let (left, right) = match (l, r) {
            (NONE, NONE) => unreachable!("more than one element remains"),
            (NONE, r) => (k, r),
            (l, NONE) => (l, k),
            (l, r) if height[r] < height[l] => (k, r),
            (l, _) => (l, k),
        };
        let (h2, v2) = join(value[left], value[right]);
        value[left] = v2;
        height[left] = h2;
        stamp[left] += 1;
        alive[right] = false;
        let after = next[right];
        next[left] = after;
        if after != NONE {
            prev[after] = left;
        }
        heap.push(Reverse((h2, left, stamp[left])));
        remaining -= 1;
    }
    let first = (0..n).find(|&k| alive[k]).unwrap();
    value[first]
}
