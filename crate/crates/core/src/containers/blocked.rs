use std::ops::{Index, IndexMut};

/// Smallest block ever allocated.
pub const MIN_BLOCK: usize = 64;
/// Growth divisor: a new block holds `ceil(capacity / GROWTH_DIVISOR)` slots.
pub const GROWTH_DIVISOR: usize = 31;

/// Append-only array stored as a list of fixed-capacity blocks.
///
/// Growing never moves existing elements. Unused slots are confined to the
/// last block, which holds at most `max(MIN_BLOCK, capacity / 31)` slots.
#[derive(Debug, Clone)]
pub struct BlockedArray<T> {
    blocks: Vec<Vec<T>>,
    starts: Vec<usize>,
    len: usize,
    capacity: usize,
}

impl<T> Default for BlockedArray<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> BlockedArray<T> {
    pub fn new() -> Self {
        BlockedArray { blocks: Vec::new(), starts: Vec::new(), len: 0, capacity: 0 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Allocated but unused slots.
    pub fn slack(&self) -> usize {
        self.capacity - self.len
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn heap_bytes(&self) -> usize {
        self.capacity * std::mem::size_of::<T>()
            + self.blocks.capacity() * std::mem::size_of::<Vec<T>>()
            + self.starts.capacity() * std::mem::size_of::<usize>()
    }

    fn next_block_size(&self) -> usize {
        MIN_BLOCK.max(self.capacity.div_ceil(GROWTH_DIVISOR))
    }

    pub fn push(&mut self, x: T) {
        if self.len == self.capacity {
            let size = self.next_block_size();
            let block = Vec::with_capacity(size);
            self.starts.push(self.capacity);
            self.capacity += block.capacity();
            self.blocks.push(block);
        }
        self.blocks.last_mut().expect("block allocated above").push(x);
        self.len += 1;
    }

    #[inline]
    fn locate(&self, i: usize) -> (usize, usize) {
        let b = self.starts.partition_point(|&s| s <= i) - 1;
        (b, i - self.starts[b])
    }

    pub fn get(&self, i: usize) -> Option<&T> {
        if i >= self.len {
            return None;
        }
        let (b, o) = self.locate(i);
        Some(&self.blocks[b][o])
    }

    pub fn get_mut(&mut self, i: usize) -> Option<&mut T> {
        if i >= self.len {
            return None;
        }
        let (b, o) = self.locate(i);
        Some(&mut self.blocks[b][o])
    }

    pub fn last(&self) -> Option<&T> {
        self.blocks.last().and_then(|b| b.last())
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &T> + '_ {
        self.blocks.iter().flat_map(|b| b.iter())
    }

    /// Drops elements from `new_len` on and releases blocks left empty.
    pub fn truncate(&mut self, new_len: usize) {
        if new_len >= self.len {
            return;
        }
        while let Some(&start) = self.starts.last() {
            if start < new_len {
                break;
            }
            self.starts.pop();
            let block = self.blocks.pop().expect("starts and blocks stay aligned");
            self.capacity -= block.capacity();
        }
        if let Some(last) = self.blocks.last_mut() {
            let start = *self.starts.last().unwrap();
            last.truncate(new_len - start);
        }
        self.len = new_len;
    }

    /// First index for which `pred` is false, assuming `pred` is true on a prefix.
    pub fn partition_point(&self, mut pred: impl FnMut(&T) -> bool) -> usize {
        let (mut lo, mut hi) = (0, self.len);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if pred(&self[mid]) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

impl<T: Copy> BlockedArray<T> {
    /// Keeps only elements for which `keep` holds, preserving order.
    /// Returns the number of elements kept.
    pub fn retain(&mut self, mut keep: impl FnMut(&T) -> bool) -> usize {
        let mut write = 0;
        for read in 0..self.len {
            let x = self[read];
            if keep(&x) {
                if write != read {
                    self[write] = x;
                }
                write += 1;
            }
        }
        self.truncate(write);
        write
    }
}

impl<T> Index<usize> for BlockedArray<T> {
    type Output = T;

    #[inline]
    fn index(&self, i: usize) -> &T {
        assert!(i < self.len, "index {i} out of bounds (len {})", self.len);
        let (b, o) = self.locate(i);
        &self.blocks[b][o]
    }
}

impl<T> IndexMut<usize> for BlockedArray<T> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut T {
        assert!(i < self.len, "index {i} out of bounds (len {})", self.len);
        let (b, o) = self.locate(i);
        &mut self.blocks[b][o]
    }
}

impl<T> FromIterator<T> for BlockedArray<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut a = BlockedArray::new();
        for x in iter {
            a.push(x);
        }
        a
    }
}
