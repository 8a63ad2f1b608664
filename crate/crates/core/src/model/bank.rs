//! FIFO memory bank and box prompt.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::error::Error;

/// Bounded first-in-first-out queue of memory entries. `E` is a plain
/// tensor when tracking detached, or a tape handle when gradients must
/// flow through past frames.
#[derive(Clone, Debug)]
pub struct MemoryBank<E> {
    entries: VecDeque<(E, usize)>,
    capacity: usize,
}

impl<E> MemoryBank<E> {
    pub fn new(capacity: usize) -> Self {
        MemoryBank {
            entries: VecDeque::new(),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Append an entry; evicts the oldest when full. Capacity zero
    /// keeps the bank permanently empty.
    pub fn push(&mut self, entry: E, frame_index: usize) {
        if self.capacity == 0 {
            return;
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back((entry, frame_index));
    }

    /// Entries oldest first.
    pub fn entries(&self) -> impl Iterator<Item = &(E, usize)> {
        self.entries.iter()
    }

    pub fn frame_indices(&self) -> Vec<usize> {
        self.entries.iter().map(|(_, i)| *i).collect()
    }
}

/// Pixel-coordinate box, min inclusive, max exclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxPrompt {
    pub x_min: usize,
    pub y_min: usize,
    pub x_max: usize,
    pub y_max: usize,
}

impl BoxPrompt {
    pub fn new(
        x_min: usize,
        y_min: usize,
        x_max: usize,
        y_max: usize,
        width: usize,
        height: usize,
    ) -> Result<Self, Error> {
        if x_min >= x_max || y_min >= y_max || x_max > width || y_max > height {
            return Err(Error::Prompt(alloc::format!(
                "degenerate or out-of-range box [{x_min},{x_max})x[{y_min},{y_max}) in {width}x{height}"
            )));
        }
        Ok(BoxPrompt {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn fifo_evicts_oldest() {
        let mut bank: MemoryBank<u32> = MemoryBank::new(2);
        bank.push(10, 0);
        bank.push(20, 1);
        bank.push(30, 2);
        let kept: Vec<u32> = bank.entries().map(|(e, _)| *e).collect();
        assert_eq!(kept, alloc::vec![20, 30]);
        assert_eq!(bank.frame_indices(), alloc::vec![1, 2]);
    }

    #[test]
    fn push_onto_empty() {
        let mut bank: MemoryBank<u32> = MemoryBank::new(4);
        assert!(bank.is_empty());
        bank.push(1, 0);
        assert_eq!(bank.len(), 1);
    }

    #[test]
    fn hundred_pushes_keep_last_four() {
        let mut bank: MemoryBank<usize> = MemoryBank::new(4);
        for i in 0..100 {
            bank.push(i * i, i);
        }
        assert_eq!(bank.len(), 4);
        assert_eq!(bank.frame_indices(), alloc::vec![96, 97, 98, 99]);
    }

    #[test]
    fn random_push_sequences_never_exceed_capacity_and_keep_order() {
        let mut rng = Rng::new(99);
        for _ in 0..1000 {
            let cap = rng.below(6);
            let pushes = rng.below(30);
            let mut bank: MemoryBank<usize> = MemoryBank::new(cap);
            for i in 0..pushes {
                bank.push(i, i);
                assert!(bank.len() <= cap);
            }
            assert_eq!(bank.len(), pushes.min(cap));
            let idx = bank.frame_indices();
            assert!(idx.windows(2).all(|w| w[0] + 1 == w[1]), "{idx:?}");
            if cap > 0 && pushes > 0 {
                assert_eq!(*idx.last().unwrap(), pushes - 1);
            }
        }
    }

    #[test]
    fn box_prompt_validation() {
        assert!(BoxPrompt::new(2, 3, 10, 12, 64, 64).is_ok());
        assert!(BoxPrompt::new(5, 3, 5, 12, 64, 64).is_err()); // zero width
        assert!(BoxPrompt::new(2, 12, 10, 12, 64, 64).is_err()); // zero height
        assert!(BoxPrompt::new(2, 3, 65, 12, 64, 64).is_err()); // out of range
    }
}
