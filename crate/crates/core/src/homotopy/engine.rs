use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::edt::SquaredDistanceMap;
use crate::grid::{is_simple_pattern, BinaryImage, ConnectivityPair, OFFSETS_8};

/// Which way a stability loop flips pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    /// Thinning: foreground pixels are deleted.
    Remove,
    /// Thickening: background pixels are added.
    Add,
}

impl Polarity {
    /// Value of the pixels this loop may flip.
    #[inline]
    pub fn object_value(self) -> bool {
        matches!(self, Polarity::Remove)
    }
}

/// Everything a stability loop needs besides the image it mutates.
///
/// `frozen` pixels never flip: the constraint `W` for thinning, the outside
/// of `V` for thickening. Thickening runs the very same loop as thinning, on
/// the background: the simpleness table is indexed by the pattern of the
/// original image, which is exactly the table of the complement under the
/// dual pair, and out-of-frame cells keep their meaning.
pub(crate) struct StabilityProblem<'a> {
    pub polarity: Polarity,
    pub frozen: &'a [bool],
    pub priority: &'a SquaredDistanceMap,
    pub conn: ConnectivityPair,
    pub max_iter: Option<usize>,
}

impl StabilityProblem<'_> {
    #[inline]
    pub fn eligible(&self, value: bool, idx: usize) -> bool {
        value == self.polarity.object_value() && !self.frozen[idx]
    }
}

#[inline]
pub(crate) fn flippable(img: &BinaryImage, problem: &StabilityProblem<'_>, idx: usize) -> bool {
    let w = img.width();
    if !problem.eligible(img.cells()[idx], idx) {
        return false;
    }
    let (r, c) = ((idx / w) as isize, (idx % w) as isize);
    is_simple_pattern(img.pattern_unchecked(r, c), problem.conn)
}

/// Sequential stability loop: rounds of candidates taken in increasing
/// priority (ties in raster order). Pixels that flip have their in-frame
/// neighbors queued for the next round. Stops when a round flips nothing or
/// after `max_iter` rounds.
pub(crate) fn run_sequential(img: &mut BinaryImage, problem: &StabilityProblem<'_>) {
    let (w, h) = (img.width(), img.height());
    let mut queued = vec![false; w * h];
    let mut heap = BinaryHeap::new();
    for (idx, q) in queued.iter_mut().enumerate() {
        if flippable(img, problem, idx) {
            *q = true;
            heap.push(Reverse((problem.priority.values()[idx], idx)));
        }
    }

    let target = !problem.polarity.object_value();
    let mut rounds = 0usize;
    let mut flipped = Vec::new();
    while !heap.is_empty() && problem.max_iter.is_none_or(|m| rounds < m) {
        while let Some(Reverse((_, idx))) = heap.pop() {
            queued[idx] = false;
            if flippable(img, problem, idx) {
                img.set(idx / w, idx % w, target);
                flipped.push(idx);
            }
        }
        for idx in flipped.drain(..) {
            let (r, c) = ((idx / w) as isize, (idx % w) as isize);
            for &(dr, dc) in &OFFSETS_8 {
                let (nr, nc) = (r + dr, c + dc);
                if nr < 0 || nc < 0 || nr as usize >= h || nc as usize >= w {
                    continue;
                }
                let j = nr as usize * w + nc as usize;
                if !queued[j] && problem.eligible(img.cells()[j], j) {
                    queued[j] = true;
                    heap.push(Reverse((problem.priority.values()[j], j)));
                }
            }
        }
        rounds += 1;
    }
}

/// Pixels that could still flip: a stable result has none.
pub(crate) fn remaining_flippable(img: &BinaryImage, problem: &StabilityProblem<'_>) -> Vec<usize> {
    (0..img.len()).filter(|&i| flippable(img, problem, i)).collect()
}
