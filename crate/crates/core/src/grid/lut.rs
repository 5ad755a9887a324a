use std::sync::OnceLock;

use super::{Adjacency, BinaryImage, ConnectivityPair, NeighborhoodPattern, Point, FOUR_NEIGHBOR_MASK, OFFSETS_8};
use crate::error::{Error, Result};

struct Tables {
    t4: [u8; 256],
    t8: [u8; 256],
    simple_8_4: [bool; 256],
    simple_4_8: [bool; 256],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut t = Tables {
            t4: [0; 256],
            t8: [0; 256],
            simple_8_4: [false; 256],
            simple_4_8: [false; 256],
        };
        for bits in 0..=255u8 {
            t.t4[bits as usize] = count_components(bits, Adjacency::Four);
            t.t8[bits as usize] = count_components(bits, Adjacency::Eight);
        }
        for bits in 0..=255usize {
            let inv = !(bits as u8) as usize;
            t.simple_8_4[bits] = t.t8[bits] == 1 && t.t4[inv] == 1;
            t.simple_4_8[bits] = t.t4[bits] == 1 && t.t8[inv] == 1;
        }
        t
    })
}

fn adjacent(a: (isize, isize), b: (isize, isize), adjacency: Adjacency) -> bool {
    let dr = (a.0 - b.0).abs();
    let dc = (a.1 - b.1).abs();
    match adjacency {
        Adjacency::Four => dr + dc == 1,
        Adjacency::Eight => dr.max(dc) == 1,
    }
}

/// Components of the set bits under `adjacency` that touch the center.
fn count_components(bits: u8, adjacency: Adjacency) -> u8 {
    let mut seen = 0u8;
    let mut count = 0;
    for start in 0..8 {
        if bits & (1 << start) == 0 || seen & (1 << start) != 0 {
            continue;
        }
        let mut members = 0u8;
        let mut stack = vec![start];
        seen |= 1 << start;
        while let Some(i) = stack.pop() {
            members |= 1 << i;
            for (j, &other) in OFFSETS_8.iter().enumerate() {
                if bits & (1 << j) != 0 && seen & (1 << j) == 0 && adjacent(OFFSETS_8[i], other, adjacency) {
                    seen |= 1 << j;
                    stack.push(j);
                }
            }
        }
        let touches_center = match adjacency {
            Adjacency::Eight => true,
            Adjacency::Four => members & FOUR_NEIGHBOR_MASK != 0,
        };
        if touches_center {
            count += 1;
        }
    }
    count
}

/// Number of `adjacency`-components of the pattern's set bits that are
/// `adjacency`-adjacent to the center pixel.
pub fn connectivity_number(pattern: NeighborhoodPattern, adjacency: Adjacency) -> u8 {
    let t = tables();
    match adjacency {
        Adjacency::Four => t.t4[pattern.0 as usize],
        Adjacency::Eight => t.t8[pattern.0 as usize],
    }
}

/// T(x, X) = 1 and T̄(x, X) = 1 for the object whose neighbors are `pattern`.
///
/// Only the neighbors matter, so this one table answers both "may this object
/// pixel be deleted" and "may this background pixel be added".
#[inline]
pub fn is_simple_pattern(pattern: NeighborhoodPattern, conn: ConnectivityPair) -> bool {
    let t = tables();
    match conn {
        ConnectivityPair::Fg8Bg4 => t.simple_8_4[pattern.0 as usize],
        ConnectivityPair::Fg4Bg8 => t.simple_4_8[pattern.0 as usize],
    }
}

/// Whether deleting the foreground pixel `p` preserves the topology of `img`.
pub fn is_simple(img: &BinaryImage, p: Point, conn: ConnectivityPair) -> Result<bool> {
    img.check_inside(p)?;
    if !img.at(p) {
        return Err(Error::NotForeground(p));
    }
    Ok(is_simple_pattern(img.pattern_unchecked(p.row, p.col), conn))
}

/// Whether adding the background pixel `p` preserves the topology of `img`,
/// i.e. `p` is simple for `img ∪ {p}` under the same pair.
pub fn is_addable(img: &BinaryImage, p: Point, conn: ConnectivityPair) -> Result<bool> {
    img.check_inside(p)?;
    if img.at(p) {
        return Err(Error::NotBackground(p));
    }
    Ok(is_simple_pattern(img.pattern_unchecked(p.row, p.col), conn))
}
