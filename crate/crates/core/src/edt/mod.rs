//! Squared Euclidean distance transforms.
//!
//! All arithmetic is on exact squared integer distances. A map stores, for
//! every pixel, the squared distance to the nearest pixel of a target set, or
//! the map's INF sentinel when the target set is empty.
//!
//! Three routes are provided:
//! * [`edt_brute`], a direct minimization used as the reference,
//! * [`sed4`], Danielsson's four-point sequential vector propagation, which is
//!   fast but occasionally off by a little,
//! * [`meijster`], the exact two-phase separable algorithm, whose column and
//!   row phases are data-independent and are split across workers.

mod meijster;
mod sed4;

use crate::grid::{BinaryImage, Point};

pub use meijster::{
    distance_via_column, meijster, meijster_columns, meijster_rows, meijster_with, sep, ColumnTable, RegionScanState,
    G_INF,
};
pub use sed4::sed4;

/// Which pixels distances are measured to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Foreground,
    Background,
}

impl Target {
    #[inline]
    pub(crate) fn selects(self, value: bool) -> bool {
        match self {
            Target::Foreground => value,
            Target::Background => !value,
        }
    }
}

/// Per-pixel squared distance with an INF sentinel of `width² + height²`,
/// strictly above any distance achievable inside the frame.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SquaredDistanceMap {
    width: usize,
    height: usize,
    values: Vec<u64>,
}

impl SquaredDistanceMap {
    pub fn inf_for(width: usize, height: usize) -> u64 {
        (width * width + height * height) as u64
    }

    pub(crate) fn from_values(width: usize, height: usize, values: Vec<u64>) -> Self {
        debug_assert_eq!(values.len(), width * height);
        SquaredDistanceMap { width, height, values }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn inf(&self) -> u64 {
        Self::inf_for(self.width, self.height)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.values[row * self.width + col]
    }

    pub fn at(&self, p: Point) -> u64 {
        self.get(p.row as usize, p.col as usize)
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn is_inf(&self, row: usize, col: usize) -> bool {
        self.get(row, col) >= self.inf()
    }

    /// True when every entry is INF, i.e. the target set was empty.
    pub fn all_inf(&self) -> bool {
        let inf = self.inf();
        self.values.iter().all(|&v| v >= inf)
    }

    /// Pointwise minimum with another map of the same shape.
    pub(crate) fn min_with(&mut self, mut other: impl FnMut(usize, usize) -> u64) {
        for r in 0..self.height {
            for c in 0..self.width {
                let v = &mut self.values[r * self.width + c];
                *v = (*v).min(other(r, c));
            }
        }
    }

    /// Largest pointwise |a − b|, treating INF as a value. `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &SquaredDistanceMap) -> Option<u64> {
        if (self.width, self.height) != (other.width, other.height) {
            return None;
        }
        Some(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a.abs_diff(b))
                .max()
                .unwrap_or(0),
        )
    }

    pub fn transpose(&self) -> SquaredDistanceMap {
        let mut values = vec![0; self.values.len()];
        for r in 0..self.height {
            for c in 0..self.width {
                values[c * self.height + r] = self.values[r * self.width + c];
            }
        }
        SquaredDistanceMap::from_values(self.height, self.width, values)
    }
}

impl std::fmt::Debug for SquaredDistanceMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "SquaredDistanceMap {}x{}", self.width, self.height)?;
        let inf = self.inf();
        for r in 0..self.height {
            for c in 0..self.width {
                let v = self.get(r, c);
                if v >= inf {
                    write!(f, "  ∞")?;
                } else {
                    write!(f, "{v:>3}")?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Reference transform: minimum over every target pixel.
pub fn edt_brute(img: &BinaryImage, target: Target) -> SquaredDistanceMap {
    let (w, h) = (img.width(), img.height());
    let targets: Vec<(i64, i64)> = (0..h)
        .flat_map(|r| (0..w).map(move |c| (r, c)))
        .filter(|&(r, c)| target.selects(img.pixel(r, c)))
        .map(|(r, c)| (r as i64, c as i64))
        .collect();
    let inf = SquaredDistanceMap::inf_for(w, h);
    let mut values = Vec::with_capacity(w * h);
    for r in 0..h as i64 {
        for c in 0..w as i64 {
            let best = targets
                .iter()
                .map(|&(tr, tc)| ((r - tr) * (r - tr) + (c - tc) * (c - tc)) as u64)
                .min()
                .unwrap_or(inf);
            values.push(best);
        }
    }
    SquaredDistanceMap::from_values(w, h, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_examples() {
        let full = BinaryImage::filled(4, 3, true).unwrap();
        assert!(edt_brute(&full, Target::Foreground).values().iter().all(|&v| v == 0));

        let empty = BinaryImage::new(4, 3).unwrap();
        let m = edt_brute(&empty, Target::Foreground);
        assert!(m.all_inf());
        assert_eq!(m.inf(), 16 + 9);

        let mut one = BinaryImage::new(5, 5).unwrap();
        one.set(2, 2, true);
        let m = edt_brute(&one, Target::Foreground);
        assert_eq!(m.get(0, 0), 8);
        assert_eq!(m.get(2, 0), 4);
        assert_eq!(m.get(2, 2), 0);
        // Background target of the same image: only the seed is nonzero.
        let b = edt_brute(&one, Target::Background);
        assert_eq!(b.get(2, 2), 1);
        assert_eq!(b.get(0, 0), 0);
    }
}
