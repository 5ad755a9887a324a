//! Lattice geometry and digital topology on the square grid.
//!
//! Coordinates are `(row, col)`. Anything outside the image frame reads as
//! background, so an image is a finite subset of the plane and border pixels
//! need no special casing.

mod components;
mod lut;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use components::{connected_components, topology_of, ComponentLabeling, TopologySignature};
pub use lut::{connectivity_number, is_addable, is_simple, is_simple_pattern};

/// A lattice point. Signed so that neighbors of border pixels are representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub row: isize,
    pub col: isize,
}

impl Point {
    pub const fn new(row: isize, col: isize) -> Self {
        Point { row, col }
    }

    pub fn offset(self, dr: isize, dc: isize) -> Self {
        Point::new(self.row + dr, self.col + dc)
    }

    /// Chebyshev (chessboard) distance.
    pub fn chebyshev(self, other: Point) -> usize {
        (self.row - other.row)
            .unsigned_abs()
            .max((self.col - other.col).unsigned_abs())
    }
}

impl From<(isize, isize)> for Point {
    fn from((row, col): (isize, isize)) -> Self {
        Point::new(row, col)
    }
}

/// Adjacency relation used to build paths: Γ₄ (edge) or Γ₈ (edge or corner).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Adjacency {
    Four,
    Eight,
}

impl Adjacency {
    pub fn value(self) -> u8 {
        match self {
            Adjacency::Four => 4,
            Adjacency::Eight => 8,
        }
    }

    pub fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Adjacency::Four => &OFFSETS_4,
            Adjacency::Eight => &OFFSETS_8,
        }
    }

    pub fn other(self) -> Adjacency {
        match self {
            Adjacency::Four => Adjacency::Eight,
            Adjacency::Eight => Adjacency::Four,
        }
    }
}

impl TryFrom<u8> for Adjacency {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            4 => Ok(Adjacency::Four),
            8 => Ok(Adjacency::Eight),
            _ => Err(Error::InvalidArgument(format!("adjacency must be 4 or 8, got {n}"))),
        }
    }
}

/// Foreground/background adjacency pair. Only the two dual pairs exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ConnectivityPair {
    /// n = 8 for the object, n̄ = 4 for the background.
    #[default]
    Fg8Bg4,
    /// n = 4 for the object, n̄ = 8 for the background.
    Fg4Bg8,
}

impl ConnectivityPair {
    pub fn new(foreground: Adjacency, background: Adjacency) -> Result<Self> {
        match (foreground, background) {
            (Adjacency::Eight, Adjacency::Four) => Ok(ConnectivityPair::Fg8Bg4),
            (Adjacency::Four, Adjacency::Eight) => Ok(ConnectivityPair::Fg4Bg8),
            (f, b) => Err(Error::InvalidArgument(format!(
                "({}, {}) is not a dual connectivity pair",
                f.value(),
                b.value()
            ))),
        }
    }

    pub fn foreground(self) -> Adjacency {
        match self {
            ConnectivityPair::Fg8Bg4 => Adjacency::Eight,
            ConnectivityPair::Fg4Bg8 => Adjacency::Four,
        }
    }

    pub fn background(self) -> Adjacency {
        self.foreground().other()
    }

    /// The pair with object and background roles swapped.
    pub fn dual(self) -> Self {
        match self {
            ConnectivityPair::Fg8Bg4 => ConnectivityPair::Fg4Bg8,
            ConnectivityPair::Fg4Bg8 => ConnectivityPair::Fg8Bg4,
        }
    }
}

impl fmt::Display for ConnectivityPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.foreground().value(), self.background().value())
    }
}

impl FromStr for ConnectivityPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "8-4" | "8,4" | "(8,4)" => Ok(ConnectivityPair::Fg8Bg4),
            "4-8" | "4,8" | "(4,8)" => Ok(ConnectivityPair::Fg4Bg8),
            other => Err(Error::InvalidArgument(format!(
                "unknown connectivity pair `{other}` (expected 8-4 or 4-8)"
            ))),
        }
    }
}

/// Γ₄* offsets, row-major: N, W, E, S.
pub const OFFSETS_4: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];

/// Γ₈* offsets, row-major over the 3x3 block skipping the center:
/// NW, N, NE, W, E, SW, S, SE. Bit `i` of a [`NeighborhoodPattern`]
/// refers to `OFFSETS_8[i]`.
pub const OFFSETS_8: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

/// Bits of the 4-neighbors inside a [`NeighborhoodPattern`].
pub(crate) const FOUR_NEIGHBOR_MASK: u8 = (1 << 1) | (1 << 3) | (1 << 4) | (1 << 6);

/// Γₙ*(p) in the fixed row-major order. Points may fall outside any image.
pub fn neighbors(p: Point, adjacency: Adjacency) -> impl Iterator<Item = Point> {
    adjacency.offsets().iter().map(move |&(dr, dc)| p.offset(dr, dc))
}

/// Occupancy of the eight neighbors of a pixel; see [`OFFSETS_8`] for bit order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NeighborhoodPattern(pub u8);

impl NeighborhoodPattern {
    pub const EMPTY: NeighborhoodPattern = NeighborhoodPattern(0);
    pub const FULL: NeighborhoodPattern = NeighborhoodPattern(0xff);

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn is_set(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    /// Pattern of the complement set.
    pub fn complement(self) -> Self {
        NeighborhoodPattern(!self.0)
    }

    /// Builds the pattern around `(row, col)` from an arbitrary cell reader.
    #[inline]
    pub(crate) fn from_reader(row: isize, col: isize, get: impl Fn(isize, isize) -> bool) -> Self {
        let mut bits = 0u8;
        for (i, &(dr, dc)) in OFFSETS_8.iter().enumerate() {
            if get(row + dr, col + dc) {
                bits |= 1 << i;
            }
        }
        NeighborhoodPattern(bits)
    }
}

/// Pattern of `img` around `p`; out-of-image cells read as background.
pub fn pattern_at(img: &BinaryImage, p: Point) -> Result<NeighborhoodPattern> {
    img.check_inside(p)?;
    Ok(img.pattern_unchecked(p.row, p.col))
}

/// A rectangular binary image stored row-major. `true` is foreground.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl BinaryImage {
    /// All-background image. Both dimensions must be at least one.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, false)
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        Ok(BinaryImage {
            width,
            height,
            cells: vec![value; width * height],
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut img = Self::new(width, height)?;
        for r in 0..height {
            for c in 0..width {
                img.cells[r * width + c] = f(r, c);
            }
        }
        Ok(img)
    }

    /// Wraps a row-major cell vector.
    pub fn from_cells(width: usize, height: usize, cells: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "{} cells do not form a {width}x{height} image",
                cells.len()
            )));
        }
        Ok(BinaryImage { width, height, cells })
    }

    /// Parses a picture where `#`, `X`, `x`, `1` or `*` mark foreground and any
    /// other non-whitespace character marks background. Blank lines are skipped
    /// and rows must have equal length.
    pub fn from_ascii(art: &str) -> Result<Self> {
        let rows: Vec<Vec<bool>> = art
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| matches!(c, '#' | 'X' | 'x' | '1' | '*'))
                    .collect()
            })
            .collect();
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidArgument("ragged ascii image".into()));
        }
        Self::from_cells(width, height, rows.into_iter().flatten().collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&b| b)
    }

    pub fn is_full(&self) -> bool {
        self.cells.iter().all(|&b| b)
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<bool> {
        self.cells
    }

    pub fn contains(&self, p: Point) -> bool {
        p.row >= 0 && p.col >= 0 && (p.row as usize) < self.height && (p.col as usize) < self.width
    }

    pub(crate) fn check_inside(&self, p: Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                point: p,
                width: self.width,
                height: self.height,
            })
        }
    }

    /// Cell value; anything outside the frame is background.
    #[inline]
    pub fn get(&self, row: isize, col: isize) -> bool {
        if row < 0 || col < 0 || row as usize >= self.height || col as usize >= self.width {
            return false;
        }
        self.cells[row as usize * self.width + col as usize]
    }

    #[inline]
    pub fn at(&self, p: Point) -> bool {
        self.get(p.row, p.col)
    }

    /// In-frame access by unsigned coordinates. Panics outside the frame.
    #[inline]
    pub fn pixel(&self, row: usize, col: usize) -> bool {
        assert!(row < self.height && col < self.width);
        self.cells[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        assert!(row < self.height && col < self.width);
        self.cells[row * self.width + col] = value;
    }

    #[inline]
    pub(crate) fn pattern_unchecked(&self, row: isize, col: isize) -> NeighborhoodPattern {
        NeighborhoodPattern::from_reader(row, col, |r, c| self.get(r, c))
    }

    pub fn count_foreground(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    /// Foreground points in raster order.
    pub fn foreground(&self) -> impl Iterator<Item = Point> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| Point::new((i / self.width) as isize, (i % self.width) as isize))
    }

    pub fn complement(&self) -> BinaryImage {
        BinaryImage {
            width: self.width,
            height: self.height,
            cells: self.cells.iter().map(|&b| !b).collect(),
        }
    }

    pub fn transpose(&self) -> BinaryImage {
        let mut cells = vec![false; self.cells.len()];
        for r in 0..self.height {
            for c in 0..self.width {
                cells[c * self.height + r] = self.cells[r * self.width + c];
            }
        }
        BinaryImage {
            width: self.height,
            height: self.width,
            cells,
        }
    }

    pub fn same_shape(&self, other: &BinaryImage) -> Result<()> {
        if self.width == other.width && self.height == other.height {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ))
        }
    }

    fn zip_with(&self, other: &BinaryImage, f: impl Fn(bool, bool) -> bool) -> Result<BinaryImage> {
        self.same_shape(other)?;
        Ok(BinaryImage {
            width: self.width,
            height: self.height,
            cells: self.cells.iter().zip(&other.cells).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn union(&self, other: &BinaryImage) -> Result<BinaryImage> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &BinaryImage) -> Result<BinaryImage> {
        self.zip_with(other, |a, b| a && b)
    }

    /// `self \ other`.
    pub fn difference(&self, other: &BinaryImage) -> Result<BinaryImage> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn is_subset_of(&self, other: &BinaryImage) -> Result<bool> {
        self.same_shape(other)?;
        Ok(self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b))
    }

    pub fn is_disjoint_from(&self, other: &BinaryImage) -> Result<bool> {
        self.same_shape(other)?;
        Ok(self.cells.iter().zip(&other.cells).all(|(&a, &b)| !(a && b)))
    }

    /// Foreground pixels that have a 4-neighbor in the background, counting
    /// the outside of the frame as background.
    pub fn boundary_length(&self) -> usize {
        self.foreground()
            .filter(|p| neighbors(*p, Adjacency::Four).any(|q| !self.at(q)))
            .count()
    }
}

impl fmt::Debug for BinaryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryImage {}x{}", self.width, self.height)?;
        for r in 0..self.height {
            let row: String = self.cells[r * self.width..(r + 1) * self.width]
                .iter()
                .map(|&b| if b { '#' } else { '.' })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_neighbors_of_origin() {
        let got: Vec<Point> = neighbors(Point::new(0, 0), Adjacency::Four).collect();
        let mut sorted = got.clone();
        sorted.sort();
        let mut want = vec![Point::new(-1, 0), Point::new(1, 0), Point::new(0, -1), Point::new(0, 1)];
        want.sort();
        assert_eq!(sorted, want);
        assert_eq!(got[0], Point::new(-1, 0));
    }

    #[test]
    fn eight_neighbors_are_block_minus_center() {
        let p = Point::new(5, 5);
        let got: Vec<Point> = neighbors(p, Adjacency::Eight).collect();
        assert_eq!(got.len(), 8);
        assert!(!got.contains(&p));
        for q in &got {
            assert_eq!(q.chebyshev(p), 1);
        }
        for q in neighbors(p, Adjacency::Four) {
            assert!(got.contains(&q));
        }
    }

    #[test]
    fn pattern_examples() {
        let empty = BinaryImage::new(5, 5).unwrap();
        assert_eq!(
            pattern_at(&empty, Point::new(2, 2)).unwrap(),
            NeighborhoodPattern::EMPTY
        );

        let full = BinaryImage::filled(5, 5, true).unwrap();
        assert_eq!(pattern_at(&full, Point::new(2, 2)).unwrap(), NeighborhoodPattern::FULL);
        // Corner of a full image: only three neighbors lie inside the frame.
        assert_eq!(pattern_at(&full, Point::new(0, 0)).unwrap().bits().count_ones(), 3);

        let mut west = BinaryImage::new(5, 5).unwrap();
        west.set(2, 1, true);
        let pat = pattern_at(&west, Point::new(2, 2)).unwrap();
        assert_eq!(pat.bits().count_ones(), 1);
        assert!(pat.is_set(3));

        assert!(matches!(
            pattern_at(&west, Point::new(5, 0)),
            Err(Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn outside_reads_background() {
        let full = BinaryImage::filled(3, 3, true).unwrap();
        assert!(!full.get(-1, 0));
        assert!(!full.get(0, 3));
        assert!(full.get(2, 2));
    }

    #[test]
    fn zero_dimensions_rejected() {
        assert!(BinaryImage::new(0, 3).is_err());
        assert!(BinaryImage::new(3, 0).is_err());
    }

    #[test]
    fn connectivity_pair_parsing() {
        assert_eq!("8-4".parse::<ConnectivityPair>().unwrap(), ConnectivityPair::Fg8Bg4);
        assert_eq!("4-8".parse::<ConnectivityPair>().unwrap(), ConnectivityPair::Fg4Bg8);
        assert!("8-8".parse::<ConnectivityPair>().is_err());
        assert!(ConnectivityPair::new(Adjacency::Four, Adjacency::Four).is_err());
        assert_eq!(ConnectivityPair::Fg8Bg4.dual(), ConnectivityPair::Fg4Bg8);
        assert_eq!(ConnectivityPair::default().to_string(), "8-4");
    }

    #[test]
    fn ascii_round_trip() {
        let img = BinaryImage::from_ascii(
            "
            #..
            .#.
            ",
        )
        .unwrap();
        assert_eq!((img.width(), img.height()), (3, 2));
        assert!(img.pixel(0, 0) && img.pixel(1, 1) && !img.pixel(0, 1));
        assert_eq!(img.transpose().transpose(), img);
    }

    #[test]
    fn boundary_length_of_block() {
        let img = BinaryImage::from_ascii(
            "
            .....
            .###.
            .###.
            .###.
            .....
            ",
        )
        .unwrap();
        assert_eq!(img.boundary_length(), 8);
    }
}
