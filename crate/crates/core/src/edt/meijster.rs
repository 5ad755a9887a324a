use std::ops::Range;

use super::{SquaredDistanceMap, Target};
use crate::error::{Error, Result};
use crate::grid::{BinaryImage, Point};
use crate::runtime::{partition, Pool, Task};

/// Column-table entry for a column that holds no target pixel.
pub const G_INF: u32 = u32::MAX;

/// Vertical distance from every pixel to the nearest target pixel in its own
/// column. Stored column-major so each column is one contiguous slice.
#[derive(Clone, PartialEq, Eq)]
pub struct ColumnTable {
    width: usize,
    height: usize,
    g: Vec<u32>,
}

impl ColumnTable {
    pub fn compute(img: &BinaryImage, target: Target) -> Self {
        ColumnTable {
            width: img.width(),
            height: img.height(),
            g: meijster_columns(img, target, 0..img.width()),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// g(row, col), [`G_INF`] when the column has no target.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.g[col * self.height + row]
    }

    pub fn column(&self, col: usize) -> &[u32] {
        &self.g[col * self.height..(col + 1) * self.height]
    }

    fn inf(&self) -> u64 {
        SquaredDistanceMap::inf_for(self.width, self.height)
    }
}

/// Fills `out` (column-major, `cols.len() * height` entries) with the column
/// phase for `cols`: a top-down pass then a bottom-up pass per column.
fn fill_columns(img: &BinaryImage, target: Target, cols: Range<usize>, out: &mut [u32]) {
    let h = img.height();
    debug_assert_eq!(out.len(), cols.len() * h);
    for (k, col) in cols.enumerate() {
        let g = &mut out[k * h..(k + 1) * h];
        g[0] = if target.selects(img.pixel(0, col)) { 0 } else { G_INF };
        for row in 1..h {
            g[row] = if target.selects(img.pixel(row, col)) {
                0
            } else if g[row - 1] == G_INF {
                G_INF
            } else {
                g[row - 1] + 1
            };
        }
        for row in (0..h.saturating_sub(1)).rev() {
            if g[row + 1] < g[row] {
                g[row] = g[row + 1] + 1;
            }
        }
    }
}

/// Column phase restricted to `cols`. Columns are independent, so any subset
/// can be computed in isolation. Returns `cols.len() * height` entries,
/// column-major.
pub fn meijster_columns(img: &BinaryImage, target: Target, cols: Range<usize>) -> Vec<u32> {
    assert!(cols.end <= img.width(), "column range out of bounds");
    let mut out = vec![0; cols.len() * img.height()];
    fill_columns(img, target, cols, &mut out);
    out
}

#[inline]
fn cost(col: usize, y: usize, g: u32, inf: u64) -> u64 {
    if g == G_INF {
        return inf;
    }
    let dx = col.abs_diff(y) as u64;
    let g = g as u64;
    (dx * dx + g * g).min(inf)
}

/// (col − y)² + g(row, y)²: squared distance from `p` to the nearest target
/// in column `y`. INF when that column is empty.
pub fn distance_via_column(p: Point, y: usize, g: &ColumnTable) -> u64 {
    cost(p.col as usize, y, g.get(p.row as usize, y), g.inf())
}

#[inline]
fn sep_unchecked(i: usize, u: usize, gi: u32, gu: u32) -> i64 {
    let (i, u) = (i as i64, u as i64);
    let (gi, gu) = (gi as i64, gu as i64);
    (u * u - i * i + gu * gu - gi * gi).div_euclid(2 * (u - i))
}

/// Last column at which the parabola rooted at column `i` is still no worse
/// than the one rooted at `u`, on row `row`.
pub fn sep(i: usize, u: usize, row: usize, g: &ColumnTable) -> Result<i64> {
    if i >= u {
        return Err(Error::InvalidArgument(format!("sep needs i < u, got i={i}, u={u}")));
    }
    let (gi, gu) = (g.get(row, i), g.get(row, u));
    if gi == G_INF || gu == G_INF {
        return Err(Error::InvalidArgument("sep needs finite column distances".into()));
    }
    Ok(sep_unchecked(i, u, gi, gu))
}

/// Stack of the lower envelope built while scanning one row left to right.
/// `s[k]` is the column owning region `k`, `t[k]` the first column of it.
#[derive(Debug, Clone, Default)]
pub struct RegionScanState {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    /// Number of live regions; zero means the row saw no finite column yet.
    pub len: usize,
}

impl RegionScanState {
    pub fn with_width(width: usize) -> Self {
        RegionScanState {
            s: vec![0; width],
            t: vec![0; width],
            len: 0,
        }
    }

    /// Left-to-right pass. Columns without a target never own a region.
    pub fn build(&mut self, g: &ColumnTable, row: usize) {
        let w = g.width;
        let inf = g.inf();
        self.s.resize(w, 0);
        self.t.resize(w, 0);
        self.len = 0;
        for u in 0..w {
            let gu = g.get(row, u);
            if gu == G_INF {
                continue;
            }
            while self.len > 0 {
                let q = self.len - 1;
                let (sq, tq) = (self.s[q], self.t[q]);
                if cost(tq, sq, g.get(row, sq), inf) > cost(tq, u, gu, inf) {
                    self.len -= 1;
                } else {
                    break;
                }
            }
            if self.len == 0 {
                self.s[0] = u;
                self.t[0] = 0;
                self.len = 1;
            } else {
                let sq = self.s[self.len - 1];
                let start = 1 + sep_unchecked(sq, u, g.get(row, sq), gu);
                if start < w as i64 {
                    self.s[self.len] = u;
                    self.t[self.len] = start as usize;
                    self.len += 1;
                }
            }
        }
    }

    /// Right-to-left pass writing one row of squared distances.
    pub fn emit(&mut self, g: &ColumnTable, row: usize, out: &mut [u64]) {
        let inf = g.inf();
        if self.len == 0 {
            out.fill(inf);
            return;
        }
        let mut q = self.len - 1;
        for u in (0..g.width).rev() {
            let sq = self.s[q];
            out[u] = cost(u, sq, g.get(row, sq), inf);
            if u == self.t[q] && q > 0 {
                q -= 1;
            }
        }
    }
}

fn fill_rows(g: &ColumnTable, rows: Range<usize>, out: &mut [u64]) {
    let w = g.width;
    let mut state = RegionScanState::with_width(w);
    for (k, row) in rows.enumerate() {
        state.build(g, row);
        state.emit(g, row, &mut out[k * w..(k + 1) * w]);
    }
}

/// Row phase restricted to `rows`, returned row-major. Needs the complete
/// column table; rows are independent of each other.
pub fn meijster_rows(g: &ColumnTable, rows: Range<usize>) -> Vec<u64> {
    assert!(rows.end <= g.height, "row range out of bounds");
    let mut out = vec![0; rows.len() * g.width];
    fill_rows(g, rows, &mut out);
    out
}

/// Exact squared EDT using `workers` threads. The result does not depend on
/// the worker count.
pub fn meijster(img: &BinaryImage, target: Target, workers: usize) -> SquaredDistanceMap {
    if workers <= 1 {
        let g = ColumnTable::compute(img, target);
        let values = meijster_rows(&g, 0..img.height());
        return SquaredDistanceMap::from_values(img.width(), img.height(), values);
    }
    meijster_with(&Pool::new(workers), img, target)
}

/// [`meijster`] on an existing pool: columns are split into contiguous
/// blocks, one task per worker, then a barrier, then rows likewise.
pub fn meijster_with(pool: &Pool, img: &BinaryImage, target: Target) -> SquaredDistanceMap {
    let (w, h) = (img.width(), img.height());

    let mut g = vec![0u32; w * h];
    {
        let mut rest = g.as_mut_slice();
        let mut tasks: Vec<Task<'_>> = Vec::new();
        for cols in partition(w, pool.workers()) {
            let (chunk, tail) = rest.split_at_mut(cols.len() * h);
            rest = tail;
            tasks.push(Box::new(move || fill_columns(img, target, cols, chunk)));
        }
        pool.execute(tasks);
    }
    let table = ColumnTable { width: w, height: h, g };

    let mut values = vec![0u64; w * h];
    {
        let mut rest = values.as_mut_slice();
        let mut tasks: Vec<Task<'_>> = Vec::new();
        for rows in partition(h, pool.workers()) {
            let (chunk, tail) = rest.split_at_mut(rows.len() * w);
            rest = tail;
            let table = &table;
            tasks.push(Box::new(move || fill_rows(table, rows, chunk)));
        }
        pool.execute(tasks);
    }
    SquaredDistanceMap::from_values(w, h, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edt::edt_brute;

    fn column_image(bits: &[bool]) -> BinaryImage {
        BinaryImage::from_cells(1, bits.len(), bits.to_vec()).unwrap()
    }

    #[test]
    fn empty_column_is_inf() {
        let img = column_image(&[false; 6]);
        assert!(meijster_columns(&img, Target::Foreground, 0..1)
            .iter()
            .all(|&v| v == G_INF));
    }

    #[test]
    fn top_seed_counts_down_the_column() {
        let mut bits = vec![false; 7];
        bits[0] = true;
        let g = meijster_columns(&column_image(&bits), Target::Foreground, 0..1);
        assert_eq!(g, (0..7).collect::<Vec<u32>>());
    }

    #[test]
    fn cost_examples() {
        let mut img = BinaryImage::new(9, 6).unwrap();
        img.set(5, 4, true);
        let g = ColumnTable::compute(&img, Target::Foreground);
        assert_eq!(g.get(3, 4), 2);
        assert_eq!(distance_via_column(Point::new(3, 7), 4, &g), 9 + 4);
        assert_eq!(distance_via_column(Point::new(3, 4), 4, &g), 4);
        assert_eq!(distance_via_column(Point::new(3, 4), 0, &g), g.inf());
    }

    #[test]
    fn sep_examples() {
        let mut img = BinaryImage::new(5, 1).unwrap();
        img.set(0, 0, true);
        img.set(0, 4, true);
        let g = ColumnTable::compute(&img, Target::Foreground);
        assert_eq!(sep(0, 4, 0, &g).unwrap(), 2);
        assert!(sep(4, 4, 0, &g).is_err());
        assert!(sep(4, 0, 0, &g).is_err());

        let mut img = BinaryImage::new(8, 3).unwrap();
        img.set(2, 1, true);
        img.set(2, 6, true);
        let g = ColumnTable::compute(&img, Target::Foreground);
        // Equal column distances: midpoint, rounded down.
        assert_eq!(sep(1, 6, 0, &g).unwrap(), 3);
        assert!(sep(0, 6, 0, &g).is_err());
    }

    #[test]
    fn inf_row_and_single_column() {
        let img = BinaryImage::new(5, 3).unwrap();
        let g = ColumnTable::compute(&img, Target::Foreground);
        let inf = g.inf();
        assert!(meijster_rows(&g, 0..3).iter().all(|&v| v == inf));

        let mut img = BinaryImage::new(6, 3).unwrap();
        img.set(0, 2, true);
        let g = ColumnTable::compute(&img, Target::Foreground);
        let row2 = meijster_rows(&g, 2..3);
        let want: Vec<u64> = (0..6)
            .map(|c: usize| (c.abs_diff(2) * c.abs_diff(2) + 4) as u64)
            .collect();
        assert_eq!(row2, want);
    }

    #[test]
    fn small_shapes_match_brute_force() {
        let img = BinaryImage::from_ascii(
            "
            ..........
            ..##......
            ..##....#.
            ..........
            .......##.
            #.........
            ",
        )
        .unwrap();
        for target in [Target::Foreground, Target::Background] {
            let want = edt_brute(&img, target);
            for workers in [1, 2, 3, 7] {
                assert_eq!(meijster(&img, target, workers), want, "workers={workers}");
            }
        }
    }
}
