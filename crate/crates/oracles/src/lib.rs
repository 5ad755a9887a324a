//! Slow, obviously-correct reference implementations and input generators
//! shared by the test suites. Nothing here reuses the library's own
//! labeling, lookup tables or distance transforms.

use hasf::grid::{Adjacency, BinaryImage, ConnectivityPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent pixels, each foreground with probability `density`.
pub fn random_image(rng: &mut impl Rng, width: usize, height: usize, density: f64) -> BinaryImage {
    BinaryImage::from_fn(width, height, |_, _| rng.gen_bool(density.clamp(0.0, 1.0))).unwrap()
}

/// Union of random discs and boxes, xor-ed with sparse salt noise: blobs
/// with holes, bays, bridges and specks, the shapes smoothing is meant for.
pub fn random_shapes(rng: &mut impl Rng, width: usize, height: usize) -> BinaryImage {
    let mut img = BinaryImage::new(width, height).unwrap();
    let area = (width * height) as f64;
    let count = 1 + (area / 400.0) as usize + rng.gen_range(0..4);
    for _ in 0..count {
        let cr = rng.gen_range(0..height) as i64;
        let cc = rng.gen_range(0..width) as i64;
        let radius = rng.gen_range(1..=(width.min(height) as i64 / 4).max(2));
        let filled = rng.gen_bool(0.8);
        let square = rng.gen_bool(0.3);
        for r in 0..height as i64 {
            for c in 0..width as i64 {
                let (dr, dc) = (r - cr, c - cc);
                let inside = if square {
                    dr.abs() <= radius && dc.abs() <= radius
                } else {
                    dr * dr + dc * dc <= radius * radius
                };
                if inside {
                    img.set(r as usize, c as usize, filled);
                }
            }
        }
    }
    let noise = rng.gen_range(0.0..0.06);
    for r in 0..height {
        for c in 0..width {
            if rng.gen_bool(noise) {
                let v = img.pixel(r, c);
                img.set(r, c, !v);
            }
        }
    }
    img
}

/// A `size`×`size` square with crenellated sides (teeth and gaps of
/// `tooth` pixels) and ±1-pixel noise along its boundary.
pub fn crenellated(rng: &mut impl Rng, size: usize, tooth: usize) -> BinaryImage {
    let lo = size / 5;
    let hi = size - lo;
    let crenel = |t: usize| (t / tooth).is_multiple_of(2);
    let mut img = BinaryImage::from_fn(size, size, |r, c| {
        let inner = (lo..hi).contains(&r) && (lo..hi).contains(&c);
        let top = r + tooth >= lo && r < lo && (lo..hi).contains(&c) && crenel(c);
        let bottom = r >= hi && r < hi + tooth && (lo..hi).contains(&c) && crenel(c);
        let left = c + tooth >= lo && c < lo && (lo..hi).contains(&r) && crenel(r);
        let right = c >= hi && c < hi + tooth && (lo..hi).contains(&r) && crenel(r);
        inner || top || bottom || left || right
    })
    .unwrap();
    let snapshot = img.clone();
    for r in 1..size - 1 {
        for c in 1..size - 1 {
            let v = snapshot.pixel(r, c);
            let edge = [(0, 1), (1, 0), (0, -1), (-1, 0)]
                .iter()
                .any(|&(dr, dc)| snapshot.get(r as isize + dr, c as isize + dc) != v);
            if edge && rng.gen_bool(0.25) {
                img.set(r, c, !v);
            }
        }
    }
    img
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Components of the cells equal to `value`, by union-find over the
/// forward half of the adjacency.
pub fn count_cells(cells: &[bool], width: usize, height: usize, value: bool, eight: bool) -> usize {
    let mut uf = UnionFind((0..cells.len()).collect());
    let forward: &[(isize, isize)] = if eight {
        &[(0, 1), (1, -1), (1, 0), (1, 1)]
    } else {
        &[(0, 1), (1, 0)]
    };
    for r in 0..height {
        for c in 0..width {
            if cells[r * width + c] != value {
                continue;
            }
            for &(dr, dc) in forward {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr < 0 || nc < 0 || nr as usize >= height || nc as usize >= width {
                    continue;
                }
                let j = nr as usize * width + nc as usize;
                if cells[j] == value {
                    uf.union(r * width + c, j);
                }
            }
        }
    }
    (0..cells.len())
        .filter(|&i| cells[i] == value && uf.find(i) == i)
        .count()
}

pub fn count_components(img: &BinaryImage, adjacency: Adjacency) -> usize {
    count_cells(
        img.cells(),
        img.width(),
        img.height(),
        true,
        adjacency == Adjacency::Eight,
    )
}

/// (foreground n-components, background n̄-components), with the
/// background counted on the image surrounded by a one-pixel background
/// frame so that everything outside is a single component.
pub fn signature(img: &BinaryImage, conn: ConnectivityPair) -> (usize, usize) {
    let (w, h) = (img.width(), img.height());
    let (pw, ph) = (w + 2, h + 2);
    let mut padded = vec![false; pw * ph];
    for r in 0..h {
        for c in 0..w {
            padded[(r + 1) * pw + c + 1] = img.pixel(r, c);
        }
    }
    (
        count_components(img, conn.foreground()),
        count_cells(&padded, pw, ph, false, conn.background() == Adjacency::Eight),
    )
}

/// Deletes `(r, c)` and reports whether both component counts survive.
pub fn recount_simple(img: &BinaryImage, r: usize, c: usize, conn: ConnectivityPair) -> bool {
    let before = signature(img, conn);
    let mut after = img.clone();
    after.set(r, c, false);
    signature(&after, conn) == before
}

/// Connectivity number by labeling the 3x3 neighborhood: the number of
/// `adjacency`-components of the set bits that contain a pixel
/// `adjacency`-adjacent to the center. Bits follow the row-major order
/// NW, N, NE, W, E, SW, S, SE.
pub fn brute_connectivity_number(bits: u8, adjacency: Adjacency) -> usize {
    const POS: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];
    let set: Vec<usize> = (0..8).filter(|&i| bits & (1 << i) != 0).collect();
    let adjacent = |a: (isize, isize), b: (isize, isize)| {
        let (dr, dc) = ((a.0 - b.0).abs(), (a.1 - b.1).abs());
        match adjacency {
            Adjacency::Four => dr + dc == 1,
            Adjacency::Eight => dr.max(dc) == 1,
        }
    };
    let mut label = [usize::MAX; 8];
    let mut next = 0;
    for &s in &set {
        if label[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        label[s] = next;
        while let Some(x) = stack.pop() {
            for &y in &set {
                if label[y] == usize::MAX && adjacent(POS[x], POS[y]) {
                    label[y] = next;
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    let mut touching: Vec<usize> = set
        .iter()
        .filter(|&&s| adjacent(POS[s], (0, 0)))
        .map(|&s| label[s])
        .collect();
    touching.sort_unstable();
    touching.dedup();
    touching.len()
}

/// Simpleness from the two connectivity numbers of the neighborhood.
pub fn brute_simple_pattern(bits: u8, conn: ConnectivityPair) -> bool {
    brute_connectivity_number(bits, conn.foreground()) == 1 && brute_connectivity_number(!bits, conn.background()) == 1
}

/// Dilation by stamping a disc of radius `r` on every foreground pixel.
pub fn stamp_dilate(img: &BinaryImage, r: u32) -> BinaryImage {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let r = r as i64;
    let mut out = BinaryImage::new(img.width(), img.height()).unwrap();
    for p in img.foreground() {
        for dr in -r..=r {
            for dc in -r..=r {
                let (nr, nc) = (p.row as i64 + dr, p.col as i64 + dc);
                if dr * dr + dc * dc <= r * r && (0..h).contains(&nr) && (0..w).contains(&nc) {
                    out.set(nr as usize, nc as usize, true);
                }
            }
        }
    }
    out
}

/// Deletes every unconstrained simple pixel at once, as a fully parallel
/// thinning step without any safeguard would.
pub fn delete_all_simple_at_once(img: &BinaryImage, conn: ConnectivityPair) -> BinaryImage {
    let mut out = img.clone();
    for p in img.foreground() {
        let (r, c) = (p.row as usize, p.col as usize);
        if recount_simple(img, r, c, conn) {
            out.set(r, c, false);
        }
    }
    out
}
