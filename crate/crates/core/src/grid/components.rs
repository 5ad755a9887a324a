use std::collections::VecDeque;

use super::{Adjacency, BinaryImage, ConnectivityPair};

/// Foreground component labels. Label 0 is background; components are
/// numbered from 1 in the raster order of their first pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub count: usize,
    pub connectivity: Adjacency,
}

impl ComponentLabeling {
    pub fn label(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }
}

/// Labels the `adjacency`-connected components of the foreground.
pub fn connected_components(img: &BinaryImage, adjacency: Adjacency) -> ComponentLabeling {
    let (w, h) = (img.width(), img.height());
    let cells = img.cells();
    let mut labels = vec![0u32; w * h];
    let mut count = 0usize;
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !cells[start] || labels[start] != 0 {
            continue;
        }
        count += 1;
        let label = count as u32;
        labels[start] = label;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (r, c) = ((i / w) as isize, (i % w) as isize);
            for &(dr, dc) in adjacency.offsets() {
                let (nr, nc) = (r + dr, c + dc);
                if img.get(nr, nc) {
                    let j = nr as usize * w + nc as usize;
                    if labels[j] == 0 {
                        labels[j] = label;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    ComponentLabeling {
        width: w,
        height: h,
        labels,
        count,
        connectivity: adjacency,
    }
}

/// Component counts that a topology-preserving transform must keep fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TopologySignature {
    /// n-components of the foreground.
    pub foreground: usize,
    /// n̄-components of the background, where everything outside the frame is
    /// one background region connected to every border background pixel.
    pub background: usize,
}

/// Counts foreground n-components and background n̄-components of `img`.
pub fn topology_of(img: &BinaryImage, conn: ConnectivityPair) -> TopologySignature {
    let foreground = connected_components(img, conn.foreground()).count;
    // A one-pixel background frame stands in for the unbounded outside.
    let padded = BinaryImage::from_fn(img.width() + 2, img.height() + 2, |r, c| {
        r == 0 || c == 0 || !img.get(r as isize - 1, c as isize - 1)
    })
    .expect("padded image is non-empty");
    let background = connected_components(&padded, conn.background()).count;
    TopologySignature { foreground, background }
}
