use super::{SquaredDistanceMap, Target};
use crate::grid::BinaryImage;

const FAR: u32 = u32::MAX / 4;

#[derive(Clone, Copy)]
struct Offset {
    dr: u32,
    dc: u32,
}

impl Offset {
    const NONE: Offset = Offset { dr: FAR, dc: FAR };

    #[inline]
    fn norm(self) -> u64 {
        let (r, c) = (self.dr as u64, self.dc as u64);
        r * r + c * c
    }

    #[inline]
    fn step_row(self) -> Offset {
        Offset {
            dr: self.dr.saturating_add(1).min(FAR),
            dc: self.dc,
        }
    }

    #[inline]
    fn step_col(self) -> Offset {
        Offset {
            dr: self.dr,
            dc: self.dc.saturating_add(1).min(FAR),
        }
    }

    fn is_none(self) -> bool {
        self.dr >= FAR || self.dc >= FAR
    }
}

#[inline]
fn relax(cell: &mut Offset, candidate: Offset) {
    if candidate.norm() < cell.norm() {
        *cell = candidate;
    }
}

/// Danielsson's four-point sequential EDT.
///
/// Each pixel carries the offset to its presumed nearest target. A forward
/// pass propagates offsets down the image (from the row above, then along the
/// row in both directions) and a backward pass does the same upwards. Only the
/// four edge neighbors are consulted, which is why a few pixels end up with a
/// slightly too large distance.
pub fn sed4(img: &BinaryImage, target: Target) -> SquaredDistanceMap {
    let (w, h) = (img.width(), img.height());
    let mut v: Vec<Offset> = img
        .cells()
        .iter()
        .map(|&b| {
            if target.selects(b) {
                Offset { dr: 0, dc: 0 }
            } else {
                Offset::NONE
            }
        })
        .collect();

    let sweep_row = |v: &mut [Offset], r: usize| {
        let row = &mut v[r * w..(r + 1) * w];
        for c in 1..w {
            let cand = row[c - 1].step_col();
            relax(&mut row[c], cand);
        }
        for c in (0..w.saturating_sub(1)).rev() {
            let cand = row[c + 1].step_col();
            relax(&mut row[c], cand);
        }
    };

    for r in 0..h {
        if r > 0 {
            for c in 0..w {
                let cand = v[(r - 1) * w + c].step_row();
                relax(&mut v[r * w + c], cand);
            }
        }
        sweep_row(&mut v, r);
    }
    for r in (0..h).rev() {
        if r + 1 < h {
            for c in 0..w {
                let cand = v[(r + 1) * w + c].step_row();
                relax(&mut v[r * w + c], cand);
            }
        }
        sweep_row(&mut v, r);
    }

    let inf = SquaredDistanceMap::inf_for(w, h);
    let values = v
        .into_iter()
        .map(|o| if o.is_none() { inf } else { o.norm().min(inf) })
        .collect();
    SquaredDistanceMap::from_values(w, h, values)
}
