//! Dilation and erosion by closed Euclidean balls, by thresholding exact
//! squared distance maps.
//!
//! The plane outside the frame is background, so erosion eats into shapes
//! that touch the border.

use crate::edt::{SquaredDistanceMap, Target};
use crate::grid::BinaryImage;
use crate::homotopy::{Engine, Sequential};

/// Ball radius in pixels. Balls are closed: `B_r(x) = { y : |y − x| ≤ r }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Radius(pub u32);

impl Radius {
    pub fn squared(self) -> u64 {
        let r = self.0 as u64;
        r * r
    }
}

impl From<u32> for Radius {
    fn from(r: u32) -> Self {
        Radius(r)
    }
}

/// Squared distance from every pixel to the nearest background point of the
/// plane, counting the outside of the frame. Never INF.
pub fn background_distance<E: Engine + ?Sized>(engine: &E, img: &BinaryImage) -> SquaredDistanceMap {
    let mut map = engine.distance_map(img, Target::Background);
    let (w, h) = (img.width() as u64, img.height() as u64);
    map.min_with(|r, c| {
        let (r, c) = (r as u64, c as u64);
        let d = (r + 1).min(h - r).min(c + 1).min(w - c);
        d * d
    });
    map
}

pub(crate) fn threshold(map: &SquaredDistanceMap, keep: impl Fn(u64) -> bool) -> BinaryImage {
    BinaryImage::from_cells(
        map.width(),
        map.height(),
        map.values().iter().map(|&v| keep(v)).collect(),
    )
    .expect("map dimensions are positive")
}

/// Foreground of the result: pixels within `r` of the foreground of `img`.
pub fn dilate(img: &BinaryImage, r: Radius) -> BinaryImage {
    dilate_with(&Sequential, img, r)
}

pub fn dilate_with<E: Engine + ?Sized>(engine: &E, img: &BinaryImage, r: Radius) -> BinaryImage {
    let r2 = r.squared();
    threshold(&engine.distance_map(img, Target::Foreground), |d| d <= r2)
}

/// Foreground pixels farther than `r` from every background point.
pub fn erode(img: &BinaryImage, r: Radius) -> BinaryImage {
    erode_with(&Sequential, img, r)
}

pub fn erode_with<E: Engine + ?Sized>(engine: &E, img: &BinaryImage, r: Radius) -> BinaryImage {
    let r2 = r.squared();
    threshold(&background_distance(engine, img), |d| d > r2)
}

/// Plain morphological alternating sequential filter: opening then closing
/// at radii 1 to `radius`. Unlike the homotopic filter it can change topology.
pub fn asf(img: &BinaryImage, radius: u32) -> BinaryImage {
    let mut current = img.clone();
    for r in 1..=radius {
        let r = Radius(r);
        current = dilate(&erode(&current, r), r);
        current = erode(&dilate(&current, r), r);
    }
    current
}
