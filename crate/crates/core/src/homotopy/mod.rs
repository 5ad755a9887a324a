//! Topology-preserving transforms: constrained thinning and thickening,
//! homotopic cutting and filling, and the alternating sequential filter built
//! from them.
//!
//! The functions here are the sequential reference. They are written against
//! the [`Engine`] trait so the same composition runs on the parallel engine in
//! [`crate::runtime`].

pub(crate) mod engine;

use crate::edt::{meijster, SquaredDistanceMap, Target};
use crate::error::{Error, Result};
use crate::grid::{BinaryImage, ConnectivityPair, Point};
use crate::morph::{background_distance, threshold, Radius};

pub use engine::Polarity;
use engine::{remaining_flippable, run_sequential, StabilityProblem};

/// Backend for the distance maps and stability loops of a smoothing run.
///
/// Inputs are validated by the caller: `w ⊆ z` for `thin`, `y ⊆ v` for
/// `thicken`, and every map matches the image shape.
pub trait Engine {
    fn distance_map(&self, img: &BinaryImage, target: Target) -> SquaredDistanceMap;

    /// Deletes simple points of `z` outside `w`, lowest `dmap` first, until
    /// none is left.
    fn thin(
        &self,
        z: &BinaryImage,
        w: &BinaryImage,
        dmap: &SquaredDistanceMap,
        conn: ConnectivityPair,
        max_iter: Option<usize>,
    ) -> BinaryImage;

    /// Adds addable points of `v` to `y`, lowest `dmap` first, until none is
    /// left.
    fn thicken(
        &self,
        y: &BinaryImage,
        v: &BinaryImage,
        dmap: &SquaredDistanceMap,
        conn: ConnectivityPair,
        max_iter: Option<usize>,
    ) -> BinaryImage;
}

impl<E: Engine + ?Sized> Engine for &E {
    fn distance_map(&self, img: &BinaryImage, target: Target) -> SquaredDistanceMap {
        (**self).distance_map(img, target)
    }

    fn thin(
        &self,
        z: &BinaryImage,
        w: &BinaryImage,
        dmap: &SquaredDistanceMap,
        conn: ConnectivityPair,
        max_iter: Option<usize>,
    ) -> BinaryImage {
        (**self).thin(z, w, dmap, conn, max_iter)
    }

    fn thicken(
        &self,
        y: &BinaryImage,
        v: &BinaryImage,
        dmap: &SquaredDistanceMap,
        conn: ConnectivityPair,
        max_iter: Option<usize>,
    ) -> BinaryImage {
        (**self).thicken(y, v, dmap, conn, max_iter)
    }
}

/// Single-threaded reference engine.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Engine for Sequential {
    fn distance_map(&self, img: &BinaryImage, target: Target) -> SquaredDistanceMap {
        meijster(img, target, 1)
    }

    fn thin(
        &self,
        z: &BinaryImage,
        w: &BinaryImage,
        dmap: &SquaredDistanceMap,
        conn: ConnectivityPair,
        max_iter: Option<usize>,
    ) -> BinaryImage {
        let mut out = z.clone();
        run_sequential(
            &mut out,
            &StabilityProblem {
                polarity: Polarity::Remove,
                frozen: w.cells(),
                priority: dmap,
                conn,
                max_iter,
            },
        );
        out
    }

    fn thicken(
        &self,
        y: &BinaryImage,
        v: &BinaryImage,
        dmap: &SquaredDistanceMap,
        conn: ConnectivityPair,
        max_iter: Option<usize>,
    ) -> BinaryImage {
        let outside = v.complement();
        let mut out = y.clone();
        run_sequential(
            &mut out,
            &StabilityProblem {
                polarity: Polarity::Add,
                frozen: outside.cells(),
                priority: dmap,
                conn,
                max_iter,
            },
        );
        out
    }
}

fn check_map(img: &BinaryImage, dmap: &SquaredDistanceMap) -> Result<()> {
    if (img.width(), img.height()) != (dmap.width(), dmap.height()) {
        return Err(Error::DimensionMismatch(
            img.width(),
            img.height(),
            dmap.width(),
            dmap.height(),
        ));
    }
    Ok(())
}

/// Ultimate skeleton of `z` constrained by `w` (H(Z, W)).
///
/// `dmap` orders the candidates; it is normally the squared distance of each
/// pixel to the background of `z` and is not refreshed as pixels go.
pub fn thin(
    z: &BinaryImage,
    w: &BinaryImage,
    dmap: &SquaredDistanceMap,
    conn: ConnectivityPair,
    max_iter: Option<usize>,
) -> Result<BinaryImage> {
    check_map(z, dmap)?;
    if !w.is_subset_of(z)? {
        return Err(Error::Constraint("thinning constraint W must be a subset of Z"));
    }
    Ok(Sequential.thin(z, w, dmap, conn, max_iter))
}

/// Homotopic thickening of `y` inside `v` (*H(Y, V)), closest pixels first.
pub fn thicken(
    y: &BinaryImage,
    v: &BinaryImage,
    conn: ConnectivityPair,
    max_iter: Option<usize>,
) -> Result<BinaryImage> {
    if !y.is_subset_of(v)? {
        return Err(Error::Constraint("thickening input Y must be a subset of V"));
    }
    let dmap = Sequential.distance_map(y, Target::Foreground);
    Ok(Sequential.thicken(y, v, &dmap, conn, max_iter))
}

/// Unconstrained foreground pixels of `img` that are still simple.
pub fn deletable_pixels(img: &BinaryImage, w: &BinaryImage, conn: ConnectivityPair) -> Result<Vec<Point>> {
    img.same_shape(w)?;
    let dummy = SquaredDistanceMap::from_values(img.width(), img.height(), vec![0; img.len()]);
    let problem = StabilityProblem {
        polarity: Polarity::Remove,
        frozen: w.cells(),
        priority: &dummy,
        conn,
        max_iter: None,
    };
    Ok(to_points(img, remaining_flippable(img, &problem)))
}

/// Background pixels of `img` inside `v` whose addition preserves topology.
pub fn addable_pixels(img: &BinaryImage, v: &BinaryImage, conn: ConnectivityPair) -> Result<Vec<Point>> {
    img.same_shape(v)?;
    let outside = v.complement();
    let dummy = SquaredDistanceMap::from_values(img.width(), img.height(), vec![0; img.len()]);
    let problem = StabilityProblem {
        polarity: Polarity::Add,
        frozen: outside.cells(),
        priority: &dummy,
        conn,
        max_iter: None,
    };
    Ok(to_points(img, remaining_flippable(img, &problem)))
}

fn to_points(img: &BinaryImage, idx: Vec<usize>) -> Vec<Point> {
    let w = img.width();
    idx.into_iter()
        .map(|i| Point::new((i / w) as isize, (i % w) as isize))
        .collect()
}

/// Optional geometric constraints of the filter: `keep` (C ⊆ X) is never
/// removed by cutting and `exclude` (D ⊆ X̄) is never added by filling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSets {
    pub keep: BinaryImage,
    pub exclude: BinaryImage,
}

impl ConstraintSets {
    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Ok(ConstraintSets {
            keep: BinaryImage::new(width, height)?,
            exclude: BinaryImage::new(width, height)?,
        })
    }

    pub fn validate(&self, x: &BinaryImage) -> Result<()> {
        if !self.keep.is_subset_of(x)? {
            return Err(Error::Constraint("cutting constraint C must be a subset of X"));
        }
        if !self.exclude.is_disjoint_from(x)? {
            return Err(Error::Constraint("filling constraint D must not meet X"));
        }
        Ok(())
    }
}

/// Parameters of [`hasf`] and its parallel counterpart.
#[derive(Debug, Clone)]
pub struct SmoothingParams {
    /// Largest ball radius (the filter order). Zero is the identity.
    pub radius: u32,
    pub conn: ConnectivityPair,
    pub constraints: Option<ConstraintSets>,
    /// Used by the parallel engine only.
    pub workers: usize,
    /// Round limit for each stability loop; `None` runs to stability.
    pub max_iter: Option<usize>,
}

impl SmoothingParams {
    pub fn new(radius: u32) -> Self {
        SmoothingParams {
            radius,
            conn: ConnectivityPair::default(),
            constraints: None,
            workers: 1,
            max_iter: None,
        }
    }

    pub fn with_conn(mut self, conn: ConnectivityPair) -> Self {
        self.conn = conn;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_constraints(mut self, constraints: ConstraintSets) -> Self {
        self.constraints = Some(constraints);
        self
    }
}

/// Homotopic cutting (opening-like): thin `x` down to its erosion plus `c`,
/// then grow the result back inside its dilation, without leaving `x`.
pub fn cutting(x: &BinaryImage, r: Radius, c: &BinaryImage, conn: ConnectivityPair) -> Result<BinaryImage> {
    cutting_with(&Sequential, x, r, c, conn, None)
}

pub fn cutting_with<E: Engine + ?Sized>(
    engine: &E,
    x: &BinaryImage,
    r: Radius,
    c: &BinaryImage,
    conn: ConnectivityPair,
    max_iter: Option<usize>,
) -> Result<BinaryImage> {
    if !c.is_subset_of(x)? {
        return Err(Error::Constraint("cutting constraint C must be a subset of X"));
    }
    let r2 = r.squared();
    let to_background = background_distance(engine, x);
    let inner = threshold(&to_background, |d| d > r2).union(c)?;
    let y = engine.thin(x, &inner, &to_background, conn, max_iter);

    let to_y = engine.distance_map(&y, Target::Foreground);
    let v = threshold(&to_y, |d| d <= r2).intersection(x)?;
    Ok(engine.thicken(&y, &v, &to_y, conn, max_iter))
}

/// Homotopic filling (closing-like): grow `x` into its dilation minus `d`,
/// then thin the result back down to its erosion plus `x`.
pub fn filling(x: &BinaryImage, r: Radius, d: &BinaryImage, conn: ConnectivityPair) -> Result<BinaryImage> {
    filling_with(&Sequential, x, r, d, conn, None)
}

pub fn filling_with<E: Engine + ?Sized>(
    engine: &E,
    x: &BinaryImage,
    r: Radius,
    d: &BinaryImage,
    conn: ConnectivityPair,
    max_iter: Option<usize>,
) -> Result<BinaryImage> {
    if !d.is_disjoint_from(x)? {
        return Err(Error::Constraint("filling constraint D must not meet X"));
    }
    let r2 = r.squared();
    let to_x = engine.distance_map(x, Target::Foreground);
    let v = threshold(&to_x, |dist| dist <= r2).difference(d)?;
    let z = engine.thicken(x, &v, &to_x, conn, max_iter);

    let to_background = background_distance(engine, &z);
    let w = threshold(&to_background, |dist| dist > r2).union(x)?;
    Ok(engine.thin(&z, &w, &to_background, conn, max_iter))
}

/// Homotopic alternating sequential filter: cutting then filling at radii
/// 1, 2, …, `params.radius`.
pub fn hasf(x: &BinaryImage, params: &SmoothingParams) -> Result<BinaryImage> {
    hasf_with(&Sequential, x, params)
}

pub fn hasf_with<E: Engine + ?Sized>(engine: &E, x: &BinaryImage, params: &SmoothingParams) -> Result<BinaryImage> {
    let constraints = match &params.constraints {
        Some(c) => c.clone(),
        None => ConstraintSets::empty(x.width(), x.height())?,
    };
    constraints.validate(x)?;
    let mut current = x.clone();
    for r in 1..=params.radius {
        let r = Radius(r);
        current = cutting_with(engine, &current, r, &constraints.keep, params.conn, params.max_iter)?;
        current = filling_with(engine, &current, r, &constraints.exclude, params.conn, params.max_iter)?;
    }
    Ok(current)
}

/// Parts removed by smoothing (salient) and parts added (carved), in that order.
pub fn salient_parts(x: &BinaryImage, smoothed: &BinaryImage) -> Result<(BinaryImage, BinaryImage)> {
    Ok((x.difference(smoothed)?, smoothed.difference(x)?))
}
