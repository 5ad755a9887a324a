use hasf::edt::{meijster, Target};
use hasf::grid::{BinaryImage, ConnectivityPair};
use hasf::homotopy::{cutting, filling, hasf, thicken, thin, ConstraintSets, Engine, Sequential, SmoothingParams};
use hasf::morph::{background_distance, Radius};
use hasf_oracles::{random_image, random_shapes, rng, signature};
use proptest::prelude::*;

const PAIRS: [ConnectivityPair; 2] = [ConnectivityPair::Fg8Bg4, ConnectivityPair::Fg4Bg8];

fn shapes(max: usize) -> impl Strategy<Value = BinaryImage> {
    (4..=max, 4..=max, any::<u64>()).prop_map(|(w, h, seed)| random_shapes(&mut rng(seed), w, h))
}

/// No pixel of `out` outside `frozen` can be flipped without changing the
/// component counts.
fn brute_stable(out: &BinaryImage, frozen: &BinaryImage, conn: ConnectivityPair) -> bool {
    let before = signature(out, conn);
    (0..out.height()).all(|r| {
        (0..out.width()).all(|c| {
            if frozen.pixel(r, c) {
                return true;
            }
            let mut flipped = out.clone();
            flipped.set(r, c, !out.pixel(r, c));
            signature(&flipped, conn) != before
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn thinning_is_sandwiched_stable_and_homotopic(z in shapes(20), seed in any::<u64>()) {
        let w = z.intersection(&random_image(&mut rng(seed), z.width(), z.height(), 0.05)).unwrap();
        for conn in PAIRS {
            let dmap = background_distance(&Sequential, &z);
            let out = thin(&z, &w, &dmap, conn, None).unwrap();
            prop_assert!(w.is_subset_of(&out).unwrap() && out.is_subset_of(&z).unwrap());
            prop_assert_eq!(signature(&out, conn), signature(&z, conn));
            // Only foreground pixels may flip: freeze the background and W.
            prop_assert!(brute_stable(&out, &out.complement().union(&w).unwrap(), conn));
        }
    }

    #[test]
    fn thickening_is_sandwiched_stable_and_homotopic(y in shapes(20), seed in any::<u64>()) {
        let v = y.union(&random_image(&mut rng(seed), y.width(), y.height(), 0.6)).unwrap();
        for conn in PAIRS {
            let out = thicken(&y, &v, conn, None).unwrap();
            prop_assert!(y.is_subset_of(&out).unwrap() && out.is_subset_of(&v).unwrap());
            prop_assert_eq!(signature(&out, conn), signature(&y, conn));
            prop_assert!(brute_stable(&out, &out.union(&v.complement()).unwrap(), conn));
        }
    }

    /// With a foreground frame no candidate sees the outside, and thickening
    /// is exactly thinning of the complement under the dual pair.
    #[test]
    fn thickening_is_dual_thinning(y in shapes(20), seed in any::<u64>()) {
        let (w, h) = (y.width(), y.height());
        let framed = BinaryImage::from_fn(w, h, |r, c| {
            r == 0 || c == 0 || r == h - 1 || c == w - 1 || y.pixel(r, c)
        }).unwrap();
        let v = framed.union(&random_image(&mut rng(seed), w, h, 0.7)).unwrap();
        for conn in PAIRS {
            let direct = thicken(&framed, &v, conn, None).unwrap();
            let order = meijster(&framed, Target::Foreground, 1);
            let dual = thin(&framed.complement(), &v.complement(), &order, conn.dual(), None).unwrap();
            prop_assert_eq!(direct, dual.complement());
        }
    }

    #[test]
    fn cutting_and_filling_keep_their_sides(x in shapes(24), r in 1u32..4, seed in any::<u64>()) {
        let noise = random_image(&mut rng(seed), x.width(), x.height(), 0.03);
        let c = x.intersection(&noise).unwrap();
        let d = noise.difference(&x).unwrap();
        for conn in PAIRS {
            let cut = cutting(&x, Radius(r), &c, conn).unwrap();
            prop_assert!(c.is_subset_of(&cut).unwrap() && cut.is_subset_of(&x).unwrap());
            prop_assert_eq!(signature(&cut, conn), signature(&x, conn));

            let filled = filling(&x, Radius(r), &d, conn).unwrap();
            prop_assert!(x.is_subset_of(&filled).unwrap() && filled.is_disjoint_from(&d).unwrap());
            prop_assert_eq!(signature(&filled, conn), signature(&x, conn));
        }
    }

    #[test]
    fn hasf_preserves_topology(x in shapes(32), r in 1u32..4) {
        for conn in PAIRS {
            let out = hasf(&x, &SmoothingParams::new(r).with_conn(conn)).unwrap();
            prop_assert_eq!(signature(&out, conn), signature(&x, conn));
        }
    }

    #[test]
    fn constrained_hasf_respects_both_sets(x in shapes(24), seed in any::<u64>()) {
        let noise = random_image(&mut rng(seed), x.width(), x.height(), 0.05);
        let constraints = ConstraintSets {
            keep: x.intersection(&noise).unwrap(),
            exclude: noise.difference(&x).unwrap(),
        };
        let params = SmoothingParams::new(2).with_constraints(constraints.clone());
        let out = hasf(&x, &params).unwrap();
        prop_assert!(constraints.keep.is_subset_of(&out).unwrap());
        prop_assert!(constraints.exclude.is_disjoint_from(&out).unwrap());
        prop_assert_eq!(signature(&out, params.conn), signature(&x, params.conn));
    }
}

#[test]
fn sequential_engine_distance_map_is_meijster() {
    let x = random_shapes(&mut rng(5), 40, 30);
    assert_eq!(
        Sequential.distance_map(&x, Target::Background),
        meijster(&x, Target::Background, 1)
    );
}

#[test]
fn smoothing_shortens_the_boundary() {
    let x = hasf_oracles::crenellated(&mut rng(6), 80, 3);
    let out = hasf(&x, &SmoothingParams::new(3)).unwrap();
    assert!(out.boundary_length() < x.boundary_length());
    assert_eq!(
        signature(&out, ConnectivityPair::Fg8Bg4),
        signature(&x, ConnectivityPair::Fg8Bg4)
    );
}
