//! Topology-preserving smoothing of binary images.
//!
//! The crate provides exact squared Euclidean distance transforms
//! ([`edt::meijster`], with a brute-force and a 4SED baseline), ball
//! morphology ([`morph`]), homotopic thinning, thickening and the homotopic
//! alternating sequential filter ([`homotopy`]), and a parallel runtime that
//! runs all of it on a fixed worker pool ([`runtime`]).
//!
//! ```
//! use hasf::grid::{topology_of, BinaryImage, ConnectivityPair};
//! use hasf::homotopy::{hasf, SmoothingParams};
//!
//! let x = BinaryImage::from_ascii(
//!     "
//!     ..........
//!     .########.
//!     .#......#.
//!     .#.####.#.
//!     .#......#.
//!     .########.
//!     ..........
//!     ",
//! )
//! .unwrap();
//! let y = hasf(&x, &SmoothingParams::new(2)).unwrap();
//! let conn = ConnectivityPair::default();
//! assert_eq!(topology_of(&x, conn), topology_of(&y, conn));
//! ```

pub mod edt;
pub mod error;
pub mod grid;
pub mod homotopy;
pub mod morph;
pub mod netpbm;
pub mod runtime;
pub mod verify;

pub use error::{Error, Result};
