use thiserror::Error;

use crate::grid::Point;

/// Errors raised by the library's public operations.
///
/// Everything here is a usage error: the caller handed in arguments that
/// break an operation's preconditions. Decoding errors live in
/// [`crate::netpbm::DecodeError`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("point ({}, {}) lies outside the {width}x{height} image", .point.row, .point.col)]
    OutOfBounds { point: Point, width: usize, height: usize },

    #[error("point ({}, {}) must be foreground", .0.row, .0.col)]
    NotForeground(Point),

    #[error("point ({}, {}) must be background", .0.row, .0.col)]
    NotBackground(Point),

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("constraint violated: {0}")]
    Constraint(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
