//! Rational self-maps of `P^1` over finite fields and their periodic points.

mod expr;
pub mod intpoly;
pub mod map;
pub mod periodic;
pub mod scan;

use thiserror::Error;

use crate::field::FieldError;

pub use map::{FieldMap, HomPoly, Mobius, ProjPoint, RationalMap};
pub use periodic::{
    image_size, periodic_points_graph, periodic_points_iterate, FunctionalGraph, PointIndex,
};
pub use scan::{format_half_even, horizontal_scan, vertical_scan, HorizontalScan, ProportionRow, ProportionTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("map parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("map has bad reduction at p = {p}")]
    BadReduction { p: u64 },
    #[error("map is constant")]
    Constant,
    #[error("prime range is empty")]
    EmptyRange,
    #[error(transparent)]
    Field(#[from] FieldError),
}
