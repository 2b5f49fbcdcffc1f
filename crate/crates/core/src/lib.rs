//! Symbolic and numeric verification of linear and IM 2-forms on Lie
//! algebroids.

// Coordinate formulas index several arrays with the same subscripts.
#![allow(clippy::needless_range_loop)]

pub mod algebroid;
pub mod cartan;
pub mod catalog;
pub mod imform;
pub mod problem;
pub mod random;
pub mod report;
pub mod scalar;
pub mod symexpr;
pub mod tanlift;

pub use cartan::{Chart, ChartMap, KForm, VField};
pub use scalar::Scalar;
pub use symexpr::{parse, Expr, Point, Poly, Rational};

pub type Point64 = Point<f64>;
pub type Point32 = Point<f32>;
