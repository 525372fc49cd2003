//! Online hitting sets for bottomless rectangles, disks and homothets of a
//! convex polygon.

pub mod body_shape;
pub mod canonical;
pub mod error;
pub mod geom;
pub mod harness;
pub mod hull;
pub mod lattice;
pub mod online;
pub mod oracle;
pub mod scalar;
pub mod separated;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Point = geom::Point<f64>;
pub type ConvexPolygon = geom::ConvexPolygon<f64>;
pub type AffineFrame = geom::AffineFrame<f64>;
pub type NormalizedBody = geom::NormalizedBody<f64>;
