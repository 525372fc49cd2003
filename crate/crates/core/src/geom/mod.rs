//! Planar primitives, generic over the coordinate type.

pub mod affine;
pub mod normalize;
pub mod point;
pub mod polygon;
pub mod predicates;

pub use affine::AffineFrame;
pub use normalize::{canonical_triangle, normalize_body, NormalizedBody, TangentPair};
pub use point::{angle_between, line_angle, Point};
pub use polygon::{regular_polygon, ConvexPolygon, Support};
pub use predicates::{orient, Orientation};
