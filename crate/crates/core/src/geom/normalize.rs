use super::affine::AffineFrame;
use super::point::Point;
use super::polygon::{ConvexPolygon, Support};
use crate::error::Result;
use crate::scalar::Scalar;

/// Vertices of the canonical inscribed triangle: `p1 = (0, -1)` and its
/// rotations by a third of a turn, counterclockwise.
pub fn canonical_triangle<T: Scalar>() -> [Point<T>; 3] {
    let h = T::lit(3.0).sqrt() / T::lit(2.0);
    let half = T::lit(0.5);
    [
        Point::new(T::zero(), -T::one()),
        Point::new(h, half),
        Point::new(-h, half),
    ]
}

/// A tangent pair parallel to one side of the inscribed triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentPair<T> {
    /// Direction of both lines.
    pub direction: Point<T>,
    /// Touch set through the triangle vertex.
    pub near: Support,
    /// Touch set on the opposite side.
    pub far: Support,
    /// Representative far touch point.
    pub q: Point<T>,
}

/// A convex body in the frame where its maximum-area inscribed triangle is
/// the canonical equilateral triangle centred at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedBody<T> {
    pub polygon: ConvexPolygon<T>,
    /// Original coordinates to canonical ones.
    pub frame: AffineFrame<T>,
    pub tin: [Point<T>; 3],
    /// Vertex indices of `tin` in `polygon`.
    pub tin_index: [usize; 3],
    pub tangents: [TangentPair<T>; 3],
}

impl<T: Scalar> NormalizedBody<T> {
    pub fn p(&self, i: usize) -> Point<T> {
        self.tin[i % 3]
    }

    pub fn q(&self, i: usize) -> Point<T> {
        self.tangents[i % 3].q
    }

    /// Whether every vertex satisfies `u_i . v <= 1 + tol`, i.e. lies in the
    /// outer triangle whose sides pass through `p_i` parallel to the opposite side.
    pub fn inside_outer_triangle(&self, tol: T) -> bool {
        self.polygon
            .vertices()
            .iter()
            .all(|v| self.tin.iter().all(|u| u.dot(*v) <= T::one() + tol))
    }
}

/// Maps `poly` to its canonical frame.
pub fn normalize_body<T: Scalar>(poly: &ConvexPolygon<T>) -> Result<NormalizedBody<T>> {
    let (i, j, k) = poly.max_area_inscribed_triangle();
    let canon = canonical_triangle::<T>();
    let frame = AffineFrame::from_triangles([poly.vertex(i), poly.vertex(j), poly.vertex(k)], canon)?;
    let mut vs: Vec<Point<T>> = poly.vertices().iter().map(|v| frame.apply(*v)).collect();
    vs[i] = canon[0];
    vs[j] = canon[1];
    vs[k] = canon[2];
    let polygon = ConvexPolygon::from_trusted(vs);
    let tangents = [0, 1, 2].map(|m| {
        let u = canon[m];
        let (_, near) = polygon.support(u);
        let (_, far) = polygon.support(-u);
        TangentPair {
            direction: u.perp(),
            near,
            far,
            q: polygon.support_point(far),
        }
    });
    Ok(NormalizedBody {
        polygon,
        frame,
        tin: canon,
        tin_index: [i, j, k],
        tangents,
    })
}
