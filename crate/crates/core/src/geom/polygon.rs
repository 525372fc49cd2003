use super::affine::AffineFrame;
use super::point::Point;
use super::predicates::{orient, Orientation};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A strictly convex polygon with vertices in counterclockwise order.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon<T> {
    vertices: Vec<Point<T>>,
}

/// The part of a polygon touched by a supporting line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    Vertex(usize),
    /// Edge from vertex `i` to vertex `i + 1`.
    Edge(usize),
}

impl<T: Scalar> ConvexPolygon<T> {
    /// Builds a polygon from vertices in either orientation.
    ///
    /// Repeated and collinear vertices are dropped; anything that is not a
    /// strictly convex simple polygon afterwards is rejected.
    pub fn new(vertices: Vec<Point<T>>) -> Result<Self> {
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite polygon vertex".into()));
        }
        let mut vs: Vec<Point<T>> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if vs.last() != Some(&v) {
                vs.push(v);
            }
        }
        while vs.len() > 1 && vs.first() == vs.last() {
            vs.pop();
        }
        if vs.len() < 3 {
            return Err(Error::Degenerate("polygon needs three distinct vertices".into()));
        }
        if signed_area(&vs) < T::zero() {
            vs.reverse();
        }
        loop {
            let n = vs.len();
            if n < 3 {
                return Err(Error::Degenerate("polygon collapses to a segment".into()));
            }
            let drop = (0..n).find(|&i| {
                orient(vs[(i + n - 1) % n], vs[i], vs[(i + 1) % n]) == Orientation::Collinear
            });
            match drop {
                Some(i) => {
                    vs.remove(i);
                }
                None => break,
            }
        }
        let n = vs.len();
        for i in 0..n {
            let a = vs[i];
            let b = vs[(i + 1) % n];
            for (j, &v) in vs.iter().enumerate() {
                if j != i && j != (i + 1) % n && orient(a, b, v) != Orientation::CounterClockwise {
                    return Err(Error::InvalidInput("polygon is not strictly convex".into()));
                }
            }
        }
        Ok(ConvexPolygon { vertices: vs })
    }

    /// Convex hull of a point set.
    pub fn hull(points: &[Point<T>]) -> Result<Self> {
        let mut pts: Vec<Point<T>> = points.to_vec();
        if pts.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite hull point".into()));
        }
        pts.sort_by(|a, b| a.lex_cmp(b));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::Degenerate("hull needs three distinct points".into()));
        }
        let mut chain: Vec<Point<T>> = Vec::with_capacity(2 * pts.len());
        for pass in 0..2 {
            let start = chain.len();
            let iter: Box<dyn Iterator<Item = &Point<T>>> = if pass == 0 {
                Box::new(pts.iter())
            } else {
                Box::new(pts.iter().rev())
            };
            for &p in iter {
                while chain.len() >= start + 2
                    && orient(chain[chain.len() - 2], chain[chain.len() - 1], p) != Orientation::CounterClockwise
                {
                    chain.pop();
                }
                chain.push(p);
            }
            chain.pop();
        }
        ConvexPolygon::new(chain)
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Point<T> {
        self.vertices[i % self.vertices.len()]
    }

    pub fn edge(&self, i: usize) -> (Point<T>, Point<T>) {
        (self.vertex(i), self.vertex(i + 1))
    }

    pub fn area(&self) -> T {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Point<T> {
        let n = self.len();
        let mut cx = T::zero();
        let mut cy = T::zero();
        let mut a = T::zero();
        let o = self.vertices[0];
        for i in 1..n - 1 {
            let u = self.vertices[i] - o;
            let v = self.vertices[i + 1] - o;
            let w = u.cross(v);
            cx = cx + (u.x + v.x) * w;
            cy = cy + (u.y + v.y) * w;
            a = a + w;
        }
        o + Point::new(cx, cy) / (T::lit(3.0) * a)
    }

    pub fn diameter(&self) -> T {
        let mut d = T::zero();
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    /// Closed containment decided with exact orientation tests.
    pub fn contains(&self, p: Point<T>) -> bool {
        let n = self.len();
        (0..n).all(|i| orient(self.vertices[i], self.vertices[(i + 1) % n], p) != Orientation::Clockwise)
    }

    /// Signed distance from `p` to the line of edge `i`, positive inside.
    pub fn edge_distance(&self, i: usize, p: Point<T>) -> T {
        let (a, b) = self.edge(i);
        (b - a).cross(p - a) / (b - a).norm()
    }

    /// Smallest signed edge distance; the radius of the largest disk around
    /// `p` inside the polygon when positive.
    pub fn clearance(&self, p: Point<T>) -> T {
        (0..self.len())
            .map(|i| self.edge_distance(i, p))
            .fold(T::infinity(), T::min)
    }

    /// Maximum of `n . v` over the vertices, and the support attaining it.
    pub fn support(&self, n: Point<T>) -> (T, Support) {
        let vals: Vec<T> = self.vertices.iter().map(|v| n.dot(*v)).collect();
        let len = vals.len();
        let (imax, &best) = vals
            .iter()
            .enumerate()
            .fold((0, &vals[0]), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
        let scale = self
            .vertices
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), T::max)
            * n.norm();
        let tol = T::epsilon() * T::lit(64.0) * (scale + best.abs());
        let next = (imax + 1) % len;
        let prev = (imax + len - 1) % len;
        let support = if best - vals[next] <= tol {
            Support::Edge(imax)
        } else if best - vals[prev] <= tol {
            Support::Edge(prev)
        } else {
            Support::Vertex(imax)
        };
        (best, support)
    }

    /// Touch sets of the two tangent lines parallel to `d`.
    ///
    /// The first set lies on the side of smaller `perp(d) . x`.
    pub fn tangent_touch_sets(&self, d: Point<T>) -> Result<(Support, Support)> {
        if d.norm2() == T::zero() || !d.is_finite() {
            return Err(Error::InvalidInput("zero tangent direction".into()));
        }
        let n = d.perp();
        let (_, high) = self.support(n);
        let (_, low) = self.support(-n);
        Ok((low, high))
    }

    pub fn support_points(&self, s: Support) -> Vec<Point<T>> {
        match s {
            Support::Vertex(i) => vec![self.vertex(i)],
            Support::Edge(i) => vec![self.vertex(i), self.vertex(i + 1)],
        }
    }

    /// The vertex, or the midpoint of the edge.
    pub fn support_point(&self, s: Support) -> Point<T> {
        match s {
            Support::Vertex(i) => self.vertex(i),
            Support::Edge(i) => self.vertex(i).lerp(self.vertex(i + 1), T::lit(0.5)),
        }
    }

    /// Maximum-area triangle on the vertices, compared with a relative
    /// tolerance so that symmetric ties resolve to the smallest index triple.
    pub fn max_area_inscribed_triangle(&self) -> (usize, usize, usize) {
        let n = self.len();
        let tol = T::epsilon() * T::lit(64.0);
        let mut best = (0, 1, 2);
        let mut best_area = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let a = (self.vertices[j] - self.vertices[i])
                        .cross(self.vertices[k] - self.vertices[i]);
                    if a > best_area * (T::one() + tol) {
                        best_area = a;
                        best = (i, j, k);
                    }
                }
            }
        }
        best
    }

    /// Whether the closed disk of `radius` around `center` lies inside.
    pub fn ball_in_body(&self, center: Point<T>, radius: T) -> bool {
        self.contains(center) && self.clearance(center) >= radius
    }

    pub fn transform(&self, f: &AffineFrame<T>) -> Result<Self> {
        ConvexPolygon::new(self.vertices.iter().map(|v| f.apply(*v)).collect())
    }

    pub fn translate(&self, t: Point<T>) -> Self {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|v| *v + t).collect(),
        }
    }

    /// Vertices replaced without re-validation; callers keep convexity.
    pub(crate) fn from_trusted(vertices: Vec<Point<T>>) -> Self {
        ConvexPolygon { vertices }
    }

    pub fn cast<U: Scalar>(&self) -> ConvexPolygon<U> {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|v| v.cast()).collect(),
        }
    }
}

fn signed_area<T: Scalar>(vs: &[Point<T>]) -> T {
    let n = vs.len();
    let o = vs[0];
    let mut a = T::zero();
    for i in 1..n.saturating_sub(1) {
        a = a + (vs[i] - o).cross(vs[i + 1] - o);
    }
    a / T::lit(2.0)
}

/// Regular polygon with `k` vertices on the circle of `radius`.
pub fn regular_polygon<T: Scalar>(k: usize, radius: T, phase: T) -> ConvexPolygon<T> {
    let vs = (0..k)
        .map(|i| {
            let a = phase + T::lit(2.0) * T::PI() * T::lit(i as f64) / T::lit(k as f64);
            Point::new(radius * a.cos(), radius * a.sin())
        })
        .collect();
    ConvexPolygon::new(vs).expect("regular polygon is convex")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq() -> ConvexPolygon<f64> {
        ConvexPolygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_bad_input() {
        let line = vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(2.0, 2.0)];
        assert!(ConvexPolygon::new(line).is_err());
        let dart = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(4.0, 0.0),
            Point::new(2.0, 4.0),
        ];
        assert!(ConvexPolygon::new(dart).is_err());
        assert!(ConvexPolygon::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let p = ConvexPolygon::new(vec![
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 0.0),
        ])
        .unwrap();
        assert!(p.area() > 0.0);
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn unit_square_tangents() {
        let p = sq();
        let (lo, hi) = p.tangent_touch_sets(Point::new(1.0, 0.0)).unwrap();
        assert_eq!(p.support_points(lo), vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]);
        assert_eq!(p.support_points(hi), vec![Point::new(1.0, 1.0), Point::new(0.0, 1.0)]);
        let s = 0.5f64.sqrt();
        let (lo, hi) = p.tangent_touch_sets(Point::new(s, s)).unwrap();
        assert_eq!(p.support_points(lo), vec![Point::new(1.0, 0.0)]);
        assert_eq!(p.support_points(hi), vec![Point::new(0.0, 1.0)]);
    }

    #[test]
    fn square_max_triangle_tie_break() {
        let p = sq();
        assert_eq!(p.max_area_inscribed_triangle(), (0, 1, 2));
    }

    #[test]
    fn hexagon_max_triangle() {
        let h = regular_polygon(6, 1.0f64, 0.0);
        let (i, j, k) = h.max_area_inscribed_triangle();
        assert_eq!((i, j, k), (0, 2, 4));
        let a = (h.vertex(j) - h.vertex(i)).cross(h.vertex(k) - h.vertex(i)) / 2.0;
        assert!((a - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn ball_membership() {
        let p = sq();
        assert!(p.ball_in_body(Point::new(0.5, 0.5), 0.5));
        assert!(!p.ball_in_body(Point::new(0.5, 0.5), 0.5 + 1e-9));
        assert!(!p.ball_in_body(Point::new(2.0, 0.5), 0.0));
    }

    #[test]
    fn f32_polygon() {
        let p = regular_polygon(5, 2.0f32, 0.3);
        assert!(p.contains(Point::new(0.0, 0.0)));
        assert!((p.centroid().norm()) < 1e-5);
    }
}
