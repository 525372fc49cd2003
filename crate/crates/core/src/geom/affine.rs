use super::point::Point;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `x -> M x + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineFrame<T> {
    pub m: [[T; 2]; 2],
    pub t: Point<T>,
}

impl<T: Scalar> AffineFrame<T> {
    pub fn identity() -> Self {
        AffineFrame {
            m: [[T::one(), T::zero()], [T::zero(), T::one()]],
            t: Point::origin(),
        }
    }

    pub fn new(m: [[T; 2]; 2], t: Point<T>) -> Self {
        AffineFrame { m, t }
    }

    /// Rotation taking the unit vector `d` to `(1, 0)`, after shifting `anchor` to the origin.
    pub fn aligning(anchor: Point<T>, d: Point<T>) -> Self {
        let m = [[d.x, d.y], [-d.y, d.x]];
        let lin = AffineFrame { m, t: Point::origin() };
        AffineFrame { m, t: -lin.apply_vec(anchor) }
    }

    /// The map sending `src[k]` to `dst[k]` for k = 0, 1, 2.
    pub fn from_triangles(src: [Point<T>; 3], dst: [Point<T>; 3]) -> Result<Self> {
        let s = AffineFrame::basis(src[1] - src[0], src[2] - src[0]);
        let s_inv = s.inverse()?;
        let d = AffineFrame::basis(dst[1] - dst[0], dst[2] - dst[0]);
        let lin = d.compose(&s_inv);
        let t = dst[0] - lin.apply_vec(src[0]);
        Ok(AffineFrame { m: lin.m, t })
    }

    fn basis(u: Point<T>, v: Point<T>) -> Self {
        AffineFrame {
            m: [[u.x, v.x], [u.y, v.y]],
            t: Point::origin(),
        }
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply_vec(&self, v: Point<T>) -> Point<T> {
        Point::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    pub fn apply(&self, p: Point<T>) -> Point<T> {
        self.apply_vec(p) + self.t
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Self {
        let a = &self.m;
        let b = &other.m;
        let m = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        AffineFrame { m, t: self.apply(other.t) }
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det == T::zero() || !det.is_finite() {
            return Err(Error::Degenerate("singular affine map".into()));
        }
        let m = [
            [self.m[1][1] / det, -self.m[0][1] / det],
            [-self.m[1][0] / det, self.m[0][0] / det],
        ];
        let lin = AffineFrame { m, t: Point::origin() };
        Ok(AffineFrame { m, t: -lin.apply_vec(self.t) })
    }
}
