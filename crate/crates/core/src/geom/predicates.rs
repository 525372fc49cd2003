//! Exact orientation test.
//!
//! A floating-point filter answers almost every query; ambiguous cases are
//! decided by summing the error-free expansion of the full determinant.

use super::point::Point;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

impl Orientation {
    pub fn sign(self) -> i32 {
        match self {
            Orientation::Clockwise => -1,
            Orientation::Collinear => 0,
            Orientation::CounterClockwise => 1,
        }
    }

    fn from_sign<T: Scalar>(v: T) -> Self {
        if v > T::zero() {
            Orientation::CounterClockwise
        } else if v < T::zero() {
            Orientation::Clockwise
        } else {
            Orientation::Collinear
        }
    }
}

fn two_sum<T: Scalar>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bv = s - a;
    let av = s - bv;
    (s, (a - av) + (b - bv))
}

fn two_product<T: Scalar>(a: T, b: T) -> (T, T) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn grow_expansion<T: Scalar>(e: &mut Vec<T>, b: T) {
    let mut q = b;
    let mut out = Vec::with_capacity(e.len() + 1);
    for &ei in e.iter() {
        let (s, h) = two_sum(q, ei);
        if h != T::zero() {
            out.push(h);
        }
        q = s;
    }
    if q != T::zero() || out.is_empty() {
        out.push(q);
    }
    *e = out;
}

fn orient_exact<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    let terms = [
        (a.x, b.y, false),
        (a.x, c.y, true),
        (b.x, a.y, true),
        (b.x, c.y, false),
        (c.x, a.y, false),
        (c.x, b.y, true),
    ];
    let mut e: Vec<T> = Vec::with_capacity(16);
    for (u, v, neg) in terms {
        let (p, err) = two_product(u, v);
        let (p, err) = if neg { (-p, -err) } else { (p, err) };
        grow_expansion(&mut e, err);
        grow_expansion(&mut e, p);
    }
    e.iter()
        .rev()
        .copied()
        .find(|v| *v != T::zero())
        .unwrap_or(T::zero())
}

/// Sign of the turn `a -> b -> c`; counterclockwise is positive.
pub fn orient<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> Orientation {
    let left = (a.x - c.x) * (b.y - c.y);
    let right = (a.y - c.y) * (b.x - c.x);
    let det = left - right;
    let eps = T::epsilon() / T::lit(2.0);
    let bound = (T::lit(3.0) + T::lit(16.0) * eps) * eps * (left.abs() + right.abs());
    if det > bound || -det > bound {
        return Orientation::from_sign(det);
    }
    Orientation::from_sign(orient_exact(a, b, c))
}

/// Signed doubled area of the triangle, rounded.
pub fn orient_value<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    (b - a).cross(c - a)
}
