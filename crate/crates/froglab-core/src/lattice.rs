//! Lattice points, finite boxes with boundary modes, and target sets for
//! hitting problems.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A lattice point in `Z^d`.
pub type Point = Vec<i64>;

/// The origin of `Z^d`.
pub fn origin(d: usize) -> Point {
    vec![0; d]
}

/// What happens to a walker at the edge of a box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryMode {
    /// The walk stops upon entering a face site of the box (the face site is
    /// part of the trajectory).
    Absorbing,
    /// The walk is removed the moment a step would leave the box; every site
    /// of the box, faces included, behaves like the interior.
    Killing,
}

/// Axis-aligned finite box `[lo_1, hi_1] x ... x [lo_d, hi_d]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeBox {
    lo: Vec<i64>,
    hi: Vec<i64>,
    pub boundary: BoundaryMode,
}

impl LatticeBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>, boundary: BoundaryMode) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::invalid("box bounds must be non-empty and same length"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::invalid("box requires lo <= hi on every axis"));
        }
        Ok(LatticeBox { lo, hi, boundary })
    }

    /// Cube of the given radius around the origin.
    pub fn centered(d: usize, radius: i64, boundary: BoundaryMode) -> Self {
        LatticeBox {
            lo: vec![-radius; d],
            hi: vec![radius; d],
            boundary,
        }
    }

    pub fn d(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    #[inline]
    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.lo.len()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (l, h))| x >= l && x <= h)
    }

    pub fn contains_origin(&self) -> bool {
        self.lo.iter().zip(&self.hi).all(|(l, h)| *l <= 0 && *h >= 0)
    }

    /// True for sites on the box surface.
    pub fn on_face(&self, p: &[i64]) -> bool {
        self.contains(p)
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .any(|(x, (l, h))| x == l || x == h)
    }

    /// Side length along one axis.
    pub fn side(&self, axis: usize) -> usize {
        (self.hi[axis] - self.lo[axis] + 1) as usize
    }

    /// Largest side length; used as the box diameter for step budgets.
    pub fn diameter(&self) -> usize {
        (0..self.d()).map(|a| self.side(a)).max().unwrap_or(0)
    }

    /// Number of sites, or an error if it overflows the address space.
    pub fn site_count(&self) -> Result<usize> {
        let mut n: usize = 1;
        for axis in 0..self.d() {
            n = n
                .checked_mul(self.side(axis))
                .ok_or_else(|| Error::Resource("box site count overflows usize".into()))?;
        }
        Ok(n)
    }

    /// Row-major (lexicographic) index of a point inside the box.
    #[inline]
    pub fn index(&self, p: &[i64]) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let mut idx = 0usize;
        for (axis, x) in p.iter().enumerate() {
            idx = idx * self.side(axis) + (x - self.lo[axis]) as usize;
        }
        Some(idx)
    }

    /// Inverse of [`LatticeBox::index`].
    pub fn point_at(&self, mut idx: usize) -> Point {
        let d = self.d();
        let mut p = vec![0i64; d];
        for axis in (0..d).rev() {
            let side = self.side(axis);
            p[axis] = self.lo[axis] + (idx % side) as i64;
            idx /= side;
        }
        p
    }

    /// All points of the box in lexicographic order.
    pub fn iter_points(&self) -> impl Iterator<Item = Point> + '_ {
        let n = self.site_count().unwrap_or(0);
        (0..n).map(move |i| self.point_at(i))
    }
}

/// The set a walker is asked to hit.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetSet {
    /// Finite collection of points.
    Points(BTreeSet<Point>),
    /// The hyperplane `{x : x_1 = level}`; in one dimension this is the
    /// single site `level`.
    Hyperplane(i64),
}

impl TargetSet {
    pub fn points<I: IntoIterator<Item = Point>>(points: I) -> Self {
        TargetSet::Points(points.into_iter().collect())
    }

    pub fn single(p: Point) -> Self {
        TargetSet::points([p])
    }

    pub fn hyperplane(level: i64) -> Self {
        TargetSet::Hyperplane(level)
    }

    #[inline]
    pub fn contains(&self, p: &[i64]) -> bool {
        match self {
            TargetSet::Points(set) => set.contains(p),
            TargetSet::Hyperplane(level) => p[0] == *level,
        }
    }
}
