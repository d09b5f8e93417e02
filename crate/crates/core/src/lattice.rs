//! Exact lattice geometry: vectors, primitive directions, angles and cuts,
//! lattice points in triangles and convex hull chains.
//!
//! Nothing here uses floating point. Angles are compared through a
//! half-plane index followed by a cross product.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A point or vector of `Z^2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct LatticeVector {
    pub x: i64,
    pub y: i64,
}

impl From<[i64; 2]> for LatticeVector {
    fn from(v: [i64; 2]) -> Self {
        LatticeVector { x: v[0], y: v[1] }
    }
}

impl From<LatticeVector> for [i64; 2] {
    fn from(v: LatticeVector) -> Self {
        [v.x, v.y]
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Shorthand constructor.
pub const fn v(x: i64, y: i64) -> LatticeVector {
    LatticeVector { x, y }
}

impl LatticeVector {
    pub const ZERO: LatticeVector = v(0, 0);

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// Sum of absolute coordinates.
    pub fn l1(self) -> i64 {
        self.x.abs() + self.y.abs()
    }

    pub fn checked_add(self, o: LatticeVector) -> Option<LatticeVector> {
        Some(v(self.x.checked_add(o.x)?, self.y.checked_add(o.y)?))
    }

    pub fn checked_scale(self, k: i64) -> Option<LatticeVector> {
        Some(v(self.x.checked_mul(k)?, self.y.checked_mul(k)?))
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, o: LatticeVector) -> LatticeVector {
        v(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for LatticeVector {
    fn add_assign(&mut self, o: LatticeVector) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, o: LatticeVector) -> LatticeVector {
        v(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for LatticeVector {
    fn sub_assign(&mut self, o: LatticeVector) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        v(-self.x, -self.y)
    }
}

impl Mul<i64> for LatticeVector {
    type Output = LatticeVector;
    fn mul(self, k: i64) -> LatticeVector {
        v(self.x * k, self.y * k)
    }
}

/// `det(a | b)`, widened so it cannot overflow.
pub fn cross(a: LatticeVector, b: LatticeVector) -> i128 {
    a.x as i128 * b.y as i128 - a.y as i128 * b.x as i128
}

pub fn dot(a: LatticeVector, b: LatticeVector) -> i128 {
    a.x as i128 * b.x as i128 + a.y as i128 * b.y as i128
}

/// A primitive nonzero integer vector, ordered by its angle in `[0, 2pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct Direction {
    x: i64,
    y: i64,
}

impl TryFrom<[i64; 2]> for Direction {
    type Error = crate::Error;
    fn try_from(a: [i64; 2]) -> Result<Direction> {
        Direction::new(a[0], a[1])
    }
}

impl From<Direction> for [i64; 2] {
    fn from(d: Direction) -> Self {
        [d.x, d.y]
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.x, self.y)
    }
}

impl Direction {
    pub const EAST: Direction = Direction { x: 1, y: 0 };
    pub const NORTH: Direction = Direction { x: 0, y: 1 };
    pub const WEST: Direction = Direction { x: -1, y: 0 };
    pub const SOUTH: Direction = Direction { x: 0, y: -1 };

    /// Validating constructor: nonzero with coprime coordinates.
    pub fn new(x: i64, y: i64) -> Result<Direction> {
        if x == 0 && y == 0 {
            return domain("direction must be nonzero");
        }
        if x.unsigned_abs().gcd(&y.unsigned_abs()) != 1 {
            return domain(format!("direction ({x},{y}) is not primitive"));
        }
        Ok(Direction { x, y })
    }

    pub fn x(self) -> i64 {
        self.x
    }

    pub fn y(self) -> i64 {
        self.y
    }

    pub fn vector(self) -> LatticeVector {
        v(self.x, self.y)
    }

    /// 0 when the angle lies in `[0, pi)`, 1 when it lies in `[pi, 2pi)`.
    pub fn half(self) -> u8 {
        if self.y > 0 || (self.y == 0 && self.x > 0) {
            0
        } else {
            1
        }
    }

    pub fn opposite(self) -> Direction {
        Direction { x: -self.x, y: -self.y }
    }

    /// Image under an integer matrix of determinant one.
    pub fn transform(self, a: [[i64; 2]; 2]) -> Direction {
        Direction { x: a[0][0] * self.x + a[0][1] * self.y, y: a[1][0] * self.x + a[1][1] * self.y }
    }
}

impl Ord for Direction {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.half().cmp(&other.half()) {
            Ordering::Equal => 0.cmp(&cross(self.vector(), other.vector())),
            o => o,
        }
    }
}

impl PartialOrd for Direction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Splits `v` into a primitive direction and a positive multiplicity.
pub fn primitive_of(w: LatticeVector) -> Result<(Direction, i64)> {
    if w.is_zero() {
        return domain("zero vector has no direction");
    }
    let g = w.x.unsigned_abs().gcd(&w.y.unsigned_abs()) as i64;
    Ok((Direction { x: w.x / g, y: w.y / g }, g))
}

/// The angle `angle(dir) + 2 pi lap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtendedAngle {
    pub lap: i64,
    pub dir: Direction,
}

/// The cut immediately counterclockwise of `angle(dir) + 2 pi lap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenericAngle {
    pub lap: i64,
    pub dir: Direction,
}

impl fmt::Display for ExtendedAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.dir, self.lap)
    }
}

impl fmt::Display for GenericAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}+", self.dir, self.lap)
    }
}

impl ExtendedAngle {
    pub fn new(lap: i64, dir: Direction) -> Self {
        ExtendedAngle { lap, dir }
    }

    pub fn add_pi(self) -> ExtendedAngle {
        ExtendedAngle { lap: self.lap + self.dir.half() as i64, dir: self.dir.opposite() }
    }

    pub fn sub_pi(self) -> ExtendedAngle {
        let d = self.dir.opposite();
        ExtendedAngle { lap: self.lap - d.half() as i64, dir: d }
    }

    pub fn add_laps(self, k: i64) -> ExtendedAngle {
        ExtendedAngle { lap: self.lap + k, dir: self.dir }
    }

    pub fn key(self) -> AngleKey {
        AngleKey { lap: self.lap, dir: self.dir, after: false }
    }

    /// The cut just after this angle.
    pub fn after(self) -> GenericAngle {
        GenericAngle { lap: self.lap, dir: self.dir }
    }

    /// The smallest angle with direction `dir` strictly greater than `self`.
    pub fn next_with_dir(self, dir: Direction) -> ExtendedAngle {
        let a = ExtendedAngle { lap: self.lap, dir };
        if a > self {
            a
        } else {
            a.add_laps(1)
        }
    }
}

impl GenericAngle {
    pub fn new(lap: i64, dir: Direction) -> Self {
        GenericAngle { lap, dir }
    }

    pub fn add_pi(self) -> GenericAngle {
        let e = ExtendedAngle { lap: self.lap, dir: self.dir }.add_pi();
        GenericAngle { lap: e.lap, dir: e.dir }
    }

    pub fn add_laps(self, k: i64) -> GenericAngle {
        GenericAngle { lap: self.lap + k, dir: self.dir }
    }

    pub fn key(self) -> AngleKey {
        AngleKey { lap: self.lap, dir: self.dir, after: true }
    }

    /// The exact angle this cut sits just after.
    pub fn base(self) -> ExtendedAngle {
        ExtendedAngle { lap: self.lap, dir: self.dir }
    }

    /// The smallest angle with direction `dir` greater than this cut.
    pub fn next_with_dir(self, dir: Direction) -> ExtendedAngle {
        let a = ExtendedAngle { lap: self.lap, dir };
        if dir > self.dir {
            a
        } else {
            a.add_laps(1)
        }
    }
}

/// Common sort key for exact angles and cuts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AngleKey {
    pub lap: i64,
    pub dir: Direction,
    pub after: bool,
}

impl AngleKey {
    pub fn add_pi(self) -> AngleKey {
        let e = ExtendedAngle { lap: self.lap, dir: self.dir }.add_pi();
        AngleKey { lap: e.lap, dir: e.dir, after: self.after }
    }

    pub fn add_laps(self, k: i64) -> AngleKey {
        AngleKey { lap: self.lap + k, ..self }
    }
}

/// Either kind of angle, for mixed comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Angle {
    Exact(ExtendedAngle),
    Generic(GenericAngle),
}

impl Angle {
    pub fn key(self) -> AngleKey {
        match self {
            Angle::Exact(a) => a.key(),
            Angle::Generic(g) => g.key(),
        }
    }
}

impl From<ExtendedAngle> for Angle {
    fn from(a: ExtendedAngle) -> Self {
        Angle::Exact(a)
    }
}

impl From<GenericAngle> for Angle {
    fn from(g: GenericAngle) -> Self {
        Angle::Generic(g)
    }
}

/// Strict order on the real angles represented by `a` and `b`.
pub fn angle_less(a: impl Into<Angle>, b: impl Into<Angle>) -> bool {
    a.into().key() < b.into().key()
}

/// All lattice points of the closed convex hull of three points.
pub fn lattice_points_in_triangle(a: LatticeVector, b: LatticeVector, c: LatticeVector) -> Vec<LatticeVector> {
    let (x0, x1) = (a.x.min(b.x).min(c.x), a.x.max(b.x).max(c.x));
    let (y0, y1) = (a.y.min(b.y).min(c.y), a.y.max(b.y).max(c.y));
    let orient = cross(b - a, c - a).signum();
    let mut out = Vec::new();
    for x in x0..=x1 {
        for y in y0..=y1 {
            let p = v(x, y);
            let inside = if orient == 0 {
                // Degenerate: bounding box of collinear points, intersected with their line.
                on_hull_of_collinear(&[a, b, c], p)
            } else {
                let s1 = cross(b - a, p - a).signum();
                let s2 = cross(c - b, p - b).signum();
                let s3 = cross(a - c, p - c).signum();
                [s1, s2, s3].iter().all(|&s| s == 0 || s == orient)
            };
            if inside {
                out.push(p);
            }
        }
    }
    out
}

fn on_hull_of_collinear(pts: &[LatticeVector], p: LatticeVector) -> bool {
    let lo = *pts.iter().min().unwrap();
    let hi = *pts.iter().max().unwrap();
    if lo == hi {
        return p == lo;
    }
    cross(hi - lo, p - lo) == 0 && dot(p - lo, hi - lo) >= 0 && dot(hi - p, hi - lo) >= 0
}

/// Vertices of the convex hull in counterclockwise order, without collinear points.
pub fn convex_hull(points: &[LatticeVector]) -> Vec<LatticeVector> {
    let mut pts: Vec<LatticeVector> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<LatticeVector> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && cross(lower[lower.len() - 1] - lower[lower.len() - 2], p - lower[lower.len() - 2]) <= 0
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<LatticeVector> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(upper[upper.len() - 1] - upper[upper.len() - 2], p - upper[upper.len() - 2]) <= 0
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Counterclockwise boundary chain of the hull of `points` from `from` to `to`.
///
/// Input points lying on a hull edge are kept as subdivision points.
pub fn hull_chain(points: &[LatticeVector], from: LatticeVector, to: LatticeVector) -> Result<Vec<LatticeVector>> {
    if points.is_empty() {
        return domain("hull_chain of an empty set");
    }
    let hull = convex_hull(points);
    let pos = |q: LatticeVector| hull.iter().position(|&h| h == q);
    let (Some(i), Some(j)) = (pos(from), pos(to)) else {
        return domain(format!("{from} or {to} is not a hull vertex"));
    };
    if i == j {
        return Ok(vec![from]);
    }
    let mut chain = vec![from];
    let mut k = i;
    while k != j {
        let next = (k + 1) % hull.len();
        let (p, q) = (hull[k], hull[next]);
        let mut between: Vec<LatticeVector> = points
            .iter()
            .copied()
            .filter(|&r| r != p && r != q && cross(q - p, r - p) == 0 && dot(r - p, q - p) > 0 && dot(q - r, q - p) > 0)
            .collect();
        between.sort_by_key(|&r| dot(r - p, q - p));
        between.dedup();
        chain.extend(between);
        chain.push(q);
        k = next;
    }
    Ok(chain)
}

/// Strict order on `Z^2` seen from a generic direction just after `cut.dir`.
///
/// `p < q` when `p - q` points to the left of the cut direction; ties along
/// the direction are broken by `p - q` being a negative multiple of it.
pub fn theta_order_less(p: LatticeVector, q: LatticeVector, cut: GenericAngle) -> bool {
    let d = cut.dir.vector();
    let c = cross(d, p - q);
    if c != 0 {
        return c > 0;
    }
    dot(d, p - q) < 0
}

/// Twice the integral of `x dy` along the segment from `p` to `q`.
pub fn twice_x_dy(p: LatticeVector, q: LatticeVector) -> i128 {
    (p.x as i128 + q.x as i128) * (q.y as i128 - p.y as i128)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(x: i64, y: i64) -> Direction {
        Direction::new(x, y).unwrap()
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive_of(v(3, 0)).unwrap(), (d(1, 0), 3));
        assert_eq!(primitive_of(v(-2, -2)).unwrap(), (d(-1, -1), 2));
        assert_eq!(primitive_of(v(0, 5)).unwrap(), (d(0, 1), 5));
        assert!(primitive_of(v(0, 0)).is_err());
        assert!(Direction::new(2, 4).is_err());
    }

    #[test]
    fn angle_examples() {
        let e = |l, x, y| ExtendedAngle::new(l, d(x, y));
        assert!(angle_less(e(0, 1, 0), e(0, 0, 1)));
        assert!(angle_less(e(0, 1, 0), GenericAngle::new(0, d(1, 0))));
        assert!(!angle_less(e(1, -1, 0), e(0, 1, 1)));
        assert!(angle_less(GenericAngle::new(0, d(1, 0)), e(0, 3, 1)));
        assert_eq!(e(0, 1, 1).add_pi(), e(0, -1, -1));
        assert_eq!(e(0, 0, -1).add_pi(), e(1, 0, 1));
        assert_eq!(e(0, 1, 0).sub_pi(), e(-1, -1, 0));
        assert_eq!(e(0, 1, 0).add_pi().sub_pi(), e(0, 1, 0));
    }

    #[test]
    fn triangle_examples() {
        let mut t = lattice_points_in_triangle(v(0, 0), v(1, 0), v(0, 1));
        t.sort();
        assert_eq!(t, vec![v(0, 0), v(0, 1), v(1, 0)]);
        assert_eq!(lattice_points_in_triangle(v(0, 0), v(2, 0), v(0, 2)).len(), 6);
        let mut s = lattice_points_in_triangle(v(0, 0), v(2, 1), v(0, 0));
        s.sort();
        assert_eq!(s, vec![v(0, 0), v(2, 1)]);
    }

    #[test]
    fn hull_chain_examples() {
        assert_eq!(hull_chain(&[v(0, 1), v(1, 0)], v(0, 1), v(1, 0)).unwrap(), vec![v(0, 1), v(1, 0)]);
        assert_eq!(
            hull_chain(&[v(1, 0), v(2, 1), v(3, 2)], v(1, 0), v(3, 2)).unwrap(),
            vec![v(1, 0), v(2, 1), v(3, 2)]
        );
        assert_eq!(hull_chain(&[v(0, 0)], v(0, 0), v(0, 0)).unwrap(), vec![v(0, 0)]);
        assert!(hull_chain(&[v(0, 0), v(2, 0), v(1, 0)], v(1, 0), v(2, 0)).is_err());
    }

    #[test]
    fn theta_order_examples() {
        let cut = GenericAngle::new(0, d(1, 0));
        // Higher points come first for a cut just above the positive x-axis.
        assert!(!theta_order_less(v(0, 0), v(0, 1), cut));
        assert!(theta_order_less(v(0, 1), v(0, 0), cut));
        assert!(theta_order_less(v(0, 0), v(1, 0), cut));
        assert!(!theta_order_less(v(2, 2), v(2, 2), cut));
    }
}
