//! Points, similarity transforms and the exact predicates on boxes and polygons.

use std::fmt;
use std::ops::{Deref, Index};

use arrayvec::ArrayVec;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coord::Coord;

/// A point in the plane or in space.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(ArrayVec<Coord, 3>);

impl Point {
    pub fn new<I: IntoIterator<Item = Coord>>(coords: I) -> Point {
        let v: ArrayVec<Coord, 3> = coords.into_iter().collect();
        assert!(v.len() >= 2, "points have two or three coordinates");
        Point(v)
    }

    pub fn xy(x: Coord, y: Coord) -> Point {
        Point::new([x, y])
    }

    pub fn origin(dim: usize) -> Point {
        Point::new((0..dim).map(|_| Coord::zero()))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Point) -> Point {
        Point::new(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b))
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point::new(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b))
    }

    pub fn scaled(&self, s: &Coord) -> Point {
        Point::new(self.0.iter().map(|a| a * s))
    }

    pub fn dot(&self, other: &Point) -> Coord {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn dist2(&self, other: &Point) -> Coord {
        let d = self.sub(other);
        d.dot(&d)
    }

    pub fn with(&self, axis: usize, value: Coord) -> Point {
        let mut v = self.0.clone();
        v[axis] = value;
        Point(v)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Coord::to_f64).collect()
    }
}

impl Deref for Point {
    type Target = [Coord];
    fn deref(&self) -> &[Coord] {
        &self.0
    }
}

impl Index<usize> for Point {
    type Output = Coord;
    fn index(&self, i: usize) -> &Coord {
        &self.0[i]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.as_slice().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Point, D::Error> {
        let v: Vec<Coord> = Vec::deserialize(deserializer)?;
        if !(2..=3).contains(&v.len()) {
            return Err(serde::de::Error::custom("points have two or three coordinates"));
        }
        Ok(Point::new(v))
    }
}

/// cos and sin of `k·30°`.
fn unit_circle(k: u8) -> (Coord, Coord) {
    let half = Coord::ratio(1, 2);
    let h3 = &Coord::sqrt3() * &half;
    let table = [
        (Coord::one(), Coord::zero()),
        (h3.clone(), half.clone()),
        (half.clone(), h3.clone()),
    ];
    let (c, s) = table[(k % 3) as usize].clone();
    match (k % 12) / 3 {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    }
}

/// The orthogonal part of a similarity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Linear {
    /// Mirror in the x axis when `reflect`, then rotate by `rot · 30°`.
    Planar { rot: u8, reflect: bool },
    /// `q[i] = ±p[perm[i]]`, negated where `neg[i]`.
    Spatial { perm: [u8; 3], neg: [bool; 3] },
}

impl Linear {
    pub fn identity(dim: usize) -> Linear {
        if dim == 3 {
            Linear::Spatial { perm: [0, 1, 2], neg: [false; 3] }
        } else {
            Linear::Planar { rot: 0, reflect: false }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Linear::Planar { .. } => 2,
            Linear::Spatial { .. } => 3,
        }
    }

    /// Planar rotation/reflection lifted to space, acting on x and y.
    pub fn lift(self) -> Linear {
        match self {
            Linear::Planar { rot, reflect } => {
                assert!(rot % 3 == 0, "only quarter turns lift to space");
                let mut out = Linear::identity(3);
                if reflect {
                    out = Linear::Spatial { perm: [0, 1, 2], neg: [false, true, false] };
                }
                let quarter = Linear::Spatial { perm: [1, 0, 2], neg: [true, false, false] };
                for _ in 0..rot / 3 {
                    out = quarter.compose(&out);
                }
                out
            }
            s => s,
        }
    }

    /// True when boxes map to boxes.
    pub fn is_axis_aligned(&self) -> bool {
        match self {
            Linear::Planar { rot, .. } => rot % 3 == 0,
            Linear::Spatial { .. } => true,
        }
    }

    pub fn reverses_orientation(&self) -> bool {
        match self {
            Linear::Planar { reflect, .. } => *reflect,
            Linear::Spatial { perm, neg } => {
                let odd_perm = match perm {
                    [0, 1, 2] | [1, 2, 0] | [2, 0, 1] => false,
                    _ => true,
                };
                odd_perm ^ (neg.iter().filter(|n| **n).count() % 2 == 1)
            }
        }
    }

    pub fn apply(&self, p: &Point) -> Point {
        match self {
            Linear::Planar { rot, reflect } => {
                let x = &p[0];
                let y = if *reflect { -&p[1] } else { p[1].clone() };
                match rot % 12 {
                    0 => Point::xy(x.clone(), y),
                    3 => Point::xy(-y, x.clone()),
                    6 => Point::xy(-x, -y),
                    9 => Point::xy(y, -x),
                    k => {
                        let (c, s) = unit_circle(k);
                        Point::xy(x * &c - &y * &s, x * &s + &y * &c)
                    }
                }
            }
            Linear::Spatial { perm, neg } => Point::new((0..3).map(|i| {
                let v = p[perm[i] as usize].clone();
                if neg[i] {
                    -v
                } else {
                    v
                }
            })),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Linear) -> Linear {
        match (self, inner) {
            (Linear::Planar { rot: a, reflect: f }, Linear::Planar { rot: b, reflect: g }) => {
                let rot = if *f { (a + 12 - b) % 12 } else { (a + b) % 12 };
                Linear::Planar { rot, reflect: f ^ g }
            }
            (Linear::Spatial { perm: pa, neg: na }, Linear::Spatial { perm: pb, neg: nb }) => {
                let mut perm = [0u8; 3];
                let mut neg = [false; 3];
                for i in 0..3 {
                    let j = pa[i] as usize;
                    perm[i] = pb[j];
                    neg[i] = na[i] ^ nb[j];
                }
                Linear::Spatial { perm, neg }
            }
            _ => panic!("mixed planar and spatial maps"),
        }
    }

    pub fn inverse(&self) -> Linear {
        match self {
            Linear::Planar { rot, reflect } => {
                if *reflect {
                    *self
                } else {
                    Linear::Planar { rot: (12 - rot) % 12, reflect: false }
                }
            }
            Linear::Spatial { perm, neg } => {
                let mut ip = [0u8; 3];
                let mut ineg = [false; 3];
                for i in 0..3 {
                    ip[perm[i] as usize] = i as u8;
                    ineg[perm[i] as usize] = neg[i];
                }
                Linear::Spatial { perm: ip, neg: ineg }
            }
        }
    }

    /// The eight symmetries of the square or the 48 of the cube.
    pub fn hyperoctahedral(dim: usize) -> Vec<Linear> {
        if dim == 2 {
            let mut out = Vec::new();
            for reflect in [false, true] {
                for rot in [0, 3, 6, 9] {
                    out.push(Linear::Planar { rot, reflect });
                }
            }
            return out;
        }
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::new();
        for perm in perms {
            for bits in 0..8u8 {
                let neg = [bits & 1 != 0, bits & 2 != 0, bits & 4 != 0];
                out.push(Linear::Spatial { perm, neg });
            }
        }
        out
    }

    /// The axis-letter form used by rule files, e.g. `-y+x+z`.
    pub fn axes_string(&self) -> String {
        match self.lift() {
            Linear::Spatial { perm, neg } => (0..3)
                .map(|i| format!("{}{}", if neg[i] { '-' } else { '+' }, ['x', 'y', 'z'][perm[i] as usize]))
                .collect(),
            Linear::Planar { .. } => unreachable!(),
        }
    }

    pub fn parse_axes(s: &str) -> Option<Linear> {
        let b = s.as_bytes();
        if b.len() != 6 {
            return None;
        }
        let mut perm = [0u8; 3];
        let mut neg = [false; 3];
        let mut seen = [false; 3];
        for i in 0..3 {
            neg[i] = match b[2 * i] {
                b'+' => false,
                b'-' => true,
                _ => return None,
            };
            let axis = match b[2 * i + 1] {
                b'x' => 0,
                b'y' => 1,
                b'z' => 2,
                _ => return None,
            };
            if seen[axis] {
                return None;
            }
            seen[axis] = true;
            perm[i] = axis as u8;
        }
        Some(Linear::Spatial { perm, neg })
    }
}

/// `p ↦ scale · linear(p) + translation`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Similarity {
    pub scale: Coord,
    pub linear: Linear,
    pub translation: Point,
}

impl Similarity {
    pub fn identity(dim: usize) -> Similarity {
        Similarity { scale: Coord::one(), linear: Linear::identity(dim), translation: Point::origin(dim) }
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    pub fn apply(&self, p: &Point) -> Point {
        self.linear.apply(p).scaled(&self.scale).add(&self.translation)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Similarity) -> Similarity {
        Similarity {
            scale: &self.scale * &inner.scale,
            linear: self.linear.compose(&inner.linear),
            translation: self.apply(&inner.translation),
        }
    }

    pub fn inverse(&self) -> Similarity {
        let linear = self.linear.inverse();
        let scale = self.scale.recip();
        let translation = linear.apply(&self.translation).scaled(&-&scale);
        Similarity { scale, linear, translation }
    }
}

/// A closed axis-aligned box.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct AaBox {
    pub lo: Point,
    pub hi: Point,
}

impl AaBox {
    pub fn new(lo: Point, hi: Point) -> AaBox {
        debug_assert!(lo.iter().zip(hi.iter()).all(|(a, b)| a <= b));
        AaBox { lo, hi }
    }

    /// The box spanned by two opposite corners in any order.
    pub fn spanning(a: &Point, b: &Point) -> AaBox {
        let lo = Point::new(a.iter().zip(b.iter()).map(|(x, y)| x.clone().min(y.clone())));
        let hi = Point::new(a.iter().zip(b.iter()).map(|(x, y)| x.clone().max(y.clone())));
        AaBox { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn extent(&self, axis: usize) -> Coord {
        &self.hi[axis] - &self.lo[axis]
    }

    pub fn volume(&self) -> Coord {
        let mut v = Coord::one();
        for i in 0..self.dim() {
            v *= &self.extent(i);
        }
        v
    }

    pub fn longest_side(&self) -> Coord {
        (0..self.dim()).map(|i| self.extent(i)).max().expect("non-empty")
    }

    pub fn diameter2(&self) -> Coord {
        self.lo.dist2(&self.hi)
    }

    pub fn center(&self) -> Point {
        self.lo.add(&self.hi).scaled(&Coord::ratio(1, 2))
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..self.dim()).all(|i| self.lo[i] <= p[i] && p[i] <= self.hi[i])
    }

    pub fn contains_interior(&self, p: &Point) -> bool {
        (0..self.dim()).all(|i| self.lo[i] < p[i] && p[i] < self.hi[i])
    }

    pub fn contains_box(&self, other: &AaBox) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    /// Number of coordinates of `p` sitting on a face of the box, or `None` if outside.
    pub fn boundary_codim(&self, p: &Point) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        Some((0..self.dim()).filter(|&i| p[i] == self.lo[i] || p[i] == self.hi[i]).count())
    }

    /// Closed intersection, possibly degenerate.
    pub fn intersection(&self, other: &AaBox) -> Option<AaBox> {
        let lo = Point::new((0..self.dim()).map(|i| self.lo[i].clone().max(other.lo[i].clone())));
        let hi = Point::new((0..self.dim()).map(|i| self.hi[i].clone().min(other.hi[i].clone())));
        if (0..self.dim()).all(|i| lo[i] <= hi[i]) {
            Some(AaBox { lo, hi })
        } else {
            None
        }
    }

    /// Dimension of the closed intersection, `None` when disjoint.
    pub fn contact_dim(&self, other: &AaBox) -> Option<usize> {
        let inter = self.intersection(other)?;
        Some((0..self.dim()).filter(|&i| inter.lo[i] < inter.hi[i]).count())
    }

    pub fn interiors_overlap(&self, other: &AaBox) -> bool {
        self.contact_dim(other) == Some(self.dim())
    }

    /// Squared distance from `p` to the box (zero inside).
    pub fn dist2_to(&self, p: &Point) -> Coord {
        let mut total = Coord::zero();
        for i in 0..self.dim() {
            let d = if p[i] < self.lo[i] {
                &self.lo[i] - &p[i]
            } else if p[i] > self.hi[i] {
                &p[i] - &self.hi[i]
            } else {
                continue;
            };
            total += &(&d * &d);
        }
        total
    }

    pub fn corners(&self) -> Vec<Point> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| {
                Point::new((0..d).map(|i| if mask >> i & 1 == 1 { self.hi[i].clone() } else { self.lo[i].clone() }))
            })
            .collect()
    }

    pub fn transformed(&self, t: &Similarity) -> AaBox {
        assert!(t.linear.is_axis_aligned());
        AaBox::spanning(&t.apply(&self.lo), &t.apply(&self.hi))
    }
}

/// Twice the signed area of a simple polygon.
pub fn polygon_area2(vertices: &[Point]) -> Coord {
    let n = vertices.len();
    (0..n)
        .map(|i| {
            let (p, q) = (&vertices[i], &vertices[(i + 1) % n]);
            &p[0] * &q[1] - &q[0] * &p[1]
        })
        .sum()
}

fn cross(o: &Point, a: &Point, b: &Point) -> Coord {
    &(&a[0] - &o[0]) * &(&b[1] - &o[1]) - &(&a[1] - &o[1]) * &(&b[0] - &o[0])
}

fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    cross(a, b, p).is_zero()
        && p[0] >= a[0].clone().min(b[0].clone())
        && p[0] <= a[0].clone().max(b[0].clone())
        && p[1] >= a[1].clone().min(b[1].clone())
        && p[1] <= a[1].clone().max(b[1].clone())
}

/// Where a point lies relative to a polygon.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Inside,
    Boundary,
    Outside,
}

pub fn point_in_polygon(p: &Point, vertices: &[Point]) -> Side {
    let n = vertices.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
        if on_segment(p, a, b) {
            return Side::Boundary;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            // x coordinate of the crossing compared without division
            let lhs = &(&p[0] - &a[0]) * &(&b[1] - &a[1]);
            let rhs = &(&b[0] - &a[0]) * &(&p[1] - &a[1]);
            let crosses = if b[1] > a[1] { lhs < rhs } else { lhs > rhs };
            if crosses {
                inside = !inside;
            }
        }
    }
    if inside {
        Side::Inside
    } else {
        Side::Outside
    }
}

/// True when the open segments cross at a single interior point.
pub fn segments_cross(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let d1 = cross(c, d, a).signum();
    let d2 = cross(c, d, b).signum();
    let d3 = cross(a, b, c).signum();
    let d4 = cross(a, b, d).signum();
    d1 * d2 < 0 && d3 * d4 < 0
}

/// Squared distance from `p` to the closed segment `ab`.
pub fn dist2_to_segment(p: &Point, a: &Point, b: &Point) -> Coord {
    let ab = b.sub(a);
    let len2 = ab.dot(&ab);
    if len2.is_zero() {
        return p.dist2(a);
    }
    let t = p.sub(a).dot(&ab);
    if !t.is_positive() {
        return p.dist2(a);
    }
    if t >= len2 {
        return p.dist2(b);
    }
    let t = &t / &len2;
    p.dist2(&a.add(&ab.scaled(&t)))
}

/// Squared distance from `p` to a closed polygon (zero inside).
pub fn dist2_to_polygon(p: &Point, vertices: &[Point]) -> Coord {
    if point_in_polygon(p, vertices) != Side::Outside {
        return Coord::zero();
    }
    let n = vertices.len();
    (0..n).map(|i| dist2_to_segment(p, &vertices[i], &vertices[(i + 1) % n])).min().expect("non-empty polygon")
}

pub fn polygon_centroid_hint(vertices: &[Point]) -> Point {
    let n = Coord::int(vertices.len() as i64);
    let mut s = Point::origin(2);
    for v in vertices {
        s = s.add(v);
    }
    s.scaled(&n.recip())
}

/// Exact test for overlapping interiors of two simple polygons, with a witness point.
///
/// Proper edge crossings are found exactly. Otherwise vertices, edge midpoints and
/// centroids of each polygon are probed against the other, which settles all
/// convex cases and is a sampled check for the rest.
pub fn polygons_overlap(p: &[Point], q: &[Point]) -> Option<Point> {
    let (n, m) = (p.len(), q.len());
    for i in 0..n {
        for j in 0..m {
            let (a, b) = (&p[i], &p[(i + 1) % n]);
            let (c, d) = (&q[j], &q[(j + 1) % m]);
            if segments_cross(a, b, c, d) {
                let mid_ab = a.add(b).scaled(&Coord::ratio(1, 2));
                let mid_cd = c.add(d).scaled(&Coord::ratio(1, 2));
                return Some(mid_ab.add(&mid_cd).scaled(&Coord::ratio(1, 2)));
            }
        }
    }
    let probes = |poly: &[Point]| {
        let k = poly.len();
        let mut out: Vec<Point> = Vec::new();
        for i in 0..k {
            out.push(poly[i].clone());
            out.push(poly[i].add(&poly[(i + 1) % k]).scaled(&Coord::ratio(1, 2)));
        }
        out.push(polygon_centroid_hint(poly));
        out
    };
    let centroid_p = polygon_centroid_hint(p);
    let centroid_q = polygon_centroid_hint(q);
    for probe in probes(p) {
        let nudged = probe.add(&centroid_p.sub(&probe).scaled(&Coord::ratio(1, 1024)));
        if point_in_polygon(&nudged, q) == Side::Inside && point_in_polygon(&nudged, p) == Side::Inside {
            return Some(nudged);
        }
    }
    for probe in probes(q) {
        let nudged = probe.add(&centroid_q.sub(&probe).scaled(&Coord::ratio(1, 1024)));
        if point_in_polygon(&nudged, p) == Side::Inside && point_in_polygon(&nudged, q) == Side::Inside {
            return Some(nudged);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> Point {
        Point::xy(Coord::int(x), Coord::int(y))
    }

    #[test]
    fn planar_compose_matches_apply() {
        let p = Point::xy(Coord::ratio(1, 3), Coord::ratio(2, 7));
        for a in Linear::hyperoctahedral(2) {
            for b in Linear::hyperoctahedral(2) {
                assert_eq!(a.compose(&b).apply(&p), a.apply(&b.apply(&p)));
            }
            assert_eq!(a.inverse().apply(&a.apply(&p)), p);
        }
        let r1 = Linear::Planar { rot: 1, reflect: true };
        let r5 = Linear::Planar { rot: 5, reflect: false };
        assert_eq!(r1.compose(&r5).apply(&p), r1.apply(&r5.apply(&p)));
    }

    #[test]
    fn thirty_degree_rotation_is_exact() {
        let r = Linear::Planar { rot: 1, reflect: false };
        let mut p = pt(1, 0);
        for _ in 0..12 {
            p = r.apply(&p);
        }
        assert_eq!(p, pt(1, 0));
    }

    #[test]
    fn spatial_compose_and_inverse() {
        let p = Point::new([Coord::int(1), Coord::int(2), Coord::int(3)]);
        let all = Linear::hyperoctahedral(3);
        assert_eq!(all.len(), 48);
        for a in &all {
            assert_eq!(a.inverse().apply(&a.apply(&p)), p);
            for b in all.iter().step_by(7) {
                assert_eq!(a.compose(b).apply(&p), a.apply(&b.apply(&p)));
            }
        }
    }

    #[test]
    fn lift_agrees_with_planar_action() {
        let p3 = Point::new([Coord::int(1), Coord::int(2), Coord::int(5)]);
        for a in Linear::hyperoctahedral(2) {
            let q2 = a.apply(&pt(1, 2));
            let q3 = a.lift().apply(&p3);
            assert_eq!((&q3[0], &q3[1], &q3[2]), (&q2[0], &q2[1], &Coord::int(5)));
            assert_eq!(a.lift().reverses_orientation(), a.reverses_orientation());
        }
    }

    #[test]
    fn axes_round_trip() {
        for a in Linear::hyperoctahedral(3) {
            assert_eq!(Linear::parse_axes(&a.axes_string()), Some(a));
        }
        assert_eq!(Linear::parse_axes("+x+x+z"), None);
    }

    #[test]
    fn similarity_inverse() {
        let s = Similarity {
            scale: Coord::ratio(1, 3),
            linear: Linear::Planar { rot: 9, reflect: true },
            translation: pt(2, -1),
        };
        let p = Point::xy(Coord::ratio(5, 4), Coord::ratio(-1, 2));
        assert_eq!(s.inverse().apply(&s.apply(&p)), p);
        assert_eq!(s.compose(&s.inverse()), Similarity::identity(2));
    }

    #[test]
    fn box_contacts() {
        let a = AaBox::new(pt(0, 0), pt(1, 1));
        let b = AaBox::new(pt(1, 0), pt(2, 1));
        let c = AaBox::new(pt(1, 1), pt(2, 2));
        let d = AaBox::new(pt(3, 3), pt(4, 4));
        assert_eq!(a.contact_dim(&b), Some(1));
        assert_eq!(a.contact_dim(&c), Some(0));
        assert_eq!(a.contact_dim(&d), None);
        assert_eq!(a.dist2_to(&pt(3, 2)), Coord::int(5));
    }

    #[test]
    fn polygon_predicates() {
        let sq = vec![pt(0, 0), pt(2, 0), pt(2, 2), pt(0, 2)];
        assert_eq!(polygon_area2(&sq), Coord::int(8));
        assert_eq!(point_in_polygon(&pt(1, 1), &sq), Side::Inside);
        assert_eq!(point_in_polygon(&pt(2, 1), &sq), Side::Boundary);
        assert_eq!(point_in_polygon(&pt(3, 1), &sq), Side::Outside);
        let shifted = vec![pt(1, 1), pt(3, 1), pt(3, 3), pt(1, 3)];
        assert!(polygons_overlap(&sq, &shifted).is_some());
        let beside = vec![pt(2, 0), pt(4, 0), pt(4, 2), pt(2, 2)];
        assert!(polygons_overlap(&sq, &beside).is_none());
        assert_eq!(dist2_to_polygon(&pt(4, 1), &sq), Coord::int(4));
    }
}
