//! Base shapes of rules and the regions they occupy once placed.

use serde::{Deserialize, Serialize};

use crate::coord::Coord;
use crate::geom::{dist2_to_polygon, point_in_polygon, polygon_area2, AaBox, Point, Side, Similarity};

/// The shape a rule subdivides, in the rule's own frame.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// `[0, e₀] × [0, e₁] (× [0, e₂])`.
    Box(Vec<Coord>),
    /// A simple polygon, vertices in order.
    Polygon(Vec<Point>),
    /// A fractal tile defined by a named lattice construction.
    Lattice(String),
}

impl Shape {
    pub fn unit_square() -> Shape {
        Shape::Box(vec![Coord::one(), Coord::one()])
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Shape::Box(e) => Some(e.len()),
            Shape::Polygon(_) => Some(2),
            Shape::Lattice(_) => None,
        }
    }

    /// Area or volume, when the shape has an exact one.
    pub fn measure(&self) -> Option<Coord> {
        match self {
            Shape::Box(e) => Some(e.iter().fold(Coord::one(), |acc, x| &acc * x)),
            Shape::Polygon(v) => Some((&polygon_area2(v) * &Coord::ratio(1, 2)).abs()),
            Shape::Lattice(_) => None,
        }
    }

    pub fn is_rectilinear(&self) -> bool {
        matches!(self, Shape::Box(_))
    }

    pub fn place(&self, t: &Similarity) -> Region {
        match self {
            Shape::Box(e) => {
                let dim = e.len();
                let hi = Point::new(e.iter().cloned());
                if t.linear.is_axis_aligned() {
                    Region::Box(AaBox::spanning(&t.apply(&Point::origin(dim)), &t.apply(&hi)))
                } else {
                    let corners = [
                        Point::origin(2),
                        Point::xy(e[0].clone(), Coord::zero()),
                        hi,
                        Point::xy(Coord::zero(), e[1].clone()),
                    ];
                    Region::Polygon(corners.iter().map(|p| t.apply(p)).collect())
                }
            }
            Shape::Polygon(v) => Region::Polygon(v.iter().map(|p| t.apply(p)).collect()),
            Shape::Lattice(name) => Region::Lattice(name.clone()),
        }
    }
}

/// A placed tile's point set.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Box(AaBox),
    Polygon(Vec<Point>),
    Lattice(String),
}

impl Region {
    pub fn as_box(&self) -> Option<&AaBox> {
        match self {
            Region::Box(b) => Some(b),
            _ => None,
        }
    }

    pub fn measure(&self) -> Option<Coord> {
        match self {
            Region::Box(b) => Some(b.volume()),
            Region::Polygon(v) => Some((&polygon_area2(v) * &Coord::ratio(1, 2)).abs()),
            Region::Lattice(_) => None,
        }
    }

    /// Corner points: box corners or polygon vertices.
    pub fn vertices(&self) -> Vec<Point> {
        match self {
            Region::Box(b) => b.corners(),
            Region::Polygon(v) => v.clone(),
            Region::Lattice(_) => Vec::new(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Region::Box(b) => b.contains(p),
            Region::Polygon(v) => point_in_polygon(p, v) != Side::Outside,
            Region::Lattice(_) => false,
        }
    }

    pub fn contains_interior(&self, p: &Point) -> bool {
        match self {
            Region::Box(b) => b.contains_interior(p),
            Region::Polygon(v) => point_in_polygon(p, v) == Side::Inside,
            Region::Lattice(_) => false,
        }
    }

    /// Squared distance from `p`, zero when `p` is inside.
    pub fn dist2_to(&self, p: &Point) -> Coord {
        match self {
            Region::Box(b) => b.dist2_to(p),
            Region::Polygon(v) => dist2_to_polygon(p, v),
            Region::Lattice(_) => Coord::zero(),
        }
    }

    /// Bounding box, exact.
    pub fn bbox(&self) -> Option<AaBox> {
        match self {
            Region::Box(b) => Some(b.clone()),
            Region::Polygon(v) => {
                let mut lo = v[0].clone();
                let mut hi = v[0].clone();
                for p in v {
                    for i in 0..2 {
                        if p[i] < lo[i] {
                            lo = lo.with(i, p[i].clone());
                        }
                        if p[i] > hi[i] {
                            hi = hi.with(i, p[i].clone());
                        }
                    }
                }
                Some(AaBox::new(lo, hi))
            }
            Region::Lattice(_) => None,
        }
    }

    /// Longest side of the bounding box.
    pub fn width(&self) -> Option<Coord> {
        self.bbox().map(|b| b.longest_side())
    }

    /// Largest squared distance between two points of the region.
    pub fn diameter2(&self) -> Option<Coord> {
        match self {
            Region::Box(b) => Some(b.diameter2()),
            Region::Polygon(v) => {
                let mut best = Coord::zero();
                for a in v {
                    for b in v {
                        let d = a.dist2(b);
                        if d > best {
                            best = d;
                        }
                    }
                }
                Some(best)
            }
            Region::Lattice(_) => None,
        }
    }

    pub fn center(&self) -> Option<Point> {
        self.bbox().map(|b| b.center())
    }
}
