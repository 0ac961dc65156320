//! Solid angles at boundary points of boxes.
//!
//! At a point `v` on `m` faces of a `d`-dimensional box, the directions into
//! the box form an orthant-like cone covering `2^-m` of the direction sphere.
//! The directions that leave the box at an angle of at least π/2 with every
//! direction into it form the polar cone, which has positive measure only at
//! a corner, where it is the opposite orthant.

use serde::Serialize;

use crate::geom::{AaBox, Point};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolidAngleError {
    #[error("point is not on the boundary of the box")]
    NotOnBoundary,
    #[error("solid angles are computed in two and three dimensions, not {0}")]
    UnsupportedDimension(usize),
}

/// Angles as exact multiples of π/2 (radians in the plane, steradians in space).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SolidAngles {
    pub angle_half_pi: u32,
    pub turn_half_pi: u32,
}

impl SolidAngles {
    pub fn angle(&self) -> f64 {
        self.angle_half_pi as f64 * std::f64::consts::FRAC_PI_2
    }

    pub fn turn(&self) -> f64 {
        self.turn_half_pi as f64 * std::f64::consts::FRAC_PI_2
    }

    /// `angle + turn ≤ 2π`, exactly.
    pub fn within_bound(&self) -> bool {
        self.angle_half_pi + self.turn_half_pi <= 4
    }

    pub fn at_bound(&self) -> bool {
        self.angle_half_pi + self.turn_half_pi == 4
    }
}

pub fn solid_angles(t: &AaBox, v: &Point) -> Result<SolidAngles, SolidAngleError> {
    let d = t.dim();
    if !(2..=3).contains(&d) {
        return Err(SolidAngleError::UnsupportedDimension(d));
    }
    let m = match t.boundary_codim(v) {
        Some(m) if m > 0 => m,
        _ => return Err(SolidAngleError::NotOnBoundary),
    };
    // The whole direction sphere is 2^d quarter turns: 2π in the plane, 4π in space.
    Ok(SolidAngles { angle_half_pi: 1 << (d - m), turn_half_pi: u32::from(m == d) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coord::Coord;

    fn unit_cube() -> AaBox {
        AaBox::new(Point::origin(3), Point::new([Coord::one(), Coord::one(), Coord::one()]))
    }

    #[test]
    fn canonical_points() {
        let c = unit_cube();
        let h = Coord::ratio(1, 2);
        let z = Coord::zero;
        let corner = solid_angles(&c, &Point::origin(3)).unwrap();
        assert_eq!((corner.angle_half_pi, corner.turn_half_pi), (1, 1));
        let edge = solid_angles(&c, &Point::new([h.clone(), z(), z()])).unwrap();
        assert_eq!((edge.angle_half_pi, edge.turn_half_pi), (2, 0));
        let facet = solid_angles(&c, &Point::new([h.clone(), h.clone(), z()])).unwrap();
        assert_eq!((facet.angle_half_pi, facet.turn_half_pi), (4, 0));
        assert!(facet.at_bound() && !edge.at_bound() && !corner.at_bound());
        assert_eq!(solid_angles(&c, &Point::new([h.clone(), h.clone(), h])), Err(SolidAngleError::NotOnBoundary));
    }
}
