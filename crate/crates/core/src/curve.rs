//! Scanning-order semantics: parameter intervals, σ↑/σ↓, entry and exit
//! points, connection kinds between consecutive tiles, and vertex audits.
//!
//! An order is a [`RuleSet`] whose child lists are read as visiting orders.

use serde::Serialize;

use crate::coord::Coord;
use crate::geom::{Linear, Point, Similarity};
use crate::ruleset::{RuleId, RuleSet};
use crate::tiling::{cumulative_fractions, expand, root_tile, subdivide, tile_at, ExpandError, Interval, Tile, TileSet};

pub type Order = RuleSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurveError {
    #[error("first/last child maps of rule `{0}` do not contract")]
    NonContracting(String),
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error("connections are only classified for box tiles")]
    NotRectilinear,
    #[error("parameter {0} outside [0, 1]")]
    OutOfRange(Coord),
}

/// Entry and exit point of every rule, in the rule's own frame.
#[derive(Clone, Debug, Serialize)]
pub struct Endpoints {
    pub entry: Vec<Point>,
    pub exit: Vec<Point>,
}

impl Endpoints {
    /// Entry and exit of a placed tile, honouring its reversal.
    pub fn of_tile(&self, tile: &Tile) -> (Point, Point) {
        let e = tile.transform.apply(&self.entry[tile.rule]);
        let x = tile.transform.apply(&self.exit[tile.rule]);
        if tile.reversed {
            (x, e)
        } else {
            (e, x)
        }
    }
}

fn linear_matrix(l: &Linear, dim: usize) -> Vec<Vec<Coord>> {
    let mut m = vec![vec![Coord::zero(); dim]; dim];
    for j in 0..dim {
        let e = Point::new((0..dim).map(|i| if i == j { Coord::one() } else { Coord::zero() }));
        let col = l.apply(&e);
        for i in 0..dim {
            m[i][j] = col[i].clone();
        }
    }
    m
}

/// Solve `m x = b` exactly; `None` when singular.
fn solve(mut m: Vec<Vec<Coord>>, mut b: Vec<Coord>) -> Option<Vec<Coord>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        b.swap(col, pivot);
        let inv = m[col][col].recip();
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] * &inv;
                for c in col..n {
                    let t = &f * &m[col][c];
                    m[r][c] -= &t;
                }
                let t = &f * &b[col];
                b[r] -= &t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &m[i][i]).collect())
}

/// Fixed point of a contracting similarity.
fn fixed_point(f: &Similarity) -> Option<Point> {
    if f.scale >= Coord::one() {
        return None;
    }
    let dim = f.dim();
    let l = linear_matrix(&f.linear, dim);
    let m: Vec<Vec<Coord>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let v = &f.scale * &l[i][j];
                    if i == j {
                        &Coord::one() - &v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    solve(m, f.translation.to_vec()).map(Point::new)
}

/// Entry and exit points of all rules.
///
/// The entry of a rule is the entry of its first child (the exit, if that
/// child is reversed), and symmetrically for exits. Following these links from
/// any (rule, end) state ends in a cycle; the cycle's composed map is solved
/// exactly for its fixed point and the result propagated back.
pub fn endpoints(o: &Order) -> Result<Endpoints, CurveError> {
    let n = o.rules.len();
    let step = |(r, end): (RuleId, usize)| {
        let kids = &o.rules[r].children;
        let c = if end == 0 { &kids[0] } else { &kids[kids.len() - 1] };
        ((c.rule, end ^ c.reversed as usize), &c.placement)
    };
    let mut solved: Vec<Option<Point>> = vec![None; 2 * n];
    for start in 0..2 * n {
        let mut path = Vec::new();
        let mut s = (start / 2, start % 2);
        while solved[s.0 * 2 + s.1].is_none() && !path.contains(&s) {
            path.push(s);
            s = step(s).0;
        }
        if solved[s.0 * 2 + s.1].is_none() {
            let from = path.iter().position(|&x| x == s).expect("cycle");
            let f = path[from..]
                .iter()
                .fold(Similarity::identity(o.dim), |f, &st| f.compose(step(st).1));
            let p = fixed_point(&f).ok_or_else(|| CurveError::NonContracting(o.rules[s.0].name.clone()))?;
            solved[s.0 * 2 + s.1] = Some(p);
        }
        for &st in path.iter().rev() {
            if solved[st.0 * 2 + st.1].is_none() {
                let (next, m) = step(st);
                let q = m.apply(solved[next.0 * 2 + next.1].as_ref().expect("successor solved"));
                solved[st.0 * 2 + st.1] = Some(q);
            }
        }
    }
    let pts: Vec<Point> = solved.into_iter().map(|p| p.expect("all states solved")).collect();
    Ok(Endpoints {
        entry: (0..n).map(|r| pts[2 * r].clone()).collect(),
        exit: (0..n).map(|r| pts[2 * r + 1].clone()).collect(),
    })
}

/// Entry and exit point of one rule.
pub fn entry_exit(o: &Order, rule: RuleId) -> Result<(Point, Point), CurveError> {
    let ep = endpoints(o)?;
    Ok((ep.entry[rule].clone(), ep.exit[rule].clone()))
}

/// Parameter interval of the tile at `address`.
pub fn tile_interval(o: &Order, address: &[u16]) -> Result<Interval, CurveError> {
    Ok(tile_at(o, address)?.interval)
}

/// One-sided limits σ↓(x) and σ↑(x) of the order at parameter `x`.
#[derive(Clone, Debug, Serialize)]
pub struct CurvePoint {
    /// Limit of `U[x, y]` as `y` falls to `x`; absent at `x = 1`.
    pub down: Option<Point>,
    /// Limit of `U[w, x]` as `w` rises to `x`; absent at `x = 0`.
    pub up: Option<Point>,
    /// Whether each side is exact rather than within `eps`.
    pub down_exact: bool,
    pub up_exact: bool,
}

const MAX_DESCENT: usize = 200;

fn descend(o: &Order, ep: &Endpoints, x: &Coord, eps2: &Coord, upward: bool) -> (Point, bool) {
    let cumulative = cumulative_fractions(o);
    let mut tile = root_tile(o);
    for _ in 0..MAX_DESCENT {
        let (entry, exit) = ep.of_tile(&tile);
        if !upward && tile.interval.lo == *x {
            return (entry, true);
        }
        if upward && tile.interval.hi == *x {
            return (exit, true);
        }
        match tile.region.diameter2() {
            Some(d) if d < *eps2 => return (if upward { exit } else { entry }, false),
            _ => {}
        }
        let kids = subdivide(o, &cumulative, &tile);
        tile = kids
            .into_iter()
            .find(|k| {
                if upward {
                    k.interval.lo < *x && *x <= k.interval.hi
                } else {
                    k.interval.lo <= *x && *x < k.interval.hi
                }
            })
            .expect("some child covers x");
    }
    let (entry, exit) = ep.of_tile(&tile);
    (if upward { exit } else { entry }, false)
}

/// σ↓(x) and σ↑(x), each exact or within `eps`.
pub fn index_to_point(o: &Order, x: &Coord, eps: &Coord) -> Result<CurvePoint, CurveError> {
    if x.is_negative() || *x > Coord::one() {
        return Err(CurveError::OutOfRange(x.clone()));
    }
    let ep = endpoints(o)?;
    let eps2 = eps * eps;
    let (down, down_exact) = if *x < Coord::one() {
        let (p, e) = descend(o, &ep, x, &eps2, false);
        (Some(p), e)
    } else {
        (None, false)
    };
    let (up, up_exact) = if x.is_positive() {
        let (p, e) = descend(o, &ep, x, &eps2, true);
        (Some(p), e)
    } else {
        (None, false)
    };
    Ok(CurvePoint { down, up, down_exact, up_exact })
}

/// How consecutive tiles of an order touch.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConnectionStats {
    /// Sharing a vertical edge.
    pub horizontal: usize,
    /// Sharing a horizontal edge.
    pub vertical: usize,
    /// Sharing a two-dimensional facet (3D only).
    pub facet: usize,
    /// Touching in a vertex or, in 3D, only along an edge.
    pub diagonal: usize,
    /// Not touching at all.
    pub disjoint: usize,
    /// Pairs where the exit of one tile is not the entry of the next.
    pub jumps: usize,
    pub pairs: usize,
}

/// Classify every consecutive pair of tiles at `depth`.
pub fn classify_connections(o: &Order, depth: usize, budget: u64) -> Result<ConnectionStats, CurveError> {
    let ts = expand(o, depth, budget)?;
    let ep = endpoints(o)?;
    let order = ts.scan_order();
    let mut stats = ConnectionStats { pairs: order.len().saturating_sub(1), ..Default::default() };
    for w in order.windows(2) {
        let (a, b) = (&ts.tiles[w[0] as usize], &ts.tiles[w[1] as usize]);
        let (Some(ba), Some(bb)) = (a.region.as_box(), b.region.as_box()) else {
            return Err(CurveError::NotRectilinear);
        };
        match ba.contact_dim(bb) {
            None => stats.disjoint += 1,
            Some(k) if k + 1 == o.dim => {
                if o.dim == 3 {
                    stats.facet += 1;
                } else {
                    let inter = ba.intersection(bb).expect("touching");
                    if inter.lo[0] == inter.hi[0] {
                        stats.horizontal += 1;
                    } else {
                        stats.vertical += 1;
                    }
                }
            }
            Some(_) => stats.diagonal += 1,
        }
        if ep.of_tile(a).1 != ep.of_tile(b).0 {
            stats.jumps += 1;
        }
    }
    Ok(stats)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexAudit {
    pub vertex: Point,
    /// Tiles incident to the vertex.
    pub tiles_v: usize,
    /// Entry and exit points of incident tiles located at the vertex.
    pub ends_v: usize,
    pub degenerate_bridges: usize,
    pub nondegenerate_bridges: usize,
}

/// Audit every interior vertex of a given expansion.
pub fn audit_tileset(o: &Order, ts: &TileSet) -> Result<Vec<VertexAudit>, CurveError> {
    let ep = endpoints(o)?;
    let ends: Vec<(Point, Point)> = ts.tiles.iter().map(|t| ep.of_tile(t)).collect();
    let mut out = Vec::new();
    for (v, inc) in ts.vertex_index() {
        if !ts.unit_region.contains_interior(v) {
            continue;
        }
        let mut inc = inc.clone();
        inc.sort_by(|&a, &b| ts.tiles[a as usize].interval.lo.cmp(&ts.tiles[b as usize].interval.lo));
        let ends_v = inc
            .iter()
            .map(|&i| (ends[i as usize].0 == *v) as usize + (ends[i as usize].1 == *v) as usize)
            .sum();
        let mut degenerate = 0;
        for w in inc.windows(2) {
            let (a, b) = (w[0] as usize, w[1] as usize);
            let consecutive = ts.tiles[a].interval.hi == ts.tiles[b].interval.lo;
            if consecutive && ends[a].1 == *v && ends[b].0 == *v {
                degenerate += 1;
            }
        }
        out.push(VertexAudit {
            vertex: v.clone(),
            tiles_v: inc.len(),
            ends_v,
            degenerate_bridges: degenerate,
            nondegenerate_bridges: inc.len().saturating_sub(1) - degenerate,
        });
    }
    Ok(out)
}

/// Audit every interior vertex of the expansion at `depth`.
pub fn vertex_audit(o: &Order, depth: usize, budget: u64) -> Result<Vec<VertexAudit>, CurveError> {
    let ts = expand(o, depth, budget)?;
    audit_tileset(o, &ts)
}
