//! Expansion of rule sets into tile sets, spatial lookup, and vertex degrees.

use std::collections::HashSet;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::coord::Coord;
use crate::geom::{Point, Similarity};
use crate::ruleset::{RuleId, RuleSet};
use crate::shape::Region;

pub const DEFAULT_TILE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpandError {
    #[error("expansion needs {requested} tiles, budget is {limit}")]
    BudgetExceeded { requested: u128, limit: u64 },
    #[error("invalid address {0:?}")]
    InvalidAddress(Vec<u16>),
}

/// A closed parameter interval of the scanning order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct Interval {
    pub lo: Coord,
    pub hi: Coord,
}

impl Interval {
    pub fn unit() -> Interval {
        Interval { lo: Coord::zero(), hi: Coord::one() }
    }

    pub fn len(&self) -> Coord {
        &self.hi - &self.lo
    }

    /// Sub-interval of the `i`-th child given the parent's cumulative fractions.
    pub fn child(&self, cumulative: &[Coord], i: usize, reversed: bool) -> Interval {
        let len = self.len();
        if reversed {
            Interval { lo: &self.hi - &(&cumulative[i + 1] * &len), hi: &self.hi - &(&cumulative[i] * &len) }
        } else {
            Interval { lo: &self.lo + &(&cumulative[i] * &len), hi: &self.lo + &(&cumulative[i + 1] * &len) }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Tile {
    /// Child indices from the unit down, in rule order.
    pub address: Vec<u16>,
    pub rule: RuleId,
    pub transform: Similarity,
    /// Whether the scanning order runs backwards through this tile.
    pub reversed: bool,
    pub interval: Interval,
    pub region: Region,
}

/// Prefix sums of each rule's child fractions.
pub fn cumulative_fractions(rs: &RuleSet) -> Vec<Vec<Coord>> {
    (0..rs.rules.len())
        .map(|r| {
            let mut acc = Coord::zero();
            let mut out = vec![acc.clone()];
            for f in rs.child_fractions(r) {
                acc += &f;
                out.push(acc.clone());
            }
            out
        })
        .collect()
}

/// Number of tiles at `depth`, saturating.
pub fn tile_count(rs: &RuleSet, depth: usize) -> u128 {
    let mut counts = vec![1u128; rs.rules.len()];
    for _ in 0..depth {
        counts = rs
            .rules
            .iter()
            .map(|r| r.children.iter().fold(0u128, |acc, c| acc.saturating_add(counts[c.rule])))
            .collect();
    }
    counts[rs.unit]
}

/// The root tile.
pub fn root_tile(rs: &RuleSet) -> Tile {
    let transform = Similarity::identity(rs.dim);
    Tile {
        address: Vec::new(),
        rule: rs.unit,
        region: rs.unit_rule().base.place(&transform),
        transform,
        reversed: false,
        interval: Interval::unit(),
    }
}

/// Children of `tile`, in rule order.
pub fn subdivide(rs: &RuleSet, cumulative: &[Vec<Coord>], tile: &Tile) -> Vec<Tile> {
    let rule = &rs.rules[tile.rule];
    rule.children
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let transform = tile.transform.compose(&c.placement);
            let mut address = tile.address.clone();
            address.push(i as u16);
            Tile {
                address,
                rule: c.rule,
                region: rs.rules[c.rule].base.place(&transform),
                transform,
                reversed: tile.reversed ^ c.reversed,
                interval: tile.interval.child(&cumulative[tile.rule], i, tile.reversed),
            }
        })
        .collect()
}

/// The tile at `address`.
pub fn tile_at(rs: &RuleSet, address: &[u16]) -> Result<Tile, ExpandError> {
    let cumulative = cumulative_fractions(rs);
    let mut tile = root_tile(rs);
    for &i in address {
        if i as usize >= rs.rules[tile.rule].children.len() {
            return Err(ExpandError::InvalidAddress(address.to_vec()));
        }
        tile = subdivide(rs, &cumulative, &tile).swap_remove(i as usize);
    }
    Ok(tile)
}

/// Grid of f64 buckets over the unit tile, each listing the tiles whose
/// bounding box touches it. Candidates are always confirmed exactly.
#[derive(Debug)]
pub struct TileLocator {
    origin: Vec<f64>,
    cell: Vec<f64>,
    n: Vec<usize>,
    buckets: Vec<Vec<u32>>,
}

const SLACK: f64 = 1e-9;

impl TileLocator {
    fn build(tiles: &[Tile], unit: &Region, dim: usize) -> TileLocator {
        let bb = unit.bbox().expect("bounded unit tile");
        let origin: Vec<f64> = bb.lo.to_f64();
        let span: Vec<f64> = (0..dim).map(|a| bb.extent(a).to_f64()).collect();
        let per_axis = ((tiles.len().max(1) as f64).powf(1.0 / dim as f64).ceil() as usize).clamp(1, 4096);
        let n = vec![per_axis; dim];
        let cell: Vec<f64> = span.iter().map(|s| s / per_axis as f64).collect();
        let total: usize = n.iter().product();
        let mut buckets = vec![Vec::new(); total];
        let mut loc = TileLocator { origin, cell, n, buckets: Vec::new() };
        for (idx, t) in tiles.iter().enumerate() {
            let Some(b) = t.region.bbox() else { continue };
            let lo = b.lo.to_f64();
            let hi = b.hi.to_f64();
            let range = loc.cell_range(&lo, &hi);
            loc.for_each_cell(&range, |k| buckets[k].push(idx as u32));
        }
        loc.buckets = buckets;
        loc
    }

    fn cell_range(&self, lo: &[f64], hi: &[f64]) -> Vec<(usize, usize)> {
        (0..self.n.len())
            .map(|a| {
                let f = |x: f64| ((x - self.origin[a]) / self.cell[a]).floor();
                let l = f(lo[a] - SLACK).max(0.0) as usize;
                let h = (f(hi[a] + SLACK).max(0.0) as usize).min(self.n[a] - 1);
                (l.min(self.n[a] - 1), h)
            })
            .collect()
    }

    fn for_each_cell(&self, range: &[(usize, usize)], mut f: impl FnMut(usize)) {
        let dim = range.len();
        let mut idx: Vec<usize> = range.iter().map(|r| r.0).collect();
        loop {
            let mut k = 0;
            for a in (0..dim).rev() {
                k = k * self.n[a] + idx[a];
            }
            f(k);
            let mut a = 0;
            loop {
                if a == dim {
                    return;
                }
                idx[a] += 1;
                if idx[a] <= range[a].1 {
                    break;
                }
                idx[a] = range[a].0;
                a += 1;
            }
        }
    }

    /// Tiles whose bounding box may meet the f64 box `[lo, hi]`, sorted.
    pub fn candidates(&self, lo: &[f64], hi: &[f64]) -> Vec<u32> {
        let range = self.cell_range(lo, hi);
        let mut out = Vec::new();
        self.for_each_cell(&range, |k| out.extend_from_slice(&self.buckets[k]));
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Tiles of one expansion depth, ordered lexicographically by address.
pub struct TileSet {
    pub depth: usize,
    pub dim: usize,
    pub tiles: Vec<Tile>,
    pub unit_region: Region,
    locator: OnceLock<TileLocator>,
    vertex_index: OnceLock<Vec<(Point, Vec<u32>)>>,
}

impl TileSet {
    pub fn locator(&self) -> &TileLocator {
        self.locator.get_or_init(|| TileLocator::build(&self.tiles, &self.unit_region, self.dim))
    }

    /// Tiles containing `p` (closed), ascending indices.
    pub fn tiles_containing(&self, p: &Point) -> Vec<u32> {
        let f = p.to_f64();
        self.locator()
            .candidates(&f, &f)
            .into_iter()
            .filter(|&i| self.tiles[i as usize].region.contains(p))
            .collect()
    }

    /// Every tile corner with the tiles containing it, sorted by point.
    pub fn vertex_index(&self) -> &[(Point, Vec<u32>)] {
        self.vertex_index.get_or_init(|| {
            let mut seen: HashSet<Point> = HashSet::new();
            for t in &self.tiles {
                for v in t.region.vertices() {
                    seen.insert(v);
                }
            }
            let mut points: Vec<Point> = seen.into_iter().collect();
            points.par_sort();
            let _ = self.locator();
            points
                .into_par_iter()
                .map(|p| {
                    let inc = self.tiles_containing(&p);
                    (p, inc)
                })
                .collect()
        })
    }

    pub fn total_measure(&self) -> Option<Coord> {
        self.tiles.iter().map(|t| t.region.measure()).sum()
    }

    /// Tiles sorted by their position in the scanning order.
    pub fn scan_order(&self) -> Vec<u32> {
        let mut idx: Vec<u32> = (0..self.tiles.len() as u32).collect();
        idx.par_sort_by(|&a, &b| self.tiles[a as usize].interval.lo.cmp(&self.tiles[b as usize].interval.lo));
        idx
    }
}

/// Expand the unit rule `depth` times.
pub fn expand(rs: &RuleSet, depth: usize, budget: u64) -> Result<TileSet, ExpandError> {
    let requested = tile_count(rs, depth);
    if requested > budget as u128 {
        return Err(ExpandError::BudgetExceeded { requested, limit: budget });
    }
    let cumulative = cumulative_fractions(rs);
    let root = root_tile(rs);
    let unit_region = root.region.clone();
    let mut level = vec![root];
    for _ in 0..depth {
        level = level.par_iter().flat_map_iter(|t| subdivide(rs, &cumulative, t)).collect();
    }
    Ok(TileSet {
        depth,
        dim: rs.dim,
        tiles: level,
        unit_region,
        locator: OnceLock::new(),
        vertex_index: OnceLock::new(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexDegree {
    pub point: Point,
    pub degree: usize,
    pub interior: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeMap {
    pub vertices: Vec<VertexDegree>,
    pub max_interior: usize,
    pub max_boundary: usize,
}

impl DegreeMap {
    /// An interior vertex of maximum degree.
    pub fn worst_interior(&self) -> Option<&VertexDegree> {
        self.vertices.iter().filter(|v| v.interior).max_by_key(|v| v.degree)
    }
}

/// Number of tiles meeting at each tile corner.
pub fn vertex_degrees(ts: &TileSet) -> DegreeMap {
    let vertices: Vec<VertexDegree> = ts
        .vertex_index()
        .iter()
        .map(|(p, inc)| VertexDegree {
            point: p.clone(),
            degree: inc.len(),
            interior: ts.unit_region.contains_interior(p),
        })
        .collect();
    let max_interior = vertices.iter().filter(|v| v.interior).map(|v| v.degree).max().unwrap_or(0);
    let max_boundary = vertices.iter().filter(|v| !v.interior).map(|v| v.degree).max().unwrap_or(0);
    DegreeMap { vertices, max_interior, max_boundary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ruleset::parse_ruleset;

    fn quad() -> RuleSet {
        parse_ruleset(
            "unit Q\nrule Q\n base box 1 1\n child rule=Q scale=1/2 translate=(0,0)\n child rule=Q scale=1/2 translate=(1/2,0)\n child rule=Q scale=1/2 translate=(0,1/2)\n child rule=Q scale=1/2 translate=(1/2,1/2)\n",
        )
        .unwrap()
    }

    #[test]
    fn quadtree_depth_two() {
        let ts = expand(&quad(), 2, DEFAULT_TILE_BUDGET).unwrap();
        assert_eq!(ts.tiles.len(), 16);
        assert!(ts.tiles.iter().all(|t| t.region.measure() == Some(Coord::ratio(1, 16))));
        assert_eq!(ts.total_measure(), Some(Coord::one()));
        let deg = vertex_degrees(&ts);
        assert_eq!(deg.max_interior, 4);
        assert_eq!(deg.vertices.len(), 25);
        assert_eq!(deg.max_boundary, 2);
    }

    #[test]
    fn budget_is_enforced() {
        let err = expand(&quad(), 12, 1000).err().unwrap();
        assert_eq!(err, ExpandError::BudgetExceeded { requested: 1 << 24, limit: 1000 });
    }

    #[test]
    fn address_lookup_matches_expansion() {
        let rs = quad();
        let ts = expand(&rs, 3, DEFAULT_TILE_BUDGET).unwrap();
        for t in ts.tiles.iter().step_by(5) {
            let u = tile_at(&rs, &t.address).unwrap();
            assert_eq!(u.region, t.region);
            assert_eq!(u.interval, t.interval);
        }
        assert!(tile_at(&rs, &[0, 4]).is_err());
    }
}
