//! Seek/scan cost of answering range queries from points stored in curve order.
//!
//! Points are bucketed into the tiles of a fixed storage depth and laid out
//! in scanning order. A query is answered by one seek per fragment of its
//! cover, followed by a scan of the stored points from the first to the last
//! storage tile inside the fragment that meets the query.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::Window;
use crate::coord::Coord;
use crate::cover::{cover_fragments, fmt_float, CoverError, MergeBudget, QueryKind, QueryRange};
use crate::geom::Point;
use crate::ruleset::RuleSet;
use crate::tiling::{expand, root_tile, tile_count, ExpandError};

/// Fewest storage tiles the default depth aims for.
pub const DEFAULT_STORAGE_TILES: u128 = 4096;
pub const DEFAULT_POINTS: usize = 100_000;
pub const DEFAULT_RATIOS: [f64; 5] = [1.0, 10.0, 100.0, 1000.0, 10000.0];
const GRID: i64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error("point {0:?} is outside the unit tile")]
    PointOutside(Vec<f64>),
    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { got: usize, expected: usize },
    #[error("storage needs axis-aligned box tiles")]
    NotRectilinear,
    #[error("costs must be non-negative")]
    NegativeCost,
    #[error("points file: {0}")]
    Csv(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CostModel {
    /// Cost per fragment.
    pub seek_cost: f64,
    /// Cost per point scanned.
    pub scan_cost: f64,
}

impl CostModel {
    pub fn new(seek_cost: f64, scan_cost: f64) -> Result<CostModel, SimError> {
        if seek_cost < 0.0 || scan_cost < 0.0 {
            return Err(SimError::NegativeCost);
        }
        Ok(CostModel { seek_cost, scan_cost })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryCost {
    pub scanned: usize,
    pub answers: usize,
    pub false_answers: usize,
    pub fragments: usize,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostReport {
    pub model: CostModel,
    pub storage_depth: usize,
    pub queries: Vec<QueryCost>,
    pub scanned: usize,
    pub false_answers: usize,
    pub fragments: usize,
    pub cost: f64,
}

/// Smallest depth with at least `min_tiles` tiles.
pub fn default_storage_depth(rs: &RuleSet, min_tiles: u128) -> usize {
    (0..).find(|&d| tile_count(rs, d) >= min_tiles).expect("tile counts grow")
}

/// Points sorted by their storage tile, with the tile boundaries in scanning order.
#[derive(Clone, Debug)]
pub struct Layout {
    pub depth: usize,
    /// Parameter interval bounds of the storage tiles in scanning order, `tiles + 1` entries.
    bounds: Vec<Coord>,
    /// `prefix[i]` points are stored in the first `i` tiles.
    prefix: Vec<usize>,
    /// Storage tile boxes in scanning order.
    boxes: Vec<(Vec<f64>, Vec<f64>)>,
    pub points: Vec<Vec<f64>>,
}

impl Layout {
    pub fn build(rs: &RuleSet, depth: usize, budget: u64, points: &[Vec<f64>]) -> Result<Layout, SimError> {
        let ts = expand(rs, depth, budget)?;
        let order = ts.scan_order();
        let mut rank = vec![0usize; ts.tiles.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i as usize] = r;
        }
        let boxes: Vec<(Vec<f64>, Vec<f64>)> = ts
            .tiles
            .iter()
            .map(|t| t.region.as_box().map(|b| (b.lo.to_f64(), b.hi.to_f64())).ok_or(SimError::NotRectilinear))
            .collect::<Result<_, _>>()?;
        let mut keyed: Vec<(usize, usize)> = points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                if p.len() != rs.dim {
                    return Err(SimError::PointDimension { got: p.len(), expected: rs.dim });
                }
                let tile = ts
                    .locator()
                    .candidates(p, p)
                    .into_iter()
                    .find(|&t| {
                        let (lo, hi) = &boxes[t as usize];
                        (0..p.len()).all(|a| lo[a] <= p[a] && p[a] <= hi[a])
                    })
                    .ok_or_else(|| SimError::PointOutside(p.clone()))?;
                Ok((rank[tile as usize], i))
            })
            .collect::<Result<_, _>>()?;
        keyed.par_sort_unstable();
        let mut prefix = vec![0usize; order.len() + 1];
        for (r, _) in &keyed {
            prefix[r + 1] += 1;
        }
        for i in 0..order.len() {
            prefix[i + 1] += prefix[i];
        }
        let mut bounds: Vec<Coord> = order.iter().map(|&i| ts.tiles[i as usize].interval.lo.clone()).collect();
        bounds.push(Coord::one());
        let boxes = order.iter().map(|&i| boxes[i as usize].clone()).collect();
        Ok(Layout { depth, bounds, prefix, boxes, points: keyed.into_iter().map(|(_, i)| points[i].clone()).collect() })
    }

    /// Stored points from the first to the last storage tile meeting `q`
    /// among those overlapping `[lo, hi]`.
    fn scanned(&self, q: &QueryRange, lo: &Coord, hi: &Coord) -> std::ops::Range<usize> {
        let tiles = self.bounds.len() - 1;
        // First tile ending after lo, last tile starting before hi.
        let first = self.bounds[1..].partition_point(|b| b <= lo);
        let end = self.bounds[..tiles].partition_point(|b| b < hi).max(first);
        let c = q.center.to_f64();
        let r = q.radius.to_f64();
        let meets = |t: &usize| {
            let (blo, bhi) = &self.boxes[*t];
            match q.kind {
                QueryKind::Ball => {
                    let d2: f64 = (0..c.len()).map(|a| (c[a] - c[a].clamp(blo[a], bhi[a])).powi(2)).sum();
                    d2 < r * r
                }
                QueryKind::Box => (0..c.len()).all(|a| blo[a] < c[a] + r && c[a] - r < bhi[a]),
            }
        };
        match ((first..end).find(meets), (first..end).rev().find(meets)) {
            (Some(a), Some(b)) => self.prefix[a]..self.prefix[b + 1],
            _ => 0..0,
        }
    }
}

fn inside(q: &QueryRange, p: &[f64]) -> bool {
    let c = q.center.to_f64();
    let r = q.radius.to_f64();
    match q.kind {
        QueryKind::Ball => c.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < r * r,
        QueryKind::Box => c.iter().zip(p).all(|(a, b)| (a - b).abs() < r),
    }
}

fn covers_unit(rs: &RuleSet, q: &QueryRange) -> bool {
    root_tile(rs).region.vertices().iter().all(|v| match q.kind {
        QueryKind::Ball => q.center.dist2(v) < &q.radius * &q.radius,
        QueryKind::Box => (0..v.dim()).all(|i| (&q.center[i] - &v[i]).abs() < q.radius),
    })
}

/// Fragments, scanned points and answers of each query, before pricing.
pub fn measure_queries(rs: &RuleSet, window: &Window, layout: &Layout, queries: &[QueryRange]) -> Result<Vec<QueryCost>, SimError> {
    queries
        .par_iter()
        .map(|q| {
            let intervals: Vec<(Coord, Coord)> = if covers_unit(rs, q) {
                vec![(Coord::zero(), Coord::one())]
            } else {
                let rep = cover_fragments(rs, window, q, &MergeBudget::Off)?;
                rep.fragments.into_iter().map(|f| (f.lo, f.hi)).collect()
            };
            let mut scanned = 0;
            let mut answers = 0;
            for (lo, hi) in &intervals {
                let range = layout.scanned(q, lo, hi);
                scanned += range.len();
                answers += layout.points[range].iter().filter(|p| inside(q, p)).count();
            }
            Ok(QueryCost { scanned, answers, false_answers: scanned - answers, fragments: intervals.len(), cost: 0.0 })
        })
        .collect()
}

/// Apply a cost model to measured queries.
pub fn price(measured: &[QueryCost], model: CostModel, storage_depth: usize) -> CostReport {
    let queries: Vec<QueryCost> = measured
        .iter()
        .map(|c| QueryCost { cost: model.seek_cost * c.fragments as f64 + model.scan_cost * c.scanned as f64, ..c.clone() })
        .collect();
    CostReport {
        model,
        storage_depth,
        scanned: queries.iter().map(|c| c.scanned).sum(),
        false_answers: queries.iter().map(|c| c.false_answers).sum(),
        fragments: queries.iter().map(|c| c.fragments).sum(),
        cost: queries.iter().map(|c| c.cost).sum(),
        queries,
    }
}

/// Cost of each query against a stored layout.
pub fn simulate(
    rs: &RuleSet,
    window: &Window,
    layout: &Layout,
    queries: &[QueryRange],
    model: CostModel,
) -> Result<CostReport, SimError> {
    Ok(price(&measure_queries(rs, window, layout, queries)?, model, layout.depth))
}

/// Uniform points in the bounding box of the unit tile.
pub fn uniform_points(rs: &RuleSet, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let bb = root_tile(rs).region.bbox().expect("bounded unit tile");
    let lo = bb.lo.to_f64();
    let hi = bb.hi.to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| lo.iter().zip(&hi).map(|(a, b)| rng.gen_range(*a..*b)).collect()).collect()
}

/// Balls with radius in `[min_radius, max_radius)` fully inside the unit
/// tile's bounding box, on a dyadic grid so that they are exact.
pub fn random_queries(rs: &RuleSet, n: usize, min_radius: f64, max_radius: f64, seed: u64) -> Vec<QueryRange> {
    let bb = root_tile(rs).region.bbox().expect("bounded unit tile");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let on_grid = |x: f64| Coord::ratio((x * GRID as f64).round() as i64, GRID);
    (0..n)
        .map(|_| {
            let r = on_grid(rng.gen_range(min_radius..max_radius));
            let center = Point::new((0..rs.dim).map(|a| {
                let lo = (&bb.lo[a] + &r).to_f64();
                let hi = (&bb.hi[a] - &r).to_f64();
                let c = on_grid(rng.gen_range(lo..hi));
                c.max(&bb.lo[a] + &r).min(&bb.hi[a] - &r)
            }));
            QueryRange::ball(center, r)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRow {
    pub order: String,
    pub seek_scan_ratio: f64,
    pub fragments: usize,
    pub scanned: usize,
    pub false_answers: usize,
    pub cost: f64,
    /// Cost relative to the cheapest order at the same ratio.
    pub relative: f64,
}

/// Cost of every order at every seek/scan ratio, scan cost fixed at one.
pub fn compare(
    orders: &[(String, RuleSet, Window, Layout)],
    queries: &[QueryRange],
    ratios: &[f64],
) -> Result<Vec<ComparisonRow>, SimError> {
    let measured: Vec<Vec<QueryCost>> = orders
        .iter()
        .map(|(_, rs, window, layout)| measure_queries(rs, window, layout, queries))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for &ratio in ratios {
        let model = CostModel::new(ratio, 1.0)?;
        let start = rows.len();
        for ((name, _, _, layout), m) in orders.iter().zip(&measured) {
            let rep = price(m, model, layout.depth);
            rows.push(ComparisonRow {
                order: name.clone(),
                seek_scan_ratio: ratio,
                fragments: rep.fragments,
                scanned: rep.scanned,
                false_answers: rep.false_answers,
                cost: rep.cost,
                relative: 0.0,
            });
        }
        let best = rows[start..].iter().map(|r| r.cost).fold(f64::INFINITY, f64::min);
        for r in &mut rows[start..] {
            r.relative = if best > 0.0 { r.cost / best } else { 1.0 };
        }
    }
    Ok(rows)
}

pub fn write_comparison_csv<W: Write>(out: W, rows: &[ComparisonRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["order", "seek_scan_ratio", "fragments", "scanned", "false_answers", "cost", "relative"])?;
    for r in rows {
        w.write_record([
            r.order.clone(),
            fmt_float(r.seek_scan_ratio),
            r.fragments.to_string(),
            r.scanned.to_string(),
            r.false_answers.to_string(),
            fmt_float(r.cost),
            fmt_float(r.relative),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_report_csv<W: Write>(out: W, rep: &CostReport) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["query", "fragments", "scanned", "answers", "false_answers", "cost"])?;
    for (i, q) in rep.queries.iter().enumerate() {
        w.write_record([
            i.to_string(),
            q.fragments.to_string(),
            q.scanned.to_string(),
            q.answers.to_string(),
            q.false_answers.to_string(),
            fmt_float(q.cost),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Points as CSV rows of coordinates, no header.
pub fn write_points_csv<W: Write>(out: W, points: &[Vec<f64>]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for p in points {
        w.write_record(p.iter().map(|x| format!("{x:?}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_points_csv<R: Read>(input: R) -> Result<Vec<Vec<f64>>, SimError> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| SimError::Csv(e.to_string()))?;
            rec.iter().map(|f| f.parse::<f64>().map_err(|e| SimError::Csv(format!("`{f}`: {e}")))).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    #[test]
    fn whole_domain_query_is_one_fragment() {
        let e = builtin("hilbert").unwrap();
        let pts = uniform_points(&e.rules, 1000, 3);
        let layout = Layout::build(&e.rules, 3, 1 << 20, &pts).unwrap();
        let q = QueryRange::ball(Point::xy(Coord::ratio(1, 2), Coord::ratio(1, 2)), Coord::one());
        let rep = simulate(&e.rules, &e.window, &layout, &[q], CostModel::new(7.0, 1.0).unwrap()).unwrap();
        assert_eq!(rep.queries[0].fragments, 1);
        assert_eq!(rep.queries[0].scanned, 1000);
        assert_eq!(rep.cost, 7.0 + 1000.0);
    }

    #[test]
    fn negative_costs_rejected() {
        assert_eq!(CostModel::new(-1.0, 1.0), Err(SimError::NegativeCost));
    }

    #[test]
    fn points_round_trip() {
        let pts = vec![vec![0.25, 0.5], vec![0.1, 0.9]];
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &pts).unwrap();
        assert_eq!(read_points_csv(buf.as_slice()).unwrap(), pts);
    }
}
