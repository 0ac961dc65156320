//! Covering query ranges by tiles and by curve fragments, and empirical
//! Arrwwid estimates.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::Window;
use crate::coord::Coord;
use crate::geom::{AaBox, Point};
use crate::ruleset::RuleSet;
use crate::shape::Region;
use crate::tiling::{cumulative_fractions, expand, root_tile, subdivide, tile_count, ExpandError, Tile, TileSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("query is not inside the unit tile")]
    OutsideUnit,
    #[error("radius {0} is too large for any level of the window")]
    RadiusTooLarge(String),
    #[error("radius must be positive")]
    NonPositiveRadius,
    #[error("canonical levels need a uniform rule set")]
    NotUniform,
    #[error("cover of {0} tiles is not supported")]
    UnsupportedTile(&'static str),
    #[error(transparent)]
    Expand(#[from] ExpandError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryKind {
    /// Open Euclidean ball.
    Ball,
    /// Open axis-parallel cube with the given half-extent.
    Box,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QueryRange {
    pub kind: QueryKind,
    pub center: Point,
    /// Radius of a ball or half-extent of a box.
    pub radius: Coord,
}

impl QueryRange {
    pub fn ball(center: Point, radius: Coord) -> QueryRange {
        QueryRange { kind: QueryKind::Ball, center, radius }
    }

    pub fn cube(center: Point, half_extent: Coord) -> QueryRange {
        QueryRange { kind: QueryKind::Box, center, radius: half_extent }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Area or volume.
    pub fn measure(&self) -> f64 {
        let r = self.radius.to_f64();
        match (self.kind, self.dim()) {
            (QueryKind::Ball, 2) => std::f64::consts::PI * r * r,
            (QueryKind::Ball, 3) => 4.0 / 3.0 * std::f64::consts::PI * r * r * r,
            (QueryKind::Ball, d) => unimplemented!("balls in dimension {d}"),
            (QueryKind::Box, d) => (2.0 * r).powi(d as i32),
        }
    }

    /// Closed bounding box of the query.
    pub fn bounds(&self) -> AaBox {
        let lo = Point::new(self.center.iter().map(|c| c - &self.radius));
        let hi = Point::new(self.center.iter().map(|c| c + &self.radius));
        AaBox::new(lo, hi)
    }

    /// Whether the query meets a closed tile.
    pub fn meets(&self, region: &Region) -> Result<bool, CoverError> {
        match (self.kind, region) {
            (QueryKind::Ball, Region::Box(_) | Region::Polygon(_)) => {
                Ok(region.dist2_to(&self.center) < &self.radius * &self.radius)
            }
            (QueryKind::Box, Region::Box(b)) => {
                let q = self.bounds();
                Ok((0..b.dim()).all(|i| b.lo[i] < q.hi[i] && q.lo[i] < b.hi[i]))
            }
            (QueryKind::Box, Region::Polygon(_)) => Err(CoverError::UnsupportedTile("polygonal")),
            (_, Region::Lattice(_)) => Err(CoverError::UnsupportedTile("fractal")),
        }
    }

    /// Whether a point lies in the (open) query.
    pub fn contains(&self, p: &Point) -> bool {
        match self.kind {
            QueryKind::Ball => self.center.dist2(p) < &self.radius * &self.radius,
            QueryKind::Box => self.bounds().contains_interior(p),
        }
    }
}

/// Level at which a query of radius `r` is covered, given the longest side
/// `width` of the unit tile and the uniform child scale.
pub fn canonical_level(width: &Coord, scale: &Coord, window: &Window, r: &Coord) -> Result<usize, CoverError> {
    if !r.is_positive() {
        return Err(CoverError::NonPositiveRadius);
    }
    let upper = &window.upper * r;
    let lower = &window.lower * r;
    if *width <= lower {
        return Err(CoverError::RadiusTooLarge(r.to_string()));
    }
    let mut w = width.clone();
    let mut level = 0;
    while w > upper {
        w = &w * scale;
        level += 1;
    }
    if w <= lower {
        return Err(CoverError::RadiusTooLarge(r.to_string()));
    }
    Ok(level)
}

/// Canonical level for a uniform rule set.
pub fn canonical_level_of(rs: &RuleSet, window: &Window, r: &Coord) -> Result<usize, CoverError> {
    let scale = rs.uniform_scale().ok_or(CoverError::NotUniform)?;
    let width = root_tile(rs).region.width().ok_or(CoverError::UnsupportedTile("fractal"))?;
    canonical_level(&width, &scale, window, r)
}

/// How far fragments may be merged across tiles the query does not meet.
#[derive(Clone, Debug, PartialEq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeBudget {
    /// Raw runs of consecutive tiles.
    #[default]
    Off,
    /// Total area at most this multiple of the query's measure.
    Ratio(f64),
    /// Total area at most this many tiles of the cover level.
    TileAreas(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fragment {
    /// Parameter interval of the fragment.
    pub lo: Coord,
    pub hi: Coord,
    /// Indices into the report's tile list.
    pub tiles: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub query: QueryRange,
    pub level: usize,
    /// Tile addresses in scanning order.
    pub tiles: Vec<Vec<u16>>,
    pub fragments: Vec<Fragment>,
    /// Area of the fragments, including merged gaps.
    pub total_area: Coord,
    pub cover_ratio: f64,
}

fn check_inside(rs: &RuleSet, q: &QueryRange) -> Result<(), CoverError> {
    let unit = root_tile(rs).region;
    let inside = match &unit {
        Region::Box(b) => b.contains_box(&q.bounds()),
        Region::Polygon(_) => q.bounds().corners().iter().all(|c| unit.contains(c)),
        Region::Lattice(_) => return Err(CoverError::UnsupportedTile("fractal")),
    };
    if inside {
        Ok(())
    } else {
        Err(CoverError::OutsideUnit)
    }
}

/// Tiles of `level` meeting the query, in scanning order.
pub fn tiles_meeting(rs: &RuleSet, q: &QueryRange, level: usize) -> Result<Vec<Tile>, CoverError> {
    let cumulative = cumulative_fractions(rs);
    let mut current = vec![root_tile(rs)];
    for _ in 0..level {
        let mut next = Vec::new();
        for t in &current {
            for c in subdivide(rs, &cumulative, t) {
                if q.meets(&c.region)? {
                    next.push(c);
                }
            }
        }
        current = next;
    }
    current.sort_by(|a, b| a.interval.lo.cmp(&b.interval.lo));
    Ok(current)
}

fn runs(tiles: &[Tile]) -> Vec<Fragment> {
    let mut out: Vec<Fragment> = Vec::new();
    for (i, t) in tiles.iter().enumerate() {
        match out.last_mut() {
            Some(f) if f.hi == t.interval.lo => {
                f.hi = t.interval.hi.clone();
                f.tiles.push(i);
            }
            _ => out.push(Fragment { lo: t.interval.lo.clone(), hi: t.interval.hi.clone(), tiles: vec![i] }),
        }
    }
    out
}

/// Greedily close the smallest gaps between fragments while the total area
/// stays within `limit`.
fn merge_gaps(mut fragments: Vec<Fragment>, unit_measure: &Coord, mut total: Coord, limit: f64) -> (Vec<Fragment>, Coord) {
    loop {
        let best = (1..fragments.len())
            .map(|i| (&fragments[i].lo - &fragments[i - 1].hi, i))
            .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let Some((gap, i)) = best else { break };
        let extra = &gap * unit_measure;
        let candidate = &total + &extra;
        if candidate.to_f64() > limit {
            break;
        }
        total = candidate;
        let right = fragments.remove(i);
        let left = &mut fragments[i - 1];
        left.hi = right.hi;
        left.tiles.extend(right.tiles);
    }
    (fragments, total)
}

fn build_report(rs: &RuleSet, q: &QueryRange, level: usize, tiles: Vec<Tile>, merge: &MergeBudget) -> CoverReport {
    let unit_measure = root_tile(rs).region.measure().expect("measurable unit tile");
    let mut total: Coord = tiles.iter().map(|t| t.region.measure().expect("measurable tile")).sum();
    let mut fragments = runs(&tiles);
    let limit = match merge {
        MergeBudget::Off => None,
        MergeBudget::Ratio(b) => Some(b * q.measure()),
        MergeBudget::TileAreas(n) => {
            let tile_area = tiles.first().and_then(|t| t.region.measure()).map(|a| a.to_f64()).unwrap_or(0.0);
            Some(*n as f64 * tile_area * (1.0 + 1e-12))
        }
    };
    if let Some(limit) = limit {
        (fragments, total) = merge_gaps(fragments, &unit_measure, total, limit);
    }
    CoverReport {
        query: q.clone(),
        level,
        tiles: tiles.into_iter().map(|t| t.address).collect(),
        cover_ratio: total.to_f64() / q.measure(),
        total_area: total,
        fragments,
    }
}

/// Tiles of the canonical level meeting `q`.
pub fn cover_tiles(rs: &RuleSet, window: &Window, q: &QueryRange) -> Result<CoverReport, CoverError> {
    cover_fragments(rs, window, q, &MergeBudget::Off)
}

/// Tiles of the canonical level meeting `q`, grouped into runs that are
/// consecutive in the scanning order, optionally merged across gaps.
pub fn cover_fragments(rs: &RuleSet, window: &Window, q: &QueryRange, merge: &MergeBudget) -> Result<CoverReport, CoverError> {
    check_inside(rs, q)?;
    let level = canonical_level_of(rs, window, &q.radius)?;
    let tiles = tiles_meeting(rs, q, level)?;
    Ok(build_report(rs, q, level, tiles, merge))
}

/// Which queries an estimate evaluates.
#[derive(Clone, Debug, Serialize)]
pub struct SamplePlan {
    pub depths: Vec<usize>,
    /// Positions inside each depth's radius window, as fractions from its
    /// smallest to its largest radius.
    pub radius_fractions: Vec<Coord>,
    /// Random queries per depth.
    pub random_per_depth: usize,
    pub seed: u64,
    pub kind: QueryKind,
    pub merge: MergeBudget,
}

impl SamplePlan {
    pub fn new(depths: impl IntoIterator<Item = usize>) -> SamplePlan {
        SamplePlan {
            depths: depths.into_iter().collect(),
            radius_fractions: vec![Coord::zero(), Coord::ratio(1, 2), Coord::ratio(255, 256)],
            random_per_depth: 0,
            seed: 0,
            kind: QueryKind::Ball,
            merge: MergeBudget::Off,
        }
    }

    pub fn with_random(mut self, per_depth: usize, seed: u64) -> SamplePlan {
        self.random_per_depth = per_depth;
        self.seed = seed;
        self
    }

    pub fn with_kind(mut self, kind: QueryKind) -> SamplePlan {
        self.kind = kind;
        self
    }

    pub fn with_merge(mut self, merge: MergeBudget) -> SamplePlan {
        self.merge = merge;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub count: usize,
    pub query: QueryRange,
    pub level: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArrwwidEstimate {
    pub max_tiles: usize,
    pub max_fragments: usize,
    pub tiles_witness: Option<Witness>,
    pub fragments_witness: Option<Witness>,
    pub max_cover_ratio: f64,
    pub queries: usize,
    pub plan: SamplePlan,
}

/// Radii whose canonical level is `depth`: `(w_d/upper, w_d/lower)`, lower end included.
fn radius_range(width: &Coord, scale: &Coord, window: &Window, depth: usize) -> (Coord, Coord) {
    let w = width * &scale.pow(depth as u32);
    (&w / &window.upper, &w / &window.lower)
}

/// All queries of a plan, in a deterministic order.
pub fn plan_queries(rs: &RuleSet, window: &Window, plan: &SamplePlan) -> Result<Vec<QueryRange>, CoverError> {
    let scale = rs.uniform_scale().ok_or(CoverError::NotUniform)?;
    let unit = root_tile(rs).region;
    let unit_box = unit.as_box().cloned().ok_or(CoverError::UnsupportedTile("non-box"))?;
    let width = unit_box.longest_side();
    let make = |c: Point, r: Coord| match plan.kind {
        QueryKind::Ball => QueryRange::ball(c, r),
        QueryKind::Box => QueryRange::cube(c, r),
    };
    let mut out = Vec::new();
    for &d in &plan.depths {
        let (rmin, rmax) = radius_range(&width, &scale, window, d);
        let span = &rmax - &rmin;
        let radii: Vec<Coord> = plan.radius_fractions.iter().map(|f| &rmin + &(f * &span)).collect();
        let ts = expand(rs, d, crate::tiling::DEFAULT_TILE_BUDGET)?;
        for (v, _) in ts.vertex_index() {
            if !unit_box.contains_interior(v) {
                continue;
            }
            for r in &radii {
                let q = make(v.clone(), r.clone());
                if unit_box.contains_box(&q.bounds()) {
                    out.push(q);
                }
            }
        }
        if plan.random_per_depth > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed ^ (d as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let steps = 1i64 << 20;
            let mut made = 0;
            while made < plan.random_per_depth {
                let r = &rmin + &(&span * &Coord::ratio(rng.gen_range(0..steps), steps));
                let c = Point::new((0..unit_box.dim()).map(|i| {
                    let room = &unit_box.extent(i) - &(&r * &Coord::int(2));
                    &(&unit_box.lo[i] + &r) + &(&room * &Coord::ratio(rng.gen_range(0..=steps), steps))
                }));
                let q = make(c, r);
                if unit_box.contains_box(&q.bounds()) {
                    out.push(q);
                    made += 1;
                }
            }
        }
    }
    Ok(out)
}

/// Maximum tile and fragment counts over the queries of `plan`.
pub fn estimate_arrwwid(rs: &RuleSet, window: &Window, plan: &SamplePlan) -> Result<ArrwwidEstimate, CoverError> {
    let queries = plan_queries(rs, window, plan)?;
    let index = LevelIndex::build(rs, window, &queries)?;
    let counts: Vec<(usize, usize, f64)> = queries
        .par_iter()
        .enumerate()
        .map(|(i, q)| index.cover(i, q, &plan.merge).map(|r| (r.tiles.len(), r.fragments.len(), r.cover_ratio)))
        .collect::<Result<_, _>>()?;
    let first_max = |f: fn(&(usize, usize, f64)) -> usize| {
        counts.iter().enumerate().fold(None, |best: Option<(usize, usize)>, (i, c)| match best {
            Some((_, m)) if f(c) <= m => best,
            _ => Some((i, f(c))),
        })
    };
    let witness = |found: Option<(usize, usize)>| {
        found.map(|(i, count)| Witness { count, query: queries[i].clone(), level: index.levels[i] })
    };
    let tiles = first_max(|c| c.0);
    let fragments = first_max(|c| c.1);
    Ok(ArrwwidEstimate {
        max_tiles: tiles.map_or(0, |t| t.1),
        max_fragments: fragments.map_or(0, |t| t.1),
        tiles_witness: witness(tiles),
        fragments_witness: witness(fragments),
        max_cover_ratio: counts.iter().map(|c| c.2).fold(0.0, f64::max),
        queries: queries.len(),
        plan: plan.clone(),
    })
}

/// Maxima over evaluated reports; ties keep the earliest query.
pub fn summarise(reports: &[CoverReport], plan: SamplePlan) -> ArrwwidEstimate {
    let mut est = ArrwwidEstimate {
        max_tiles: 0,
        max_fragments: 0,
        tiles_witness: None,
        fragments_witness: None,
        max_cover_ratio: 0.0,
        queries: reports.len(),
        plan,
    };
    for r in reports {
        if r.tiles.len() > est.max_tiles {
            est.max_tiles = r.tiles.len();
            est.tiles_witness = Some(Witness { count: r.tiles.len(), query: r.query.clone(), level: r.level });
        }
        if r.fragments.len() > est.max_fragments {
            est.max_fragments = r.fragments.len();
            est.fragments_witness = Some(Witness { count: r.fragments.len(), query: r.query.clone(), level: r.level });
        }
        est.max_cover_ratio = est.max_cover_ratio.max(r.cover_ratio);
    }
    est
}

/// Largest expansion kept in memory to answer a batch of queries.
pub const INDEXED_TILE_LIMIT: u128 = 2_000_000;

/// Tiles of `ts` meeting `q`, in scanning order. Same result as
/// [`tiles_meeting`] at the depth of `ts`.
pub fn tiles_meeting_in(ts: &TileSet, q: &QueryRange) -> Result<Vec<Tile>, CoverError> {
    let b = q.bounds();
    let mut out = Vec::new();
    for i in ts.locator().candidates(&b.lo.to_f64(), &b.hi.to_f64()) {
        let t = &ts.tiles[i as usize];
        if q.meets(&t.region)? {
            out.push(t.clone());
        }
    }
    out.sort_by(|a, b| a.interval.lo.cmp(&b.interval.lo));
    Ok(out)
}

/// Expansions of the canonical levels of a batch of queries, each built once.
struct LevelIndex<'a> {
    rs: &'a RuleSet,
    levels: Vec<usize>,
    indexed: HashMap<usize, TileSet>,
}

impl<'a> LevelIndex<'a> {
    fn build(rs: &'a RuleSet, window: &Window, queries: &[QueryRange]) -> Result<LevelIndex<'a>, CoverError> {
        let levels: Vec<usize> = queries
            .iter()
            .map(|q| {
                check_inside(rs, q)?;
                canonical_level_of(rs, window, &q.radius)
            })
            .collect::<Result<_, _>>()?;
        let mut indexed: HashMap<usize, TileSet> = HashMap::new();
        for &l in &levels {
            if !indexed.contains_key(&l) && tile_count(rs, l) <= INDEXED_TILE_LIMIT {
                let ts = expand(rs, l, crate::tiling::DEFAULT_TILE_BUDGET)?;
                ts.locator();
                indexed.insert(l, ts);
            }
        }
        Ok(LevelIndex { rs, levels, indexed })
    }

    fn cover(&self, i: usize, q: &QueryRange, merge: &MergeBudget) -> Result<CoverReport, CoverError> {
        let l = self.levels[i];
        let tiles = match self.indexed.get(&l) {
            Some(ts) => tiles_meeting_in(ts, q)?,
            None => tiles_meeting(self.rs, q, l)?,
        };
        Ok(build_report(self.rs, q, l, tiles, merge))
    }
}

/// Cover many queries, expanding each canonical level once.
pub fn cover_batch(
    rs: &RuleSet,
    window: &Window,
    queries: &[QueryRange],
    merge: &MergeBudget,
) -> Result<Vec<CoverReport>, CoverError> {
    let index = LevelIndex::build(rs, window, queries)?;
    queries.par_iter().enumerate().map(|(i, q)| index.cover(i, q, merge)).collect()
}

/// Evaluate a plan and keep every report.
pub fn evaluate_plan(rs: &RuleSet, window: &Window, plan: &SamplePlan) -> Result<Vec<CoverReport>, CoverError> {
    let queries = plan_queries(rs, window, plan)?;
    cover_batch(rs, window, &queries, &plan.merge)
}

/// One CSV row per report.
pub fn write_csv<W: Write>(out: W, reports: &[CoverReport]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["center", "radius", "kind", "level", "tiles", "fragments", "area", "ratio"])?;
    for r in reports {
        let center: Vec<String> = r.query.center.to_f64().iter().map(|x| fmt_float(*x)).collect();
        w.write_record([
            center.join(" "),
            fmt_float(r.query.radius.to_f64()),
            format!("{:?}", r.query.kind).to_lowercase(),
            r.level.to_string(),
            r.tiles.len().to_string(),
            r.fragments.len().to_string(),
            fmt_float(r.total_area.to_f64()),
            fmt_float(r.cover_ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Twelve significant digits.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = 12 - 1 - x.abs().log10().floor() as i32;
    if (0..=17).contains(&digits) {
        let s = format!("{:.*}", digits as usize, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    #[test]
    fn quadtree_levels() {
        let q = builtin("quadtree").unwrap();
        let lvl = canonical_level_of(&q.rules, &q.window, &Coord::ratio(1, 10)).unwrap();
        assert_eq!(lvl, 2);
        assert!(canonical_level_of(&q.rules, &q.window, &Coord::one()).is_err());
    }

    #[test]
    fn quadtree_center_ball() {
        let q = builtin("quadtree").unwrap();
        let half = Coord::ratio(1, 2);
        let query = QueryRange::ball(Point::xy(half.clone(), half), Coord::ratio(1, 10));
        let rep = cover_tiles(&q.rules, &q.window, &query).unwrap();
        assert_eq!(rep.tiles.len(), 4);
        assert_eq!(rep.total_area, Coord::ratio(1, 4));
        assert!((rep.cover_ratio - 4.0 / (0.16 * std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn floats_have_twelve_digits() {
        assert_eq!(fmt_float(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_float(0.25), "0.25");
        assert_eq!(fmt_float(1234.5), "1234.5");
    }

    #[test]
    fn batch_matches_single_queries() {
        for name in ["dekking", "kochel", "lifted-daun"] {
            let e = builtin(name).unwrap();
            let plan = SamplePlan::new(1..=2).with_random(10, 4).with_merge(MergeBudget::TileAreas(2));
            let queries = plan_queries(&e.rules, &e.window, &plan).unwrap();
            let batch = cover_batch(&e.rules, &e.window, &queries, &plan.merge).unwrap();
            for (q, b) in queries.iter().zip(&batch).step_by(5) {
                let single = cover_fragments(&e.rules, &e.window, q, &plan.merge).unwrap();
                assert_eq!(single.tiles, b.tiles);
                assert_eq!(single.fragments, b.fragments);
                assert_eq!(single.total_area, b.total_area);
            }
            let est = estimate_arrwwid(&e.rules, &e.window, &plan).unwrap();
            let summary = summarise(&batch, plan);
            assert_eq!(est.max_fragments, summary.max_fragments);
            assert_eq!(est.max_tiles, summary.max_tiles);
            assert_eq!(
                est.fragments_witness.map(|w| w.query.center),
                summary.fragments_witness.map(|w| w.query.center)
            );
        }
    }
}
