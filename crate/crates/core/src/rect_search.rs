//! Exhaustive search for uniform rectangular tilings of vertex degree three.
//!
//! A rectangle of aspect ratio `α = p/q` is cut into `t = n²` copies of
//! itself scaled by `1/n`. Everything happens on the integer grid where the
//! big rectangle is `n·p × n·q` cells and each tile is `p × q` (upright) or
//! `q × p` (rotated).

use std::collections::{BTreeSet, HashMap};

use num_integer::{gcd, Roots};
use serde::Serialize;

use crate::certify::{certify_max_degree, CertificateStatus};
use crate::coord::Coord;
use crate::geom::{Linear, Point, Similarity};
use crate::ruleset::{serialize_ruleset, Child, Rule, RuleSet};
use crate::shape::Shape;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RectSearchError {
    #[error("packing enumeration stopped after {explored} nodes")]
    BudgetExceeded { explored: u64 },
}

/// An aspect ratio `p/q` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Ratio {
    pub p: i64,
    pub q: i64,
}

impl Ratio {
    pub fn new(p: i64, q: i64) -> Ratio {
        let g = gcd(p, q);
        Ratio { p: p / g, q: q / g }
    }

    pub fn to_coord(self) -> Coord {
        Coord::ratio(self.p, self.q)
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

fn exact_sqrt(t: u64) -> Option<i64> {
    let n = t.sqrt();
    (n * n == t).then_some(n as i64)
}

/// Aspect ratios allowed for `t` tiles: `α = (√t − n_hh)/n_wh > 1` such that
/// the horizontal crossing equation `α·n_ww + n_hw = α·√t` and the vertical one
/// `α·n_wh + n_hh = √t` each have, for every variable, a non-negative solution
/// in which that variable is positive.
///
/// With `α = p/q` in lowest terms, `n_ww = √t` and `n_hh = √t` are always
/// solutions; a positive `n_hw` needs `q ≤ √t` and a positive `n_wh` needs
/// `p ≤ √t`.
pub fn eligible_ratios(t: u64) -> Vec<Ratio> {
    let Some(n) = exact_sqrt(t) else { return Vec::new() };
    let mut out = BTreeSet::new();
    for n_wh in 1..=n {
        for n_hh in 0..n {
            if n - n_hh <= n_wh {
                continue;
            }
            let alpha = Ratio::new(n - n_hh, n_wh);
            if alpha.p <= n && alpha.q <= n {
                out.insert(alpha);
            }
        }
    }
    out.into_iter().collect()
}

/// A tile of a packing in grid cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Placed {
    pub x: i64,
    pub y: i64,
    pub rotated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Packing {
    pub t: u64,
    pub alpha: Ratio,
    pub tiles: Vec<Placed>,
    /// All tiles equal and aligned in rows and columns.
    pub regular: bool,
}

impl Packing {
    fn n(&self) -> i64 {
        exact_sqrt(self.t).expect("square count")
    }

    /// Width and height of the big rectangle in cells.
    pub fn extent(&self) -> (i64, i64) {
        (self.n() * self.alpha.p, self.n() * self.alpha.q)
    }

    pub fn tile_size(&self, tile: &Placed) -> (i64, i64) {
        if tile.rotated {
            (self.alpha.q, self.alpha.p)
        } else {
            (self.alpha.p, self.alpha.q)
        }
    }

    /// Largest number of tiles sharing an interior point.
    pub fn max_interior_degree(&self) -> usize {
        let (w, h) = self.extent();
        let mut best = 0;
        for x in 1..w {
            for y in 1..h {
                let d = self
                    .tiles
                    .iter()
                    .filter(|t| {
                        let (tw, th) = self.tile_size(t);
                        t.x <= x && x <= t.x + tw && t.y <= y && y <= t.y + th
                    })
                    .count();
                best = best.max(d);
            }
        }
        best
    }
}

fn canonical_tiles(tiles: &[Placed], w: i64, h: i64, size: impl Fn(bool) -> (i64, i64)) -> Vec<Placed> {
    let mut best: Option<Vec<Placed>> = None;
    for (fx, fy) in [(false, false), (true, false), (false, true), (true, true)] {
        let mut v: Vec<Placed> = tiles
            .iter()
            .map(|t| {
                let (tw, th) = size(t.rotated);
                Placed {
                    x: if fx { w - t.x - tw } else { t.x },
                    y: if fy { h - t.y - th } else { t.y },
                    rotated: t.rotated,
                }
            })
            .collect();
        v.sort();
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    best.expect("four symmetries")
}

fn is_regular(tiles: &[Placed]) -> bool {
    let xs: BTreeSet<i64> = tiles.iter().map(|t| t.x).collect();
    let ys: BTreeSet<i64> = tiles.iter().map(|t| t.y).collect();
    tiles.iter().all(|t| t.rotated == tiles[0].rotated) && xs.len() * ys.len() == tiles.len()
}

/// All partitions of the `α`-rectangle into `t` tiles, up to the rectangle's
/// symmetries, in a deterministic order.
pub fn enumerate_packings(t: u64, alpha: Ratio, budget: u64) -> Result<Vec<Packing>, RectSearchError> {
    let Some(n) = exact_sqrt(t) else { return Ok(Vec::new()) };
    let (w, h) = (n * alpha.p, n * alpha.q);
    let size = |rotated: bool| if rotated { (alpha.q, alpha.p) } else { (alpha.p, alpha.q) };
    let mut grid = vec![false; (w * h) as usize];
    let mut placed = Vec::new();
    let mut found = BTreeSet::new();
    let mut explored = 0u64;

    #[allow(clippy::too_many_arguments)]
    fn fill(
        grid: &mut [bool],
        w: i64,
        h: i64,
        size: &dyn Fn(bool) -> (i64, i64),
        placed: &mut Vec<Placed>,
        found: &mut BTreeSet<Vec<Placed>>,
        explored: &mut u64,
        budget: u64,
    ) -> Result<(), RectSearchError> {
        *explored += 1;
        if *explored > budget {
            return Err(RectSearchError::BudgetExceeded { explored: *explored - 1 });
        }
        let Some(first) = grid.iter().position(|c| !c) else {
            found.insert(canonical_tiles(placed, w, h, size));
            return Ok(());
        };
        let (x, y) = (first as i64 % w, first as i64 / w);
        for rotated in [false, true] {
            let (tw, th) = size(rotated);
            if rotated && tw == th {
                continue;
            }
            if x + tw > w || y + th > h {
                continue;
            }
            let cells = (y..y + th).flat_map(|yy| (x..x + tw).map(move |xx| (yy * w + xx) as usize));
            if cells.clone().any(|c| grid[c]) {
                continue;
            }
            for c in cells.clone() {
                grid[c] = true;
            }
            placed.push(Placed { x, y, rotated });
            fill(grid, w, h, size, placed, found, explored, budget)?;
            placed.pop();
            for c in cells {
                grid[c] = false;
            }
        }
        Ok(())
    }

    fill(&mut grid, w, h, &size, &mut placed, &mut found, &mut explored, budget)?;
    Ok(found
        .into_iter()
        .map(|tiles| {
            let regular = is_regular(&tiles);
            Packing { t, alpha, tiles, regular }
        })
        .collect())
}

/// The four orthogonal maps taking the base box onto a tile of the given orientation.
fn orientation_options(rotated: bool) -> [Linear; 4] {
    let l = |rot: u8, reflect: bool| Linear::Planar { rot, reflect };
    if rotated {
        [l(3, false), l(9, false), l(3, true), l(9, true)]
    } else {
        [l(0, false), l(6, false), l(0, true), l(6, true)]
    }
}

type IMat = [[i64; 2]; 2];

fn int_matrix(l: &Linear) -> IMat {
    let e0 = l.apply(&Point::xy(Coord::one(), Coord::zero()));
    let e1 = l.apply(&Point::xy(Coord::zero(), Coord::one()));
    let c = |v: &Coord| v.as_small_ratio().expect("integer").0;
    [[c(&e0[0]), c(&e1[0])], [c(&e0[1]), c(&e1[1])]]
}

/// Child placements of a packing with the given orientation choices.
pub fn packing_ruleset(packing: &Packing, choice: &[usize], name: &str) -> RuleSet {
    let n = packing.n();
    let cell = Coord::ratio(1, n * packing.alpha.q);
    let scale = Coord::ratio(1, n);
    let base = Shape::Box(vec![packing.alpha.to_coord(), Coord::one()]);
    let children = packing
        .tiles
        .iter()
        .zip(choice)
        .map(|(t, &c)| {
            let linear = orientation_options(t.rotated)[c];
            let m = int_matrix(&linear);
            // image of the base box [0,p]×[0,q] (cells of the child) under m
            let (p, q) = (packing.alpha.p, packing.alpha.q);
            let xs = [0, m[0][0] * p, m[0][1] * q, m[0][0] * p + m[0][1] * q];
            let ys = [0, m[1][0] * p, m[1][1] * q, m[1][0] * p + m[1][1] * q];
            let (mx, my) = (*xs.iter().min().expect("four"), *ys.iter().min().expect("four"));
            let translation = Point::xy(&Coord::int(t.x - mx) * &cell, &Coord::int(t.y - my) * &cell);
            Child { rule: 0, placement: Similarity { scale: scale.clone(), linear, translation }, reversed: false }
        })
        .collect();
    RuleSet {
        name: Some(name.to_string()),
        dim: 2,
        unit: 0,
        rules: vec![Rule { name: "R".into(), base, children }],
    }
}

/// Multiplicities of level-two vertices on the boundary of one tile, for
/// each of its four orientation choices, in level-two cells.
fn boundary_multiplicities(packing: &Packing, tile: &Placed) -> Vec<HashMap<(i64, i64), usize>> {
    let n = packing.n();
    let (pw, ph) = packing.extent();
    let (tw, th) = packing.tile_size(tile);
    let (ox, oy) = (tile.x * n, tile.y * n);
    let (ex, ey) = ((tile.x + tw) * n, (tile.y + th) * n);
    orientation_options(tile.rotated)
        .iter()
        .map(|l| {
            let m = int_matrix(l);
            let map = |x: i64, y: i64| (m[0][0] * x + m[0][1] * y, m[1][0] * x + m[1][1] * y);
            let corners = [map(0, 0), map(pw, 0), map(0, ph), map(pw, ph)];
            let mx = corners.iter().map(|c| c.0).min().expect("four");
            let my = corners.iter().map(|c| c.1).min().expect("four");
            let mut out: HashMap<(i64, i64), usize> = HashMap::new();
            let boxes: Vec<(i64, i64, i64, i64)> = packing
                .tiles
                .iter()
                .map(|c| {
                    let (cw, ch) = packing.tile_size(c);
                    let a = map(c.x, c.y);
                    let b = map(c.x + cw, c.y + ch);
                    (ox + a.0.min(b.0) - mx, oy + a.1.min(b.1) - my, ox + a.0.max(b.0) - mx, oy + a.1.max(b.1) - my)
                })
                .collect();
            for &(x0, y0, x1, y1) in &boxes {
                for (x, y) in [(x0, y0), (x1, y0), (x0, y1), (x1, y1)] {
                    let on_boundary = x == ox || x == ex || y == oy || y == ey;
                    if on_boundary && !out.contains_key(&(x, y)) {
                        let k = boxes.iter().filter(|b| b.0 <= x && x <= b.2 && b.1 <= y && y <= b.3).count();
                        out.insert((x, y), k);
                    }
                }
            }
            // boundary points that are no child corner still belong to one child
            out
        })
        .collect()
}

type Multiplicities = Vec<Vec<HashMap<(i64, i64), usize>>>;
type PointChecks = Vec<Vec<((i64, i64), Vec<usize>)>>;

/// Level-two boundary multiplicities of every tile and, for each tile index,
/// the interior level-two vertices whose owners are all decided once that
/// tile's orientation is chosen.
fn level_two_checks(packing: &Packing) -> (Multiplicities, PointChecks) {
    let n = packing.n();
    let (pw, ph) = packing.extent();
    let (gw, gh) = (pw * n, ph * n);
    let mult: Multiplicities = packing.tiles.iter().map(|t| boundary_multiplicities(packing, t)).collect();
    let mut points: BTreeSet<(i64, i64)> = BTreeSet::new();
    for m in &mult {
        for opt in m {
            points.extend(opt.keys().filter(|&&(x, y)| 0 < x && x < gw && 0 < y && y < gh));
        }
    }
    let mut checks: PointChecks = vec![Vec::new(); packing.tiles.len()];
    for &(x, y) in &points {
        let owners: Vec<usize> = packing
            .tiles
            .iter()
            .enumerate()
            .filter(|(_, t)| {
                let (tw, th) = packing.tile_size(t);
                t.x * n <= x && x <= (t.x + tw) * n && t.y * n <= y && y <= (t.y + th) * n
            })
            .map(|(i, _)| i)
            .collect();
        let last = *owners.iter().max().expect("point lies in some tile");
        checks[last].push(((x, y), owners));
    }
    (mult, checks)
}

fn level_two_ok(i: usize, choice: &[usize], mult: &Multiplicities, checks: &PointChecks) -> bool {
    checks[i]
        .iter()
        .all(|(p, owners)| owners.iter().map(|&o| mult[o][choice[o]].get(p).copied().unwrap_or(1)).sum::<usize>() <= 3)
}

/// Orientation assignments whose level-two interior vertices all have degree
/// at most three, in lexicographic order. `pruned` counts rejected partial
/// assignments.
pub fn level_two_assignments(packing: &Packing, limit: usize, pruned: &mut u64) -> Vec<Vec<usize>> {
    let (mult, checks) = level_two_checks(packing);
    let mut out = Vec::new();
    let mut choice = Vec::with_capacity(packing.tiles.len());

    fn rec(
        i: usize,
        choice: &mut Vec<usize>,
        mult: &Multiplicities,
        checks: &PointChecks,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
        pruned: &mut u64,
    ) {
        if out.len() >= limit {
            return;
        }
        if i == mult.len() {
            out.push(choice.clone());
            return;
        }
        for c in 0..4 {
            choice.push(c);
            if level_two_ok(i, choice, mult, checks) {
                rec(i + 1, choice, mult, checks, out, limit, pruned);
            } else {
                *pruned += 1;
            }
            choice.pop();
        }
    }

    rec(0, &mut choice, &mult, &checks, &mut out, limit, pruned);
    out
}

/// Statistics for one tile count.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SizeStats {
    pub t: u64,
    pub ratios: Vec<String>,
    pub packings: usize,
    pub regular_packings: usize,
    /// Packings with four tiles meeting at a point.
    pub packings_refuted: usize,
    /// Partial orientation assignments rejected at level two.
    pub pruned: u64,
    /// Partial orientation assignments rejected by learned nogoods.
    pub nogood_pruned: u64,
    pub certificates: usize,
    pub counterexamples: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub t: u64,
    pub alpha: String,
    pub rules: String,
    #[serde(skip)]
    pub ruleset: RuleSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub t_max: u64,
    pub sizes: Vec<SizeStats>,
    pub accepted: Vec<Candidate>,
    /// Set when a budget cut the search short.
    pub partial: bool,
}

const LEAF_LIMIT: u64 = 1 << 20;
const PACKING_BUDGET: u64 = 50_000_000;

/// A canonical text for a single-rule rectangular rule set, invariant under
/// the rectangle's symmetries.
fn canonical_rules(rs: &RuleSet) -> String {
    let (w, h) = match &rs.rules[0].base {
        Shape::Box(e) => (e[0].clone(), e[1].clone()),
        _ => unreachable!("rectangular search"),
    };
    let mut best: Option<String> = None;
    for g in [
        Linear::Planar { rot: 0, reflect: false },
        Linear::Planar { rot: 6, reflect: false },
        Linear::Planar { rot: 0, reflect: true },
        Linear::Planar { rot: 6, reflect: true },
    ] {
        // g maps the big rectangle onto itself after translating back
        let img = g.apply(&Point::xy(w.clone(), h.clone()));
        let shift = Point::xy(
            if img[0].is_negative() { w.clone() } else { Coord::zero() },
            if img[1].is_negative() { h.clone() } else { Coord::zero() },
        );
        let gs = Similarity { scale: Coord::one(), linear: g, translation: shift };
        let gi = gs.inverse();
        let mut kids: Vec<String> = rs.rules[0]
            .children
            .iter()
            .map(|c| {
                let p = gs.compose(&c.placement).compose(&gi);
                format!("{:?} {}", p.linear, p.translation)
            })
            .collect();
        kids.sort();
        let s = kids.join(";");
        if best.as_ref().is_none_or(|b| s < *b) {
            best = Some(s);
        }
    }
    best.expect("four symmetries")
}

/// Depth-first search over the orientation assignments of one packing.
///
/// A counterexample at a vertex only involves the child indices occurring in
/// the addresses of the tiles around it, so the choices at those indices form
/// a nogood that rules out every assignment agreeing with them.
struct AssignmentSearch<'a> {
    packing: &'a Packing,
    alpha: Ratio,
    budget: usize,
    mult: Multiplicities,
    checks: PointChecks,
    /// Nogoods as `(index, choice)` lists, filed under their largest index.
    nogoods: Vec<Vec<Vec<(usize, usize)>>>,
    leaves: u64,
    seen: &'a mut BTreeSet<String>,
    stats: &'a mut SizeStats,
    accepted: &'a mut Vec<Candidate>,
}

impl AssignmentSearch<'_> {
    fn admissible(&mut self, i: usize, choice: &[usize]) -> bool {
        if !level_two_ok(i, choice, &self.mult, &self.checks) {
            self.stats.pruned += 1;
            return false;
        }
        if self.nogoods[i].iter().any(|ng| ng.iter().all(|&(k, c)| choice[k] == c)) {
            self.stats.nogood_pruned += 1;
            return false;
        }
        true
    }

    /// Returns the index to back-jump to after a new nogood.
    fn run(&mut self, i: usize, choice: &mut Vec<usize>) -> Option<usize> {
        if self.leaves >= LEAF_LIMIT {
            return None;
        }
        if i == self.packing.tiles.len() {
            self.leaves += 1;
            return self.leaf(choice);
        }
        for c in 0..4 {
            choice.push(c);
            let jump = if self.admissible(i, choice) { self.run(i + 1, choice) } else { None };
            choice.pop();
            if let Some(m) = jump {
                if m < i {
                    return Some(m);
                }
            }
        }
        None
    }

    fn leaf(&mut self, choice: &[usize]) -> Option<usize> {
        let rs = packing_ruleset(self.packing, choice, "candidate");
        if !self.seen.insert(canonical_rules(&rs)) {
            return None;
        }
        let cert = certify_max_degree(&rs, 3, self.budget).expect("planar rectilinear uniform");
        match cert.status {
            CertificateStatus::Certified => {
                self.stats.certificates += 1;
                self.accepted.push(Candidate {
                    t: self.packing.t,
                    alpha: self.alpha.to_string(),
                    rules: serialize_ruleset(&rs),
                    ruleset: rs,
                });
                None
            }
            CertificateStatus::Counterexample { tiles, .. } => {
                self.stats.counterexamples += 1;
                let indices: BTreeSet<usize> = tiles.iter().flatten().map(|&k| k as usize).collect();
                let nogood: Vec<(usize, usize)> = indices.iter().map(|&k| (k, choice[k])).collect();
                let m = *indices.last().expect("stars are non-empty");
                self.nogoods[m].push(nogood);
                Some(m)
            }
            CertificateStatus::Inconclusive { .. } => {
                self.stats.inconclusive += 1;
                None
            }
        }
    }
}

/// Search every square tile count up to `t_max` for rule sets whose vertex
/// degree is certified to stay at most three; `budget` bounds each certificate.
pub fn search_min_rect_tiling(t_max: u64, budget: usize) -> SearchReport {
    let mut sizes = Vec::new();
    let mut accepted: Vec<Candidate> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut partial = false;
    let mut n = 2;
    while (n * n) as u64 <= t_max {
        let t = (n * n) as u64;
        let ratios = eligible_ratios(t);
        let mut stats = SizeStats { t, ratios: ratios.iter().map(|r| r.to_string()).collect(), ..Default::default() };
        for alpha in ratios {
            let packings = match enumerate_packings(t, alpha, PACKING_BUDGET) {
                Ok(p) => p,
                Err(_) => {
                    partial = true;
                    continue;
                }
            };
            for packing in packings {
                stats.packings += 1;
                if packing.regular {
                    stats.regular_packings += 1;
                }
                if packing.max_interior_degree() > 3 {
                    stats.packings_refuted += 1;
                    continue;
                }
                let (mult, checks) = level_two_checks(&packing);
                let mut search = AssignmentSearch {
                    packing: &packing,
                    alpha,
                    budget,
                    mult,
                    checks,
                    nogoods: vec![Vec::new(); packing.tiles.len()],
                    leaves: 0,
                    seen: &mut seen,
                    stats: &mut stats,
                    accepted: &mut accepted,
                };
                search.run(0, &mut Vec::with_capacity(packing.tiles.len()));
                if search.leaves >= LEAF_LIMIT {
                    partial = true;
                }
            }
        }
        sizes.push(stats);
        n += 1;
    }
    SearchReport { t_max, sizes, accepted, partial }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_for_small_counts() {
        assert_eq!(eligible_ratios(4), vec![Ratio::new(2, 1)]);
        assert_eq!(eligible_ratios(9), vec![Ratio::new(2, 1), Ratio::new(3, 1), Ratio::new(3, 2)]);
        assert!(eligible_ratios(16).contains(&Ratio::new(3, 2)));
        assert!(eligible_ratios(12).is_empty());
    }

    #[test]
    fn nine_tiles_include_regular_grid() {
        let ps = enumerate_packings(9, Ratio::new(2, 1), 1_000_000).unwrap();
        assert!(ps.iter().any(|p| p.regular));
        assert!(ps.iter().all(|p| p.tiles.len() == 9));
    }
}
