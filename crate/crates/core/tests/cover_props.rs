use std::collections::BTreeSet;

use arrwwid_core::catalog::builtin;
use arrwwid_core::cover::{
    cover_fragments, estimate_arrwwid, plan_queries, tiles_meeting, MergeBudget, QueryKind, QueryRange, SamplePlan,
};
use arrwwid_core::tiling::DEFAULT_TILE_BUDGET;
use arrwwid_core::{expand, Coord, Point};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PLANAR: [&str; 6] = ["quadtree", "hilbert", "zorder", "dekking", "kochel", "daun"];

/// A query with exact centre and radius, inside the unit square, with a
/// canonical level no deeper than three.
fn query(cx: i64, cy: i64, r: i64) -> QueryRange {
    let radius = Coord::ratio(r, 256);
    let span = 256 - 2 * r;
    let c = |v: i64| Coord::ratio(r + v % (span + 1), 256);
    QueryRange::ball(Point::xy(c(cx), c(cy)), radius)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sampled_points_lie_in_cover(i in 0usize..12, cx in 0i64..256, cy in 0i64..256, r in 12i64..64, seed in 0u64..1000) {
        let e = builtin(PLANAR[i % 5]).unwrap();
        let q = query(cx, cy, r);
        let rep = cover_fragments(&e.rules, &e.window, &q, &MergeBudget::Off).unwrap();
        let ts = expand(&e.rules, rep.level, DEFAULT_TILE_BUDGET).unwrap();
        let listed: BTreeSet<&Vec<u16>> = rep.tiles.iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, rad) = (q.center.to_f64(), q.radius.to_f64());
        let mut checked = 0;
        while checked < 1000 {
            let (dx, dy) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if dx * dx + dy * dy >= 1.0 {
                continue;
            }
            let p = Point::xy(
                Coord::ratio(((c[0] + dx * rad) * 65536.0) as i64, 65536),
                Coord::ratio(((c[1] + dy * rad) * 65536.0) as i64, 65536),
            );
            if !q.contains(&p) {
                continue;
            }
            let hit = ts.tiles_containing(&p).into_iter().any(|k| listed.contains(&ts.tiles[k as usize].address));
            prop_assert!(hit, "point {} not covered", p);
            checked += 1;
        }
    }

    #[test]
    fn fragments_are_maximal_runs(i in 0usize..12, cx in 0i64..256, cy in 0i64..256, r in 12i64..64) {
        let e = builtin(PLANAR[i % PLANAR.len()]).unwrap();
        let q = query(cx, cy, r);
        let rep = cover_fragments(&e.rules, &e.window, &q, &MergeBudget::Off).unwrap();
        let flat: Vec<usize> = rep.fragments.iter().flat_map(|f| f.tiles.iter().copied()).collect();
        prop_assert_eq!(flat, (0..rep.tiles.len()).collect::<Vec<_>>());
        // Tiles between two fragments exist and miss the query.
        let all = expand(&e.rules, rep.level, DEFAULT_TILE_BUDGET).unwrap();
        for w in rep.fragments.windows(2) {
            prop_assert!(w[0].hi < w[1].lo);
            let between: Vec<_> = all.tiles.iter().filter(|t| t.interval.lo >= w[0].hi && t.interval.hi <= w[1].lo).collect();
            prop_assert!(!between.is_empty());
            for t in between {
                prop_assert!(!q.meets(&t.region).unwrap());
            }
        }
    }

    #[test]
    fn box_cover_contains_ball_cover(i in 0usize..12, cx in 0i64..256, cy in 0i64..256, r in 12i64..64) {
        let e = builtin(PLANAR[i % PLANAR.len()]).unwrap();
        let ball = query(cx, cy, r);
        let cube = QueryRange::cube(ball.center.clone(), ball.radius.clone());
        let level = 3;
        let a: BTreeSet<Vec<u16>> = tiles_meeting(&e.rules, &ball, level).unwrap().into_iter().map(|t| t.address).collect();
        let b: BTreeSet<Vec<u16>> = tiles_meeting(&e.rules, &cube, level).unwrap().into_iter().map(|t| t.address).collect();
        prop_assert!(a.is_subset(&b));
    }
}

#[test]
fn ball_and_box_estimates_agree() {
    for name in ["quadtree", "daun", "lifted-daun"] {
        let e = builtin(name).unwrap();
        let depths = if name == "lifted-daun" { 1..=1 } else { 1..=3 };
        let ball = estimate_arrwwid(&e.rules, &e.window, &SamplePlan::new(depths.clone())).unwrap();
        let cube = estimate_arrwwid(&e.rules, &e.window, &SamplePlan::new(depths).with_kind(QueryKind::Box)).unwrap();
        assert_eq!(ball.max_tiles, cube.max_tiles, "{name}");
    }
}

#[test]
fn larger_plans_never_lower_the_estimate() {
    let e = builtin("hilbert").unwrap();
    let small = estimate_arrwwid(&e.rules, &e.window, &SamplePlan::new(2..=2)).unwrap();
    let bigger = estimate_arrwwid(&e.rules, &e.window, &SamplePlan::new(2..=3).with_random(30, 1)).unwrap();
    assert!(bigger.max_tiles >= small.max_tiles);
    assert!(bigger.max_fragments >= small.max_fragments);
    assert!(bigger.max_cover_ratio >= small.max_cover_ratio);
    assert!(bigger.queries > small.queries);
}

#[test]
fn seeded_plans_are_reproducible() {
    let e = builtin("dekking").unwrap();
    let plan = SamplePlan::new(1..=2).with_random(40, 77);
    let a = plan_queries(&e.rules, &e.window, &plan).unwrap();
    let b = plan_queries(&e.rules, &e.window, &plan).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let other = plan_queries(&e.rules, &e.window, &plan.clone().with_random(40, 78)).unwrap();
    assert_ne!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&other).unwrap());
}

#[test]
fn merging_never_adds_fragments() {
    let e = builtin("hilbert").unwrap();
    let plan = SamplePlan::new(2..=3);
    for q in plan_queries(&e.rules, &e.window, &plan).unwrap().iter().step_by(11) {
        let raw = cover_fragments(&e.rules, &e.window, q, &MergeBudget::Off).unwrap();
        let merged = cover_fragments(&e.rules, &e.window, q, &MergeBudget::Ratio(200.0)).unwrap();
        assert!(merged.fragments.len() <= raw.fragments.len());
        assert!(merged.total_area >= raw.total_area);
        assert!(merged.cover_ratio <= 200.0 || merged.fragments.len() == raw.fragments.len());
    }
}
