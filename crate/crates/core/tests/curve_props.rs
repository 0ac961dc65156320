use arrwwid_core::catalog::{builtin, EntryKind};
use arrwwid_core::curve::{endpoints, index_to_point, tile_interval};
use arrwwid_core::tiling::{tile_at, DEFAULT_TILE_BUDGET};
use arrwwid_core::{expand, Coord, RuleSet};
use proptest::prelude::*;

const ORDERS: [&str; 10] =
    ["hilbert", "zorder", "peano", "dekking", "kochel", "ar2w2", "coil", "daun", "coil3d", "zorder3d"];

fn order(i: usize) -> RuleSet {
    let e = builtin(ORDERS[i % ORDERS.len()]).unwrap();
    assert!(matches!(e.kind, EntryKind::Order | EntryKind::Tiling));
    e.rules
}

fn depth_for(rs: &RuleSet, want: usize) -> usize {
    let per = rs.unit_rule().children.len();
    (1..=want).rev().find(|&d| per.pow(d as u32) <= 5000).unwrap_or(1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn intervals_partition_the_unit_interval(i in 0usize..40, want in 1usize..4) {
        let rs = order(i);
        let ts = expand(&rs, depth_for(&rs, want), DEFAULT_TILE_BUDGET).unwrap();
        let total: Coord = ts.tiles.iter().map(|t| t.interval.len()).sum();
        prop_assert_eq!(total, Coord::one());
        let order = ts.scan_order();
        for w in order.windows(2) {
            let (a, b) = (&ts.tiles[w[0] as usize], &ts.tiles[w[1] as usize]);
            prop_assert!(a.interval.hi <= b.interval.lo);
            prop_assert_eq!(&a.interval.hi, &b.interval.lo);
        }
    }

    #[test]
    fn interval_is_union_of_children(i in 0usize..40, path in prop::collection::vec(0usize..64, 0..3)) {
        let rs = order(i);
        let mut address = Vec::new();
        let mut tile = tile_at(&rs, &address).unwrap();
        for step in path {
            address.push((step % rs.rules[tile.rule].children.len()) as u16);
            tile = tile_at(&rs, &address).unwrap();
        }
        let n = rs.rules[tile.rule].children.len();
        let mut kids: Vec<_> = (0..n)
            .map(|k| {
                let mut a = address.clone();
                a.push(k as u16);
                tile_interval(&rs, &a).unwrap()
            })
            .collect();
        kids.sort_by(|a, b| a.lo.cmp(&b.lo));
        prop_assert_eq!(&kids[0].lo, &tile.interval.lo);
        prop_assert_eq!(&kids[n - 1].hi, &tile.interval.hi);
        for w in kids.windows(2) {
            prop_assert_eq!(&w[0].hi, &w[1].lo);
        }
    }

    #[test]
    fn curve_stays_within_tile_diameter(i in 0usize..40, a in 0i64..1024, b in 0i64..1024, d in 1usize..4) {
        let rs = order(i);
        let d = depth_for(&rs, d);
        let x = Coord::ratio(a, 1024);
        let ts = expand(&rs, d, DEFAULT_TILE_BUDGET).unwrap();
        let tile = ts.tiles.iter().find(|t| t.interval.lo <= x && x < t.interval.hi).unwrap();
        // A second parameter inside the same tile.
        let y = &tile.interval.lo + &(&tile.interval.len() * &Coord::ratio(b, 1024));
        let eps = Coord::ratio(1, 1 << 12);
        let px = index_to_point(&rs, &x, &eps).unwrap().down.unwrap();
        let py = index_to_point(&rs, &y, &eps).unwrap().down.unwrap();
        let diameter = tile.region.diameter2().unwrap().to_f64().sqrt();
        prop_assert!(px.dist2(&py).to_f64().sqrt() <= diameter + 2.0 * eps.to_f64());
        prop_assert!(tile.region.dist2_to(&px).to_f64().sqrt() <= eps.to_f64());
    }

    #[test]
    fn flipping_reversals_twice_is_identity(i in 0usize..40, path in prop::collection::vec(0usize..64, 0..4)) {
        let rs = order(i);
        let twice = rs.with_reversals_flipped().with_reversals_flipped();
        let mut address = Vec::new();
        let mut tile = tile_at(&rs, &address).unwrap();
        for step in path {
            address.push((step % rs.rules[tile.rule].children.len()) as u16);
            tile = tile_at(&rs, &address).unwrap();
            prop_assert_eq!(tile_interval(&twice, &address).unwrap(), tile.interval.clone());
        }
    }
}

#[test]
fn entry_and_exit_are_fixed_points() {
    for name in ORDERS {
        let rs = builtin(name).unwrap().rules;
        let ep = endpoints(&rs).unwrap();
        for (r, rule) in rs.rules.iter().enumerate() {
            let first = &rule.children[0];
            let last = &rule.children[rule.children.len() - 1];
            let entry = if first.reversed { &ep.exit[first.rule] } else { &ep.entry[first.rule] };
            let exit = if last.reversed { &ep.entry[last.rule] } else { &ep.exit[last.rule] };
            let eps = 1e-12;
            assert!(first.placement.apply(entry).dist2(&ep.entry[r]).to_f64().sqrt() <= eps, "{name} entry");
            assert!(last.placement.apply(exit).dist2(&ep.exit[r]).to_f64().sqrt() <= eps, "{name} exit");
        }
    }
}

#[test]
fn hilbert_corners() {
    // Independent oracle: the classic Hilbert curve runs from (0,0) to (1,0).
    let rs = builtin("hilbert").unwrap().rules;
    let ep = endpoints(&rs).unwrap();
    assert_eq!(ep.entry[rs.unit].to_f64(), vec![0.0, 0.0]);
    assert_eq!(ep.exit[rs.unit].to_f64(), vec![1.0, 0.0]);
    // Quarters of the parameter range end on the quadrant hand-over points.
    let eps = Coord::ratio(1, 1 << 20);
    for (x, want) in [((1, 4), [0.0, 0.5]), ((1, 2), [0.5, 0.5]), ((3, 4), [1.0, 0.5])] {
        let p = index_to_point(&rs, &Coord::ratio(x.0, x.1), &eps).unwrap();
        assert_eq!(p.down.unwrap().to_f64(), want.to_vec());
        assert_eq!(p.up.unwrap().to_f64(), want.to_vec());
    }
}
