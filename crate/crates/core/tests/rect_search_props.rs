use std::collections::BTreeSet;

use arrwwid_core::rect_search::{
    eligible_ratios, enumerate_packings, packing_ruleset, search_min_rect_tiling, Packing, Placed, Ratio,
};
use arrwwid_core::tiling::DEFAULT_TILE_BUDGET;
use arrwwid_core::{expand, validate_ruleset, vertex_degrees};
use num_integer::Integer;

/// Ratios `p/q > 1` for which both crossing equations have, for each of
/// their variables, a non-negative solution with that variable positive.
fn brute_force_ratios(n: i64) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    for q in 1..=n {
        for p in q + 1..=n * q {
            if p.gcd(&q) != 1 {
                continue;
            }
            // p·ww + q·hw = p·n and p·wh + q·hh = q·n, all counts ≤ n·p.
            let mut pos = [false; 4];
            for a in 0..=n * p {
                for b in 0..=n * p {
                    if p * a + q * b == p * n {
                        pos[0] |= a > 0;
                        pos[1] |= b > 0;
                    }
                    if p * a + q * b == q * n {
                        pos[2] |= a > 0;
                        pos[3] |= b > 0;
                    }
                }
            }
            if pos.iter().all(|&x| x) {
                out.insert((p, q));
            }
        }
    }
    out
}

#[test]
fn eligible_ratios_match_brute_force() {
    for n in 2..=5i64 {
        let got: BTreeSet<(i64, i64)> = eligible_ratios((n * n) as u64).into_iter().map(|r| (r.p, r.q)).collect();
        assert_eq!(got, brute_force_ratios(n), "t = {}", n * n);
    }
    for t in [2u64, 3, 5, 8, 12, 15, 20] {
        assert!(eligible_ratios(t).is_empty(), "t = {t}");
    }
}

fn images(p: &Packing) -> Vec<Vec<(i64, i64, i64, i64)>> {
    let (w, h) = p.extent();
    let rects: Vec<(i64, i64, i64, i64)> = p
        .tiles
        .iter()
        .map(|t: &Placed| {
            let (tw, th) = p.tile_size(t);
            (t.x, t.y, t.x + tw, t.y + th)
        })
        .collect();
    [(false, false), (true, false), (false, true), (true, true)]
        .iter()
        .map(|&(fx, fy)| {
            let mut v: Vec<_> = rects
                .iter()
                .map(|&(x0, y0, x1, y1)| {
                    let (a, b) = if fx { (w - x1, w - x0) } else { (x0, x1) };
                    let (c, d) = if fy { (h - y1, h - y0) } else { (y0, y1) };
                    (a, c, b, d)
                })
                .collect();
            v.sort();
            v
        })
        .collect()
}

#[test]
fn packings_are_distinct_up_to_symmetry_and_exact() {
    for (t, alpha) in [(9u64, Ratio::new(2, 1)), (16, Ratio::new(3, 2)), (16, Ratio::new(2, 1)), (16, Ratio::new(3, 1))] {
        let packings = enumerate_packings(t, alpha, 50_000_000).unwrap();
        assert!(!packings.is_empty());
        let mut seen: BTreeSet<Vec<(i64, i64, i64, i64)>> = BTreeSet::new();
        for p in &packings {
            let imgs = images(p);
            assert!(imgs.iter().all(|i| !seen.contains(i)), "t={t} alpha={alpha}: duplicate packing");
            seen.insert(imgs[0].clone());
            let rs = packing_ruleset(p, &vec![0; p.tiles.len()], "p");
            let rep = validate_ruleset(&rs).unwrap();
            assert!(rep.is_exact());
        }
    }
}

#[test]
fn accepted_sixteen_tile_candidates_keep_degree_three() {
    let rep = search_min_rect_tiling(16, 64);
    let found: Vec<_> = rep.accepted.iter().filter(|c| c.t == 16).collect();
    assert!(!found.is_empty());
    for c in found {
        assert_eq!(c.alpha, "3/2");
        for d in 1..=4 {
            let ts = expand(&c.ruleset, d, DEFAULT_TILE_BUDGET).unwrap();
            assert_eq!(vertex_degrees(&ts).max_interior, 3, "depth {d}");
        }
    }
}
