use arrwwid_core::catalog::builtin;
use arrwwid_core::cover::{cover_fragments, MergeBudget};
use arrwwid_core::sim::{
    measure_queries, price, random_queries, simulate, uniform_points, write_report_csv, CostModel, Layout,
};
use arrwwid_core::tiling::DEFAULT_TILE_BUDGET;
use proptest::prelude::*;

fn setup(name: &str, seed: u64) -> (arrwwid_core::RuleSet, arrwwid_core::catalog::Window, Layout, Vec<arrwwid_core::cover::QueryRange>) {
    let e = builtin(name).unwrap();
    let points = uniform_points(&e.rules, 5000, seed);
    let layout = Layout::build(&e.rules, 4, DEFAULT_TILE_BUDGET, &points).unwrap();
    let queries = random_queries(&e.rules, 40, 0.02, 0.12, seed + 1);
    (e.rules, e.window, layout, queries)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn cost_is_additive_over_query_sets(seed in 0u64..1000, split in 1usize..39, seek in 0.0f64..100.0, scan in 0.0f64..5.0) {
        let (rs, w, layout, queries) = setup("hilbert", seed);
        let model = CostModel::new(seek, scan).unwrap();
        let all = simulate(&rs, &w, &layout, &queries, model).unwrap();
        let a = simulate(&rs, &w, &layout, &queries[..split], model).unwrap();
        let b = simulate(&rs, &w, &layout, &queries[split..], model).unwrap();
        prop_assert_eq!(all.fragments, a.fragments + b.fragments);
        prop_assert_eq!(all.scanned, a.scanned + b.scanned);
        prop_assert_eq!(all.false_answers, a.false_answers + b.false_answers);
        prop_assert!((all.cost - a.cost - b.cost).abs() <= 1e-9 * all.cost.max(1.0));
        for q in &all.queries {
            let want = seek * q.fragments as f64 + scan * q.scanned as f64;
            prop_assert!((q.cost - want).abs() <= 1e-9 * want.max(1.0));
            prop_assert_eq!(q.scanned, q.answers + q.false_answers);
        }
    }
}

#[test]
fn seek_only_cost_counts_cover_fragments() {
    for name in ["zorder", "dekking", "coil"] {
        let (rs, w, layout, queries) = setup(name, 3);
        let rep = simulate(&rs, &w, &layout, &queries, CostModel::new(7.0, 0.0).unwrap()).unwrap();
        let fragments: usize =
            queries.iter().map(|q| cover_fragments(&rs, &w, q, &MergeBudget::Off).unwrap().fragments.len()).sum();
        assert_eq!(rep.cost, 7.0 * fragments as f64, "{name}");
        assert_eq!(rep.fragments, fragments, "{name}");
    }
}

#[test]
fn answers_are_exactly_the_points_in_range() {
    let (rs, w, layout, queries) = setup("hilbert", 5);
    let measured = measure_queries(&rs, &w, &layout, &queries).unwrap();
    for (q, m) in queries.iter().zip(&measured) {
        let (c, r) = (q.center.to_f64(), q.radius.to_f64());
        let inside = layout
            .points
            .iter()
            .filter(|p| (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) < r * r)
            .count();
        assert_eq!(m.answers, inside);
    }
}

#[test]
fn reports_are_byte_identical_for_equal_seeds() {
    let render = |seed: u64| {
        let (rs, w, layout, queries) = setup("kochel", seed);
        let m = measure_queries(&rs, &w, &layout, &queries).unwrap();
        let rep = price(&m, CostModel::new(100.0, 1.0).unwrap(), layout.depth);
        let mut buf = Vec::new();
        write_report_csv(&mut buf, &rep).unwrap();
        buf
    };
    assert_eq!(render(11), render(11));
    assert_ne!(render(11), render(12));
}

#[test]
fn negative_costs_are_rejected() {
    assert!(CostModel::new(-1.0, 1.0).is_err());
    assert!(CostModel::new(1.0, -0.5).is_err());
}
