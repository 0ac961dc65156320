use arrwwid_core::catalog::{builtin, names, predicted_arrwwid, predicted_arrwwid_named, CatalogError, Family};
use arrwwid_core::certify::{certify_max_degree, DEFAULT_ROUND_BUDGET};
use arrwwid_core::cover::{estimate_arrwwid, SamplePlan};
use arrwwid_core::tiling::DEFAULT_TILE_BUDGET;
use arrwwid_core::{expand, parse_ruleset, serialize_ruleset, validate_ruleset, vertex_degrees};

#[test]
fn every_entry_validates_exactly() {
    for name in names() {
        let e = builtin(name).unwrap();
        assert!(validate_ruleset(&e.rules).unwrap().is_exact(), "{name}");
        // Rule files survive a round trip through the text format.
        let again = parse_ruleset(&serialize_ruleset(&e.rules)).unwrap();
        assert_eq!(serialize_ruleset(&again), serialize_ruleset(&e.rules), "{name}");
    }
}

#[test]
fn expected_degrees_match_expansions() {
    for name in names() {
        let e = builtin(name).unwrap();
        let per = e.rules.unit_rule().children.len();
        for d in 1..=3 {
            if per.pow(d as u32) > 300_000 {
                break;
            }
            let ts = expand(&e.rules, d, DEFAULT_TILE_BUDGET).unwrap();
            assert_eq!(vertex_degrees(&ts).max_interior, e.expected_degree, "{name} depth {d}");
        }
    }
}

#[test]
fn predictions_match_measurements() {
    let quad = builtin("quadtree").unwrap();
    let est = estimate_arrwwid(&quad.rules, &quad.window, &SamplePlan::new(2..=3)).unwrap();
    assert_eq!(predicted_arrwwid(Family::Hypercube, 2).unwrap(), est.max_tiles as u64);

    let daun = builtin("daun").unwrap();
    assert!(certify_max_degree(&daun.rules, 3, DEFAULT_ROUND_BUDGET).unwrap().is_certified());
    assert_eq!(predicted_arrwwid(Family::LiftedDaun, 2).unwrap(), 3);
}

#[test]
fn prediction_formulas() {
    for d in 2..=6usize {
        assert_eq!(predicted_arrwwid(Family::Hypercube, d).unwrap(), 1 << d);
        assert_eq!(predicted_arrwwid(Family::LiftedDaun, d).unwrap(), 3 << (d - 2));
        assert_eq!(predicted_arrwwid(Family::RecursifiedShifted, d).unwrap(), d as u64 + 1);
        assert_eq!(predicted_arrwwid(Family::LowerBoundTiling, d).unwrap(), d as u64 + 1);
    }
    assert!(predicted_arrwwid(Family::Hypercube, 1).is_err());
    assert!(matches!(predicted_arrwwid_named("spiral", 2), Err(CatalogError::UnknownFamily(_))));
}

#[test]
fn named_entries_have_expected_shape() {
    let daun = builtin("daun").unwrap();
    assert_eq!(daun.rules.unit_rule().children.len(), 16);
    assert_eq!(daun.expected_degree, 3);
    let kochel = builtin("kochel").unwrap();
    assert_eq!(kochel.rules.rules.len(), 2);
    assert_eq!(kochel.expected_arrwwid, Some(3));
    assert_eq!(builtin("hilbert").unwrap().rules.unit_rule().children.len(), 4);
    assert!(builtin("no-such-curve").is_err());
}

#[test]
fn recorded_arrwwid_matches_measurement() {
    for name in ["hilbert", "zorder", "kochel", "ar2w2"] {
        let e = builtin(name).unwrap();
        let est = estimate_arrwwid(&e.rules, &e.window, &SamplePlan::new(2..=4).with_random(100, 1)).unwrap();
        assert_eq!(Some(est.max_fragments), e.expected_arrwwid, "{name}");
    }
}
