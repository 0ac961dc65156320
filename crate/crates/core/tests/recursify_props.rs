use std::collections::HashSet;

use arrwwid_core::recursify::{builtin_names, builtin_spec, lattice_degree, recursify, Cell, RecursifyError};
use proptest::prelude::*;

fn levels_for(name: &str) -> usize {
    match name {
        "shifted-cube" => 1,
        "hex9" => 3,
        _ => 4,
    }
}

#[test]
fn labels_are_congruent_and_counted() {
    for &name in builtin_names() {
        let spec = builtin_spec(name).unwrap();
        let fine = spec.determinant().unsigned_abs() as usize;
        for level in 0..=levels_for(name) {
            let ll = recursify(&spec, level).unwrap();
            assert_eq!(ll.per_label, fine.pow(level as u32), "{name} level {level}");
            assert_eq!(ll.cells.len(), ll.labels.len() * ll.per_label);
            assert!(ll.labels_congruent(), "{name} level {level}");
            for (_, cells) in ll.cells_of() {
                assert_eq!(cells.len(), ll.per_label);
            }
        }
    }
}

/// Level-`i` cell sets are unions of level-`i-1` cell sets mapped one level down.
#[test]
fn levels_refine_consistently() {
    let spec = builtin_spec("gosper7").unwrap();
    let l2 = recursify(&spec, 2).unwrap();
    let l3 = recursify(&spec, 3).unwrap();
    let fine = spec.determinant().unsigned_abs() as usize;
    let sizes: HashSet<usize> = l3.cells_of().values().map(|v| v.len()).collect();
    assert_eq!(sizes, HashSet::from([l2.per_label * fine]));
}

#[test]
fn degree_three_lattices_stay_at_three() {
    for name in ["hex9", "gosper7"] {
        let spec = builtin_spec(name).unwrap();
        for level in 1..=4 {
            assert_eq!(lattice_degree(&recursify(&spec, level).unwrap()), 3, "{name} level {level}");
        }
    }
    let rhombus = builtin_spec("rhombus4").unwrap();
    assert!((1..=3).any(|l| lattice_degree(&recursify(&rhombus, l).unwrap()) == 4));
}

#[test]
fn tripod_interiors_fall_apart() {
    let spec = builtin_spec("tripod").unwrap();
    let split = (1..=3).find(|&l| !recursify(&spec, l).unwrap().disconnected_interiors().is_empty());
    assert!(split.is_some());
    // The well-behaved lattices keep connected interiors.
    for name in ["gosper7", "hex9"] {
        let ll = recursify(&builtin_spec(name).unwrap(), 3).unwrap();
        assert!(ll.disconnected_labels().is_empty(), "{name}");
    }
}

#[test]
fn unknown_spec_is_rejected() {
    assert!(matches!(builtin_spec("octagon"), Err(RecursifyError::UnknownSpec(_))));
}

fn apply_rows(m: &[Cell; 3], v: &Cell) -> Cell {
    let mut out = [0; 3];
    for (i, row) in m.iter().enumerate() {
        out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// The cells of label `c` are those of any other label `c0`, moved by
    /// `A^level · (c − c0)`.
    #[test]
    fn labels_are_expanded_translates(idx in 0usize..7, level in 0usize..3) {
        let name = builtin_names()[idx % builtin_names().len()];
        let spec = builtin_spec(name).unwrap();
        let level = level.min(levels_for(name));
        let ll = recursify(&spec, level).unwrap();
        let by = ll.cells_of();
        let c0 = ll.labels[0];
        let base: HashSet<Cell> = by[&c0].iter().copied().collect();
        for c in &ll.labels {
            let mut shift = [c[0] - c0[0], c[1] - c0[1], c[2] - c0[2]];
            for _ in 0..level {
                shift = apply_rows(&spec.expansion, &shift);
            }
            let moved: HashSet<Cell> = base.iter().map(|b| [b[0] + shift[0], b[1] + shift[1], b[2] + shift[2]]).collect();
            let actual: HashSet<Cell> = by[c].iter().copied().collect();
            prop_assert_eq!(actual, moved);
        }
    }
}
