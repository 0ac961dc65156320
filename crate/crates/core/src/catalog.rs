//! Built-in tilings and scanning orders, with the properties they are
//! expected to have, and closed-form Arrwwid numbers for families of tilings.

use std::path::PathBuf;

use serde::Serialize;

use crate::coord::Coord;
use crate::ruleset::{parse_ruleset, validate_ruleset, RuleSet, RuleSetError, ValidationError};

/// Environment variable naming a directory of `<name>.rules` files that
/// replace the built-in data.
pub const DATA_ENV: &str = "ARRWWID_DATA";

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("no catalog entry named `{0}`")]
    UnknownEntry(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("dimension {0} is below 2")]
    DimensionTooSmall(usize),
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("entry `{name}`: {source}")]
    Parse { name: String, source: RuleSetError },
    #[error("entry `{name}`: {source}")]
    Invalid { name: String, source: ValidationError },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Tiling,
    Order,
}

/// Canonical-level window: level `k` is used for a query of radius `r` when
/// `lower·r < w_k ≤ upper·r`, `w_k` being the longest tile side at level `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Window {
    pub lower: Coord,
    pub upper: Coord,
}

impl Window {
    /// `(lower·r, lower·r/s]`: exactly one level of a tiling with scale `s` falls inside.
    pub fn for_scale(lower: i64, scale: &Coord) -> Window {
        Window { lower: Coord::int(lower), upper: &Coord::int(lower) / scale }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    pub dim: usize,
    #[serde(skip)]
    pub rules: RuleSet,
    pub expected_degree: usize,
    /// Known Arrwwid number, when established.
    pub expected_arrwwid: Option<usize>,
    pub window: Window,
    pub description: &'static str,
}

struct Spec {
    name: &'static str,
    kind: EntryKind,
    text: &'static str,
    degree: usize,
    arrwwid: Option<usize>,
    /// Twice the ratio of tile width to grid spacing.
    lower: i64,
    description: &'static str,
}

const SPECS: &[Spec] = &[
    Spec {
        name: "quadtree",
        kind: EntryKind::Tiling,
        text: include_str!("../data/quadtree.rules"),
        degree: 4,
        arrwwid: Some(4),
        lower: 2,
        description: "four squares per square",
    },
    Spec {
        name: "daun",
        kind: EntryKind::Tiling,
        text: include_str!("../data/daun.rules"),
        degree: 3,
        arrwwid: Some(3),
        lower: 6,
        description: "sixteen 3:2 rectangles per rectangle, vertex degree three",
    },
    Spec {
        name: "hilbert",
        kind: EntryKind::Order,
        text: include_str!("../data/hilbert.rules"),
        degree: 4,
        arrwwid: Some(4),
        lower: 2,
        description: "Hilbert curve",
    },
    Spec {
        name: "dekking",
        kind: EntryKind::Order,
        text: include_str!("../data/dekking.rules"),
        degree: 4,
        arrwwid: Some(3),
        lower: 2,
        description: "Dekking's 5x5 curve",
    },
    Spec {
        name: "ar2w2",
        kind: EntryKind::Order,
        text: include_str!("../data/ar2w2.rules"),
        degree: 4,
        arrwwid: Some(4),
        lower: 2,
        description: "AR2W2 curve, composite 2x2 with diagonal steps",
    },
    Spec {
        name: "kochel",
        kind: EntryKind::Order,
        text: include_str!("../data/kochel.rules"),
        degree: 4,
        arrwwid: Some(3),
        lower: 2,
        description: "Kochel curve, composite and edge-connected",
    },
    Spec {
        name: "coil",
        kind: EntryKind::Order,
        text: include_str!("../data/coil.rules"),
        degree: 4,
        arrwwid: None,
        lower: 2,
        description: "coil order on the 3x3 grid",
    },
    Spec {
        name: "zorder",
        kind: EntryKind::Order,
        text: include_str!("../data/zorder.rules"),
        degree: 4,
        arrwwid: Some(4),
        lower: 2,
        description: "Lebesgue Z-order",
    },
    Spec {
        name: "peano",
        kind: EntryKind::Order,
        text: include_str!("../data/peano.rules"),
        degree: 4,
        arrwwid: Some(4),
        lower: 2,
        description: "Peano curve",
    },
    Spec {
        name: "lifted-daun",
        kind: EntryKind::Tiling,
        text: include_str!("../data/lifted-daun.rules"),
        degree: 6,
        arrwwid: Some(6),
        lower: 6,
        description: "four layers of the daun tiling",
    },
    Spec {
        name: "cube",
        kind: EntryKind::Tiling,
        text: include_str!("../data/cube.rules"),
        degree: 8,
        arrwwid: Some(8),
        lower: 2,
        description: "eight cubes per cube",
    },
    Spec {
        name: "coil3d",
        kind: EntryKind::Order,
        text: include_str!("../data/coil3d.rules"),
        degree: 8,
        arrwwid: None,
        lower: 2,
        description: "boustrophedon order on the 3x3x3 grid",
    },
    Spec {
        name: "zorder3d",
        kind: EntryKind::Order,
        text: include_str!("../data/zorder3d.rules"),
        degree: 8,
        arrwwid: None,
        lower: 2,
        description: "Z-order on the cube tiling",
    },
];

/// Names of all built-in entries.
pub fn names() -> Vec<&'static str> {
    SPECS.iter().map(|s| s.name).collect()
}

fn load_text(spec: &Spec) -> Result<String, CatalogError> {
    match std::env::var_os(DATA_ENV) {
        Some(dir) => {
            let path = PathBuf::from(dir).join(format!("{}.rules", spec.name));
            std::fs::read_to_string(&path).map_err(|source| CatalogError::Io { path, source })
        }
        None => Ok(spec.text.to_string()),
    }
}

/// Load, parse and validate a built-in entry.
pub fn builtin(name: &str) -> Result<CatalogEntry, CatalogError> {
    let spec = SPECS.iter().find(|s| s.name == name).ok_or_else(|| CatalogError::UnknownEntry(name.to_string()))?;
    let text = load_text(spec)?;
    let rules = parse_ruleset(&text).map_err(|source| CatalogError::Parse { name: name.to_string(), source })?;
    validate_ruleset(&rules).map_err(|source| CatalogError::Invalid { name: name.to_string(), source })?;
    let scale = rules.uniform_scale().unwrap_or_else(|| Coord::ratio(1, 2));
    Ok(CatalogEntry {
        name: spec.name,
        kind: spec.kind,
        dim: rules.dim,
        window: Window::for_scale(spec.lower, &scale),
        expected_degree: spec.degree,
        expected_arrwwid: spec.arrwwid,
        description: spec.description,
        rules,
    })
}

/// Families with a closed-form Arrwwid number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Hypercube,
    LiftedDaun,
    RecursifiedShifted,
    LowerBoundTiling,
}

impl std::str::FromStr for Family {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Family, CatalogError> {
        match s {
            "hypercube" => Ok(Family::Hypercube),
            "lifted-daun" => Ok(Family::LiftedDaun),
            "recursified-shifted" => Ok(Family::RecursifiedShifted),
            "lower-bound-tiling" => Ok(Family::LowerBoundTiling),
            _ => Err(CatalogError::UnknownFamily(s.to_string())),
        }
    }
}

/// Arrwwid number of a family in dimension `d`: `2^d` for hypercubes,
/// `3·2^(d-2)` for lifted daun tilings, `d+1` for recursified shifted
/// tilings and as the lower bound for any tiling.
pub fn predicted_arrwwid(family: Family, d: usize) -> Result<u64, CatalogError> {
    if d < 2 {
        return Err(CatalogError::DimensionTooSmall(d));
    }
    Ok(match family {
        Family::Hypercube => 1 << d,
        Family::LiftedDaun => 3 << (d - 2),
        Family::RecursifiedShifted | Family::LowerBoundTiling => d as u64 + 1,
    })
}

/// As [`predicted_arrwwid`], naming the family by string.
pub fn predicted_arrwwid_named(family: &str, d: usize) -> Result<u64, CatalogError> {
    predicted_arrwwid(family.parse()?, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(predicted_arrwwid(Family::Hypercube, 2).unwrap(), 4);
        assert_eq!(predicted_arrwwid(Family::Hypercube, 3).unwrap(), 8);
        assert_eq!(predicted_arrwwid(Family::LiftedDaun, 2).unwrap(), 3);
        assert_eq!(predicted_arrwwid(Family::LiftedDaun, 3).unwrap(), 6);
        assert_eq!(predicted_arrwwid(Family::RecursifiedShifted, 2).unwrap(), 3);
        assert_eq!(predicted_arrwwid(Family::RecursifiedShifted, 3).unwrap(), 4);
        assert!(matches!(predicted_arrwwid(Family::Hypercube, 1), Err(CatalogError::DimensionTooSmall(1))));
        assert!(matches!(predicted_arrwwid_named("octree", 3), Err(CatalogError::UnknownFamily(_))));
    }

    #[test]
    fn windows_pick_one_level() {
        let quad = builtin("quadtree").unwrap();
        assert_eq!(quad.window.upper, Coord::int(4));
        let dek = builtin("dekking").unwrap();
        assert_eq!((dek.window.lower.clone(), dek.window.upper.clone()), (Coord::int(2), Coord::int(10)));
        assert!(builtin("nonsense").is_err());
    }
}
