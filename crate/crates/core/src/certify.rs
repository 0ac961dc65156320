//! All-depth vertex-degree certificates for planar rectilinear tilings.
//!
//! The degree of a vertex only depends on the tiles around it, and new
//! vertices appear either inside a tile or in the interior of an edge shared
//! by two tiles. The certifier therefore explores three kinds of local
//! configuration, each normalised by translation, scale and the symmetries of
//! the square, until no new configuration appears:
//!
//! * a single tile, which spawns the stars and pairs of its subdivision;
//! * a star, the tiles around one vertex;
//! * a pair, two tiles sharing a segment, which spawns child pairs and the
//!   stars of vertices created on that segment.
//!
//! Every configuration keeps the concrete instance it was first reached by, so
//! a counterexample comes with an absolute vertex.

use std::collections::HashSet;

use serde::Serialize;

use crate::geom::{AaBox, Linear, Point};
use crate::ruleset::{RuleId, RuleSet};
use crate::tiling::{cumulative_fractions, root_tile, subdivide, Tile};

pub const DEFAULT_ROUND_BUDGET: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertifyError {
    #[error("the certifier handles planar tilings only")]
    NotPlanar,
    #[error("the certifier needs a uniform scale factor")]
    NotUniform,
    #[error("the certifier needs axis-aligned box tiles")]
    NotRectilinear,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CertificateStatus {
    Certified,
    /// `tiles` are the addresses of the tiles around `vertex`.
    Counterexample { vertex: Point, degree: usize, depth: usize, tiles: Vec<Vec<u16>> },
    /// The closure did not finish within the given number of refinement rounds.
    Inconclusive { budget: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeCertificate {
    pub bound: usize,
    /// Distinct normalised configurations explored.
    pub configurations: usize,
    pub rounds: usize,
    #[serde(flatten)]
    pub status: CertificateStatus,
}

impl DegreeCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == CertificateStatus::Certified
    }
}

enum Config {
    Tile(Tile),
    Star(Point, Vec<Tile>),
    Pair(Tile, Tile),
}

#[derive(PartialEq, Eq, Hash)]
enum Key {
    Tile(RuleId),
    Star(Vec<(RuleId, Linear, Point)>),
    Pair(Vec<(RuleId, Linear, Point)>),
}

struct Normaliser {
    symmetries: Vec<Linear>,
}

impl Normaliser {
    /// Smallest description of `tiles` seen from `anchor`, over all symmetries.
    fn key(&self, anchor: &Point, tiles: &[&Tile]) -> Vec<(RuleId, Linear, Point)> {
        let scale = tiles[0].transform.scale.recip();
        let rel: Vec<(RuleId, Linear, Point)> = tiles
            .iter()
            .map(|t| (t.rule, t.transform.linear, t.transform.translation.sub(anchor).scaled(&scale)))
            .collect();
        self.symmetries
            .iter()
            .map(|g| {
                let mut v: Vec<_> = rel.iter().map(|(r, l, p)| (*r, g.compose(l), g.apply(p))).collect();
                v.sort();
                v
            })
            .min()
            .expect("symmetry group is non-empty")
    }
}

fn boxed(t: &Tile) -> &AaBox {
    t.region.as_box().expect("rectilinear tiling")
}

/// Decide whether every interior vertex at every depth has at most `bound`
/// incident tiles, exploring at most `budget` refinement rounds.
pub fn certify_max_degree(rs: &RuleSet, bound: usize, budget: usize) -> Result<DegreeCertificate, CertifyError> {
    if rs.dim != 2 {
        return Err(CertifyError::NotPlanar);
    }
    if !rs.is_uniform() {
        return Err(CertifyError::NotUniform);
    }
    if !rs.is_rectilinear() || rs.rules.iter().flat_map(|r| &r.children).any(|c| !c.placement.linear.is_axis_aligned()) {
        return Err(CertifyError::NotRectilinear);
    }
    let cumulative = cumulative_fractions(rs);
    let norm = Normaliser { symmetries: Linear::hyperoctahedral(2) };
    let kids = |t: &Tile| subdivide(rs, &cumulative, t);

    let mut seen: HashSet<Key> = HashSet::new();
    let root = root_tile(rs);
    seen.insert(Key::Tile(root.rule));
    let mut frontier = vec![Config::Tile(root)];
    let mut rounds = 0;
    while !frontier.is_empty() {
        if rounds == budget {
            return Ok(DegreeCertificate {
                bound,
                configurations: seen.len(),
                rounds,
                status: CertificateStatus::Inconclusive { budget },
            });
        }
        rounds += 1;
        let mut next = Vec::new();
        let mut found = Vec::new();
        for config in frontier {
            match config {
                Config::Tile(t) => {
                    let children = kids(&t);
                    let outer = boxed(&t);
                    let mut corners: Vec<Point> = children
                        .iter()
                        .flat_map(|c| boxed(c).corners())
                        .filter(|p| outer.contains_interior(p))
                        .collect();
                    corners.sort();
                    corners.dedup();
                    for p in corners {
                        let around: Vec<Tile> = children.iter().filter(|c| boxed(c).contains(&p)).cloned().collect();
                        found.push(Config::Star(p, around));
                    }
                    for (i, a) in children.iter().enumerate() {
                        for b in &children[i + 1..] {
                            if boxed(a).contact_dim(boxed(b)) == Some(1) {
                                found.push(Config::Pair(a.clone(), b.clone()));
                            }
                        }
                    }
                    found.extend(children.into_iter().map(Config::Tile));
                }
                Config::Star(p, around) => {
                    let inner: Vec<Tile> =
                        around.iter().flat_map(|t| kids(t)).filter(|c| boxed(c).contains(&p)).collect();
                    found.push(Config::Star(p, inner));
                }
                Config::Pair(a, b) => {
                    let seg = boxed(&a).intersection(boxed(&b)).expect("pair shares a segment");
                    let ka = kids(&a);
                    let kb = kids(&b);
                    for x in &ka {
                        for y in &kb {
                            if boxed(x).contact_dim(boxed(y)) == Some(1) {
                                found.push(Config::Pair(x.clone(), y.clone()));
                            }
                        }
                    }
                    let mut points: Vec<Point> = ka
                        .iter()
                        .chain(&kb)
                        .flat_map(|c| boxed(c).corners())
                        .filter(|p| seg.contains(p) && *p != seg.lo && *p != seg.hi)
                        .collect();
                    points.sort();
                    points.dedup();
                    for p in points {
                        let around: Vec<Tile> = ka.iter().chain(&kb).filter(|c| boxed(c).contains(&p)).cloned().collect();
                        found.push(Config::Star(p, around));
                    }
                }
            }
        }
        for config in found {
            if let Config::Star(p, around) = &config {
                if around.len() > bound {
                    return Ok(DegreeCertificate {
                        bound,
                        configurations: seen.len(),
                        rounds,
                        status: CertificateStatus::Counterexample {
                            vertex: p.clone(),
                            degree: around.len(),
                            depth: around[0].address.len(),
                            tiles: around.iter().map(|t| t.address.clone()).collect(),
                        },
                    });
                }
            }
            let key = match &config {
                Config::Tile(t) => Key::Tile(t.rule),
                Config::Star(p, around) => Key::Star(norm.key(p, &around.iter().collect::<Vec<_>>())),
                Config::Pair(a, b) => {
                    let mid = boxed(a).intersection(boxed(b)).expect("touching").center();
                    Key::Pair(norm.key(&mid, &[a, b]))
                }
            };
            if seen.insert(key) {
                next.push(config);
            }
        }
        frontier = next;
    }
    Ok(DegreeCertificate { bound, configurations: seen.len(), rounds, status: CertificateStatus::Certified })
}
