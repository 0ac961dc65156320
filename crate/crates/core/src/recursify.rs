//! Recursified tilings on integer lattices.
//!
//! A coarse tiling is overlaid with a fine copy of itself, every fine cell is
//! handed to one coarse tile, and the substitution is iterated. On the lattice
//! this is a digit system: the coarse tile with lattice coordinate `c` owns the
//! fine cells `A·c + d` for `d` in the digit set `D`, where `A` maps coarse
//! lattice coordinates to fine ones. Level `i` cells of label `c` are then
//! `A^i·c + D + A·D + … + A^(i-1)·D`.
//!
//! Hexagonal cells use axial coordinates `(a, b)` standing for `a + b·ω` with
//! `ω = e^(iπ/3)`, so that the Gosper rotation is plain integer arithmetic.
//! Box cells (squares, shifted squares and shifted cubes) have their lower
//! corner at `offset + B·k` for a lattice vector `k`, in units where every
//! coordinate is an integer.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Write;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

pub type Cell = [i64; 3];

/// Most cells a labelled lattice may hold.
pub const CELL_BUDGET: usize = 4_000_000;

/// Axial directions of the six hexagonal neighbours, counter-clockwise from three o'clock.
pub const HEX_NEIGHBOURS: [Cell; 6] = [[1, 0, 0], [0, 1, 0], [-1, 1, 0], [-1, 0, 0], [0, -1, 0], [1, -1, 0]];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecursifyError {
    #[error("no lattice spec named `{0}`")]
    UnknownSpec(String),
    #[error("level {level} needs {cells} cells, more than the budget of {budget}")]
    BudgetExceeded { level: usize, cells: usize, budget: usize },
    #[error("{digits} digits for an expansion of determinant {det}")]
    WrongDigitCount { digits: usize, det: i64 },
    #[error("digits {0:?} and {1:?} own the same residue class")]
    DuplicateResidue(Cell, Cell),
    #[error("fine cell {cell:?} overlaps coarse cells {first:?} and {second:?} equally and no tiebreak is declared")]
    OverlapTie { cell: Cell, first: Cell, second: Cell },
    #[error("fine cell {0:?} meets no coarse cell")]
    Unassigned(Cell),
    #[error("largest-overlap assignment needs box geometry")]
    MissingGeometry,
    #[error("spec `{0}` carries no boundary displacement data")]
    NoStepGeometry(String),
    #[error("contraction factor {0} is not below one")]
    NonContracting(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    Hex,
    Square,
    ShiftedSquare,
    ShiftedCube,
}

/// Axis-aligned cells: cell `k` is the cube `[offset + B·k, offset + B·k + side]`
/// in fine units; coarse cell `c` is `[n·B·c, n·B·c + n·side]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxGeometry {
    /// Columns are the lattice basis vectors.
    pub basis: [Cell; 3],
    pub side: i64,
    /// Coarse-to-fine linear ratio `n`.
    pub ratio: i64,
    pub offset: Cell,
}

impl BoxGeometry {
    fn corner(&self, dim: usize, k: &Cell) -> Cell {
        let mut p = [0; 3];
        for (i, pi) in p.iter_mut().enumerate().take(dim) {
            *pi = (0..dim).map(|j| self.basis[j][i] * k[j]).sum();
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Assignment {
    /// Cells inside a coarse tile belong to it; `digits` lists the cells of
    /// the tile at the origin after the tiebreak has distributed the rest.
    ContainedPlusTiebreak { digits: Vec<Cell>, tiebreak: String },
    /// Each fine cell goes to the coarse cell it overlaps most. Exact ties
    /// go to the lexicographically smallest coarse cell when `tiebreak` is
    /// set and are an error otherwise.
    LargestOverlap { tiebreak: Option<String> },
}

/// An element `rational + surd·√radicand` of a real quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Surd {
    pub rational: Ratio<i64>,
    pub surd: Ratio<i64>,
    pub radicand: i64,
}

impl Surd {
    pub fn rational(q: Ratio<i64>) -> Surd {
        Surd { rational: q, surd: Ratio::from_integer(0), radicand: 1 }
    }

    pub fn root(coefficient: Ratio<i64>, radicand: i64) -> Surd {
        Surd { rational: Ratio::from_integer(0), surd: coefficient, radicand }
    }

    pub fn is_rational(&self) -> bool {
        self.surd == Ratio::from_integer(0)
    }

    pub fn to_f64(&self) -> f64 {
        let f = |q: Ratio<i64>| *q.numer() as f64 / *q.denom() as f64;
        f(self.rational) + f(self.surd) * (self.radicand as f64).sqrt()
    }

    fn with(&self, rational: Ratio<i64>, surd: Ratio<i64>) -> Surd {
        Surd { rational, surd, radicand: self.radicand }
    }

    /// `self / q` for a non-zero rational `q`.
    pub fn div_rational(&self, q: Ratio<i64>) -> Surd {
        self.with(self.rational / q, self.surd / q)
    }

    /// `q - self`.
    pub fn rsub_rational(&self, q: Ratio<i64>) -> Surd {
        self.with(q - self.rational, -self.surd)
    }

    /// Exact comparison with a rational number.
    pub fn cmp_rational(&self, q: Ratio<i64>) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        let x = self.rational - q;
        let zero = Ratio::from_integer(0);
        match (x.cmp(&zero), self.surd.cmp(&zero)) {
            (Equal, s) | (s, Equal) => s,
            (Greater, Greater) => Greater,
            (Less, Less) => Less,
            (xs, _) => {
                // x and surd·√k have opposite signs; the larger magnitude wins.
                let lhs = x * x;
                let rhs = self.surd * self.surd * Ratio::from_integer(self.radicand);
                match lhs.cmp(&rhs) {
                    Equal => Equal,
                    Greater => xs,
                    Less => xs.reverse(),
                }
            }
        }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.rational);
        }
        let root = format!("{}*sqrt({})", self.surd, self.radicand);
        if self.rational == Ratio::from_integer(0) {
            write!(f, "{root}")
        } else {
            write!(f, "{} + {root}", self.rational)
        }
    }
}

impl Serialize for Surd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// How far one refinement moves a tile boundary, in coarse cell units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepGeometry {
    pub d1: Surd,
    pub factor: Surd,
    /// Radius of the smallest ball meeting more tiles than the vertex degree, coarse tiling.
    pub s: Surd,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeSpec {
    pub name: String,
    pub kind: LatticeKind,
    pub dim: usize,
    /// Fine-to-coarse linear ratio, for display.
    pub ratio: String,
    /// `A`, row-major, acting on lattice coordinates.
    pub expansion: [Cell; 3],
    pub assignment: Assignment,
    pub geometry: Option<BoxGeometry>,
    /// Hexagonal junctions joined by a boundary arc of at most this many edges count as one vertex.
    pub junction_tolerance: usize,
    pub step: Option<StepGeometry>,
}

fn mat_vec(m: &[Cell; 3], dim: usize, v: &Cell) -> Cell {
    let mut out = [0; 3];
    for i in 0..dim {
        out[i] = (0..dim).map(|j| m[i][j] * v[j]).sum();
    }
    out
}

fn add(a: &Cell, b: &Cell) -> Cell {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: &Cell, b: &Cell) -> Cell {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn det(m: &[Cell; 3], dim: usize) -> i64 {
    match dim {
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

fn adjugate(m: &[Cell; 3], dim: usize) -> [Cell; 3] {
    let mut a = [[0; 3]; 3];
    if dim == 2 {
        a[0] = [m[1][1], -m[0][1], 0];
        a[1] = [-m[1][0], m[0][0], 0];
        return a;
    }
    for (i, row) in a.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            *x = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        }
    }
    a
}

impl LatticeSpec {
    pub fn determinant(&self) -> i64 {
        det(&self.expansion, self.dim).abs()
    }

    /// The digit set: cells of the level-1 tile with label zero.
    pub fn digits(&self) -> Result<Vec<Cell>, RecursifyError> {
        let digits = match &self.assignment {
            Assignment::ContainedPlusTiebreak { digits, .. } => digits.clone(),
            Assignment::LargestOverlap { tiebreak } => {
                let g = self.geometry.as_ref().ok_or(RecursifyError::MissingGeometry)?;
                largest_overlap_digits(g, self.dim, tiebreak.is_some())?
            }
        };
        self.check_residues(&digits)?;
        Ok(digits)
    }

    /// Digits must form a complete residue system modulo `A`.
    fn check_residues(&self, digits: &[Cell]) -> Result<(), RecursifyError> {
        let det = det(&self.expansion, self.dim);
        if digits.len() as i64 != det.abs() {
            return Err(RecursifyError::WrongDigitCount { digits: digits.len(), det });
        }
        let adj = adjugate(&self.expansion, self.dim);
        let mut seen: HashMap<Cell, Cell> = HashMap::new();
        for d in digits {
            let mut r = mat_vec(&adj, self.dim, d);
            for x in r.iter_mut() {
                *x = x.rem_euclid(det.abs());
            }
            if let Some(prev) = seen.insert(r, *d) {
                return Err(RecursifyError::DuplicateResidue(prev, *d));
            }
        }
        Ok(())
    }

    /// Coarse labels of the patch that gets recursified: the cells within
    /// hexagonal distance two, or the 3^d block around the origin.
    fn patch(&self) -> Vec<Cell> {
        match self.kind {
            LatticeKind::Hex => {
                let mut v = Vec::new();
                for a in -2i64..=2 {
                    for b in -2i64..=2 {
                        if (a + b).abs() <= 2 {
                            v.push([a, b, 0]);
                        }
                    }
                }
                v
            }
            _ => {
                let r = |i: usize| if i < self.dim { -1..=1 } else { 0..=0 };
                let mut v = Vec::new();
                for a in r(0) {
                    for b in r(1) {
                        for c in r(2) {
                            v.push([a, b, c]);
                        }
                    }
                }
                v
            }
        }
    }
}

fn overlap(a_lo: i64, a_len: i64, b_lo: i64, b_len: i64) -> i64 {
    ((a_lo + a_len).min(b_lo + b_len) - a_lo.max(b_lo)).max(0)
}

/// Fine cells assigned to coarse cell zero by largest exact overlap.
fn largest_overlap_digits(g: &BoxGeometry, dim: usize, tiebreak: bool) -> Result<Vec<Cell>, RecursifyError> {
    let n = g.ratio;
    let reach = 2 * n;
    let range = |i: usize| if i < dim { -reach..=reach } else { 0..=0 };
    let near = |i: usize| if i < dim { -2i64..=2 } else { 0..=0 };
    let mut digits = Vec::new();
    for a in range(0) {
        for b in range(1) {
            for c in range(2) {
                let k = [a, b, c];
                let lo = add(&g.offset, &g.corner(dim, &k));
                // Coarse cells around the one whose lattice index is k/n.
                let base = [a.div_euclid(n), b.div_euclid(n), c.div_euclid(n)];
                let mut best: Option<(i64, Cell)> = None;
                let mut tie: Option<Cell> = None;
                for x in near(0) {
                    for y in near(1) {
                        for z in near(2) {
                            let cc = add(&base, &[x, y, z]);
                            let clo = g.corner(dim, &cc).map(|v| v * n);
                            let vol: i64 = (0..dim).map(|i| overlap(lo[i], g.side, clo[i], n * g.side)).product();
                            if vol == 0 {
                                continue;
                            }
                            match best {
                                Some((v, _)) if vol < v => {}
                                Some((v, prev)) if vol == v => {
                                    let (keep, other) = if cc < prev { (cc, prev) } else { (prev, cc) };
                                    best = Some((v, keep));
                                    tie = Some(other);
                                }
                                _ => {
                                    best = Some((vol, cc));
                                    tie = None;
                                }
                            }
                        }
                    }
                }
                let (_, owner) = best.ok_or(RecursifyError::Unassigned(k))?;
                if let (Some(other), false) = (tie, tiebreak) {
                    return Err(RecursifyError::OverlapTie { cell: k, first: owner, second: other });
                }
                if owner == [0, 0, 0] {
                    digits.push(k);
                }
            }
        }
    }
    Ok(digits)
}

fn hex_expansion(a: i64, b: i64) -> [Cell; 3] {
    // Multiplication by a + b·ω with ω² = ω − 1.
    [[a, -b, 0], [b, a + b, 0], [0, 0, 1]]
}

fn hex_spec(name: &str, ratio: &str, a: i64, b: i64, digits: &[[i64; 2]], tiebreak: &str) -> LatticeSpec {
    LatticeSpec {
        name: name.to_string(),
        kind: LatticeKind::Hex,
        dim: 2,
        ratio: ratio.to_string(),
        expansion: hex_expansion(a, b),
        assignment: Assignment::ContainedPlusTiebreak {
            digits: digits.iter().map(|d| [d[0], d[1], 0]).collect(),
            tiebreak: tiebreak.to_string(),
        },
        geometry: None,
        junction_tolerance: 1,
        step: None,
    }
}

fn q(n: i64, d: i64) -> Ratio<i64> {
    Ratio::new(n, d)
}

/// Names of the built-in lattice specs.
pub fn builtin_names() -> &'static [&'static str] {
    &["hex9", "gosper7", "rhombus4", "tripod", "square4", "shifted-square", "shifted-cube"]
}

pub fn builtin_spec(name: &str) -> Result<LatticeSpec, RecursifyError> {
    let spec = match name {
        "hex9" => hex_spec(
            name,
            "1/3",
            3,
            0,
            &[[-1, 1], [0, 0], [0, 1], [1, -1], [1, 0], [1, 1], [2, -1], [-1, 0], [0, 2]],
            "clockwise from three o'clock, alternately give a boundary cell away and keep one, giving first",
        ),
        "gosper7" => {
            let mut s = hex_spec(
                name,
                "1/sqrt(7)",
                2,
                1,
                &[[0, 0], [1, 0], [0, 1], [-1, 1], [-1, 0], [0, -1], [1, -1]],
                "none: the seven-cell flower tiles the plane",
            );
            s.step = Some(StepGeometry {
                d1: Surd::root(q(1, 14), 3),
                factor: Surd::root(q(1, 7), 7),
                s: Surd::rational(q(1, 2)),
            });
            s
        }
        "rhombus4" => hex_spec(
            name,
            "1/2",
            2,
            0,
            &[[0, 0], [1, 0], [0, 1], [-1, 1]],
            "centre plus the cells at 0, 60 and 120 degrees",
        ),
        "tripod" => hex_spec(
            name,
            "1/2",
            2,
            0,
            &[[0, 0], [1, 0], [-1, 1], [0, -1]],
            "centre plus the cells at 0, 120 and 240 degrees",
        ),
        "square4" => LatticeSpec {
            name: name.to_string(),
            kind: LatticeKind::Square,
            dim: 2,
            ratio: "1/2".to_string(),
            expansion: [[2, 0, 0], [0, 2, 0], [0, 0, 1]],
            assignment: Assignment::LargestOverlap { tiebreak: None },
            geometry: Some(BoxGeometry { basis: [[1, 0, 0], [0, 1, 0], [0, 0, 1]], side: 1, ratio: 2, offset: [0; 3] }),
            junction_tolerance: 0,
            step: None,
        },
        "shifted-square" => LatticeSpec {
            name: name.to_string(),
            kind: LatticeKind::ShiftedSquare,
            dim: 2,
            ratio: "1/3".to_string(),
            expansion: [[3, 0, 0], [0, 3, 0], [0, 0, 1]],
            assignment: Assignment::LargestOverlap { tiebreak: Some("lexicographically smallest coarse cell".to_string()) },
            // Columns shifted by half a square; fine tiling scaled about a coarse centre.
            geometry: Some(BoxGeometry { basis: [[2, 1, 0], [0, 2, 0], [0, 0, 1]], side: 2, ratio: 3, offset: [2, 2, 0] }),
            junction_tolerance: 0,
            step: None,
        },
        "shifted-cube" => LatticeSpec {
            name: name.to_string(),
            kind: LatticeKind::ShiftedCube,
            dim: 3,
            ratio: "1/5".to_string(),
            expansion: [[5, 0, 0], [0, 5, 0], [0, 0, 5]],
            assignment: Assignment::LargestOverlap { tiebreak: None },
            // Columns shifted back (+y) by a third, layers right and front (-y) by a third.
            geometry: Some(BoxGeometry { basis: [[3, 1, 0], [0, 3, 0], [1, -1, 3]], side: 3, ratio: 5, offset: [6, 6, 6] }),
            junction_tolerance: 0,
            step: Some(StepGeometry {
                d1: Surd::root(q(1, 15), 2),
                factor: Surd::rational(q(1, 5)),
                s: Surd::rational(q(1, 6)),
            }),
        },
        _ => return Err(RecursifyError::UnknownSpec(name.to_string())),
    };
    Ok(spec)
}

#[derive(Clone, Debug)]
pub struct LabelledLattice {
    pub spec: LatticeSpec,
    pub level: usize,
    /// Lattice coordinate → coarse label.
    pub cells: HashMap<Cell, Cell>,
    pub labels: Vec<Cell>,
    pub per_label: usize,
}

/// Label the patch around the origin at `levels` levels of substitution.
/// Level zero is the coarse tiling itself.
pub fn recursify(spec: &LatticeSpec, levels: usize) -> Result<LabelledLattice, RecursifyError> {
    let digits = spec.digits()?;
    let labels = spec.patch();
    let per_label = digits.len().checked_pow(levels as u32).unwrap_or(usize::MAX);
    let total = per_label.saturating_mul(labels.len());
    if total > CELL_BUDGET {
        return Err(RecursifyError::BudgetExceeded { level: levels, cells: total, budget: CELL_BUDGET });
    }
    let mut cells: Vec<(Cell, Cell)> = labels.iter().map(|c| (*c, *c)).collect();
    for _ in 0..levels {
        cells = cells
            .par_iter()
            .flat_map_iter(|(x, label)| {
                let ax = mat_vec(&spec.expansion, spec.dim, x);
                digits.iter().map(move |d| (add(&ax, d), *label))
            })
            .collect();
    }
    Ok(LabelledLattice { spec: spec.clone(), level: levels, cells: cells.into_iter().collect(), labels, per_label })
}

impl LabelledLattice {
    pub fn cells_of(&self) -> HashMap<Cell, Vec<Cell>> {
        let mut by: HashMap<Cell, Vec<Cell>> = HashMap::new();
        for (c, l) in &self.cells {
            by.entry(*l).or_default().push(*c);
        }
        for v in by.values_mut() {
            v.sort();
        }
        by
    }

    /// Every label has the same number of cells, and the same cell set up to translation.
    pub fn labels_congruent(&self) -> bool {
        let by = self.cells_of();
        let normalised: Vec<Vec<Cell>> = by
            .values()
            .map(|v| {
                let m = v[0];
                v.iter().map(|c| sub(c, &m)).collect()
            })
            .collect();
        normalised.iter().all(|v| v.len() == self.per_label && *v == normalised[0])
    }

    fn neighbour_offsets(&self) -> Vec<Cell> {
        match &self.spec.geometry {
            None => HEX_NEIGHBOURS.to_vec(),
            Some(g) => {
                let dim = self.spec.dim;
                let r = |i: usize| if i < dim { -2i64..=2 } else { 0..=0 };
                let mut out = Vec::new();
                for a in r(0) {
                    for b in r(1) {
                        for c in r(2) {
                            let p = g.corner(dim, &[a, b, c]);
                            let touching = (0..dim).filter(|&i| p[i].abs() == g.side).count();
                            let overlapping = (0..dim).filter(|&i| p[i].abs() < g.side).count();
                            if touching == 1 && overlapping == dim - 1 {
                                out.push([a, b, c]);
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Labels whose cells do not form one face-connected piece.
    pub fn disconnected_labels(&self) -> Vec<Cell> {
        let offsets = self.neighbour_offsets();
        let mut out: Vec<Cell> = self
            .cells_of()
            .into_iter()
            .filter(|(label, cells)| {
                let set: HashSet<&Cell> = cells.iter().collect();
                let mut seen: HashSet<Cell> = HashSet::from([cells[0]]);
                let mut stack = vec![cells[0]];
                while let Some(c) = stack.pop() {
                    for o in &offsets {
                        let n = add(&c, o);
                        if set.contains(&n) && self.cells.get(&n) == Some(label) && seen.insert(n) {
                            stack.push(n);
                        }
                    }
                }
                seen.len() != cells.len()
            })
            .map(|(l, _)| l)
            .collect();
        out.sort();
        out
    }

    /// Labels whose interior cells, those with every neighbour carrying the
    /// same label, fall apart into several pieces. Face-connected cell sets
    /// can still have interiors that only meet at pinch points in the limit.
    pub fn disconnected_interiors(&self) -> Vec<Cell> {
        let offsets = self.neighbour_offsets();
        let mut out: Vec<Cell> = self
            .cells_of()
            .into_iter()
            .filter(|(label, cells)| {
                let interior: HashSet<Cell> = cells
                    .iter()
                    .filter(|c| offsets.iter().all(|o| self.cells.get(&add(c, o)) == Some(label)))
                    .copied()
                    .collect();
                let Some(start) = interior.iter().min().copied() else { return false };
                let mut seen: HashSet<Cell> = HashSet::from([start]);
                let mut stack = vec![start];
                while let Some(c) = stack.pop() {
                    for o in &offsets {
                        let n = add(&c, o);
                        if interior.contains(&n) && seen.insert(n) {
                            stack.push(n);
                        }
                    }
                }
                seen.len() != interior.len()
            })
            .map(|(l, _)| l)
            .collect();
        out.sort();
        out
    }

    /// CSV dump: one row per cell with its coordinates and label, sorted.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let dim = self.spec.dim;
        let mut w = csv::Writer::from_writer(out);
        let axes = ["x", "y", "z"];
        let mut header: Vec<String> = axes[..dim].iter().map(|a| a.to_string()).collect();
        header.extend(axes[..dim].iter().map(|a| format!("label_{a}")));
        w.write_record(&header)?;
        let mut rows: Vec<(&Cell, &Cell)> = self.cells.iter().collect();
        rows.sort();
        for (c, l) in rows {
            let rec: Vec<String> = c[..dim].iter().chain(&l[..dim]).map(|v| v.to_string()).collect();
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Largest number of labels meeting at an interior vertex.
///
/// On hexagonal lattices every vertex has three cells, so a vertex is taken
/// to be a cluster of three-label junctions joined by boundary arcs of at
/// most `junction_tolerance` edges; at any resolution such a cluster looks
/// like one point. Box lattices count the labels of the closed cells through
/// each cell corner and each half-unit point on a cell edge.
pub fn lattice_degree(ll: &LabelledLattice) -> usize {
    match &ll.spec.geometry {
        None => hex_degree(ll),
        Some(g) => box_degree(ll, g),
    }
}

fn hex_degree(ll: &LabelledLattice) -> usize {
    type Vertex = [Cell; 3];
    let cells = &ll.cells;
    let nb = &HEX_NEIGHBOURS;
    let mut verts: HashMap<Vertex, [Cell; 3]> = HashMap::new();
    for c in cells.keys() {
        for k in 0..6 {
            let mut tri = [*c, add(c, &nb[k]), add(c, &nb[(k + 1) % 6])];
            tri.sort();
            if let (Some(a), Some(b), Some(d)) = (cells.get(&tri[0]), cells.get(&tri[1]), cells.get(&tri[2])) {
                verts.insert(tri, [*a, *b, *d]);
            }
        }
    }
    let distinct = |l: &[Cell; 3]| l[0] != l[1] && l[1] != l[2] && l[0] != l[2];
    let mut junctions: Vec<Vertex> = verts.iter().filter(|(_, l)| distinct(l)).map(|(v, _)| *v).collect();
    junctions.sort();
    let index: HashMap<Vertex, usize> = junctions.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut parent: Vec<usize> = (0..junctions.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    // The vertex across edge xy from the triangle xyz is xyz' with z' = x + y − z.
    let across = |v: &Vertex, x: usize, y: usize| -> Vertex {
        let z = 3 - x - y;
        let mut w = [v[x], v[y], sub(&add(&v[x], &v[y]), &v[z])];
        w.sort();
        w
    };
    // At level zero a single edge is a whole tile side.
    let tau = if ll.level == 0 { 0 } else { ll.spec.junction_tolerance };
    for (ji, j) in junctions.iter().enumerate() {
        for (x, y) in [(0, 1), (1, 2), (0, 2)] {
            let mut edge = [j[x], j[y]];
            let mut cur = across(j, x, y);
            let mut len = 1;
            while len <= tau {
                let Some(labels) = verts.get(&cur) else { break };
                if let Some(&other) = index.get(&cur) {
                    let (a, b) = (find(&mut parent, ji), find(&mut parent, other));
                    parent[a] = b;
                    break;
                }
                // A two-label vertex has exactly two boundary edges; leave by the other one.
                let next = [(0, 1), (1, 2), (0, 2)].into_iter().find(|&(p, q)| {
                    labels[p] != labels[q] && {
                        let mut e = [cur[p], cur[q]];
                        e.sort();
                        let mut f = edge;
                        f.sort();
                        e != f
                    }
                });
                let Some((p, q)) = next else { break };
                edge = [cur[p], cur[q]];
                cur = across(&cur, p, q);
                len += 1;
            }
        }
    }
    let mut clusters: HashMap<usize, HashSet<Cell>> = HashMap::new();
    for (i, j) in junctions.iter().enumerate() {
        let root = find(&mut parent, i);
        clusters.entry(root).or_default().extend(verts[j].iter().copied());
    }
    let junction_max = clusters.values().map(|s| s.len()).max().unwrap_or(0);
    let any_boundary = verts.values().any(|l| l[0] != l[1] || l[1] != l[2]);
    junction_max.max(if any_boundary { 2 } else { 1 })
}

fn box_degree(ll: &LabelledLattice, g: &BoxGeometry) -> usize {
    let dim = ll.spec.dim;
    let side = g.side;
    // Doubled coordinates so that half-unit points on edges are integral.
    let lo_of = |k: &Cell| g.corner(dim, k).map(|v| 2 * v);
    let bucket = |p: &Cell| -> Cell {
        let mut b = [0; 3];
        for i in 0..dim {
            b[i] = p[i].div_euclid(2 * side);
        }
        b
    };
    let mut grid: HashMap<Cell, Vec<(Cell, Cell)>> = HashMap::new();
    for (k, label) in &ll.cells {
        let lo = lo_of(k);
        grid.entry(bucket(&lo)).or_default().push((lo, *label));
    }
    let mut points: HashSet<Cell> = HashSet::new();
    for k in ll.cells.keys() {
        let lo = lo_of(k);
        for axis in 0..dim {
            for corner in 0..(1 << dim) {
                if corner & (1 << axis) != 0 {
                    continue;
                }
                let mut p = lo;
                for i in 0..dim {
                    if corner & (1 << i) != 0 {
                        p[i] += 2 * side;
                    }
                }
                for t in 0..=2 * side {
                    let mut q = p;
                    q[axis] += t;
                    points.insert(q);
                }
            }
        }
    }
    let near = |i: usize| if i < dim { -1i64..=0 } else { 0..=0 };
    points
        .par_iter()
        .map(|p| {
            let b = bucket(p);
            let mut around: Vec<(Cell, Cell)> = Vec::new();
            for x in near(0) {
                for y in near(1) {
                    for z in near(2) {
                        if let Some(v) = grid.get(&add(&b, &[x, y, z])) {
                            around.extend(v.iter().filter(|(lo, _)| (0..dim).all(|i| lo[i] <= p[i] && p[i] <= lo[i] + 2 * side)));
                        }
                    }
                }
            }
            // Interior: every orthant next to p is covered by some cell.
            let covered = (0..(1usize << dim)).all(|sigma| {
                around.iter().any(|(lo, _)| {
                    (0..dim).all(|i| if sigma & (1 << i) != 0 { p[i] < lo[i] + 2 * side } else { lo[i] < p[i] })
                })
            });
            if !covered {
                return 0;
            }
            let labels: HashSet<Cell> = around.iter().map(|(_, l)| *l).collect();
            labels.len()
        })
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct DisplacementBound {
    pub d1: f64,
    pub factor: f64,
    /// `d∞ = d1 / (1 − factor)`.
    pub limit: f64,
    pub s: f64,
    /// `s′ = s − d∞`.
    pub safe_radius: f64,
    /// Closed forms, available when the contraction factor is rational.
    pub exact_limit: Option<Surd>,
    pub exact_safe_radius: Option<Surd>,
}

pub fn displacement_bound(spec: &LatticeSpec) -> Result<DisplacementBound, RecursifyError> {
    let step = spec.step.as_ref().ok_or_else(|| RecursifyError::NoStepGeometry(spec.name.clone()))?;
    step_bound(step)
}

pub fn step_bound(step: &StepGeometry) -> Result<DisplacementBound, RecursifyError> {
    let one = Ratio::from_integer(1);
    let factor = step.factor.to_f64();
    if step.factor.cmp_rational(one) != std::cmp::Ordering::Less {
        return Err(RecursifyError::NonContracting(factor));
    }
    let d1 = step.d1.to_f64();
    let s = step.s.to_f64();
    let limit = d1 / (1.0 - factor);
    let (exact_limit, exact_safe_radius) = if step.factor.is_rational() && step.s.is_rational() {
        let lim = step.d1.div_rational(one - step.factor.rational);
        (Some(lim), Some(lim.rsub_rational(step.s.rational)))
    } else {
        (None, None)
    };
    Ok(DisplacementBound { d1, factor, limit, s, safe_radius: s - limit, exact_limit, exact_safe_radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    #[test]
    fn digit_counts() {
        for (name, n) in [("hex9", 9), ("gosper7", 7), ("rhombus4", 4), ("tripod", 4), ("square4", 4), ("shifted-square", 9), ("shifted-cube", 125)] {
            let spec = builtin_spec(name).unwrap();
            assert_eq!(spec.digits().unwrap().len(), n, "{name}");
        }
    }

    #[test]
    fn shifted_cube_has_no_ties() {
        let mut spec = builtin_spec("shifted-cube").unwrap();
        spec.assignment = Assignment::LargestOverlap { tiebreak: None };
        assert!(spec.digits().is_ok());
    }

    #[test]
    fn duplicate_residue_rejected() {
        let mut spec = builtin_spec("rhombus4").unwrap();
        spec.assignment = Assignment::ContainedPlusTiebreak { digits: vec![[0, 0, 0], [2, 0, 0], [0, 1, 0], [1, 1, 0]], tiebreak: String::new() };
        assert!(matches!(spec.digits(), Err(RecursifyError::DuplicateResidue(..))));
    }

    #[test]
    fn surd_comparison() {
        // 1/6 − √2/12 against 1/21.
        let safe = Surd::root(q(1, 12), 2).rsub_rational(q(1, 6));
        assert_eq!(safe.cmp_rational(q(1, 21)), Ordering::Greater);
        assert_eq!(safe.cmp_rational(q(1, 20)), Ordering::Less);
        assert_eq!(Surd::root(q(1, 1), 4).cmp_rational(q(2, 1)), Ordering::Equal);
    }

    #[test]
    fn non_contracting() {
        let step = StepGeometry { d1: Surd::rational(q(1, 10)), factor: Surd::rational(q(1, 1)), s: Surd::rational(q(1, 2)) };
        assert!(matches!(step_bound(&step), Err(RecursifyError::NonContracting(_))));
    }

    #[test]
    fn level_zero_hex_has_degree_three() {
        let ll = recursify(&builtin_spec("hex9").unwrap(), 0).unwrap();
        assert_eq!(lattice_degree(&ll), 3);
    }
}
