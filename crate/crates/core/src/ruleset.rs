//! Rule sets: parsing, canonical serialization, and structural checks.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coord::Coord;
use crate::geom::{polygons_overlap, AaBox, Linear, Point, Similarity};
use crate::shape::{Region, Shape};

pub type RuleId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleSetError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("rule `{rule}` child {index}: scale must be positive")]
    NonPositiveScale { rule: String, index: usize },
    #[error("duplicate rule `{0}`")]
    DuplicateRule(String),
    #[error("rule `{rule}` has {count} children, at least two are required")]
    TooFewChildren { rule: String, count: usize },
    #[error("rule `{rule}`: {message}")]
    Inconsistent { rule: String, message: String },
    #[error("no unit rule declared")]
    MissingUnit,
    #[error("invalid JSON rule set: {0}")]
    Json(String),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Child {
    pub rule: RuleId,
    pub placement: Similarity,
    pub reversed: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rule {
    pub name: String,
    pub base: Shape,
    /// Children in scanning order.
    pub children: Vec<Child>,
}

/// A finite system of recursive rules; the child order doubles as a scanning order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RuleSet {
    pub name: Option<String>,
    pub dim: usize,
    pub unit: RuleId,
    pub rules: Vec<Rule>,
}

impl RuleSet {
    pub fn rule_index(&self, name: &str) -> Option<RuleId> {
        self.rules.iter().position(|r| r.name == name)
    }

    pub fn unit_rule(&self) -> &Rule {
        &self.rules[self.unit]
    }

    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or_else(|| &self.rules[self.unit].name)
    }

    /// Rules reachable from the unit, in discovery order.
    pub fn reachable(&self) -> Vec<RuleId> {
        let mut seen = vec![false; self.rules.len()];
        let mut out = vec![self.unit];
        seen[self.unit] = true;
        let mut i = 0;
        while i < out.len() {
            for c in &self.rules[out[i]].children {
                if !seen[c.rule] {
                    seen[c.rule] = true;
                    out.push(c.rule);
                }
            }
            i += 1;
        }
        out
    }

    /// Region of child `i` of `rule` in the rule's frame.
    pub fn child_region(&self, rule: RuleId, i: usize) -> Region {
        let c = &self.rules[rule].children[i];
        self.rules[c.rule].base.place(&c.placement)
    }

    /// The common child count, when every rule has the same one.
    pub fn size(&self) -> Option<usize> {
        let n = self.rules[0].children.len();
        self.rules.iter().all(|r| r.children.len() == n).then_some(n)
    }

    /// Single shared child scale, when there is one.
    pub fn uniform_scale(&self) -> Option<Coord> {
        let s = self.rules[self.unit].children[0].placement.scale.clone();
        let ok = self.rules.iter().all(|r| r.children.iter().all(|c| c.placement.scale == s));
        ok.then_some(s)
    }

    pub fn is_uniform(&self) -> bool {
        self.size().is_some() && self.uniform_scale().is_some()
    }

    pub fn is_simple(&self) -> bool {
        self.reachable().len() == 1
    }

    pub fn is_rectilinear(&self) -> bool {
        self.rules.iter().all(|r| {
            r.base.is_rectilinear() && r.children.iter().all(|c| c.placement.linear.is_axis_aligned())
        })
    }

    /// Child measures relative to the parent base; equal shares for lattice bases.
    pub fn child_fractions(&self, rule: RuleId) -> Vec<Coord> {
        let r = &self.rules[rule];
        match r.base.measure() {
            Some(total) => {
                let total = total.recip();
                (0..r.children.len())
                    .map(|i| &self.child_region(rule, i).measure().expect("measurable child") * &total)
                    .collect()
            }
            None => {
                let n = Coord::int(r.children.len() as i64).recip();
                vec![n; r.children.len()]
            }
        }
    }

    /// Flip every reversal flag.
    pub fn with_reversals_flipped(&self) -> RuleSet {
        let mut out = self.clone();
        for r in &mut out.rules {
            for c in &mut r.children {
                c.reversed = !c.reversed;
            }
        }
        out
    }

    fn check(&self) -> Result<(), RuleSetError> {
        let mut names = BTreeSet::new();
        for r in &self.rules {
            if !names.insert(r.name.as_str()) {
                return Err(RuleSetError::DuplicateRule(r.name.clone()));
            }
        }
        for r in &self.rules {
            if r.children.len() < 2 {
                return Err(RuleSetError::TooFewChildren { rule: r.name.clone(), count: r.children.len() });
            }
            if let Some(d) = r.base.dim() {
                if d != self.dim {
                    return Err(RuleSetError::Inconsistent {
                        rule: r.name.clone(),
                        message: format!("base has dimension {d}, rule set has {}", self.dim),
                    });
                }
            }
            if let Shape::Box(e) = &r.base {
                if e.iter().any(|x| !x.is_positive()) {
                    return Err(RuleSetError::Inconsistent {
                        rule: r.name.clone(),
                        message: "box extents must be positive".into(),
                    });
                }
            }
            for (i, c) in r.children.iter().enumerate() {
                if !c.placement.scale.is_positive() {
                    return Err(RuleSetError::NonPositiveScale { rule: r.name.clone(), index: i });
                }
                if c.placement.dim() != self.dim || c.placement.linear.dim() != self.dim {
                    return Err(RuleSetError::Inconsistent {
                        rule: r.name.clone(),
                        message: format!("child {i} has the wrong dimension"),
                    });
                }
            }
        }
        Ok(())
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

/// Split on whitespace outside parentheses.
fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start: Option<usize> = None;
    for (i, ch) in line.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch.is_whitespace() && depth <= 0 {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> RuleSetError {
    RuleSetError::Syntax { line, column, message: message.into() }
}

fn parse_tuple(text: &str) -> Option<Vec<Coord>> {
    let inner = text.strip_prefix('(')?.strip_suffix(')')?;
    inner.split(',').map(|s| s.trim().parse().ok()).collect()
}

struct RawChild {
    rule: String,
    line: usize,
    column: usize,
    scale: Coord,
    linear: Linear,
    reversed: bool,
    translate: Vec<Coord>,
}

struct RawRule {
    name: String,
    base: Option<Shape>,
    children: Vec<RawChild>,
}

fn parse_flag(tok: &Token<'_>, value: &str, line: usize) -> Result<bool, RuleSetError> {
    match value {
        "0" | "false" => Ok(false),
        "1" | "true" => Ok(true),
        _ => Err(syntax(line, tok.column, format!("expected 0 or 1, found `{value}`"))),
    }
}

fn parse_child(tokens: &[Token<'_>], line: usize, dim: Option<usize>) -> Result<RawChild, RuleSetError> {
    let mut rule = None;
    let mut scale = None;
    let mut rot: i64 = 0;
    let mut reflect = false;
    let mut axes = None;
    let mut reversed = false;
    let mut translate = None;
    for tok in tokens {
        let (key, value) = tok
            .text
            .split_once('=')
            .ok_or_else(|| syntax(line, tok.column, format!("expected key=value, found `{}`", tok.text)))?;
        match key {
            "rule" => rule = Some(value.to_string()),
            "scale" => {
                scale = Some(
                    value.parse::<Coord>().map_err(|_| syntax(line, tok.column, format!("bad scale `{value}`")))?,
                )
            }
            "rot" => {
                rot = value.parse().map_err(|_| syntax(line, tok.column, format!("bad rotation `{value}`")))?;
            }
            "reflect" => reflect = parse_flag(tok, value, line)?,
            "reversed" => reversed = parse_flag(tok, value, line)?,
            "axes" => {
                axes = Some(
                    Linear::parse_axes(value)
                        .ok_or_else(|| syntax(line, tok.column, format!("bad axis map `{value}`")))?,
                )
            }
            "translate" => {
                translate = Some(
                    parse_tuple(value).ok_or_else(|| syntax(line, tok.column, format!("bad translation `{value}`")))?,
                )
            }
            _ => return Err(syntax(line, tok.column, format!("unknown field `{key}`"))),
        }
    }
    let column = tokens.first().map_or(1, |t| t.column);
    let rule = rule.ok_or_else(|| syntax(line, column, "child needs rule="))?;
    let scale = scale.ok_or_else(|| syntax(line, column, "child needs scale="))?;
    let translate = translate.ok_or_else(|| syntax(line, column, "child needs translate="))?;
    if rot.rem_euclid(30) != 0 {
        return Err(syntax(line, column, format!("rotation {rot} is not a multiple of 30")));
    }
    let planar = Linear::Planar { rot: (rot.rem_euclid(360) / 30) as u8, reflect };
    let dim = dim.unwrap_or(translate.len());
    let linear = if dim == 3 {
        if let Some(a) = axes {
            if rot != 0 || reflect {
                return Err(syntax(line, column, "use either axes= or rot=/reflect="));
            }
            a
        } else {
            if rot.rem_euclid(90) != 0 {
                return Err(syntax(line, column, "spatial rotations must be quarter turns"));
            }
            planar.lift()
        }
    } else {
        if axes.is_some() {
            return Err(syntax(line, column, "axes= is only for three-dimensional rules"));
        }
        planar
    };
    Ok(RawChild { rule, line, column, scale, linear, reversed, translate })
}

fn parse_base(tokens: &[Token<'_>], line: usize) -> Result<Shape, RuleSetError> {
    let kind = tokens.first().ok_or_else(|| syntax(line, 5, "base needs a shape"))?;
    let rest = &tokens[1..];
    match kind.text {
        "box" => {
            let extents = rest
                .iter()
                .map(|t| t.text.parse::<Coord>().map_err(|_| syntax(line, t.column, format!("bad extent `{}`", t.text))))
                .collect::<Result<Vec<_>, _>>()?;
            if !(2..=3).contains(&extents.len()) {
                return Err(syntax(line, kind.column, "box needs two or three extents"));
            }
            Ok(Shape::Box(extents))
        }
        "polygon" => {
            let pts = rest
                .iter()
                .map(|t| match parse_tuple(t.text) {
                    Some(v) if v.len() == 2 => Ok(Point::new(v)),
                    _ => Err(syntax(line, t.column, format!("bad vertex `{}`", t.text))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if pts.len() < 3 {
                return Err(syntax(line, kind.column, "polygon needs at least three vertices"));
            }
            Ok(Shape::Polygon(pts))
        }
        "lattice" => match rest {
            [name] => Ok(Shape::Lattice(name.text.to_string())),
            _ => Err(syntax(line, kind.column, "lattice needs one name")),
        },
        other => Err(syntax(line, kind.column, format!("unknown shape `{other}`"))),
    }
}

fn valid_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '\'' | '.'))
}

/// Parse the text rule format, or its JSON mirror when the text starts with `{`.
pub fn parse_ruleset(text: &str) -> Result<RuleSet, RuleSetError> {
    if text.trim_start().starts_with('{') {
        return from_json(text);
    }
    let mut name = None;
    let mut dim: Option<usize> = None;
    let mut unit: Option<String> = None;
    let mut rules: Vec<RawRule> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("");
        let tokens = tokenize(line);
        let Some(head) = tokens.first() else { continue };
        let args = &tokens[1..];
        let single = |what: &str| -> Result<String, RuleSetError> {
            match args {
                [t] if valid_ident(t.text) => Ok(t.text.to_string()),
                _ => Err(syntax(line_no, head.column, format!("`{what}` takes one identifier"))),
            }
        };
        match head.text {
            "name" => name = Some(single("name")?),
            "unit" => unit = Some(single("unit")?),
            "dim" => {
                dim = match args {
                    [t] if t.text == "2" || t.text == "3" => Some(t.text.parse().expect("digit")),
                    _ => return Err(syntax(line_no, head.column, "`dim` takes 2 or 3")),
                }
            }
            "rule" => rules.push(RawRule { name: single("rule")?, base: None, children: Vec::new() }),
            "base" => {
                let r = rules.last_mut().ok_or_else(|| syntax(line_no, head.column, "`base` outside a rule"))?;
                if r.base.is_some() {
                    return Err(syntax(line_no, head.column, "rule already has a base"));
                }
                r.base = Some(parse_base(args, line_no)?);
            }
            "child" => {
                let r = rules.last_mut().ok_or_else(|| syntax(line_no, head.column, "`child` outside a rule"))?;
                let d = dim.or_else(|| r.base.as_ref().and_then(Shape::dim));
                r.children.push(parse_child(args, line_no, d)?);
            }
            other => return Err(syntax(line_no, head.column, format!("unknown directive `{other}`"))),
        }
    }
    let unit_name = unit.ok_or(RuleSetError::MissingUnit)?;
    let index: HashMap<String, usize> = rules.iter().enumerate().map(|(i, r)| (r.name.clone(), i)).collect();
    let unit = *index.get(&unit_name).ok_or_else(|| RuleSetError::UnknownRule(unit_name.clone()))?;
    let dim = match dim {
        Some(d) => d,
        None => rules.iter().find_map(|r| r.base.as_ref().and_then(Shape::dim)).unwrap_or(2),
    };
    let mut out = Vec::new();
    for r in rules {
        let base = r.base.ok_or_else(|| RuleSetError::Inconsistent { rule: r.name.clone(), message: "missing base".into() })?;
        let mut children = Vec::new();
        for c in r.children {
            let rule = *index.get(&c.rule).ok_or_else(|| RuleSetError::UnknownRule(c.rule.clone()))?;
            if c.translate.len() != dim {
                return Err(syntax(c.line, c.column, format!("translation needs {dim} coordinates")));
            }
            children.push(Child {
                rule,
                placement: Similarity { scale: c.scale, linear: c.linear, translation: Point::new(c.translate) },
                reversed: c.reversed,
            });
        }
        out.push(Rule { name: r.name, base, children });
    }
    let rs = RuleSet { name, dim, unit, rules: out };
    rs.check()?;
    Ok(rs)
}

fn fmt_shape(out: &mut String, base: &Shape) {
    match base {
        Shape::Box(e) => {
            out.push_str("box");
            for x in e {
                let _ = write!(out, " {x}");
            }
        }
        Shape::Polygon(v) => {
            out.push_str("polygon");
            for p in v {
                let _ = write!(out, " {p}");
            }
        }
        Shape::Lattice(name) => {
            let _ = write!(out, "lattice {name}");
        }
    }
}

/// Canonical text form.
pub fn serialize_ruleset(rs: &RuleSet) -> String {
    let mut out = String::new();
    if let Some(n) = &rs.name {
        let _ = writeln!(out, "name {n}");
    }
    let _ = writeln!(out, "dim {}", rs.dim);
    let _ = writeln!(out, "unit {}", rs.rules[rs.unit].name);
    for r in &rs.rules {
        let _ = writeln!(out, "rule {}", r.name);
        out.push_str("  base ");
        fmt_shape(&mut out, &r.base);
        out.push('\n');
        for c in &r.children {
            let _ = write!(out, "  child rule={} scale={}", rs.rules[c.rule].name, c.placement.scale);
            match c.placement.linear {
                Linear::Planar { rot, reflect } => {
                    let _ = write!(out, " rot={} reflect={}", rot as u32 * 30, reflect as u8);
                }
                l @ Linear::Spatial { .. } => {
                    let _ = write!(out, " axes={}", l.axes_string());
                }
            }
            let _ = writeln!(out, " reversed={} translate={}", c.reversed as u8, c.placement.translation);
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct JsonChild {
    rule: String,
    scale: Coord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rot: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reflect: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axes: Option<String>,
    #[serde(default)]
    reversed: bool,
    translate: Vec<Coord>,
}

#[derive(Serialize, Deserialize)]
struct JsonRule {
    id: String,
    base: Shape,
    children: Vec<JsonChild>,
}

#[derive(Serialize, Deserialize)]
struct JsonRuleSet {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    unit: String,
    rules: Vec<JsonRule>,
}

fn from_json(text: &str) -> Result<RuleSet, RuleSetError> {
    let raw: JsonRuleSet = serde_json::from_str(text).map_err(|e| RuleSetError::Json(e.to_string()))?;
    let index: HashMap<&str, usize> = raw.rules.iter().enumerate().map(|(i, r)| (r.id.as_str(), i)).collect();
    let unit = *index.get(raw.unit.as_str()).ok_or_else(|| RuleSetError::UnknownRule(raw.unit.clone()))?;
    let dim = raw.dim.or_else(|| raw.rules.iter().find_map(|r| r.base.dim())).unwrap_or(2);
    let mut rules = Vec::new();
    for r in &raw.rules {
        let mut children = Vec::new();
        for c in &r.children {
            let rule = *index.get(c.rule.as_str()).ok_or_else(|| RuleSetError::UnknownRule(c.rule.clone()))?;
            let rot = c.rot.unwrap_or(0);
            let reflect = c.reflect.unwrap_or(false);
            let bad = |m: &str| RuleSetError::Inconsistent { rule: r.id.clone(), message: m.to_string() };
            if rot.rem_euclid(30) != 0 {
                return Err(bad("rotation must be a multiple of 30"));
            }
            let planar = Linear::Planar { rot: (rot.rem_euclid(360) / 30) as u8, reflect };
            let linear = match (&c.axes, dim) {
                (Some(a), 3) => Linear::parse_axes(a).ok_or_else(|| bad("bad axis map"))?,
                (None, 3) if rot.rem_euclid(90) == 0 => planar.lift(),
                (None, 2) => planar,
                _ => return Err(bad("unsupported orientation")),
            };
            if c.translate.len() != dim {
                return Err(bad("translation has the wrong dimension"));
            }
            children.push(Child {
                rule,
                placement: Similarity { scale: c.scale.clone(), linear, translation: Point::new(c.translate.clone()) },
                reversed: c.reversed,
            });
        }
        rules.push(Rule { name: r.id.clone(), base: r.base.clone(), children });
    }
    let rs = RuleSet { name: raw.name, dim, unit, rules };
    rs.check()?;
    Ok(rs)
}

/// The JSON mirror of the text format.
pub fn to_json(rs: &RuleSet) -> String {
    let raw = JsonRuleSet {
        name: rs.name.clone(),
        dim: Some(rs.dim),
        unit: rs.rules[rs.unit].name.clone(),
        rules: rs
            .rules
            .iter()
            .map(|r| JsonRule {
                id: r.name.clone(),
                base: r.base.clone(),
                children: r
                    .children
                    .iter()
                    .map(|c| {
                        let (rot, reflect, axes) = match c.placement.linear {
                            Linear::Planar { rot, reflect } => (Some(rot as i64 * 30), Some(reflect), None),
                            l => (None, None, Some(l.axes_string())),
                        };
                        JsonChild {
                            rule: rs.rules[c.rule].name.clone(),
                            scale: c.placement.scale.clone(),
                            rot,
                            reflect,
                            axes,
                            reversed: c.reversed,
                            translate: c.placement.translation.to_vec(),
                        }
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("serializable")
}

/// How strongly a rule's partition was established.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    Exact,
    Sampled,
    /// Lattice-defined shapes, checked by the lattice construction instead.
    Deferred,
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleCheck {
    pub rule: String,
    pub confidence: Confidence,
    pub base_measure: Option<Coord>,
    pub children_measure: Option<Coord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub rules: Vec<RuleCheck>,
}

impl ValidationReport {
    pub fn is_exact(&self) -> bool {
        self.rules.iter().all(|r| r.confidence == Confidence::Exact)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationError {
    #[error("rule `{rule}`: children {i} and {j} overlap near {witness}")]
    Overlap { rule: String, i: usize, j: usize, witness: Point },
    #[error("rule `{rule}`: children leave area {missing} uncovered, e.g. near {witness}")]
    Gap { rule: String, missing: Coord, witness: Point },
    #[error("rule `{rule}`: child {child} leaves the base near {witness}")]
    OutOfBounds { rule: String, child: usize, witness: Point },
}

fn box_gap_witness(base: &AaBox, children: &[AaBox]) -> Option<Point> {
    let dim = base.dim();
    let mut cuts: Vec<Vec<Coord>> = (0..dim)
        .map(|a| {
            let mut v: Vec<Coord> = vec![base.lo[a].clone(), base.hi[a].clone()];
            for c in children {
                v.push(c.lo[a].clone());
                v.push(c.hi[a].clone());
            }
            v.retain(|x| *x >= base.lo[a] && *x <= base.hi[a]);
            v.sort();
            v.dedup();
            v
        })
        .collect();
    let mids: Vec<Vec<Coord>> = cuts
        .iter_mut()
        .map(|v| v.windows(2).map(|w| &(&w[0] + &w[1]) * &Coord::ratio(1, 2)).collect())
        .collect();
    let mut idx = vec![0usize; dim];
    loop {
        let p = Point::new((0..dim).map(|a| mids[a][idx[a]].clone()));
        if !children.iter().any(|c| c.contains(&p)) {
            return Some(p);
        }
        let mut a = 0;
        loop {
            if a == dim {
                return None;
            }
            idx[a] += 1;
            if idx[a] < mids[a].len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

fn sampled_gap_witness(base: &Region, children: &[Region]) -> Option<Point> {
    let bb = base.bbox()?;
    let n = 64;
    for i in 0..n {
        for j in 0..n {
            let fx = Coord::ratio(2 * i + 1, 2 * n);
            let fy = Coord::ratio(2 * j + 1, 2 * n);
            let p = Point::xy(&bb.lo[0] + &(&bb.extent(0) * &fx), &bb.lo[1] + &(&bb.extent(1) * &fy));
            if base.contains_interior(&p) && !children.iter().any(|c| c.contains(&p)) {
                return Some(p);
            }
        }
    }
    None
}

/// Check that every rule's children partition its base.
pub fn validate_ruleset(rs: &RuleSet) -> Result<ValidationReport, ValidationError> {
    let mut checks = Vec::new();
    for (rid, rule) in rs.rules.iter().enumerate() {
        let name = rule.name.clone();
        if matches!(rule.base, Shape::Lattice(_)) {
            checks.push(RuleCheck { rule: name, confidence: Confidence::Deferred, base_measure: None, children_measure: None });
            continue;
        }
        let base_region = rule.base.place(&Similarity::identity(rs.dim));
        let regions: Vec<Region> = (0..rule.children.len()).map(|i| rs.child_region(rid, i)).collect();
        let all_boxes = regions.iter().all(|r| r.as_box().is_some());
        for (i, r) in regions.iter().enumerate() {
            if r.measure().is_none() {
                checks.push(RuleCheck { rule: name.clone(), confidence: Confidence::Deferred, base_measure: None, children_measure: None });
                continue;
            }
            for v in r.vertices() {
                if !base_region.contains(&v) {
                    return Err(ValidationError::OutOfBounds { rule: name, child: i, witness: v });
                }
            }
        }
        for i in 0..regions.len() {
            for j in i + 1..regions.len() {
                let witness = match (&regions[i], &regions[j]) {
                    (Region::Box(a), Region::Box(b)) => {
                        if a.interiors_overlap(b) {
                            a.intersection(b).map(|x| x.center())
                        } else {
                            None
                        }
                    }
                    (a, b) => {
                        let pa = a.vertices();
                        let pb = b.vertices();
                        if pa.len() >= 3 && pb.len() >= 3 {
                            polygons_overlap(&pa, &pb)
                        } else {
                            None
                        }
                    }
                };
                if let Some(witness) = witness {
                    return Err(ValidationError::Overlap { rule: name, i, j, witness });
                }
            }
        }
        let base_measure = rule.base.measure().expect("measurable base");
        let children_measure: Coord = regions.iter().filter_map(Region::measure).sum();
        if children_measure < base_measure {
            let witness = match (&base_region, all_boxes) {
                (Region::Box(b), true) => {
                    let boxes: Vec<AaBox> = regions.iter().filter_map(|r| r.as_box().cloned()).collect();
                    box_gap_witness(b, &boxes)
                }
                _ => sampled_gap_witness(&base_region, &regions),
            };
            return Err(ValidationError::Gap {
                rule: name,
                missing: &base_measure - &children_measure,
                witness: witness.unwrap_or_else(|| base_region.center().expect("bounded base")),
            });
        }
        let confidence = if matches!(base_region, Region::Box(_)) && all_boxes {
            Confidence::Exact
        } else {
            Confidence::Sampled
        };
        checks.push(RuleCheck {
            rule: name,
            confidence,
            base_measure: Some(base_measure),
            children_measure: Some(children_measure),
        });
    }
    Ok(ValidationReport { rules: checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUAD: &str = "\
unit Q
rule Q
  base box 1 1
  child rule=Q scale=1/2 translate=(0,0)
  child rule=Q scale=1/2 translate=(1/2,0)
  child rule=Q scale=1/2 translate=(0,1/2)
  child rule=Q scale=1/2 translate=(1/2,1/2)
";

    #[test]
    fn parse_quadtree() {
        let rs = parse_ruleset(QUAD).unwrap();
        assert_eq!(rs.size(), Some(4));
        assert_eq!(rs.dim, 2);
        assert!(rs.is_uniform() && rs.is_simple() && rs.is_rectilinear());
        assert!(validate_ruleset(&rs).unwrap().is_exact());
    }

    #[test]
    fn canonical_round_trip() {
        let rs = parse_ruleset(QUAD).unwrap();
        let text = serialize_ruleset(&rs);
        assert_eq!(serialize_ruleset(&parse_ruleset(&text).unwrap()), text);
        let json = to_json(&rs);
        assert_eq!(parse_ruleset(&json).unwrap(), rs);
    }

    #[test]
    fn unknown_rule_is_named() {
        let text = QUAD.replace("child rule=Q scale=1/2 translate=(0,0)", "child rule=X scale=1/2 translate=(0,0)");
        assert_eq!(parse_ruleset(&text).unwrap_err(), RuleSetError::UnknownRule("X".into()));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let text = QUAD.replace("scale=1/2 translate=(1/2,0)", "scale=1/2 translate=(1/2,0) bogus=1");
        match parse_ruleset(&text).unwrap_err() {
            RuleSetError::Syntax { line, column, .. } => assert_eq!((line, column), (5, 44)),
            e => panic!("unexpected {e:?}"),
        }
        let text = QUAD.replace("scale=1/2 translate=(0,1/2)", "scale=0 translate=(0,1/2)");
        assert!(matches!(parse_ruleset(&text).unwrap_err(), RuleSetError::NonPositiveScale { index: 2, .. }));
    }

    #[test]
    fn overlap_is_reported_with_witness() {
        let text = QUAD.replace("translate=(0,0)", "translate=(1/4,0)");
        let rs = parse_ruleset(&text).unwrap();
        match validate_ruleset(&rs).unwrap_err() {
            ValidationError::Overlap { i, j, witness, .. } => {
                assert_eq!((i, j), (0, 1));
                assert_eq!(witness, Point::xy(Coord::ratio(5, 8), Coord::ratio(1, 4)));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn gap_is_reported_with_witness() {
        let text = QUAD.replace("scale=1/2 translate=(1/2,1/2)", "scale=1/4 translate=(1/2,1/2)");
        let rs = parse_ruleset(&text).unwrap();
        match validate_ruleset(&rs).unwrap_err() {
            ValidationError::Gap { missing, witness, .. } => {
                assert_eq!(missing, Coord::ratio(3, 16));
                assert!(witness[0] > Coord::ratio(1, 2) && witness[1] > Coord::ratio(1, 2));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn spatial_children_use_axes() {
        let text = "\
unit C
rule C
  base box 1 1 1
  child rule=C scale=1/2 rot=90 translate=(1/2,0,0)
  child rule=C scale=1/2 axes=+z+x+y translate=(0,0,0)
";
        let rs = parse_ruleset(text).unwrap();
        assert_eq!(rs.dim, 3);
        let out = serialize_ruleset(&rs);
        assert!(out.contains("axes=-y+x+z"));
        assert_eq!(serialize_ruleset(&parse_ruleset(&out).unwrap()), out);
    }
}
