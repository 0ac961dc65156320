//! The `arrwwid` command: thin wrappers around `arrwwid-core` operations
//! that print JSON, CSV or SVG.

pub mod render;

use std::io::Write;
use std::path::{Path, PathBuf};

use arrwwid_core::catalog::{self, builtin, CatalogEntry, EntryKind, Window};
use arrwwid_core::certify::{certify_max_degree, CertificateStatus, DEFAULT_ROUND_BUDGET};
use arrwwid_core::cover::{
    cover_fragments, evaluate_plan, fmt_float, summarise, write_csv, MergeBudget, QueryKind, QueryRange, SamplePlan,
};
use arrwwid_core::curve::{classify_connections, endpoints, vertex_audit};
use arrwwid_core::rect_search::search_min_rect_tiling;
use arrwwid_core::recursify::{builtin_spec, displacement_bound, lattice_degree, recursify};
use arrwwid_core::sim::{self, CostModel, Layout};
use arrwwid_core::tiling::{tile_count, DEFAULT_TILE_BUDGET};
use arrwwid_core::{expand, parse_ruleset, validate_ruleset, vertex_degrees, Coord, Point, Region, RuleSet};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use render::{render_lattice, render_tileset, RenderStyle};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

/// What a successful run found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// The analysis refuted the property asked about.
    Refuted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Parser, Debug)]
#[command(name = "arrwwid", version, about = "Recursive tilings, space-filling curves and query fragmentation")]
pub struct Cli {
    /// Worker threads for parallel analyses.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Subject {
    /// Built-in name or path to a rule file.
    #[arg(long)]
    pub tiling: Option<String>,
    /// Built-in name or path to a rule file.
    #[arg(long)]
    pub order: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that every rule partitions its base.
    Validate {
        #[command(flatten)]
        subject: Subject,
    },
    /// List the tiles of an expansion.
    Expand {
        #[command(flatten)]
        subject: Subject,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_TILE_BUDGET)]
        budget: u64,
    },
    /// Vertex degrees of expansions.
    Degrees {
        #[command(flatten)]
        subject: Subject,
        #[arg(long, default_value = "1..3")]
        depths: String,
        #[arg(long, default_value_t = DEFAULT_TILE_BUDGET)]
        budget: u64,
    },
    /// Certify a vertex-degree bound at every depth.
    Certify {
        #[command(flatten)]
        subject: Subject,
        #[arg(long, default_value_t = 3)]
        bound: usize,
        /// Refinement rounds.
        #[arg(long, default_value_t = DEFAULT_ROUND_BUDGET)]
        budget: usize,
    },
    /// Cover one query by tiles and fragments.
    Cover {
        #[command(flatten)]
        subject: Subject,
        /// Comma-separated coordinates, exact (`1/3`) or decimal.
        #[arg(long)]
        center: String,
        #[arg(long)]
        radius: String,
        #[arg(long, value_enum, default_value_t = Kind::Ball)]
        kind: Kind,
        /// `off`, `ratio:<c>` or `tiles:<n>`.
        #[arg(long, default_value = "off")]
        merge: String,
    },
    /// Estimate the Arrwwid number from vertex-centred and random queries.
    Arrwwid {
        #[command(flatten)]
        subject: Subject,
        #[arg(long, default_value = "2..4")]
        depths: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random balls per depth.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, value_enum, default_value_t = Kind::Ball)]
        kind: Kind,
        #[arg(long, default_value = "off")]
        merge: String,
    },
    /// Entry and exit point of every rule.
    Entryexit {
        #[command(flatten)]
        subject: Subject,
    },
    /// Classify how consecutive tiles touch.
    Connections {
        #[command(flatten)]
        subject: Subject,
        #[arg(long, default_value = "1..3")]
        depths: String,
        #[arg(long, default_value_t = DEFAULT_TILE_BUDGET)]
        budget: u64,
    },
    /// Tiles, curve ends and bridges at every interior vertex.
    Audit {
        #[command(flatten)]
        subject: Subject,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_TILE_BUDGET)]
        budget: u64,
    },
    /// Recursify a lattice tiling.
    Recursify {
        /// hex9, gosper7, rhombus4, tripod, square4, shifted-square or shifted-cube.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Search square tile counts for rectangular tilings of vertex degree three.
    SearchRect {
        #[arg(long, default_value_t = 16)]
        t_max: u64,
        /// Refinement rounds per certificate.
        #[arg(long, default_value_t = DEFAULT_ROUND_BUDGET)]
        budget: usize,
    },
    /// Seek/scan cost of range queries over curve-ordered points.
    Simulate {
        #[arg(long, default_value = "coil,hilbert,zorder,dekking")]
        orders: String,
        #[arg(long, default_value_t = sim::DEFAULT_POINTS)]
        points: usize,
        /// CSV of points, one per row, instead of uniform random points.
        #[arg(long)]
        points_file: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        queries: usize,
        #[arg(long, default_value_t = 0.01)]
        min_radius: f64,
        #[arg(long, default_value_t = 0.1)]
        max_radius: f64,
        /// Seek/scan cost ratios.
        #[arg(long, default_value = "1,10,100,1000,10000")]
        ratios: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Storage depth; by default the first with at least 4096 tiles.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Draw an expansion or a recursified lattice as SVG.
    Render {
        #[command(flatten)]
        subject: Subject,
        /// Lattice spec to draw instead of a rule set.
        #[arg(long)]
        spec: Option<String>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// Overlay the polyline through tile centres in scanning order.
        #[arg(long)]
        sketch: bool,
        #[arg(long, default_value_t = 800)]
        size: u32,
    },
    /// List the built-in tilings and orders.
    Catalog,
    /// Closed-form Arrwwid numbers of tiling families.
    Predict {
        /// hypercube, lifted-daun, recursified-shifted or lower-bound-tiling.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Ball,
    Box,
}

impl From<Kind> for QueryKind {
    fn from(k: Kind) -> QueryKind {
        match k {
            Kind::Ball => QueryKind::Ball,
            Kind::Box => QueryKind::Box,
        }
    }
}

/// A rule set with the window its canonical levels use.
pub struct Loaded {
    pub name: String,
    pub rules: RuleSet,
    pub window: Window,
    pub entry: Option<CatalogEntry>,
}

/// Load a built-in entry, or a rule file when `spec` names an existing path.
pub fn load(spec: &str) -> Result<Loaded, CliError> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let rules = parse_ruleset(&text).map_err(input)?;
        let scale = rules.uniform_scale().unwrap_or_else(|| Coord::ratio(1, 2));
        return Ok(Loaded {
            name: rules.name.clone().unwrap_or_else(|| spec.to_string()),
            window: Window::for_scale(2, &scale),
            rules,
            entry: None,
        });
    }
    let entry = builtin(spec).map_err(input)?;
    Ok(Loaded { name: entry.name.to_string(), rules: entry.rules.clone(), window: entry.window.clone(), entry: Some(entry) })
}

impl Subject {
    fn load(&self) -> Result<Loaded, CliError> {
        match (&self.tiling, &self.order) {
            (Some(s), None) | (None, Some(s)) => load(s),
            (Some(_), Some(_)) => Err(CliError::Input("give either --tiling or --order, not both".into())),
            (None, None) => Err(CliError::Input("missing --tiling or --order".into())),
        }
    }
}

/// `a..b` (inclusive), `a,b,c` or a single depth.
pub fn parse_depths(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Input(format!("bad depth list `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

pub fn parse_merge(s: &str) -> Result<MergeBudget, CliError> {
    let bad = || CliError::Input(format!("bad merge budget `{s}`; use off, ratio:<c> or tiles:<n>"));
    match s.split_once(':') {
        None if s == "off" => Ok(MergeBudget::Off),
        Some(("ratio", c)) => c.parse().map(MergeBudget::Ratio).map_err(|_| bad()),
        Some(("tiles", n)) => n.parse().map(MergeBudget::TileAreas).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn parse_coord(s: &str) -> Result<Coord, CliError> {
    s.trim().parse().map_err(|_| CliError::Input(format!("bad coordinate `{s}`")))
}

/// Round every float to twelve significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            fmt_float(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

/// The JSON a command prints for a serialisable result.
pub fn to_json<T: Serialize>(x: &T) -> Value {
    round_floats(serde_json::to_value(x).expect("serialisable result"))
}

struct Sink {
    out: Box<dyn Write>,
}

impl Sink {
    fn open(path: &Option<PathBuf>) -> Result<Sink, CliError> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
            None => Box::new(std::io::BufWriter::new(std::io::stdout())),
        };
        Ok(Sink { out })
    }

    fn json(&mut self, v: &Value) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut self.out, v).map_err(|e| CliError::Io(e.into()))?;
        writeln!(self.out)?;
        self.out.flush()?;
        Ok(())
    }

    fn text(&mut self, s: &str) -> Result<(), CliError> {
        self.out.write_all(s.as_bytes())?;
        self.out.flush()?;
        Ok(())
    }
}

fn unsupported(format: Format, command: &str) -> CliError {
    CliError::Input(format!("{command} does not produce {format:?} output"))
}

#[derive(Serialize)]
struct TileRow {
    address: Vec<u16>,
    rule: String,
    reversed: bool,
    interval: [Coord; 2],
    lo: Option<Point>,
    hi: Option<Point>,
    vertices: Option<Vec<Point>>,
}

#[derive(Serialize)]
struct DegreeRow {
    depth: usize,
    max_interior: usize,
    max_boundary: usize,
    worst: Option<Point>,
}

#[derive(Serialize)]
struct CatalogRow<'a> {
    name: &'a str,
    kind: EntryKind,
    dim: usize,
    rules: usize,
    tiles_per_tile: u128,
    expected_degree: usize,
    expected_arrwwid: Option<usize>,
    window: &'a Window,
    description: &'a str,
}

/// JSON for `degrees`: the worst vertices at each depth.
pub fn degrees_json(rules: &RuleSet, depths: &[usize], budget: u64) -> Result<Value, CliError> {
    let mut rows = Vec::new();
    for &d in depths {
        let ts = expand(rules, d, budget).map_err(input)?;
        let map = vertex_degrees(&ts);
        rows.push(DegreeRow {
            depth: d,
            max_interior: map.max_interior,
            max_boundary: map.max_boundary,
            worst: map.worst_interior().map(|v| v.point.clone()),
        });
    }
    Ok(to_json(&rows))
}

/// JSON for `recursify`.
pub fn recursify_json(spec_name: &str, levels: usize) -> Result<Value, CliError> {
    let spec = builtin_spec(spec_name).map_err(input)?;
    let ll = recursify(&spec, levels).map_err(input)?;
    let displacement = spec.step.as_ref().map(|_| displacement_bound(&spec)).transpose().map_err(input)?;
    Ok(to_json(&json!({
        "spec": spec,
        "level": ll.level,
        "cells": ll.cells.len(),
        "labels": ll.labels.len(),
        "per_label": ll.per_label,
        "degree": lattice_degree(&ll),
        "congruent": ll.labels_congruent(),
        "disconnected_labels": ll.disconnected_labels(),
        "disconnected_interiors": ll.disconnected_interiors(),
        "displacement": displacement,
    })))
}

fn predict_json(family: Option<&str>, dim: Option<usize>) -> Result<Value, CliError> {
    let families = ["hypercube", "lifted-daun", "recursified-shifted", "lower-bound-tiling"];
    let fams: Vec<&str> = match family {
        Some(f) => vec![f],
        None => families.to_vec(),
    };
    let dims: Vec<usize> = match dim {
        Some(d) => vec![d],
        None => vec![2, 3, 4],
    };
    let mut rows = Vec::new();
    for f in &fams {
        for &d in &dims {
            let a = catalog::predicted_arrwwid_named(f, d).map_err(input)?;
            rows.push(json!({ "family": f, "dim": d, "arrwwid": a }));
        }
    }
    Ok(Value::Array(rows))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| CliError::Input(format!("bad {what} `{x}`"))))
        .collect()
}

/// Run a parsed command line.
pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    if let Some(n) = cli.threads {
        // A second initialisation in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let format = cli.format.unwrap_or(Format::Json);
    let mut sink = Sink::open(&cli.out)?;
    let only_json = |name: &str| if format == Format::Json { Ok(()) } else { Err(unsupported(format, name)) };
    let mut outcome = Outcome::Ok;
    match cli.command {
        Command::Validate { subject } => {
            only_json("validate")?;
            let l = subject.load_unvalidated()?;
            match validate_ruleset(&l) {
                Ok(report) => sink.json(&to_json(&json!({ "valid": true, "report": report })))?,
                Err(e) => {
                    outcome = Outcome::Refuted;
                    sink.json(&to_json(&json!({ "valid": false, "error": e, "message": e.to_string() })))?;
                }
            }
        }
        Command::Expand { subject, depth, budget } => {
            only_json("expand")?;
            let l = subject.load()?;
            let ts = expand(&l.rules, depth, budget).map_err(input)?;
            let rows: Vec<TileRow> = ts
                .tiles
                .iter()
                .map(|t| {
                    let (lo, hi, vertices) = match &t.region {
                        Region::Box(b) => (Some(b.lo.clone()), Some(b.hi.clone()), None),
                        Region::Polygon(v) => (None, None, Some(v.clone())),
                        Region::Lattice(_) => (None, None, None),
                    };
                    TileRow {
                        address: t.address.clone(),
                        rule: l.rules.rules[t.rule].name.clone(),
                        reversed: t.reversed,
                        interval: [t.interval.lo.clone(), t.interval.hi.clone()],
                        lo,
                        hi,
                        vertices,
                    }
                })
                .collect();
            sink.json(&to_json(&json!({ "name": l.name, "depth": depth, "tiles": rows })))?;
        }
        Command::Degrees { subject, depths, budget } => {
            only_json("degrees")?;
            let l = subject.load()?;
            sink.json(&degrees_json(&l.rules, &parse_depths(&depths)?, budget)?)?;
        }
        Command::Certify { subject, bound, budget } => {
            only_json("certify")?;
            let l = subject.load()?;
            let cert = certify_max_degree(&l.rules, bound, budget).map_err(input)?;
            if cert.status != CertificateStatus::Certified {
                outcome = Outcome::Refuted;
            }
            sink.json(&to_json(&cert))?;
        }
        Command::Cover { subject, center, radius, kind, merge } => {
            only_json("cover")?;
            let l = subject.load()?;
            let c = Point::new(center.split(',').map(parse_coord).collect::<Result<Vec<_>, _>>()?);
            let q = QueryRange { kind: kind.into(), center: c, radius: parse_coord(&radius)? };
            let rep = cover_fragments(&l.rules, &l.window, &q, &parse_merge(&merge)?).map_err(input)?;
            sink.json(&to_json(&rep))?;
        }
        Command::Arrwwid { subject, depths, seed, random, kind, merge } => {
            let l = subject.load()?;
            let plan = SamplePlan::new(parse_depths(&depths)?)
                .with_random(random, seed)
                .with_kind(kind.into())
                .with_merge(parse_merge(&merge)?);
            let reports = evaluate_plan(&l.rules, &l.window, &plan).map_err(input)?;
            match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&mut buf, &reports).map_err(input)?;
                    sink.text(&String::from_utf8(buf).expect("utf-8 csv"))?;
                }
                Format::Json => sink.json(&to_json(&summarise(&reports, plan)))?,
                Format::Svg => return Err(unsupported(format, "arrwwid")),
            }
        }
        Command::Entryexit { subject } => {
            only_json("entryexit")?;
            let l = subject.load()?;
            let ep = endpoints(&l.rules).map_err(input)?;
            let rows: Vec<Value> = l
                .rules
                .rules
                .iter()
                .enumerate()
                .map(|(i, r)| json!({ "rule": r.name, "entry": ep.entry[i], "exit": ep.exit[i] }))
                .collect();
            sink.json(&to_json(&rows))?;
        }
        Command::Connections { subject, depths, budget } => {
            only_json("connections")?;
            let l = subject.load()?;
            let mut rows = Vec::new();
            for d in parse_depths(&depths)? {
                let stats = classify_connections(&l.rules, d, budget).map_err(input)?;
                rows.push(json!({ "depth": d, "stats": stats }));
            }
            sink.json(&to_json(&rows))?;
        }
        Command::Audit { subject, depth, budget } => {
            only_json("audit")?;
            let l = subject.load()?;
            let audit = vertex_audit(&l.rules, depth, budget).map_err(input)?;
            let max = |f: fn(&arrwwid_core::curve::VertexAudit) -> usize| audit.iter().map(f).max().unwrap_or(0);
            sink.json(&to_json(&json!({
                "depth": depth,
                "vertices": audit.len(),
                "max_tiles_v": max(|a| a.tiles_v),
                "max_ends_v": max(|a| a.ends_v),
                "max_nondegenerate_bridges": max(|a| a.nondegenerate_bridges),
                "audit": audit,
            })))?;
        }
        Command::Recursify { spec, levels } => match format {
            Format::Json => sink.json(&recursify_json(&spec, levels)?)?,
            Format::Csv => {
                let ll = recursify(&builtin_spec(&spec).map_err(input)?, levels).map_err(input)?;
                let mut buf = Vec::new();
                ll.write_csv(&mut buf).map_err(input)?;
                sink.text(&String::from_utf8(buf).expect("utf-8 csv"))?;
            }
            Format::Svg => {
                let ll = recursify(&builtin_spec(&spec).map_err(input)?, levels).map_err(input)?;
                sink.text(&render_lattice(&ll, &RenderStyle::default()).map_err(input)?)?;
            }
        },
        Command::SearchRect { t_max, budget } => {
            only_json("search-rect")?;
            let rep = search_min_rect_tiling(t_max, budget);
            sink.json(&to_json(&rep))?;
        }
        Command::Simulate { orders, points, points_file, queries, min_radius, max_radius, ratios, seed, depth } => {
            let names: Vec<String> = orders.split(',').map(|s| s.trim().to_string()).collect();
            let ratios: Vec<f64> = parse_list(&ratios, "ratio")?;
            for r in &ratios {
                CostModel::new(*r, 1.0).map_err(input)?;
            }
            if !(0.0 < min_radius && min_radius < max_radius) {
                return Err(CliError::Input("need 0 < --min-radius < --max-radius".into()));
            }
            let loaded: Vec<Loaded> = names.iter().map(|n| load(n)).collect::<Result<_, _>>()?;
            let first = &loaded.first().ok_or_else(|| CliError::Input("no orders given".into()))?.rules;
            let pts = match points_file {
                Some(p) => sim::read_points_csv(std::fs::File::open(&p)?).map_err(input)?,
                None => sim::uniform_points(first, points, seed),
            };
            let qs = sim::random_queries(first, queries, min_radius, max_radius, seed.wrapping_add(1));
            let mut layouts = Vec::new();
            for l in loaded {
                let d = depth.unwrap_or_else(|| sim::default_storage_depth(&l.rules, sim::DEFAULT_STORAGE_TILES));
                let layout = Layout::build(&l.rules, d, DEFAULT_TILE_BUDGET, &pts).map_err(input)?;
                layouts.push((l.name, l.rules, l.window, layout));
            }
            let rows = sim::compare(&layouts, &qs, &ratios).map_err(input)?;
            match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    sim::write_comparison_csv(&mut buf, &rows).map_err(input)?;
                    sink.text(&String::from_utf8(buf).expect("utf-8 csv"))?;
                }
                Format::Json => {
                    let spread: Vec<Value> = ratios
                        .iter()
                        .map(|&r| {
                            let worst = rows.iter().filter(|x| x.seek_scan_ratio == r).map(|x| x.relative).fold(1.0, f64::max);
                            json!({ "seek_scan_ratio": r, "spread": worst - 1.0 })
                        })
                        .collect();
                    sink.json(&to_json(&json!({
                        "points": pts.len(),
                        "queries": qs.len(),
                        "seed": seed,
                        "rows": rows,
                        "spread": spread,
                    })))?;
                }
                Format::Svg => return Err(unsupported(format, "simulate")),
            }
        }
        Command::Render { subject, spec, depth, levels, sketch, size } => {
            if format == Format::Csv {
                return Err(unsupported(format, "render"));
            }
            let style = RenderStyle { sketch, size, ..RenderStyle::default() };
            let svg = match spec {
                Some(s) => {
                    let ll = recursify(&builtin_spec(&s).map_err(input)?, levels).map_err(input)?;
                    render_lattice(&ll, &style).map_err(input)?
                }
                None => {
                    let l = subject.load()?;
                    let ts = expand(&l.rules, depth, render::SHAPE_BUDGET as u64).map_err(input)?;
                    render_tileset(&ts, &style).map_err(input)?
                }
            };
            sink.text(&svg)?;
        }
        Command::Catalog => {
            only_json("catalog")?;
            let entries: Vec<CatalogEntry> =
                catalog::names().into_iter().map(builtin).collect::<Result<_, _>>().map_err(input)?;
            let rows: Vec<CatalogRow> = entries
                .iter()
                .map(|e| CatalogRow {
                    name: e.name,
                    kind: e.kind,
                    dim: e.dim,
                    rules: e.rules.rules.len(),
                    tiles_per_tile: tile_count(&e.rules, 1),
                    expected_degree: e.expected_degree,
                    expected_arrwwid: e.expected_arrwwid,
                    window: &e.window,
                    description: e.description,
                })
                .collect();
            sink.json(&to_json(&rows))?;
        }
        Command::Predict { family, dim } => {
            only_json("predict")?;
            sink.json(&predict_json(family.as_deref(), dim)?)?;
        }
    }
    Ok(outcome)
}

impl Subject {
    /// Parse without validating, for `validate` itself.
    fn load_unvalidated(&self) -> Result<RuleSet, CliError> {
        let spec = match (&self.tiling, &self.order) {
            (Some(s), None) | (None, Some(s)) => s,
            _ => return Err(CliError::Input("give exactly one of --tiling or --order".into())),
        };
        let path = Path::new(spec);
        if path.exists() {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            parse_ruleset(&text).map_err(input)
        } else {
            Ok(builtin(spec).map_err(input)?.rules)
        }
    }
}

/// Exit status: 0 success, 1 refutation, 2 usage or input error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Refuted) => 1,
        Err(e) => {
            eprintln!("arrwwid: {e}");
            2
        }
    }
}
