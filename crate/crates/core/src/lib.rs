//! Recursive tilings and scanning orders, and how many pieces it takes to cover a query.

pub mod catalog;
pub mod certify;
pub mod cover;
pub mod coord;
pub mod curve;
pub mod geom;
pub mod rect_search;
pub mod recursify;
pub mod ruleset;
pub mod shape;
pub mod sim;
pub mod solid;
pub mod tiling;

pub use coord::Coord;
pub use geom::{AaBox, Linear, Point, Similarity};
pub use ruleset::{parse_ruleset, serialize_ruleset, validate_ruleset, RuleId, RuleSet};
pub use shape::{Region, Shape};
pub use tiling::{expand, vertex_degrees, Interval, Tile, TileSet};
