//! Plain-text edge lists.
//!
//! ```text
//! vertices 4
//! 0 1
//! 0 3
//! 1 2
//! 2 3
//! ```
//!
//! One `u v` line per edge with `u < v`, lines sorted lexicographically, a
//! trailing newline after every line. Writing a parsed canonical file gives
//! back the same bytes.

use std::fmt::Write as _;

use super::{Family, Graph};
use crate::error::{Error, Result};

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + 12 * g.edge_count());
    writeln!(out, "vertices {}", g.vertex_count()).unwrap();
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// Parse an edge list. The result is tagged [`Family::Custom`].
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let parse_err = |line: usize, message: String| Error::Parse { line, message };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input".into()))?;
    let vertex_count = header
        .strip_prefix("vertices ")
        .and_then(|n| n.trim().parse::<usize>().ok())
        .ok_or_else(|| parse_err(1, format!("expected `vertices <n>`, found `{header}`")))?;

    let mut edges = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next = || {
            fields
                .next()
                .and_then(|f| f.parse::<usize>().ok())
                .ok_or_else(|| parse_err(i + 1, format!("expected `u v`, found `{line}`")))
        };
        let (u, v) = (next()?, next()?);
        if fields.next().is_some() {
            return Err(parse_err(i + 1, format!("trailing fields in `{line}`")));
        }
        edges.push((u, v));
    }
    Graph::from_edges(vertex_count, &edges, Family::Custom)
}
