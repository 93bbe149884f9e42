//! Plain-text edge lists: a header `n <count>` followed by one `u v` line per
//! edge. The canonical form lists edges with `u < v` in lexicographic order.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let Some((line, header)) = lines.next() else {
        return Ok(Graph::empty(0));
    };
    let parse_err = |line: usize, reason: String| Error::Parse { line, reason };
    let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["n", count] => count
            .parse::<usize>()
            .map_err(|e| parse_err(line, format!("bad vertex count: {e}")))?,
        _ => return Err(parse_err(line, format!("expected header `n <count>`, got `{header}`"))),
    };
    let mut edges = Vec::new();
    for (line, text) in lines {
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [u, v] = fields.as_slice() else {
            return Err(parse_err(line, format!("expected `u v`, got `{text}`")));
        };
        let u: usize = u.parse().map_err(|e| parse_err(line, format!("bad vertex id: {e}")))?;
        let v: usize = v.parse().map_err(|e| parse_err(line, format!("bad vertex id: {e}")))?;
        edges.push((line, u, v));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &(line, u, v) in &edges {
        if u >= n || v >= n {
            return Err(parse_err(line, format!("vertex out of range for n = {n}")));
        }
        if u == v {
            return Err(parse_err(line, format!("self-loop at {u}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(parse_err(line, format!("duplicate edge {u} {v}")));
        }
    }
    Graph::from_edges(n, edges.into_iter().map(|(_, u, v)| (u, v)))
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.vertex_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}
