//! Plain-text edge lists and DOT export.
//!
//! Edge list format: the first non-comment line holds the number of users,
//! every later line one edge `u v` with 1-based labels. `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{ConflictGraph, UserId};

pub fn parse_edge_list(text: &str) -> Result<ConflictGraph> {
    let mut n = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let line_no = i + 1;
        let parse = |tok: &str| {
            tok.parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("{tok:?}: {e}"),
            })
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        match (n, toks.as_slice()) {
            (None, [count]) => n = Some(parse(count)?),
            (None, _) => {
                return Err(Error::Parse { line: line_no, msg: "expected the number of users".into() })
            }
            (Some(n), [a, b]) => {
                let (a, b) = (parse(a)?, parse(b)?);
                for x in [a, b] {
                    if x == 0 || x > n {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("user {x} outside 1..={n}"),
                        });
                    }
                }
                edges.push((a - 1, b - 1));
            }
            (Some(_), _) => {
                return Err(Error::Parse { line: line_no, msg: "expected two user labels".into() })
            }
        }
    }
    let n = n.ok_or(Error::Parse { line: 0, msg: "empty edge list".into() })?;
    ConflictGraph::from_edges(n, edges)
}

pub fn read_edge_list(path: &Path) -> Result<ConflictGraph> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn write_edge_list(g: &ConflictGraph) -> String {
    let mut out = format!("{}\n", g.n());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn graph_to_dot(g: &ConflictGraph) -> String {
    let mut out = String::from("graph G {\n");
    for u in g.users() {
        let _ = writeln!(out, "  {u};");
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}

/// Edges as 1-based label pairs, for serialization.
pub fn labelled_edges(g: &ConflictGraph) -> Vec<(usize, usize)> {
    g.edges().map(|(u, v): (UserId, UserId)| (u.label(), v.label())).collect()
}
