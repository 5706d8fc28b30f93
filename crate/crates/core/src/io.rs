//! Plain-text edge-list format.
//!
//! ```text
//! # name demo
//! p 3 3
//! 0 1 1
//! 1 2 3/8
//! 2 0 5/8
//! ```
//!
//! Weights are nonnegative integers or `num/den` with `den` a power of two.
//! Lines starting with `#` are comments; `# name <s>` and `# seed <u64>`
//! carry optional metadata.

use std::fmt::Write as _;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::graph::{Edge, WeightedDigraph};

pub fn parse_graph(text: &str) -> Result<WeightedDigraph> {
    let mut name = None;
    let mut seed = None;
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut lines_seen = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("name ") {
                name = Some(v.trim().to_string());
            } else if let Some(v) = rest.strip_prefix("seed ") {
                seed = Some(v.trim().parse::<u64>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad seed `{v}`"),
                })?);
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let perr = |msg: String| Error::Parse { line: line_no, msg };
        match header {
            None => {
                if toks.len() != 3 || toks[0] != "p" {
                    return Err(perr(format!("expected `p <n> <m>`, got `{line}`")));
                }
                let n = toks[1].parse().map_err(|_| perr(format!("bad n `{}`", toks[1])))?;
                let m = toks[2].parse().map_err(|_| perr(format!("bad m `{}`", toks[2])))?;
                header = Some((n, m));
            }
            Some((n, m)) => {
                if toks.len() != 3 {
                    return Err(perr(format!("expected `<tail> <head> <weight>`, got `{line}`")));
                }
                if lines_seen == m {
                    return Err(perr(format!("more than {m} edge lines")));
                }
                let tail: usize = toks[0].parse().map_err(|_| perr(format!("bad vertex `{}`", toks[0])))?;
                let head: usize = toks[1].parse().map_err(|_| perr(format!("bad vertex `{}`", toks[1])))?;
                for v in [tail, head] {
                    if v >= n {
                        return Err(Error::VertexOutOfRange { vertex: v, n });
                    }
                }
                let w: Dyadic = toks[2].parse()?;
                edges.push(Edge { tail, head, w });
                lines_seen += 1;
            }
        }
    }
    let (n, m) = header.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing header".into(),
    })?;
    if lines_seen != m {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header declares {m} edges, found {lines_seen}"),
        });
    }
    let mut g = WeightedDigraph::new(n, edges)?;
    g.name = name;
    g.seed = seed;
    Ok(g)
}

pub fn write_graph(g: &WeightedDigraph) -> String {
    let mut out = String::new();
    if let Some(name) = &g.name {
        let _ = writeln!(out, "# name {name}");
    }
    if let Some(seed) = g.seed {
        let _ = writeln!(out, "# seed {seed}");
    }
    let _ = writeln!(out, "p {} {}", g.n(), g.m());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.tail, e.head, e.w);
    }
    out
}
