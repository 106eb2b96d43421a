//! Edge-list formats.
//!
//! DIMACS `.gr`: `c` comment lines, one `p sp <n> <m>` header, then
//! `a <u> <v> <w>` arc lines with 1-based vertex IDs. Arcs may be listed in
//! one or both directions; they are read as undirected edges.
//!
//! CSV: one `u,v,w` record per line with 0-based vertex IDs, optional
//! `#` comment lines and an optional `u,v,w` header line. `n` is one more
//! than the largest ID seen.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Dimacs,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dimacs" | "gr" => Ok(Format::Dimacs),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown graph format `{other}`"))),
        }
    }
}

pub fn parse_graph(text: &str, format: Format) -> Result<Graph> {
    match format {
        Format::Dimacs => parse_dimacs(text),
        Format::Csv => parse_csv(text),
    }
}

pub fn load_graph(path: &Path, format: Format) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text, format)
}

fn parse_num<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {what} from `{tok}`"),
    })
}

fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            None | Some("c") => {}
            Some("p") => {
                if n.is_some() {
                    return Err(Error::Parse {
                        line,
                        msg: "duplicate problem line".into(),
                    });
                }
                match toks.next() {
                    Some("sp") => {}
                    _ => {
                        return Err(Error::Parse {
                            line,
                            msg: "expected `p sp <n> <m>`".into(),
                        })
                    }
                }
                let nv: usize = parse_num(toks.next(), line, "vertex count")?;
                let _m: usize = parse_num(toks.next(), line, "arc count")?;
                if nv == 0 {
                    return Err(Error::InvalidGraph("graph has no vertices".into()));
                }
                n = Some(nv);
            }
            Some("a") => {
                let nv = n.ok_or_else(|| Error::Parse {
                    line,
                    msg: "arc before problem line".into(),
                })?;
                let u: usize = parse_num(toks.next(), line, "tail")?;
                let v: usize = parse_num(toks.next(), line, "head")?;
                let w: f64 = parse_num(toks.next(), line, "weight")?;
                if u == 0 || v == 0 || u > nv || v > nv {
                    return Err(Error::Parse {
                        line,
                        msg: format!("vertex out of range 1..={nv}"),
                    });
                }
                if !(w > 0.0) || !w.is_finite() {
                    return Err(Error::InvalidGraph(format!(
                        "line {line}: weight {w} is not positive"
                    )));
                }
                edges.push((u - 1, v - 1, w));
            }
            Some(other) => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown line type `{other}`"),
                })
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        msg: "missing problem line".into(),
    })?;
    Graph::new(n, edges)
}

fn parse_csv(text: &str) -> Result<Graph> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut edges = Vec::new();
    let mut n = 0usize;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        // optional header
        if edges.is_empty() && n == 0 && rec.iter().map(str::to_ascii_lowercase).eq(["u", "v", "w"]) {
            continue;
        }
        if rec.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 3 fields `u,v,w`, found {}", rec.len()),
            });
        }
        let u: usize = parse_num(rec.get(0), line, "u")?;
        let v: usize = parse_num(rec.get(1), line, "v")?;
        let w: f64 = parse_num(rec.get(2), line, "w")?;
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::InvalidGraph(format!(
                "line {line}: weight {w} is not positive"
            )));
        }
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v, w));
    }
    if n == 0 {
        return Err(Error::InvalidGraph("graph has no vertices".into()));
    }
    Graph::new(n, edges)
}

pub fn write_graph(g: &Graph, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Dimacs => {
            let _ = writeln!(out, "p sp {} {}", g.n(), g.m());
            for e in g.edges() {
                let _ = writeln!(out, "a {} {} {}", e.u + 1, e.v + 1, e.w);
            }
        }
        Format::Csv => {
            for e in g.edges() {
                let _ = writeln!(out, "{},{},{}", e.u, e.v, e.w);
            }
        }
    }
    out
}
