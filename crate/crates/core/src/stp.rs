//! SteinLib STP reader and writer.
//!
//! Decimal weights are scaled to integers by the least common multiple of
//! their reduced denominators.

use std::path::Path;

use num_integer::Integer;

use crate::error::{Result, SteinerError};
use crate::graph::{GraphEdge, Instance, NodeId};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Comment,
    Graph,
    Terminals,
    Skipped,
}

fn syntax(line: usize, message: impl Into<String>) -> SteinerError {
    SteinerError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses a non-negative decimal into a reduced fraction.
fn parse_decimal(text: &str, line: usize) -> Result<(i64, i64)> {
    let bad = || syntax(line, format!("invalid weight `{text}`"));
    let (digits, negative) = match text.strip_prefix('-') {
        Some(rest) => (rest, true),
        None => (text.strip_prefix('+').unwrap_or(text), false),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part
            .bytes()
            .chain(frac_part.bytes())
            .all(|b| b.is_ascii_digit())
        || frac_part.len() > 9
    {
        return Err(bad());
    }
    let den = 10i64.pow(frac_part.len() as u32);
    let whole: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| bad())?
    };
    let frac: i64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| bad())?
    };
    let num = whole
        .checked_mul(den)
        .and_then(|w| w.checked_add(frac))
        .ok_or_else(bad)?;
    let g = num.gcd(&den);
    let num = if negative { -num } else { num };
    Ok((num / g, den / g))
}

fn parse_count(tokens: &[&str], line: usize) -> Result<usize> {
    match tokens {
        [_, n] => n
            .parse()
            .map_err(|_| syntax(line, format!("invalid count `{n}`"))),
        _ => Err(syntax(line, "expected a keyword and one count")),
    }
}

fn parse_vertex(text: &str, line: usize) -> Result<NodeId> {
    text.parse()
        .map_err(|_| syntax(line, format!("invalid vertex id `{text}`")))
}

/// Parses STP text into a validated instance with zero-based vertex ids.
pub fn parse_stp(text: &str) -> Result<Instance> {
    let mut section = Section::None;
    let mut seen_graph = false;
    let mut seen_terminals = false;
    let mut name = String::new();
    let mut nodes: Option<usize> = None;
    let mut declared_edges: Option<usize> = None;
    let mut declared_terminals: Option<usize> = None;
    let mut raw_edges: Vec<(NodeId, NodeId, i64, i64, usize)> = Vec::new();
    let mut terminals: Vec<(NodeId, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let keyword = tokens[0].to_ascii_lowercase();
        if section == Section::None {
            if keyword == "section" {
                let which = tokens
                    .get(1)
                    .map(|s| s.to_ascii_lowercase())
                    .unwrap_or_default();
                section = match which.as_str() {
                    "comment" => Section::Comment,
                    "graph" => {
                        seen_graph = true;
                        Section::Graph
                    }
                    "terminals" => {
                        seen_terminals = true;
                        Section::Terminals
                    }
                    "" => return Err(syntax(line, "SECTION without a name")),
                    _ => Section::Skipped,
                };
            } else if keyword == "eof" {
                break;
            } else if line != 1 || !content.to_ascii_lowercase().contains("stp") {
                return Err(syntax(
                    line,
                    format!("unexpected `{}` outside a section", tokens[0]),
                ));
            }
            continue;
        }
        if keyword == "end" {
            section = Section::None;
            continue;
        }
        match section {
            Section::Comment => {
                if keyword == "name" {
                    name = content[tokens[0].len()..]
                        .trim()
                        .trim_matches('"')
                        .to_string();
                }
            }
            Section::Graph => match keyword.as_str() {
                "nodes" => nodes = Some(parse_count(&tokens, line)?),
                "edges" | "arcs" => declared_edges = Some(parse_count(&tokens, line)?),
                "e" | "a" => {
                    let [_, u, v, w] = tokens[..] else {
                        return Err(syntax(line, "edge lines read `E u v weight`"));
                    };
                    let (num, den) = parse_decimal(w, line)?;
                    raw_edges.push((
                        parse_vertex(u, line)?,
                        parse_vertex(v, line)?,
                        num,
                        den,
                        line,
                    ));
                }
                _ => return Err(syntax(line, format!("unknown graph entry `{}`", tokens[0]))),
            },
            Section::Terminals => match keyword.as_str() {
                "terminals" => declared_terminals = Some(parse_count(&tokens, line)?),
                "t" => {
                    let [_, v] = tokens[..] else {
                        return Err(syntax(line, "terminal lines read `T v`"));
                    };
                    terminals.push((parse_vertex(v, line)?, line));
                }
                "root" | "rootp" => {}
                _ => {
                    return Err(syntax(
                        line,
                        format!("unknown terminal entry `{}`", tokens[0]),
                    ))
                }
            },
            Section::Skipped | Section::None => {}
        }
    }
    if section != Section::None {
        return Err(syntax(text.lines().count(), "section is not closed by END"));
    }
    if !seen_graph {
        return Err(SteinerError::MissingSection("Graph"));
    }
    if !seen_terminals {
        return Err(SteinerError::MissingSection("Terminals"));
    }
    let n = nodes.ok_or(SteinerError::InvalidInstance(
        "Graph section lacks `Nodes`".into(),
    ))?;
    if let Some(m) = declared_edges {
        if m != raw_edges.len() {
            return Err(SteinerError::InvalidInstance(format!(
                "declared {m} edges but found {}",
                raw_edges.len()
            )));
        }
    }
    if let Some(t) = declared_terminals {
        if t != terminals.len() {
            return Err(SteinerError::InvalidInstance(format!(
                "declared {t} terminals but found {}",
                terminals.len()
            )));
        }
    }
    let denominator = raw_edges.iter().fold(1i64, |acc, e| acc.lcm(&e.3));
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (u, v, num, den, line) in raw_edges {
        if u == 0 || v == 0 || u > n || v > n {
            return Err(SteinerError::InvalidInstance(format!(
                "edge on line {line} has an endpoint outside 1..={n}"
            )));
        }
        let weight = num.checked_mul(denominator / den).ok_or_else(|| {
            SteinerError::InvalidInstance(format!("weight on line {line} overflows"))
        })?;
        edges.push(GraphEdge {
            u: u - 1,
            v: v - 1,
            weight,
        });
    }
    let mut ids = Vec::with_capacity(terminals.len());
    for (t, line) in terminals {
        if t == 0 || t > n {
            return Err(SteinerError::InvalidInstance(format!(
                "terminal on line {line} is outside 1..={n}"
            )));
        }
        ids.push(t - 1);
    }
    Instance::with_denominator(name, n, edges, ids, denominator)
}

/// Reads and parses an STP file; an unnamed instance takes the file stem.
pub fn parse_stp_file(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SteinerError::Io(format!("{}: {e}", path.display())))?;
    let mut instance = parse_stp(&text)?;
    if instance.name().is_empty() {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("instance");
        instance.set_name(stem);
    }
    Ok(instance)
}

/// Formats `value / denominator` as a decimal; exact because denominators
/// produced by the parser divide a power of ten.
fn format_weight(value: i64, denominator: i64) -> String {
    if denominator == 1 {
        return value.to_string();
    }
    let mut digits = 0u32;
    let mut scale = 1i64;
    while scale % denominator != 0 && digits < 18 {
        scale *= 10;
        digits += 1;
    }
    if scale % denominator != 0 {
        return format!("{}", value as f64 / denominator as f64);
    }
    let scaled = value * (scale / denominator);
    let whole = scaled / scale;
    let frac = scaled % scale;
    let text = format!("{whole}.{frac:0width$}", width = digits as usize);
    text.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Writes an instance in STP layout with one-based vertex ids.
pub fn write_stp(instance: &Instance) -> String {
    let mut out = String::from("33D32945 STP File, STP Format Version 1.0\n\n");
    out.push_str("SECTION Comment\n");
    out.push_str(&format!("Name \"{}\"\n", instance.name()));
    out.push_str("END\n\nSECTION Graph\n");
    out.push_str(&format!("Nodes {}\n", instance.vertex_count()));
    out.push_str(&format!("Edges {}\n", instance.edges().len()));
    for e in instance.edges() {
        out.push_str(&format!(
            "E {} {} {}\n",
            e.u + 1,
            e.v + 1,
            format_weight(e.weight, instance.weight_denominator())
        ));
    }
    out.push_str("END\n\nSECTION Terminals\n");
    out.push_str(&format!("Terminals {}\n", instance.terminals().len()));
    for t in instance.terminals() {
        out.push_str(&format!("T {}\n", t + 1));
    }
    out.push_str("END\n\nEOF\n");
    out
}
