//! `.dmst` instance files.
//!
//! ```text
//! c a triangle where vertex 1 must have degree 2
//! p dmst 3 3 specified 1
//! e 1 2 1
//! e 1 3 1
//! e 2 3 5
//! d 1 1 2
//! d 2 1 1
//! d 3 1 1
//! b 4
//! ```
//!
//! `p dmst <n> <m> <set|bounded|specified> <weighted 0|1>`, then exactly m
//! edge lines `e u v [w]`, one `d v c d1 .. dc` line per vertex (c = 1
//! unless the variant is `set`) and, for weighted files, the budget `b B`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::instance::{Costs, DegreeSpec, Graph, Instance, Variant};

use super::{lines, usize_of, ErrorCode, Errors, ParseErrors};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedInstance {
    pub instance: Instance,
    pub warnings: Vec<String>,
}

struct Header {
    n: usize,
    m: usize,
    variant: Variant,
    weighted: bool,
    line: usize,
}

pub fn parse_instance(text: &str) -> Result<ParsedInstance, ParseErrors> {
    let mut errs = Errors::default();
    let mut warnings = Vec::new();
    let mut header: Option<Header> = None;
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    let mut degrees: BTreeMap<usize, (usize, Vec<usize>)> = BTreeMap::new();
    let mut bound: Option<(usize, u64)> = None;

    for line in lines(text) {
        let kind = line.fields[0].1;
        if kind != "p" && header.is_none() {
            errs.at(&line, 0, ErrorCode::Header, "expected the `p dmst` header before any other line");
            continue;
        }
        match kind {
            "p" => {
                if header.is_some() {
                    errs.at(&line, 0, ErrorCode::Header, "repeated header");
                    continue;
                }
                if line.fields.len() != 6 || line.fields[1].1 != "dmst" {
                    errs.at(&line, 0, ErrorCode::Syntax, "header must read `p dmst <n> <m> <variant> <0|1>`");
                    continue;
                }
                let n = errs.number(&line, 2, "vertex count");
                let m = errs.number(&line, 3, "edge count");
                let variant = Variant::parse(line.fields[4].1);
                if variant.is_none() {
                    errs.at(&line, 4, ErrorCode::Syntax, "variant must be set, bounded or specified");
                }
                let weighted = match line.fields[5].1 {
                    "0" => Some(false),
                    "1" => Some(true),
                    _ => {
                        errs.at(&line, 5, ErrorCode::Syntax, "weighted flag must be 0 or 1");
                        None
                    }
                };
                if let (Some(n), Some(m), Some(variant), Some(weighted)) = (n, m, variant, weighted) {
                    header = Some(Header { n: usize_of(n), m: usize_of(m), variant, weighted, line: line.number });
                }
            }
            "e" => {
                let h = header.as_ref().expect("checked above");
                let want = if h.weighted { 4 } else { 3 };
                if line.fields.len() != want {
                    let msg = if h.weighted { "weighted edge lines read `e u v w`" } else { "edge lines read `e u v`" };
                    errs.at(&line, 0, ErrorCode::Syntax, msg);
                    continue;
                }
                let u = errs.index(&line, 1, "endpoint", h.n);
                let v = errs.index(&line, 2, "endpoint", h.n);
                let w = if h.weighted { errs.number(&line, 3, "weight") } else { Some(0) };
                if let (Some(u), Some(v), Some(w)) = (u, v, w) {
                    edges.push((u, v));
                    weights.push(w);
                }
            }
            "d" => {
                let h = header.as_ref().expect("checked above");
                let Some(v) = errs.index(&line, 1, "vertex", h.n) else { continue };
                let Some(c) = errs.number(&line, 2, "degree count") else { continue };
                if h.variant != Variant::Set && c != 1 {
                    errs.at(&line, 2, ErrorCode::Syntax, format!("{} instances list exactly one degree", h.variant));
                    continue;
                }
                if line.fields.len() as u64 != 3 + c {
                    errs.at(&line, 0, ErrorCode::Count, format!("expected {c} degrees after the count"));
                    continue;
                }
                let values: Vec<Option<u64>> = (3..line.fields.len()).map(|f| errs.number(&line, f, "degree")).collect();
                let values: Option<Vec<usize>> = values.into_iter().map(|x| x.map(usize_of)).collect();
                let Some(values) = values else { continue };
                if let Some((first, _)) = degrees.insert(v, (line.number, values)) {
                    warnings.push(format!(
                        "line {}: vertex {} already has a d-line (line {first}); the last one wins",
                        line.number,
                        v + 1
                    ));
                }
            }
            "b" => {
                let h = header.as_ref().expect("checked above");
                if !h.weighted {
                    errs.at(&line, 0, ErrorCode::Syntax, "a budget line needs weighted = 1");
                    continue;
                }
                if line.fields.len() != 2 {
                    errs.at(&line, 0, ErrorCode::Syntax, "budget line reads `b B`");
                    continue;
                }
                if let Some((first, _)) = bound {
                    errs.at(&line, 0, ErrorCode::Duplicate, format!("budget already given on line {first}"));
                    continue;
                }
                if let Some(b) = errs.number(&line, 1, "budget") {
                    bound = Some((line.number, b));
                }
            }
            other => errs.at(&line, 0, ErrorCode::Syntax, format!("unknown line type {other:?}")),
        }
    }

    let Some(h) = header else {
        errs.push(0, 0, ErrorCode::Header, "missing `p dmst` header");
        return Err(ParseErrors(errs.0));
    };
    if edges.len() != h.m && errs.0.is_empty() {
        errs.push(h.line, 0, ErrorCode::Count, format!("header declares {} edges, found {}", h.m, edges.len()));
    }
    for v in (0..h.n).filter(|v| !degrees.contains_key(v)) {
        errs.push(0, 0, ErrorCode::Missing, format!("vertex {} has no d-line", v + 1));
    }
    if h.weighted && bound.is_none() {
        errs.push(0, 0, ErrorCode::Missing, "weighted instance has no `b` line");
    }
    errs.finish(|| {
        let values = degrees.into_values().map(|(_, d)| d).collect();
        let degrees = match h.variant {
            Variant::Set => DegreeSpec::set(values),
            v => DegreeSpec::from_raw(v, values),
        };
        let costs = bound.map(|(_, bound)| Costs { weights, bound });
        ParsedInstance { instance: Instance::new(Graph::new(h.n, edges), degrees, costs), warnings }
    })
}

/// Normal form: header, edges in order, d-lines by vertex, then the budget.
pub fn write_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut out = String::new();
    let variant = inst.degrees.variant();
    let _ = writeln!(out, "p dmst {} {} {} {}", g.n(), g.m(), variant, u8::from(inst.is_weighted()));
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        match &inst.costs {
            Some(c) => {
                let _ = writeln!(out, "e {} {} {}", u + 1, v + 1, c.weights[e]);
            }
            None => {
                let _ = writeln!(out, "e {} {}", u + 1, v + 1);
            }
        }
    }
    for v in 0..inst.degrees.len() {
        let raw = inst.degrees.raw(v);
        let _ = write!(out, "d {} {}", v + 1, raw.len());
        for d in raw {
            let _ = write!(out, " {d}");
        }
        out.push('\n');
    }
    if let Some(c) = &inst.costs {
        let _ = writeln!(out, "b {}", c.bound);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_k2() {
        let p = parse_instance("p dmst 2 1 bounded 0\ne 1 2\nd 1 1 1\nd 2 1 1\n").unwrap();
        assert_eq!(p.instance.n(), 2);
        assert_eq!(p.instance.graph.m(), 1);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn errors_are_collected_with_positions() {
        let text = "c broken\np dmst 3 2 bounded 0\ne 1 x\ne 1 4\nd 1 2 1 2\nq\n";
        let errs = parse_instance(text).unwrap_err();
        let codes = errs.codes();
        assert!(codes.contains(&ErrorCode::Number));
        assert!(codes.contains(&ErrorCode::Range));
        assert!(codes.contains(&ErrorCode::Syntax));
        assert!(codes.contains(&ErrorCode::Missing));
        let bad = errs.0.iter().find(|e| e.code == ErrorCode::Number).unwrap();
        assert_eq!((bad.line, bad.column), (3, 5));
    }

    #[test]
    fn duplicate_degree_line_warns_and_last_wins() {
        let p = parse_instance("p dmst 2 1 bounded 0\ne 1 2\nd 1 1 3\nd 1 1 1\nd 2 1 1\n").unwrap();
        assert_eq!(p.warnings.len(), 1);
        assert_eq!(p.instance.degrees.raw(0), &[1]);
    }

    #[test]
    fn weights_and_budget_must_agree_with_flag() {
        assert!(parse_instance("p dmst 2 1 bounded 1\ne 1 2 3\nd 1 1 1\nd 2 1 1\n").is_err());
        assert!(parse_instance("p dmst 2 1 bounded 0\ne 1 2 3\nd 1 1 1\nd 2 1 1\n").is_err());
        let p = parse_instance("p dmst 2 1 bounded 1\ne 1 2 3\nd 1 1 1\nd 2 1 1\nb 3\n").unwrap();
        assert_eq!(p.instance.costs.unwrap().weights, vec![3]);
    }
}
