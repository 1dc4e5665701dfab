//! `.nlc` expressions.
//!
//! ```text
//! s nlc 2 3
//! n 1 leaf 1 1
//! n 2 leaf 2 2
//! n 3 join 1 2 a{ 1,2 } b{ 1:1 2:1 }
//! r 3
//! ```
//!
//! Labels and ids are 1-based. A leaf line may name its vertex after the
//! label; when no leaf does, the i-th leaf by id is vertex i.

use std::fmt::Write as _;

use crate::decomp::{NlcExpression, NlcNode};

use super::{lines, usize_of, ErrorCode, Errors, Line, ParseErrors};

enum Raw {
    Leaf { label: usize, vertex: Option<usize> },
    Join { left: usize, right: usize, alpha: Vec<(usize, usize)>, beta: Vec<usize> },
}

/// The text between `open` and the next `}`, with its column.
fn braced<'a>(line: &Line<'a>, open: &str) -> Option<(usize, &'a str)> {
    let start = line.text.find(open)? + open.len();
    let len = line.text[start..].find('}')?;
    Some((line.text[..start].chars().count() + 1, &line.text[start..start + len]))
}

fn parse_join(line: &Line<'_>, k: usize, count: usize, errs: &mut Errors) -> Option<Raw> {
    if line.fields.len() < 5 {
        errs.at(line, 0, ErrorCode::Syntax, "join lines read `n id join left right a{..} b{..}`");
        return None;
    }
    let left = errs.index(line, 3, "child id", count);
    let right = errs.index(line, 4, "child id", count);
    let (Some((acol, a)), Some((bcol, b))) = (braced(line, "a{"), braced(line, "b{")) else {
        errs.at(line, 0, ErrorCode::Syntax, "join needs both `a{ .. }` and `b{ .. }`");
        return None;
    };
    let before = errs.0.len();
    let label = |tok: &str, col: usize, errs: &mut Errors| match tok.trim().parse::<usize>() {
        Ok(x) if (1..=k).contains(&x) => Some(x - 1),
        _ => {
            errs.push(line.number, col, ErrorCode::Range, format!("{:?} is not a label in 1..={k}", tok.trim()));
            None
        }
    };
    let mut alpha = Vec::new();
    for pair in a.split(';').filter(|p| !p.trim().is_empty()) {
        match pair.split_once(',') {
            Some((i, j)) => {
                if let (Some(i), Some(j)) = (label(i, acol, errs), label(j, acol, errs)) {
                    alpha.push((i, j));
                }
            }
            None => {
                errs.push(line.number, acol, ErrorCode::Syntax, format!("alpha entry {:?} is not `i,j`", pair.trim()));
            }
        }
    }
    let mut beta = vec![None; k];
    for entry in b.split_whitespace() {
        match entry.split_once(':') {
            Some((i, x)) => {
                if let (Some(i), Some(x)) = (label(i, bcol, errs), label(x, bcol, errs)) {
                    if beta[i].replace(x).is_some() {
                        errs.push(line.number, bcol, ErrorCode::Duplicate, format!("beta maps label {} twice", i + 1));
                    }
                }
            }
            None => {
                errs.push(line.number, bcol, ErrorCode::Syntax, format!("beta entry {entry:?} is not `i:x`"));
            }
        }
    }
    if beta.iter().any(Option::is_none) {
        errs.push(line.number, bcol, ErrorCode::Missing, "beta must map every label");
    }
    let ok = errs.0.len() == before;
    alpha.sort_unstable();
    alpha.dedup();
    let beta = beta.into_iter().flatten().collect();
    match (ok, left, right) {
        (true, Some(left), Some(right)) => Some(Raw::Join { left, right, alpha, beta }),
        _ => None,
    }
}

pub fn parse_nlc(text: &str) -> Result<NlcExpression, ParseErrors> {
    let mut errs = Errors::default();
    let mut header: Option<(usize, usize)> = None;
    let mut nodes: Vec<Option<Raw>> = Vec::new();
    let mut root: Option<(usize, usize)> = None;
    for line in lines(text) {
        let kind = line.fields[0].1;
        if kind == "s" {
            if header.is_some() {
                errs.at(&line, 0, ErrorCode::Header, "repeated header");
            } else if line.fields.len() != 4 || line.fields[1].1 != "nlc" {
                errs.at(&line, 0, ErrorCode::Syntax, "header must read `s nlc <k> <nodes>`");
            } else if let (Some(k), Some(c)) = (errs.number(&line, 2, "k"), errs.number(&line, 3, "node count")) {
                if k == 0 {
                    errs.at(&line, 2, ErrorCode::Range, "k must be at least 1");
                } else {
                    header = Some((usize_of(k), usize_of(c)));
                    nodes = (0..usize_of(c).min(1 << 24)).map(|_| None).collect();
                }
            }
            continue;
        }
        let Some((k, count)) = header else {
            errs.at(&line, 0, ErrorCode::Header, "expected the `s nlc` header first");
            continue;
        };
        match kind {
            "n" => {
                let Some(id) = errs.index(&line, 1, "node id", count) else { continue };
                let raw = match line.fields.get(2).map(|f| f.1) {
                    Some("leaf") if (4..=5).contains(&line.fields.len()) => {
                        let label = errs.index(&line, 3, "label", k);
                        let vertex = match line.fields.len() {
                            5 => errs.index(&line, 4, "vertex", usize::MAX).map(Some),
                            _ => Some(None),
                        };
                        label.zip(vertex).map(|(label, vertex)| Raw::Leaf { label, vertex })
                    }
                    Some("join") => parse_join(&line, k, count, &mut errs),
                    _ => {
                        errs.at(&line, 2, ErrorCode::Syntax, "node lines read `n id leaf L [v]` or `n id join ..`");
                        None
                    }
                };
                if nodes[id].is_some() {
                    errs.at(&line, 1, ErrorCode::Duplicate, format!("node {} is defined twice", id + 1));
                } else if raw.is_some() {
                    nodes[id] = raw;
                }
            }
            "r" => {
                if let Some((first, _)) = root {
                    errs.at(&line, 0, ErrorCode::Duplicate, format!("root already given on line {first}"));
                } else if let Some(r) = errs.index(&line, 1, "root id", count) {
                    root = Some((line.number, r));
                }
            }
            other => errs.at(&line, 0, ErrorCode::Syntax, format!("unknown line type {other:?}")),
        }
    }
    let Some((k, _)) = header else {
        errs.push(0, 0, ErrorCode::Header, "missing `s nlc` header");
        return Err(ParseErrors(errs.0));
    };
    if root.is_none() {
        errs.push(0, 0, ErrorCode::Missing, "missing root line `r id`");
    }
    if errs.0.is_empty() {
        for (id, _) in nodes.iter().enumerate().filter(|(_, x)| x.is_none()) {
            errs.push(0, 0, ErrorCode::Missing, format!("node {} is never defined", id + 1));
        }
    }
    let nodes: Vec<Raw> = nodes.into_iter().flatten().collect();
    let named = nodes.iter().filter(|x| matches!(x, Raw::Leaf { vertex: Some(_), .. })).count();
    let leaves = nodes.iter().filter(|x| matches!(x, Raw::Leaf { .. })).count();
    if named != 0 && named != leaves {
        errs.push(0, 0, ErrorCode::Semantic, "either every leaf names its vertex or none does");
    }
    if !errs.0.is_empty() {
        return Err(ParseErrors(errs.0));
    }
    let mut next = 0;
    let nodes = nodes
        .into_iter()
        .map(|raw| match raw {
            Raw::Leaf { label, vertex } => NlcNode::Leaf {
                label,
                vertex: vertex.unwrap_or_else(|| {
                    next += 1;
                    next - 1
                }),
            },
            Raw::Join { left, right, alpha, beta } => NlcNode::Join { left, right, alpha, beta },
        })
        .collect();
    let expr = NlcExpression { k, nodes, root: root.expect("checked").1 };
    if let Err(e) = expr.validate(leaves) {
        errs.push(0, 0, ErrorCode::Semantic, e.to_string());
    }
    errs.finish(|| expr)
}

/// Always names leaf vertices.
pub fn write_nlc(expr: &NlcExpression) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "s nlc {} {}", expr.k, expr.nodes.len());
    for (x, node) in expr.nodes.iter().enumerate() {
        match node {
            NlcNode::Leaf { label, vertex } => {
                let _ = writeln!(out, "n {} leaf {} {}", x + 1, label + 1, vertex + 1);
            }
            NlcNode::Join { left, right, alpha, beta } => {
                let a: Vec<String> = alpha.iter().map(|(i, j)| format!("{},{}", i + 1, j + 1)).collect();
                let b: Vec<String> = beta.iter().enumerate().map(|(i, x)| format!("{}:{}", i + 1, x + 1)).collect();
                let _ = writeln!(out, "n {} join {} {} a{{ {} }} b{{ {} }}", x + 1, left + 1, right + 1, a.join(" ; "), b.join(" "));
            }
        }
    }
    let _ = writeln!(out, "r {}", expr.root + 1);
    out
}
