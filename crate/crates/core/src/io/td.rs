//! `.td` tree decompositions (PACE style) and `.arr` arrangements.
//!
//! ```text
//! s td 2 2 3
//! b 1 1 2
//! b 2 2 3
//! 1 2
//! ```
//!
//! ```text
//! s arr 3
//! 2 1 3
//! ```

use std::fmt::Write as _;

use crate::decomp::{LinearArrangement, TreeDecomposition};

use super::{lines, usize_of, ErrorCode, Errors, ParseErrors};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedTd {
    /// Vertex count declared in the header.
    pub n: usize,
    pub decomposition: TreeDecomposition,
}

pub fn parse_td(text: &str) -> Result<ParsedTd, ParseErrors> {
    let mut errs = Errors::default();
    let mut header: Option<(usize, usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    for line in lines(text) {
        let kind = line.fields[0].1;
        if kind == "s" {
            if header.is_some() {
                errs.at(&line, 0, ErrorCode::Header, "repeated header");
            } else if line.fields.len() != 5 || line.fields[1].1 != "td" {
                errs.at(&line, 0, ErrorCode::Syntax, "header must read `s td <bags> <max bag size> <n>`");
            } else if let (Some(b), Some(w), Some(n)) =
                (errs.number(&line, 2, "bag count"), errs.number(&line, 3, "bag size"), errs.number(&line, 4, "vertex count"))
            {
                header = Some((usize_of(b), usize_of(w), usize_of(n), line.number));
                bags = vec![None; usize_of(b).min(1 << 24)];
            }
            continue;
        }
        let Some((count, _, n, _)) = header else {
            errs.at(&line, 0, ErrorCode::Header, "expected the `s td` header before any other line");
            continue;
        };
        if kind == "b" {
            let Some(id) = errs.index(&line, 1, "bag id", count) else { continue };
            let vs: Option<Vec<usize>> = (2..line.fields.len()).map(|f| errs.index(&line, f, "vertex", n)).collect();
            if bags[id].is_some() {
                errs.at(&line, 1, ErrorCode::Duplicate, format!("bag {} is defined twice", id + 1));
            } else if let Some(vs) = vs {
                bags[id] = Some(vs);
            }
        } else if line.fields.len() == 2 {
            if let (Some(a), Some(b)) = (errs.index(&line, 0, "bag id", count), errs.index(&line, 1, "bag id", count)) {
                edges.push((a, b));
            }
        } else {
            errs.at(&line, 0, ErrorCode::Syntax, "expected a bag line `b id v..` or a tree edge `a b`");
        }
    }
    let Some((_, width, n, header_line)) = header else {
        errs.push(0, 0, ErrorCode::Header, "missing `s td` header");
        return Err(ParseErrors(errs.0));
    };
    for (id, _) in bags.iter().enumerate().filter(|(_, b)| b.is_none()) {
        errs.push(0, 0, ErrorCode::Missing, format!("bag {} is never defined", id + 1));
    }
    let largest = bags.iter().flatten().map(Vec::len).max().unwrap_or(0);
    if errs.0.is_empty() && largest != width {
        errs.push(header_line, 0, ErrorCode::Count, format!("header declares bag size {width}, largest bag has {largest}"));
    }
    errs.finish(|| ParsedTd {
        n,
        decomposition: TreeDecomposition::new(bags.into_iter().flatten().collect(), edges),
    })
}

pub fn write_td(td: &TreeDecomposition, n: usize) -> String {
    let mut out = String::new();
    let largest = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    let _ = writeln!(out, "s td {} {} {}", td.bags.len(), largest, n);
    for (i, bag) in td.bags.iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for v in bag {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    for &(a, b) in &td.edges {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

/// The permutation may wrap over several lines.
pub fn parse_arr(text: &str) -> Result<LinearArrangement, ParseErrors> {
    let mut errs = Errors::default();
    let mut n = None;
    let mut order = Vec::new();
    let mut seen = Vec::new();
    for line in lines(text) {
        if line.fields[0].1 == "s" {
            if n.is_some() {
                errs.at(&line, 0, ErrorCode::Header, "repeated header");
            } else if line.fields.len() != 3 || line.fields[1].1 != "arr" {
                errs.at(&line, 0, ErrorCode::Syntax, "header must read `s arr <n>`");
            } else if let Some(x) = errs.number(&line, 2, "vertex count") {
                n = Some(usize_of(x));
                seen = vec![false; usize_of(x).min(1 << 24)];
            }
            continue;
        }
        let Some(n) = n else {
            errs.at(&line, 0, ErrorCode::Header, "expected the `s arr` header first");
            continue;
        };
        for f in 0..line.fields.len() {
            if let Some(v) = errs.index(&line, f, "vertex", n) {
                if std::mem::replace(&mut seen[v], true) {
                    errs.at(&line, f, ErrorCode::Duplicate, format!("vertex {} appears twice", v + 1));
                }
                order.push(v);
            }
        }
    }
    match n {
        None => errs.push(0, 0, ErrorCode::Header, "missing `s arr` header"),
        Some(n) if errs.0.is_empty() && order.len() != n => {
            errs.push(0, 0, ErrorCode::Count, format!("arrangement lists {} of {n} vertices", order.len()))
        }
        Some(_) => {}
    }
    errs.finish(|| LinearArrangement::new(order))
}

pub fn write_arr(arr: &LinearArrangement) -> String {
    let body: Vec<String> = arr.order.iter().map(|v| (v + 1).to_string()).collect();
    format!("s arr {}\n{}\n", arr.order.len(), body.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Graph;

    #[test]
    fn p3_path_decomposition_has_width_one() {
        let p = parse_td("c P3\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n").unwrap();
        let g = Graph::new(3, vec![(0, 1), (1, 2)]);
        p.decomposition.validate(&g).unwrap();
        assert_eq!(p.decomposition.width(), 1);
        assert_eq!(parse_td(&write_td(&p.decomposition, 3)).unwrap(), p);
    }

    #[test]
    fn td_count_errors() {
        let errs = parse_td("s td 3 2 3\nb 1 1 2\nb 1 2 3\n1 4\n").unwrap_err();
        let codes = errs.codes();
        assert!(codes.contains(&ErrorCode::Duplicate));
        assert!(codes.contains(&ErrorCode::Range));
        assert!(codes.contains(&ErrorCode::Missing));
    }

    #[test]
    fn arrangement_must_be_a_permutation() {
        assert_eq!(parse_arr("s arr 3\n2 1\n3\n").unwrap().order, vec![1, 0, 2]);
        assert!(parse_arr("s arr 3\n2 2 1\n").is_err());
        assert!(parse_arr("s arr 3\n2 1\n").is_err());
    }
}
