//! Plain-text instance format.
//!
//! ```text
//! kbcp <n> <m> <k> <C> <D>
//! st <s> <t>
//! a <tail> <head> <cost> <delay>
//! ```
//!
//! One `a` line per arc; ids follow line order starting at 1. Vertex ids are
//! 1-based. Lines starting with `#` and blank lines are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::instance::{Arc, ArcId, Instance, InstanceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty input")]
    Empty,
    #[error("expected header `kbcp <n> <m> <k> <C> <D>`")]
    BadHeader,
    #[error("expected `st <s> <t>`")]
    BadTerminals,
    #[error("malformed arc line, expected `a <tail> <head> <cost> <delay>`")]
    BadArc,
    #[error("undirected edges are not supported")]
    Undirected,
    #[error("unexpected line")]
    Unexpected,
    #[error("header declares {declared} arcs, found {found}")]
    ArcCount { declared: usize, found: usize },
    #[error("nonpositive cost")]
    NonpositiveCost,
    #[error("nonpositive delay")]
    NonpositiveDelay,
    #[error("self-loop")]
    SelfLoop,
    #[error("dangling vertex id")]
    DanglingVertex,
    #[error("s = t")]
    SameTerminals,
    #[error("{0}")]
    Invalid(InstanceError),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn numbers<const N: usize>(fields: &[&str]) -> Option<[i64; N]> {
    if fields.len() != N {
        return None;
    }
    let mut out = [0i64; N];
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = f.parse().ok()?;
    }
    Some(out)
}

/// Parses and validates an instance. Every rejection names its line.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(err(1, ParseErrorKind::Empty))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.first() != Some(&"kbcp") {
        return Err(err(header_line, ParseErrorKind::BadHeader));
    }
    let [n, m, k, c, d] =
        numbers::<5>(&fields[1..]).ok_or(err(header_line, ParseErrorKind::BadHeader))?;
    if n < 2 || m < 0 || k < 1 {
        return Err(err(header_line, ParseErrorKind::BadHeader));
    }
    let n = n as usize;

    let (st_line, st) = lines.next().ok_or(err(header_line, ParseErrorKind::BadTerminals))?;
    let fields: Vec<&str> = st.split_whitespace().collect();
    if fields.first() != Some(&"st") {
        return Err(err(st_line, ParseErrorKind::BadTerminals));
    }
    let [s, t] = numbers::<2>(&fields[1..]).ok_or(err(st_line, ParseErrorKind::BadTerminals))?;
    let vertex = |v: i64, line: usize| {
        if v < 1 || v as usize > n {
            Err(err(line, ParseErrorKind::DanglingVertex))
        } else {
            Ok(v as usize - 1)
        }
    };
    let (s, t) = (vertex(s, st_line)?, vertex(t, st_line)?);
    if s == t {
        return Err(err(st_line, ParseErrorKind::SameTerminals));
    }

    let mut arcs = Vec::new();
    let mut last_line = st_line;
    for (line, body) in lines {
        last_line = line;
        let fields: Vec<&str> = body.split_whitespace().collect();
        match fields[0] {
            "a" => {}
            "e" => return Err(err(line, ParseErrorKind::Undirected)),
            _ => return Err(err(line, ParseErrorKind::Unexpected)),
        }
        let [tail, head, cost, delay] =
            numbers::<4>(&fields[1..]).ok_or(err(line, ParseErrorKind::BadArc))?;
        let (tail, head) = (vertex(tail, line)?, vertex(head, line)?);
        if tail == head {
            return Err(err(line, ParseErrorKind::SelfLoop));
        }
        if cost < 1 {
            return Err(err(line, ParseErrorKind::NonpositiveCost));
        }
        if delay < 1 {
            return Err(err(line, ParseErrorKind::NonpositiveDelay));
        }
        arcs.push(Arc { id: ArcId::from_index(arcs.len()), tail, head, cost, delay });
    }
    if arcs.len() != m as usize {
        return Err(err(
            last_line,
            ParseErrorKind::ArcCount { declared: m as usize, found: arcs.len() },
        ));
    }
    Instance::from_arcs(n, arcs, s, t, k as usize, c, d)
        .map_err(|e| err(header_line, ParseErrorKind::Invalid(e)))
}

/// Canonical text: header, terminals, then arcs in id order, LF endings.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "kbcp {} {} {} {} {}",
        inst.n(),
        inst.m(),
        inst.k(),
        inst.cost_budget(),
        inst.delay_budget()
    );
    let _ = writeln!(out, "st {} {}", inst.s() + 1, inst.t() + 1);
    for a in inst.arcs() {
        let _ = writeln!(out, "a {} {} {} {}", a.tail + 1, a.head + 1, a.cost, a.delay);
    }
    out
}
