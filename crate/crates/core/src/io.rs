//! Text formats.
//!
//! Instance files are DIMACS-like:
//!
//! ```text
//! c comment
//! p edge <n> <m>
//! e <u> <v> <d>      separation d between u and v
//! n <i> <w>          multicoloring only: demand of vertex i
//! e <i> <i> <d>      multicoloring only: separation among the colors of i
//! ```
//!
//! Multicoloring files from some mirrors list the demands as a block of
//! bare integers after the header instead of `n` lines; [`ParseOptions::demand_block`]
//! accepts that layout. Solution files hold one `v <id> <color>` line per
//! vertex.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::Cost;
use crate::eval::Coloring;
use crate::instance::{BcpInstance, BmcpInstance, InstanceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    Bcp,
    Bmcp,
}

impl FromStr for InstanceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bcp" => Ok(Self::Bcp),
            "bmcp" => Ok(Self::Bmcp),
            other => Err(format!("unknown instance kind {other:?} (expected bcp or bmcp)")),
        }
    }
}

impl std::fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Bcp => "bcp",
            Self::Bmcp => "bmcp",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject unknown line types instead of skipping them with a warning.
    pub strict: bool,
    /// Read bare integer lines after the header as vertex demands.
    pub demand_block: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing \"p edge <n> <m>\" header")]
    MissingHeader,
    #[error("second header line")]
    DuplicateHeader,
    #[error("{0} line before the header")]
    BeforeHeader(&'static str),
    #[error("expected {expected} tokens, found {found}")]
    TokenCount { expected: usize, found: usize },
    #[error("invalid number {0:?}")]
    BadNumber(String),
    #[error("vertex {id} out of range 1..={n}")]
    IdOutOfRange { id: usize, n: usize },
    #[error("unknown line type {0:?}")]
    UnknownLine(String),
    #[error("demand line in a single-coloring file")]
    DemandInBcp,
    #[error("conflicting values for vertex {id}: {first} and {second}")]
    ConflictingVertexValue { id: usize, first: String, second: String },
    #[error("demand block has more than n entries")]
    DemandBlockOverflow,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based; 0 for problems found after reading every line.
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Parsed<C> {
    Bcp(BcpInstance<C>),
    Bmcp(BmcpInstance<C>),
}

impl<C: Cost> Parsed<C> {
    pub fn n(&self) -> usize {
        match self {
            Parsed::Bcp(i) => i.n(),
            Parsed::Bmcp(i) => i.n(),
        }
    }

    pub fn num_edges(&self) -> usize {
        match self {
            Parsed::Bcp(i) => i.num_edges(),
            Parsed::Bmcp(i) => i.graph().num_edges(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedInstance<C> {
    pub instance: Parsed<C>,
    /// Edge count announced by the header.
    pub header_edges: usize,
    pub warnings: Vec<String>,
}

fn number<T: FromStr>(tok: &str, line: usize) -> Result<T, ParseError> {
    tok.parse().map_err(|_| ParseError { line, kind: ParseErrorKind::BadNumber(tok.to_string()) })
}

fn expect_tokens(toks: &[&str], expected: usize, line: usize) -> Result<(), ParseError> {
    if toks.len() == expected {
        Ok(())
    } else {
        Err(ParseError { line, kind: ParseErrorKind::TokenCount { expected, found: toks.len() } })
    }
}

fn vertex(tok: &str, n: usize, line: usize) -> Result<usize, ParseError> {
    let id: usize = number(tok, line)?;
    if id == 0 || id > n {
        return Err(ParseError { line, kind: ParseErrorKind::IdOutOfRange { id, n } });
    }
    Ok(id)
}

fn set_once<T: Copy + PartialEq + ToString>(
    slot: &mut BTreeMap<usize, T>,
    id: usize,
    value: T,
    line: usize,
) -> Result<(), ParseError> {
    match slot.insert(id, value) {
        Some(prev) if prev != value => Err(ParseError {
            line,
            kind: ParseErrorKind::ConflictingVertexValue { id, first: prev.to_string(), second: value.to_string() },
        }),
        _ => Ok(()),
    }
}

pub fn parse_instance<C: Cost>(text: &str, kind: InstanceKind, opts: ParseOptions) -> Result<ParsedInstance<C>, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize, C)> = Vec::new();
    let mut demands: BTreeMap<usize, u32> = BTreeMap::new();
    let mut self_sep: BTreeMap<usize, C> = BTreeMap::new();
    let mut block: Vec<u32> = Vec::new();
    let mut warnings = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        match head {
            "c" => {}
            "p" => {
                if header.is_some() {
                    return Err(ParseError { line, kind: ParseErrorKind::DuplicateHeader });
                }
                expect_tokens(&toks, 4, line)?;
                header = Some((number(toks[2], line)?, number(toks[3], line)?));
            }
            "e" => {
                let (n, _) = header.ok_or(ParseError { line, kind: ParseErrorKind::BeforeHeader("edge") })?;
                expect_tokens(&toks, 4, line)?;
                let u = vertex(toks[1], n, line)?;
                let v = vertex(toks[2], n, line)?;
                let d: C = number(toks[3], line)?;
                if u == v && kind == InstanceKind::Bmcp {
                    set_once(&mut self_sep, u, d, line)?;
                } else {
                    edges.push((u, v, d));
                }
            }
            "n" => {
                let (n, _) = header.ok_or(ParseError { line, kind: ParseErrorKind::BeforeHeader("demand") })?;
                if kind == InstanceKind::Bcp {
                    if opts.strict {
                        return Err(ParseError { line, kind: ParseErrorKind::DemandInBcp });
                    }
                    warnings.push(format!("line {line}: demand line ignored in a single-coloring file"));
                    continue;
                }
                expect_tokens(&toks, 3, line)?;
                let i = vertex(toks[1], n, line)?;
                let w: u32 = number(toks[2], line)?;
                set_once(&mut demands, i, w, line)?;
            }
            _ if opts.demand_block && kind == InstanceKind::Bmcp && head.bytes().all(|b| b.is_ascii_digit()) => {
                let (n, _) = header.ok_or(ParseError { line, kind: ParseErrorKind::BeforeHeader("demand") })?;
                for tok in &toks {
                    if block.len() == n {
                        return Err(ParseError { line, kind: ParseErrorKind::DemandBlockOverflow });
                    }
                    block.push(number(tok, line)?);
                }
            }
            other => {
                if opts.strict {
                    return Err(ParseError { line, kind: ParseErrorKind::UnknownLine(other.to_string()) });
                }
                warnings.push(format!("line {line}: skipped unknown line type {other:?}"));
            }
        }
    }

    let (n, header_edges) = header.ok_or(ParseError { line: 0, kind: ParseErrorKind::MissingHeader })?;
    let at_end = |e: InstanceError| ParseError { line: 0, kind: ParseErrorKind::Instance(e) };
    let lines_read = edges.len() + self_sep.len();
    if lines_read != header_edges {
        warnings.push(format!("header announces {header_edges} edges, file has {lines_read} edge lines"));
    }

    let instance = match kind {
        InstanceKind::Bcp => Parsed::Bcp(BcpInstance::new(n, edges).map_err(at_end)?),
        InstanceKind::Bmcp => {
            let mut w = vec![1u32; n];
            if !block.is_empty() {
                if block.len() != n {
                    warnings.push(format!("demand block has {} of {n} entries; the rest default to 1", block.len()));
                }
                w[..block.len()].copy_from_slice(&block);
            }
            for (&i, &wi) in &demands {
                w[i - 1] = wi;
            }
            let mut sd = vec![C::one(); n];
            for (&i, &d) in &self_sep {
                sd[i - 1] = d;
            }
            for i in 0..n {
                if w[i] > 1 {
                    if !self_sep.contains_key(&(i + 1)) {
                        warnings.push(format!("vertex {} has demand {} but no self-separation; using 1", i + 1, w[i]));
                    } else if sd[i] < C::one() {
                        warnings.push(format!("vertex {} has self-separation {}; using 1", i + 1, sd[i]));
                        sd[i] = C::one();
                    }
                }
            }
            Parsed::Bmcp(BmcpInstance::new(w, sd, edges).map_err(at_end)?)
        }
    };
    Ok(ParsedInstance { instance, header_edges, warnings })
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
}

pub fn read_instance<C: Cost>(path: &Path, kind: InstanceKind, opts: ParseOptions) -> Result<ParsedInstance<C>, ReadError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ReadError::Io { path: name.clone(), source })?;
    parse_instance(&text, kind, opts).map_err(|source| ReadError::Parse { path: name, source })
}

pub fn write_instance<C: Cost>(inst: &BcpInstance<C>) -> String {
    let mut out = format!("p edge {} {}\n", inst.n(), inst.num_edges());
    for e in inst.edges() {
        let _ = writeln!(out, "e {} {} {}", e.u + 1, e.v + 1, e.d);
    }
    out
}

pub fn write_bmcp_instance<C: Cost>(inst: &BmcpInstance<C>) -> String {
    let g = inst.graph();
    let selfs: Vec<usize> = (0..inst.n()).filter(|&i| inst.demand(i) > 1).collect();
    let mut out = format!("p edge {} {}\n", inst.n(), g.num_edges() + selfs.len());
    for i in 0..inst.n() {
        if inst.demand(i) != 1 {
            let _ = writeln!(out, "n {} {}", i + 1, inst.demand(i));
        }
    }
    for &i in &selfs {
        let _ = writeln!(out, "e {} {} {}", i + 1, i + 1, inst.self_separation(i));
    }
    for e in g.edges() {
        let _ = writeln!(out, "e {} {} {}", e.u + 1, e.v + 1, e.d);
    }
    out
}

pub fn write_solution(coloring: &Coloring) -> String {
    let mut out = String::with_capacity(coloring.len() * 8);
    for (v, c) in coloring.colors().iter().enumerate() {
        let _ = writeln!(out, "v {} {}", v + 1, c);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error("line {line}: expected \"v <id> <color>\"")]
    Malformed { line: usize },
    #[error("line {line}: vertex {id} listed twice")]
    Duplicate { line: usize, id: usize },
    #[error("line {line}: color of vertex {id} must be at least 1")]
    ZeroColor { line: usize, id: usize },
    #[error("vertex {0} has no color")]
    Missing(usize),
}

/// Colors indexed by vertex (0-based). Vertex ids must cover `1..=len`.
pub fn parse_solution(text: &str) -> Result<Vec<u32>, SolutionError> {
    let mut found: BTreeMap<usize, u32> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.first() {
            None | Some(&"c") => continue,
            Some(&"v") if toks.len() == 3 => {}
            _ => return Err(SolutionError::Malformed { line }),
        }
        let (Ok(id), Ok(color)) = (toks[1].parse::<usize>(), toks[2].parse::<u32>()) else {
            return Err(SolutionError::Malformed { line });
        };
        if id == 0 {
            return Err(SolutionError::Malformed { line });
        }
        if color == 0 {
            return Err(SolutionError::ZeroColor { line, id });
        }
        if found.insert(id, color).is_some() {
            return Err(SolutionError::Duplicate { line, id });
        }
    }
    let mut colors = Vec::with_capacity(found.len());
    for (expect, (&id, &c)) in (1..).zip(&found) {
        if id != expect {
            return Err(SolutionError::Missing(expect));
        }
        colors.push(c);
    }
    Ok(colors)
}

/// One solver run. `success` holds exactly when `final_f` is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub k: u32,
    pub success: bool,
    pub final_f: i64,
    /// Empty when timing is suppressed.
    pub wall_time_s: Option<f64>,
    pub iterations: u64,
    pub seed: u64,
}

pub fn write_records_csv<W: Write>(records: &[RunRecord], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(["instance", "k", "success", "final_f", "wall_time_s", "iterations", "seed"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_jsonl<W: Write>(records: &[RunRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_records_csv(text: &str) -> Result<Vec<RunRecord>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}
