//! Repeated seeded runs over a list of instances.
//!
//! Suite files hold one entry per line, `#` starts a comment:
//!
//! ```text
//! <path> <bcp|bmcp> <k> [reps] [time_limit_s]
//! ```
//!
//! Relative paths resolve against the suite file's directory. Missing
//! `reps` means 20; a time limit given here overrides the run default.

use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use thiserror::Error;

use crate::cost::Cost;
use crate::driver::{solve_k, SolveParams, SolveStatus};
use crate::eval::{evaluate_direct, EvalError};
use crate::instance::{BcpInstance, InstanceError, VertexMap, DEFAULT_MAX_SPLIT_VERTICES};
use crate::io::{read_instance, InstanceKind, ParseOptions, Parsed, ReadError, RunRecord};
use crate::rng::derive_seed;

pub const DEFAULT_REPETITIONS: u32 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteEntry {
    pub path: PathBuf,
    pub kind: InstanceKind,
    pub k: u32,
    pub repetitions: u32,
    pub time_limit: Option<Duration>,
}

impl SuiteEntry {
    /// File stem, used as the instance name in records.
    pub fn name(&self) -> String {
        let stem = self.path.file_stem().map_or_else(|| self.path.display().to_string(), |s| s.to_string_lossy().into());
        match self.kind {
            InstanceKind::Bcp => stem,
            InstanceKind::Bmcp => format!("{stem}/bmcp"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("suite line {line}: {message}")]
pub struct SuiteError {
    pub line: usize,
    pub message: String,
}

pub fn parse_suite(text: &str, base_dir: &Path) -> Result<Vec<SuiteEntry>, SuiteError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let err = |message: String| SuiteError { line, message };
        if !(3..=5).contains(&toks.len()) {
            return Err(err(format!("expected \"path kind k [reps] [time_limit_s]\", found {} fields", toks.len())));
        }
        let path = Path::new(toks[0]);
        let path = if path.is_absolute() { path.to_path_buf() } else { base_dir.join(path) };
        let kind: InstanceKind = toks[1].parse().map_err(err)?;
        let k: u32 = toks[2].parse().map_err(|_| err(format!("invalid k {:?}", toks[2])))?;
        if k == 0 {
            return Err(err("k must be at least 1".into()));
        }
        let repetitions = match toks.get(3) {
            None => DEFAULT_REPETITIONS,
            Some(t) => t.parse().ok().filter(|&r: &u32| r >= 1).ok_or_else(|| err(format!("invalid repetitions {t:?}")))?,
        };
        let time_limit = match toks.get(4) {
            None => None,
            Some(t) => Some(
                t.parse::<f64>()
                    .ok()
                    .and_then(|s| Duration::try_from_secs_f64(s).ok())
                    .filter(|d| !d.is_zero())
                    .ok_or_else(|| err(format!("invalid time limit {t:?}")))?,
            ),
        };
        entries.push(SuiteEntry { path, kind, k, repetitions, time_limit });
    }
    Ok(entries)
}

pub fn read_suite(path: &Path) -> Result<Vec<SuiteEntry>, BenchError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| BenchError::Read(ReadError::Io { path: path.display().to_string(), source }))?;
    Ok(parse_suite(&text, path.parent().unwrap_or(Path::new(".")))?)
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error(transparent)]
    Read(#[from] ReadError),
    #[error("{name}: {source}")]
    Transform { name: String, source: InstanceError },
    #[error("{name}: {source}")]
    Eval { name: String, source: EvalError },
    #[error("{name}: legal split coloring maps to an invalid assignment: {message}")]
    MapBack { name: String, message: String },
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Root seed and per-run settings. Entry time limits override `time_limit`.
    pub params: SolveParams,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    pub parse: ParseOptions,
    /// Leave `wall_time_s` empty so result tables are reproducible byte for byte.
    pub omit_timing: bool,
}

/// Instance as seen by the solver, with the split map for multicoloring.
#[derive(Debug, Clone)]
pub struct Loaded<C> {
    pub name: String,
    pub graph: BcpInstance<C>,
    pub split: Option<(crate::instance::BmcpInstance<C>, VertexMap)>,
}

pub fn load_entry<C: Cost>(entry: &SuiteEntry, opts: ParseOptions) -> Result<Loaded<C>, BenchError> {
    let name = entry.name();
    let parsed = read_instance::<C>(&entry.path, entry.kind, opts)?;
    Ok(match parsed.instance {
        Parsed::Bcp(graph) => Loaded { name, graph, split: None },
        Parsed::Bmcp(m) => {
            let (graph, map) = m
                .to_bcp(DEFAULT_MAX_SPLIT_VERTICES)
                .map_err(|source| BenchError::Transform { name: name.clone(), source })?;
            Loaded { name, graph, split: Some((m, map)) }
        }
    })
}

/// Runs every repetition of every entry. Run `(e, r)` uses seed
/// `derive_seed(params.seed, [e, r])`; records come back ordered by entry
/// then repetition whatever the completion order.
pub fn run_suite<C: Cost>(entries: &[SuiteEntry], config: &BenchConfig) -> Result<Vec<RunRecord>, BenchError> {
    let loaded: Vec<Loaded<C>> = entries.iter().map(|e| load_entry(e, config.parse)).collect::<Result<_, _>>()?;
    let runs: Vec<(usize, u32)> =
        entries.iter().enumerate().flat_map(|(i, e)| (0..e.repetitions).map(move |r| (i, r))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| BenchError::Pool(e.to_string()))?;
    pool.install(|| {
        runs.par_iter()
            .map(|&(i, rep)| run_one(&entries[i], &loaded[i], derive_seed(config.params.seed, &[i as u64, rep as u64]), config))
            .collect()
    })
}

fn run_one<C: Cost>(entry: &SuiteEntry, inst: &Loaded<C>, seed: u64, config: &BenchConfig) -> Result<RunRecord, BenchError> {
    let params = SolveParams { seed, time_limit: entry.time_limit.or(config.params.time_limit), ..config.params.clone() };
    let eval_err = |source| BenchError::Eval { name: inst.name.clone(), source };
    let out = solve_k(&inst.graph, entry.k, &params).map_err(eval_err)?;
    let f = evaluate_direct(&inst.graph, &out.best_coloring).map_err(eval_err)?;
    let success = out.status == SolveStatus::LegalFound && f == C::zero();
    if let (true, Some((m, map))) = (success, &inst.split) {
        m.check(&map.map_back(&out.best_coloring))
            .map_err(|e| BenchError::MapBack { name: inst.name.clone(), message: e.to_string() })?;
    }
    Ok(RunRecord {
        instance: inst.name.clone(),
        k: entry.k,
        success,
        final_f: f.to_i64().unwrap_or(i64::MAX),
        wall_time_s: (!config.omit_timing).then_some(out.elapsed.as_secs_f64()),
        iterations: out.ts_iterations,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub instance: String,
    pub k: u32,
    pub runs: u32,
    pub successes: u32,
    /// Total time of all runs divided by the successes; `None` when nothing
    /// succeeded or timing was omitted.
    pub t_ave: Option<f64>,
    pub best_f: i64,
}

impl SummaryRow {
    pub fn t_ave_text(&self) -> String {
        match (self.successes, self.t_ave) {
            (0, _) => "inf".into(),
            (_, Some(t)) => format!("{t:.2}"),
            (_, None) => "-".into(),
        }
    }
}

/// Groups consecutive records sharing instance and k. `T_ave` divides the
/// total time of all runs by the number of successes.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut rows: Vec<(SummaryRow, f64, bool)> = Vec::new();
    for r in records {
        let start_new = rows.last().is_none_or(|(row, _, _)| row.instance != r.instance || row.k != r.k);
        if start_new {
            rows.push((
                SummaryRow { instance: r.instance.clone(), k: r.k, runs: 0, successes: 0, t_ave: None, best_f: i64::MAX },
                0.0,
                true,
            ));
        }
        let (row, total, timed) = rows.last_mut().expect("pushed above");
        row.runs += 1;
        row.successes += u32::from(r.success);
        row.best_f = row.best_f.min(r.final_f);
        match r.wall_time_s {
            Some(t) => *total += t,
            None => *timed = false,
        }
    }
    rows.into_iter()
        .map(|(mut row, total, timed)| {
            if timed && row.successes > 0 {
                row.t_ave = Some(total / row.successes as f64);
            }
            row
        })
        .collect()
}

pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut out = format!("{:<24} {:>6} {:>7} {:>10} {:>8}\n", "instance", "k", "suc", "T_ave(s)", "best_f");
    for r in rows {
        out.push_str(&format!(
            "{:<24} {:>6} {:>7} {:>10} {:>8}\n",
            r.instance,
            r.k,
            format!("{}/{}", r.successes, r.runs),
            r.t_ave_text(),
            r.best_f
        ));
    }
    out
}
