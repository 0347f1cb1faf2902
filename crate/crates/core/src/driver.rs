//! Solver entry points.
//!
//! [`solve_k`] searches for a legal coloring with a fixed color budget:
//! a population of locally optimized colorings is built, random pairs are
//! relinked in both directions, each reference solution is improved by
//! local search and offered to the population, and the population is
//! rebuilt (keeping the best coloring) whenever every pair has been used.
//! [`minimize_k`] lowers the budget one color at a time until a budget
//! cannot be solved within its limits.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::cost::{Cost, Ratio};
use crate::eval::{evaluate_direct, Coloring, EvalError};
use crate::instance::BcpInstance;
use crate::population::{init_population, restart, try_insert, Initialized, PairSet, Population, SearchCounters};
use crate::relink::{relink, RelinkStrategy};
use crate::rng::{derive_seed, rng_from_seed};
use crate::tabu::{tabu_search, TsParams};

/// Desk-scale default for the per-budget time limit.
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq)]
pub struct SolveParams {
    /// Population size.
    pub p: usize,
    /// Local search settings; `ts.alpha` is the search depth.
    pub ts: TsParams,
    /// Relinking distance ratio.
    pub xi: Ratio<u32>,
    pub strategy: RelinkStrategy,
    pub time_limit: Option<Duration>,
    /// Optional cap on processed pairs.
    pub max_generations: Option<u64>,
    pub seed: u64,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            p: 20,
            ts: TsParams::default(),
            xi: Ratio::new(7, 20),
            strategy: RelinkStrategy::Random,
            time_limit: Some(DEFAULT_TIME_LIMIT),
            max_generations: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    LegalFound,
    /// Time or generation budget exhausted without a legal coloring.
    Timeout,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::LegalFound => "legal_found",
            SolveStatus::Timeout => "timeout",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome<C> {
    pub status: SolveStatus,
    pub best_coloring: Coloring,
    pub best_f: C,
    pub elapsed: Duration,
    /// Processed pairs.
    pub generations: u64,
    pub ts_calls: u64,
    /// Total moves applied by local search.
    pub ts_iterations: u64,
}

impl<C: PartialEq> SolveOutcome<C> {
    /// Everything except wall-clock time.
    pub fn same_search(&self, other: &Self) -> bool {
        self.status == other.status
            && self.best_coloring == other.best_coloring
            && self.best_f == other.best_f
            && self.generations == other.generations
            && self.ts_calls == other.ts_calls
            && self.ts_iterations == other.ts_iterations
    }
}

/// Snapshot after each processed pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationEvent<C> {
    pub elapsed: Duration,
    pub generation: u64,
    pub ts_calls: u64,
    pub best_f: C,
    pub population_best_f: C,
    pub population_mean_f: f64,
}

/// Emitted after each offspring has been optimized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffspringEvent<C> {
    pub elapsed: Duration,
    pub generation: u64,
    pub ts_calls: u64,
    /// Objective of the reference solution picked on the path.
    pub relinked_f: C,
    /// Objective after local search.
    pub optimized_f: C,
    pub best_f: C,
    pub population_mean_f: f64,
}

pub trait Observer<C> {
    fn generation(&mut self, _event: &GenerationEvent<C>) {}
    fn offspring(&mut self, _event: &OffspringEvent<C>) {}
}

impl<C> Observer<C> for () {}

pub fn solve_k<C: Cost>(inst: &BcpInstance<C>, k: u32, params: &SolveParams) -> Result<SolveOutcome<C>, EvalError> {
    solve_k_observed(inst, k, params, &mut ())
}

pub fn solve_k_observed<C: Cost>(
    inst: &BcpInstance<C>,
    k: u32,
    params: &SolveParams,
    observer: &mut dyn Observer<C>,
) -> Result<SolveOutcome<C>, EvalError> {
    if k == 0 {
        return Err(EvalError::NoColors);
    }
    let started = Instant::now();
    let out_of_time = || params.time_limit.is_some_and(|t| started.elapsed() >= t);
    let mut rng = rng_from_seed(params.seed);
    let mut counters = SearchCounters::default();
    let mut generations = 0u64;
    let mut best: Option<(Coloring, C)> = None;
    let out_of_generations = |g: u64| params.max_generations.is_some_and(|cap| g >= cap);

    'search: loop {
        if out_of_time() || out_of_generations(generations) {
            break;
        }
        let init = match &best {
            None => init_population(inst, k, params.p, &params.ts, &mut rng, &out_of_time, &mut counters)?,
            Some(b) => restart(inst, b, k, params.p, &params.ts, &mut rng, &out_of_time, &mut counters)?,
        };
        let mut pop = match init {
            Initialized::Ready(pop) => pop,
            Initialized::Legal(c) => {
                best = Some((c, C::zero()));
                break;
            }
            Initialized::Interrupted(candidate) => {
                if let Some(c) = candidate {
                    keep_better(&mut best, c);
                }
                break;
            }
        };
        let top = pop.best();
        keep_better(&mut best, (top.coloring.clone(), top.f));

        let mut pairs = PairSet::full(&pop);
        while !pairs.is_empty() {
            if out_of_time() || out_of_generations(generations) {
                break 'search;
            }
            let (a, b) = pairs.pick(&mut rng).expect("nonempty");
            let sa = pop.get(a).expect("pairs reference live members").coloring.clone();
            let sb = pop.get(b).expect("pairs reference live members").coloring.clone();
            let forward = relink(inst, &sa, &sb, params.strategy, params.xi, &mut rng)?;
            let backward = relink(inst, &sb, &sa, params.strategy, params.xi, &mut rng)?;
            for (reference, relinked_f) in [forward.reference, backward.reference].into_iter().flatten() {
                let out = tabu_search(inst, &reference, &params.ts, &mut rng)?;
                counters.ts_calls += 1;
                counters.ts_iterations += out.iterations;
                keep_better(&mut best, (out.coloring.clone(), out.f));
                let best_f = best.as_ref().expect("set above").1;
                observer.offspring(&OffspringEvent {
                    elapsed: started.elapsed(),
                    generation: generations,
                    ts_calls: counters.ts_calls,
                    relinked_f,
                    optimized_f: out.f,
                    best_f,
                    population_mean_f: pop.mean_f(),
                });
                if best_f == C::zero() {
                    generations += 1;
                    break 'search;
                }
                try_insert(&mut pop, &mut pairs, &out.coloring, out.f)?;
            }
            generations += 1;
            emit_generation(observer, &started, generations, &counters, &best, &pop);
        }
    }

    let (best_coloring, best_f) = match best {
        Some(b) => b,
        // stopped before anything was evaluated
        None => {
            let c = Coloring::random(inst.n(), k, &mut rng);
            let f = evaluate_direct(inst, &c)?;
            (c, f)
        }
    };
    let status = if best_f == C::zero() { SolveStatus::LegalFound } else { SolveStatus::Timeout };
    Ok(SolveOutcome {
        status,
        best_coloring,
        best_f,
        elapsed: started.elapsed(),
        generations,
        ts_calls: counters.ts_calls,
        ts_iterations: counters.ts_iterations,
    })
}

fn keep_better<C: Cost>(best: &mut Option<(Coloring, C)>, candidate: (Coloring, C)) {
    if best.as_ref().is_none_or(|b| candidate.1 < b.1) {
        *best = Some(candidate);
    }
}

fn emit_generation<C: Cost>(
    observer: &mut dyn Observer<C>,
    started: &Instant,
    generation: u64,
    counters: &SearchCounters,
    best: &Option<(Coloring, C)>,
    pop: &Population<C>,
) {
    observer.generation(&GenerationEvent {
        elapsed: started.elapsed(),
        generation,
        ts_calls: counters.ts_calls,
        best_f: best.as_ref().map_or(C::max_value(), |b| b.1),
        population_best_f: pop.best().f,
        population_mean_f: pop.mean_f(),
    });
}

/// Greedy legal coloring: vertices by decreasing weighted degree (index on
/// ties), each given the smallest color compatible with its colored
/// neighbors. Returns the number of colors used and the coloring.
pub fn initial_upper_bound<C: Cost>(inst: &BcpInstance<C>) -> (u32, Coloring) {
    let n = inst.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| inst.weighted_degree(b).cmp(&inst.weighted_degree(a)).then(a.cmp(&b)));
    let mut colors = vec![0u32; n];
    for &v in &order {
        let mut c: u32 = 1;
        'retry: loop {
            for &(u, d) in inst.neighbors(v) {
                let cu = colors[u];
                if cu == 0 {
                    continue;
                }
                let d = d.to_u32().expect("separations fit in u32");
                if c.abs_diff(cu) < d {
                    c = cu + d;
                    continue 'retry;
                }
            }
            break;
        }
        colors[v] = c;
    }
    let k = colors.iter().copied().max().unwrap_or(1).max(1);
    (k, Coloring::new(colors, k).expect("greedy colors are within 1..=k"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KAttempt<C> {
    pub k: u32,
    pub outcome: SolveOutcome<C>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOutcome<C> {
    /// Smallest budget with a verified legal coloring.
    pub best: Option<(u32, Coloring)>,
    /// Budget the descent started from.
    pub start_k: u32,
    pub lower_bound: u32,
    pub attempts: Vec<KAttempt<C>>,
}

/// Solves `k_start, k_start - 1, ...` until a budget fails. Without
/// `k_start` the greedy bound supplies both the start and its witness, and
/// the descent begins one below it. The descent never goes under the
/// trivial bound `1 + max d`, where no legal coloring exists. Budget `k`
/// runs with seed `derive_seed(params.seed, [k])`.
pub fn minimize_k<C: Cost>(
    inst: &BcpInstance<C>,
    params: &SolveParams,
    k_start: Option<u32>,
) -> Result<MinimizeOutcome<C>, EvalError> {
    let lower_bound = inst.trivial_lower_bound();
    let (start_k, mut best, mut k) = match k_start {
        Some(k) => (k, None, k),
        None => {
            let (k0, c) = initial_upper_bound(inst);
            (k0, Some((k0, c)), k0 - 1)
        }
    };
    let mut attempts = Vec::new();
    while k >= lower_bound.max(1) {
        let p = SolveParams { seed: derive_seed(params.seed, &[k as u64]), ..params.clone() };
        let outcome = solve_k(inst, k, &p)?;
        let legal = outcome.status == SolveStatus::LegalFound
            && evaluate_direct(inst, &outcome.best_coloring)? == C::zero();
        if legal {
            best = Some((k, outcome.best_coloring.clone()));
        }
        attempts.push(KAttempt { k, outcome });
        if !legal {
            break;
        }
        k -= 1;
    }
    Ok(MinimizeOutcome { best, start_k, lower_bound, attempts })
}

/// Comparison experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentMode {
    /// Full algorithm with tabu search against the same with steepest descent.
    TsVsSd,
    /// Random against greedy relinking.
    Pr1VsPr2,
    /// Search depths 5000, 10000 and 50000 under a fixed generation budget.
    AlphaSweep,
}

pub const ALPHA_SWEEP: [u64; 3] = [5_000, 10_000, 50_000];

/// Generation budget used by the depth sweep when none is configured.
pub const DEFAULT_SWEEP_GENERATIONS: u64 = 3_000;

impl FromStr for ExperimentMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ts_vs_sd" => Ok(Self::TsVsSd),
            "pr1_vs_pr2" => Ok(Self::Pr1VsPr2),
            "alpha_sweep" => Ok(Self::AlphaSweep),
            other => Err(format!("unknown experiment mode {other:?} (expected ts_vs_sd, pr1_vs_pr2 or alpha_sweep)")),
        }
    }
}

/// One sample of an experiment trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub tag: String,
    pub seed: u64,
    pub elapsed_s: f64,
    pub generation: u64,
    pub ts_calls: u64,
    pub best_f: i64,
    pub mean_f: f64,
    pub offspring_f: Option<i64>,
    pub optimized_f: Option<i64>,
}

struct TraceCollector<'a> {
    tag: String,
    seed: u64,
    per_offspring: bool,
    rows: &'a mut Vec<TraceRow>,
}

impl<C: Cost> Observer<C> for TraceCollector<'_> {
    fn generation(&mut self, e: &GenerationEvent<C>) {
        if !self.per_offspring {
            self.rows.push(TraceRow {
                tag: self.tag.clone(),
                seed: self.seed,
                elapsed_s: e.elapsed.as_secs_f64(),
                generation: e.generation,
                ts_calls: e.ts_calls,
                best_f: e.best_f.to_i64().unwrap_or(i64::MAX),
                mean_f: e.population_mean_f,
                offspring_f: None,
                optimized_f: None,
            });
        }
    }

    fn offspring(&mut self, e: &OffspringEvent<C>) {
        if self.per_offspring {
            self.rows.push(TraceRow {
                tag: self.tag.clone(),
                seed: self.seed,
                elapsed_s: e.elapsed.as_secs_f64(),
                generation: e.generation,
                ts_calls: e.ts_calls,
                best_f: e.best_f.to_i64().unwrap_or(i64::MAX),
                mean_f: e.population_mean_f,
                offspring_f: e.relinked_f.to_i64(),
                optimized_f: e.optimized_f.to_i64(),
            });
        }
    }
}

/// Summary of one run inside an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    pub tag: String,
    pub seed: u64,
    pub status: SolveStatus,
    pub best_f: i64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<TraceRow>,
    pub series: Vec<SeriesResult>,
}

impl ExperimentResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the variants of `mode` once per repetition. Repetition `r` uses seed
/// `derive_seed(params.seed, [r])` for every variant, so paired runs start
/// from the same stream. `ts_vs_sd` and `alpha_sweep` record one row per
/// processed pair, `pr1_vs_pr2` one row per optimized offspring.
pub fn run_experiment<C: Cost>(
    mode: ExperimentMode,
    inst: &BcpInstance<C>,
    k: u32,
    params: &SolveParams,
    repetitions: u32,
) -> Result<ExperimentResult, EvalError> {
    let variants: Vec<(String, SolveParams)> = match mode {
        ExperimentMode::TsVsSd => vec![
            ("TS".to_string(), params.clone()),
            ("SD".to_string(), SolveParams { ts: TsParams::steepest_descent(params.ts.alpha), ..params.clone() }),
        ],
        ExperimentMode::Pr1VsPr2 => [RelinkStrategy::Random, RelinkStrategy::Greedy]
            .into_iter()
            .map(|s| (s.tag().to_string(), SolveParams { strategy: s, ..params.clone() }))
            .collect(),
        ExperimentMode::AlphaSweep => ALPHA_SWEEP
            .into_iter()
            .map(|alpha| {
                let p = SolveParams {
                    ts: TsParams { alpha, ..params.ts },
                    max_generations: Some(params.max_generations.unwrap_or(DEFAULT_SWEEP_GENERATIONS)),
                    ..params.clone()
                };
                (format!("alpha={alpha}"), p)
            })
            .collect(),
    };
    let per_offspring = mode == ExperimentMode::Pr1VsPr2;
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for rep in 0..repetitions {
        let seed = derive_seed(params.seed, &[rep as u64]);
        for (tag, p) in &variants {
            let p = SolveParams { seed, ..p.clone() };
            let mut collector = TraceCollector { tag: tag.clone(), seed, per_offspring, rows: &mut rows };
            let out = solve_k_observed(inst, k, &p, &mut collector)?;
            series.push(SeriesResult {
                tag: tag.clone(),
                seed,
                status: out.status,
                best_f: out.best_f.to_i64().unwrap_or(i64::MAX),
                elapsed: out.elapsed,
            });
        }
    }
    Ok(ExperimentResult { rows, series })
}
