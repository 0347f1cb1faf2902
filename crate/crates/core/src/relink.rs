//! Path relinking between two colorings.
//!
//! Starting from the initiating coloring, the positions where it differs
//! from the guiding coloring are switched to the guiding value one at a
//! time, giving path solutions `s(0) = from, s(1), ..., s(r)` with
//! `r = |NC| - 1`. The random strategy switches a uniformly chosen
//! remaining position, the greedy strategy one with the smallest objective
//! change. Objective values along the path come from the incremental
//! [`EvalState`], built once per call.
//!
//! The reference solution is the best path solution at distance at least
//! `ceil(xi * |NC|)` from both endpoints (earliest on ties). When no path
//! solution is that far, the best of `s(1) ..= s(r-1)` is used instead.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;

use crate::cost::{ceil_mul, Cost, Ratio};
use crate::eval::{evaluate_direct, hamming_distance, Coloring, EvalError, EvalState};
use crate::instance::BcpInstance;
use crate::rng::{index, take_tie};

/// How the next position to switch is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RelinkStrategy {
    /// Uniformly at random among the remaining differing positions (PR1).
    #[default]
    Random,
    /// Smallest objective change, random among ties (PR2).
    Greedy,
}

impl RelinkStrategy {
    pub fn tag(self) -> &'static str {
        match self {
            RelinkStrategy::Random => "PR1",
            RelinkStrategy::Greedy => "PR2",
        }
    }
}

impl fmt::Display for RelinkStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for RelinkStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pr1" | "random" => Ok(RelinkStrategy::Random),
            "pr2" | "greedy" => Ok(RelinkStrategy::Greedy),
            other => Err(format!("unknown relinking strategy {other:?} (expected pr1 or pr2)")),
        }
    }
}

/// One step of a path: position `vertex` switched to the guiding color.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStep<C> {
    pub m: usize,
    pub vertex: usize,
    pub delta: C,
    pub f: C,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathTrace<C> {
    pub nc_size: usize,
    /// Objective of `s(0)`.
    pub start_f: C,
    pub steps: Vec<PathStep<C>>,
    /// Path index `m` of the reference solution.
    pub selected: Option<usize>,
}

impl<C: Cost> PathTrace<C> {
    /// Writes `m,t,delta,f` rows (1-based vertex ids).
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "m,t,delta,f")?;
        for s in &self.steps {
            writeln!(out, "{},{},{},{}", s.m, s.vertex + 1, s.delta, s.f)?;
        }
        Ok(())
    }

    /// Rebuilds path solution `s(m)` from the initiating and guiding colorings.
    pub fn path_solution(&self, from: &Coloring, to: &Coloring, m: usize) -> Coloring {
        let mut s = from.clone();
        for step in &self.steps[..m] {
            s.set(step.vertex, to.color(step.vertex));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relinked<C> {
    /// Reference solution with its objective value.
    pub reference: Option<(Coloring, C)>,
    pub trace: PathTrace<C>,
}

/// Range of path indices `m` forming the candidate list, before the
/// fallback: `ceil(xi * nc) ..= nc - ceil(xi * nc)`, clipped to `1..=nc-1`.
pub fn candidate_range(nc: usize, xi: Ratio<u32>) -> std::ops::RangeInclusive<usize> {
    let margin = ceil_mul(xi, nc);
    let lo = margin.max(1);
    let hi = nc.saturating_sub(margin).min(nc.saturating_sub(1));
    lo..=hi
}

/// Builds a path from `from` towards `to` and selects a reference solution.
pub fn relink<C: Cost, R: Rng + ?Sized>(
    inst: &BcpInstance<C>,
    from: &Coloring,
    to: &Coloring,
    strategy: RelinkStrategy,
    xi: Ratio<u32>,
    rng: &mut R,
) -> Result<Relinked<C>, EvalError> {
    if from.k() != to.k() {
        return Err(EvalError::BudgetMismatch(from.k(), to.k()));
    }
    if to.len() != inst.n() {
        return Err(EvalError::LengthMismatch { expected: inst.n(), got: to.len() });
    }
    let mut state = EvalState::new(inst, from)?;
    let mut remaining: Vec<usize> = (0..inst.n()).filter(|&l| from.color(l) != to.color(l)).collect();
    let nc = remaining.len();
    let r = nc.saturating_sub(1);
    let start_f = state.f();
    let mut steps = Vec::with_capacity(r);
    for m in 1..=r {
        let pick = match strategy {
            RelinkStrategy::Random => index(rng, remaining.len()),
            RelinkStrategy::Greedy => greedy_pick(&state, &remaining, to, rng),
        };
        let t = remaining.swap_remove(pick);
        let delta = state.apply(t, to.color(t));
        steps.push(PathStep { m, vertex: t, delta, f: state.f() });
    }
    let mut trace = PathTrace { nc_size: nc, start_f, steps, selected: None };
    if nc <= 1 {
        return Ok(Relinked { reference: None, trace });
    }

    let mut range = candidate_range(nc, xi);
    if range.is_empty() {
        if r <= 1 {
            return Ok(Relinked { reference: None, trace });
        }
        range = 1..=r - 1;
    }
    let mut best: Option<(usize, C)> = None;
    for step in &trace.steps[range.start() - 1..*range.end()] {
        if best.is_none_or(|(_, f)| step.f < f) {
            best = Some((step.m, step.f));
        }
    }
    let (m, f) = best.expect("candidate range is nonempty");
    trace.selected = Some(m);
    let reference = trace.path_solution(from, to, m);
    Ok(Relinked { reference: Some((reference, f)), trace })
}

fn greedy_pick<C: Cost, R: Rng + ?Sized>(
    state: &EvalState<'_, C>,
    remaining: &[usize],
    to: &Coloring,
    rng: &mut R,
) -> usize {
    let mut best = 0;
    let mut best_delta = C::max_value();
    let mut ties = 0;
    for (i, &t) in remaining.iter().enumerate() {
        let d = state.delta(t, to.color(t));
        if d < best_delta {
            best_delta = d;
            best = i;
            ties = 1;
        } else if d == best_delta {
            ties += 1;
            if take_tie(rng, ties) {
                best = i;
            }
        }
    }
    best
}

/// Checks a trace against direct re-evaluation: every recorded `f(s(m))`
/// must equal the objective of the rebuilt `s(m)`, consecutive records must
/// differ by the recorded delta, and the path must have `|NC| - 1` steps.
pub fn path_deltas_consistent<C: Cost>(
    trace: &PathTrace<C>,
    inst: &BcpInstance<C>,
    from: &Coloring,
    to: &Coloring,
) -> bool {
    let Ok(nc) = hamming_distance(from, to) else { return false };
    if nc != trace.nc_size || trace.steps.len() != nc.saturating_sub(1) {
        return false;
    }
    let Ok(f0) = evaluate_direct(inst, from) else { return false };
    if f0 != trace.start_f {
        return false;
    }
    let mut s = from.clone();
    let mut prev = f0;
    for (i, step) in trace.steps.iter().enumerate() {
        if step.m != i + 1 || step.vertex >= s.len() || s.color(step.vertex) == to.color(step.vertex) {
            return false;
        }
        s.set(step.vertex, to.color(step.vertex));
        let f = evaluate_direct(inst, &s).expect("length checked");
        if step.f != f || prev + step.delta != f {
            return false;
        }
        prev = f;
    }
    true
}
