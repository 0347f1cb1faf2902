//! Tabu search over the critical one-move neighborhood.
//!
//! A move recolors one conflicting vertex. Each iteration takes a best
//! authorized move; after `<u, old, new>` the pair `(u, old)` is forbidden
//! for the next `tl` iterations, with
//! `tl = tenure_base + floor(tenure_coeff * f) + uniform{0..tenure_spread-1}`.
//! A tabu move is still authorized when it would beat the best objective of
//! the current call (aspiration).

use rand::Rng;
use thiserror::Error;

use crate::cost::{cost_to_u64, floor_mul, Cost, Ratio};
use crate::eval::{Coloring, EvalError, EvalState};
use crate::instance::BcpInstance;
use crate::rng::take_tie;

/// Local search configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TsParams {
    /// Maximum number of applied moves per call.
    pub alpha: u64,
    pub tenure_base: u64,
    pub tenure_coeff: Ratio<u32>,
    /// Width of the uniform random tenure component; 0 disables it.
    pub tenure_spread: u64,
    /// Plain steepest descent: only strictly improving moves, no tabu list,
    /// stop at the first local optimum.
    pub descent_only: bool,
}

impl Default for TsParams {
    fn default() -> Self {
        Self {
            alpha: 10_000,
            tenure_base: 0,
            tenure_coeff: Ratio::new(3, 5),
            tenure_spread: 10,
            descent_only: false,
        }
    }
}

impl TsParams {
    pub fn steepest_descent(alpha: u64) -> Self {
        Self { alpha, tenure_base: 0, tenure_coeff: Ratio::new(0, 1), tenure_spread: 0, descent_only: true }
    }

    pub fn tenure<C: Cost, R: Rng + ?Sized>(&self, f: C, rng: &mut R) -> u64 {
        let random = if self.tenure_spread > 0 { rng.gen_range(0..self.tenure_spread) } else { 0 };
        self.tenure_base + floor_mul(self.tenure_coeff, cost_to_u64(f)) + random
    }
}

/// A candidate recoloring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move<C> {
    pub vertex: usize,
    pub color: u32,
    pub delta: C,
}

/// Tabu list plus the best solution of the current call.
#[derive(Debug, Clone)]
pub struct TabuState<C> {
    k: u32,
    tabu_until: Vec<u64>,
    iteration: u64,
    best_f: C,
    best_coloring: Coloring,
}

impl<C: Cost> TabuState<C> {
    pub fn new(state: &EvalState<'_, C>) -> Self {
        Self {
            k: state.k(),
            tabu_until: vec![0; state.n() * state.k() as usize],
            iteration: 1,
            best_f: state.f(),
            best_coloring: state.to_coloring(),
        }
    }

    #[inline]
    fn slot(&self, v: usize, c: u32) -> usize {
        v * self.k as usize + (c - 1) as usize
    }

    /// Index of the iteration about to be performed (starts at 1).
    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    #[inline]
    pub fn is_tabu(&self, v: usize, c: u32) -> bool {
        self.tabu_until[self.slot(v, c)] >= self.iteration
    }

    /// Forbids giving `c` back to `v` during the next `tenure` iterations.
    pub fn forbid(&mut self, v: usize, c: u32, tenure: u64) {
        let slot = self.slot(v, c);
        self.tabu_until[slot] = self.iteration + tenure;
    }

    /// Last iteration during which `(v, c)` is forbidden (0 if never).
    pub fn tabu_until(&self, v: usize, c: u32) -> u64 {
        self.tabu_until[self.slot(v, c)]
    }

    pub fn advance(&mut self) {
        self.iteration += 1;
    }

    pub fn best_f(&self) -> C {
        self.best_f
    }

    pub fn best_coloring(&self) -> &Coloring {
        &self.best_coloring
    }

    /// Records `state` as the best of the call if it improves on it.
    pub fn observe(&mut self, state: &EvalState<'_, C>) -> bool {
        if state.f() < self.best_f {
            self.best_f = state.f();
            self.best_coloring = state.to_coloring();
            true
        } else {
            false
        }
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum SelectError<C: std::fmt::Debug> {
    #[error("no candidate moves (no conflicting vertex or a single color)")]
    NoCandidates,
    #[error("every candidate move is tabu and none aspirates")]
    NoAdmissibleMove { best_overall: Move<C> },
}

/// Picks a minimum-delta authorized move among all recolorings of
/// conflicting vertices; ties are broken uniformly at random.
pub fn select_move<C: Cost, R: Rng + ?Sized>(
    state: &EvalState<'_, C>,
    tabu: &TabuState<C>,
    rng: &mut R,
) -> Result<Move<C>, SelectError<C>> {
    let f = state.f();
    let mut best: Option<Move<C>> = None;
    let mut best_ties = 0u32;
    let mut any: Option<Move<C>> = None;
    let mut any_ties = 0u32;
    for &u in state.conflicts() {
        let cu = state.color(u);
        let here = state.q(u, cu);
        for c in 1..=state.k() {
            if c == cu {
                continue;
            }
            let delta = state.q(u, c) - here;
            let mv = Move { vertex: u, color: c, delta };
            consider(&mut any, &mut any_ties, mv, rng);
            if !tabu.is_tabu(u, c) || f + delta < tabu.best_f {
                consider(&mut best, &mut best_ties, mv, rng);
            }
        }
    }
    match (best, any) {
        (Some(mv), _) => Ok(mv),
        (None, Some(best_overall)) => Err(SelectError::NoAdmissibleMove { best_overall }),
        (None, None) => Err(SelectError::NoCandidates),
    }
}

#[inline]
fn consider<C: Cost, R: Rng + ?Sized>(slot: &mut Option<Move<C>>, ties: &mut u32, mv: Move<C>, rng: &mut R) {
    match slot {
        Some(cur) if mv.delta > cur.delta => {}
        Some(cur) if mv.delta == cur.delta => {
            *ties += 1;
            if take_tie(rng, *ties) {
                *slot = Some(mv);
            }
        }
        _ => {
            *slot = Some(mv);
            *ties = 1;
        }
    }
}

/// Result of one local search call.
#[derive(Debug, Clone, PartialEq)]
pub struct TsOutcome<C> {
    pub coloring: Coloring,
    pub f: C,
    /// Number of applied moves.
    pub iterations: u64,
}

/// Improves `start` and returns the best coloring met. Stops after
/// `alpha` moves or as soon as the objective reaches zero.
pub fn tabu_search<C: Cost, R: Rng + ?Sized>(
    inst: &BcpInstance<C>,
    start: &Coloring,
    params: &TsParams,
    rng: &mut R,
) -> Result<TsOutcome<C>, EvalError> {
    let mut state = EvalState::new(inst, start)?;
    if params.descent_only {
        return Ok(steepest_descent(&mut state, params.alpha, rng));
    }
    let mut tabu = TabuState::new(&state);
    let mut iterations = 0;
    while iterations < params.alpha && state.f() > C::zero() {
        let mv = match select_move(&state, &tabu, rng) {
            Ok(mv) => mv,
            Err(SelectError::NoAdmissibleMove { best_overall }) => best_overall,
            Err(SelectError::NoCandidates) => break,
        };
        let old = state.color(mv.vertex);
        state.apply(mv.vertex, mv.color);
        let tenure = params.tenure(state.f(), rng);
        tabu.forbid(mv.vertex, old, tenure);
        tabu.advance();
        iterations += 1;
        tabu.observe(&state);
    }
    Ok(TsOutcome { coloring: tabu.best_coloring, f: tabu.best_f, iterations })
}

fn steepest_descent<C: Cost, R: Rng + ?Sized>(state: &mut EvalState<'_, C>, alpha: u64, rng: &mut R) -> TsOutcome<C> {
    let mut iterations = 0;
    while iterations < alpha && state.f() > C::zero() {
        let mut best: Option<Move<C>> = None;
        let mut ties = 0;
        for &u in state.conflicts() {
            let cu = state.color(u);
            for c in (1..=state.k()).filter(|&c| c != cu) {
                let mv = Move { vertex: u, color: c, delta: state.delta(u, c) };
                consider(&mut best, &mut ties, mv, rng);
            }
        }
        match best {
            Some(mv) if mv.delta < C::zero() => {
                state.apply(mv.vertex, mv.color);
                iterations += 1;
            }
            _ => break,
        }
    }
    TsOutcome { coloring: state.to_coloring(), f: state.f(), iterations }
}
