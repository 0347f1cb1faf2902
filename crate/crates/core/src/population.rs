//! Elite population and the set of unprocessed solution pairs.

use rand::Rng;
use thiserror::Error;

use crate::cost::Cost;
use crate::eval::{hamming_distance, Coloring, EvalError};
use crate::instance::BcpInstance;
use crate::rng::index;
use crate::tabu::{tabu_search, TsParams};

/// Work counters shared by initialization and the main loop.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchCounters {
    pub ts_calls: u64,
    pub ts_iterations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member<C> {
    /// Stable identity used by [`PairSet`]; never reused within a population.
    pub id: u64,
    pub coloring: Coloring,
    pub f: C,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population<C> {
    members: Vec<Member<C>>,
    next_id: u64,
}

impl<C: Cost> Population<C> {
    pub fn from_members(solutions: Vec<(Coloring, C)>) -> Self {
        let members: Vec<Member<C>> = solutions
            .into_iter()
            .enumerate()
            .map(|(i, (coloring, f))| Member { id: i as u64, coloring, f })
            .collect();
        Self { next_id: members.len() as u64, members }
    }

    pub fn members(&self) -> &[Member<C>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, id: u64) -> Option<&Member<C>> {
        self.members.iter().find(|m| m.id == id)
    }

    /// Position of the worst member (largest f, earliest on ties).
    pub fn worst_index(&self) -> usize {
        let mut worst = 0;
        for (i, m) in self.members.iter().enumerate() {
            if m.f > self.members[worst].f {
                worst = i;
            }
        }
        worst
    }

    /// Best member (smallest f, earliest on ties).
    pub fn best(&self) -> &Member<C> {
        let mut best = &self.members[0];
        for m in &self.members[1..] {
            if m.f < best.f {
                best = m;
            }
        }
        best
    }

    pub fn mean_f(&self) -> f64 {
        let total: f64 = self.members.iter().map(|m| m.f.to_f64().unwrap_or(f64::NAN)).sum();
        total / self.members.len() as f64
    }

    /// Replaces the member at `pos`, returning the evicted member.
    fn replace(&mut self, pos: usize, coloring: Coloring, f: C) -> (u64, Member<C>) {
        let id = self.next_id;
        self.next_id += 1;
        let old = std::mem::replace(&mut self.members[pos], Member { id, coloring, f });
        (id, old)
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("pair set is empty")]
pub struct EmptyPairSet;

/// Unordered pairs of member ids still waiting to be relinked.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairSet {
    pairs: Vec<(u64, u64)>,
}

impl PairSet {
    /// All `p (p - 1) / 2` pairs of the population.
    pub fn full<C>(pop: &Population<C>) -> Self {
        let ids: Vec<u64> = pop.members.iter().map(|m| m.id).collect();
        let mut pairs = Vec::with_capacity(ids.len() * ids.len().saturating_sub(1) / 2);
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                pairs.push(ordered(a, b));
            }
        }
        Self { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: u64, b: u64) -> bool {
        self.pairs.contains(&ordered(a, b))
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    /// Removes and returns a uniformly chosen pair.
    pub fn pick<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(u64, u64), EmptyPairSet> {
        if self.pairs.is_empty() {
            return Err(EmptyPairSet);
        }
        let i = index(rng, self.pairs.len());
        Ok(self.pairs.swap_remove(i))
    }

    fn remove_member(&mut self, id: u64) {
        self.pairs.retain(|&(a, b)| a != id && b != id);
    }
}

fn ordered(a: u64, b: u64) -> (u64, u64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Result of building a population.
#[derive(Debug, Clone, PartialEq)]
pub enum Initialized<C> {
    Ready(Population<C>),
    /// A legal coloring turned up during construction.
    Legal(Coloring),
    /// The stop condition fired before `3p` candidates were optimized; the
    /// best candidate seen so far is returned if any.
    Interrupted(Option<(Coloring, C)>),
}

/// Generates `3p` uniformly random colorings, improves each with local
/// search and keeps the `p` best (earliest generated on ties). Returns
/// early on the first legal coloring or when `stop` reports true.
pub fn init_population<C: Cost, R: Rng + ?Sized>(
    inst: &BcpInstance<C>,
    k: u32,
    p: usize,
    ts: &TsParams,
    rng: &mut R,
    stop: &dyn Fn() -> bool,
    counters: &mut SearchCounters,
) -> Result<Initialized<C>, EvalError> {
    assert!(p >= 2, "population size must be at least 2");
    let mut candidates: Vec<(Coloring, C)> = Vec::with_capacity(3 * p);
    for _ in 0..3 * p {
        if stop() {
            let best = candidates.into_iter().min_by_key(|(_, f)| *f);
            return Ok(Initialized::Interrupted(best));
        }
        let start = Coloring::random(inst.n(), k, rng);
        let out = tabu_search(inst, &start, ts, rng)?;
        counters.ts_calls += 1;
        counters.ts_iterations += out.iterations;
        if out.f == C::zero() {
            return Ok(Initialized::Legal(out.coloring));
        }
        candidates.push((out.coloring, out.f));
    }
    // stable: equal f keeps generation order
    candidates.sort_by_key(|(_, f)| *f);
    candidates.truncate(p);
    Ok(Initialized::Ready(Population::from_members(candidates)))
}

/// Rebuilds the population from scratch and puts `best` in place of the
/// new worst member.
#[allow(clippy::too_many_arguments)]
pub fn restart<C: Cost, R: Rng + ?Sized>(
    inst: &BcpInstance<C>,
    best: &(Coloring, C),
    k: u32,
    p: usize,
    ts: &TsParams,
    rng: &mut R,
    stop: &dyn Fn() -> bool,
    counters: &mut SearchCounters,
) -> Result<Initialized<C>, EvalError> {
    Ok(match init_population(inst, k, p, ts, rng, stop, counters)? {
        Initialized::Ready(mut pop) => {
            let worst = pop.worst_index();
            pop.replace(worst, best.0.clone(), best.1);
            Initialized::Ready(pop)
        }
        other => other,
    })
}

/// Outcome of [`try_insert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insertion {
    Accepted { id: u64, evicted: u64 },
    NotBetterThanWorst,
    TooClose { member: u64, distance: usize },
}

/// True when two colorings of length `n` differ in fewer than `0.1 n` positions.
pub fn too_close(distance: usize, n: usize) -> bool {
    10 * distance < n
}

/// Replaces the worst member with `candidate` if it is strictly better and
/// not too close to any member; pairs are updated accordingly.
pub fn try_insert<C: Cost>(
    pop: &mut Population<C>,
    pairs: &mut PairSet,
    candidate: &Coloring,
    f: C,
) -> Result<Insertion, EvalError> {
    let worst = pop.worst_index();
    if f >= pop.members[worst].f {
        return Ok(Insertion::NotBetterThanWorst);
    }
    let n = candidate.len();
    for m in &pop.members {
        let distance = hamming_distance(candidate, &m.coloring)?;
        if too_close(distance, n) {
            return Ok(Insertion::TooClose { member: m.id, distance });
        }
    }
    let (id, old) = pop.replace(worst, candidate.clone(), f);
    pairs.remove_member(old.id);
    for m in &pop.members {
        if m.id != id {
            pairs.pairs.push(ordered(id, m.id));
        }
    }
    Ok(Insertion::Accepted { id, evicted: old.id })
}
