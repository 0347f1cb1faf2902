//! k-colorings, the violation objective and incremental move evaluation.
//!
//! The objective of a coloring is the total separation shortfall
//! `sum over edges of max(0, d(i,j) - |c_i - c_j|)`; it is zero exactly for
//! legal colorings. [`EvalState`] keeps, for every vertex `v` and color `c`,
//! the shortfall `q[v][c]` that `v` would incur against its neighbors if it
//! took color `c`. With that table any one-vertex recoloring is scored in
//! constant time, and applying it only touches the rows of the recolored
//! vertex's neighbors, within `d - 1` of the old and the new color.

use rand::Rng;
use thiserror::Error;

use crate::cost::{cost_from_u32, Cost};
use crate::instance::BcpInstance;
use crate::rng::index;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("coloring has {got} entries, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("color {color} outside 1..={k}")]
    ColorOutOfRange { color: u32, k: u32 },
    #[error("color budget k must be at least 1")]
    NoColors,
    #[error("colorings use different color budgets ({0} vs {1})")]
    BudgetMismatch(u32, u32),
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex {vertex} already has color {color}")]
    NullMove { vertex: usize, color: u32 },
}

/// One color in `1..=k` per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    colors: Vec<u32>,
    k: u32,
}

impl Coloring {
    pub fn new(colors: Vec<u32>, k: u32) -> Result<Self, EvalError> {
        if k == 0 {
            return Err(EvalError::NoColors);
        }
        if let Some(&color) = colors.iter().find(|&&c| c == 0 || c > k) {
            return Err(EvalError::ColorOutOfRange { color, k });
        }
        Ok(Self { colors, k })
    }

    /// Every vertex gets a color drawn uniformly from `1..=k`.
    pub fn random<R: Rng + ?Sized>(n: usize, k: u32, rng: &mut R) -> Self {
        assert!(k >= 1, "color budget must be positive");
        let colors = (0..n).map(|_| rng.gen_range(1..=k)).collect();
        Self { colors, k }
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Largest color actually used.
    pub fn span(&self) -> u32 {
        self.colors.iter().copied().max().unwrap_or(0)
    }

    pub fn into_colors(self) -> Vec<u32> {
        self.colors
    }

    pub(crate) fn set(&mut self, v: usize, c: u32) {
        debug_assert!((1..=self.k).contains(&c));
        self.colors[v] = c;
    }
}

/// Reference objective: sums the shortfall edge by edge.
pub fn evaluate_direct<C: Cost>(inst: &BcpInstance<C>, s: &Coloring) -> Result<C, EvalError> {
    if s.len() != inst.n() {
        return Err(EvalError::LengthMismatch { expected: inst.n(), got: s.len() });
    }
    let c = s.colors();
    Ok(inst
        .edges()
        .iter()
        .map(|e| {
            let gap = cost_from_u32::<C>(c[e.u].abs_diff(c[e.v]));
            (e.d - gap).max(C::zero())
        })
        .sum())
}

/// Number of positions where the two colorings differ.
pub fn hamming_distance(a: &Coloring, b: &Coloring) -> Result<usize, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch { expected: a.len(), got: b.len() });
    }
    Ok(a.colors().iter().zip(b.colors()).filter(|(x, y)| x != y).count())
}

const ABSENT: usize = usize::MAX;

/// A coloring together with its shortfall table, objective value and the
/// set of conflicting vertices, all kept consistent under single-vertex moves.
#[derive(Debug, Clone)]
pub struct EvalState<'a, C> {
    inst: &'a BcpInstance<C>,
    k: u32,
    colors: Vec<u32>,
    q: Vec<C>,
    f: C,
    conflicts: Vec<usize>,
    conflict_pos: Vec<usize>,
}

impl<'a, C: Cost> EvalState<'a, C> {
    pub fn new(inst: &'a BcpInstance<C>, s: &Coloring) -> Result<Self, EvalError> {
        if s.len() != inst.n() {
            return Err(EvalError::LengthMismatch { expected: inst.n(), got: s.len() });
        }
        let k = s.k();
        let n = inst.n();
        let mut state = Self {
            inst,
            k,
            colors: s.colors().to_vec(),
            q: vec![C::zero(); n * k as usize],
            f: C::zero(),
            conflicts: Vec::new(),
            conflict_pos: vec![ABSENT; n],
        };
        for v in 0..n {
            for &(u, d) in inst.neighbors(v) {
                let cu = state.colors[u];
                state.add_window(v, cu, d, true);
            }
        }
        let mut twice_f = C::zero();
        for v in 0..n {
            let own = state.q(v, state.colors[v]);
            twice_f = twice_f + own;
            if own > C::zero() {
                state.conflict_pos[v] = state.conflicts.len();
                state.conflicts.push(v);
            }
        }
        state.f = twice_f / (C::one() + C::one());
        Ok(state)
    }

    #[inline]
    fn slot(&self, v: usize, c: u32) -> usize {
        v * self.k as usize + (c - 1) as usize
    }

    /// Adds (or removes) the contribution of a neighbor colored `center`
    /// with separation `d` to row `v`.
    #[inline]
    fn add_window(&mut self, v: usize, center: u32, d: C, add: bool) {
        let reach = d.to_u64().unwrap_or(u64::MAX).saturating_sub(1);
        let lo = (center as u64).saturating_sub(reach).max(1) as u32;
        let hi = (center as u64).saturating_add(reach).min(self.k as u64) as u32;
        let base = self.slot(v, 1);
        for x in lo..=hi {
            let amount = d - cost_from_u32::<C>(x.abs_diff(center));
            let cell = &mut self.q[base + (x - 1) as usize];
            *cell = if add { *cell + amount } else { *cell - amount };
        }
    }

    #[inline]
    fn refresh_membership(&mut self, v: usize) {
        let conflicting = self.q(v, self.colors[v]) > C::zero();
        let pos = self.conflict_pos[v];
        if conflicting && pos == ABSENT {
            self.conflict_pos[v] = self.conflicts.len();
            self.conflicts.push(v);
        } else if !conflicting && pos != ABSENT {
            self.conflicts.swap_remove(pos);
            if let Some(&moved) = self.conflicts.get(pos) {
                self.conflict_pos[moved] = pos;
            }
            self.conflict_pos[v] = ABSENT;
        }
    }

    pub fn instance(&self) -> &'a BcpInstance<C> {
        self.inst
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    /// Current objective value.
    pub fn f(&self) -> C {
        self.f
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    /// Shortfall vertex `v` would have against its neighbors with color `c`.
    #[inline]
    pub fn q(&self, v: usize, c: u32) -> C {
        self.q[self.slot(v, c)]
    }

    /// Vertices with at least one violated incident edge, in no particular order.
    pub fn conflicts(&self) -> &[usize] {
        &self.conflicts
    }

    pub fn is_conflicting(&self, v: usize) -> bool {
        self.conflict_pos[v] != ABSENT
    }

    pub fn is_legal(&self) -> bool {
        self.conflicts.is_empty()
    }

    pub fn to_coloring(&self) -> Coloring {
        Coloring { colors: self.colors.clone(), k: self.k }
    }

    /// Objective change if `u` were recolored to `c`. Unchecked.
    #[inline]
    pub fn delta(&self, u: usize, c: u32) -> C {
        self.q(u, c) - self.q(u, self.colors[u])
    }

    pub fn checked_delta(&self, u: usize, c: u32) -> Result<C, EvalError> {
        self.validate_move(u, c)?;
        Ok(self.delta(u, c))
    }

    fn validate_move(&self, u: usize, c: u32) -> Result<(), EvalError> {
        if u >= self.n() {
            return Err(EvalError::VertexOutOfRange { vertex: u, n: self.n() });
        }
        if c == 0 || c > self.k {
            return Err(EvalError::ColorOutOfRange { color: c, k: self.k });
        }
        if c == self.colors[u] {
            return Err(EvalError::NullMove { vertex: u, color: c });
        }
        Ok(())
    }

    /// Recolors `u` to `c` and returns the objective change. Unchecked.
    pub fn apply(&mut self, u: usize, c: u32) -> C {
        let old = self.colors[u];
        debug_assert_ne!(old, c);
        let delta = self.delta(u, c);
        let inst = self.inst;
        for &(w, d) in inst.neighbors(u) {
            self.add_window(w, old, d, false);
            self.add_window(w, c, d, true);
            self.refresh_membership(w);
        }
        self.colors[u] = c;
        self.f = self.f + delta;
        self.refresh_membership(u);
        delta
    }

    pub fn checked_apply(&mut self, u: usize, c: u32) -> Result<C, EvalError> {
        self.validate_move(u, c)?;
        Ok(self.apply(u, c))
    }

    /// Rebuilds everything from scratch and compares: table entries,
    /// objective, and conflict membership.
    pub fn matches_rebuild(&self) -> bool {
        let fresh = Self::new(self.inst, &self.to_coloring()).expect("own coloring is valid");
        let mut a = self.conflicts.clone();
        let mut b = fresh.conflicts.clone();
        a.sort_unstable();
        b.sort_unstable();
        fresh.q == self.q && fresh.f == self.f && a == b
    }
}

/// Draws a vertex of the current conflict set uniformly.
pub fn random_conflict<C: Cost, R: Rng + ?Sized>(state: &EvalState<'_, C>, rng: &mut R) -> Option<usize> {
    let conflicts = state.conflicts();
    if conflicts.is_empty() {
        None
    } else {
        Some(conflicts[index(rng, conflicts.len())])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path3() -> BcpInstance<i32> {
        BcpInstance::new(3, [(1, 2, 3), (2, 3, 2)]).unwrap()
    }

    #[test]
    fn coloring_validation() {
        assert!(Coloring::new(vec![1, 5], 5).is_ok());
        assert_eq!(Coloring::new(vec![0], 3), Err(EvalError::ColorOutOfRange { color: 0, k: 3 }));
        assert_eq!(Coloring::new(vec![4], 3), Err(EvalError::ColorOutOfRange { color: 4, k: 3 }));
        assert_eq!(Coloring::new(vec![1], 0), Err(EvalError::NoColors));
    }

    #[test]
    fn direct_objective_hand_value() {
        let s = Coloring::new(vec![1, 2, 4], 5).unwrap();
        // max(0, 3-1) + max(0, 2-2)
        assert_eq!(evaluate_direct(&path3(), &s), Ok(2));
        let legal = Coloring::new(vec![1, 4, 2], 5).unwrap();
        assert_eq!(evaluate_direct(&path3(), &legal), Ok(0));
    }

    #[test]
    fn unit_separation_same_color_counts_one() {
        let inst = BcpInstance::new(2, [(1, 2, 1)]).unwrap();
        let s = Coloring::new(vec![3, 3], 3).unwrap();
        assert_eq!(evaluate_direct(&inst, &s), Ok(1));
    }

    #[test]
    fn direct_objective_length_mismatch() {
        let s = Coloring::new(vec![1, 2], 5).unwrap();
        assert_eq!(
            evaluate_direct(&path3(), &s),
            Err(EvalError::LengthMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn table_entries_by_hand() {
        let inst = path3();
        let s = Coloring::new(vec![1, 2, 4], 5).unwrap();
        let st = EvalState::new(&inst, &s).unwrap();
        assert_eq!(st.q(1, 2), 2);
        assert_eq!(st.f(), 2);
        let mut conf = st.conflicts().to_vec();
        conf.sort_unstable();
        assert_eq!(conf, vec![0, 1]);
    }

    #[test]
    fn isolated_vertex_row_is_zero() {
        let inst = BcpInstance::new(3, [(1, 2, 2)]).unwrap();
        let st = EvalState::new(&inst, &Coloring::new(vec![1, 1, 1], 4).unwrap()).unwrap();
        assert!((1..=4).all(|c| st.q(2, c) == 0));
    }

    #[test]
    fn delta_by_hand() {
        let inst = path3();
        let mut st = EvalState::new(&inst, &Coloring::new(vec![1, 2, 4], 5).unwrap()).unwrap();
        assert_eq!(st.checked_delta(1, 5), Ok(-1));
        assert_eq!(st.checked_apply(1, 5), Ok(-1));
        assert_eq!(st.f(), 1);
        assert_eq!(evaluate_direct(&inst, &st.to_coloring()), Ok(1));
        assert!(st.matches_rebuild());
    }

    #[test]
    fn neutral_move_has_zero_delta() {
        let inst = BcpInstance::new(2, [(1, 2, 2)]).unwrap();
        let st = EvalState::new(&inst, &Coloring::new(vec![3, 3], 5).unwrap()).unwrap();
        // colors 2 and 4 are symmetric around the neighbor
        assert_eq!(st.q(0, 2), st.q(0, 4));
        assert_eq!(st.delta(0, 2) - st.delta(0, 4), 0);
        let st2 = EvalState::new(&inst, &Coloring::new(vec![2, 3], 5).unwrap()).unwrap();
        assert_eq!(st2.delta(0, 4), 0);
    }

    #[test]
    fn move_errors() {
        let inst = path3();
        let st = EvalState::new(&inst, &Coloring::new(vec![1, 2, 4], 5).unwrap()).unwrap();
        assert_eq!(st.checked_delta(0, 6), Err(EvalError::ColorOutOfRange { color: 6, k: 5 }));
        assert_eq!(st.checked_delta(0, 0), Err(EvalError::ColorOutOfRange { color: 0, k: 5 }));
        assert_eq!(st.checked_delta(0, 1), Err(EvalError::NullMove { vertex: 0, color: 1 }));
        assert!(matches!(st.checked_delta(3, 1), Err(EvalError::VertexOutOfRange { .. })));
    }

    #[test]
    fn move_that_clears_all_conflicts() {
        let inst = path3();
        let mut st = EvalState::new(&inst, &Coloring::new(vec![1, 2, 4], 5).unwrap()).unwrap();
        // vertex 2 to color 5 leaves (5,4) short by one; vertex 3 to 2 fixes that
        st.apply(1, 5);
        let d = st.delta(2, 2);
        assert_eq!(d, -st.f());
        st.apply(2, 2);
        assert!(st.is_legal());
        assert_eq!(st.f(), 0);
    }

    #[test]
    fn move_and_reverse_restores_state() {
        let inst = BcpInstance::new(4, [(1, 2, 3), (2, 3, 2), (1, 4, 4), (3, 4, 1)]).unwrap();
        let s = Coloring::new(vec![2, 3, 3, 6], 6).unwrap();
        let original = EvalState::new(&inst, &s).unwrap();
        let mut st = original.clone();
        st.apply(1, 6);
        st.apply(1, 3);
        assert_eq!(st.q, original.q);
        assert_eq!(st.f(), original.f());
        assert_eq!(st.colors(), original.colors());
    }

    #[test]
    fn wide_separation_covers_whole_row() {
        let inst = BcpInstance::new(2, [(1, 2, 10)]).unwrap();
        let mut st = EvalState::new(&inst, &Coloring::new(vec![1, 3], 4).unwrap()).unwrap();
        assert_eq!(st.f(), 8);
        st.apply(1, 4);
        assert_eq!(st.f(), 7);
        assert!(st.matches_rebuild());
    }

    #[test]
    fn hamming() {
        let a = Coloring::new(vec![1, 2, 3], 4).unwrap();
        assert_eq!(hamming_distance(&a, &a), Ok(0));
        let x = Coloring::new(vec![1, 1, 1, 1], 4).unwrap();
        let y = Coloring::new(vec![1, 2, 3, 4], 4).unwrap();
        assert_eq!(hamming_distance(&x, &y), Ok(3));
        assert_eq!(hamming_distance(&y, &x), Ok(3));
        assert!(hamming_distance(&a, &x).is_err());
    }

    #[test]
    fn random_moves_stay_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let inst = BcpInstance::new(
            6,
            [(1, 2, 3), (1, 3, 1), (2, 4, 5), (3, 4, 2), (4, 5, 4), (5, 6, 2), (1, 6, 3)],
        )
        .unwrap();
        let s = Coloring::random(6, 7, &mut rng);
        let mut st = EvalState::new(&inst, &s).unwrap();
        for _ in 0..500 {
            let u = rng.gen_range(0..6);
            let c = rng.gen_range(1..=7);
            if c == st.color(u) {
                continue;
            }
            let before = st.f();
            let d = st.apply(u, c);
            assert_eq!(st.f(), before + d);
            assert_eq!(evaluate_direct(&inst, &st.to_coloring()).unwrap(), st.f());
        }
        assert!(st.matches_rebuild());
    }
}
