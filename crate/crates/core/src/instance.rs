//! Problem instances.
//!
//! Vertex ids passed to constructors are 1-based, as in instance files.
//! Everything stored and returned is 0-based.

use thiserror::Error;

use crate::cost::{cost_from_u32, Cost};
use crate::eval::Coloring;

/// Default cap on the vertex count produced by [`BmcpInstance::to_bcp`].
pub const DEFAULT_MAX_SPLIT_VERTICES: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance must have at least one vertex")]
    NoVertices,
    #[error("vertex id {id} out of range 1..={n}")]
    VertexOutOfRange { id: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({u},{v}) has separation {d} < 1")]
    NonPositiveSeparation { u: usize, v: usize, d: String },
    #[error("edge ({u},{v}) listed with conflicting separations {first} and {second}")]
    ConflictingDuplicate { u: usize, v: usize, first: String, second: String },
    #[error("vertex {id} has demand 0")]
    ZeroDemand { id: usize },
    #[error("vertex {id} has demand {w} but self-separation {d} < 1")]
    BadSelfSeparation { id: usize, w: u32, d: String },
    #[error("expected {expected} per-vertex entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("sum of separations overflows the cost type")]
    CostOverflow,
    #[error("transformed instance would have {count} vertices, limit is {limit}")]
    TooManyVertices { count: usize, limit: usize },
}

/// A weighted edge with `u < v` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge<C> {
    pub u: usize,
    pub v: usize,
    pub d: C,
}

/// Bandwidth coloring instance: an undirected graph whose edges carry
/// minimum color separations.
#[derive(Debug, Clone, PartialEq)]
pub struct BcpInstance<C> {
    n: usize,
    edges: Vec<Edge<C>>,
    adjacency: Vec<Vec<(usize, C)>>,
    max_separation: C,
}

impl<C: Cost> BcpInstance<C> {
    /// Builds and validates an instance from 1-based `(u, v, d)` triples.
    ///
    /// Edges are canonicalized to `u < v`; repeated pairs with equal `d` are
    /// merged, repeated pairs with different `d` are rejected. The sum of all
    /// separations must fit in `C` so that the objective can never overflow.
    pub fn new<I>(n: usize, raw_edges: I) -> Result<Self, InstanceError>
    where
        I: IntoIterator<Item = (usize, usize, C)>,
    {
        if n == 0 {
            return Err(InstanceError::NoVertices);
        }
        let mut edges: Vec<Edge<C>> = Vec::new();
        for (a, b, d) in raw_edges {
            for id in [a, b] {
                if id == 0 || id > n {
                    return Err(InstanceError::VertexOutOfRange { id, n });
                }
            }
            if a == b {
                return Err(InstanceError::SelfLoop(a));
            }
            if d < C::one() {
                return Err(InstanceError::NonPositiveSeparation { u: a, v: b, d: d.to_string() });
            }
            let (u, v) = if a < b { (a - 1, b - 1) } else { (b - 1, a - 1) };
            edges.push(Edge { u, v, d });
        }
        edges.sort_by_key(|e| (e.u, e.v));
        let mut merged: Vec<Edge<C>> = Vec::with_capacity(edges.len());
        for e in edges {
            match merged.last() {
                Some(last) if last.u == e.u && last.v == e.v => {
                    if last.d != e.d {
                        return Err(InstanceError::ConflictingDuplicate {
                            u: e.u + 1,
                            v: e.v + 1,
                            first: last.d.to_string(),
                            second: e.d.to_string(),
                        });
                    }
                }
                _ => merged.push(e),
            }
        }
        Self::from_canonical(n, merged)
    }

    fn from_canonical(n: usize, edges: Vec<Edge<C>>) -> Result<Self, InstanceError> {
        let mut total = C::zero();
        let mut max_separation = C::zero();
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            total = total.checked_add(&e.d).ok_or(InstanceError::CostOverflow)?;
            max_separation = max_separation.max(e.d);
            adjacency[e.u].push((e.v, e.d));
            adjacency[e.v].push((e.u, e.d));
        }
        // q entries reach 2 * sum(d) transiently during delta computation
        total.checked_add(&total).ok_or(InstanceError::CostOverflow)?;
        Ok(Self { n, edges, adjacency, max_separation })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge<C>] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v` with their separations.
    pub fn neighbors(&self, v: usize) -> &[(usize, C)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Sum of separations over the edges incident to `v`.
    pub fn weighted_degree(&self, v: usize) -> C {
        self.adjacency[v].iter().map(|&(_, d)| d).sum()
    }

    /// Largest edge separation, zero for an edgeless graph.
    pub fn max_separation(&self) -> C {
        self.max_separation
    }

    /// Trivial lower bound on the number of colors: `1 + max d`, or 1 without edges.
    pub fn trivial_lower_bound(&self) -> u32 {
        if self.edges.is_empty() {
            1
        } else {
            self.max_separation.to_u32().map_or(u32::MAX, |d| d.saturating_add(1))
        }
    }
}

/// Bandwidth multicoloring instance: vertex `i` needs `demand[i]` distinct
/// colors, pairwise at least `self_separation[i]` apart.
#[derive(Debug, Clone, PartialEq)]
pub struct BmcpInstance<C> {
    demand: Vec<u32>,
    self_separation: Vec<C>,
    graph: BcpInstance<C>,
}

impl<C: Cost> BmcpInstance<C> {
    /// Builds and validates a multicoloring instance; edges as in
    /// [`BcpInstance::new`]. Self-separations are only checked (`>= 1`) on
    /// vertices with demand above one.
    pub fn new<I>(demand: Vec<u32>, self_separation: Vec<C>, raw_edges: I) -> Result<Self, InstanceError>
    where
        I: IntoIterator<Item = (usize, usize, C)>,
    {
        let n = demand.len();
        if self_separation.len() != n {
            return Err(InstanceError::LengthMismatch { expected: n, got: self_separation.len() });
        }
        for (i, (&w, &d)) in demand.iter().zip(&self_separation).enumerate() {
            if w == 0 {
                return Err(InstanceError::ZeroDemand { id: i + 1 });
            }
            if w > 1 && d < C::one() {
                return Err(InstanceError::BadSelfSeparation { id: i + 1, w, d: d.to_string() });
            }
        }
        let graph = BcpInstance::new(n, raw_edges)?;
        Ok(Self { demand, self_separation, graph })
    }

    pub fn n(&self) -> usize {
        self.demand.len()
    }

    pub fn demand(&self, v: usize) -> u32 {
        self.demand[v]
    }

    pub fn demands(&self) -> &[u32] {
        &self.demand
    }

    pub fn self_separation(&self, v: usize) -> C {
        self.self_separation[v]
    }

    /// The underlying graph with its cross-vertex separations.
    pub fn graph(&self) -> &BcpInstance<C> {
        &self.graph
    }

    pub fn total_demand(&self) -> usize {
        self.demand.iter().map(|&w| w as usize).sum()
    }

    /// Splits every vertex into a clique of `demand` copies whose internal
    /// edges carry the self-separation; every copy pair across an original
    /// edge inherits that edge's separation.
    pub fn to_bcp(&self, max_vertices: usize) -> Result<(BcpInstance<C>, VertexMap), InstanceError> {
        let count = self.total_demand();
        if count > max_vertices {
            return Err(InstanceError::TooManyVertices { count, limit: max_vertices });
        }
        let map = VertexMap::from_demands(&self.demand);
        let mut edges = Vec::new();
        for (i, range) in map.ranges().enumerate() {
            let d = self.self_separation[i];
            for a in range.clone() {
                for b in a + 1..range.end {
                    edges.push(Edge { u: a, v: b, d });
                }
            }
        }
        for e in self.graph.edges() {
            for a in map.range(e.u) {
                for b in map.range(e.v) {
                    edges.push(Edge { u: a, v: b, d: e.d });
                }
            }
        }
        edges.sort_by_key(|e| (e.u, e.v));
        let bcp = BcpInstance::from_canonical(count, edges)?;
        Ok((bcp, map))
    }

    /// Checks a multicoloring against every constraint directly on the
    /// original instance (no transformation involved).
    pub fn check(&self, assignment: &MultiAssignment) -> Result<(), BmcpViolation> {
        if assignment.len() != self.n() {
            return Err(BmcpViolation::WrongVertexCount { expected: self.n(), got: assignment.len() });
        }
        for (i, colors) in assignment.iter().enumerate() {
            if colors.len() != self.demand[i] as usize {
                return Err(BmcpViolation::WrongDemand {
                    vertex: i,
                    expected: self.demand[i],
                    got: colors.len(),
                });
            }
            for (x, &a) in colors.iter().enumerate() {
                for &b in &colors[x + 1..] {
                    let gap = cost_from_u32::<C>(a.abs_diff(b));
                    if a == b || gap < self.self_separation[i] {
                        return Err(BmcpViolation::SelfSeparation { vertex: i, a, b });
                    }
                }
            }
        }
        for e in self.graph.edges() {
            for &a in &assignment[e.u] {
                for &b in &assignment[e.v] {
                    if cost_from_u32::<C>(a.abs_diff(b)) < e.d {
                        return Err(BmcpViolation::EdgeSeparation { u: e.u, v: e.v, a, b });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Colors assigned to each original vertex of a multicoloring instance.
pub type MultiAssignment = Vec<Vec<u32>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BmcpViolation {
    #[error("assignment covers {got} vertices, instance has {expected}")]
    WrongVertexCount { expected: usize, got: usize },
    #[error("vertex {vertex} has {got} colors, demand is {expected}")]
    WrongDemand { vertex: usize, expected: u32, got: usize },
    #[error("vertex {vertex}: colors {a} and {b} are too close")]
    SelfSeparation { vertex: usize, a: u32, b: u32 },
    #[error("edge ({u},{v}): colors {a} and {b} are too close")]
    EdgeSeparation { u: usize, v: usize, a: u32, b: u32 },
}

/// Correspondence between original vertices and the split vertices of the
/// transformed instance. Split vertices of original `i` form the contiguous
/// range `starts[i]..starts[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMap {
    starts: Vec<usize>,
    owner: Vec<usize>,
}

impl VertexMap {
    pub fn from_demands(demand: &[u32]) -> Self {
        let mut starts = Vec::with_capacity(demand.len() + 1);
        let mut owner = Vec::new();
        starts.push(0);
        for (i, &w) in demand.iter().enumerate() {
            owner.extend(std::iter::repeat_n(i, w as usize));
            starts.push(owner.len());
        }
        Self { starts, owner }
    }

    pub fn num_original(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn num_split(&self) -> usize {
        self.owner.len()
    }

    pub fn range(&self, original: usize) -> std::ops::Range<usize> {
        self.starts[original]..self.starts[original + 1]
    }

    pub fn ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.starts.windows(2).map(|w| w[0]..w[1])
    }

    /// Original vertex owning split vertex `split`.
    pub fn original(&self, split: usize) -> usize {
        self.owner[split]
    }

    /// Reads the multicoloring off a coloring of the transformed instance.
    /// Colors of each vertex are returned sorted ascending.
    pub fn map_back(&self, coloring: &Coloring) -> MultiAssignment {
        assert_eq!(coloring.len(), self.num_split(), "coloring does not cover the split vertices");
        self.ranges()
            .map(|r| {
                let mut colors = coloring.colors()[r].to_vec();
                colors.sort_unstable();
                colors
            })
            .collect()
    }
}
