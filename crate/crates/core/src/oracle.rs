//! Exact search for tiny instances, used to cross-check the heuristic.
//!
//! Backtracking over vertices in decreasing degree order. The first vertex
//! is limited to the lower half of the palette, since reversing every color
//! (`c -> k + 1 - c`) maps legal colorings to legal colorings.

use thiserror::Error;

use crate::cost::Cost;
use crate::eval::Coloring;
use crate::instance::BcpInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_vertices: usize,
    pub max_k: u32,
    /// Search nodes allowed per feasibility question.
    pub max_nodes: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_vertices: 12, max_k: 30, max_nodes: 50_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {n} vertices, the exact search handles at most {limit}")]
    TooManyVertices { n: usize, limit: usize },
    #[error("no legal coloring with at most {limit} colors")]
    SpanLimit { limit: u32 },
    #[error("search budget of {nodes} nodes exhausted at k = {k}")]
    Unknown { k: u32, nodes: u64 },
}

/// Legal coloring with colors in `1..=k`, or `None` when none exists.
pub fn exact_feasible<C: Cost>(
    inst: &BcpInstance<C>,
    k: u32,
    limits: &OracleLimits,
) -> Result<Option<Coloring>, OracleError> {
    let n = inst.n();
    if n > limits.max_vertices {
        return Err(OracleError::TooManyVertices { n, limit: limits.max_vertices });
    }
    if k == 0 {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| inst.degree(b).cmp(&inst.degree(a)).then(a.cmp(&b)));
    let mut search = Search { inst, k, order, colors: vec![0; n], nodes: 0, max_nodes: limits.max_nodes };
    match search.extend(0) {
        Some(true) => Ok(Some(Coloring::new(search.colors, k).expect("colors within 1..=k"))),
        Some(false) => Ok(None),
        None => Err(OracleError::Unknown { k, nodes: limits.max_nodes }),
    }
}

/// Smallest feasible `k` with a witness.
pub fn exact_min_k<C: Cost>(inst: &BcpInstance<C>, limits: &OracleLimits) -> Result<(u32, Coloring), OracleError> {
    for k in inst.trivial_lower_bound()..=limits.max_k {
        if let Some(c) = exact_feasible(inst, k, limits)? {
            return Ok((k, c));
        }
    }
    Err(OracleError::SpanLimit { limit: limits.max_k })
}

struct Search<'a, C> {
    inst: &'a BcpInstance<C>,
    k: u32,
    order: Vec<usize>,
    colors: Vec<u32>,
    nodes: u64,
    max_nodes: u64,
}

impl<C: Cost> Search<'_, C> {
    /// `None` when the node budget runs out.
    fn extend(&mut self, depth: usize) -> Option<bool> {
        if depth == self.order.len() {
            return Some(true);
        }
        let v = self.order[depth];
        let top = if depth == 0 { self.k.div_ceil(2) } else { self.k };
        for c in 1..=top {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return None;
            }
            if self.fits(v, c) {
                self.colors[v] = c;
                if self.extend(depth + 1)? {
                    return Some(true);
                }
                self.colors[v] = 0;
            }
        }
        Some(false)
    }

    fn fits(&self, v: usize, c: u32) -> bool {
        self.inst.neighbors(v).iter().all(|&(u, d)| {
            let cu = self.colors[u];
            cu == 0 || C::from(c.abs_diff(cu)).expect("color gap fits the cost type") >= d
        })
    }
}

/// Violation count computed straight from the edge list.
pub fn count_violations<C: Cost>(inst: &BcpInstance<C>, colors: &[u32]) -> usize {
    inst.edges()
        .iter()
        .filter(|e| C::from(colors[e.u].abs_diff(colors[e.v])).expect("color gap fits the cost type") < e.d)
        .count()
}
