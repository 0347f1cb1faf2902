//! Random instances for testing.

use rand::Rng;

use crate::instance::{BcpInstance, BmcpInstance};

/// Each pair becomes an edge with probability `density`, separation uniform
/// in `1..=max_d`.
pub fn random_bcp<R: Rng + ?Sized>(n: usize, density: f64, max_d: i32, rng: &mut R) -> BcpInstance<i32> {
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.gen_bool(density) {
                edges.push((u, v, rng.gen_range(1..=max_d)));
            }
        }
    }
    BcpInstance::new(n, edges).expect("generated edges are valid")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricParams {
    pub n: usize,
    /// Points are drawn on a `side x side` integer grid.
    pub side: u32,
    /// Points closer than this are joined.
    pub radius: f64,
    /// Separation of the closest pairs; it falls linearly to 1 at `radius`.
    pub max_separation: i32,
}

impl GeometricParams {
    pub fn new(n: usize) -> Self {
        Self { n, side: 10_000, radius: 10_000.0 * (6.0 / n.max(1) as f64).sqrt(), max_separation: 9 }
    }
}

/// Random geometric graph: uniform points, close pairs joined, closer pairs
/// separated more.
pub fn geometric_bcp<R: Rng + ?Sized>(p: &GeometricParams, rng: &mut R) -> BcpInstance<i32> {
    let pts: Vec<(f64, f64)> =
        (0..p.n).map(|_| (rng.gen_range(0..p.side) as f64, rng.gen_range(0..p.side) as f64)).collect();
    let mut edges = Vec::new();
    for i in 0..p.n {
        for j in i + 1..p.n {
            let dist = (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
            if dist < p.radius {
                let closeness = 1.0 - dist / p.radius;
                let d = 1 + (closeness * (p.max_separation - 1) as f64).floor() as i32;
                edges.push((i + 1, j + 1, d));
            }
        }
    }
    BcpInstance::new(p.n, edges).expect("generated edges are valid")
}

/// Multicoloring variant: demands uniform in `1..=max_demand`, self
/// separations uniform in `1..=max_self`.
pub fn random_bmcp<R: Rng + ?Sized>(
    graph: &BcpInstance<i32>,
    max_demand: u32,
    max_self: i32,
    rng: &mut R,
) -> BmcpInstance<i32> {
    let n = graph.n();
    let demand = (0..n).map(|_| rng.gen_range(1..=max_demand)).collect();
    let self_sep = (0..n).map(|_| rng.gen_range(1..=max_self)).collect();
    let edges = graph.edges().iter().map(|e| (e.u + 1, e.v + 1, e.d));
    BmcpInstance::new(demand, self_sep, edges).expect("generated instance is valid")
}
