#![allow(dead_code)]

use bandcolor::eval::{evaluate_direct, Coloring};
use bandcolor::gen::random_bcp;
use bandcolor::rng::rng_from_seed;
use bandcolor::Instance;

pub fn instance(n: usize, density: f64, max_d: i32, seed: u64) -> Instance {
    random_bcp(n, density, max_d, &mut rng_from_seed(seed))
}

pub fn coloring(n: usize, k: u32, seed: u64) -> Coloring {
    Coloring::random(n, k, &mut rng_from_seed(seed ^ 0xA5A5))
}

/// Objective of `s` with vertex `v` recolored to `c`, computed from scratch.
pub fn f_after(inst: &Instance, s: &Coloring, v: usize, c: u32) -> i32 {
    let mut colors = s.colors().to_vec();
    colors[v] = c;
    evaluate_direct(inst, &Coloring::new(colors, s.k()).unwrap()).unwrap()
}
