//! Bandwidth coloring and bandwidth multicoloring by path relinking.
//!
//! The core is generic over an exact integer cost type; [`Instance`] and
//! friends fix it to `i32`, the `Wide*` aliases to `i64`.

pub mod bench;
pub mod cost;
pub mod driver;
pub mod eval;
pub mod gen;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod population;
pub mod relink;
pub mod rng;
pub mod tabu;

pub use cost::{Cost, Ratio};
pub use driver::{minimize_k, solve_k, SolveOutcome, SolveParams, SolveStatus};
pub use eval::{evaluate_direct, hamming_distance, Coloring, EvalError, EvalState};
pub use instance::{BcpInstance, BmcpInstance, InstanceError, VertexMap};
pub use relink::RelinkStrategy;
pub use tabu::TsParams;

pub type Instance = BcpInstance<i32>;
pub type MultiInstance = BmcpInstance<i32>;
pub type Outcome = SolveOutcome<i32>;
pub type WideInstance = BcpInstance<i64>;
pub type WideMultiInstance = BmcpInstance<i64>;
