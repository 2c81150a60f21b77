//! Approximation algorithms for the k-disjoint bi-constraint path problem.
//!
//! Given a digraph whose arcs carry a positive integer cost and a positive
//! integer delay, two terminals `s` and `t`, a path count `k` and budgets
//! `C` (cost) and `D` (delay), the goal is `k` arc-disjoint `s -> t` paths
//! whose summed cost is at most `C` and summed delay is at most `D`.
//!
//! The pipeline is:
//!
//! 1. [`basic::run_basic`] scalarizes both criteria into a mixed weight
//!    `beta * c/C + d/D` and computes `k` disjoint paths of minimum mixed
//!    weight ([`flow::min_weight_disjoint_paths`]). For feasible instances
//!    this is a (2, 2) bifactor approximation.
//! 2. [`improve::improve`] cancels cycles in the residual graph
//!    ([`residual`]) until the delay sum drops to `(1 + beta) * D`. Each
//!    cycle has cost at most `C` and minimum delay/cost ratio, found on
//!    cost-layered auxiliary graphs ([`layered`], [`ratio_cycle`]).
//!
//! [`oracle`] is an exhaustive reference solver for small instances.

pub mod basic;
pub mod bounds;
pub mod flow;
pub mod format;
pub mod generate;
pub mod improve;
pub mod instance;
pub mod layered;
pub mod oracle;
pub mod ratio_cycle;
pub mod report;
pub mod residual;
pub mod solution;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational used for every derived quantity (mixed weights, ratios, beta).
pub type Rational = BigRational;

pub use basic::{mixed_weight, run_basic, scale_costs, MixedWeightConfig, ScaledInstance};
pub use flow::{min_weight_disjoint_paths, FlowError, FlowSolution, WeightAssignment};
pub use format::{parse_instance, write_instance, ParseError};
pub use generate::{generate_instance, BudgetMode, GenConfig, GenerateError};
pub use improve::{
    advertised_bound, improve, parse_beta, preset_beta, swap_roles, Direction, ImproveConfig,
    IterationRecord, Side, Termination, Trace,
};
pub use instance::{Arc, ArcId, Instance, InstanceError};
pub use ratio_cycle::{best_improving_cycle, min_ratio_cycle_layered, SearchOptions};
pub use report::{CycleLogEntry, RatioReport};
pub use residual::{apply_cycle, build_residual, CostMode, GCycle, ResidualGraph};
pub use solution::{normalize, Solution, SolutionError};

/// Builds the exact rational `num / den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational as `p/q`, always including the denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a plain integer into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => Some(Rational::from_integer(text.parse().ok()?)),
    }
}
