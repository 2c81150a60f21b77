use serde::{Deserialize, Serialize};

use crate::instance::Instance;
use crate::residual::GCycle;
use crate::solution::Solution;
use crate::{format_rational, ratio, Rational};

/// One cancelled cycle, as written to the JSON cycle log.
///
/// `cycle_arcs` holds signed arc ids in canonical order; a negative id is a
/// solution arc traversed backwards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleLogEntry {
    pub iter: usize,
    pub cycle_arcs: Vec<i64>,
    pub delay: i64,
    pub cost: i64,
    pub ratio: String,
}

impl CycleLogEntry {
    pub fn new(iter: usize, cycle: &GCycle) -> Self {
        CycleLogEntry {
            iter,
            cycle_arcs: cycle.signed_ids(),
            delay: cycle.delay,
            cost: cycle.cost,
            ratio: format_rational(&cycle.ratio),
        }
    }
}

/// Measured bifactor of a solution. Ratios are exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioReport {
    pub cost_ratio: Rational,
    pub delay_ratio: Rational,
    pub beta: Rational,
    pub h: usize,
    pub cycle_log: Vec<CycleLogEntry>,
}

impl RatioReport {
    pub fn new(inst: &Instance, sol: &Solution, beta: Rational, cycle_log: Vec<CycleLogEntry>) -> Self {
        let (cost, delay) = sol.metrics(inst);
        RatioReport {
            cost_ratio: ratio(cost, inst.cost_budget()),
            delay_ratio: ratio(delay, inst.delay_budget()),
            beta,
            h: cycle_log.len(),
            cycle_log,
        }
    }
}
