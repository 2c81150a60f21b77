//! Cycle cancellation towards a target factor on one side.
//!
//! Starting from a solution of the mixed-weight approximation, repeatedly
//! cancel the residual cycle of minimum delay/cost ratio (cost at most `C`,
//! negative delay) until `delay_sum <= (1 + beta) * D`. The cost side grows by
//! at most a logarithmic factor. Running the same loop on the instance with
//! cost and delay exchanged improves cost instead.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use thiserror::Error;

use crate::bounds::{other_side_factor, within};
use crate::instance::Instance;
use crate::ratio_cycle::{best_improving_cycle, SearchOptions};
use crate::report::CycleLogEntry;
use crate::residual::{apply_cycle, build_residual, CostMode, GCycle};
use crate::solution::Solution;
use crate::{parse_rational, ratio, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Direction {
    #[default]
    Delay,
    Cost,
    /// Improve whichever side exceeds `1 + beta`; the larger ratio if both do.
    Auto,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Delay => "delay",
            Direction::Cost => "cost",
            Direction::Auto => "auto",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown direction {0:?} (expected auto, delay or cost)")]
pub struct UnknownDirection(pub String);

impl FromStr for Direction {
    type Err = UnknownDirection;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "delay" => Ok(Direction::Delay),
            "cost" => Ok(Direction::Cost),
            "auto" => Ok(Direction::Auto),
            _ => Err(UnknownDirection(s.to_string())),
        }
    }
}

/// The side a run actually improved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Delay,
    Cost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    TargetMet,
    NoImprovingCycle,
    Cap,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::TargetMet => "target-met",
            Termination::NoImprovingCycle => "no-improving-cycle",
            Termination::Cap => "cap",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImproveConfig {
    pub beta: Rational,
    pub direction: Direction,
    /// Iteration cap; `None` uses the initial sum of the improved side.
    pub max_iters: Option<usize>,
    pub cost_mode: CostMode,
    pub search: SearchOptions,
}

impl ImproveConfig {
    pub fn new(beta: Rational, direction: Direction) -> Self {
        ImproveConfig {
            beta,
            direction,
            max_iters: None,
            cost_mode: CostMode::Zero,
            search: SearchOptions::default(),
        }
    }
}

/// One cancelled cycle. `cycle` lives in the frame of the improved side: in
/// a cost-side run its `delay` field is a cost change and vice versa. The
/// before/after sums are always in the original frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    pub cycle: GCycle,
    pub cost_before: i64,
    pub cost_after: i64,
    pub delay_before: i64,
    pub delay_after: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    pub improved: Option<Side>,
}

impl Trace {
    pub fn h(&self) -> usize {
        self.records.len()
    }

    pub fn cycle_log(&self) -> Vec<CycleLogEntry> {
        self.records
            .iter()
            .enumerate()
            .map(|(i, r)| CycleLogEntry::new(i + 1, &r.cycle))
            .collect()
    }
}

/// Exchanges the roles of cost and delay.
pub fn swap_roles(inst: &Instance) -> Instance {
    inst.swapped()
}

fn swap_solution(sol: &Solution) -> Solution {
    Solution { cost_sum: sol.delay_sum, delay_sum: sol.cost_sum, ..sol.clone() }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BetaError {
    #[error("unknown beta preset {0:?} (expected cost2, balanced, strict or p/q)")]
    Unknown(String),
    #[error("beta must be nonnegative")]
    Negative,
}

/// `cost2`: 1/e, `balanced`: the omega constant (root of `b = ln(1/b)`),
/// `strict`: 0. Irrational values are rounded down to nine decimals.
pub fn preset_beta(name: &str) -> Result<Rational, BetaError> {
    match name {
        "cost2" => Ok(ratio(367_879_441, 1_000_000_000)),
        "balanced" => Ok(ratio(567_143_290, 1_000_000_000)),
        "strict" => Ok(ratio(0, 1)),
        _ => Err(BetaError::Unknown(name.to_string())),
    }
}

/// A preset name or an exact rational `p/q`.
pub fn parse_beta(text: &str) -> Result<Rational, BetaError> {
    if let Ok(beta) = preset_beta(text) {
        return Ok(beta);
    }
    let beta = parse_rational(text).ok_or_else(|| BetaError::Unknown(text.to_string()))?;
    if beta.is_negative() {
        return Err(BetaError::Negative);
    }
    Ok(beta)
}

fn target(beta: &Rational) -> Rational {
    ratio(1, 1) + beta
}

fn side_to_improve(inst: &Instance, sol: &Solution, cfg: &ImproveConfig) -> Option<Side> {
    let t = target(&cfg.beta);
    let delay_over = !within(sol.delay_sum, &t, inst.delay_budget());
    let cost_over = !within(sol.cost_sum, &t, inst.cost_budget());
    match cfg.direction {
        Direction::Delay => Some(Side::Delay),
        Direction::Cost => Some(Side::Cost),
        Direction::Auto => match (delay_over, cost_over) {
            (true, true) => {
                let d = ratio(sol.delay_sum, inst.delay_budget());
                let c = ratio(sol.cost_sum, inst.cost_budget());
                Some(if c > d { Side::Cost } else { Side::Delay })
            }
            (true, false) => Some(Side::Delay),
            (false, true) => Some(Side::Cost),
            (false, false) => None,
        },
    }
}

/// Cancels cycles on the delay side of `inst`.
fn delay_loop(
    inst: &Instance,
    mut sol: Solution,
    cfg: &ImproveConfig,
) -> (Solution, Vec<(GCycle, Solution, Solution)>, Termination) {
    let t = target(&cfg.beta);
    let cap = cfg.max_iters.unwrap_or(sol.delay_sum.max(0) as usize);
    let mut steps = Vec::new();
    loop {
        if within(sol.delay_sum, &t, inst.delay_budget()) {
            return (sol, steps, Termination::TargetMet);
        }
        if steps.len() >= cap {
            return (sol, steps, Termination::Cap);
        }
        let rg = build_residual(inst, &sol, cfg.cost_mode).expect("solution stays valid");
        let Some(cycle) = best_improving_cycle(&rg, inst.cost_budget(), &cfg.search) else {
            return (sol, steps, Termination::NoImprovingCycle);
        };
        let next = apply_cycle(inst, &sol, &cycle).expect("residual cycles apply cleanly");
        debug_assert!(next.delay_sum < sol.delay_sum);
        steps.push((cycle, sol, next.clone()));
        sol = next;
    }
}

/// Runs the cancellation loop on the configured side. `sol` must be valid
/// for `inst`.
pub fn improve(inst: &Instance, sol: &Solution, cfg: &ImproveConfig) -> (Solution, Trace) {
    let Some(side) = side_to_improve(inst, sol, cfg) else {
        let trace = Trace { records: Vec::new(), termination: Termination::TargetMet, improved: None };
        return (sol.clone(), trace);
    };
    let (result, steps, termination) = match side {
        Side::Delay => delay_loop(inst, sol.clone(), cfg),
        Side::Cost => {
            let swapped = swap_roles(inst);
            let (s, steps, term) = delay_loop(&swapped, swap_solution(sol), cfg);
            let steps = steps
                .into_iter()
                .map(|(c, before, after)| (c, swap_solution(&before), swap_solution(&after)))
                .collect();
            (swap_solution(&s), steps, term)
        }
    };
    let records = steps
        .into_iter()
        .map(|(cycle, before, after)| IterationRecord {
            cycle,
            cost_before: before.cost_sum,
            cost_after: after.cost_sum,
            delay_before: before.delay_sum,
            delay_after: after.delay_sum,
        })
        .collect();
    (result, Trace { records, termination, improved: Some(side) })
}

/// Guaranteed `(delay_factor, cost_factor)` for a run on an instance that
/// admits a solution within both budgets, starting from the mixed-weight
/// solution with `beta = 1`.
pub fn advertised_bound(
    inst: &Instance,
    beta: &Rational,
    direction: Direction,
    improved: Option<Side>,
) -> (Rational, Rational) {
    let t = target(beta);
    let floor = match direction {
        Direction::Auto => t.clone(),
        _ => ratio(2, 1),
    };
    let side = match (direction, improved) {
        (Direction::Delay, _) => Side::Delay,
        (Direction::Cost, _) => Side::Cost,
        (Direction::Auto, Some(side)) => side,
        (Direction::Auto, None) => return (t.clone(), t),
    };
    match side {
        Side::Delay => (t, other_side_factor(beta, &floor, inst.delay_budget())),
        Side::Cost => (other_side_factor(beta, &floor, inst.cost_budget()), t),
    }
}
