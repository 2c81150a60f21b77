//! The mixed-weight approximation and the cost-rounding preprocessing.

use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::flow::{min_weight_disjoint_paths, FlowError, WeightAssignment};
use crate::instance::{Arc, Instance};
use crate::report::RatioReport;
use crate::solution::{metrics, normalize, Solution};
use crate::{ratio, Rational};

/// `b(e) = beta * c(e)/C + d(e)/D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedWeightConfig {
    pub beta: Rational,
    pub cost_budget: i64,
    pub delay_budget: i64,
}

impl MixedWeightConfig {
    pub fn for_instance(inst: &Instance, beta: Rational) -> Self {
        MixedWeightConfig {
            beta,
            cost_budget: inst.cost_budget(),
            delay_budget: inst.delay_budget(),
        }
    }
}

pub fn mixed_weight(arc: &Arc, cfg: &MixedWeightConfig) -> Rational {
    &cfg.beta * ratio(arc.cost, cfg.cost_budget) + ratio(arc.delay, cfg.delay_budget)
}

pub fn mixed_weights(inst: &Instance, beta: &Rational) -> WeightAssignment {
    let cfg = MixedWeightConfig::for_instance(inst, beta.clone());
    WeightAssignment::from_fn(inst, |a| mixed_weight(a, &cfg))
}

/// `sum b(e)` over the solution, which equals `delay_ratio + beta * cost_ratio`.
pub fn mixed_weight_sum(inst: &Instance, sol: &Solution, beta: &Rational) -> Rational {
    mixed_weights(inst, beta).total(sol.arc_ids.iter().copied())
}

/// `k` disjoint paths of minimum mixed weight. On instances that admit a
/// solution within both budgets the result satisfies
/// `delay_ratio + beta * cost_ratio <= 1 + beta`.
pub fn run_basic(inst: &Instance, beta: &Rational) -> Result<(Solution, RatioReport), FlowError> {
    let flow = min_weight_disjoint_paths(inst, &mixed_weights(inst, beta))?;
    let sol = normalize(inst, flow.arc_ids).expect("flow solution is a clean k-flow");
    let report = RatioReport::new(inst, &sol, beta.clone(), Vec::new());
    Ok((sol, report))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScaleError {
    #[error("scaling epsilon must be positive")]
    NonpositiveEpsilon,
    #[error("scaled budget does not fit in 64 bits")]
    Overflow,
}

/// An instance with rounded costs plus what is needed to report in original units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledInstance {
    pub instance: Instance,
    pub original: Instance,
}

impl ScaledInstance {
    /// Re-expresses a solution of the scaled instance with original costs.
    pub fn descale(&self, sol: &Solution) -> Solution {
        let (cost_sum, delay_sum) = metrics(&self.original, sol.arc_ids.iter().copied());
        Solution { cost_sum, delay_sum, ..sol.clone() }
    }
}

/// Rounds costs down to multiples of `eps * C / n`:
/// `c'(e) = max(1, floor(c(e) * n / (eps * C)))` and `C' = ceil(n / eps) + n`.
pub fn scale_costs(inst: &Instance, eps: &Rational) -> Result<ScaledInstance, ScaleError> {
    if !eps.is_positive() {
        return Err(ScaleError::NonpositiveEpsilon);
    }
    let n = inst.n() as i64;
    let factor = ratio(n, 1) / (eps * ratio(inst.cost_budget(), 1));
    let costs: Vec<i64> = inst
        .arcs()
        .iter()
        .map(|a| {
            let scaled = (ratio(a.cost, 1) * &factor).floor().to_integer();
            scaled.to_i64().unwrap_or(i64::MAX).max(1)
        })
        .collect();
    let budget = (ratio(n, 1) / eps).ceil().to_integer() + n;
    let budget = budget.to_i64().ok_or(ScaleError::Overflow)?;
    let instance = inst.with_costs(&costs, budget).expect("scaled costs stay positive");
    Ok(ScaledInstance { instance, original: inst.clone() })
}

/// Largest `p / 10^digits` not above `x`.
pub fn round_down_decimal(x: &Rational, digits: u32) -> Rational {
    let scale = Rational::from_integer(num_bigint::BigInt::from(10).pow(digits));
    let scaled = (x * &scale).floor();
    scaled / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::ArcId;

    fn i4() -> Instance {
        // s=0, m1..m4 = 1..4, t=5
        Instance::new(
            6,
            &[
                (0, 1, 1, 3),
                (1, 5, 2, 4),
                (0, 2, 1, 3),
                (2, 5, 1, 4),
                (0, 3, 2, 2),
                (3, 5, 3, 3),
                (0, 4, 2, 2),
                (4, 5, 3, 3),
            ],
            0,
            5,
            2,
            10,
            10,
        )
        .unwrap()
    }

    #[test]
    fn mixed_weight_arithmetic() {
        let arc = Arc { id: ArcId(1), tail: 0, head: 1, cost: 2, delay: 3 };
        let cfg = |beta| MixedWeightConfig { beta, cost_budget: 4, delay_budget: 6 };
        assert_eq!(mixed_weight(&arc, &cfg(ratio(1, 1))), ratio(1, 1));
        assert_eq!(mixed_weight(&arc, &cfg(ratio(1, 2))), ratio(3, 4));
        let first_of_r1 = Arc { cost: 1, delay: 3, ..arc };
        let cfg10 = MixedWeightConfig { beta: ratio(1, 1), cost_budget: 10, delay_budget: 10 };
        assert_eq!(mixed_weight(&first_of_r1, &cfg10), ratio(2, 5));
    }

    #[test]
    fn diamond_basic() {
        let inst =
            Instance::new(4, &[(0, 1, 1, 1), (1, 3, 1, 1), (0, 2, 1, 1), (2, 3, 1, 1)], 0, 3, 2, 4, 4)
                .unwrap();
        let (sol, report) = run_basic(&inst, &ratio(1, 1)).unwrap();
        assert_eq!((sol.cost_sum, sol.delay_sum), (4, 4));
        assert_eq!(mixed_weight_sum(&inst, &sol, &ratio(1, 1)), ratio(2, 1));
        assert_eq!(report.cost_ratio, ratio(1, 1));
        assert_eq!(report.h, 0);
    }

    #[test]
    fn i4_basic_breaks_ties_toward_small_ids() {
        let inst = i4();
        let (sol, report) = run_basic(&inst, &ratio(1, 1)).unwrap();
        assert_eq!(sol.arc_ids, [1, 2, 3, 4].map(ArcId).into_iter().collect());
        assert_eq!((sol.cost_sum, sol.delay_sum), (5, 14));
        assert_eq!(mixed_weight_sum(&inst, &sol, &ratio(1, 1)), ratio(19, 10));
        assert_eq!(report.delay_ratio + report.cost_ratio, ratio(19, 10));
    }

    #[test]
    fn scaling_examples() {
        let inst = i4();
        let scaled = scale_costs(&inst, &ratio(1, 2)).unwrap();
        let c = |i: usize| scaled.instance.arcs()[i].cost;
        assert_eq!(c(0), 1); // floor(6/5)
        assert_eq!(c(5), 3); // floor(18/5)
        assert_eq!(c(4), 2); // floor(12/5)
        assert_eq!(scaled.instance.cost_budget(), 18);

        // unit scale: n / (eps C) = 1
        let unit = scale_costs(&inst, &ratio(6, 10)).unwrap();
        assert_eq!(
            unit.instance.arcs().iter().map(|a| a.cost).collect::<Vec<_>>(),
            inst.arcs().iter().map(|a| a.cost).collect::<Vec<_>>()
        );
        assert_eq!(unit.instance.cost_budget(), 10 + 6);

        // every cost below eps*C/n clamps to 1
        let coarse = scale_costs(&inst, &ratio(10, 1)).unwrap();
        assert!(coarse.instance.arcs().iter().all(|a| a.cost == 1));

        assert_eq!(scale_costs(&inst, &ratio(0, 1)), Err(ScaleError::NonpositiveEpsilon));
    }

    #[test]
    fn descale_restores_costs() {
        let inst = i4();
        let scaled = scale_costs(&inst, &ratio(1, 2)).unwrap();
        let (sol, _) = run_basic(&scaled.instance, &ratio(1, 1)).unwrap();
        let back = scaled.descale(&sol);
        back.validate(&inst).unwrap();
    }

    #[test]
    fn decimal_round_down() {
        assert_eq!(round_down_decimal(&ratio(1, 3), 3), ratio(333, 1000));
        assert_eq!(round_down_decimal(&ratio(2, 1), 9), ratio(2, 1));
    }
}
