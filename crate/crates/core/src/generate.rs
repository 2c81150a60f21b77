//! Seeded random instances: vertex-disjoint backbone routes plus noise arcs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{Instance, InstanceError};
use crate::oracle::{pareto_set, OracleError, OracleLimits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BudgetMode {
    /// Budgets set to a random nondominated point, so the instance is
    /// feasible with no slack on that point.
    #[default]
    OracleTight,
    /// Budgets set to `k` times the largest route cost and delay.
    Loose,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub routes: usize,
    pub extra_arcs: usize,
    pub max_cost: i64,
    pub max_delay: i64,
    pub k: usize,
    pub seed: u64,
    pub budget_mode: BudgetMode,
    /// Inner vertices per route, drawn uniformly from this range.
    pub inner_min: usize,
    pub inner_max: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            routes: 2,
            extra_arcs: 0,
            max_cost: 8,
            max_delay: 8,
            k: 2,
            seed: 0,
            budget_mode: BudgetMode::OracleTight,
            inner_min: 1,
            inner_max: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("{routes} routes cannot carry {k} disjoint paths")]
    TooFewRoutes { routes: usize, k: usize },
    #[error("weights must be at least 1")]
    NonpositiveWeight,
    #[error("every route needs at least one inner vertex")]
    BadInnerRange,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Builds an instance from `cfg`; the same config always gives the same
/// instance. Vertex 0 is `s` and vertex 1 is `t`.
pub fn generate_instance(cfg: &GenConfig) -> Result<Instance, GenerateError> {
    if cfg.routes < cfg.k || cfg.k == 0 {
        return Err(GenerateError::TooFewRoutes { routes: cfg.routes, k: cfg.k });
    }
    if cfg.max_cost < 1 || cfg.max_delay < 1 {
        return Err(GenerateError::NonpositiveWeight);
    }
    if cfg.inner_min < 1 || cfg.inner_max < cfg.inner_min {
        return Err(GenerateError::BadInnerRange);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (s, t) = (0usize, 1usize);
    let mut n = 2;
    let mut arcs: Vec<(usize, usize, i64, i64)> = Vec::new();
    let mut route_sums = Vec::new();
    for _ in 0..cfg.routes {
        let inner = rng.gen_range(cfg.inner_min..=cfg.inner_max);
        let mut at = s;
        let (mut c, mut d) = (0, 0);
        for step in 0..=inner {
            let next = if step == inner {
                t
            } else {
                n += 1;
                n - 1
            };
            let cost = rng.gen_range(1..=cfg.max_cost);
            let delay = rng.gen_range(1..=cfg.max_delay);
            arcs.push((at, next, cost, delay));
            c += cost;
            d += delay;
            at = next;
        }
        route_sums.push((c, d));
    }
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v && u != t && v != s)
        .collect();
    pairs.shuffle(&mut rng);
    for &(u, v) in pairs.iter().cycle().take(if pairs.is_empty() { 0 } else { cfg.extra_arcs }) {
        let cost = rng.gen_range(1..=cfg.max_cost);
        let delay = rng.gen_range(1..=cfg.max_delay);
        arcs.push((u, v, cost, delay));
    }

    let k = cfg.k as i64;
    let loose_c = k * route_sums.iter().map(|r| r.0).max().unwrap();
    let loose_d = k * route_sums.iter().map(|r| r.1).max().unwrap();
    let inst = Instance::new(n, &arcs, s, t, cfg.k, loose_c, loose_d)?;
    match cfg.budget_mode {
        BudgetMode::Loose => Ok(inst),
        BudgetMode::OracleTight => {
            let front = pareto_set(&inst, &OracleLimits::default())?;
            let point = &front[rng.gen_range(0..front.len())];
            Ok(inst.with_budgets(point.cost_sum, point.delay_sum)?)
        }
    }
}
