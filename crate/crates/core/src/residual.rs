//! The residual graph of a solution and cycle cancellation on it.
//!
//! Solution arcs appear reversed with cost 0 and negated delay; every other
//! arc keeps its orientation and weights. A cycle of the residual graph with
//! negative delay swaps solution arcs for cheaper-in-delay alternatives while
//! keeping `k` disjoint paths.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::instance::{ArcId, Instance};
use crate::solution::{normalize, Solution, SolutionError};
use crate::Rational;
use num_bigint::BigInt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CostMode {
    /// Reversed arcs cost exactly 0.
    #[default]
    Zero,
    /// Reversed arcs cost `1 / (m n D + 1)` in ratio computations; layering
    /// still treats them as free.
    Epsilon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Forward,
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidualArc {
    pub origin: ArcId,
    pub orientation: Orientation,
    pub tail: usize,
    pub head: usize,
    /// Integer cost used for layering: 0 on reversed arcs.
    pub cost: i64,
    pub delay: i64,
}

impl ResidualArc {
    pub fn is_reversed(&self) -> bool {
        self.orientation == Orientation::Reversed
    }

    /// Origin id, negated for reversed arcs.
    pub fn signed_id(&self) -> i64 {
        match self.orientation {
            Orientation::Forward => self.origin.0 as i64,
            Orientation::Reversed => -(self.origin.0 as i64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidualError {
    #[error("solution is invalid: {0}")]
    InvalidSolution(#[from] SolutionError),
    #[error("reversed arcs contain a directed cycle")]
    ReversedCycle,
    #[error("arc {0} does not match the solution's residual graph")]
    Inconsistent(ArcId),
    #[error("arc sequence is not a simple directed cycle")]
    NotACycle,
}

/// Residual graph; arc `i` is the image of input arc `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualGraph {
    n: usize,
    arcs: Vec<ResidualArc>,
    mode: CostMode,
    /// Denominator `E` of the cost unit: 1, or `m n D + 1` in epsilon mode.
    unit_den: i64,
    out: Vec<Vec<usize>>,
}

pub fn build_residual(
    inst: &Instance,
    sol: &Solution,
    mode: CostMode,
) -> Result<ResidualGraph, ResidualError> {
    sol.validate(inst)?;
    let arcs = inst
        .arcs()
        .iter()
        .map(|a| {
            if sol.arc_ids.contains(&a.id) {
                ResidualArc {
                    origin: a.id,
                    orientation: Orientation::Reversed,
                    tail: a.head,
                    head: a.tail,
                    cost: 0,
                    delay: -a.delay,
                }
            } else {
                ResidualArc {
                    origin: a.id,
                    orientation: Orientation::Forward,
                    tail: a.tail,
                    head: a.head,
                    cost: a.cost,
                    delay: a.delay,
                }
            }
        })
        .collect();
    let unit_den = match mode {
        CostMode::Zero => 1,
        CostMode::Epsilon => {
            (inst.m() as i64) * (inst.n() as i64) * inst.delay_budget() + 1
        }
    };
    ResidualGraph::from_arcs(inst.n(), arcs, mode, unit_den)
}

impl ResidualGraph {
    /// Builds a residual graph directly. Arc `i` must carry origin id `i + 1`.
    pub fn from_arcs(
        n: usize,
        arcs: Vec<ResidualArc>,
        mode: CostMode,
        unit_den: i64,
    ) -> Result<Self, ResidualError> {
        let mut out = vec![Vec::new(); n];
        for (i, a) in arcs.iter().enumerate() {
            assert_eq!(a.origin, ArcId::from_index(i), "residual arcs must follow origin order");
            assert!(a.tail < n && a.head < n);
            out[a.tail].push(i);
        }
        let rg = ResidualGraph { n, arcs, mode, unit_den: unit_den.max(1), out };
        if rg.reversed_topological_order().is_none() {
            return Err(ResidualError::ReversedCycle);
        }
        Ok(rg)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[ResidualArc] {
        &self.arcs
    }

    pub fn arc(&self, i: usize) -> &ResidualArc {
        &self.arcs[i]
    }

    pub fn mode(&self) -> CostMode {
        self.mode
    }

    /// Outgoing residual arc indices of `v`, in id order.
    pub fn out(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    /// The `epsilon` charged per reversed arc, when in epsilon mode.
    pub fn epsilon(&self) -> Option<Rational> {
        match self.mode {
            CostMode::Zero => None,
            CostMode::Epsilon => Some(crate::ratio(1, self.unit_den)),
        }
    }

    /// Denominator of [`Self::cost_units`].
    pub fn unit_den(&self) -> i64 {
        self.unit_den
    }

    /// Ratio-cost of an arc in units of `1 / unit_den`.
    pub fn cost_units(&self, i: usize) -> i128 {
        let a = &self.arcs[i];
        match self.mode {
            CostMode::Zero => a.cost as i128,
            CostMode::Epsilon => {
                a.cost as i128 * self.unit_den as i128 + i128::from(a.is_reversed())
            }
        }
    }

    /// Indices of reversed arcs.
    pub fn reversed(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.arcs.len()).filter(|&i| self.arcs[i].is_reversed())
    }

    /// Vertices incident to a reversed arc, ascending.
    pub fn reversed_endpoints(&self) -> Vec<usize> {
        let set: BTreeSet<usize> =
            self.reversed().flat_map(|i| [self.arcs[i].tail, self.arcs[i].head]).collect();
        set.into_iter().collect()
    }

    /// Topological order of all vertices with respect to the reversed arcs,
    /// or `None` when they contain a cycle.
    pub fn reversed_topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.n];
        for i in self.reversed() {
            indeg[self.arcs[i].head] += 1;
        }
        let mut ready: Vec<usize> = (0..self.n).rev().filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &i in self.out[v].iter().rev() {
                let a = &self.arcs[i];
                if a.is_reversed() {
                    indeg[a.head] -= 1;
                    if indeg[a.head] == 0 {
                        ready.push(a.head);
                    }
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }
}

/// A simple directed cycle of a residual graph.
///
/// Arcs are stored in canonical rotation: the traversal starts at the arc
/// with the smallest signed id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GCycle {
    pub arcs: Vec<ResidualArc>,
    pub cost: i64,
    pub delay: i64,
    /// `delay / cost`, with epsilon-charged reversed arcs in epsilon mode.
    pub ratio: Rational,
}

impl GCycle {
    /// Validates that `indices` form a simple cycle of `rg` in traversal order.
    pub fn new(rg: &ResidualGraph, indices: &[usize]) -> Result<Self, ResidualError> {
        if indices.is_empty() {
            return Err(ResidualError::NotACycle);
        }
        let mut seen = vec![false; rg.n()];
        for (j, &i) in indices.iter().enumerate() {
            let a = rg.arc(i);
            let next = rg.arc(indices[(j + 1) % indices.len()]);
            if a.head != next.tail || seen[a.tail] {
                return Err(ResidualError::NotACycle);
            }
            seen[a.tail] = true;
        }
        let start = (0..indices.len())
            .min_by_key(|&j| rg.arc(indices[j]).signed_id())
            .unwrap();
        let arcs: Vec<ResidualArc> = indices[start..]
            .iter()
            .chain(&indices[..start])
            .map(|&i| *rg.arc(i))
            .collect();
        let cost = arcs.iter().map(|a| a.cost).sum();
        let delay = arcs.iter().map(|a| a.delay).sum();
        let units: i128 = indices.iter().map(|&i| rg.cost_units(i)).sum();
        if units == 0 {
            return Err(ResidualError::NotACycle);
        }
        let ratio = Rational::new(
            BigInt::from(delay) * BigInt::from(rg.unit_den()),
            BigInt::from(units),
        );
        Ok(GCycle { arcs, cost, delay, ratio })
    }

    pub fn signed_ids(&self) -> Vec<i64> {
        self.arcs.iter().map(ResidualArc::signed_id).collect()
    }

    /// Tie-break key: origin ids in ascending order. Distinct simple cycles
    /// of one residual graph have distinct keys.
    pub fn key(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.arcs.iter().map(|a| a.origin.0).collect();
        ids.sort_unstable();
        ids
    }

    /// Residual arc indices in canonical order.
    pub fn indices(&self) -> Vec<usize> {
        self.arcs.iter().map(|a| a.origin.index()).collect()
    }

    pub fn reversed_count(&self) -> usize {
        self.arcs.iter().filter(|a| a.is_reversed()).count()
    }
}

impl fmt::Display for GCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.signed_ids().iter().map(i64::to_string).collect();
        write!(f, "[{}] cost {} delay {} ratio {}", ids.join(" "), self.cost, self.delay, self.ratio)
    }
}

/// Symmetric difference of the solution with the cycle, normalized back to
/// `k` clean paths.
pub fn apply_cycle(inst: &Instance, sol: &Solution, cyc: &GCycle) -> Result<Solution, ResidualError> {
    let mut arcs = sol.arc_ids.clone();
    for a in &cyc.arcs {
        if a.origin.0 == 0 || a.origin.index() >= inst.m() {
            return Err(ResidualError::Inconsistent(a.origin));
        }
        let orig = inst.arc(a.origin);
        let consistent = match a.orientation {
            Orientation::Reversed => {
                (orig.head, orig.tail) == (a.tail, a.head) && arcs.remove(&a.origin)
            }
            Orientation::Forward => {
                (orig.tail, orig.head) == (a.tail, a.head) && arcs.insert(a.origin)
            }
        };
        if !consistent {
            return Err(ResidualError::Inconsistent(a.origin));
        }
    }
    Ok(normalize(inst, arcs)?)
}
