use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// 1-based arc identifier, assigned in input order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArcId(pub u32);

impl ArcId {
    pub fn from_index(index: usize) -> Self {
        ArcId(index as u32 + 1)
    }

    /// Position in [`Instance::arcs`].
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// A directed arc. Vertices are 0-based in memory and 1-based in files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub id: ArcId,
    pub tail: usize,
    pub head: usize,
    pub cost: i64,
    pub delay: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instance needs at least two vertices")]
    TooFewVertices,
    #[error("source and sink coincide")]
    SameTerminals,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("nonpositive cost budget")]
    NonpositiveCostBudget,
    #[error("nonpositive delay budget")]
    NonpositiveDelayBudget,
    #[error("terminal vertex {0} out of range")]
    TerminalOutOfRange(usize),
    #[error("arc {id}: dangling vertex id")]
    DanglingVertex { id: ArcId },
    #[error("arc {id}: self-loop")]
    SelfLoop { id: ArcId },
    #[error("arc {id}: nonpositive cost")]
    NonpositiveCost { id: ArcId },
    #[error("arc {id}: nonpositive delay")]
    NonpositiveDelay { id: ArcId },
    #[error("arc at position {position} carries id {id}")]
    IdMismatch { position: usize, id: ArcId },
}

/// A validated problem instance. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    n: usize,
    arcs: Vec<Arc>,
    s: usize,
    t: usize,
    k: usize,
    cost_budget: i64,
    delay_budget: i64,
}

impl Instance {
    /// Builds an instance from `(tail, head, cost, delay)` tuples; ids follow
    /// the slice order.
    pub fn new(
        n: usize,
        arcs: &[(usize, usize, i64, i64)],
        s: usize,
        t: usize,
        k: usize,
        cost_budget: i64,
        delay_budget: i64,
    ) -> Result<Self, InstanceError> {
        let arcs = arcs
            .iter()
            .enumerate()
            .map(|(i, &(tail, head, cost, delay))| Arc {
                id: ArcId::from_index(i),
                tail,
                head,
                cost,
                delay,
            })
            .collect();
        Self::from_arcs(n, arcs, s, t, k, cost_budget, delay_budget)
    }

    pub fn from_arcs(
        n: usize,
        arcs: Vec<Arc>,
        s: usize,
        t: usize,
        k: usize,
        cost_budget: i64,
        delay_budget: i64,
    ) -> Result<Self, InstanceError> {
        if n < 2 {
            return Err(InstanceError::TooFewVertices);
        }
        for v in [s, t] {
            if v >= n {
                return Err(InstanceError::TerminalOutOfRange(v));
            }
        }
        if s == t {
            return Err(InstanceError::SameTerminals);
        }
        if k == 0 {
            return Err(InstanceError::ZeroK);
        }
        if cost_budget < 1 {
            return Err(InstanceError::NonpositiveCostBudget);
        }
        if delay_budget < 1 {
            return Err(InstanceError::NonpositiveDelayBudget);
        }
        for (position, arc) in arcs.iter().enumerate() {
            if arc.id != ArcId::from_index(position) {
                return Err(InstanceError::IdMismatch { position, id: arc.id });
            }
            if arc.tail >= n || arc.head >= n {
                return Err(InstanceError::DanglingVertex { id: arc.id });
            }
            if arc.tail == arc.head {
                return Err(InstanceError::SelfLoop { id: arc.id });
            }
            if arc.cost < 1 {
                return Err(InstanceError::NonpositiveCost { id: arc.id });
            }
            if arc.delay < 1 {
                return Err(InstanceError::NonpositiveDelay { id: arc.id });
            }
        }
        Ok(Instance { n, arcs, s, t, k, cost_budget, delay_budget })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id.index()]
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The cost budget `C`.
    pub fn cost_budget(&self) -> i64 {
        self.cost_budget
    }

    /// The delay budget `D`.
    pub fn delay_budget(&self) -> i64 {
        self.delay_budget
    }

    pub fn with_k(&self, k: usize) -> Result<Self, InstanceError> {
        if k == 0 {
            return Err(InstanceError::ZeroK);
        }
        Ok(Instance { k, ..self.clone() })
    }

    pub fn with_budgets(&self, cost_budget: i64, delay_budget: i64) -> Result<Self, InstanceError> {
        Self::from_arcs(self.n, self.arcs.clone(), self.s, self.t, self.k, cost_budget, delay_budget)
    }

    /// Same topology with new per-arc costs (indexed by arc position).
    pub fn with_costs(&self, costs: &[i64], cost_budget: i64) -> Result<Self, InstanceError> {
        assert_eq!(costs.len(), self.arcs.len());
        let arcs = self
            .arcs
            .iter()
            .zip(costs)
            .map(|(a, &cost)| Arc { cost, ..*a })
            .collect();
        Self::from_arcs(self.n, arcs, self.s, self.t, self.k, cost_budget, self.delay_budget)
    }

    /// Exchanges cost and delay on every arc and swaps the two budgets.
    pub fn swapped(&self) -> Self {
        let arcs = self
            .arcs
            .iter()
            .map(|a| Arc { cost: a.delay, delay: a.cost, ..*a })
            .collect();
        Instance {
            arcs,
            cost_budget: self.delay_budget,
            delay_budget: self.cost_budget,
            ..self.clone()
        }
    }

    /// Out-arc lists per vertex, each in increasing id order.
    pub fn out_arcs(&self) -> Vec<Vec<ArcId>> {
        let mut out = vec![Vec::new(); self.n];
        for a in &self.arcs {
            out[a.tail].push(a.id);
        }
        out
    }

    /// Maximum number of arc-disjoint `s -> t` paths (unit-capacity max flow).
    pub fn max_disjoint_paths(&self) -> usize {
        max_unit_flow(self.n, self.arcs.iter().map(|a| (a.tail, a.head)), self.s, self.t)
    }
}

/// Unit-capacity max flow by repeated BFS augmentation.
pub(crate) fn max_unit_flow(
    n: usize,
    arcs: impl Iterator<Item = (usize, usize)>,
    s: usize,
    t: usize,
) -> usize {
    let ends: Vec<(usize, usize)> = arcs.collect();
    let mut adj = vec![Vec::new(); n];
    for (i, &(u, v)) in ends.iter().enumerate() {
        adj[u].push(i);
        adj[v].push(i);
    }
    let mut used = vec![false; ends.len()];
    let mut flow = 0;
    loop {
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &i in &adj[u] {
                let (a, b) = ends[i];
                let next = if a == u && !used[i] {
                    b
                } else if b == u && used[i] {
                    a
                } else {
                    continue;
                };
                if !seen[next] {
                    seen[next] = true;
                    pred[next] = Some(i);
                    queue.push_back(next);
                }
            }
        }
        if !seen[t] {
            return flow;
        }
        let mut v = t;
        while v != s {
            let i = pred[v].expect("augmenting path");
            used[i] = !used[i];
            v = if ends[i].1 == v && used[i] { ends[i].0 } else { ends[i].1 };
        }
        flow += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Instance {
        Instance::new(4, &[(0, 1, 1, 1), (1, 3, 1, 1), (0, 2, 1, 1), (2, 3, 1, 1)], 0, 3, 2, 4, 4)
            .unwrap()
    }

    #[test]
    fn rejects_invalid() {
        let ok = [(0, 1, 1, 1)];
        assert_eq!(Instance::new(2, &ok, 0, 0, 1, 1, 1), Err(InstanceError::SameTerminals));
        assert_eq!(Instance::new(2, &ok, 0, 1, 0, 1, 1), Err(InstanceError::ZeroK));
        assert_eq!(
            Instance::new(2, &[(0, 0, 1, 1)], 0, 1, 1, 1, 1),
            Err(InstanceError::SelfLoop { id: ArcId(1) })
        );
        assert_eq!(
            Instance::new(2, &[(0, 1, 0, 1)], 0, 1, 1, 1, 1),
            Err(InstanceError::NonpositiveCost { id: ArcId(1) })
        );
        assert_eq!(
            Instance::new(2, &[(0, 1, 1, -2)], 0, 1, 1, 1, 1),
            Err(InstanceError::NonpositiveDelay { id: ArcId(1) })
        );
        assert_eq!(
            Instance::new(2, &[(0, 5, 1, 1)], 0, 1, 1, 1, 1),
            Err(InstanceError::DanglingVertex { id: ArcId(1) })
        );
    }

    #[test]
    fn max_flow_of_diamond() {
        assert_eq!(diamond().max_disjoint_paths(), 2);
    }

    #[test]
    fn swap_is_involution() {
        let d = diamond().with_budgets(3, 9).unwrap();
        let s = d.swapped();
        assert_eq!(s.cost_budget(), 9);
        assert_eq!(s.swapped(), d);
    }
}
