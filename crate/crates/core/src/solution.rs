use std::collections::BTreeSet;

use thiserror::Error;

use crate::instance::{ArcId, Instance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error("unknown arc id {0}")]
    UnknownArc(u32),
    #[error("arc set is not an s-t flow of value {expected}")]
    FlowValue { expected: usize },
    #[error("expected {expected} paths, found {found}")]
    PathCount { expected: usize, found: usize },
    #[error("path {0} is not a contiguous s-t path")]
    NotAPath(usize),
    #[error("path {0} repeats a vertex")]
    NotSimple(usize),
    #[error("arc {0} is used by two paths")]
    NotDisjoint(ArcId),
    #[error("path arcs differ from the arc set")]
    UnionMismatch,
    #[error("arc set contains opposing arcs {0} and {1}")]
    OpposingPair(ArcId, ArcId),
    #[error("arc set contains a directed cycle")]
    Cyclic,
    #[error("metric sums do not match the arcs")]
    MetricMismatch,
}

/// `k` arc-disjoint simple `s -> t` paths with their metric sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub arc_ids: BTreeSet<ArcId>,
    pub paths: Vec<Vec<ArcId>>,
    pub cost_sum: i64,
    pub delay_sum: i64,
}

impl Solution {
    /// Exact `(cost_sum, delay_sum)` recomputed from the arcs.
    pub fn metrics(&self, inst: &Instance) -> (i64, i64) {
        metrics(inst, self.arc_ids.iter().copied())
    }

    /// Builds a solution from explicit paths, checking every invariant.
    pub fn from_paths(inst: &Instance, paths: Vec<Vec<ArcId>>) -> Result<Self, SolutionError> {
        for id in paths.iter().flatten() {
            if id.0 == 0 || id.index() >= inst.m() {
                return Err(SolutionError::UnknownArc(id.0));
            }
        }
        let arc_ids: BTreeSet<ArcId> = paths.iter().flatten().copied().collect();
        let (cost_sum, delay_sum) = metrics(inst, arc_ids.iter().copied());
        let sol = Solution { arc_ids, paths, cost_sum, delay_sum };
        sol.validate(inst)?;
        Ok(sol)
    }

    /// Checks disjointness, simplicity, acyclicity and the metric sums.
    pub fn validate(&self, inst: &Instance) -> Result<(), SolutionError> {
        if self.paths.len() != inst.k() {
            return Err(SolutionError::PathCount { expected: inst.k(), found: self.paths.len() });
        }
        let mut seen = BTreeSet::new();
        for (p, path) in self.paths.iter().enumerate() {
            let mut at = inst.s();
            let mut visited = vec![false; inst.n()];
            visited[at] = true;
            if path.is_empty() {
                return Err(SolutionError::NotAPath(p));
            }
            for &id in path {
                if id.0 == 0 || id.index() >= inst.m() {
                    return Err(SolutionError::UnknownArc(id.0));
                }
                let arc = inst.arc(id);
                if arc.tail != at {
                    return Err(SolutionError::NotAPath(p));
                }
                if !seen.insert(id) {
                    return Err(SolutionError::NotDisjoint(id));
                }
                at = arc.head;
                if visited[at] {
                    return Err(SolutionError::NotSimple(p));
                }
                visited[at] = true;
            }
            if at != inst.t() {
                return Err(SolutionError::NotAPath(p));
            }
        }
        if seen != self.arc_ids {
            return Err(SolutionError::UnionMismatch);
        }
        if let Some((a, b)) = opposing_pair(inst, &self.arc_ids) {
            return Err(SolutionError::OpposingPair(a, b));
        }
        if find_cycle(inst, &self.arc_ids).is_some() {
            return Err(SolutionError::Cyclic);
        }
        if self.metrics(inst) != (self.cost_sum, self.delay_sum) {
            return Err(SolutionError::MetricMismatch);
        }
        Ok(())
    }
}

pub fn metrics(inst: &Instance, arcs: impl IntoIterator<Item = ArcId>) -> (i64, i64) {
    arcs.into_iter().fold((0, 0), |(c, d), id| {
        let a = inst.arc(id);
        (c + a.cost, d + a.delay)
    })
}

fn opposing_pair(inst: &Instance, arcs: &BTreeSet<ArcId>) -> Option<(ArcId, ArcId)> {
    let ends: BTreeSet<(usize, usize, ArcId)> = arcs
        .iter()
        .map(|&id| {
            let a = inst.arc(id);
            (a.tail, a.head, id)
        })
        .collect();
    for &(u, v, id) in &ends {
        if let Some(&(_, _, other)) = ends.range((v, u, ArcId(0))..=(v, u, ArcId(u32::MAX))).next() {
            return Some((id.min(other), id.max(other)));
        }
    }
    None
}

/// First directed cycle of the arc-induced subgraph, found by a DFS that
/// visits vertices and arcs in increasing order.
pub(crate) fn find_cycle(inst: &Instance, arcs: &BTreeSet<ArcId>) -> Option<Vec<ArcId>> {
    let mut out = vec![Vec::new(); inst.n()];
    for &id in arcs {
        out[inst.arc(id).tail].push(id);
    }
    // 0 = new, 1 = on stack, 2 = done
    let mut state = vec![0u8; inst.n()];
    for root in 0..inst.n() {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        let mut via: Vec<ArcId> = Vec::new();
        state[root] = 1;
        while let Some(&(v, next)) = stack.last() {
            if let Some(&id) = out[v].get(next) {
                stack.last_mut().unwrap().1 += 1;
                let w = inst.arc(id).head;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                        via.push(id);
                    }
                    1 => {
                        let start = stack.iter().position(|&(x, _)| x == w).unwrap();
                        let mut cycle = via[start..].to_vec();
                        cycle.push(id);
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
                via.pop();
            }
        }
    }
    None
}

/// Cleans a unit `s -> t` flow of value `k` into a [`Solution`]: drops every
/// directed cycle (opposing pairs included) and decomposes the remainder into
/// `k` paths, always following the smallest unused out-arc id.
pub fn normalize(
    inst: &Instance,
    arcs: impl IntoIterator<Item = ArcId>,
) -> Result<Solution, SolutionError> {
    let mut set: BTreeSet<ArcId> = BTreeSet::new();
    for id in arcs {
        if id.0 == 0 || id.index() >= inst.m() {
            return Err(SolutionError::UnknownArc(id.0));
        }
        set.insert(id);
    }
    let mut balance = vec![0i64; inst.n()];
    for &id in &set {
        let a = inst.arc(id);
        balance[a.tail] += 1;
        balance[a.head] -= 1;
    }
    let k = inst.k() as i64;
    let conserved = balance.iter().enumerate().all(|(v, &b)| {
        if v == inst.s() {
            b == k
        } else if v == inst.t() {
            b == -k
        } else {
            b == 0
        }
    });
    if !conserved {
        return Err(SolutionError::FlowValue { expected: inst.k() });
    }
    while let Some(cycle) = find_cycle(inst, &set) {
        for id in cycle {
            set.remove(&id);
        }
    }

    let mut out = vec![Vec::new(); inst.n()];
    for &id in &set {
        out[inst.arc(id).tail].push(id);
    }
    for list in &mut out {
        list.reverse();
    }
    let mut paths = Vec::with_capacity(inst.k());
    for _ in 0..inst.k() {
        let mut path = Vec::new();
        let mut at = inst.s();
        while at != inst.t() {
            let id = out[at].pop().ok_or(SolutionError::FlowValue { expected: inst.k() })?;
            path.push(id);
            at = inst.arc(id).head;
        }
        paths.push(path);
    }
    let (cost_sum, delay_sum) = metrics(inst, set.iter().copied());
    Ok(Solution { arc_ids: set, paths, cost_sum, delay_sum })
}
