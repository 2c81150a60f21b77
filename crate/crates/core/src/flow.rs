//! Minimum-weight `k` arc-disjoint paths by successive shortest paths on the
//! unit-capacity residual network.
//!
//! Weights are exact rationals. They are brought to a common denominator once
//! and every shortest-path round then runs on `i128` reduced weights, kept
//! nonnegative by vertex potentials. Among equal-weight shortest paths each
//! round takes the one with the lexicographically smallest arc-id sequence.

use std::collections::{BTreeSet, BinaryHeap, VecDeque};
use std::cmp::Reverse;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::instance::{ArcId, Instance};
use crate::solution::normalize;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("only {available} arc-disjoint s-t paths exist, {required} required")]
    Infeasible { available: usize, required: usize },
    #[error("weight of arc {0} is negative")]
    NegativeWeight(ArcId),
    #[error("expected {expected} weights, got {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("scaled weights exceed 128-bit range")]
    Overflow,
}

/// One nonnegative exact weight per arc, indexed by arc position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightAssignment(pub Vec<Rational>);

impl WeightAssignment {
    pub fn from_fn(inst: &Instance, f: impl Fn(&crate::Arc) -> Rational) -> Self {
        WeightAssignment(inst.arcs().iter().map(f).collect())
    }

    pub fn get(&self, id: ArcId) -> &Rational {
        &self.0[id.index()]
    }

    /// Every weight multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Self {
        WeightAssignment(self.0.iter().map(|w| w * factor).collect())
    }

    pub fn total(&self, arcs: impl IntoIterator<Item = ArcId>) -> Rational {
        arcs.into_iter().fold(Rational::zero(), |acc, id| acc + self.get(id))
    }

    /// Integer weights over the common denominator.
    fn integral(&self) -> Result<Vec<i128>, FlowError> {
        let lcm = self.0.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let ints: Vec<i128> = self
            .0
            .iter()
            .map(|w| (w.numer() * (&lcm / w.denom())).to_i128().ok_or(FlowError::Overflow))
            .collect::<Result<_, _>>()?;
        let total = ints.iter().try_fold(0i128, |acc, &w| acc.checked_add(w));
        match total {
            Some(t) if t < i128::MAX / 4 => Ok(ints),
            _ => Err(FlowError::Overflow),
        }
    }
}

/// `k` arc-disjoint `s -> t` paths (as an acyclic arc set) of minimum total weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSolution {
    pub arc_ids: BTreeSet<ArcId>,
    pub total_weight: Rational,
}

struct Residual<'a> {
    inst: &'a Instance,
    weight: &'a [i128],
    incident: Vec<Vec<usize>>,
    used: Vec<bool>,
}

impl Residual<'_> {
    /// Residual arcs leaving `v` as `(arc index, other end, weight)`, in id order.
    fn out(&self, v: usize) -> impl Iterator<Item = (usize, usize, i128)> + '_ {
        self.incident[v].iter().filter_map(move |&i| {
            let a = &self.inst.arcs()[i];
            if a.tail == v && !self.used[i] {
                Some((i, a.head, self.weight[i]))
            } else if a.head == v && self.used[i] {
                Some((i, a.tail, -self.weight[i]))
            } else {
                None
            }
        })
    }
}

pub fn min_weight_disjoint_paths(
    inst: &Instance,
    w: &WeightAssignment,
) -> Result<FlowSolution, FlowError> {
    if w.0.len() != inst.m() {
        return Err(FlowError::WeightCount { expected: inst.m(), found: w.0.len() });
    }
    if let Some(i) = w.0.iter().position(|x| x.is_negative()) {
        return Err(FlowError::NegativeWeight(ArcId::from_index(i)));
    }
    let weight = w.integral()?;
    let n = inst.n();
    let mut incident = vec![Vec::new(); n];
    for (i, a) in inst.arcs().iter().enumerate() {
        incident[a.tail].push(i);
        incident[a.head].push(i);
    }
    let mut res = Residual { inst, weight: &weight, incident, used: vec![false; inst.m()] };
    let mut potential = vec![0i128; n];

    for round in 0..inst.k() {
        let dist = dijkstra(&res, &potential);
        if dist[inst.t()].is_none() {
            return Err(FlowError::Infeasible { available: round, required: inst.k() });
        }
        let path = lex_smallest_tight_path(&res, &potential, &dist);
        for i in path {
            res.used[i] = !res.used[i];
        }
        for (p, d) in potential.iter_mut().zip(&dist) {
            if let Some(d) = d {
                *p += d;
            }
        }
    }

    let chosen: Vec<ArcId> =
        (0..inst.m()).filter(|&i| res.used[i]).map(ArcId::from_index).collect();
    let sol = normalize(inst, chosen).expect("augmentation preserves flow conservation");
    let total_weight = w.total(sol.arc_ids.iter().copied());
    Ok(FlowSolution { arc_ids: sol.arc_ids, total_weight })
}

fn reduced(potential: &[i128], u: usize, v: usize, w: i128) -> i128 {
    w + potential[u] - potential[v]
}

fn dijkstra(res: &Residual<'_>, potential: &[i128]) -> Vec<Option<i128>> {
    let mut dist: Vec<Option<i128>> = vec![None; res.inst.n()];
    let mut done = vec![false; res.inst.n()];
    let s = res.inst.s();
    dist[s] = Some(0);
    let mut heap = BinaryHeap::from([Reverse((0i128, s))]);
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for (_, v, w) in res.out(u) {
            let rc = reduced(potential, u, v, w);
            debug_assert!(rc >= 0, "negative reduced weight");
            let nd = d + rc;
            if dist[v].is_none_or(|old| nd < old) {
                dist[v] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

fn is_tight(potential: &[i128], dist: &[Option<i128>], u: usize, v: usize, w: i128) -> bool {
    match (dist[u], dist[v]) {
        (Some(du), Some(dv)) => du + reduced(potential, u, v, w) == dv,
        _ => false,
    }
}

/// Greedy walk over tight arcs: at each vertex take the smallest arc id whose
/// head still reaches `t` without revisiting a vertex. Every `s -> t` path of
/// tight arcs is a shortest path, so this is the lexicographically smallest one.
fn lex_smallest_tight_path(
    res: &Residual<'_>,
    potential: &[i128],
    dist: &[Option<i128>],
) -> Vec<usize> {
    let (s, t) = (res.inst.s(), res.inst.t());
    let mut visited = vec![false; res.inst.n()];
    visited[s] = true;
    let mut path = Vec::new();
    let mut at = s;
    while at != t {
        let (i, v) = res
            .out(at)
            .filter(|&(_, v, w)| !visited[v] && is_tight(potential, dist, at, v, w))
            .find(|&(_, v, _)| reaches(res, potential, dist, &visited, v, t))
            .map(|(i, v, _)| (i, v))
            .expect("a shortest path continues from every vertex on it");
        path.push(i);
        visited[v] = true;
        at = v;
    }
    path
}

fn reaches(
    res: &Residual<'_>,
    potential: &[i128],
    dist: &[Option<i128>],
    blocked: &[bool],
    from: usize,
    to: usize,
) -> bool {
    if from == to {
        return true;
    }
    let mut seen = blocked.to_vec();
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for (_, v, w) in res.out(u) {
            if !seen[v] && is_tight(potential, dist, u, v, w) {
                if v == to {
                    return true;
                }
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    false
}
