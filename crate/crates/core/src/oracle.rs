//! Exhaustive reference answers for small instances.
//!
//! Everything here enumerates: simple `s -> t` paths by DFS, then every set of
//! `k` pairwise arc-disjoint paths (each set once, paths in increasing
//! enumeration order), and simple residual cycles by the usual
//! smallest-vertex-first DFS. Nothing is shared with the solver beyond the
//! data types.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::flow::WeightAssignment;
use crate::instance::{ArcId, Instance};
use crate::residual::{GCycle, ResidualGraph};
use crate::solution::Solution;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_vertices: usize,
    pub max_paths: usize,
    pub max_sets: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_vertices: 12, max_paths: 200_000, max_sets: 5_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n} vertices exceed the oracle cap of {cap}")]
    TooManyVertices { n: usize, cap: usize },
    #[error("more than {0} simple s-t paths")]
    TooManyPaths(usize),
    #[error("more than {0} disjoint path sets")]
    TooManySets(usize),
}

/// A nondominated `(cost_sum, delay_sum)` pair with its smallest witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoPoint {
    pub cost_sum: i64,
    pub delay_sum: i64,
    pub witness: BTreeSet<ArcId>,
}

struct PathTable {
    paths: Vec<Vec<ArcId>>,
    masks: Vec<Vec<u64>>,
    cost: Vec<i64>,
    delay: Vec<i64>,
}

fn simple_paths(inst: &Instance, limits: &OracleLimits) -> Result<PathTable, OracleError> {
    if inst.n() > limits.max_vertices {
        return Err(OracleError::TooManyVertices { n: inst.n(), cap: limits.max_vertices });
    }
    let out = inst.out_arcs();
    let words = inst.m().div_ceil(64);
    let mut table = PathTable { paths: Vec::new(), masks: Vec::new(), cost: Vec::new(), delay: Vec::new() };
    let mut visited = vec![false; inst.n()];
    let mut path = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        inst: &Instance,
        out: &[Vec<ArcId>],
        v: usize,
        visited: &mut [bool],
        path: &mut Vec<ArcId>,
        table: &mut PathTable,
        words: usize,
        cap: usize,
    ) -> Result<(), OracleError> {
        if v == inst.t() {
            if table.paths.len() >= cap {
                return Err(OracleError::TooManyPaths(cap));
            }
            let mut mask = vec![0u64; words];
            let (mut c, mut d) = (0, 0);
            for id in path.iter() {
                mask[id.index() / 64] |= 1 << (id.index() % 64);
                c += inst.arc(*id).cost;
                d += inst.arc(*id).delay;
            }
            table.paths.push(path.clone());
            table.masks.push(mask);
            table.cost.push(c);
            table.delay.push(d);
            return Ok(());
        }
        visited[v] = true;
        for &id in &out[v] {
            let head = inst.arc(id).head;
            if !visited[head] {
                path.push(id);
                dfs(inst, out, head, visited, path, table, words, cap)?;
                path.pop();
            }
        }
        visited[v] = false;
        Ok(())
    }

    dfs(inst, &out, inst.s(), &mut visited, &mut path, &mut table, words, limits.max_paths)?;
    Ok(table)
}

type SetVisitor<'a> = dyn FnMut(&PathTable, &[usize], i64, i64) + 'a;

/// Calls `f(path indices, cost_sum, delay_sum)` once per set of `k`
/// arc-disjoint simple paths.
fn for_each_set(
    inst: &Instance,
    limits: &OracleLimits,
    mut f: impl FnMut(&PathTable, &[usize], i64, i64),
) -> Result<usize, OracleError> {
    let table = simple_paths(inst, limits)?;
    let words = inst.m().div_ceil(64);
    let mut chosen = Vec::with_capacity(inst.k());
    let mut used = vec![0u64; words];
    let mut count = 0usize;

    #[allow(clippy::too_many_arguments)]
    fn rec(
        table: &PathTable,
        k: usize,
        from: usize,
        chosen: &mut Vec<usize>,
        used: &mut [u64],
        cost: i64,
        delay: i64,
        count: &mut usize,
        cap: usize,
        f: &mut SetVisitor<'_>,
    ) -> Result<(), OracleError> {
        if chosen.len() == k {
            if *count >= cap {
                return Err(OracleError::TooManySets(cap));
            }
            *count += 1;
            f(table, chosen, cost, delay);
            return Ok(());
        }
        for p in from..table.paths.len() {
            let mask = &table.masks[p];
            if mask.iter().zip(used.iter()).any(|(a, b)| a & b != 0) {
                continue;
            }
            for (u, m) in used.iter_mut().zip(mask) {
                *u |= m;
            }
            chosen.push(p);
            rec(table, k, p + 1, chosen, used, cost + table.cost[p], delay + table.delay[p], count, cap, f)?;
            chosen.pop();
            for (u, m) in used.iter_mut().zip(mask) {
                *u &= !m;
            }
        }
        Ok(())
    }

    rec(&table, inst.k(), 0, &mut chosen, &mut used, 0, 0, &mut count, limits.max_sets, &mut f)?;
    Ok(count)
}

fn to_solution(table: &PathTable, chosen: &[usize], cost_sum: i64, delay_sum: i64) -> Solution {
    let paths: Vec<Vec<ArcId>> = chosen.iter().map(|&p| table.paths[p].clone()).collect();
    let arc_ids = paths.iter().flatten().copied().collect();
    Solution { arc_ids, paths, cost_sum, delay_sum }
}

fn sorted_ids(table: &PathTable, chosen: &[usize]) -> BTreeSet<ArcId> {
    chosen.iter().flat_map(|&p| table.paths[p].iter().copied()).collect()
}

/// Every set of `k` arc-disjoint simple paths, exactly once. The sets are
/// reported as they were enumerated: they may contain opposing arc pairs.
pub fn enumerate_disjoint_path_sets(
    inst: &Instance,
    limits: &OracleLimits,
) -> Result<Vec<Solution>, OracleError> {
    let mut sets = Vec::new();
    for_each_set(inst, limits, |t, chosen, c, d| sets.push(to_solution(t, chosen, c, d)))?;
    Ok(sets)
}

/// Number of sets without materializing them.
pub fn count_disjoint_path_sets(inst: &Instance, limits: &OracleLimits) -> Result<usize, OracleError> {
    for_each_set(inst, limits, |_, _, _, _| {})
}

/// Minimum over path sets passing `keep`, ordered by `key` then by the
/// sorted arc-id set.
fn best_set<K: Ord>(
    inst: &Instance,
    limits: &OracleLimits,
    keep: impl Fn(i64, i64) -> bool,
    key: impl Fn(i64, i64) -> K,
) -> Result<Option<Solution>, OracleError> {
    let mut best: Option<(K, Vec<ArcId>, Solution)> = None;
    for_each_set(inst, limits, |t, chosen, c, d| {
        if !keep(c, d) {
            return;
        }
        let k = key(c, d);
        if let Some((bk, bids, _)) = &best {
            if k > *bk {
                return;
            }
            if k == *bk {
                let ids: Vec<ArcId> = sorted_ids(t, chosen).into_iter().collect();
                if ids >= *bids {
                    return;
                }
            }
        }
        let ids = sorted_ids(t, chosen).into_iter().collect();
        best = Some((k, ids, to_solution(t, chosen, c, d)));
    })?;
    Ok(best.map(|(_, _, s)| s))
}

/// Whether some path set meets both budgets, with the lexicographically
/// smallest such arc set as witness.
pub fn oracle_feasible(
    inst: &Instance,
    limits: &OracleLimits,
) -> Result<(bool, Option<Solution>), OracleError> {
    let (cb, db) = (inst.cost_budget(), inst.delay_budget());
    let witness = best_set(inst, limits, |c, d| c <= cb && d <= db, |_, _| ())?;
    Ok((witness.is_some(), witness))
}

/// Minimum cost sum among path sets within the delay budget.
pub fn oracle_min_cost_given_delay(
    inst: &Instance,
    limits: &OracleLimits,
) -> Result<Option<(i64, Solution)>, OracleError> {
    let db = inst.delay_budget();
    let best = best_set(inst, limits, |_, d| d <= db, |c, _| c)?;
    Ok(best.map(|s| (s.cost_sum, s)))
}

/// Minimum total weight over all path sets.
pub fn oracle_min_weight(
    inst: &Instance,
    w: &WeightAssignment,
    limits: &OracleLimits,
) -> Result<Option<Rational>, OracleError> {
    let mut best: Option<Rational> = None;
    for_each_set(inst, limits, |t, chosen, _, _| {
        let total = w.total(chosen.iter().flat_map(|&p| t.paths[p].iter().copied()));
        if best.as_ref().is_none_or(|b| total < *b) {
            best = Some(total);
        }
    })?;
    Ok(best)
}

/// Nondominated `(cost_sum, delay_sum)` points, by increasing cost.
pub fn pareto_set(inst: &Instance, limits: &OracleLimits) -> Result<Vec<ParetoPoint>, OracleError> {
    // smallest witness per distinct point first
    let mut points: std::collections::BTreeMap<(i64, i64), BTreeSet<ArcId>> = Default::default();
    for_each_set(inst, limits, |t, chosen, c, d| {
        let ids = sorted_ids(t, chosen);
        let slot = points.entry((c, d)).or_insert_with(|| ids.clone());
        if ids < *slot {
            *slot = ids;
        }
    })?;
    let mut front: Vec<ParetoPoint> = Vec::new();
    for ((c, d), witness) in points {
        if front.last().is_none_or(|p| d < p.delay_sum) {
            front.push(ParetoPoint { cost_sum: c, delay_sum: d, witness });
        }
    }
    Ok(front)
}

/// Minimum delay/cost ratio over simple cycles with cost at most
/// `cost_budget` and negative delay; ties go to the smallest sorted arc-id
/// set. Only meant for tiny graphs.
pub fn oracle_min_ratio_cycle(
    rg: &ResidualGraph,
    cost_budget: i64,
) -> Option<(GCycle, Rational)> {
    let mut best: Option<GCycle> = None;
    let mut path: Vec<usize> = Vec::new();
    let mut on_path = vec![false; rg.n()];

    // cycles whose smallest vertex is `start`
    fn dfs(
        rg: &ResidualGraph,
        start: usize,
        v: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        cost_budget: i64,
        best: &mut Option<GCycle>,
    ) {
        for &e in rg.out(v) {
            let a = rg.arc(e);
            if a.head < start {
                continue;
            }
            path.push(e);
            if a.head == start {
                let cyc = GCycle::new(rg, path).expect("DFS closes a simple cycle");
                if cyc.cost <= cost_budget && cyc.delay < 0 {
                    let better = match best {
                        None => true,
                        Some(b) => (&cyc.ratio, cyc.key()) < (&b.ratio, b.key()),
                    };
                    if better {
                        *best = Some(cyc);
                    }
                }
            } else if !on_path[a.head] {
                on_path[a.head] = true;
                dfs(rg, start, a.head, path, on_path, cost_budget, best);
                on_path[a.head] = false;
            }
            path.pop();
        }
    }

    for start in 0..rg.n() {
        on_path[start] = true;
        dfs(rg, start, start, &mut path, &mut on_path, cost_budget, &mut best);
        on_path[start] = false;
    }
    best.map(|c| {
        let r = c.ratio.clone();
        (c, r)
    })
}

/// Independent count of path sets: every arc subset satisfying flow
/// conservation is split into paths in all possible ways (one in-to-out
/// pairing per vertex); pairings that yield `k` simple paths and no closed
/// trail are counted. Exponential in `m`; for cross-checks only.
pub fn count_by_pairings(inst: &Instance) -> u64 {
    let m = inst.m();
    assert!(m <= 20, "pairing count is only for tiny instances");
    let mut total = 0u64;
    for subset in 0u32..(1 << m) {
        let ids: Vec<ArcId> = (0..m).filter(|i| subset >> i & 1 == 1).map(ArcId::from_index).collect();
        let mut balance = vec![0i64; inst.n()];
        for &id in &ids {
            balance[inst.arc(id).tail] += 1;
            balance[inst.arc(id).head] -= 1;
        }
        let k = inst.k() as i64;
        let conserving = (0..inst.n()).all(|v| {
            balance[v]
                == if v == inst.s() {
                    k
                } else if v == inst.t() {
                    -k
                } else {
                    0
                }
        });
        if conserving {
            total += count_pairings(inst, &ids);
        }
    }
    total
}

fn count_pairings(inst: &Instance, ids: &[ArcId]) -> u64 {
    let n = inst.n();
    let mut ins: Vec<Vec<ArcId>> = vec![Vec::new(); n];
    let mut outs: Vec<Vec<ArcId>> = vec![Vec::new(); n];
    for &id in ids {
        outs[inst.arc(id).tail].push(id);
        ins[inst.arc(id).head].push(id);
    }
    // arcs entering s or leaving t cannot lie on a simple s-t path
    if !ins[inst.s()].is_empty() || !outs[inst.t()].is_empty() {
        return 0;
    }
    let inner: Vec<usize> = (0..n).filter(|&v| v != inst.s() && v != inst.t()).collect();
    let mut next = vec![None; inst.m()];
    let mut count = 0;
    pair_vertex(inst, &inner, 0, &ins, &outs, &mut next, &outs[inst.s()], &mut count);
    count
}

#[allow(clippy::too_many_arguments)]
fn pair_vertex(
    inst: &Instance,
    inner: &[usize],
    at: usize,
    ins: &[Vec<ArcId>],
    outs: &[Vec<ArcId>],
    next: &mut Vec<Option<ArcId>>,
    starts: &[ArcId],
    count: &mut u64,
) {
    if at == inner.len() {
        if pairing_gives_simple_paths(inst, next, starts, ins.iter().map(Vec::len).sum()) {
            *count += 1;
        }
        return;
    }
    let v = inner[at];
    let (incoming, outgoing) = (&ins[v], &outs[v]);
    let mut perm: Vec<usize> = (0..outgoing.len()).collect();
    loop {
        for (j, &a) in incoming.iter().enumerate() {
            next[a.index()] = Some(outgoing[perm[j]]);
        }
        pair_vertex(inst, inner, at + 1, ins, outs, next, starts, count);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    for &a in incoming {
        next[a.index()] = None;
    }
}

fn pairing_gives_simple_paths(
    inst: &Instance,
    next: &[Option<ArcId>],
    starts: &[ArcId],
    arc_count: usize,
) -> bool {
    let mut covered = 0;
    for &first in starts {
        let mut seen = vec![false; inst.n()];
        seen[inst.s()] = true;
        let mut arc = first;
        loop {
            covered += 1;
            let head = inst.arc(arc).head;
            if seen[head] {
                return false;
            }
            seen[head] = true;
            if head == inst.t() {
                break;
            }
            arc = next[arc.index()].expect("inner vertices are fully paired");
        }
    }
    // arcs not reached from s form closed trails
    covered == arc_count
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
