//! Minimum delay/cost ratio cycles under a cost budget.
//!
//! Each layered graph `H(v)` is searched with Lawler's ratio iteration:
//! starting from `lambda = 0`, look for a cycle that is negative under
//! `delay - lambda * cost`; if one exists, move `lambda` to its ratio and
//! repeat. Every cycle of `H(v)` passes through `(v, 1)` and the rest of the
//! graph is acyclic, so negative-cycle detection is a single shortest-path
//! pass in topological order followed by a scan of the backward arcs.
//!
//! Once the optimum ratio is known, the zero-weight cycles through the root
//! are exactly the cycles made of tight arcs; a bounded DFS over them picks
//! the canonical representative (smallest sorted arc-id set).

use std::cmp::Ordering;

use num_bigint::BigInt;

use crate::layered::{
    build_layered, decompose_walk, project_walk, LayeredArcKind, LayeredCycle, LayeredGraph,
};
use crate::residual::{GCycle, ResidualGraph};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Worker threads for the per-root searches; 1 runs serially.
    pub threads: usize,
    /// Node expansions allowed per root when enumerating tied optimal cycles.
    pub tie_break_budget: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { threads: 1, tie_break_budget: 200_000 }
    }
}

/// Result of the ratio search on one layered graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredOptimum {
    pub cycle: LayeredCycle,
    /// `delay / cost` of `cycle` (epsilon-charged in epsilon mode).
    pub ratio: Rational,
    /// The strictly decreasing sequence of ratios visited by the iteration.
    pub lambdas: Vec<Rational>,
}

/// `lambda = num / den` in units of delay per cost unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Lambda {
    num: i128,
    den: i128,
}

impl Lambda {
    fn weight(self, delay: i64, units: i128) -> i128 {
        self.den * delay as i128 - self.num * units
    }
}

fn reduce(num: i128, den: i128) -> Lambda {
    fn gcd(mut a: i128, mut b: i128) -> i128 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    }
    let g = gcd(num, den).max(1);
    Lambda { num: num / g, den: den / g }
}

struct Pass {
    dist: Vec<Option<i128>>,
    pred: Vec<usize>,
}

fn arc_units(h: &LayeredGraph, rg: &ResidualGraph, i: usize) -> i128 {
    match h.arcs()[i].kind {
        LayeredArcKind::Image(e) => rg.cost_units(e),
        LayeredArcKind::Backward => 0,
    }
}

/// Shortest distances from `(root, 1)` over non-backward arcs.
fn shortest_pass(h: &LayeredGraph, rg: &ResidualGraph, lambda: Lambda) -> Pass {
    let mut dist: Vec<Option<i128>> = vec![None; h.node_count()];
    let mut pred = vec![usize::MAX; h.node_count()];
    dist[h.root_entry()] = Some(0);
    for &u in h.topological_order() {
        let Some(du) = dist[u] else { continue };
        for &i in h.out(u) {
            let a = &h.arcs()[i];
            if a.kind == LayeredArcKind::Backward {
                continue;
            }
            let nd = du + lambda.weight(a.delay, arc_units(h, rg, i));
            if dist[a.to].is_none_or(|old| nd < old) {
                dist[a.to] = Some(nd);
                pred[a.to] = i;
            }
        }
    }
    Pass { dist, pred }
}

/// The most negative cycle under the pass, closed by its backward arc.
fn negative_cycle(h: &LayeredGraph, pass: &Pass) -> Option<LayeredCycle> {
    let mut best: Option<(i128, usize)> = None;
    for b in backward_arcs(h) {
        let a = &h.arcs()[b];
        if let Some(d) = pass.dist[a.from] {
            if d < 0 && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, b));
            }
        }
    }
    let (_, back) = best?;
    let mut cycle = vec![back];
    let mut at = h.arcs()[back].from;
    while at != h.root_entry() {
        let i = pass.pred[at];
        cycle.push(i);
        at = h.arcs()[i].from;
    }
    // starts at (root, 1), ends with the backward arc
    cycle.reverse();
    Some(cycle)
}

fn backward_arcs(h: &LayeredGraph) -> Vec<usize> {
    (0..h.arcs().len()).filter(|&i| h.arcs()[i].kind == LayeredArcKind::Backward).collect()
}

fn cycle_lambda(h: &LayeredGraph, rg: &ResidualGraph, cycle: &[usize]) -> Lambda {
    let delay: i128 = cycle.iter().map(|&i| h.arcs()[i].delay as i128).sum();
    let units: i128 = cycle.iter().map(|&i| arc_units(h, rg, i)).sum();
    debug_assert!(units > 0, "every layered cycle climbs at least one layer");
    reduce(delay, units)
}

fn to_ratio(lambda: Lambda, rg: &ResidualGraph) -> Rational {
    Rational::new(BigInt::from(lambda.num) * BigInt::from(rg.unit_den()), BigInt::from(lambda.den))
}

/// Minimum-ratio cycle of `h`, or `None` when `h` has no negative-delay cycle.
pub fn min_ratio_cycle_layered(h: &LayeredGraph, rg: &ResidualGraph) -> Option<LayeredOptimum> {
    min_ratio_cycle_layered_with(h, rg, SearchOptions::default().tie_break_budget)
}

fn min_ratio_cycle_layered_with(
    h: &LayeredGraph,
    rg: &ResidualGraph,
    tie_break_budget: usize,
) -> Option<LayeredOptimum> {
    let mut lambda = Lambda { num: 0, den: 1 };
    let mut lambdas = Vec::new();
    let mut found: Option<LayeredCycle> = None;
    let final_pass = loop {
        let pass = shortest_pass(h, rg, lambda);
        match negative_cycle(h, &pass) {
            Some(cycle) => {
                let next = cycle_lambda(h, rg, &cycle);
                debug_assert!(
                    next.num * lambda.den < lambda.num * next.den,
                    "ratio iteration must strictly decrease"
                );
                lambda = next;
                lambdas.push(to_ratio(lambda, rg));
                found = Some(cycle);
            }
            None => break pass,
        }
    };
    let lawler_cycle = found?;
    let cycle = canonical_tight_cycle(h, rg, lambda, &final_pass, tie_break_budget)
        .unwrap_or(lawler_cycle);
    Some(LayeredOptimum { cycle, ratio: to_ratio(lambda, rg), lambdas })
}

/// DFS over tight arcs from `(root, 1)` that never revisits a base vertex.
/// Each hit of `(root, i)` with distance 0 closes a zero-weight cycle whose
/// projection is a simple residual cycle; the smallest key wins.
fn canonical_tight_cycle(
    h: &LayeredGraph,
    rg: &ResidualGraph,
    lambda: Lambda,
    pass: &Pass,
    budget: usize,
) -> Option<LayeredCycle> {
    let root = h.root_entry();
    let backward_into_root: Vec<Option<usize>> = {
        let mut map = vec![None; h.node_count()];
        for b in backward_arcs(h) {
            map[h.arcs()[b].from] = Some(b);
        }
        map
    };
    let tight = |i: usize| -> bool {
        let a = &h.arcs()[i];
        match (pass.dist[a.from], pass.dist[a.to]) {
            (Some(du), Some(dv)) => du + lambda.weight(a.delay, arc_units(h, rg, i)) == dv,
            _ => false,
        }
    };

    let mut visited = vec![false; rg.n()];
    visited[h.node(root).vertex] = true;
    let mut best: Option<(Vec<u32>, LayeredCycle)> = None;
    let mut path: Vec<usize> = Vec::new();
    // stack of (node, next out-arc position)
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    let mut expansions = 0usize;
    while let Some(&(u, next)) = stack.last() {
        let out = h.out(u);
        if next >= out.len() || expansions >= budget {
            stack.pop();
            if let Some(i) = path.pop() {
                visited[h.node(h.arcs()[i].to).vertex] = false;
            }
            continue;
        }
        stack.last_mut().unwrap().1 += 1;
        let i = out[next];
        let a = &h.arcs()[i];
        if a.kind == LayeredArcKind::Backward || !tight(i) {
            continue;
        }
        expansions += 1;
        let target = h.node(a.to);
        if target.vertex == h.root() {
            if pass.dist[a.to] == Some(0) {
                if let Some(back) = backward_into_root[a.to] {
                    let mut cycle = path.clone();
                    cycle.push(i);
                    cycle.push(back);
                    let key = projected_key(h, &cycle);
                    if best.as_ref().is_none_or(|(k, _)| key < *k) {
                        best = Some((key, cycle));
                    }
                }
            }
            continue;
        }
        if visited[target.vertex] {
            continue;
        }
        visited[target.vertex] = true;
        path.push(i);
        stack.push((a.to, 0));
    }
    best.map(|(_, cycle)| cycle)
}

fn projected_key(h: &LayeredGraph, cycle: &[usize]) -> Vec<u32> {
    let mut ids: Vec<u32> = cycle
        .iter()
        .filter_map(|&i| match h.arcs()[i].kind {
            LayeredArcKind::Image(e) => Some(e as u32 + 1),
            LayeredArcKind::Backward => None,
        })
        .collect();
    ids.sort_unstable();
    ids
}

fn compare(a: &GCycle, b: &GCycle) -> Ordering {
    a.ratio.cmp(&b.ratio).then_with(|| a.key().cmp(&b.key()))
}

/// Candidate simple cycles found through one root.
fn root_candidates(
    rg: &ResidualGraph,
    root: usize,
    cost_budget: i64,
    opts: &SearchOptions,
) -> Vec<GCycle> {
    let layers = cost_budget as usize + 1;
    let h = build_layered(rg, root, layers).expect("valid root and layer count");
    let Some(opt) = min_ratio_cycle_layered_with(&h, rg, opts.tie_break_budget) else {
        return Vec::new();
    };
    let walk = project_walk(&h, rg, &opt.cycle).expect("layered cycles have one backward arc");
    decompose_walk(rg, &walk)
        .expect("projection is a closed walk")
        .into_iter()
        .filter(|c| c.delay < 0 && c.cost <= cost_budget)
        .collect()
}

/// The simple residual cycle with cost at most `cost_budget`, negative delay
/// and minimum delay/cost ratio; ties go to the smallest sorted arc-id set.
///
/// Layered graphs get `cost_budget + 1` layers so that cycles costing exactly
/// the budget are representable. Only vertices touching a reversed arc are
/// used as roots: every negative-delay cycle contains a reversed arc.
pub fn best_improving_cycle(
    rg: &ResidualGraph,
    cost_budget: i64,
    opts: &SearchOptions,
) -> Option<GCycle> {
    if cost_budget < 1 {
        return None;
    }
    let roots = rg.reversed_endpoints();
    let candidates: Vec<GCycle> = if opts.threads <= 1 || roots.len() <= 1 {
        roots.iter().flat_map(|&r| root_candidates(rg, r, cost_budget, opts)).collect()
    } else {
        let chunk = roots.len().div_ceil(opts.threads);
        std::thread::scope(|scope| {
            let handles: Vec<_> = roots
                .chunks(chunk)
                .map(|part| {
                    scope.spawn(move || {
                        part.iter()
                            .flat_map(|&r| root_candidates(rg, r, cost_budget, opts))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("root search panicked")).collect()
        })
    };
    candidates.into_iter().min_by(compare)
}
