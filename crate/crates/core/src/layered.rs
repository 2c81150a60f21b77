//! Cost-layered auxiliary graph `H(v)`.
//!
//! Each residual vertex `u` gets copies `(u, 1) .. (u, L)`. A residual arc of
//! cost `c` becomes the arcs `(tail, i) -> (head, i + c)` for `i <= L - c`, and
//! the root `v` gets zero-weight backward arcs `(v, i) -> (v, 1)` for
//! `i >= 2`. Layer `i` records an accumulated cost of `i - 1`, so every cycle
//! uses exactly one backward arc and costs at most `L - 1`.

use thiserror::Error;

use crate::residual::{GCycle, ResidualGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayeredError {
    #[error("layer count must be at least 1")]
    NoLayers,
    #[error("root vertex {0} out of range")]
    RootOutOfRange(usize),
    #[error("layered cycle has {0} backward arcs, expected exactly one")]
    BackwardArcs(usize),
    #[error("arc sequence is not a closed walk")]
    NotClosed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LayeredNode {
    pub vertex: usize,
    /// 1-based layer.
    pub layer: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayeredArcKind {
    /// Copy of the residual arc with this index.
    Image(usize),
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayeredArc {
    pub kind: LayeredArcKind,
    pub from: usize,
    pub to: usize,
    pub cost: i64,
    pub delay: i64,
}

/// A cycle of a layered graph as arc indices in traversal order.
pub type LayeredCycle = Vec<usize>;

#[derive(Debug, Clone)]
pub struct LayeredGraph {
    root: usize,
    n: usize,
    layers: usize,
    arcs: Vec<LayeredArc>,
    out_start: Vec<usize>,
    out_arcs: Vec<usize>,
    topo: Vec<usize>,
}

pub fn build_layered(
    rg: &ResidualGraph,
    root: usize,
    layers: usize,
) -> Result<LayeredGraph, LayeredError> {
    if layers < 1 {
        return Err(LayeredError::NoLayers);
    }
    if root >= rg.n() {
        return Err(LayeredError::RootOutOfRange(root));
    }
    let n = rg.n();
    let node = |v: usize, layer: usize| (layer - 1) * n + v;
    let mut arcs = Vec::new();
    for (e, a) in rg.arcs().iter().enumerate() {
        let c = a.cost as usize;
        for i in 1..=layers.saturating_sub(c) {
            arcs.push(LayeredArc {
                kind: LayeredArcKind::Image(e),
                from: node(a.tail, i),
                to: node(a.head, i + c),
                cost: a.cost,
                delay: a.delay,
            });
        }
    }
    for i in 2..=layers {
        arcs.push(LayeredArc {
            kind: LayeredArcKind::Backward,
            from: node(root, i),
            to: node(root, 1),
            cost: 0,
            delay: 0,
        });
    }

    let nodes = n * layers;
    let mut out_start = vec![0usize; nodes + 1];
    for a in &arcs {
        out_start[a.from + 1] += 1;
    }
    for i in 0..nodes {
        out_start[i + 1] += out_start[i];
    }
    let mut fill = out_start.clone();
    let mut out_arcs = vec![0usize; arcs.len()];
    for (i, a) in arcs.iter().enumerate() {
        out_arcs[fill[a.from]] = i;
        fill[a.from] += 1;
    }

    let within = rg.reversed_topological_order().expect("residual graph invariant");
    let topo = (1..=layers).flat_map(|l| within.iter().map(move |&v| node(v, l))).collect();

    let h = LayeredGraph { root, n, layers, arcs, out_start, out_arcs, topo };
    debug_assert!(h.layer_equation_holds());
    Ok(h)
}

impl LayeredGraph {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn node_count(&self) -> usize {
        self.n * self.layers
    }

    pub fn arcs(&self) -> &[LayeredArc] {
        &self.arcs
    }

    pub fn node_id(&self, node: LayeredNode) -> usize {
        (node.layer - 1) * self.n + node.vertex
    }

    pub fn node(&self, id: usize) -> LayeredNode {
        LayeredNode { vertex: id % self.n, layer: id / self.n + 1 }
    }

    /// The node `(root, 1)` every cycle passes through.
    pub fn root_entry(&self) -> usize {
        self.root
    }

    pub fn out(&self, node: usize) -> &[usize] {
        &self.out_arcs[self.out_start[node]..self.out_start[node + 1]]
    }

    /// Nodes in an order where every non-backward arc goes forward.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// `layer(to) - layer(from) = cost` on every image arc, and backward arcs
    /// only run from the root to `(root, 1)`.
    pub fn layer_equation_holds(&self) -> bool {
        self.arcs.iter().all(|a| {
            let (from, to) = (self.node(a.from), self.node(a.to));
            match a.kind {
                LayeredArcKind::Image(_) => to.layer as i64 - from.layer as i64 == a.cost,
                LayeredArcKind::Backward => {
                    from.vertex == self.root
                        && to.vertex == self.root
                        && to.layer == 1
                        && from.layer >= 2
                        && a.cost == 0
                        && a.delay == 0
                }
            }
        })
    }

    /// Total `(cost, delay)` of a layered cycle.
    pub fn weight(&self, cycle: &[usize]) -> (i64, i64) {
        cycle.iter().fold((0, 0), |(c, d), &i| (c + self.arcs[i].cost, d + self.arcs[i].delay))
    }

    pub fn backward_count(&self, cycle: &[usize]) -> usize {
        cycle.iter().filter(|&&i| self.arcs[i].kind == LayeredArcKind::Backward).count()
    }
}

/// A closed walk of the residual graph, as residual arc indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedWalk {
    pub start: usize,
    pub arcs: Vec<usize>,
    pub cost: i64,
    pub delay: i64,
}

/// Drops the backward arc and maps every image arc to its residual origin.
pub fn project_walk(
    h: &LayeredGraph,
    rg: &ResidualGraph,
    cycle: &[usize],
) -> Result<ClosedWalk, LayeredError> {
    let backward: Vec<usize> = (0..cycle.len())
        .filter(|&j| h.arcs[cycle[j]].kind == LayeredArcKind::Backward)
        .collect();
    if backward.len() != 1 {
        return Err(LayeredError::BackwardArcs(backward.len()));
    }
    for j in 0..cycle.len() {
        if h.arcs[cycle[j]].to != h.arcs[cycle[(j + 1) % cycle.len()]].from {
            return Err(LayeredError::NotClosed);
        }
    }
    let b = backward[0];
    let arcs: Vec<usize> = cycle[b + 1..]
        .iter()
        .chain(&cycle[..b])
        .map(|&i| match h.arcs[i].kind {
            LayeredArcKind::Image(e) => e,
            LayeredArcKind::Backward => unreachable!(),
        })
        .collect();
    let (cost, delay) = arcs
        .iter()
        .fold((0, 0), |(c, d), &e| (c + rg.arc(e).cost, d + rg.arc(e).delay));
    Ok(ClosedWalk { start: h.root(), arcs, cost, delay })
}

/// Splits a closed walk into simple cycles by scanning it with a vertex
/// stack; the multiset of arcs is preserved.
pub fn decompose_walk(rg: &ResidualGraph, walk: &ClosedWalk) -> Result<Vec<GCycle>, LayeredError> {
    let mut position: Vec<Option<usize>> = vec![None; rg.n()];
    let mut vertices = vec![walk.start];
    let mut via: Vec<usize> = Vec::new();
    position[walk.start] = Some(0);
    let mut cycles = Vec::new();
    for &e in &walk.arcs {
        let a = rg.arc(e);
        if a.tail != *vertices.last().unwrap() {
            return Err(LayeredError::NotClosed);
        }
        via.push(e);
        match position[a.head] {
            Some(p) => {
                let arcs: Vec<usize> = via.drain(p..).collect();
                for v in vertices.drain(p + 1..) {
                    position[v] = None;
                }
                cycles.push(GCycle::new(rg, &arcs).map_err(|_| LayeredError::NotClosed)?);
            }
            None => {
                position[a.head] = Some(vertices.len());
                vertices.push(a.head);
            }
        }
    }
    if !via.is_empty() || vertices.len() != 1 {
        return Err(LayeredError::NotClosed);
    }
    Ok(cycles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::ArcId;
    use crate::residual::{build_residual, CostMode, Orientation, ResidualArc};
    use crate::solution::normalize;

    fn arc(id: u32, tail: usize, head: usize, cost: i64, delay: i64, rev: bool) -> ResidualArc {
        ResidualArc {
            origin: ArcId(id),
            orientation: if rev { Orientation::Reversed } else { Orientation::Forward },
            tail,
            head,
            cost,
            delay,
        }
    }

    fn i4_residual() -> ResidualGraph {
        let inst = crate::residual::tests::i4();
        let sol = normalize(&inst, [1, 2, 3, 4].map(ArcId)).unwrap();
        build_residual(&inst, &sol, CostMode::Zero).unwrap()
    }

    #[test]
    fn node_count_is_n_times_layers() {
        let h = build_layered(&i4_residual(), 5, 10).unwrap();
        assert_eq!(h.node_count(), 60);
        assert!(h.layer_equation_holds());
        assert_eq!(build_layered(&i4_residual(), 5, 0).unwrap_err(), LayeredError::NoLayers);
    }

    #[test]
    fn image_arcs_of_cost_two() {
        let rg = ResidualGraph::from_arcs(2, vec![arc(1, 0, 1, 2, 1, false)], CostMode::Zero, 1)
            .unwrap();
        let h = build_layered(&rg, 0, 6).unwrap();
        let images: Vec<(usize, usize)> = h
            .arcs()
            .iter()
            .filter(|a| matches!(a.kind, LayeredArcKind::Image(_)))
            .map(|a| (h.node(a.from).layer, h.node(a.to).layer))
            .collect();
        assert_eq!(images, vec![(1, 3), (2, 4), (3, 5), (4, 6)]);
        let backward = h.arcs().iter().filter(|a| a.kind == LayeredArcKind::Backward).count();
        assert_eq!(backward, 5);
    }

    #[test]
    fn zero_cost_arcs_stay_in_layer() {
        let rg =
            ResidualGraph::from_arcs(2, vec![arc(1, 1, 0, 0, -4, true)], CostMode::Zero, 1).unwrap();
        let h = build_layered(&rg, 0, 3).unwrap();
        let images: Vec<(usize, usize)> = h
            .arcs()
            .iter()
            .filter(|a| matches!(a.kind, LayeredArcKind::Image(_)))
            .map(|a| (h.node(a.from).layer, h.node(a.to).layer))
            .collect();
        assert_eq!(images, vec![(1, 1), (2, 2), (3, 3)]);
    }

    /// Figure-eight through `v = 0`: loop A = 0 -> 1 -> 0 (cost 4, delay -3) and
    /// loop B = 0 -> 2 -> 0 (cost 6, delay -1).
    fn figure_eight() -> ResidualGraph {
        ResidualGraph::from_arcs(
            3,
            vec![
                arc(1, 0, 1, 4, 1, false),
                arc(2, 1, 0, 0, -4, true),
                arc(3, 0, 2, 6, 2, false),
                arc(4, 2, 0, 0, -3, true),
            ],
            CostMode::Zero,
            1,
        )
        .unwrap()
    }

    #[test]
    fn figure_eight_decomposes_into_two_cycles() {
        let rg = figure_eight();
        let walk = ClosedWalk { start: 0, arcs: vec![0, 1, 2, 3], cost: 10, delay: -4 };
        let cycles = decompose_walk(&rg, &walk).unwrap();
        assert_eq!(cycles.len(), 2);
        let mut arcs: Vec<usize> = cycles.iter().flat_map(|c| c.indices()).collect();
        arcs.sort();
        assert_eq!(arcs, vec![0, 1, 2, 3]);
        let ratios: Vec<_> = cycles.iter().map(|c| c.ratio.clone()).collect();
        assert_eq!(ratios, vec![crate::ratio(-3, 4), crate::ratio(-1, 6)]);
        let walk_ratio = crate::ratio(walk.delay, walk.cost);
        assert!(ratios.iter().min().unwrap() < &walk_ratio);
    }

    #[test]
    fn simple_walk_is_single_cycle() {
        let rg = figure_eight();
        let walk = ClosedWalk { start: 1, arcs: vec![1, 0], cost: 4, delay: -3 };
        let cycles = decompose_walk(&rg, &walk).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].signed_ids(), vec![-2, 1]);
    }

    #[test]
    fn projection_revisiting_a_vertex() {
        // Walk 0 -> 3 -> 4 -> 3 -> 5 -> 0 enters u = 3 at layers 2 and 3.
        // Vertices 1, 2 and 6 only carry unrelated arcs.
        let rg = ResidualGraph::from_arcs(
            7,
            vec![
                arc(1, 0, 3, 1, 1, false),
                arc(2, 3, 4, 1, 1, false),
                arc(3, 4, 3, 0, -5, true),
                arc(4, 3, 5, 1, 1, false),
                arc(5, 5, 0, 0, -5, true),
                arc(6, 1, 6, 1, 1, false),
                arc(7, 2, 1, 1, 1, false),
            ],
            CostMode::Zero,
            1,
        )
        .unwrap();
        let h = build_layered(&rg, 0, 5).unwrap();
        let pick = |e: usize, layer: usize| {
            (0..h.arcs().len())
                .find(|&i| {
                    h.arcs()[i].kind == LayeredArcKind::Image(e)
                        && h.node(h.arcs()[i].from).layer == layer
                })
                .unwrap()
        };
        let back = (0..h.arcs().len())
            .find(|&i| {
                h.arcs()[i].kind == LayeredArcKind::Backward && h.node(h.arcs()[i].from).layer == 4
            })
            .unwrap();
        let cycle = vec![pick(0, 1), pick(1, 2), pick(2, 3), pick(3, 3), pick(4, 4), back];
        assert_eq!(h.backward_count(&cycle), 1);
        let walk = project_walk(&h, &rg, &cycle).unwrap();
        assert_eq!(walk.arcs, vec![0, 1, 2, 3, 4]);
        assert_eq!((walk.cost, walk.delay), h.weight(&cycle));
        let visits_u = walk.arcs.iter().filter(|&&e| rg.arc(e).head == 3).count();
        assert_eq!(visits_u, 2);
        let parts = decompose_walk(&rg, &walk).unwrap();
        assert_eq!(parts.len(), 2);

        assert_eq!(
            project_walk(&h, &rg, &cycle[..5]).unwrap_err(),
            LayeredError::BackwardArcs(0)
        );
    }
}
