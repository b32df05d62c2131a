//! Layer assignment and dummy insertion.

use std::collections::{BTreeMap, BTreeSet};

use crate::cycles::layout_endpoints;
use crate::graph::{Graph, Side, PARENT};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LayeringError {
    #[error("graph still contains a cycle through `{0}`")]
    Cycle(String),
    #[error("edge `{edge}` spans {span} layers; every edge must point to a later layer")]
    InvalidSpan { edge: String, span: i64 },
    #[error("layering covers {got} nodes, graph has {expected}")]
    SizeMismatch { expected: usize, got: usize },
}

/// Layer index per real node (indexed like `Graph::nodes`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layering {
    pub layer_of: Vec<usize>,
}

impl Layering {
    pub fn layer_count(&self) -> usize {
        self.layer_of.iter().map(|&l| l + 1).max().unwrap_or(0)
    }

    /// Node indices per layer, ascending.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut layers = vec![Vec::new(); self.layer_count()];
        for (v, &l) in self.layer_of.iter().enumerate() {
            layers[l].push(v);
        }
        layers
    }
}

/// Layout-oriented edges between distinct real nodes: (edge index, source, target).
pub(crate) fn layout_edges(graph: &Graph) -> Vec<(usize, usize, usize)> {
    let index = graph.index_map();
    graph
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_self_loop() && !e.touches_parent())
        .map(|(i, e)| {
            let (s, t) = layout_endpoints(e);
            (i, index[s], index[t])
        })
        .collect()
}

/// Longest-path layering from the sources, followed by one pull-up pass that
/// moves predecessor-free nodes next to their nearest successor.
pub fn assign_layers(graph: &Graph) -> Result<Layering, LayeringError> {
    let n = graph.nodes.len();
    let edges = layout_edges(graph);
    let mut succ = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(_, s, t) in &edges {
        succ[s].push(t);
        indeg[t] += 1;
    }
    let mut ready: BTreeSet<(usize, usize)> =
        (0..n).filter(|&v| indeg[v] == 0).map(|v| (graph.nodes[v].model_order, v)).collect();
    let mut layer = vec![0usize; n];
    let mut topo = Vec::with_capacity(n);
    while let Some((_, v)) = ready.pop_first() {
        topo.push(v);
        for &t in &succ[v] {
            layer[t] = layer[t].max(layer[v] + 1);
            indeg[t] -= 1;
            if indeg[t] == 0 {
                ready.insert((graph.nodes[t].model_order, t));
            }
        }
    }
    if topo.len() != n {
        let stuck = (0..n).find(|&v| indeg[v] > 0).unwrap();
        return Err(LayeringError::Cycle(graph.nodes[stuck].id.clone()));
    }

    let mut has_pred = vec![false; n];
    for &(_, _, t) in &edges {
        has_pred[t] = true;
    }
    for v in 0..n {
        if !has_pred[v] {
            if let Some(min_succ) = succ[v].iter().map(|&t| layer[t]).min() {
                layer[v] = min_succ - 1;
            }
        }
    }
    Ok(Layering { layer_of: layer })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LNodeKind {
    /// Index into `Graph::nodes`.
    Real(usize),
    /// Index into `Graph::edges` of the owning long edge.
    Dummy(usize),
}

/// A node of the layered graph: a real node or a dummy on a long edge.
#[derive(Clone, Debug, PartialEq)]
pub struct LNode {
    pub kind: LNodeKind,
    pub id: String,
    pub layer: usize,
    /// Node model order for real nodes, owner edge model order for dummies.
    pub model_order: usize,
    /// Model order of the chain's layout source node (dummies), or the node's own.
    pub source_order: usize,
    pub group: usize,
    /// Dummy belonging to a reversed edge.
    pub backward: bool,
}

impl LNode {
    pub fn is_dummy(&self) -> bool {
        matches!(self.kind, LNodeKind::Dummy(_))
    }

    pub fn real(&self) -> Option<usize> {
        match self.kind {
            LNodeKind::Real(v) => Some(v),
            LNodeKind::Dummy(_) => None,
        }
    }
}

/// A unit-span segment between consecutive layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LEdge {
    pub source: usize,
    pub target: usize,
    /// Port index on the source node when it is real.
    pub source_port: Option<usize>,
    pub target_port: Option<usize>,
    /// Owning graph edge.
    pub edge: usize,
    pub backward: bool,
}

/// Graph after layering and dummy insertion. Real nodes keep their graph
/// index; dummies follow.
#[derive(Clone, Debug)]
pub struct LayeredGraph {
    pub graph: Graph,
    pub nodes: Vec<LNode>,
    pub edges: Vec<LEdge>,
    /// Layer membership in node index order (not yet an in-layer order).
    pub layers: Vec<Vec<usize>>,
    /// Dummy chain of each long edge, in layout direction.
    pub chains: BTreeMap<usize, Vec<usize>>,
    /// Side of every port, indexed `[real node][port]`.
    pub port_sides: Vec<Vec<Side>>,
    /// Predetermined port order (port indices) for nodes whose interface is fixed.
    pub interface_order: Vec<Option<Vec<usize>>>,
    pub(crate) incoming: Vec<Vec<usize>>,
    pub(crate) outgoing: Vec<Vec<usize>>,
}

impl LayeredGraph {
    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Every segment crossing from `layer` to `layer + 1`.
    pub fn segments_below(&self, layer: usize) -> impl Iterator<Item = &LEdge> {
        self.edges.iter().filter(move |e| self.nodes[e.source].layer == layer)
    }

    pub fn incoming(&self, v: usize) -> impl Iterator<Item = &LEdge> {
        self.incoming[v].iter().map(|&e| &self.edges[e])
    }

    pub fn outgoing(&self, v: usize) -> impl Iterator<Item = &LEdge> {
        self.outgoing[v].iter().map(|&e| &self.edges[e])
    }

    pub fn real_count(&self) -> usize {
        self.graph.nodes.len()
    }

    /// Chains collapsed back to one (edge, layout source, layout target) triple per edge.
    pub fn fused_edges(&self) -> Vec<(usize, usize, usize)> {
        let mut by_edge: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for seg in &self.edges {
            let entry = by_edge.entry(seg.edge).or_insert((usize::MAX, usize::MAX));
            if !self.nodes[seg.source].is_dummy() {
                entry.0 = seg.source;
            }
            if !self.nodes[seg.target].is_dummy() {
                entry.1 = seg.target;
            }
        }
        by_edge.into_iter().map(|(e, (s, t))| (e, s, t)).collect()
    }

    /// Builds from an explicit layering; fails if an edge does not point to a later layer.
    pub fn from_layering(graph: &Graph, layering: &Layering) -> Result<Self, LayeringError> {
        insert_dummies(graph, layering)
    }
}

/// Replaces every edge spanning `k > 1` layers by `k - 1` dummies and `k` unit segments.
pub fn insert_dummies(graph: &Graph, layering: &Layering) -> Result<LayeredGraph, LayeringError> {
    if layering.layer_of.len() != graph.nodes.len() {
        return Err(LayeringError::SizeMismatch { expected: graph.nodes.len(), got: layering.layer_of.len() });
    }
    let mut nodes: Vec<LNode> = graph
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| LNode {
            kind: LNodeKind::Real(i),
            id: n.id.clone(),
            layer: layering.layer_of[i],
            model_order: n.model_order,
            source_order: n.model_order,
            group: n.group,
            backward: false,
        })
        .collect();
    let mut edges = Vec::new();
    let mut chains = BTreeMap::new();

    let mut order = layout_edges(graph);
    order.sort_by_key(|&(e, _, _)| graph.edges[e].model_order);
    for (e, s, t) in order {
        let edge = &graph.edges[e];
        let span = layering.layer_of[t] as i64 - layering.layer_of[s] as i64;
        if span < 1 {
            return Err(LayeringError::InvalidSpan { edge: edge.id.clone(), span });
        }
        let (sp, tp) = if edge.reversed { (&edge.target_port, &edge.source_port) } else { (&edge.source_port, &edge.target_port) };
        let sp = sp.as_ref().and_then(|p| graph.nodes[s].port_index(p));
        let tp = tp.as_ref().and_then(|p| graph.nodes[t].port_index(p));
        let mut prev = s;
        let mut chain = Vec::new();
        for k in 1..span as usize {
            let d = nodes.len();
            nodes.push(LNode {
                kind: LNodeKind::Dummy(e),
                id: format!("{}#{k}", edge.id),
                layer: layering.layer_of[s] + k,
                model_order: edge.model_order,
                source_order: graph.nodes[s].model_order,
                group: graph.nodes[s].group,
                backward: edge.reversed,
            });
            edges.push(LEdge {
                source: prev,
                target: d,
                source_port: if prev == s { sp } else { None },
                target_port: None,
                edge: e,
                backward: edge.reversed,
            });
            chain.push(d);
            prev = d;
        }
        edges.push(LEdge {
            source: prev,
            target: t,
            source_port: if prev == s { sp } else { None },
            target_port: tp,
            edge: e,
            backward: edge.reversed,
        });
        if !chain.is_empty() {
            chains.insert(e, chain);
        }
    }

    let mut layers = vec![Vec::new(); layering.layer_count()];
    for (i, n) in nodes.iter().enumerate() {
        layers[n.layer].push(i);
    }
    let mut incoming = vec![Vec::new(); nodes.len()];
    let mut outgoing = vec![Vec::new(); nodes.len()];
    for (i, seg) in edges.iter().enumerate() {
        outgoing[seg.source].push(i);
        incoming[seg.target].push(i);
    }

    Ok(LayeredGraph {
        port_sides: assign_port_sides(graph),
        interface_order: vec![None; graph.nodes.len()],
        graph: graph.clone(),
        nodes,
        edges,
        layers,
        chains,
        incoming,
        outgoing,
    })
}

/// Explicit sides win; otherwise the first incident edge (by model order)
/// decides between the in side, the out side and the free side for self-loops.
fn assign_port_sides(graph: &Graph) -> Vec<Vec<Side>> {
    let dir = graph.direction;
    let index = graph.index_map();
    let mut sides: Vec<Vec<Option<Side>>> = graph.nodes.iter().map(|n| n.ports.iter().map(|p| p.side).collect()).collect();

    let mut claim = |node: usize, port: &Option<String>, side: Side| {
        if let Some(p) = port.as_ref().and_then(|p| graph.nodes[node].port_index(p)) {
            sides[node][p].get_or_insert(side);
        }
    };
    for &e in &graph.edges_by_model_order() {
        let edge = &graph.edges[e];
        if edge.touches_parent() {
            // inner end of an interface edge faces the compound border it leads to
            if edge.target == PARENT && edge.source != PARENT {
                claim(index[edge.source.as_str()], &edge.source_port, dir.out_side());
            } else if edge.source == PARENT && edge.target != PARENT {
                claim(index[edge.target.as_str()], &edge.target_port, dir.in_side());
            }
            continue;
        }
        let (s, t) = (index[edge.source.as_str()], index[edge.target.as_str()]);
        if edge.is_self_loop() {
            claim(s, &edge.source_port, dir.free_side());
            claim(t, &edge.target_port, dir.free_side());
        } else if edge.reversed {
            claim(s, &edge.source_port, dir.in_side());
            claim(t, &edge.target_port, dir.out_side());
        } else {
            claim(s, &edge.source_port, dir.out_side());
            claim(t, &edge.target_port, dir.in_side());
        }
    }
    // compound ports unused at this level: direction of the inner interface edge
    for (v, node) in graph.nodes.iter().enumerate() {
        let Some(child) = &node.children else { continue };
        for edge in &child.edges {
            if edge.target == PARENT {
                claim(v, &edge.target_port, dir.out_side());
            }
            if edge.source == PARENT {
                claim(v, &edge.source_port, dir.in_side());
            }
        }
    }
    sides.into_iter().map(|s| s.into_iter().map(|s| s.unwrap_or(dir.out_side())).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::{break_cycles, CycleBreakStrategy};
    use crate::graph::synthesize_implicit_ports;
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::default();
        for i in 0..n {
            g.add_node(format!("n{i}"));
        }
        for &(s, t) in edges {
            let (s, t) = (format!("n{s}"), format!("n{t}"));
            g.add_edge(&s, &t);
        }
        g
    }

    #[test]
    fn chain_layers() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(assign_layers(&g).unwrap().layer_of, vec![0, 1, 2]);
    }

    #[test]
    fn diamond_layers() {
        let g = graph(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(assign_layers(&g).unwrap().layer_of, vec![0, 1, 1, 2]);
    }

    #[test]
    fn isolated_node_stays_at_zero() {
        let g = graph(4, &[(1, 2), (2, 3)]);
        assert_eq!(assign_layers(&g).unwrap().layer_of, vec![0, 0, 1, 2]);
    }

    #[test]
    fn pull_up_shortens_source_edges() {
        // n3 → n2 only; n2 sits at layer 2
        let g = graph(4, &[(0, 1), (1, 2), (3, 2)]);
        assert_eq!(assign_layers(&g).unwrap().layer_of, vec![0, 1, 2, 1]);
    }

    #[test]
    fn cycle_is_an_error() {
        let g = graph(2, &[(0, 1), (1, 0)]);
        assert!(matches!(assign_layers(&g), Err(LayeringError::Cycle(_))));
    }

    #[test]
    fn long_edge_gets_dummies() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        let l = assign_layers(&g).unwrap();
        let lg = insert_dummies(&g, &l).unwrap();
        assert_eq!(lg.chains[&3].len(), 2);
        assert_eq!(lg.edges.iter().filter(|e| e.edge == 3).count(), 3);
        assert_eq!(lg.edges.iter().filter(|e| e.edge == 0).count(), 1);
        for &d in &lg.chains[&3] {
            assert_eq!(lg.nodes[d].model_order, 3);
            assert_eq!(lg.nodes[d].source_order, 0);
        }
    }

    #[test]
    fn backward_edge_dummies_carry_the_edge_order() {
        // Active(0) → ... → Interrupted(3) and a loop back spanning three layers
        let mut g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        g = break_cycles(&g, CycleBreakStrategy::StrictMo).graph;
        let lg = insert_dummies(&g, &assign_layers(&g).unwrap()).unwrap();
        let chain = &lg.chains[&3];
        assert_eq!(chain.len(), 2);
        assert!(chain.iter().all(|&d| lg.nodes[d].backward && lg.nodes[d].model_order == 3));
        // the chain runs from n0 down to n3 in layout orientation
        assert_eq!(lg.nodes[chain[0]].layer, 1);
    }

    #[test]
    fn port_sides_follow_layout_orientation() {
        let mut g = graph(2, &[(0, 1), (1, 0), (0, 0)]);
        g.direction = crate::graph::Direction::Down;
        g = synthesize_implicit_ports(&break_cycles(&g, CycleBreakStrategy::StrictMo).graph);
        let lg = insert_dummies(&g, &assign_layers(&g).unwrap()).unwrap();
        let side = |node: usize, port: &Option<String>| lg.port_sides[node][g.nodes[node].port_index(port.as_ref().unwrap()).unwrap()];
        // forward n0→n1
        assert_eq!(side(0, &g.edges[0].source_port), Side::South);
        assert_eq!(side(1, &g.edges[0].target_port), Side::North);
        // reversed n1→n0 leaves n0 southward in layout terms
        assert_eq!(side(0, &g.edges[1].target_port), Side::South);
        assert_eq!(side(1, &g.edges[1].source_port), Side::North);
        // self-loop
        assert_eq!(side(0, &g.edges[2].source_port), Side::East);
    }

    fn arb_dag() -> impl Strategy<Value = Graph> {
        (1usize..15).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..40).prop_map(move |pairs| {
                let edges: Vec<_> = pairs.into_iter().filter(|(a, b)| a < b).collect();
                graph(n, &edges)
            })
        })
    }

    proptest! {
        #[test]
        fn layering_respects_edges_and_dummies_fuse_back(g in arb_dag()) {
            let l = assign_layers(&g).unwrap();
            for e in &g.edges {
                let (s, t) = (g.node_index(&e.source).unwrap(), g.node_index(&e.target).unwrap());
                prop_assert!(l.layer_of[t] > l.layer_of[s]);
            }
            // layer count bounded by the longest path
            // edges only go up in index, so one forward scan computes it
            let mut longest = vec![0usize; g.nodes.len()];
            for t in 0..g.nodes.len() {
                for e in &g.edges {
                    let (s, tt) = (g.node_index(&e.source).unwrap(), g.node_index(&e.target).unwrap());
                    if tt == t { longest[t] = longest[t].max(longest[s] + 1); }
                }
            }
            prop_assert!(l.layer_count() <= longest.iter().max().unwrap() + 1);

            let lg = insert_dummies(&g, &l).unwrap();
            for seg in &lg.edges {
                prop_assert_eq!(lg.nodes[seg.target].layer, lg.nodes[seg.source].layer + 1);
            }
            let fused: Vec<_> = lg.fused_edges();
            let mut expected: Vec<_> = g.edges.iter().enumerate()
                .map(|(i, e)| (i, g.node_index(&e.source).unwrap(), g.node_index(&e.target).unwrap()))
                .collect();
            expected.sort();
            prop_assert_eq!(fused, expected);
        }
    }
}
