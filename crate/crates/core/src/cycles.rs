//! Cycle breaking: pick edges to point against the layout direction.
//!
//! Every strategy only flips `Edge::reversed`; endpoints stay in their declared
//! orientation and later phases read [`layout_endpoints`]. Self-loops and
//! interface edges are never considered.

use std::collections::BTreeSet;

use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::graph::{Edge, Graph};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleBreakStrategy {
    /// Source/sink peeling that keeps the backward edge count low.
    Greedy,
    /// Depth-first search visiting nodes in model order.
    DepthFirstMo,
    /// Every edge against node model order is reversed.
    #[default]
    StrictMo,
    /// Model order applied inside each strongly connected component.
    SccMo,
}

impl CycleBreakStrategy {
    pub const ALL: [CycleBreakStrategy; 4] =
        [CycleBreakStrategy::Greedy, CycleBreakStrategy::DepthFirstMo, CycleBreakStrategy::StrictMo, CycleBreakStrategy::SccMo];

    pub fn as_str(self) -> &'static str {
        match self {
            CycleBreakStrategy::Greedy => "greedy",
            CycleBreakStrategy::DepthFirstMo => "depth-first-mo",
            CycleBreakStrategy::StrictMo => "strict-mo",
            CycleBreakStrategy::SccMo => "scc-mo",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReversalSet {
    pub reversed: BTreeSet<String>,
    /// Input graph with `reversed` flags set.
    pub graph: Graph,
}

/// Endpoints in layout orientation (swapped for reversed edges).
pub fn layout_endpoints(edge: &Edge) -> (&str, &str) {
    if edge.reversed {
        (&edge.target, &edge.source)
    } else {
        (&edge.source, &edge.target)
    }
}

/// Edges that take part in cycle breaking, as (edge index, source, target) over node indices.
fn ordering_edges(graph: &Graph) -> Vec<(usize, usize, usize)> {
    let index = graph.index_map();
    graph
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_self_loop() && !e.touches_parent())
        .filter_map(|(i, e)| Some((i, *index.get(e.source.as_str())?, *index.get(e.target.as_str())?)))
        .collect()
}

fn finish(graph: &Graph, reversed_edges: impl IntoIterator<Item = usize>) -> ReversalSet {
    let mut out = graph.clone();
    let mut reversed = BTreeSet::new();
    for e in reversed_edges {
        out.edges[e].reversed = true;
        reversed.insert(out.edges[e].id.clone());
    }
    ReversalSet { reversed, graph: out }
}

pub fn break_cycles(graph: &Graph, strategy: CycleBreakStrategy) -> ReversalSet {
    match strategy {
        CycleBreakStrategy::Greedy => greedy(graph),
        CycleBreakStrategy::DepthFirstMo => depth_first_model_order(graph),
        CycleBreakStrategy::StrictMo => strict_model_order(graph),
        CycleBreakStrategy::SccMo => scc_model_order(graph),
    }
}

pub fn strict_model_order(graph: &Graph) -> ReversalSet {
    let mo = |n: usize| graph.nodes[n].model_order;
    let rev = ordering_edges(graph).into_iter().filter(|&(_, s, t)| mo(s) > mo(t)).map(|(e, _, _)| e);
    finish(graph, rev.collect::<Vec<_>>())
}

pub fn depth_first_model_order(graph: &Graph) -> ReversalSet {
    let n = graph.nodes.len();
    let edges = ordering_edges(graph);
    let mo = |v: usize| graph.nodes[v].model_order;

    let mut out_adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut in_degree = vec![0usize; n];
    for &(e, s, t) in &edges {
        out_adj[s].push((e, t));
        in_degree[t] += 1;
    }
    for adj in &mut out_adj {
        adj.sort_by_key(|&(e, t)| (mo(t), graph.edges[e].model_order));
    }

    let mut roots: Vec<usize> = (0..n).collect();
    roots.sort_by_key(|&v| (in_degree[v] > 0, mo(v)));

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        OnStack,
        Done,
    }
    let mut mark = vec![Mark::New; n];
    let mut reversed = Vec::new();
    for root in roots {
        if mark[root] != Mark::New {
            continue;
        }
        // (node, next adjacency slot)
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::OnStack;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&(e, t)) = out_adj[v].get(*next) {
                *next += 1;
                match mark[t] {
                    Mark::OnStack => reversed.push(e),
                    Mark::New => {
                        mark[t] = Mark::OnStack;
                        stack.push((t, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                mark[v] = Mark::Done;
                stack.pop();
            }
        }
    }
    finish(graph, reversed)
}

pub fn scc_model_order(graph: &Graph) -> ReversalSet {
    let n = graph.nodes.len();
    let mo = |v: usize| graph.nodes[v].model_order;
    let mut reversed = BTreeSet::new();
    // edges still oriented as declared, minus reversals so far
    let mut active: Vec<(usize, usize, usize)> = ordering_edges(graph);
    loop {
        let mut pg = DiGraph::<(), usize>::with_capacity(n, active.len());
        let ids: Vec<_> = (0..n).map(|_| pg.add_node(())).collect();
        for &(e, s, t) in &active {
            pg.add_edge(ids[s], ids[t], e);
        }
        let mut component = vec![0usize; n];
        for (c, scc) in petgraph::algo::tarjan_scc(&pg).into_iter().enumerate() {
            for v in scc {
                component[v.index()] = c;
            }
        }
        let mut changed = false;
        for edge in active.iter_mut() {
            let (e, s, t) = *edge;
            if component[s] == component[t] && mo(s) > mo(t) {
                reversed.insert(e);
                *edge = (e, t, s);
                changed = true;
            }
        }
        // orienting a component by a total order leaves it acyclic, so this
        // runs at most twice
        if !changed {
            break;
        }
    }
    finish(graph, reversed)
}

/// Eades–Lin–Smyth peeling. Ties pick the smallest node model order.
pub fn greedy(graph: &Graph) -> ReversalSet {
    let n = graph.nodes.len();
    let edges = ordering_edges(graph);
    let mut outs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut ins: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut out_deg = vec![0isize; n];
    let mut in_deg = vec![0isize; n];
    for &(_, s, t) in &edges {
        outs[s].push(t);
        ins[t].push(s);
        out_deg[s] += 1;
        in_deg[t] += 1;
    }
    let mut by_order: Vec<usize> = (0..n).collect();
    by_order.sort_by_key(|&v| graph.nodes[v].model_order);

    let mut removed = vec![false; n];
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::new();
    let mut remaining = n;

    let remove = |v: usize, removed: &mut Vec<bool>, out_deg: &mut Vec<isize>, in_deg: &mut Vec<isize>| {
        removed[v] = true;
        for &t in &outs[v] {
            in_deg[t] -= 1;
        }
        for &s in &ins[v] {
            out_deg[s] -= 1;
        }
    };

    while remaining > 0 {
        let mut progress = true;
        while progress {
            progress = false;
            for &v in &by_order {
                if !removed[v] && out_deg[v] == 0 {
                    remove(v, &mut removed, &mut out_deg, &mut in_deg);
                    right.push(v);
                    remaining -= 1;
                    progress = true;
                }
            }
            for &v in &by_order {
                if !removed[v] && in_deg[v] == 0 {
                    remove(v, &mut removed, &mut out_deg, &mut in_deg);
                    left.push(v);
                    remaining -= 1;
                    progress = true;
                }
            }
        }
        if remaining == 0 {
            break;
        }
        let pick = by_order
            .iter()
            .copied()
            .filter(|&v| !removed[v])
            .max_by_key(|&v| (out_deg[v] - in_deg[v], std::cmp::Reverse(graph.nodes[v].model_order)))
            .expect("remaining > 0");
        remove(pick, &mut removed, &mut out_deg, &mut in_deg);
        left.push(pick);
        remaining -= 1;
    }

    let mut rank = vec![0usize; n];
    for (i, &v) in left.iter().chain(right.iter().rev()).enumerate() {
        rank[v] = i;
    }
    let rev: Vec<usize> = edges.into_iter().filter(|&(_, s, t)| rank[s] > rank[t]).map(|(e, _, _)| e).collect();
    finish(graph, rev)
}

/// Kahn's algorithm over layout-oriented edges; `true` if no cycle remains.
pub fn is_acyclic(graph: &Graph) -> bool {
    let index = graph.index_map();
    let n = graph.nodes.len();
    let mut adj = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for e in graph.edges.iter().filter(|e| !e.is_self_loop() && !e.touches_parent()) {
        let (s, t) = layout_endpoints(e);
        let (s, t) = (index[s], index[t]);
        adj[s].push(t);
        indeg[t] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &t in &adj[v] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                queue.push(t);
            }
        }
    }
    seen == n
}
