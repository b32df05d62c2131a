//! Layout quality measures: crossings, backward edges, model-order inversions
//! and stability between two layouts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::crossmin::LayerOrders;
use crate::exec::{self, Execution};
use crate::geometry::LayoutResult;
use crate::layering::{LEdge, LayeredGraph};

/// Number of pairs `i < j` with `seq[i] > seq[j]` (merge sort, O(n log n)).
pub fn inversions<T: Ord + Copy>(seq: &[T]) -> usize {
    fn sort_count<T: Ord + Copy>(v: &mut [T], buf: &mut Vec<T>) -> usize {
        let n = v.len();
        if n < 2 {
            return 0;
        }
        let mid = n / 2;
        let mut count = sort_count(&mut v[..mid], buf) + sort_count(&mut v[mid..], buf);
        buf.clear();
        let (mut i, mut j) = (0, mid);
        while i < mid && j < n {
            if v[j] < v[i] {
                count += mid - i;
                buf.push(v[j]);
                j += 1;
            } else {
                buf.push(v[i]);
                i += 1;
            }
        }
        buf.extend_from_slice(&v[i..mid]);
        buf.extend_from_slice(&v[j..n]);
        v.copy_from_slice(buf);
        count
    }
    let mut v = seq.to_vec();
    sort_count(&mut v, &mut Vec::with_capacity(seq.len()))
}

/// Fenwick tree over `0..n`.
struct Fenwick(Vec<usize>);

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick(vec![0; n + 1])
    }

    fn add(&mut self, i: usize) {
        let mut i = i + 1;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of inserted values `< i`.
    fn prefix(&self, i: usize) -> usize {
        let mut i = i;
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Position of an endpoint in its layer, refined by the rank of the port it uses.
pub(crate) fn endpoint_key(orders: &LayerOrders, ranks: &[Vec<usize>], lg: &LayeredGraph, node: usize, port: Option<usize>) -> (usize, usize) {
    let rank = match (lg.nodes[node].real(), port) {
        (Some(v), Some(p)) => ranks[v][p],
        _ => 0,
    };
    (orders.position[node], rank)
}

/// Crossings between `layer` and `layer + 1`. Segments are sorted by their upper
/// endpoint; a pair crosses iff the lower endpoints appear strictly inverted.
fn crossings_below(lg: &LayeredGraph, orders: &LayerOrders, ranks: &[Vec<usize>], layer: usize) -> usize {
    let segs: Vec<&LEdge> = lg.segments_below(layer).collect();
    if segs.len() < 2 {
        return 0;
    }
    let mut pairs: Vec<((usize, usize), (usize, usize))> = segs
        .iter()
        .map(|s| {
            (
                endpoint_key(orders, ranks, lg, s.source, s.source_port),
                endpoint_key(orders, ranks, lg, s.target, s.target_port),
            )
        })
        .collect();
    pairs.sort();
    let mut lower: Vec<(usize, usize)> = pairs.iter().map(|p| p.1).collect();
    lower.sort();
    lower.dedup();
    let rank_of = |k: &(usize, usize)| lower.binary_search(k).unwrap();

    let mut tree = Fenwick::new(lower.len());
    let mut inserted = 0;
    let mut count = 0;
    // group by identical upper key: those never cross each other
    let mut i = 0;
    while i < pairs.len() {
        let mut j = i;
        while j < pairs.len() && pairs[j].0 == pairs[i].0 {
            let r = rank_of(&pairs[j].1);
            count += inserted - tree.prefix(r + 1);
            j += 1;
        }
        for p in &pairs[i..j] {
            tree.add(rank_of(&p.1));
            inserted += 1;
        }
        i = j;
    }
    count
}

/// Total crossings over all adjacent layer pairs, port order included.
pub fn count_crossings(lg: &LayeredGraph, orders: &LayerOrders) -> usize {
    count_crossings_with(Execution::Sequential, lg, orders)
}

pub fn count_crossings_with(exec: Execution, lg: &LayeredGraph, orders: &LayerOrders) -> usize {
    let ranks = orders.port_ranks(lg);
    let pairs = lg.layer_count().saturating_sub(1);
    exec::map_range(exec, 0..pairs, |l| crossings_below(lg, orders, &ranks, l)).into_iter().sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InversionScope {
    /// Real nodes sharing a layer (and a group when restricted).
    NodesInLayer { group_restricted: bool },
    /// Edges leaving or entering the same side of a node.
    EdgesAtPort,
    /// All edges, ordered by where they start in the drawing.
    GlobalEdges,
}

/// (node position, port rank) of one segment end.
type Slot = (usize, usize);

pub fn count_inversions(lg: &LayeredGraph, orders: &LayerOrders, scope: InversionScope) -> usize {
    match scope {
        InversionScope::NodesInLayer { group_restricted } => orders
            .layers
            .iter()
            .map(|layer| {
                let mut by_group: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for &v in layer.iter().filter(|&&v| !lg.nodes[v].is_dummy()) {
                    let g = if group_restricted { lg.nodes[v].group } else { 0 };
                    by_group.entry(g).or_default().push(lg.nodes[v].model_order);
                }
                by_group.values().map(|s| inversions(s)).sum::<usize>()
            })
            .sum(),
        InversionScope::EdgesAtPort => {
            let g = &lg.graph;
            let mut total = 0;
            for (v, node) in g.nodes.iter().enumerate() {
                for side_ports in orders.ports[v].sides() {
                    let mut seq = Vec::new();
                    for &p in side_ports {
                        let id = &node.ports[p].id;
                        let mut orders_here: Vec<usize> = g
                            .edges
                            .iter()
                            .filter(|e| {
                                (e.source == node.id && e.source_port.as_ref() == Some(id))
                                    || (e.target == node.id && e.target_port.as_ref() == Some(id))
                            })
                            .map(|e| e.model_order)
                            .collect();
                        orders_here.sort();
                        orders_here.dedup();
                        seq.extend(orders_here);
                    }
                    total += inversions(&seq);
                }
            }
            total
        }
        InversionScope::GlobalEdges => {
            let ranks = orders.port_ranks(lg);
            let mut firsts: BTreeMap<usize, (usize, Slot, Slot)> = BTreeMap::new();
            for seg in &lg.edges {
                if lg.nodes[seg.source].is_dummy() {
                    continue;
                }
                let key = (
                    lg.nodes[seg.source].layer,
                    endpoint_key(orders, &ranks, lg, seg.source, seg.source_port),
                    endpoint_key(orders, &ranks, lg, seg.target, seg.target_port),
                );
                firsts.insert(seg.edge, key);
            }
            let mut placed: Vec<_> = firsts.into_iter().map(|(e, k)| (k, lg.graph.edges[e].model_order)).collect();
            placed.sort();
            inversions(&placed.iter().map(|p| p.1).collect::<Vec<_>>())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityDistance {
    /// Mean displacement of shared node centers after moving both drawings to a common origin.
    pub displacement: f64,
    /// Shared node pairs co-located in a layer in both layouts whose relative order flipped.
    pub order_flips: usize,
}

/// Compares two layouts through a node-id correspondence (`left id → right id`).
/// `None` when no node is shared.
pub fn stability_distance(left: &LayoutResult, right: &LayoutResult, correspondence: &BTreeMap<String, String>) -> Option<StabilityDistance> {
    let lindex: BTreeMap<&str, usize> = left.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let rindex: BTreeMap<&str, usize> = right.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let shared: Vec<(usize, usize)> = correspondence
        .iter()
        .filter_map(|(a, b)| Some((*lindex.get(a.as_str())?, *rindex.get(b.as_str())?)))
        .collect();
    if shared.is_empty() {
        return None;
    }
    let (lx, ly) = (left.canvas.x, left.canvas.y);
    let (rx, ry) = (right.canvas.x, right.canvas.y);
    let total: f64 = shared
        .iter()
        .map(|&(a, b)| {
            let (na, nb) = (&left.nodes[a], &right.nodes[b]);
            let dx = (na.x + na.width / 2.0 - lx) - (nb.x + nb.width / 2.0 - rx);
            let dy = (na.y + na.height / 2.0 - ly) - (nb.y + nb.height / 2.0 - ry);
            dx.hypot(dy)
        })
        .sum();

    let mut flips = 0;
    for (i, &(a1, b1)) in shared.iter().enumerate() {
        for &(a2, b2) in &shared[i + 1..] {
            let (l1, l2, r1, r2) = (&left.nodes[a1], &left.nodes[a2], &right.nodes[b1], &right.nodes[b2]);
            if l1.layer == l2.layer && r1.layer == r2.layer && (l1.position < l2.position) != (r1.position < r2.position) {
                flips += 1;
            }
        }
    }
    Some(StabilityDistance { displacement: total / shared.len() as f64, order_flips: flips })
}

/// Identity correspondence over ids present in both layouts.
pub fn shared_ids(left: &LayoutResult, right: &LayoutResult) -> BTreeMap<String, String> {
    let ids: std::collections::BTreeSet<&str> = right.nodes.iter().map(|n| n.id.as_str()).collect();
    left.nodes.iter().filter(|n| ids.contains(n.id.as_str())).map(|n| (n.id.clone(), n.id.clone())).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub crossings: usize,
    pub backward_edges: usize,
    pub node_inversions: usize,
    pub edge_inversions: usize,
    pub layer_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability_distance: Option<StabilityDistance>,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width two-column table.
    pub fn to_table(&self) -> String {
        let mut rows = vec![
            ("crossings", self.crossings.to_string()),
            ("backward edges", self.backward_edges.to_string()),
            ("node inversions", self.node_inversions.to_string()),
            ("edge inversions", self.edge_inversions.to_string()),
            ("layers", self.layer_count.to_string()),
        ];
        if let Some(s) = &self.stability_distance {
            rows.push(("displacement", format!("{:.3}", s.displacement)));
            rows.push(("order flips", s.order_flips.to_string()));
        }
        let mut out = String::new();
        let _ = writeln!(out, "{:<18} {:>12}", "metric", "value");
        let _ = writeln!(out, "{:-<18} {:->12}", "", "");
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<18} {v:>12}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossmin::{order_ports, CrossMinOptions};
    use crate::graph::{synthesize_implicit_ports, Graph};
    use crate::layering::{insert_dummies, Layering};
    use proptest::prelude::*;

    fn brute_inversions(seq: &[usize]) -> usize {
        let mut c = 0;
        for i in 0..seq.len() {
            for j in i + 1..seq.len() {
                if seq[i] > seq[j] {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(inversions(&[0, 1, 2]), 0);
        assert_eq!(inversions(&[1, 0]), 1);
        assert_eq!(inversions(&[4, 3, 2, 1, 0]), 10);
    }

    /// Two layers with `top` and `bottom` nodes, given in-layer orders.
    fn bilayer(top: usize, bottom: usize, edges: &[(usize, usize)], top_order: &[usize], bottom_order: &[usize]) -> (LayeredGraph, LayerOrders) {
        let mut g = Graph::default();
        for i in 0..top + bottom {
            g.add_node(format!("n{i}"));
        }
        for &(s, t) in edges {
            g.add_edge(&format!("n{s}"), &format!("n{}", top + t));
        }
        let g = synthesize_implicit_ports(&g);
        let layering = Layering { layer_of: (0..top + bottom).map(|i| usize::from(i >= top)).collect() };
        let lg = insert_dummies(&g, &layering).unwrap();
        let layers = vec![top_order.to_vec(), bottom_order.iter().map(|&b| b + top).collect()];
        let mut orders = LayerOrders::from_layers(&lg, layers);
        orders.ports = order_ports(&lg, &orders, &CrossMinOptions::default());
        (lg, orders)
    }

    #[test]
    fn parallel_edges_do_not_cross() {
        let (lg, o) = bilayer(2, 2, &[(0, 0), (1, 1)], &[0, 1], &[0, 1]);
        assert_eq!(count_crossings(&lg, &o), 0);
    }

    #[test]
    fn interleaved_k22_crosses_once() {
        let (lg, o) = bilayer(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)], &[0, 1], &[0, 1]);
        assert_eq!(count_crossings(&lg, &o), 1);
        let (lg, o) = bilayer(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)], &[1, 0], &[0, 1]);
        assert_eq!(count_crossings(&lg, &o), 1);
    }

    #[test]
    fn node_inversions_respect_groups() {
        let (mut lg, _) = bilayer(3, 0, &[], &[0, 1, 2], &[]);
        let orders = LayerOrders::from_layers(&lg, vec![vec![2, 1, 0], vec![]]);
        assert_eq!(count_inversions(&lg, &orders, InversionScope::NodesInLayer { group_restricted: false }), 3);
        lg.nodes[0].group = 1;
        // only n1/n2 remain comparable
        assert_eq!(count_inversions(&lg, &orders, InversionScope::NodesInLayer { group_restricted: true }), 1);
    }

    proptest! {
        #[test]
        fn merge_count_matches_brute_force(seq in proptest::collection::vec(0usize..20, 0..40)) {
            prop_assert_eq!(inversions(&seq), brute_inversions(&seq));
        }

        #[test]
        fn sweep_count_matches_pair_formula(
            top in 1usize..7, bottom in 1usize..7,
            raw in proptest::collection::vec((0usize..7, 0usize..7), 0..20),
            seed in 0u64..1000,
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let edges: Vec<_> = raw.into_iter().map(|(a, b)| (a % top, b % bottom)).collect();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut to: Vec<usize> = (0..top).collect();
            let mut bo: Vec<usize> = (0..bottom).collect();
            to.shuffle(&mut rng);
            bo.shuffle(&mut rng);
            let (lg, o) = bilayer(top, bottom, &edges, &to, &bo);
            let ranks = o.port_ranks(&lg);
            let key = |n, p| endpoint_key(&o, &ranks, &lg, n, p);
            let mut brute = 0usize;
            for (i, a) in lg.edges.iter().enumerate() {
                for b in &lg.edges[i + 1..] {
                    let (sa, sb) = (key(a.source, a.source_port), key(b.source, b.source_port));
                    let (ta, tb) = (key(a.target, a.target_port), key(b.target, b.target_port));
                    if (sa < sb && ta > tb) || (sa > sb && ta < tb) {
                        brute += 1;
                    }
                }
            }
            prop_assert_eq!(count_crossings(&lg, &o), brute);
            prop_assert_eq!(count_crossings_with(Execution::Parallel, &lg, &o), brute);
        }
    }
}
