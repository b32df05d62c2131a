use std::cmp::Ordering;

use super::DummyRule;
use crate::layering::LayeredGraph;

/// Position of `v`'s predecessors in the previous layer under `rule`, `None`
/// for elements without predecessors.
fn predecessor_position(lg: &LayeredGraph, prev_pos: &[usize], v: usize, rule: DummyRule) -> Option<f64> {
    match rule {
        DummyRule::First => lg
            .incoming(v)
            .min_by_key(|s| (lg.graph.edges[s.edge].model_order, s.source))
            .map(|s| prev_pos[s.source] as f64),
        DummyRule::All => {
            let mut p: Vec<usize> = lg.incoming(v).map(|s| prev_pos[s.source]).collect();
            if p.is_empty() {
                return None;
            }
            p.sort_unstable();
            let mid = p.len() / 2;
            Some(if p.len() % 2 == 1 { p[mid] as f64 } else { (p[mid - 1] + p[mid]) as f64 / 2.0 })
        }
    }
}

/// (backward, edge model order) of the first-declared incoming connection.
fn first_connection(lg: &LayeredGraph, v: usize) -> Option<(bool, usize)> {
    lg.incoming(v).map(|s| (s.backward, lg.graph.edges[s.edge].model_order)).min_by_key(|&(_, mo)| mo)
}

/// Orders two elements of one layer where at least one is a dummy.
///
/// Elements are first compared by where they connect to the previous layer
/// (`prev_pos` holds that layer's positions). On a tie the connecting edges
/// decide: forward before backward, then by edge model order. Elements without
/// predecessors fall back to model order, a dummy standing in with its
/// source node's order.
pub fn compare_dummy(lg: &LayeredGraph, prev_pos: &[usize], a: usize, b: usize, rule: DummyRule) -> Ordering {
    let (pa, pb) = (predecessor_position(lg, prev_pos, a, rule), predecessor_position(lg, prev_pos, b, rule));
    let (na, nb) = (&lg.nodes[a], &lg.nodes[b]);
    match (pa, pb) {
        (Some(x), Some(y)) if (x - y).abs() > 1e-9 => x.total_cmp(&y),
        (Some(_), Some(_)) => first_connection(lg, a)
            .cmp(&first_connection(lg, b))
            .then(na.is_dummy().cmp(&nb.is_dummy()))
            .then(a.cmp(&b)),
        _ => na
            .source_order
            .cmp(&nb.source_order)
            .then(na.is_dummy().cmp(&nb.is_dummy()))
            .then(na.model_order.cmp(&nb.model_order))
            .then(a.cmp(&b)),
    }
}

/// Initial in-layer orders from model order: real nodes ascending by node
/// model order, dummies merged in with [`compare_dummy`] against the already
/// ordered previous layer.
pub fn preorder_by_model_order(lg: &LayeredGraph, rule: DummyRule) -> Vec<Vec<usize>> {
    let mut prev_pos = vec![0usize; lg.nodes.len()];
    let mut out = Vec::with_capacity(lg.layers.len());
    for members in &lg.layers {
        let (mut dummies, mut reals): (Vec<usize>, Vec<usize>) = members.iter().partition(|&&v| lg.nodes[v].is_dummy());
        reals.sort_by_key(|&v| (lg.nodes[v].model_order, v));
        // dummies have exactly one predecessor, so this comparison is a total order
        dummies.sort_by(|&a, &b| compare_dummy(lg, &prev_pos, a, b, rule));

        let mut layer = Vec::with_capacity(members.len());
        let (mut i, mut j) = (0, 0);
        while i < reals.len() || j < dummies.len() {
            let take_dummy = j < dummies.len()
                && (i == reals.len() || compare_dummy(lg, &prev_pos, dummies[j], reals[i], rule) == Ordering::Less);
            if take_dummy {
                layer.push(dummies[j]);
                j += 1;
            } else {
                layer.push(reals[i]);
                i += 1;
            }
        }
        for (p, &v) in layer.iter().enumerate() {
            prev_pos[v] = p;
        }
        out.push(layer);
    }
    out
}
