use std::collections::BTreeMap;

use super::ports::has_fixed_ports;
use super::{enforce_fixed_kinds, order_ports, CrossMinOptions, CrossMinStrategy, LayerOrders};
use crate::layering::LayeredGraph;
use crate::metrics::{count_crossings, count_inversions, InversionScope};

/// Barycenters closer than this count as equal.
pub const BARYCENTER_TIE_EPSILON: f64 = 1e-9;
/// Upper bound on full (down + up) sweeps.
pub const MAX_SWEEPS: usize = 8;

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub orders: LayerOrders,
    pub sweeps: usize,
    pub crossings: usize,
    pub inversions: usize,
}

fn anchor(lg: &LayeredGraph, orders: &LayerOrders, opts: &CrossMinOptions, node: usize, port: Option<usize>) -> f64 {
    let base = orders.position[node] as f64;
    match (lg.nodes[node].real(), port) {
        (Some(v), Some(p)) if has_fixed_ports(lg, v, opts) => {
            let side = orders.ports[v].side(lg.port_sides[v][p]);
            let rank = side.iter().position(|&q| q == p).unwrap_or(0);
            base + (rank + 1) as f64 / (side.len() + 1) as f64
        }
        _ => base + 0.5,
    }
}

/// New order of `layer` from barycenters over the adjacent fixed layer.
fn reorder(lg: &LayeredGraph, orders: &LayerOrders, layer: usize, downward: bool, opts: &CrossMinOptions) -> Vec<usize> {
    let model_order_mode = opts.strategy == CrossMinStrategy::BarycenterMo;
    let mut entries: Vec<(f64, usize, usize)> = orders.layers[layer]
        .iter()
        .map(|&v| {
            let anchors: Vec<f64> = if downward {
                lg.incoming(v).map(|s| anchor(lg, orders, opts, s.source, s.source_port)).collect()
            } else {
                lg.outgoing(v).map(|s| anchor(lg, orders, opts, s.target, s.target_port)).collect()
            };
            let bary = if anchors.is_empty() {
                orders.position[v] as f64 + 0.5
            } else {
                anchors.iter().sum::<f64>() / anchors.len() as f64
            };
            (bary, orders.position[v], v)
        })
        .collect();
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<usize> = entries.iter().map(|e| e.2).collect();

    if model_order_mode {
        let mut start = 0;
        while start < entries.len() {
            let mut end = start + 1;
            while end < entries.len() && entries[end].0 - entries[end - 1].0 <= BARYCENTER_TIE_EPSILON {
                end += 1;
            }
            if end - start > 1 {
                break_ties(lg, &mut out[start..end], opts.group_restricted);
            }
            start = end;
        }
    }
    enforce_fixed_kinds(lg, &mut out, &opts.fixed_node_kinds);
    out
}

/// Inside a run of equal barycenters, comparable real nodes take their slots
/// in model order; dummies and incomparable nodes stay put.
fn break_ties(lg: &LayeredGraph, run: &mut [usize], group_restricted: bool) {
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (slot, &v) in run.iter().enumerate() {
        if !lg.nodes[v].is_dummy() {
            let class = if group_restricted { lg.nodes[v].group } else { 0 };
            classes.entry(class).or_default().push(slot);
        }
    }
    for slots in classes.into_values() {
        let mut members: Vec<usize> = slots.iter().map(|&s| run[s]).collect();
        members.sort_by_key(|&v| lg.nodes[v].model_order);
        for (s, v) in slots.into_iter().zip(members) {
            run[s] = v;
        }
    }
}

/// Alternating down and up barycenter sweeps starting from `initial`.
///
/// Every visited order is scored by crossings and, with model order enabled,
/// by node inversions as the secondary criterion. The best-scored order wins,
/// and `initial` is one of the candidates, so the result never has more
/// crossings than the start. Sweeping stops once a full sweep brings no
/// improvement, or after [`MAX_SWEEPS`].
pub fn barycenter_sweep(lg: &LayeredGraph, initial: &LayerOrders, opts: &CrossMinOptions) -> SweepOutcome {
    let model_order_mode = opts.strategy == CrossMinStrategy::BarycenterMo;
    let scope = InversionScope::NodesInLayer { group_restricted: opts.group_restricted };
    let score = |o: &LayerOrders| -> (usize, usize) {
        let crossings = count_crossings(lg, o);
        let inv = if model_order_mode { count_inversions(lg, o, scope) } else { 0 };
        (crossings, inv)
    };

    let mut current = initial.clone();
    current.ports = order_ports(lg, &current, opts);
    let mut best = current.clone();
    let mut best_score = score(&best);
    let mut sweeps = 0;
    let layers = lg.layer_count();

    if layers >= 2 && best_score != (0, 0) {
        for _ in 0..MAX_SWEEPS {
            sweeps += 1;
            let before = best_score;
            for downward in [true, false] {
                let range: Box<dyn Iterator<Item = usize>> =
                    if downward { Box::new(1..layers) } else { Box::new((0..layers - 1).rev()) };
                for l in range {
                    current.layers[l] = reorder(lg, &current, l, downward, opts);
                    current.refresh_positions();
                    current.ports = order_ports(lg, &current, opts);
                }
                let s = score(&current);
                if s < best_score {
                    best_score = s;
                    best = current.clone();
                }
            }
            if best_score >= before || best_score == (0, 0) {
                break;
            }
        }
    }
    let inversions = count_inversions(lg, &best, scope);
    SweepOutcome { crossings: best_score.0, inversions, orders: best, sweeps }
}
