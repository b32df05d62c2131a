use super::{CrossMinOptions, LayerOrders, PortOrder, PortPolicy};
use crate::graph::Side;
use crate::layering::LayeredGraph;

/// Whether `v` keeps a predetermined port order.
pub(crate) fn has_fixed_ports(lg: &LayeredGraph, v: usize, opts: &CrossMinOptions) -> bool {
    lg.interface_order[v].is_some() || lg.graph.nodes[v].fixed_port_order || opts.fixed_ports || opts.port_policy == PortPolicy::Fixed
}

fn fixed_order(lg: &LayeredGraph, v: usize) -> PortOrder {
    let node = &lg.graph.nodes[v];
    let mut order = PortOrder::default();
    let sequence: Vec<usize> = match &lg.interface_order[v] {
        Some(seq) => {
            let mut seq = seq.clone();
            let mut rest: Vec<usize> = (0..node.ports.len()).filter(|p| !seq.contains(p)).collect();
            rest.sort_by_key(|&p| node.ports[p].model_order);
            seq.extend(rest);
            seq
        }
        None => {
            let mut all: Vec<usize> = (0..node.ports.len()).collect();
            all.sort_by_key(|&p| (node.ports[p].model_order, p));
            all
        }
    };
    for p in sequence {
        order.side_mut(lg.port_sides[v][p]).push(p);
    }
    order
}

/// Orders the ports of every real node.
///
/// Nodes with a fixed interface, `fixed_port_order`, semantic port order or the
/// fixed policy sort ports by model order (or by the interface computed for a
/// compound node). All other nodes sort each side by the mean position of the
/// connected neighbors; ties put forward edges before backward edges and then
/// follow port model order. Ports without a neighbor in an adjacent layer
/// (self-loops, interface edges, unused ports) go last.
pub fn order_ports(lg: &LayeredGraph, orders: &LayerOrders, opts: &CrossMinOptions) -> Vec<PortOrder> {
    let n = lg.real_count();
    let fixed: Vec<bool> = (0..n).map(|v| has_fixed_ports(lg, v, opts)).collect();
    let mut result: Vec<Option<PortOrder>> = (0..n).map(|v| fixed[v].then(|| fixed_order(lg, v))).collect();

    // fractional anchor of a port on an already fixed node
    let fixed_fraction = |result: &[Option<PortOrder>], v: usize, p: usize| -> f64 {
        let Some(order) = &result[v] else { return 0.5 };
        let side = order.side(lg.port_sides[v][p]);
        let rank = side.iter().position(|&q| q == p).unwrap_or(0);
        (rank + 1) as f64 / (side.len() + 1) as f64
    };

    for v in 0..n {
        if fixed[v] {
            continue;
        }
        let node = &lg.graph.nodes[v];
        let mut keyed: Vec<(Side, f64, bool, usize, usize)> = Vec::with_capacity(node.ports.len());
        for p in 0..node.ports.len() {
            let mut sum = 0.0;
            let mut count = 0usize;
            let mut backward = false;
            for seg in lg.outgoing(v).filter(|s| s.source_port == Some(p)) {
                let frac = match (lg.nodes[seg.target].real(), seg.target_port) {
                    (Some(t), Some(tp)) => fixed_fraction(&result, t, tp),
                    _ => 0.5,
                };
                sum += orders.position[seg.target] as f64 + frac;
                count += 1;
                backward |= seg.backward;
            }
            for seg in lg.incoming(v).filter(|s| s.target_port == Some(p)) {
                let frac = match (lg.nodes[seg.source].real(), seg.source_port) {
                    (Some(s), Some(sp)) => fixed_fraction(&result, s, sp),
                    _ => 0.5,
                };
                sum += orders.position[seg.source] as f64 + frac;
                count += 1;
                backward |= seg.backward;
            }
            let key = if count == 0 { f64::INFINITY } else { sum / count as f64 };
            keyed.push((lg.port_sides[v][p], key, backward, node.ports[p].model_order, p));
        }
        keyed.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.2.cmp(&b.2)).then(a.3.cmp(&b.3)).then(a.4.cmp(&b.4)));
        let mut order = PortOrder::default();
        for (side, _, _, _, p) in keyed {
            order.side_mut(side).push(p);
        }
        result[v] = Some(order);
    }
    result.into_iter().map(|o| o.unwrap_or_default()).collect()
}
