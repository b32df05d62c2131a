use super::{EdgeLayout, LayoutResult, NodeLayout, Placement, Point, PortLayout, Rect};
use crate::crossmin::LayerOrders;
use crate::graph::{Direction, Side};
use crate::layering::LayeredGraph;

/// How far a self-loop sticks out of its node.
pub const SELF_LOOP_REACH: f64 = 12.0;

fn anchor_on(rect: &Rect, side: Side, fraction: f64) -> Point {
    match side {
        Side::North => Point::new(rect.x + fraction * rect.width, rect.y),
        Side::South => Point::new(rect.x + fraction * rect.width, rect.y + rect.height),
        Side::West => Point::new(rect.x, rect.y + fraction * rect.height),
        Side::East => Point::new(rect.x + rect.width, rect.y + fraction * rect.height),
    }
}

/// Builds the final layout: port anchors spread evenly along each side in port
/// order, edges as polylines through their dummies. Reversed edges are routed
/// in layout orientation and then turned back, so every polyline runs from the
/// declared source to the declared target. Interface edges of a child graph are
/// left without points; the parent level routes them.
pub fn route_edges(lg: &LayeredGraph, orders: &LayerOrders, placement: &Placement) -> LayoutResult {
    let g = &lg.graph;
    let index = g.index_map();

    let nodes: Vec<NodeLayout> = g
        .nodes
        .iter()
        .enumerate()
        .map(|(v, node)| {
            let rect = placement.rects[v];
            let mut ports: Vec<Option<PortLayout>> = vec![None; node.ports.len()];
            for side in Side::ALL {
                let list = orders.ports[v].side(side);
                for (i, &p) in list.iter().enumerate() {
                    let f = (i + 1) as f64 / (list.len() + 1) as f64;
                    ports[p] = Some(PortLayout { id: node.ports[p].id.clone(), side, anchor: anchor_on(&rect, side, f) });
                }
            }
            let ports = ports
                .into_iter()
                .enumerate()
                .map(|(p, pl)| {
                    pl.unwrap_or_else(|| {
                        let side = lg.port_sides[v][p];
                        PortLayout { id: node.ports[p].id.clone(), side, anchor: anchor_on(&rect, side, 0.5) }
                    })
                })
                .collect();
            NodeLayout {
                id: node.id.clone(),
                kind: node.kind.clone(),
                x: rect.x,
                y: rect.y,
                width: rect.width,
                height: rect.height,
                layer: lg.nodes[v].layer,
                position: orders.position[v],
                ports,
                children: None,
            }
        })
        .collect();

    let anchor = |node: usize, port: &Option<String>| -> Point {
        match port.as_ref().and_then(|p| nodes[node].port(p)) {
            Some(p) => p.anchor,
            None => placement.rects[node].center(),
        }
    };

    let edges = g
        .edges
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let points = if edge.touches_parent() {
                Vec::new()
            } else {
                let (s, t) = (index[edge.source.as_str()], index[edge.target.as_str()]);
                let (a, b) = (anchor(s, &edge.source_port), anchor(t, &edge.target_port));
                if edge.is_self_loop() {
                    let (dx, dy) = match g.direction {
                        Direction::Down => (SELF_LOOP_REACH, 0.0),
                        Direction::Right => (0.0, SELF_LOOP_REACH),
                    };
                    vec![a, Point::new(a.x + dx, a.y + dy), Point::new(b.x + dx, b.y + dy), b]
                } else {
                    let dummies = lg.chains.get(&e).map(|c| c.as_slice()).unwrap_or(&[]);
                    let mut pts = Vec::with_capacity(dummies.len() + 2);
                    if edge.reversed {
                        // layout orientation runs target → source
                        pts.push(b);
                        pts.extend(dummies.iter().map(|&d| placement.rects[d].center()));
                        pts.push(a);
                        pts.reverse();
                    } else {
                        pts.push(a);
                        pts.extend(dummies.iter().map(|&d| placement.rects[d].center()));
                        pts.push(b);
                    }
                    pts
                }
            };
            EdgeLayout {
                id: edge.id.clone(),
                source: edge.source.clone(),
                target: edge.target.clone(),
                points,
                reversed: edge.reversed,
                priority_label: edge.priority_label,
            }
        })
        .collect();

    let mut result = LayoutResult { direction: g.direction, nodes, edges, canvas: Rect::default() };
    result.recompute_canvas();
    result
}
