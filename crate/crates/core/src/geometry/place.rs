use super::Rect;
use crate::crossmin::LayerOrders;
use crate::graph::Direction;
use crate::layering::LayeredGraph;

/// Boxes of every layered node (dummies are zero-sized), indexed like `LayeredGraph::nodes`.
#[derive(Clone, Debug, PartialEq)]
pub struct Placement {
    pub rects: Vec<Rect>,
}

/// Layers are stacked along the layout direction with `layer_spacing` between
/// them; nodes in a layer are packed in their final order with `node_spacing`,
/// then one pass pulls each node toward the mean of its predecessors without
/// breaking order or spacing.
pub fn place_nodes(lg: &LayeredGraph, orders: &LayerOrders, node_spacing: f64, layer_spacing: f64) -> Placement {
    let dir = lg.graph.direction;
    let size = |v: usize| -> (f64, f64) {
        match lg.nodes[v].real() {
            Some(r) => (lg.graph.nodes[r].width, lg.graph.nodes[r].height),
            None => (0.0, 0.0),
        }
    };
    // (along layer axis, along in-layer axis)
    let axes = |v: usize| -> (f64, f64) {
        let (w, h) = size(v);
        match dir {
            Direction::Right => (w, h),
            Direction::Down => (h, w),
        }
    };

    let n = lg.nodes.len();
    let mut layer_coord = vec![0.0; n];
    let mut inlayer = vec![0.0; n];
    let mut offset = 0.0;
    for layer in &orders.layers {
        let extent = layer.iter().map(|&v| axes(v).0).fold(0.0, f64::max);
        for &v in layer {
            layer_coord[v] = offset + (extent - axes(v).0) / 2.0;
        }
        offset += extent + layer_spacing;
    }

    for (l, layer) in orders.layers.iter().enumerate() {
        let mut cursor = 0.0;
        for &v in layer {
            inlayer[v] = cursor;
            cursor += axes(v).1 + node_spacing;
        }
        if l == 0 {
            continue;
        }
        let mut prev_end = f64::NEG_INFINITY;
        for &v in layer {
            let preds: Vec<f64> = lg.incoming(v).map(|s| inlayer[s.source] + axes(s.source).1 / 2.0).collect();
            let desired = if preds.is_empty() {
                inlayer[v]
            } else {
                preds.iter().sum::<f64>() / preds.len() as f64 - axes(v).1 / 2.0
            };
            let start = desired.max(prev_end + node_spacing);
            inlayer[v] = start;
            prev_end = start + axes(v).1;
        }
    }

    let min_in = (0..n).map(|v| inlayer[v]).fold(f64::INFINITY, f64::min);
    let shift = if min_in.is_finite() { min_in } else { 0.0 };
    let rects = (0..n)
        .map(|v| {
            let (w, h) = size(v);
            let a = inlayer[v] - shift;
            match dir {
                Direction::Right => Rect { x: layer_coord[v], y: a, width: w, height: h },
                Direction::Down => Rect { x: a, y: layer_coord[v], width: w, height: h },
            }
        })
        .collect();
    Placement { rects }
}
