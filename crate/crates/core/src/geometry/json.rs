use serde_json::{json, Map, Value};

use super::{LayoutResult, Point};
use crate::graph::{Graph, PortOrigin};

fn point(p: Point) -> Value {
    json!({ "x": p.x, "y": p.y })
}

fn level(graph: &Graph, layout: &LayoutResult) -> Value {
    let nodes: Vec<Value> = graph
        .nodes
        .iter()
        .zip(&layout.nodes)
        .map(|(node, placed)| {
            let mut o = Map::new();
            o.insert("id".into(), json!(node.id));
            o.insert("group".into(), json!(node.group));
            if !node.kind.is_empty() {
                o.insert("kind".into(), json!(node.kind));
            }
            if node.fixed_port_order {
                o.insert("fixedPortOrder".into(), json!(true));
            }
            o.insert("x".into(), json!(placed.x));
            o.insert("y".into(), json!(placed.y));
            o.insert("width".into(), json!(placed.width));
            o.insert("height".into(), json!(placed.height));
            o.insert("layer".into(), json!(placed.layer));
            o.insert("position".into(), json!(placed.position));
            if !node.ports.is_empty() {
                let ports: Vec<Value> = node
                    .ports
                    .iter()
                    .zip(&placed.ports)
                    .map(|(port, pl)| {
                        let mut p = Map::new();
                        p.insert("id".into(), json!(port.id));
                        p.insert("order".into(), json!(port.model_order));
                        // the drawn side is in the anchor; only declared sides are part of the model
                        if let Some(side) = port.side {
                            p.insert("side".into(), json!(side.as_str()));
                        }
                        if port.origin == PortOrigin::Implicit {
                            p.insert("origin".into(), json!("implicit"));
                        }
                        p.insert("anchor".into(), point(pl.anchor));
                        Value::Object(p)
                    })
                    .collect();
                o.insert("ports".into(), Value::Array(ports));
            }
            if let (Some(child), Some(child_layout)) = (&node.children, &placed.children) {
                o.insert("children".into(), level(child, child_layout));
            }
            Value::Object(o)
        })
        .collect();

    let edges: Vec<Value> = graph
        .edges
        .iter()
        .zip(&layout.edges)
        .map(|(edge, routed)| {
            let mut o = Map::new();
            o.insert("id".into(), json!(edge.id));
            o.insert("source".into(), json!(edge.source));
            o.insert("target".into(), json!(edge.target));
            if let Some(p) = &edge.source_port {
                o.insert("sourcePort".into(), json!(p));
            }
            if let Some(p) = &edge.target_port {
                o.insert("targetPort".into(), json!(p));
            }
            o.insert("order".into(), json!(edge.model_order));
            if let Some(p) = edge.priority_label {
                o.insert("priority".into(), json!(p));
            }
            o.insert("reversed".into(), json!(routed.reversed));
            if let (Some(first), Some(last)) = (routed.points.first(), routed.points.last()) {
                o.insert("sourcePoint".into(), point(*first));
                o.insert("targetPoint".into(), point(*last));
                let n = routed.points.len();
                let bends: Vec<Value> = routed.points[1..n.saturating_sub(1).max(1)].iter().map(|p| point(*p)).collect();
                o.insert("bendPoints".into(), Value::Array(bends));
            }
            Value::Object(o)
        })
        .collect();

    let c = layout.canvas;
    json!({
        "direction": graph.direction.as_str(),
        "nodes": nodes,
        "edges": edges,
        "canvas": { "x": c.x, "y": c.y, "width": c.width, "height": c.height },
    })
}

/// Layout as JSON in the input schema plus geometry. `graph` is the graph the
/// layout was computed for (before cycle breaking); reading the output back
/// with the JSON reader yields that graph again.
pub fn emit_layout_json(graph: &Graph, layout: &LayoutResult) -> String {
    let mut text = serde_json::to_string_pretty(&level(graph, layout)).expect("layout serializes");
    text.push('\n');
    text
}
