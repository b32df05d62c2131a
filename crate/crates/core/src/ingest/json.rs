//! JSON graph format.
//!
//! ```json
//! {"direction": "RIGHT",
//!  "nodes": [{"id": "A", "group": 0, "kind": "reactor", "width": 60, "height": 30,
//!             "fixedPortOrder": true, "ports": [{"id": "x", "side": "EAST", "order": 0}],
//!             "children": {"nodes": [], "edges": []}}],
//!  "edges": [{"id": "e0", "source": "A", "target": "B", "sourcePort": "x",
//!             "targetPort": "y", "order": 0, "priority": 1}]}
//! ```
//!
//! Geometry written by the layout output (`x`, `y`, `anchor`, `bendPoints`, ...)
//! is accepted and ignored so that output can be read back.

use serde_json::{Map, Value};

use crate::graph::{validate, Direction, Edge, Graph, Node, Port, PortOrigin, Side, Violation};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SchemaMode {
    /// Unknown keys are errors.
    #[default]
    Strict,
    /// Unknown keys are reported as warnings.
    Lenient,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum JsonError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("invalid graph: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct JsonGraph {
    pub graph: Graph,
    /// Unknown keys skipped in lenient mode.
    pub warnings: Vec<String>,
}

const GRAPH_KEYS: &[&str] = &["direction", "nodes", "edges"];
const GRAPH_OUTPUT_KEYS: &[&str] = &["canvas"];
const NODE_KEYS: &[&str] = &["id", "group", "kind", "width", "height", "fixedPortOrder", "ports", "children"];
const NODE_OUTPUT_KEYS: &[&str] = &["x", "y", "layer", "position"];
const PORT_KEYS: &[&str] = &["id", "side", "order", "origin"];
const PORT_OUTPUT_KEYS: &[&str] = &["anchor"];
const EDGE_KEYS: &[&str] = &["id", "source", "target", "sourcePort", "targetPort", "order", "priority"];
const EDGE_OUTPUT_KEYS: &[&str] = &["reversed", "bendPoints", "sourcePoint", "targetPoint"];

struct Reader {
    mode: SchemaMode,
    warnings: Vec<String>,
}

fn schema<T>(path: &str, message: impl Into<String>) -> Result<T, JsonError> {
    Err(JsonError::Schema { path: path.to_string(), message: message.into() })
}

impl Reader {
    fn object<'a>(&mut self, v: &'a Value, path: &str, known: &[&[&str]]) -> Result<&'a Map<String, Value>, JsonError> {
        let Some(obj) = v.as_object() else { return schema(path, "expected an object") };
        for key in obj.keys() {
            if !known.iter().any(|k| k.contains(&key.as_str())) {
                let msg = format!("{path}.{key}: unknown field");
                match self.mode {
                    SchemaMode::Strict => return schema(&format!("{path}.{key}"), "unknown field"),
                    SchemaMode::Lenient => self.warnings.push(msg),
                }
            }
        }
        Ok(obj)
    }

    fn graph(&mut self, v: &Value, path: &str, inherited: Direction) -> Result<Graph, JsonError> {
        let obj = self.object(v, path, &[GRAPH_KEYS, GRAPH_OUTPUT_KEYS])?;
        let direction = match obj.get("direction") {
            None => inherited,
            Some(Value::String(s)) => match Direction::parse(s) {
                Some(d) => d,
                None => return schema(&format!("{path}.direction"), "expected RIGHT or DOWN"),
            },
            Some(_) => return schema(&format!("{path}.direction"), "expected a string"),
        };
        let mut g = Graph::new(direction);
        for (i, n) in array(obj.get("nodes"), &format!("{path}.nodes"))?.iter().enumerate() {
            let node = self.node(n, &format!("{path}.nodes[{i}]"), i, direction)?;
            g.nodes.push(node);
        }
        for (i, e) in array(obj.get("edges"), &format!("{path}.edges"))?.iter().enumerate() {
            let edge = self.edge(e, &format!("{path}.edges[{i}]"), i)?;
            g.edges.push(edge);
        }
        Ok(g)
    }

    fn node(&mut self, v: &Value, path: &str, order: usize, direction: Direction) -> Result<Node, JsonError> {
        let obj = self.object(v, path, &[NODE_KEYS, NODE_OUTPUT_KEYS])?;
        let mut node = Node::new(required_str(obj, "id", path)?, order);
        if let Some(g) = obj.get("group") {
            node.group = natural(g, &format!("{path}.group"))?;
        }
        if let Some(k) = obj.get("kind") {
            node.kind = string(k, &format!("{path}.kind"))?;
        }
        if let Some(f) = obj.get("fixedPortOrder") {
            node.fixed_port_order = f.as_bool().map_or_else(|| schema(&format!("{path}.fixedPortOrder"), "expected a boolean"), Ok)?;
        }
        if let Some(ports) = obj.get("ports") {
            for (i, p) in array(Some(ports), &format!("{path}.ports"))?.iter().enumerate() {
                let port = self.port(p, &format!("{path}.ports[{i}]"), i)?;
                node.ports.push(port);
            }
        }
        match obj.get("children") {
            Some(c) => node.children = Some(Box::new(self.graph(c, &format!("{path}.children"), direction)?)),
            None => {
                // compound sizes come from their children
                if let Some(w) = obj.get("width") {
                    node.width = number(w, &format!("{path}.width"))?;
                }
                if let Some(h) = obj.get("height") {
                    node.height = number(h, &format!("{path}.height"))?;
                }
            }
        }
        Ok(node)
    }

    fn port(&mut self, v: &Value, path: &str, position: usize) -> Result<Port, JsonError> {
        let obj = self.object(v, path, &[PORT_KEYS, PORT_OUTPUT_KEYS])?;
        let side = match obj.get("side") {
            None | Some(Value::Null) => None,
            Some(s) => match Side::parse(&string(s, &format!("{path}.side"))?) {
                Some(side) => Some(side),
                None => return schema(&format!("{path}.side"), "expected NORTH, EAST, SOUTH or WEST"),
            },
        };
        let origin = match obj.get("origin").map(|o| o.as_str()) {
            None | Some(Some("explicit")) => PortOrigin::Explicit,
            Some(Some("implicit")) => PortOrigin::Implicit,
            _ => return schema(&format!("{path}.origin"), "expected \"explicit\" or \"implicit\""),
        };
        let model_order = match obj.get("order") {
            Some(o) => natural(o, &format!("{path}.order"))?,
            None => position,
        };
        Ok(Port { id: required_str(obj, "id", path)?, side, model_order, origin })
    }

    fn edge(&mut self, v: &Value, path: &str, position: usize) -> Result<Edge, JsonError> {
        let obj = self.object(v, path, &[EDGE_KEYS, EDGE_OUTPUT_KEYS])?;
        let id = match obj.get("id") {
            Some(i) => string(i, &format!("{path}.id"))?,
            None => format!("e{position}"),
        };
        let order = match obj.get("order") {
            Some(o) => natural(o, &format!("{path}.order"))?,
            None => position,
        };
        let mut edge = Edge::new(id, required_str(obj, "source", path)?, required_str(obj, "target", path)?, order);
        if let Some(p) = obj.get("sourcePort") {
            edge.source_port = Some(string(p, &format!("{path}.sourcePort"))?);
        }
        if let Some(p) = obj.get("targetPort") {
            edge.target_port = Some(string(p, &format!("{path}.targetPort"))?);
        }
        if let Some(p) = obj.get("priority") {
            let n = natural(p, &format!("{path}.priority"))?;
            edge.priority_label = Some(u32::try_from(n).map_or_else(|_| schema(&format!("{path}.priority"), "out of range"), Ok)?);
        }
        Ok(edge)
    }
}

fn array<'a>(v: Option<&'a Value>, path: &str) -> Result<&'a [Value], JsonError> {
    match v {
        None => Ok(&[]),
        Some(Value::Array(a)) => Ok(a),
        Some(_) => schema(path, "expected an array"),
    }
}

fn string(v: &Value, path: &str) -> Result<String, JsonError> {
    v.as_str().map(str::to_string).map_or_else(|| schema(path, "expected a string"), Ok)
}

fn required_str(obj: &Map<String, Value>, key: &str, path: &str) -> Result<String, JsonError> {
    match obj.get(key) {
        Some(v) => string(v, &format!("{path}.{key}")),
        None => schema(&format!("{path}.{key}"), "missing required field"),
    }
}

fn natural(v: &Value, path: &str) -> Result<usize, JsonError> {
    v.as_u64().and_then(|n| usize::try_from(n).ok()).map_or_else(|| schema(path, "expected a non-negative integer"), Ok)
}

fn number(v: &Value, path: &str) -> Result<f64, JsonError> {
    v.as_f64().map_or_else(|| schema(path, "expected a number"), Ok)
}

/// Strict-mode parse; see [`parse_json_graph_with`].
pub fn parse_json_graph(text: &str) -> Result<Graph, JsonError> {
    parse_json_graph_with(text, SchemaMode::Strict).map(|j| j.graph)
}

/// Reads a graph and validates it. Node model order is list position; edge
/// and port orders default to list position when absent. Children inherit
/// the parent's direction unless they set their own.
pub fn parse_json_graph_with(text: &str, mode: SchemaMode) -> Result<JsonGraph, JsonError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| JsonError::Syntax { line: e.line(), column: e.column(), message: e.to_string() })?;
    let mut reader = Reader { mode, warnings: Vec::new() };
    let graph = reader.graph(&value, "$", Direction::Right)?;
    let violations = validate(&graph);
    if !violations.is_empty() {
        return Err(JsonError::Invalid(violations));
    }
    Ok(JsonGraph { graph, warnings: reader.warnings })
}
