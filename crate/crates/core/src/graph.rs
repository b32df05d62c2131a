//! Graph model shared by every layout phase.
//!
//! Nodes, edges and ports all carry a *model order*: the position at which the
//! element was declared in its textual source. For nodes the model order is the
//! list position; for edges it is an explicit dense index; ports carry a per-node
//! order. Compound nodes hold a complete child [`Graph`]; edges inside the child
//! reach the compound's ports through the reserved endpoint [`PARENT`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Endpoint id used inside a child graph to address a port of the enclosing
/// compound node.
pub const PARENT: &str = "^";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Direction {
    /// Layers grow to the right, in-layer order runs top to bottom.
    #[default]
    #[serde(alias = "right")]
    Right,
    /// Layers grow downward, in-layer order runs left to right.
    #[serde(alias = "down")]
    Down,
}

impl Direction {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "right" => Some(Direction::Right),
            "down" => Some(Direction::Down),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Right => "RIGHT",
            Direction::Down => "DOWN",
        }
    }

    /// Side where edges enter a node in layout orientation.
    pub fn in_side(self) -> Side {
        match self {
            Direction::Right => Side::West,
            Direction::Down => Side::North,
        }
    }

    /// Side where edges leave a node in layout orientation.
    pub fn out_side(self) -> Side {
        match self {
            Direction::Right => Side::East,
            Direction::Down => Side::South,
        }
    }

    /// Side parallel to the layout direction, used for self-loops.
    pub fn free_side(self) -> Side {
        match self {
            Direction::Right => Side::South,
            Direction::Down => Side::East,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Side {
    North,
    East,
    South,
    West,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::North, Side::East, Side::South, Side::West];

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NORTH" => Some(Side::North),
            "EAST" => Some(Side::East),
            "SOUTH" => Some(Side::South),
            "WEST" => Some(Side::West),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::North => "NORTH",
            Side::East => "EAST",
            Side::South => "SOUTH",
            Side::West => "WEST",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PortOrigin {
    #[default]
    Explicit,
    Implicit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Port {
    pub id: String,
    /// `None` leaves the side to the layout.
    pub side: Option<Side>,
    pub model_order: usize,
    pub origin: PortOrigin,
}

pub const DEFAULT_NODE_WIDTH: f64 = 60.0;
pub const DEFAULT_NODE_HEIGHT: f64 = 30.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: String,
    pub model_order: usize,
    /// Ordering group; model order only compares nodes of equal group when
    /// group restriction is enabled.
    pub group: usize,
    pub kind: String,
    pub ports: Vec<Port>,
    pub children: Option<Box<Graph>>,
    pub fixed_port_order: bool,
    pub width: f64,
    pub height: f64,
    pub is_dummy: bool,
}

impl Node {
    pub fn new(id: impl Into<String>, model_order: usize) -> Self {
        Node {
            id: id.into(),
            model_order,
            group: 0,
            kind: String::new(),
            ports: Vec::new(),
            children: None,
            fixed_port_order: false,
            width: DEFAULT_NODE_WIDTH,
            height: DEFAULT_NODE_HEIGHT,
            is_dummy: false,
        }
    }

    pub fn port(&self, id: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.id == id)
    }

    pub fn port_index(&self, id: &str) -> Option<usize> {
        self.ports.iter().position(|p| p.id == id)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: String,
    pub source: String,
    pub source_port: Option<String>,
    pub target: String,
    pub target_port: Option<String>,
    pub model_order: usize,
    pub priority_label: Option<u32>,
    /// Set by cycle breaking only.
    pub reversed: bool,
}

impl Edge {
    pub fn new(id: impl Into<String>, source: impl Into<String>, target: impl Into<String>, model_order: usize) -> Self {
        Edge {
            id: id.into(),
            source: source.into(),
            source_port: None,
            target: target.into(),
            target_port: None,
            model_order,
            priority_label: None,
            reversed: false,
        }
    }

    pub fn is_self_loop(&self) -> bool {
        self.source == self.target
    }

    pub fn touches_parent(&self) -> bool {
        self.source == PARENT || self.target == PARENT
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Graph {
    pub direction: Direction,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl Graph {
    pub fn new(direction: Direction) -> Self {
        Graph { direction, nodes: Vec::new(), edges: Vec::new() }
    }

    /// Appends a node whose model order is its list position.
    pub fn add_node(&mut self, id: impl Into<String>) -> &mut Node {
        let order = self.nodes.len();
        self.nodes.push(Node::new(id, order));
        self.nodes.last_mut().unwrap()
    }

    /// Appends an edge whose model order is its list position.
    pub fn add_edge(&mut self, source: &str, target: &str) -> &mut Edge {
        let order = self.edges.len();
        self.edges.push(Edge::new(format!("e{order}"), source, target, order));
        self.edges.last_mut().unwrap()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// Node id → list index.
    pub fn index_map(&self) -> BTreeMap<&str, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect()
    }

    /// Edge indices sorted by edge model order.
    pub fn edges_by_model_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.edges.len()).collect();
        idx.sort_by_key(|&i| (self.edges[i].model_order, i));
        idx
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateNodeId(String),
    DuplicateEdgeId(String),
    DuplicatePortId { node: String, port: String },
    DanglingEndpoint { edge: String, node: String },
    DanglingPort { edge: String, node: String, port: String },
    NodeOrderMismatch { node: String, position: usize, model_order: usize },
    EdgeOrderNotDense { edge: String, model_order: usize },
    DuplicateEdgeOrder { edge: String, model_order: usize },
    DuplicatePortOrder { node: String, port: String },
    DummyInInput(String),
    ReversedOnInput(String),
    InvalidSize(String),
    /// A violation inside the child graph of a compound node.
    InChild { node: String, violation: Box<Violation> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNodeId(id) => write!(f, "duplicate node id `{id}`"),
            Violation::DuplicateEdgeId(id) => write!(f, "duplicate edge id `{id}`"),
            Violation::DuplicatePortId { node, port } => write!(f, "node `{node}` declares port `{port}` twice"),
            Violation::DanglingEndpoint { edge, node } => write!(f, "edge `{edge}` references missing node `{node}`"),
            Violation::DanglingPort { edge, node, port } => {
                write!(f, "edge `{edge}` references missing port `{port}` on node `{node}`")
            }
            Violation::NodeOrderMismatch { node, position, model_order } => {
                write!(f, "node `{node}` at position {position} carries model order {model_order}")
            }
            Violation::EdgeOrderNotDense { edge, model_order } => {
                write!(f, "edge `{edge}` has model order {model_order} outside 0..|E|")
            }
            Violation::DuplicateEdgeOrder { edge, model_order } => {
                write!(f, "edge `{edge}` repeats model order {model_order}")
            }
            Violation::DuplicatePortOrder { node, port } => {
                write!(f, "port `{port}` on node `{node}` repeats a port model order")
            }
            Violation::DummyInInput(id) => write!(f, "node `{id}` is flagged as dummy in an input graph"),
            Violation::ReversedOnInput(id) => write!(f, "edge `{id}` is already reversed"),
            Violation::InvalidSize(id) => write!(f, "node `{id}` has a negative or non-finite size"),
            Violation::InChild { node, violation } => write!(f, "in children of `{node}`: {violation}"),
        }
    }
}

/// Checks every model invariant. The result is empty iff the graph is valid.
pub fn validate(graph: &Graph) -> Vec<Violation> {
    let mut out = Vec::new();
    validate_level(graph, None, &mut out);
    out
}

fn validate_level(graph: &Graph, parent: Option<&Node>, out: &mut Vec<Violation>) {
    let mut seen = BTreeSet::new();
    for (i, node) in graph.nodes.iter().enumerate() {
        if !seen.insert(node.id.as_str()) || node.id == PARENT {
            out.push(Violation::DuplicateNodeId(node.id.clone()));
        }
        if node.model_order != i {
            out.push(Violation::NodeOrderMismatch { node: node.id.clone(), position: i, model_order: node.model_order });
        }
        if node.is_dummy {
            out.push(Violation::DummyInInput(node.id.clone()));
        }
        if !(node.width.is_finite() && node.height.is_finite() && node.width >= 0.0 && node.height >= 0.0) {
            out.push(Violation::InvalidSize(node.id.clone()));
        }
        let mut port_ids = BTreeSet::new();
        let mut port_orders = BTreeSet::new();
        for port in &node.ports {
            if !port_ids.insert(port.id.as_str()) {
                out.push(Violation::DuplicatePortId { node: node.id.clone(), port: port.id.clone() });
            }
            // a self-loop's two implicit ports share the edge's order
            if port.origin == PortOrigin::Explicit && !port_orders.insert(port.model_order) {
                out.push(Violation::DuplicatePortOrder { node: node.id.clone(), port: port.id.clone() });
            }
        }
        if let Some(child) = &node.children {
            let mut inner = Vec::new();
            validate_level(child, Some(node), &mut inner);
            out.extend(inner.into_iter().map(|v| Violation::InChild { node: node.id.clone(), violation: Box::new(v) }));
        }
    }

    let mut edge_ids = BTreeSet::new();
    let mut orders = BTreeSet::new();
    let m = graph.edges.len();
    for edge in &graph.edges {
        if !edge_ids.insert(edge.id.as_str()) {
            out.push(Violation::DuplicateEdgeId(edge.id.clone()));
        }
        if edge.model_order >= m {
            out.push(Violation::EdgeOrderNotDense { edge: edge.id.clone(), model_order: edge.model_order });
        } else if !orders.insert(edge.model_order) {
            out.push(Violation::DuplicateEdgeOrder { edge: edge.id.clone(), model_order: edge.model_order });
        }
        if edge.reversed {
            out.push(Violation::ReversedOnInput(edge.id.clone()));
        }
        for (end, port) in [(&edge.source, &edge.source_port), (&edge.target, &edge.target_port)] {
            let owner = if end == PARENT { parent } else { graph.node(end) };
            match owner {
                None => out.push(Violation::DanglingEndpoint { edge: edge.id.clone(), node: end.clone() }),
                Some(owner) => match port {
                    Some(p) if owner.port(p).is_none() => out.push(Violation::DanglingPort {
                        edge: edge.id.clone(),
                        node: end.clone(),
                        port: p.clone(),
                    }),
                    // interface edges must name the compound port they attach to
                    None if end == PARENT => out.push(Violation::DanglingPort {
                        edge: edge.id.clone(),
                        node: end.clone(),
                        port: String::new(),
                    }),
                    _ => {}
                },
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("local index list has {got} entries for {expected} edges")]
    LocalIndexCount { expected: usize, got: usize },
    #[error("node `{node}` declares local edge index {index} twice")]
    DuplicateLocalIndex { node: String, index: usize },
    #[error("edge `{edge}` starts at unknown node `{node}`")]
    UnknownSource { edge: String, node: String },
}

/// Assigns edge model orders from the declaring node: edges sort by
/// `(source node model order, local declaration index)`.
///
/// `local_index[i]` is the declaration index of `graph.edges[i]` under its source
/// node. Interface edges declared from the enclosing compound sort first.
pub fn derive_global_edge_order(graph: &Graph, local_index: &[usize]) -> Result<Graph, GraphError> {
    if local_index.len() != graph.edges.len() {
        return Err(GraphError::LocalIndexCount { expected: graph.edges.len(), got: local_index.len() });
    }
    let index = graph.index_map();
    let mut keys = Vec::with_capacity(graph.edges.len());
    let mut seen = BTreeSet::new();
    for (i, edge) in graph.edges.iter().enumerate() {
        let source_order = if edge.source == PARENT {
            None
        } else {
            match index.get(edge.source.as_str()) {
                Some(&n) => Some(graph.nodes[n].model_order),
                None => return Err(GraphError::UnknownSource { edge: edge.id.clone(), node: edge.source.clone() }),
            }
        };
        if !seen.insert((edge.source.as_str(), local_index[i])) {
            return Err(GraphError::DuplicateLocalIndex { node: edge.source.clone(), index: local_index[i] });
        }
        keys.push(((source_order, local_index[i]), i));
    }
    keys.sort();
    let mut out = graph.clone();
    for (order, (_, i)) in keys.into_iter().enumerate() {
        out.edges[i].model_order = order;
    }
    Ok(out)
}

/// Creates an implicit port for every edge endpoint that lacks one. The port's
/// model order is the incident edge's model order; explicit ports are kept.
pub fn synthesize_implicit_ports(graph: &Graph) -> Graph {
    let mut out = graph.clone();
    let index = graph.index_map();
    for e in graph.edges_by_model_order() {
        let edge = &graph.edges[e];
        for is_source in [true, false] {
            let (end, port) = if is_source { (&edge.source, &edge.source_port) } else { (&edge.target, &edge.target_port) };
            if port.is_some() || end == PARENT {
                continue;
            }
            let Some(&n) = index.get(end.as_str()) else { continue };
            let node = &mut out.nodes[n];
            let base = format!("{}.{}", edge.id, if is_source { "out" } else { "in" });
            let mut id = base.clone();
            let mut k = 1;
            while node.port(&id).is_some() {
                id = format!("{base}{k}");
                k += 1;
            }
            // explicit ports keep their orders; implicit ones follow after them
            let offset = node.ports.iter().filter(|p| p.origin == PortOrigin::Explicit).map(|p| p.model_order + 1).max().unwrap_or(0);
            node.ports.push(Port { id: id.clone(), side: None, model_order: offset + edge.model_order, origin: PortOrigin::Implicit });
            let slot = if is_source { &mut out.edges[e].source_port } else { &mut out.edges[e].target_port };
            *slot = Some(id);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(ids: &[&str]) -> Graph {
        let mut g = Graph::new(Direction::Right);
        for id in ids {
            g.add_node(*id);
        }
        for w in ids.windows(2) {
            g.add_edge(w[0], w[1]);
        }
        g
    }

    #[test]
    fn empty_graph_is_valid() {
        assert!(validate(&Graph::default()).is_empty());
    }

    #[test]
    fn duplicate_node_id() {
        let mut g = Graph::default();
        g.add_node("A");
        g.add_node("A");
        assert_eq!(validate(&g), vec![Violation::DuplicateNodeId("A".into())]);
    }

    #[test]
    fn dangling_endpoint() {
        let mut g = Graph::default();
        g.add_node("A");
        g.add_edge("A", "Z");
        assert_eq!(validate(&g), vec![Violation::DanglingEndpoint { edge: "e0".into(), node: "Z".into() }]);
    }

    #[test]
    fn order_and_flag_violations() {
        let mut g = chain(&["A", "B"]);
        g.nodes[1].model_order = 5;
        g.edges[0].model_order = 3;
        g.edges[0].reversed = true;
        let v = validate(&g);
        assert!(v.contains(&Violation::NodeOrderMismatch { node: "B".into(), position: 1, model_order: 5 }));
        assert!(v.contains(&Violation::EdgeOrderNotDense { edge: "e0".into(), model_order: 3 }));
        assert!(v.contains(&Violation::ReversedOnInput("e0".into())));
    }

    #[test]
    fn interface_edges_resolve_against_parent_ports() {
        let mut child = Graph::default();
        child.add_node("r");
        child.add_edge("r", PARENT).target_port = Some("x".into());
        let mut g = Graph::default();
        let node = g.add_node("C");
        node.ports.push(Port { id: "x".into(), side: None, model_order: 0, origin: PortOrigin::Explicit });
        node.children = Some(Box::new(child.clone()));
        assert!(validate(&g).is_empty());

        // same child at top level: "^" does not exist
        assert_eq!(validate(&child), vec![Violation::DanglingEndpoint { edge: "e0".into(), node: PARENT.into() }]);

        g.nodes[0].ports[0].id = "y".into();
        assert_eq!(validate(&g).len(), 1);
        assert!(matches!(&validate(&g)[0], Violation::InChild { node, .. } if node == "C"));
    }

    #[test]
    fn global_edge_order_is_lexicographic() {
        let mut g = Graph::default();
        g.add_node("A");
        g.add_node("B");
        // declared out of list order on purpose
        g.edges.push(Edge::new("e3", "B", "A", 0));
        g.edges.push(Edge::new("e2", "A", "B", 1));
        g.edges.push(Edge::new("e1", "A", "A", 2));
        let out = derive_global_edge_order(&g, &[0, 1, 0]).unwrap();
        let orders: Vec<_> = out.edges.iter().map(|e| (e.id.as_str(), e.model_order)).collect();
        assert_eq!(orders, vec![("e3", 2), ("e2", 1), ("e1", 0)]);
    }

    #[test]
    fn global_edge_order_single_self_loop() {
        let mut g = Graph::default();
        g.add_node("A");
        g.add_edge("A", "A");
        assert_eq!(derive_global_edge_order(&g, &[0]).unwrap().edges[0].model_order, 0);
    }

    #[test]
    fn duplicate_local_index_rejected() {
        let mut g = chain(&["A", "B", "C"]);
        g.add_edge("A", "C");
        let err = derive_global_edge_order(&g, &[0, 0, 0]).unwrap_err();
        assert_eq!(err, GraphError::DuplicateLocalIndex { node: "A".into(), index: 0 });
    }

    #[test]
    fn implicit_ports_for_bare_edge() {
        let g = synthesize_implicit_ports(&chain(&["A", "B"]));
        assert_eq!(g.nodes[0].ports.len(), 1);
        assert_eq!(g.nodes[1].ports.len(), 1);
        assert_eq!(g.nodes[0].ports[0].origin, PortOrigin::Implicit);
        assert_eq!(g.edges[0].source_port.as_deref(), Some(g.nodes[0].ports[0].id.as_str()));
        assert!(validate(&g).is_empty());
    }

    #[test]
    fn explicit_source_port_is_kept() {
        let mut g = chain(&["A", "B"]);
        g.nodes[0].ports.push(Port { id: "p".into(), side: Some(Side::East), model_order: 0, origin: PortOrigin::Explicit });
        g.edges[0].source_port = Some("p".into());
        let out = synthesize_implicit_ports(&g);
        assert_eq!(out.nodes[0].ports, g.nodes[0].ports);
        assert_eq!(out.nodes[1].ports.len(), 1);
    }

    #[test]
    fn implicit_port_order_follows_edge_order() {
        let mut g = chain(&["A", "B"]);
        g.add_edge("A", "B");
        let out = synthesize_implicit_ports(&g);
        let mut ports = out.nodes[0].ports.clone();
        ports.sort_by_key(|p| p.model_order);
        let by_port: Vec<_> = ports.iter().map(|p| p.id.clone()).collect();
        let by_edge: Vec<_> = out.edges_by_model_order().iter().map(|&e| out.edges[e].source_port.clone().unwrap()).collect();
        assert_eq!(by_port, by_edge);
    }
}
