//! The full layout pipeline and its phase trace.
//!
//! Compound nodes are laid out bottom-up: each child graph is laid out first
//! (children of distinct compounds concurrently), the compound is sized to
//! fit it, and the parent level treats it as an opaque node whose interface
//! port order comes from where the inner endpoints ended up.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::config::LayoutConfig;
use crate::crossmin::{minimize_crossings, CrossMinResult};
use crate::cycles::{break_cycles, ReversalSet};
use crate::exec::{self, Execution};
use crate::geometry::{place_nodes, route_edges, LayoutResult, Point, COMPOUND_HEADER, COMPOUND_PADDING};
use crate::graph::{synthesize_implicit_ports, validate, Direction, Graph, Violation, PARENT};
use crate::layering::{assign_layers, insert_dummies, LayeredGraph, Layering, LayeringError};
use crate::metrics::{count_crossings, count_inversions, InversionScope, MetricsReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LayoutError {
    #[error("invalid graph: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    /// A phase broke its own postcondition.
    #[error("internal layout failure: {0}")]
    Internal(#[from] LayeringError),
}

/// Everything computed for one hierarchy level.
#[derive(Clone, Debug)]
pub struct Layout {
    /// Input after preparation (direction, groups, implicit ports).
    pub graph: Graph,
    pub reversals: ReversalSet,
    pub layering: Layering,
    pub layered: LayeredGraph,
    pub crossmin: CrossMinResult,
    /// Absolute geometry, children included.
    pub result: LayoutResult,
    /// Layouts of compound children by node id (child-local coordinates).
    pub children: BTreeMap<String, Layout>,
    group_restricted: bool,
}

/// Direction, group rules and implicit ports, applied to every level.
pub fn prepare(graph: &Graph, config: &LayoutConfig) -> Graph {
    fn level(g: &Graph, dir: Direction) -> Graph {
        let mut out = synthesize_implicit_ports(g);
        out.direction = dir;
        for node in &mut out.nodes {
            if let Some(c) = &node.children {
                node.children = Some(Box::new(level(c, dir)));
            }
        }
        out
    }
    let grouped = config.classification.apply_groups(graph);
    level(&grouped, config.direction.unwrap_or(graph.direction))
}

pub fn layout(graph: &Graph, config: &LayoutConfig) -> Result<Layout, LayoutError> {
    layout_with(Execution::default(), graph, config)
}

pub fn layout_with(exec: Execution, graph: &Graph, config: &LayoutConfig) -> Result<Layout, LayoutError> {
    let violations = validate(graph);
    if !violations.is_empty() {
        return Err(LayoutError::Invalid(violations));
    }
    layout_prepared(exec, &prepare(graph, config), config)
}

/// Independent graphs under one configuration; results keep input order.
pub fn layout_batch(exec: Execution, graphs: &[Graph], config: &LayoutConfig) -> Vec<Result<Layout, LayoutError>> {
    // the batch is already the unit of parallel work
    exec::map(exec, graphs, |g| layout_with(Execution::Sequential, g, config))
}

fn layout_prepared(exec: Execution, graph: &Graph, config: &LayoutConfig) -> Result<Layout, LayoutError> {
    let compounds: Vec<usize> = (0..graph.nodes.len()).filter(|&v| graph.nodes[v].children.is_some()).collect();
    let child_layouts = exec::map(exec, &compounds, |&v| {
        layout_prepared(exec, graph.nodes[v].children.as_ref().unwrap(), config)
    });
    let mut children = BTreeMap::new();
    for (&v, child) in compounds.iter().zip(child_layouts) {
        children.insert(graph.nodes[v].id.clone(), child?);
    }

    let mut working = graph.clone();
    for &v in &compounds {
        let canvas = children[&graph.nodes[v].id].result.canvas;
        working.nodes[v].width = canvas.width + 2.0 * COMPOUND_PADDING;
        working.nodes[v].height = canvas.height + 2.0 * COMPOUND_PADDING + COMPOUND_HEADER;
    }

    let reversals = break_cycles(&working, config.cycle_breaking);
    let layering = assign_layers(&reversals.graph)?;
    let mut layered = insert_dummies(&reversals.graph, &layering)?;
    for &v in &compounds {
        if !graph.nodes[v].fixed_port_order {
            layered.interface_order[v] = interface_order(graph, v, &children[&graph.nodes[v].id]);
        }
    }
    let crossmin = minimize_crossings(&layered, &config.crossmin_options(graph));
    let placement = place_nodes(&layered, &crossmin.orders, config.node_spacing, config.layer_spacing);
    let mut result = route_edges(&layered, &crossmin.orders, &placement);

    for &v in &compounds {
        let child = &children[&graph.nodes[v].id];
        let mut inner = child.result.clone();
        let node = &result.nodes[v];
        inner.translate(node.x + COMPOUND_PADDING - inner.canvas.x, node.y + COMPOUND_PADDING + COMPOUND_HEADER - inner.canvas.y);
        route_interface_edges(&child.graph, &mut inner, &result.nodes[v]);
        inner.recompute_canvas();
        result.nodes[v].children = Some(Box::new(inner));
    }
    result.recompute_canvas();

    Ok(Layout {
        graph: graph.clone(),
        reversals,
        layering,
        layered,
        crossmin,
        result,
        children,
        group_restricted: config.group_restricted,
    })
}

/// Compound port order implied by the child layout: ports sorted by the
/// in-layer coordinate of the inner endpoints they connect to. `None` when no
/// interface edge exists, leaving the ports to the normal policy.
fn interface_order(graph: &Graph, v: usize, child: &Layout) -> Option<Vec<usize>> {
    let node = &graph.nodes[v];
    let inlayer = |p: Point| match graph.direction {
        Direction::Right => p.y,
        Direction::Down => p.x,
    };
    let mut keyed: Vec<(f64, usize, usize)> = Vec::new();
    for (p, port) in node.ports.iter().enumerate() {
        let mut coords = Vec::new();
        for e in &child.graph.edges {
            let inner = if e.target == PARENT && e.target_port.as_deref() == Some(&port.id) {
                Some((&e.source, &e.source_port))
            } else if e.source == PARENT && e.source_port.as_deref() == Some(&port.id) {
                Some((&e.target, &e.target_port))
            } else {
                None
            };
            let Some((id, inner_port)) = inner else { continue };
            if id == PARENT {
                continue;
            }
            let Some(n) = child.result.node(id) else { continue };
            let at = match inner_port.as_ref().and_then(|ip| n.port(ip)) {
                Some(pl) => pl.anchor,
                None => n.rect().center(),
            };
            coords.push(inlayer(at));
        }
        if !coords.is_empty() {
            keyed.push((coords.iter().sum::<f64>() / coords.len() as f64, port.model_order, p));
        }
    }
    if keyed.is_empty() {
        return None;
    }
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    Some(keyed.into_iter().map(|k| k.2).collect())
}

/// Straight segments between inner port anchors and the compound's border ports.
fn route_interface_edges(child_graph: &Graph, inner: &mut LayoutResult, compound: &crate::geometry::NodeLayout) {
    for (e, edge) in child_graph.edges.iter().enumerate() {
        if !edge.touches_parent() {
            continue;
        }
        let anchor = |id: &str, port: &Option<String>| -> Option<Point> {
            if id == PARENT {
                return port.as_ref().and_then(|p| compound.port(p)).map(|pl| pl.anchor);
            }
            let n = inner.node(id)?;
            Some(port.as_ref().and_then(|p| n.port(p)).map_or_else(|| n.rect().center(), |pl| pl.anchor))
        };
        if let (Some(a), Some(b)) = (anchor(&edge.source, &edge.source_port), anchor(&edge.target, &edge.target_port)) {
            inner.edges[e].points = vec![a, b];
        }
    }
}

impl Layout {
    pub fn crossings(&self) -> usize {
        count_crossings(&self.layered, &self.crossmin.orders) + self.children.values().map(Layout::crossings).sum::<usize>()
    }

    pub fn backward_edges(&self) -> usize {
        self.reversals.reversed.len() + self.children.values().map(Layout::backward_edges).sum::<usize>()
    }

    fn inversions(&self, scope: InversionScope) -> usize {
        count_inversions(&self.layered, &self.crossmin.orders, scope)
            + self.children.values().map(|c| c.inversions(scope)).sum::<usize>()
    }

    /// Counts over this level and every child level.
    pub fn metrics(&self) -> MetricsReport {
        MetricsReport {
            crossings: self.crossings(),
            backward_edges: self.backward_edges(),
            node_inversions: self.inversions(InversionScope::NodesInLayer { group_restricted: self.group_restricted }),
            edge_inversions: self.inversions(InversionScope::EdgesAtPort),
            layer_count: self.layering.layer_count(),
            stability_distance: None,
        }
    }

    /// Layer orders as node ids (dummies included).
    pub fn layer_ids(&self) -> Vec<Vec<String>> {
        self.crossmin.orders.ids(&self.layered)
    }

    pub fn trace(&self) -> PhaseTrace {
        PhaseTrace::of(self)
    }
}

/// Intermediate results of every phase, one titled section each.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseTrace {
    pub sections: Vec<(String, Vec<String>)>,
}

pub const PHASES: [&str; 5] = ["cycle breaking", "layer assignment", "crossing minimization", "node placement", "edge routing"];

impl PhaseTrace {
    fn of(layout: &Layout) -> Self {
        let mut sections: Vec<(String, Vec<String>)> = PHASES.iter().map(|p| (p.to_string(), Vec::new())).collect();
        Self::collect(layout, "", &mut sections);
        PhaseTrace { sections }
    }

    fn collect(layout: &Layout, prefix: &str, sections: &mut [(String, Vec<String>)]) {
        let g = &layout.graph;
        let scope = if prefix.is_empty() { String::new() } else { format!("[{prefix}] ") };

        let reversed: Vec<String> = g
            .edges
            .iter()
            .filter(|e| layout.reversals.reversed.contains(&e.id))
            .map(|e| format!("{} ({}->{})", e.id, e.source, e.target))
            .collect();
        sections[0].1.push(format!(
            "{scope}reversed: {}",
            if reversed.is_empty() { "none".to_string() } else { reversed.join(", ") }
        ));

        for (l, members) in layout.layering.layers().iter().enumerate() {
            let ids: Vec<&str> = members.iter().map(|&v| g.nodes[v].id.as_str()).collect();
            sections[1].1.push(format!("{scope}layer {l}: {}", ids.join(" ")));
        }
        sections[1].1.push(format!("{scope}dummies: {}", layout.layered.nodes.len() - layout.layered.real_count()));

        let lg = &layout.layered;
        for (l, ids) in layout.crossmin.initial.ids(lg).iter().enumerate() {
            sections[2].1.push(format!("{scope}pre-order {l}: {}", ids.join(" ")));
        }
        for (l, ids) in layout.crossmin.orders.ids(lg).iter().enumerate() {
            sections[2].1.push(format!("{scope}final {l}: {}", ids.join(" ")));
        }
        let initial = count_crossings(lg, &layout.crossmin.initial);
        let scope_inv = InversionScope::NodesInLayer { group_restricted: layout.group_restricted };
        sections[2].1.push(format!(
            "{scope}crossings: {initial} -> {}, node inversions: {} -> {}, sweeps: {}",
            count_crossings(lg, &layout.crossmin.orders),
            count_inversions(lg, &layout.crossmin.initial, scope_inv),
            count_inversions(lg, &layout.crossmin.orders, scope_inv),
            layout.crossmin.sweeps
        ));

        for n in &layout.result.nodes {
            sections[3].1.push(format!("{scope}{} at ({:.1}, {:.1}) size {:.1}x{:.1}", n.id, n.x, n.y, n.width, n.height));
        }

        for e in &layout.result.edges {
            let pts: Vec<String> = e.points.iter().map(|p| format!("({:.1}, {:.1})", p.x, p.y)).collect();
            let flag = if e.reversed { " reversed" } else { "" };
            sections[4].1.push(format!("{scope}{}{flag}: {}", e.id, pts.join(" ")));
        }

        for (id, child) in &layout.children {
            let p = if prefix.is_empty() { id.clone() } else { format!("{prefix}/{id}") };
            Self::collect(child, &p, sections);
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, (title, lines)) in self.sections.iter().enumerate() {
            let _ = writeln!(out, "== {}. {title} ==", i + 1);
            for line in lines {
                let _ = writeln!(out, "  {line}");
            }
        }
        out
    }
}
