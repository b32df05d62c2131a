//! Coordinates, edge routes and the two output formats.

mod json;
mod place;
mod route;
mod svg;

use serde::{Deserialize, Serialize};

use crate::graph::{Direction, Side};

pub use json::emit_layout_json;
pub use place::{place_nodes, Placement};
pub use route::{route_edges, SELF_LOOP_REACH};
pub use svg::{emit_svg, SvgOptions};

pub const DEFAULT_NODE_SPACING: f64 = 20.0;
pub const DEFAULT_LAYER_SPACING: f64 = 40.0;
/// Gap between a compound node's border and its children.
pub const COMPOUND_PADDING: f64 = 10.0;
/// Extra room above the children for the compound's label.
pub const COMPOUND_HEADER: f64 = 16.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub fn center(&self) -> Point {
        Point::new(self.x + self.width / 2.0, self.y + self.height / 2.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        const EPS: f64 = 1e-6;
        p.x >= self.x - EPS && p.y >= self.y - EPS && p.x <= self.x + self.width + EPS && p.y <= self.y + self.height + EPS
    }

    /// Smallest rectangle around all points; zero-sized at the origin when empty.
    pub fn bounding(points: impl IntoIterator<Item = Point>) -> Rect {
        let mut it = points.into_iter().peekable();
        if it.peek().is_none() {
            return Rect::default();
        }
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in it {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        Rect { x: x0, y: y0, width: x1 - x0, height: y1 - y0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PortLayout {
    pub id: String,
    pub side: Side,
    pub anchor: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeLayout {
    pub id: String,
    pub kind: String,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub layer: usize,
    /// Position inside the layer.
    pub position: usize,
    /// Same order as the node's port list.
    pub ports: Vec<PortLayout>,
    pub children: Option<Box<LayoutResult>>,
}

impl NodeLayout {
    pub fn rect(&self) -> Rect {
        Rect { x: self.x, y: self.y, width: self.width, height: self.height }
    }

    pub fn port(&self, id: &str) -> Option<&PortLayout> {
        self.ports.iter().find(|p| p.id == id)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeLayout {
    pub id: String,
    pub source: String,
    pub target: String,
    /// From the declared source to the declared target.
    pub points: Vec<Point>,
    pub reversed: bool,
    pub priority_label: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayoutResult {
    pub direction: Direction,
    /// Real nodes in model order.
    pub nodes: Vec<NodeLayout>,
    /// Edges in graph list order.
    pub edges: Vec<EdgeLayout>,
    pub canvas: Rect,
}

impl LayoutResult {
    pub fn node(&self, id: &str) -> Option<&NodeLayout> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&EdgeLayout> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// Every point that must lie inside the canvas.
    pub fn extent_points(&self) -> Vec<Point> {
        let mut pts = Vec::new();
        for n in &self.nodes {
            pts.push(Point::new(n.x, n.y));
            pts.push(Point::new(n.x + n.width, n.y + n.height));
            pts.extend(n.ports.iter().map(|p| p.anchor));
        }
        for e in &self.edges {
            pts.extend(e.points.iter().copied());
        }
        pts
    }

    pub fn recompute_canvas(&mut self) {
        self.canvas = Rect::bounding(self.extent_points());
    }

    /// Moves every coordinate, children included.
    pub fn translate(&mut self, dx: f64, dy: f64) {
        for n in &mut self.nodes {
            n.x += dx;
            n.y += dy;
            for p in &mut n.ports {
                p.anchor.x += dx;
                p.anchor.y += dy;
            }
            if let Some(c) = &mut n.children {
                c.translate(dx, dy);
            }
        }
        for e in &mut self.edges {
            for p in &mut e.points {
                p.x += dx;
                p.y += dy;
            }
        }
        self.canvas.x += dx;
        self.canvas.y += dy;
    }
}
