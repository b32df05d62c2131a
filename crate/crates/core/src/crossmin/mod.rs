//! In-layer ordering of nodes and ports.
//!
//! Model order enters at three points: as the initial pre-order
//! ([`preorder_by_model_order`]), as the tie-breaker and secondary criterion of
//! the barycenter sweep ([`barycenter_sweep`]), or as the sole source of the
//! order when sweeps are switched off ([`CrossMinStrategy::StrictMo`]).

mod ports;
mod preorder;
mod sweep;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::Side;
use crate::layering::LayeredGraph;

pub use ports::order_ports;
pub use preorder::{compare_dummy, preorder_by_model_order};
pub use sweep::{barycenter_sweep, SweepOutcome, BARYCENTER_TIE_EPSILON, MAX_SWEEPS};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossMinStrategy {
    /// Layer sweeps from a seeded shuffle; model order unused.
    Barycenter,
    /// Model-order pre-order, then sweeps with model order as tie-breaker and
    /// secondary criterion.
    #[default]
    BarycenterMo,
    /// Model-order pre-order only, no sweeps.
    StrictMo,
}

impl CrossMinStrategy {
    pub const ALL: [CrossMinStrategy; 3] = [CrossMinStrategy::Barycenter, CrossMinStrategy::BarycenterMo, CrossMinStrategy::StrictMo];

    pub fn as_str(self) -> &'static str {
        match self {
            CrossMinStrategy::Barycenter => "barycenter",
            CrossMinStrategy::BarycenterMo => "barycenter-mo",
            CrossMinStrategy::StrictMo => "strict-mo",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PortPolicy {
    /// Ports follow the positions of the nodes they connect to.
    #[default]
    Derived,
    /// Ports keep their model order.
    Fixed,
}

impl PortPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            PortPolicy::Derived => "derived",
            PortPolicy::Fixed => "fixed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [PortPolicy::Derived, PortPolicy::Fixed].into_iter().find(|c| c.as_str() == s)
    }
}

/// How an element is located in the previous layer when a dummy is compared.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DummyRule {
    /// Position of the predecessor on the first-declared incoming edge.
    #[default]
    First,
    /// Median position over all predecessors.
    All,
}

impl DummyRule {
    pub fn as_str(self) -> &'static str {
        match self {
            DummyRule::First => "first",
            DummyRule::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [DummyRule::First, DummyRule::All].into_iter().find(|c| c.as_str() == s)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CrossMinOptions {
    pub strategy: CrossMinStrategy,
    /// Model-order comparisons only between nodes of equal group.
    pub group_restricted: bool,
    pub port_policy: PortPolicy,
    pub dummy_rule: DummyRule,
    /// Shuffle seed for [`CrossMinStrategy::Barycenter`].
    pub seed: u64,
    /// Node kinds whose relative in-layer order must follow model order.
    pub fixed_node_kinds: BTreeSet<String>,
    /// Port order carries semantics and is never derived.
    pub fixed_ports: bool,
}

/// Port indices of one node, per side, in drawing order (top to bottom or
/// left to right along the side).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PortOrder {
    pub north: Vec<usize>,
    pub east: Vec<usize>,
    pub south: Vec<usize>,
    pub west: Vec<usize>,
}

impl PortOrder {
    pub fn side(&self, side: Side) -> &[usize] {
        match side {
            Side::North => &self.north,
            Side::East => &self.east,
            Side::South => &self.south,
            Side::West => &self.west,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut Vec<usize> {
        match side {
            Side::North => &mut self.north,
            Side::East => &mut self.east,
            Side::South => &mut self.south,
            Side::West => &mut self.west,
        }
    }

    pub fn sides(&self) -> [&[usize]; 4] {
        [&self.north, &self.east, &self.south, &self.west]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerOrders {
    /// Layered-node indices per layer, in drawing order.
    pub layers: Vec<Vec<usize>>,
    /// In-layer position of every layered node.
    pub position: Vec<usize>,
    /// Port order per real node.
    pub ports: Vec<PortOrder>,
}

impl LayerOrders {
    pub fn from_layers(lg: &LayeredGraph, layers: Vec<Vec<usize>>) -> Self {
        let mut orders = LayerOrders { layers, position: vec![0; lg.nodes.len()], ports: vec![PortOrder::default(); lg.real_count()] };
        orders.refresh_positions();
        orders
    }

    pub fn refresh_positions(&mut self) {
        for layer in &self.layers {
            for (i, &v) in layer.iter().enumerate() {
                self.position[v] = i;
            }
        }
    }

    /// Rank of every port inside its side list, `[real node][port]`.
    pub fn port_ranks(&self, lg: &LayeredGraph) -> Vec<Vec<usize>> {
        lg.graph
            .nodes
            .iter()
            .enumerate()
            .map(|(v, node)| {
                let mut ranks = vec![0; node.ports.len()];
                if let Some(order) = self.ports.get(v) {
                    for side in order.sides() {
                        for (r, &p) in side.iter().enumerate() {
                            ranks[p] = r;
                        }
                    }
                }
                ranks
            })
            .collect()
    }

    /// Node ids per layer (dummies included).
    pub fn ids(&self, lg: &LayeredGraph) -> Vec<Vec<String>> {
        self.layers.iter().map(|l| l.iter().map(|&v| lg.nodes[v].id.clone()).collect()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct CrossMinResult {
    pub orders: LayerOrders,
    /// Orders before any sweep.
    pub initial: LayerOrders,
    pub sweeps: usize,
}

/// Keeps the relative order of constrained real nodes (semantic node kinds) at
/// their model order without moving anything else.
pub(crate) fn enforce_fixed_kinds(lg: &LayeredGraph, layer: &mut [usize], kinds: &BTreeSet<String>) {
    for kind in kinds {
        let slots: Vec<usize> = (0..layer.len())
            .filter(|&i| lg.nodes[layer[i]].real().is_some_and(|v| &lg.graph.nodes[v].kind == kind))
            .collect();
        let mut members: Vec<usize> = slots.iter().map(|&i| layer[i]).collect();
        members.sort_by_key(|&v| lg.nodes[v].model_order);
        for (slot, v) in slots.into_iter().zip(members) {
            layer[slot] = v;
        }
    }
}

pub fn minimize_crossings(lg: &LayeredGraph, opts: &CrossMinOptions) -> CrossMinResult {
    let initial_layers = match opts.strategy {
        // nothing to sweep against: keep the input order
        CrossMinStrategy::Barycenter if lg.layer_count() < 2 => lg.layers.clone(),
        CrossMinStrategy::Barycenter => shuffled(lg, opts),
        CrossMinStrategy::BarycenterMo | CrossMinStrategy::StrictMo => preorder_by_model_order(lg, opts.dummy_rule),
    };
    let mut initial = LayerOrders::from_layers(lg, initial_layers);
    initial.ports = order_ports(lg, &initial, opts);
    match opts.strategy {
        CrossMinStrategy::StrictMo => CrossMinResult { orders: initial.clone(), initial, sweeps: 0 },
        _ => {
            let outcome = barycenter_sweep(lg, &initial, opts);
            CrossMinResult { orders: outcome.orders, initial, sweeps: outcome.sweeps }
        }
    }
}

fn shuffled(lg: &LayeredGraph, opts: &CrossMinOptions) -> Vec<Vec<usize>> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    lg.layers
        .iter()
        .map(|l| {
            let mut l = l.clone();
            l.shuffle(&mut rng);
            enforce_fixed_kinds(lg, &mut l, &opts.fixed_node_kinds);
            l
        })
        .collect()
}
