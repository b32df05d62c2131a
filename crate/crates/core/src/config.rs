//! Layout configuration, input-kind profiles and the TOML file form.

use serde::{Deserialize, Serialize};

use crate::crossmin::{CrossMinOptions, CrossMinStrategy, DummyRule, PortPolicy};
use crate::cycles::CycleBreakStrategy;
use crate::geometry::{DEFAULT_LAYER_SPACING, DEFAULT_NODE_SPACING};
use crate::graph::{Direction, Graph};
use crate::ingest::{InputKind, OrderClass, OrderClassification};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct LayoutConfig {
    pub cycle_breaking: CycleBreakStrategy,
    pub crossing_min: CrossMinStrategy,
    pub group_restricted: bool,
    pub port_policy: PortPolicy,
    pub dummy_rule: DummyRule,
    /// `None` keeps the direction stored in the graph.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    pub node_spacing: f64,
    pub layer_spacing: f64,
    pub seed: u64,
    pub classification: OrderClassification,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            cycle_breaking: CycleBreakStrategy::StrictMo,
            crossing_min: CrossMinStrategy::BarycenterMo,
            group_restricted: false,
            port_policy: PortPolicy::Derived,
            dummy_rule: DummyRule::First,
            direction: None,
            node_spacing: DEFAULT_NODE_SPACING,
            layer_spacing: DEFAULT_LAYER_SPACING,
            seed: 0,
            classification: OrderClassification::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Parse(#[from] toml::de::Error),
}

impl LayoutConfig {
    /// Model order steers the flow: strict cycle breaking, downward layout,
    /// ports derived from edges.
    pub fn statechart() -> Self {
        LayoutConfig {
            direction: Some(Direction::Down),
            classification: OrderClassification::statechart(),
            ..Self::default()
        }
    }

    /// Model order as tie-breaker: depth-first cycle breaking, group-restricted
    /// comparisons, fixed port order, rightward layout.
    pub fn dataflow() -> Self {
        LayoutConfig {
            cycle_breaking: CycleBreakStrategy::DepthFirstMo,
            group_restricted: true,
            port_policy: PortPolicy::Fixed,
            direction: None,
            classification: OrderClassification::dataflow(),
            ..Self::default()
        }
    }

    pub fn for_input(kind: InputKind) -> Self {
        match kind {
            InputKind::Dsl => Self::statechart(),
            InputKind::Json => Self::dataflow(),
        }
    }

    pub fn apply(&mut self, o: &ConfigOverrides) {
        if let Some(v) = o.cycle_breaking {
            self.cycle_breaking = v;
        }
        if let Some(v) = o.crossing_min {
            self.crossing_min = v;
        }
        if let Some(v) = o.group_restricted {
            self.group_restricted = v;
        }
        if let Some(v) = o.port_policy {
            self.port_policy = v;
        }
        if let Some(v) = o.dummy_rule {
            self.dummy_rule = v;
        }
        if let Some(v) = o.direction {
            self.direction = Some(v);
        }
        if let Some(v) = o.node_spacing {
            self.node_spacing = v;
        }
        if let Some(v) = o.layer_spacing {
            self.layer_spacing = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = &o.classification {
            self.classification = v.clone();
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Crossing-minimization options for `graph` (its node kinds decide which
    /// kinds are order-constrained).
    pub fn crossmin_options(&self, graph: &Graph) -> CrossMinOptions {
        CrossMinOptions {
            strategy: self.crossing_min,
            group_restricted: self.group_restricted,
            port_policy: self.port_policy,
            dummy_rule: self.dummy_rule,
            seed: self.seed,
            fixed_node_kinds: self.classification.fixed_kinds_in(graph),
            fixed_ports: self.classification.ports == OrderClass::SemanticFixed,
        }
    }
}

/// Partial configuration: a config file or a set of flags. Every field of
/// [`LayoutConfig`] is reachable, so a full config file is also valid here.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigOverrides {
    pub cycle_breaking: Option<CycleBreakStrategy>,
    pub crossing_min: Option<CrossMinStrategy>,
    pub group_restricted: Option<bool>,
    pub port_policy: Option<PortPolicy>,
    pub dummy_rule: Option<DummyRule>,
    pub direction: Option<Direction>,
    pub node_spacing: Option<f64>,
    pub layer_spacing: Option<f64>,
    pub seed: Option<u64>,
    pub classification: Option<OrderClassification>,
}

impl ConfigOverrides {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }
}
