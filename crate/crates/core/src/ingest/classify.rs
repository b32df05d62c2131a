//! Which declared orders carry meaning and may not be changed by layout.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderClass {
    /// Order has semantics; no strategy may change it.
    SemanticFixed,
    #[default]
    ConventionFree,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct OrderClassification {
    /// Per node kind; kinds not listed use `default_node`.
    pub node_kinds: BTreeMap<String, OrderClass>,
    pub default_node: OrderClass,
    /// Informational: no strategy rewrites edge order.
    pub edges: OrderClass,
    /// Fixed port order for every node when semantic.
    pub ports: OrderClass,
    /// Node kind → ordering group, applied to nodes left in group 0.
    pub groups: BTreeMap<String, usize>,
}

impl OrderClassification {
    /// Transition order is priority; state order is free.
    pub fn statechart() -> Self {
        OrderClassification { edges: OrderClass::SemanticFixed, ..Self::default() }
    }

    /// Everything free unless configured otherwise.
    pub fn dataflow() -> Self {
        Self::default()
    }

    pub fn node_class(&self, kind: &str) -> OrderClass {
        self.node_kinds.get(kind).copied().unwrap_or(self.default_node)
    }

    /// Node kinds present in `graph` (any depth) whose order is semantic.
    pub fn fixed_kinds_in(&self, graph: &Graph) -> BTreeSet<String> {
        let mut kinds = BTreeSet::new();
        collect_kinds(graph, &mut kinds);
        kinds.into_iter().filter(|k| self.node_class(k) == OrderClass::SemanticFixed).collect()
    }

    /// Copies `graph` with group rules applied to every level.
    pub fn apply_groups(&self, graph: &Graph) -> Graph {
        let mut out = graph.clone();
        for node in &mut out.nodes {
            if node.group == 0 {
                if let Some(&g) = self.groups.get(&node.kind) {
                    node.group = g;
                }
            }
            if let Some(child) = &node.children {
                node.children = Some(Box::new(self.apply_groups(child)));
            }
        }
        out
    }
}

fn collect_kinds(graph: &Graph, out: &mut BTreeSet<String>) {
    for node in &graph.nodes {
        out.insert(node.kind.clone());
        if let Some(c) = &node.children {
            collect_kinds(c, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_rules_only_fill_default_groups() {
        let mut g = Graph::default();
        g.add_node("a").kind = "timer".into();
        let b = g.add_node("b");
        b.kind = "timer".into();
        b.group = 3;
        let mut c = OrderClassification::dataflow();
        c.groups.insert("timer".into(), 1);
        let out = c.apply_groups(&g);
        assert_eq!((out.nodes[0].group, out.nodes[1].group), (1, 3));
    }

    #[test]
    fn fixed_kinds_follow_default() {
        let mut g = Graph::default();
        g.add_node("a").kind = "state".into();
        g.add_node("b").kind = "reaction".into();
        let mut c = OrderClassification::dataflow();
        c.node_kinds.insert("reaction".into(), OrderClass::SemanticFixed);
        assert_eq!(c.fixed_kinds_in(&g), BTreeSet::from(["reaction".to_string()]));
        c.default_node = OrderClass::SemanticFixed;
        c.node_kinds.insert("reaction".into(), OrderClass::ConventionFree);
        assert_eq!(c.fixed_kinds_in(&g), BTreeSet::from(["state".to_string()]));
    }
}
