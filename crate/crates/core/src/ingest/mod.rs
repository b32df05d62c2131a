//! Input formats: the statechart language and the JSON graph format.

pub mod classify;
pub mod dsl;
pub mod json;

use std::path::Path;

pub use classify::{OrderClass, OrderClassification};
pub use dsl::{dsl_to_graph, parse_dsl, print_dsl, DslError, DslErrorKind, DslModel, DslState, DslTransition};
pub use json::{parse_json_graph, parse_json_graph_with, JsonError, JsonGraph, SchemaMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    Dsl,
    Json,
}

impl InputKind {
    /// `.chart` and `.json` decide by extension; anything else is JSON when
    /// the text starts with `{`.
    pub fn detect(path: &Path, text: &str) -> InputKind {
        match path.extension().and_then(|e| e.to_str()) {
            Some("chart") => InputKind::Dsl,
            Some("json") => InputKind::Json,
            _ if text.trim_start().starts_with('{') => InputKind::Json,
            _ => InputKind::Dsl,
        }
    }
}
