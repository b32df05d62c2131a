//! Layered graph layout in which the declaration order of nodes, edges and
//! ports (their *model order*) can constrain, break ties in, or be ignored by
//! every phase: cycle breaking, layer assignment, crossing minimization,
//! placement and routing.
//!
//! ```
//! use mo_layout::config::LayoutConfig;
//! use mo_layout::ingest::{dsl_to_graph, parse_dsl};
//! use mo_layout::pipeline::layout;
//!
//! let model = parse_dsl("chart M { initial state A -> B state B -> A }").unwrap();
//! let graph = dsl_to_graph(&model).unwrap();
//! let result = layout(&graph, &LayoutConfig::statechart()).unwrap();
//! assert_eq!(result.reversals.reversed.len(), 1);
//! ```

pub mod cli;
pub mod config;
pub mod crossmin;
pub mod cycles;
pub mod exec;
pub mod geometry;
pub mod graph;
pub mod ingest;
pub mod layering;
pub mod metrics;
pub mod pipeline;
