//! Poincaré profiles of round-tree graphs: exact and numeric Poincaré
//! constants, canonical-path lower bounds, separation profiles, and the
//! Cantor spaces at the boundary.

pub mod cantor;
pub mod cli;
pub mod config;
pub mod congestion;
pub mod error;
pub mod graph;
pub mod poincare;
pub mod profiles;
pub mod round_tree;

pub use config::Budget;
pub use error::{Error, Result};
pub use graph::{Graph, GraphJson, VertexFunction};
pub use round_tree::yk::YkGraph;
pub use round_tree::{build_round_tree, RoundTreeGraph};
