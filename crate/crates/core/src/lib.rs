//! Balanced clique subdivisions: sublinear expanders, gadget construction,
//! exact-length routing, dependent random choice and certificate checking.

pub mod assembler;
pub mod certify;
pub mod connector;
pub mod drc;
pub mod error;
pub mod expander;
pub mod gadgets;
pub mod generators;
pub mod graph;
pub mod io;
pub mod router;

pub use certify::{SubdivisionCertificate, ValidationReport};
pub use error::{Error, Result};
pub use graph::{Graph, Subgraph, VertexSet};
