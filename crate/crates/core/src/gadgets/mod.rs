//! Vertex-level gadgets: hubs, units, expansions, adjusters and octopuses,
//! each with a builder and a clause-by-clause validator.

mod adjuster;
mod expansion;
mod hub;
mod octopus;
mod unit;

use thiserror::Error;

pub use adjuster::{
    adjuster_length_menu, adjuster_length_menu_with, build_simple_adjuster, link_adjusters, validate_adjuster,
    Adjuster, DEFAULT_MENU_CAP,
};
pub use expansion::{grow_expansion, trim_expansion, validate_expansion, Expansion};
pub use hub::{build_hub, validate_hub, Hub};
pub use octopus::{build_octopus, validate_octopus, EndSide, Octopus};
pub use unit::{build_unit, build_unit_with, validate_unit, Unit, UnitOptions, UnitParams};

use crate::connector::PathWitness;
use crate::error::Error;

/// Why a gadget builder came up empty. These are expected outcomes on
/// hosts that are too sparse or too small, not programming errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildFailure {
    #[error("no vertex supports a hub of the requested shape")]
    InsufficientDegree,
    #[error("second layers collide; host is not C4-free")]
    NotC4Free,
    #[error("only {found} hubs could be placed, {needed} needed")]
    HubPoolExhausted { found: usize, needed: usize },
    #[error("no core reached {needed} hubs; best reached {}", .best.len())]
    ConnectionStalled { needed: usize, best: Vec<PathWitness> },
    #[error("host has no cycle")]
    Acyclic,
    #[error("adjuster ends could not be grown disjointly")]
    ExpansionCollision,
    #[error("center of size {size} exceeds the limit {limit}")]
    CenterTooLarge { size: usize, limit: usize },
    #[error("no connecting path between the adjusters")]
    Disconnected,
    #[error("only {} of {needed} arms attached", .partial.arms.len())]
    ArmsStalled { needed: usize, partial: Box<Octopus> },
    #[error(transparent)]
    Invalid(#[from] Error),
}

pub type BuildResult<T> = std::result::Result<T, BuildFailure>;
