//! Exact uniform-additivity cones for entropic channel formulas.

pub mod additivity;
pub mod decouplings;
pub mod entropic;
pub mod error;
pub mod inequalities;
pub mod numlab;
pub mod polyhedra;
pub mod report;

pub use error::{Error, Result};
