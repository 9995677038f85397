//! Exact polyhedral cones over the rationals.

mod cone;
mod dd;
pub mod linalg;
mod lp;
mod project;
mod rational;

pub use cone::{cones_equal, ConeComparison, ConeH, ConeJson, ConeRep, ConeV};
pub use dd::{double_description, facet_enumeration};
pub use lp::{dual_membership, verify_refutation, Certificate, Membership};
pub use project::project_cone;
pub use rational::Rational;
