//! Uniform additivity cones: exact outer bounds from witness distributions,
//! exact inner certificates from known entropy inequalities, and their
//! composition over several auxiliary variables.

pub mod certify;
pub mod coincidence;
pub mod coords;
pub mod cone;
pub mod multi;
pub mod transform;
pub mod witness;

pub use certify::{certify_ray, Basis, RayCertificate, RayCheck};
pub use coincidence::{coincidence_check, CoincidenceReport};
pub use coords::{boundedness_constraints, full_coords};
pub use cone::{
    block_cone, inner_equals_outer, one_var_cone, one_var_cone_with, projected_inner_cone, witness_outer_cone,
    witness_values, zero_var_cone, AdditivityCone, WitnessUse,
};
pub use multi::{block_code, multi_var_cone, multi_var_cone_with};
pub use transform::distribution_transform;
pub use witness::{witness_library, witnesses_for, WitnessSpec};
