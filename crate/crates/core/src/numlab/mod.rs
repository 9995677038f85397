//! Numeric experiments on concrete channels and states.

pub mod channel;
pub mod optimize;
pub mod predicates;
pub mod sample;

pub use channel::IsometryChannel;
pub use optimize::{channel_output, formula_value, maximize_formula, Maximization, OptimizerConfig};
pub use predicates::{
    additivity_spot_check, cq_criterion_check, informational_degradability_check, CqReport, DegradabilityCheck,
    DegradabilityVerdict, SpotCheck,
};
pub use sample::{
    classical_delta_check, composite_state, numeric_delta_check, random_isometry, sample_purified_state, sample_state,
    DeltaCheck, DeltaDims,
};
