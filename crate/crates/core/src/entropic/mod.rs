//! Subset-indexed entropies of classical distributions and quantum states.

pub mod classical;
pub mod context;
pub mod density;
pub mod eigen;
pub mod formula;
pub mod functional;

pub use classical::{ClassicalDistribution, Variable};
pub use context::{submasks, SubsetMask, SystemContext};
pub use density::{embed_classical, DensityMatrix, PureState, C64};
pub use functional::{image_of, EntropyVector, LinearEntropyFunctional};

use crate::error::Result;

/// Anything whose marginal entropies can be tabulated.
pub trait EntropySource {
    fn entropy_vector(&self) -> Result<EntropyVector>;
}

impl EntropySource for ClassicalDistribution {
    fn entropy_vector(&self) -> Result<EntropyVector> {
        ClassicalDistribution::entropy_vector(self)
    }
}

impl EntropySource for DensityMatrix {
    fn entropy_vector(&self) -> Result<EntropyVector> {
        DensityMatrix::entropy_vector(self)
    }
}

impl EntropySource for PureState {
    fn entropy_vector(&self) -> Result<EntropyVector> {
        PureState::entropy_vector(self)
    }
}

/// Evaluate `f` on the entropies of `source`.
pub fn evaluate_on(f: &LinearEntropyFunctional, source: &impl EntropySource) -> Result<f64> {
    f.evaluate(&source.entropy_vector()?)
}
