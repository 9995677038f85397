//! Exact certificates that Δ of a given α is a nonnegative combination of
//! known entropy inequalities on the composite system.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::coords::is_bounded;
use crate::decouplings::{composite_context, delta_functional, DecouplingCode};
use crate::entropic::{formula, LinearEntropyFunctional as F, SubsetMask, SystemContext};
use crate::error::{Error, Result};
use crate::inequalities::{classical_elemental_set, generator_matrix, quantum_basic_set, InequalityInstance};
use crate::polyhedra::{dual_membership, Membership, Rational};

/// Which family of valid inequalities certificates may draw on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Quantum,
    Classical,
}

pub(crate) struct BasisData {
    pub instances: Vec<InequalityInstance>,
    pub dense: Vec<Vec<Rational>>,
}

pub(crate) fn basis_data(ctx: &SystemContext, basis: Basis) -> Result<Arc<BasisData>> {
    static CACHE: OnceLock<Mutex<HashMap<(Vec<String>, Basis), Arc<BasisData>>>> = OnceLock::new();
    let key = (ctx.names().to_vec(), basis);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(d) = cache.lock().expect("cache poisoned").get(&key) {
        return Ok(d.clone());
    }
    let instances = match basis {
        Basis::Quantum => quantum_basic_set(ctx)?,
        Basis::Classical => classical_elemental_set(ctx)?,
    };
    let dense = generator_matrix(&instances);
    let data = Arc::new(BasisData { instances, dense });
    cache.lock().expect("cache poisoned").insert(key, data.clone());
    Ok(data)
}

/// `Δ(α) = Σ c_i g_i` with every `c_i > 0` and `g_i ≥ 0` a valid inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayCertificate {
    pub alpha: F,
    pub formula: String,
    pub delta: F,
    pub terms: Vec<(InequalityInstance, Rational)>,
}

impl RayCertificate {
    /// Exact re-check: Δ recomputed from α and the code, and the weighted
    /// sum of the instances reproduces it.
    pub fn verify(&self, code: &DecouplingCode) -> bool {
        let Ok(delta) = delta_functional(&self.alpha, code) else { return false };
        if delta != self.delta || self.terms.iter().any(|(_, c)| !c.is_positive()) {
            return false;
        }
        let mut sum = F::zero(delta.context());
        for (inst, c) in &self.terms {
            if sum.add_scaled(&inst.functional, c).is_err() {
                return false;
            }
        }
        sum == delta
    }

    /// Push through a relabeling of the α context and the composite context.
    pub fn relabeled(
        &self,
        alpha_ctx: &SystemContext,
        alpha_images: &[SubsetMask],
        comp_ctx: &SystemContext,
        comp_images: &[SubsetMask],
    ) -> Result<RayCertificate> {
        let alpha = self.alpha.relabel_systems(alpha_ctx, alpha_images)?;
        let delta = self.delta.relabel_systems(comp_ctx, comp_images)?;
        let terms = self
            .terms
            .iter()
            .map(|(inst, c)| {
                let parts = inst.parts.iter().map(|&p| crate::entropic::image_of(p, comp_images)).collect();
                Ok((InequalityInstance::new(comp_ctx, inst.kind, parts)?, c.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RayCertificate { formula: formula::render_pretty(&alpha), alpha, delta, terms })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RayCheck {
    Certified(RayCertificate),
    /// A vector `h` over the composite subsets (indexed by `mask - 1`) that
    /// satisfies every inequality of the basis yet has `Δ(h) < 0`.
    Refuted(Vec<Rational>),
}

impl RayCheck {
    pub fn certificate(&self) -> Option<&RayCertificate> {
        match self {
            RayCheck::Certified(c) => Some(c),
            RayCheck::Refuted(_) => None,
        }
    }
}

pub fn certify_ray(alpha: &F, code: &DecouplingCode, basis: Basis) -> Result<RayCheck> {
    if !is_bounded(alpha) {
        return Err(Error::Domain(format!("{} violates the boundedness equalities", formula::render_pretty(alpha))));
    }
    let delta = delta_functional(alpha, code)?;
    let ctx = composite_context(code.n_aux())?;
    let data = basis_data(&ctx, basis)?;
    let target = delta.to_dense();
    match dual_membership(&target, &data.dense)? {
        Membership::Member(cert) => {
            let terms =
                cert.multipliers.iter().filter(|(_, c)| c.is_positive()).map(|(&i, c)| (data.instances[i].clone(), c.clone())).collect();
            let out = RayCertificate { alpha: alpha.clone(), formula: formula::render_pretty(alpha), delta, terms };
            debug_assert!(out.verify(code));
            Ok(RayCheck::Certified(out))
        }
        Membership::Refuted(w) => Ok(RayCheck::Refuted(w)),
    }
}
