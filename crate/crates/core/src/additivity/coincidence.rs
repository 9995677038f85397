//! Classical elemental versus quantum basic certification of the same cone.

use serde::{Deserialize, Serialize};

use super::certify::Basis;
use super::cone::{block_cone, projected_inner_cone, AdditivityCone};
use super::multi::multi_var_cone_with;
use crate::decouplings::DecouplingCode;
use crate::error::Result;
use crate::polyhedra::{cones_equal, ConeComparison, ConeRep, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceReport {
    pub code: DecouplingCode,
    pub quantum_exact: bool,
    pub classical_exact: bool,
    /// Both computed cones agree.
    pub equal: bool,
    /// For single blocks, the projected inner cones of both bases agree too.
    pub inner_equal: Option<bool>,
    pub counterexample: Option<Vec<Rational>>,
}

impl CoincidenceReport {
    pub fn passed(&self) -> bool {
        self.quantum_exact && self.classical_exact && self.equal && self.inner_equal != Some(false)
    }
}

fn cone_for(code: &DecouplingCode, basis: Basis) -> Result<AdditivityCone> {
    if code.n_aux() <= 1 {
        block_cone(code, basis)
    } else {
        multi_var_cone_with(code.n_aux(), code, basis)
    }
}

fn witness(c: ConeComparison) -> Option<Vec<Rational>> {
    match c {
        ConeComparison::Equal => None,
        ConeComparison::OnlyInFirst(g) | ConeComparison::OnlyInSecond(g) => Some(g),
    }
}

pub fn coincidence_check(code: &DecouplingCode) -> Result<CoincidenceReport> {
    let q = cone_for(code, Basis::Quantum)?;
    let c = cone_for(code, Basis::Classical)?;
    let mut counterexample = witness(cones_equal(&ConeRep::H(q.h.clone()), &ConeRep::H(c.h.clone()))?);
    let equal = counterexample.is_none();
    let inner_equal = if code.n_aux() <= 1 {
        let qi = projected_inner_cone(code, &q.coords, Basis::Quantum)?;
        let ci = projected_inner_cone(code, &c.coords, Basis::Classical)?;
        let cmp = witness(cones_equal(&ConeRep::H(qi), &ConeRep::H(ci))?);
        let same = cmp.is_none();
        counterexample = counterexample.or(cmp);
        Some(same)
    } else {
        None
    };
    Ok(CoincidenceReport {
        code: code.clone(),
        quantum_exact: q.is_exact(),
        classical_exact: c.is_exact(),
        equal,
        inner_equal,
        counterexample,
    })
}
