//! Cones for several auxiliary variables as products of per-block cones.

use super::certify::Basis;
use super::coords::{boundedness_constraints, full_coords, t_block};
use super::cone::{block_cone, AdditivityCone, WitnessUse};
use crate::decouplings::{alpha_context, composite_context, DecouplingCode};
use crate::entropic::SubsetMask;
use crate::error::{Error, Result};
use crate::polyhedra::{ConeH, ConeV, Rational};

pub const MAX_MULTI_AUX: usize = 3;

/// The code governing the block `V_J` (`J` a bitmask over the variables).
pub fn block_code(code: &DecouplingCode, j: u32) -> DecouplingCode {
    if j == 0 {
        DecouplingCode::trivial()
    } else {
        let (a, b) = code.induced(j);
        DecouplingCode::single(a, b).expect("induced entries lie in 0..=3")
    }
}

fn block_masks(j: u32) -> Vec<SubsetMask> {
    if j == 0 {
        vec![1, 2, 3]
    } else {
        t_block(j)
    }
}

fn lift(v: &[Rational], j: u32, dim: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); dim];
    for (x, m) in v.iter().zip(block_masks(j)) {
        out[m as usize - 1] = x.clone();
    }
    out
}

/// Conjunction over all `J ⊆ [n]` of the block cones of the induced codes,
/// lifted to the full α space. Certificates are relabeled block certificates.
pub fn multi_var_cone(n_aux: usize, code: &DecouplingCode) -> Result<AdditivityCone> {
    multi_var_cone_with(n_aux, code, Basis::Quantum)
}

pub fn multi_var_cone_with(n_aux: usize, code: &DecouplingCode, basis: Basis) -> Result<AdditivityCone> {
    if code.n_aux() != n_aux {
        return Err(Error::Domain(format!("{code} has {} auxiliary variables, not {n_aux}", code.n_aux())));
    }
    if n_aux == 0 || n_aux > MAX_MULTI_AUX {
        return Err(Error::Capacity(format!("multi-variable cones take 1..={MAX_MULTI_AUX} variables")));
    }
    if !code.is_consistent() {
        return Err(Error::Validation(format!("inconsistent decoupling {code}")));
    }
    let coords = full_coords(n_aux);
    let dim = coords.len();
    let alpha_ctx = alpha_context(n_aux)?;
    let comp_ctx = composite_context(n_aux)?;
    let mut out = AdditivityCone {
        code: code.clone(),
        n_aux,
        coords,
        basis,
        h: ConeH::new(dim, vec![], vec![])?,
        v: ConeV::new(dim, vec![], vec![])?,
        facets: vec![],
        equalities: vec![],
        boundedness: boundedness_constraints(n_aux),
        rays: vec![],
        lineality: vec![],
        certificates: vec![],
        witnesses: vec![],
        gaps: vec![],
    };
    let (mut ineq, mut eq, mut rays, mut lin) = (vec![], vec![], vec![], vec![]);
    let mut lin_certs = vec![];
    for j in 0..(1u32 << n_aux) {
        let bc = block_code(code, j);
        let block = block_cone(&bc, basis)?;
        let label = if j == 0 { "∅".to_string() } else { alpha_ctx.label(j << 2) };
        let up = |v: &Vec<Rational>| lift(v, j, dim);
        ineq.extend(block.h.inequalities().iter().map(up));
        eq.extend(block.h.equalities().iter().map(up));
        let offset = out.facets.len();
        out.facets.extend(block.facets.iter().map(up));
        out.equalities.extend(block.equalities.iter().map(up));
        rays.extend(block.rays.iter().map(up));
        lin.extend(block.lineality.iter().map(up));
        out.gaps.extend(block.gaps.iter().map(|g| format!("block {label}: {g}")));
        out.witnesses.extend(block.witnesses.iter().map(|w| WitnessUse {
            name: format!("{label}:{}", w.name),
            form: up(&w.form),
            tight_on: w.tight_on.iter().map(|i| i + offset).collect(),
            equality: w.equality,
        }));

        let mut alpha_images = vec![1, 2];
        let mut comp_images = vec![1, 2, 4, 8];
        if j != 0 {
            alpha_images.push(j << 2);
            comp_images.push(j << 4);
        }
        let n_rays = block.rays.len();
        for (i, c) in block.certificates.iter().enumerate() {
            let lifted = c.relabeled(&alpha_ctx, &alpha_images, &comp_ctx, &comp_images)?;
            if i < n_rays {
                out.certificates.push(lifted);
            } else {
                lin_certs.push(lifted);
            }
        }
    }
    out.rays = rays.clone();
    out.lineality = lin.clone();
    out.certificates.extend(lin_certs);
    out.h = ConeH::new(dim, ineq, eq)?.canonical();
    out.v = ConeV::new(dim, rays, lin)?.canonical();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::additivity::coords::alpha_vector;
    use crate::polyhedra::{cones_equal, ConeRep};

    #[test]
    fn induced_union() {
        let code = DecouplingCode::new(vec![(3, 3), (0, 0)]).unwrap();
        assert_eq!(block_code(&code, 3), DecouplingCode::single(3, 3).unwrap());
        let code = DecouplingCode::new(vec![(1, 2), (2, 0)]).unwrap();
        assert_eq!(block_code(&code, 3), DecouplingCode::single(3, 2).unwrap());
        assert_eq!(block_code(&code, 0), DecouplingCode::trivial());
    }

    #[test]
    fn two_variable_certificates_verify() {
        let code = DecouplingCode::new(vec![(1, 2), (2, 0)]).unwrap();
        let c = multi_var_cone(2, &code).unwrap();
        assert!(c.is_exact());
        assert_eq!(c.coords.len(), 15);
        assert!(c.verify_certificates());
        for (cert, g) in c.certificates.iter().zip(c.generators()) {
            assert_eq!(alpha_vector(&cert.alpha, &c.coords), g);
        }
    }

    #[test]
    fn h_and_v_agree() {
        let code = DecouplingCode::new(vec![(3, 0), (0, 1)]).unwrap();
        let c = multi_var_cone(2, &code).unwrap();
        assert!(cones_equal(&ConeRep::H(c.h.clone()), &ConeRep::V(c.v.clone())).unwrap().is_equal());
    }

    #[test]
    fn rejects_mismatched_arity() {
        let code = DecouplingCode::single(3, 3).unwrap();
        assert!(multi_var_cone(2, &code).is_err());
    }
}
