//! Coordinates of α. In the full order the coordinates are the nonempty α
//! masks in increasing order: the block `(B, E, BE)` without auxiliary
//! variables first, then for each nonempty `t` the block `(t, Bt, Et, BEt)`.

use crate::decouplings::alpha_context;
use crate::entropic::{LinearEntropyFunctional as F, SubsetMask, SystemContext};
use crate::error::{Error, Result};
use crate::polyhedra::Rational;

pub fn alpha_name(ctx: &SystemContext, mask: SubsetMask) -> String {
    format!("a_{}", ctx.label(mask))
}

pub fn parse_alpha_name(ctx: &SystemContext, name: &str) -> Result<SubsetMask> {
    let label = name.strip_prefix("a_").ok_or_else(|| Error::Parse(format!("coordinate {name:?} lacks a_ prefix")))?;
    let m = ctx.parse_subset(label)?;
    ctx.check_nonempty(m)?;
    Ok(m)
}

pub fn full_coords(n_aux: usize) -> Vec<SubsetMask> {
    (1..(1u32 << (n_aux + 2))).collect()
}

/// The coordinates a single-block cone is reported on: `(B, E, BE)` without
/// auxiliary variables, `(V, BV, EV, BEV)` with one.
pub fn block_coords(n_aux: usize) -> Vec<SubsetMask> {
    match n_aux {
        0 => vec![1, 2, 3],
        _ => t_block(1),
    }
}

/// The four coordinates `s ∪ t` for `s ⊆ BE`, `t` a nonempty mask over the
/// auxiliary variables.
pub fn t_block(t: u32) -> Vec<SubsetMask> {
    (0..4).map(|s| (t << 2) | s).collect()
}

pub fn coord_names(n_aux: usize, coords: &[SubsetMask]) -> Result<Vec<String>> {
    let ctx = alpha_context(n_aux)?;
    Ok(coords.iter().map(|&m| alpha_name(&ctx, m)).collect())
}

/// `Σ_{s ⊆ BE} α_{s,t} = 0` for every nonempty `t`, over the full order.
pub fn boundedness_constraints(n_aux: usize) -> Vec<Vec<Rational>> {
    boundedness_rows(n_aux, &full_coords(n_aux))
}

/// Boundedness rows whose support lies inside `coords`, written over `coords`.
pub fn boundedness_rows(n_aux: usize, coords: &[SubsetMask]) -> Vec<Vec<Rational>> {
    (1..(1u32 << n_aux))
        .map(|t| t_block(t))
        .filter(|block| block.iter().all(|m| coords.contains(m)))
        .map(|block| coords.iter().map(|m| Rational::from_int(block.contains(m) as i64)).collect())
        .collect()
}

pub fn alpha_from(n_aux: usize, coords: &[SubsetMask], values: &[Rational]) -> Result<F> {
    if coords.len() != values.len() {
        return Err(Error::Domain("one value per coordinate required".into()));
    }
    let ctx = alpha_context(n_aux)?;
    F::from_terms(&ctx, coords.iter().copied().zip(values.iter().cloned()))
}

pub fn alpha_vector(alpha: &F, coords: &[SubsetMask]) -> Vec<Rational> {
    coords.iter().map(|&m| alpha.coeff(m)).collect()
}

/// Whether α meets every boundedness equality.
pub fn is_bounded(alpha: &F) -> bool {
    let n_aux = alpha.context().arity().saturating_sub(2);
    (1..(1u32 << n_aux)).all(|t| t_block(t).iter().map(|&m| alpha.coeff(m)).sum::<Rational>().is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraint_counts() {
        assert!(boundedness_constraints(0).is_empty());
        let one = boundedness_constraints(1);
        assert_eq!(one.len(), 1);
        let ones: Vec<i64> = one[0].iter().map(|x| x.to_f64() as i64).collect();
        assert_eq!(ones, vec![0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(boundedness_constraints(2).len(), 3);
    }

    #[test]
    fn names() {
        assert_eq!(coord_names(1, &full_coords(1)).unwrap(), ["a_B", "a_E", "a_BE", "a_V", "a_BV", "a_EV", "a_BEV"]);
        assert_eq!(coord_names(2, &t_block(3)).unwrap(), ["a_V1V2", "a_BV1V2", "a_EV1V2", "a_BEV1V2"]);
        let ctx = alpha_context(1).unwrap();
        assert_eq!(parse_alpha_name(&ctx, "a_BEV").unwrap(), 7);
        assert!(parse_alpha_name(&ctx, "BEV").is_err());
    }

    #[test]
    fn bounded_check() {
        let ctx = alpha_context(1).unwrap();
        let f = crate::entropic::formula::parse(&ctx, "-H(B|V)").unwrap();
        assert!(is_bounded(&f));
        let g = crate::entropic::formula::parse(&ctx, "H(BV)").unwrap();
        assert!(!is_bounded(&g));
    }
}
