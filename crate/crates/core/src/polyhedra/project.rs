//! Shadow of a cone on a subset of coordinates.

use super::cone::ConeH;
use super::dd::{double_description, facet_enumeration};
use super::linalg::{dot, is_zero_vec, primitive};
use super::lp::{dual_membership, Membership};
use super::rational::Rational;
use crate::error::{Error, Result};

/// `{x_keep : ∃ x_rest, x ∈ c}` as an irredundant canonical H-representation,
/// with coordinates in the order of `keep`.
///
/// Works as a cutting-plane loop: generators of the current outer
/// approximation are tested for liftability by LP, and each failed test
/// contributes the Farkas cut it produces. Dropped coordinates carrying a sign
/// bound `x_j ≥ 0` enter the LP as nonnegative variables, so lifted cones with
/// many multipliers stay tractable.
pub fn project_cone(c: &ConeH, keep: &[usize]) -> Result<ConeH> {
    let dim = c.dim();
    if keep.is_empty() {
        return Err(Error::Domain("projection onto no coordinates".into()));
    }
    if keep.iter().any(|&k| k >= dim) {
        return Err(Error::Domain("projection coordinate out of range".into()));
    }
    let mut seen = vec![false; dim];
    for &k in keep {
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::Domain("repeated projection coordinate".into()));
        }
    }
    let lifter = Lifter::new(c, keep);
    let kd = keep.len();
    let mut outer = ConeH::new_unchecked(kd, vec![], vec![]);
    loop {
        let v = double_description(&outer);
        let mut cuts = Vec::new();
        for g in v.generators() {
            if let Some(cut) = lifter.cut(&g)? {
                cuts.push(cut);
            }
        }
        if cuts.is_empty() {
            return Ok(facet_enumeration(&v));
        }
        let mut ineq = outer.inequalities().to_vec();
        ineq.extend(cuts);
        outer = ConeH::new_unchecked(kd, ineq, vec![]).canonical();
    }
}

struct Lifter {
    /// Keep-part of each LP row (inequality rows first, then equalities).
    keep_rows: Vec<Vec<Rational>>,
    generators: Vec<Vec<Rational>>,
}

impl Lifter {
    fn new(c: &ConeH, keep: &[usize]) -> Self {
        let dim = c.dim();
        let drop: Vec<usize> = (0..dim).filter(|j| !keep.contains(j)).collect();
        let unit_of = |a: &Vec<Rational>| -> Option<usize> {
            let nz: Vec<usize> = (0..dim).filter(|&j| !a[j].is_zero()).collect();
            match nz[..] {
                [j] if a[j].is_positive() && !keep.contains(&j) => Some(j),
                _ => None,
            }
        };
        let mut bounded = vec![false; dim];
        let mut rows: Vec<&Vec<Rational>> = Vec::new();
        for a in c.inequalities() {
            match unit_of(a) {
                Some(j) => bounded[j] = true,
                None => rows.push(a),
            }
        }
        let n_ineq = rows.len();
        rows.extend(c.equalities().iter());
        let keep_rows = rows.iter().map(|r| keep.iter().map(|&k| r[k].clone()).collect()).collect();
        // Row system: A_keep x + A_drop y - s = 0 (s ≥ 0), B_keep x + B_drop y = 0,
        // rearranged as A_drop y - s = -A_keep x for the membership oracle.
        let mut generators = Vec::new();
        for &j in &drop {
            let col: Vec<Rational> = rows.iter().map(|r| r[j].clone()).collect();
            if is_zero_vec(&col) {
                continue;
            }
            if !bounded[j] {
                generators.push(col.iter().map(|x| -x).collect());
            }
            generators.push(col);
        }
        for i in 0..n_ineq {
            let mut e = vec![Rational::zero(); rows.len()];
            e[i] = -Rational::one();
            generators.push(e);
        }
        Lifter { keep_rows, generators }
    }

    /// `None` if `x` lifts into the cone, otherwise a valid inequality it violates.
    fn cut(&self, x: &[Rational]) -> Result<Option<Vec<Rational>>> {
        let target: Vec<Rational> = self.keep_rows.iter().map(|r| -dot(r, x)).collect();
        match dual_membership(&target, &self.generators)? {
            Membership::Member(_) => Ok(None),
            Membership::Refuted(w) => {
                // w·t(x) ≥ 0 on the projection, with t(x) = -K x.
                let kd = x.len();
                let mut cut = vec![Rational::zero(); kd];
                for (wi, row) in w.iter().zip(&self.keep_rows) {
                    if wi.is_zero() {
                        continue;
                    }
                    for (c, r) in cut.iter_mut().zip(row) {
                        *c -= wi * r;
                    }
                }
                Ok(Some(primitive(&cut)))
            }
        }
    }
}
