use serde::{Deserialize, Serialize};

use super::dd::{double_description, facet_enumeration};
use super::linalg::{canonical_basis, dot, is_zero_vec, primitive, rank, reduce_modulo};
use super::rational::Rational;
use crate::error::{Error, Result};

/// `{x : a·x ≥ 0 for each inequality, b·x = 0 for each equality}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeH {
    dim: usize,
    inequalities: Vec<Vec<Rational>>,
    equalities: Vec<Vec<Rational>>,
}

/// `cone(rays) + span(lineality)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeV {
    dim: usize,
    rays: Vec<Vec<Rational>>,
    lineality: Vec<Vec<Rational>>,
}

fn check_rows(dim: usize, rows: &[Vec<Rational>], what: &str) -> Result<()> {
    if let Some(r) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::Domain(format!("{what} row of length {} in dimension {dim}", r.len())));
    }
    Ok(())
}

fn nonzero(rows: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    rows.into_iter().filter(|r| !is_zero_vec(r)).collect()
}

impl ConeH {
    /// Zero rows are dropped.
    pub fn new(dim: usize, inequalities: Vec<Vec<Rational>>, equalities: Vec<Vec<Rational>>) -> Result<Self> {
        check_rows(dim, &inequalities, "inequality")?;
        check_rows(dim, &equalities, "equality")?;
        Ok(Self::new_unchecked(dim, inequalities, equalities))
    }

    pub(crate) fn new_unchecked(
        dim: usize,
        inequalities: Vec<Vec<Rational>>,
        equalities: Vec<Vec<Rational>>,
    ) -> Self {
        ConeH { dim, inequalities: nonzero(inequalities), equalities: nonzero(equalities) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inequalities(&self) -> &[Vec<Rational>] {
        &self.inequalities
    }

    pub fn equalities(&self) -> &[Vec<Rational>] {
        &self.equalities
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim
            && self.inequalities.iter().all(|a| !dot(a, x).is_negative())
            && self.equalities.iter().all(|b| dot(b, x).is_zero())
    }

    /// Add rows; the result describes the intersection.
    pub fn intersect(&self, other: &ConeH) -> Result<ConeH> {
        if self.dim != other.dim {
            return Err(Error::Domain("cone dimensions differ".into()));
        }
        let mut ineq = self.inequalities.clone();
        ineq.extend(other.inequalities.iter().cloned());
        let mut eq = self.equalities.clone();
        eq.extend(other.equalities.iter().cloned());
        Ok(ConeH::new_unchecked(self.dim, ineq, eq))
    }

    /// Equalities in primitive echelon form, inequalities reduced modulo the
    /// equalities, primitive, deduplicated and sorted. Does not remove
    /// redundant inequalities; see [`ConeH::minimal`].
    pub fn canonical(&self) -> ConeH {
        let (eq, piv) = canonical_basis(&self.equalities, self.dim);
        let mut ineq: Vec<Vec<Rational>> = self
            .inequalities
            .iter()
            .map(|a| primitive(&reduce_modulo(a, &eq_unit(&eq, &piv), &piv)))
            .filter(|a| !is_zero_vec(a))
            .collect();
        ineq.sort();
        ineq.dedup();
        ConeH { dim: self.dim, inequalities: ineq, equalities: eq }
    }

    /// Irredundant canonical H-representation: implicit equalities detected
    /// and redundant inequalities removed.
    pub fn minimal(&self) -> ConeH {
        facet_enumeration(&double_description(self))
    }
}

// `reduce_modulo` wants rows with a unit pivot.
fn eq_unit(rows: &[Vec<Rational>], pivots: &[usize]) -> Vec<Vec<Rational>> {
    rows.iter()
        .zip(pivots)
        .map(|(r, &p)| {
            let inv = r[p].recip();
            r.iter().map(|x| x * &inv).collect()
        })
        .collect()
}

impl ConeV {
    pub fn new(dim: usize, rays: Vec<Vec<Rational>>, lineality: Vec<Vec<Rational>>) -> Result<Self> {
        check_rows(dim, &rays, "ray")?;
        check_rows(dim, &lineality, "lineality")?;
        Ok(Self::new_unchecked(dim, rays, lineality))
    }

    pub(crate) fn new_unchecked(dim: usize, rays: Vec<Vec<Rational>>, lineality: Vec<Vec<Rational>>) -> Self {
        ConeV { dim, rays: nonzero(rays), lineality: nonzero(lineality) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<Rational>] {
        &self.rays
    }

    pub fn lineality(&self) -> &[Vec<Rational>] {
        &self.lineality
    }

    /// Lineality as a primitive echelon basis; rays reduced modulo the
    /// lineality, primitive, deduplicated and sorted.
    pub fn canonical(&self) -> ConeV {
        let (lin, piv) = canonical_basis(&self.lineality, self.dim);
        let mut rays: Vec<Vec<Rational>> = self
            .rays
            .iter()
            .map(|r| primitive(&reduce_modulo(r, &eq_unit(&lin, &piv), &piv)))
            .filter(|r| !is_zero_vec(r))
            .collect();
        rays.sort();
        rays.dedup();
        ConeV { dim: self.dim, rays, lineality: lin }
    }

    /// Irredundant canonical generators.
    pub fn minimal(&self) -> ConeV {
        double_description(&facet_enumeration(self))
    }

    /// All generators with both signs of each lineality vector.
    pub fn generators(&self) -> Vec<Vec<Rational>> {
        let mut g = self.rays.clone();
        for l in &self.lineality {
            g.push(l.clone());
            g.push(l.iter().map(|x| -x).collect());
        }
        g
    }

    pub fn lineality_rank(&self) -> usize {
        rank(&self.lineality, self.dim)
    }
}

/// A cone given by either representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConeRep {
    H(ConeH),
    V(ConeV),
}

impl ConeRep {
    pub fn dim(&self) -> usize {
        match self {
            ConeRep::H(h) => h.dim(),
            ConeRep::V(v) => v.dim(),
        }
    }

    pub fn to_h(&self) -> ConeH {
        match self {
            ConeRep::H(h) => h.clone(),
            ConeRep::V(v) => facet_enumeration(v),
        }
    }

    pub fn to_v(&self) -> ConeV {
        match self {
            ConeRep::H(h) => double_description(h),
            ConeRep::V(v) => v.clone(),
        }
    }
}

impl From<ConeH> for ConeRep {
    fn from(h: ConeH) -> Self {
        ConeRep::H(h)
    }
}

impl From<ConeV> for ConeRep {
    fn from(v: ConeV) -> Self {
        ConeRep::V(v)
    }
}

/// Result of [`cones_equal`]: on failure, a generator of one cone lying
/// outside the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConeComparison {
    Equal,
    OnlyInFirst(Vec<Rational>),
    OnlyInSecond(Vec<Rational>),
}

impl ConeComparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, ConeComparison::Equal)
    }
}

pub fn cones_equal(a: &ConeRep, b: &ConeRep) -> Result<ConeComparison> {
    if a.dim() != b.dim() {
        return Err(Error::Domain(format!("cone dimensions {} and {} differ", a.dim(), b.dim())));
    }
    let (ah, av) = (a.to_h(), a.to_v());
    let (bh, bv) = (b.to_h(), b.to_v());
    if let Some(g) = av.generators().into_iter().find(|g| !bh.contains(g)) {
        return Ok(ConeComparison::OnlyInFirst(g));
    }
    if let Some(g) = bv.generators().into_iter().find(|g| !ah.contains(g)) {
        return Ok(ConeComparison::OnlyInSecond(g));
    }
    Ok(ConeComparison::Equal)
}

/// Serialized cone with named coordinates and both representations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeJson {
    pub dim: usize,
    pub coords: Vec<String>,
    pub inequalities: Vec<Vec<Rational>>,
    pub equalities: Vec<Vec<Rational>>,
    pub rays: Vec<Vec<Rational>>,
    pub lineality: Vec<Vec<Rational>>,
}

impl ConeJson {
    pub fn new(coords: &[String], h: &ConeH, v: &ConeV) -> Self {
        ConeJson {
            dim: h.dim(),
            coords: coords.to_vec(),
            inequalities: h.inequalities().to_vec(),
            equalities: h.equalities().to_vec(),
            rays: v.rays().to_vec(),
            lineality: v.lineality().to_vec(),
        }
    }

    pub fn h(&self) -> Result<ConeH> {
        ConeH::new(self.dim, self.inequalities.clone(), self.equalities.clone())
    }

    pub fn v(&self) -> Result<ConeV> {
        ConeV::new(self.dim, self.rays.clone(), self.lineality.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_int(x)).collect()
    }

    #[test]
    fn orthant_vs_half_plane() {
        let orthant = ConeH::new(2, vec![q(&[1, 0]), q(&[0, 1])], vec![]).unwrap();
        let half = ConeH::new(2, vec![q(&[1, 0])], vec![]).unwrap();
        match cones_equal(&orthant.into(), &half.into()).unwrap() {
            ConeComparison::OnlyInSecond(g) => assert!(g[1].is_negative()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn row_order_irrelevant() {
        let a = ConeH::new(2, vec![q(&[1, 0]), q(&[1, 1]), q(&[0, 1])], vec![]).unwrap();
        let b = ConeH::new(2, vec![q(&[0, 1]), q(&[1, 0])], vec![]).unwrap();
        assert!(cones_equal(&a.clone().into(), &b.clone().into()).unwrap().is_equal());
        assert_eq!(a.minimal(), b.minimal());
    }

    #[test]
    fn canonical_reduces_modulo_equalities() {
        let a = ConeH::new(2, vec![q(&[2, 0])], vec![q(&[1, -1])]).unwrap().canonical();
        let b = ConeH::new(2, vec![q(&[0, 3])], vec![q(&[-2, 2])]).unwrap().canonical();
        assert_eq!(a, b);
    }

    #[test]
    fn json_shape() {
        let h = ConeH::new(1, vec![q(&[1])], vec![]).unwrap();
        let v = double_description(&h);
        let j = ConeJson::new(&["x".to_string()], &h, &v);
        let s = serde_json::to_string(&j).unwrap();
        assert_eq!(
            s,
            r#"{"dim":1,"coords":["x"],"inequalities":[["1"]],"equalities":[],"rays":[["1"]],"lineality":[]}"#
        );
    }
}
