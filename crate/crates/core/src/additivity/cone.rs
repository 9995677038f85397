//! Single-block additivity cones: outer bound from witnesses, extreme rays by
//! double description, and an exact certificate for every ray.

use serde::{Deserialize, Serialize};

use super::certify::{basis_data, certify_ray, Basis, RayCertificate, RayCheck};
use super::coords::{alpha_from, alpha_vector, block_coords, boundedness_rows, coord_names};
use super::witness::{witnesses_for, WitnessSpec};
use crate::decouplings::{alpha_context, composite_context, delta_functional, DecouplingCode};
use crate::entropic::SubsetMask;
use crate::error::{Error, Result};
use crate::polyhedra::linalg::{canonical_basis, dot, is_zero_vec, primitive, rank, reduce_modulo};
use crate::polyhedra::{
    cones_equal, double_description, project_cone, ConeComparison, ConeH, ConeRep, ConeV, Rational,
};

/// A witness as used by a cone: its exact Δ form over the cone coordinates
/// and the facets (indices into `facets`) it is tight on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessUse {
    pub name: String,
    pub form: Vec<Rational>,
    pub tight_on: Vec<usize>,
    /// The form vanishes identically on the cone.
    pub equality: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditivityCone {
    pub code: DecouplingCode,
    pub n_aux: usize,
    pub coords: Vec<SubsetMask>,
    pub basis: Basis,
    /// Canonical H-representation, boundedness equalities included.
    pub h: ConeH,
    pub v: ConeV,
    /// Displayed facet rows, one per inequality of `h`, each equivalent to
    /// it modulo the equalities.
    pub facets: Vec<Vec<Rational>>,
    /// Displayed equalities beyond boundedness.
    pub equalities: Vec<Vec<Rational>>,
    pub boundedness: Vec<Vec<Rational>>,
    /// Displayed rays followed by the lineality basis.
    pub rays: Vec<Vec<Rational>>,
    pub lineality: Vec<Vec<Rational>>,
    /// One per generator: rays, then `+l, -l` for each lineality vector.
    pub certificates: Vec<RayCertificate>,
    pub witnesses: Vec<WitnessUse>,
    /// Anything that keeps inner and outer from provably coinciding.
    pub gaps: Vec<String>,
}

impl AdditivityCone {
    pub fn coord_names(&self) -> Vec<String> {
        coord_names(self.n_aux, &self.coords).expect("valid context")
    }

    /// Displayed rays, then both signs of each lineality vector.
    pub fn generators(&self) -> Vec<Vec<Rational>> {
        let mut g = self.rays.clone();
        for l in &self.lineality {
            g.push(l.clone());
            g.push(l.iter().map(|x| -x).collect());
        }
        g
    }

    pub fn is_exact(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.h.contains(x)
    }

    /// Every certificate re-verified from scratch against the cone's code.
    pub fn verify_certificates(&self) -> bool {
        self.certificates.len() == self.generators().len()
            && self.certificates.iter().zip(self.generators()).all(|(c, g)| {
                alpha_vector(&c.alpha, &self.coords) == g && c.verify(&self.code)
            })
    }
}

/// Row space of a set of equalities, for comparing rows modulo it.
struct Span {
    echelon: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Span {
    fn new(rows: &[Vec<Rational>], dim: usize) -> Self {
        let (rows, pivots) = canonical_basis(rows, dim);
        let echelon = rows
            .iter()
            .zip(&pivots)
            .map(|(r, &p)| {
                let inv = r[p].recip();
                r.iter().map(|x| x * &inv).collect()
            })
            .collect();
        Span { echelon, pivots }
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        reduce_modulo(v, &self.echelon, &self.pivots)
    }

    fn contains(&self, v: &[Rational]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// `Some(sign)` if `a ≡ c·b` for some nonzero `c`.
    fn proportional(&self, a: &[Rational], b: &[Rational]) -> Option<i32> {
        let (ra, rb) = (primitive(&self.reduce(a)), primitive(&self.reduce(b)));
        if is_zero_vec(&ra) || is_zero_vec(&rb) {
            return None;
        }
        if ra == rb {
            Some(1)
        } else if ra.iter().zip(&rb).all(|(x, y)| *x == -y) {
            Some(-1)
        } else {
            None
        }
    }
}

/// Among `r + Σ k_j l_j` for small integers `k_j`, the representative with
/// the least total subset size, then fewest terms, then smallest vector.
fn present_ray(r: &[Rational], lineality: &[Vec<Rational>], coords: &[SubsetMask]) -> Vec<Rational> {
    let score = |v: &[Rational]| {
        let weight: u32 = v.iter().zip(coords).filter(|(x, _)| !x.is_zero()).map(|(_, m)| m.count_ones()).sum();
        let terms = v.iter().filter(|x| !x.is_zero()).count();
        (weight, terms, v.to_vec())
    };
    let mut best = r.to_vec();
    let ks: Vec<i64> = vec![0, 1, -1, 2, -2];
    let mut combos: Vec<Vec<i64>> = vec![vec![]];
    for _ in lineality {
        combos = combos.into_iter().flat_map(|c| ks.iter().map(move |&k| [c.clone(), vec![k]].concat())).collect();
    }
    for combo in combos {
        let mut v = r.to_vec();
        for (k, l) in combo.iter().zip(lineality) {
            let k = Rational::from_int(*k);
            v = v.iter().zip(l).map(|(x, y)| x + &(&k * y)).collect();
        }
        if score(&v) < score(&best) {
            best = v;
        }
    }
    primitive(&best)
}

fn sign_normalized(v: Vec<Rational>) -> Vec<Rational> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.iter().map(|x| -x).collect(),
        _ => v,
    }
}

fn witness_outer_rows(witnesses: &[WitnessSpec], coords: &[SubsetMask]) -> Result<Vec<Vec<Rational>>> {
    witnesses.iter().map(|w| w.delta_form(coords)).collect()
}

fn block_n_aux(code: &DecouplingCode) -> Result<usize> {
    match code.n_aux() {
        0 | 1 => Ok(code.n_aux()),
        n => Err(Error::Unsupported(format!("single-block cones take at most one auxiliary variable, got {n}"))),
    }
}

/// `{α : Δ(α, p) ≥ 0 for every library witness p}` with the boundedness
/// equalities, in canonical irredundant form over the block coordinates.
pub fn witness_outer_cone(code: &DecouplingCode) -> Result<ConeH> {
    let n = block_n_aux(code)?;
    let coords = block_coords(n);
    let rows = witness_outer_rows(&witnesses_for(code)?, &coords)?;
    Ok(ConeH::new(coords.len(), rows, boundedness_rows(n, &coords))?.minimal())
}

fn build(code: &DecouplingCode, basis: Basis) -> Result<AdditivityCone> {
    let n_aux = block_n_aux(code)?;
    let coords = block_coords(n_aux);
    let dim = coords.len();
    let witnesses = witnesses_for(code)?;
    let forms = witness_outer_rows(&witnesses, &coords)?;
    let boundedness = boundedness_rows(n_aux, &coords);
    let h = ConeH::new(dim, forms.clone(), boundedness.clone())?.minimal();
    let v = double_description(&h);
    let mut gaps = Vec::new();

    let eq_span = Span::new(h.equalities(), dim);
    let shown: Vec<Vec<Rational>> =
        witnesses.iter().map(|w| alpha_vector(&w.expected_delta, &coords)).collect();

    let mut equalities: Vec<Vec<Rational>> = Vec::new();
    let extra = rank(h.equalities(), dim) - rank(&boundedness, dim);
    for s in &shown {
        if equalities.len() == extra {
            break;
        }
        let mut with = boundedness.clone();
        with.extend(equalities.iter().cloned());
        if eq_span.contains(s) && !Span::new(&with, dim).contains(s) {
            equalities.push(sign_normalized(primitive(s)));
        }
    }
    for e in h.equalities() {
        if equalities.len() == extra {
            break;
        }
        let mut with = boundedness.clone();
        with.extend(equalities.iter().cloned());
        if !Span::new(&with, dim).contains(e) {
            equalities.push(e.clone());
        }
    }

    let mut facets = Vec::new();
    let mut uses: Vec<WitnessUse> = witnesses
        .iter()
        .zip(&forms)
        .map(|(w, f)| WitnessUse { name: w.name.clone(), form: f.clone(), tight_on: vec![], equality: eq_span.contains(f) })
        .collect();
    for (i, f) in h.inequalities().iter().enumerate() {
        let mut shown_row = None;
        for (u, s) in uses.iter_mut().zip(&shown) {
            if eq_span.proportional(&u.form, f) == Some(1) {
                u.tight_on.push(i);
                shown_row.get_or_insert_with(|| primitive(s));
            }
        }
        match shown_row {
            Some(r) => facets.push(r),
            None => {
                gaps.push(format!("facet {i} is not tight on any witness"));
                facets.push(f.clone());
            }
        }
    }

    let rays: Vec<Vec<Rational>> = v.rays().iter().map(|r| present_ray(r, v.lineality(), &coords)).collect();
    let lineality: Vec<Vec<Rational>> = v.lineality().iter().map(|l| present_ray(l, &[], &coords)).collect();
    let mut generators = rays.clone();
    for l in &lineality {
        generators.push(l.clone());
        generators.push(l.iter().map(|x| -x).collect());
    }
    let mut certificates = Vec::new();
    for g in &generators {
        let alpha = alpha_from(n_aux, &coords, g)?;
        match certify_ray(&alpha, code, basis)? {
            RayCheck::Certified(c) => certificates.push(c),
            RayCheck::Refuted(_) => gaps.push(format!("ray {} is not certified", crate::entropic::formula::render_pretty(&alpha))),
        }
    }
    Ok(AdditivityCone {
        code: code.clone(),
        n_aux,
        coords,
        basis,
        h,
        v,
        facets,
        equalities,
        boundedness,
        rays,
        lineality,
        certificates,
        witnesses: uses,
        gaps,
    })
}

pub fn zero_var_cone() -> Result<AdditivityCone> {
    build(&DecouplingCode::trivial(), Basis::Quantum)
}

/// The cone on the `(V, BV, EV, BEV)` block for a single-variable code.
pub fn one_var_cone(code: &DecouplingCode) -> Result<AdditivityCone> {
    one_var_cone_with(code, Basis::Quantum)
}

pub fn one_var_cone_with(code: &DecouplingCode, basis: Basis) -> Result<AdditivityCone> {
    if code.n_aux() != 1 {
        return Err(Error::Domain(format!("{code} is not a single-variable code")));
    }
    build(code, basis)
}

/// Zero- or one-variable cone depending on the code.
pub fn block_cone(code: &DecouplingCode, basis: Basis) -> Result<AdditivityCone> {
    build(code, basis)
}

/// The exact inner cone `{α : Δ(α) ∈ cone(basis)}` over `coords` (other α
/// coordinates zero), obtained by projecting out the multipliers.
pub fn projected_inner_cone(code: &DecouplingCode, coords: &[SubsetMask], basis: Basis) -> Result<ConeH> {
    let n_aux = code.n_aux();
    let ctx = composite_context(n_aux)?;
    let alpha_ctx = alpha_context(n_aux)?;
    let data = basis_data(&ctx, basis)?;
    let k = coords.len();
    let g = data.dense.len();
    let rows_d: Vec<Vec<Rational>> = coords
        .iter()
        .map(|&m| {
            let e = crate::entropic::LinearEntropyFunctional::from_terms(&alpha_ctx, [(m, Rational::one())])?;
            Ok(delta_functional(&e, code)?.to_dense())
        })
        .collect::<Result<_>>()?;
    let sub = ctx.subset_count();
    let dim = k + g;
    let mut equalities = Vec::with_capacity(sub);
    for r in 0..sub {
        let mut row = vec![Rational::zero(); dim];
        for (j, d) in rows_d.iter().enumerate() {
            row[j] = d[r].clone();
        }
        for (i, gen) in data.dense.iter().enumerate() {
            row[k + i] = -&gen[r];
        }
        equalities.push(row);
    }
    for b in boundedness_rows(n_aux, coords) {
        let mut row = b;
        row.resize(dim, Rational::zero());
        equalities.push(row);
    }
    let inequalities = (0..g)
        .map(|i| {
            let mut row = vec![Rational::zero(); dim];
            row[k + i] = Rational::one();
            row
        })
        .collect();
    let lifted = ConeH::new(dim, inequalities, equalities)?;
    let keep: Vec<usize> = (0..k).collect();
    Ok(project_cone(&lifted, &keep)?.minimal())
}

/// Compare a computed cone with its projected inner cone.
pub fn inner_equals_outer(cone: &AdditivityCone) -> Result<ConeComparison> {
    let inner = projected_inner_cone(&cone.code, &cone.coords, cone.basis)?;
    cones_equal(&ConeRep::H(cone.h.clone()), &ConeRep::H(inner))
}

/// `Δ(α)` of each witness, for testing candidate α against the outer bound.
pub fn witness_values(code: &DecouplingCode, alpha: &[Rational]) -> Result<Vec<(String, Rational)>> {
    let n = block_n_aux(code)?;
    let coords = block_coords(n);
    witnesses_for(code)?
        .iter()
        .map(|w| Ok((w.name.clone(), dot(&w.delta_form(&coords)?, alpha))))
        .collect()
}
