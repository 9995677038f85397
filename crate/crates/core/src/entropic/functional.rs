use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::context::{SubsetMask, SystemContext};
use crate::error::{Error, Result};
use crate::polyhedra::Rational;

/// Entropies of every subset of a context, in bits. Index 0 is the empty set.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyVector {
    context: SystemContext,
    values: Vec<f64>,
}

impl EntropyVector {
    pub fn new(context: SystemContext, values: Vec<f64>) -> Result<Self> {
        let expected = context.subset_count() + 1;
        if values.len() != expected {
            return Err(Error::Domain(format!(
                "entropy vector of length {} for {} subsets",
                values.len(),
                expected
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::Validation("entropy of the empty set must be 0".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite entropy".into()));
        }
        Ok(EntropyVector { context, values })
    }

    pub fn context(&self) -> &SystemContext {
        &self.context
    }

    pub fn get(&self, mask: SubsetMask) -> f64 {
        self.values[mask as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `Σ_s coeffs[s] · H(s)` with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinearEntropyFunctional {
    context: SystemContext,
    coeffs: BTreeMap<SubsetMask, Rational>,
}

impl LinearEntropyFunctional {
    pub fn zero(context: &SystemContext) -> Self {
        LinearEntropyFunctional { context: context.clone(), coeffs: BTreeMap::new() }
    }

    pub fn from_terms(
        context: &SystemContext,
        terms: impl IntoIterator<Item = (SubsetMask, Rational)>,
    ) -> Result<Self> {
        let mut f = Self::zero(context);
        for (mask, c) in terms {
            context.check_nonempty(mask)?;
            f.add_term(mask, &c);
        }
        Ok(f)
    }

    /// `H(mask)`.
    pub fn entropy(context: &SystemContext, mask: SubsetMask) -> Self {
        let mut f = Self::zero(context);
        f.add_term(mask, &Rational::one());
        f
    }

    /// `H(a|b) = H(ab) - H(b)`.
    pub fn conditional_entropy(context: &SystemContext, a: SubsetMask, b: SubsetMask) -> Self {
        let mut f = Self::zero(context);
        f.add_term(a | b, &Rational::one());
        f.add_term(b, &-Rational::one());
        f
    }

    /// `I(a;b|c) = H(ac) + H(bc) - H(abc) - H(c)`.
    pub fn conditional_mutual_information(
        context: &SystemContext,
        a: SubsetMask,
        b: SubsetMask,
        c: SubsetMask,
    ) -> Self {
        let one = Rational::one();
        let mut f = Self::zero(context);
        f.add_term(a | c, &one);
        f.add_term(b | c, &one);
        f.add_term(a | b | c, &-&one);
        f.add_term(c, &-&one);
        f
    }

    pub fn mutual_information(context: &SystemContext, a: SubsetMask, b: SubsetMask) -> Self {
        Self::conditional_mutual_information(context, a, b, 0)
    }

    /// Adds `c·H(mask)`; the empty set contributes nothing since `H(∅) = 0`.
    pub fn add_term(&mut self, mask: SubsetMask, c: &Rational) {
        if mask == 0 || c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(mask).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&mask);
        }
    }

    pub fn context(&self) -> &SystemContext {
        &self.context
    }

    pub fn coeff(&self, mask: SubsetMask) -> Rational {
        self.coeffs.get(&mask).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (SubsetMask, &Rational)> {
        self.coeffs.iter().map(|(m, c)| (*m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Dense coefficient vector indexed by `mask - 1`.
    pub fn to_dense(&self) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.context.subset_count()];
        for (m, c) in &self.coeffs {
            v[*m as usize - 1] = c.clone();
        }
        v
    }

    pub fn from_dense(context: &SystemContext, v: &[Rational]) -> Result<Self> {
        if v.len() != context.subset_count() {
            return Err(Error::Domain(format!(
                "dense vector of length {} for {} subsets",
                v.len(),
                context.subset_count()
            )));
        }
        let mut f = Self::zero(context);
        for (i, c) in v.iter().enumerate() {
            f.add_term(i as SubsetMask + 1, c);
        }
        Ok(f)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut f = Self::zero(&self.context);
        for (m, c) in &self.coeffs {
            f.add_term(*m, &(c * k));
        }
        f
    }

    /// `self + k·other`.
    pub fn add_scaled(&mut self, other: &Self, k: &Rational) -> Result<()> {
        self.check_same_context(&other.context)?;
        for (m, c) in &other.coeffs {
            self.add_term(*m, &(c * k));
        }
        Ok(())
    }

    fn check_same_context(&self, other: &SystemContext) -> Result<()> {
        if &self.context != other {
            return Err(Error::Domain(format!(
                "context mismatch: {:?} vs {:?}",
                self.context.names(),
                other.names()
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let mut f = self.clone();
        f.add_scaled(other, &Rational::one())?;
        Ok(f)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let mut f = self.clone();
        f.add_scaled(other, &-Rational::one())?;
        Ok(f)
    }

    /// Push the functional through a union-preserving map of subsets into
    /// another context: `Σ c_s H(s) ↦ Σ c_s H(map(s))`.
    pub fn relabel(
        &self,
        target: &SystemContext,
        map: impl Fn(SubsetMask) -> SubsetMask,
    ) -> Result<Self> {
        let mut f = Self::zero(target);
        for (m, c) in &self.coeffs {
            let image = map(*m);
            target.check_mask(image)?;
            f.add_term(image, c);
        }
        Ok(f)
    }

    /// Relabel by sending system `i` of this context to the subset
    /// `images[i]` of the target context.
    pub fn relabel_systems(&self, target: &SystemContext, images: &[SubsetMask]) -> Result<Self> {
        if images.len() != self.context.arity() {
            return Err(Error::Domain("one image per system required".into()));
        }
        self.relabel(target, |m| image_of(m, images))
    }

    pub fn evaluate(&self, v: &EntropyVector) -> Result<f64> {
        self.check_same_context(v.context())?;
        Ok(self.coeffs.iter().map(|(m, c)| c.to_f64() * v.get(*m)).sum())
    }

    /// Exact evaluation against entropies indexed by mask (index 0 unused).
    pub fn evaluate_exact(&self, values: &[Rational]) -> Result<Rational> {
        if values.len() != self.context.subset_count() + 1 {
            return Err(Error::Domain("exact entropy vector has the wrong length".into()));
        }
        Ok(self.coeffs.iter().map(|(m, c)| c * &values[*m as usize]).sum())
    }
}

/// Union of `images[i]` over the bits `i` set in `mask`.
pub fn image_of(mask: SubsetMask, images: &[SubsetMask]) -> SubsetMask {
    images
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .fold(0, |acc, (_, im)| acc | im)
}

impl fmt::Debug for LinearEntropyFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::formula::render_raw(self))
    }
}

impl fmt::Display for LinearEntropyFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::formula::render_raw(self))
    }
}

// Operators panic on context mismatch; use `try_add`/`try_sub` for checked forms.
impl Add for &LinearEntropyFunctional {
    type Output = LinearEntropyFunctional;
    fn add(self, rhs: Self) -> LinearEntropyFunctional {
        self.try_add(rhs).expect("functional context mismatch")
    }
}

impl Sub for &LinearEntropyFunctional {
    type Output = LinearEntropyFunctional;
    fn sub(self, rhs: Self) -> LinearEntropyFunctional {
        self.try_sub(rhs).expect("functional context mismatch")
    }
}

impl Neg for &LinearEntropyFunctional {
    type Output = LinearEntropyFunctional;
    fn neg(self) -> LinearEntropyFunctional {
        self.scale(&-Rational::one())
    }
}

impl Mul<&LinearEntropyFunctional> for &Rational {
    type Output = LinearEntropyFunctional;
    fn mul(self, rhs: &LinearEntropyFunctional) -> LinearEntropyFunctional {
        rhs.scale(self)
    }
}

#[derive(Serialize, Deserialize)]
struct FunctionalJson {
    context: SystemContext,
    coeffs: BTreeMap<String, Rational>,
}

impl Serialize for LinearEntropyFunctional {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FunctionalJson {
            context: self.context.clone(),
            coeffs: self.coeffs.iter().map(|(m, c)| (self.context.label(*m), c.clone())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LinearEntropyFunctional {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = FunctionalJson::deserialize(deserializer)?;
        let mut f = LinearEntropyFunctional::zero(&raw.context);
        for (label, c) in raw.coeffs {
            let m = raw.context.parse_subset(&label).map_err(serde::de::Error::custom)?;
            f.add_term(m, &c);
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> SystemContext {
        SystemContext::new(["B1", "B2"]).unwrap()
    }

    #[test]
    fn mutual_information_coefficients() {
        let f = LinearEntropyFunctional::mutual_information(&ctx(), 0b01, 0b10);
        assert_eq!(f.to_dense(), vec![1.into(), 1.into(), (-1).into()]);
    }

    #[test]
    fn cancellation_removes_terms() {
        let c = ctx();
        let f = LinearEntropyFunctional::entropy(&c, 1);
        let g = &f - &f;
        assert!(g.is_zero());
        // I(A;B|∅) with A = B collapses to H(A)
        let h = LinearEntropyFunctional::conditional_mutual_information(&c, 1, 1, 0);
        assert_eq!(h, f);
    }

    #[test]
    fn context_mismatch_is_domain_error() {
        let f = LinearEntropyFunctional::entropy(&ctx(), 1);
        let other = SystemContext::new(["X"]).unwrap();
        let v = EntropyVector::new(other, vec![0.0, 1.0]).unwrap();
        assert!(matches!(f.evaluate(&v), Err(Error::Domain(_))));
    }

    #[test]
    fn json_round_trip() {
        let c = ctx();
        let f = LinearEntropyFunctional::mutual_information(&c, 1, 2);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"context":["B1","B2"],"coeffs":{"B1":"1","B1B2":"-1","B2":"1"}}"#);
        let back: LinearEntropyFunctional = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn relabel_merges_systems() {
        let c = ctx();
        let target = SystemContext::new(["X"]).unwrap();
        // I(B1;B2) with both sent to X becomes H(X) + H(X) - H(X) = H(X)
        let f = LinearEntropyFunctional::mutual_information(&c, 1, 2);
        let g = f.relabel_systems(&target, &[1, 1]).unwrap();
        assert_eq!(g, LinearEntropyFunctional::entropy(&target, 1));
    }
}
