use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::context::{SubsetMask, SystemContext};
use super::functional::EntropyVector;
use crate::error::{Error, Result};
use crate::polyhedra::Rational;

const FLOAT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub alphabet: u32,
}

impl Variable {
    pub fn new(name: impl Into<String>, alphabet: u32) -> Self {
        Variable { name: name.into(), alphabet }
    }
}

/// Finite joint distribution over named variables. Atoms of probability zero
/// are not stored.
#[derive(Clone, Debug)]
pub struct ClassicalDistribution {
    context: SystemContext,
    alphabets: Vec<u32>,
    outcomes: Vec<Vec<u32>>,
    probs: Vec<f64>,
    exact: Option<Vec<Rational>>,
}

impl ClassicalDistribution {
    /// Distribution with exact rational probabilities summing to exactly one.
    pub fn new(variables: &[Variable], pmf: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Result<Self> {
        let (context, alphabets) = Self::header(variables)?;
        let mut merged: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (o, p) in pmf {
            Self::check_outcome(&alphabets, &o)?;
            if p.is_negative() {
                return Err(Error::Validation(format!("negative probability {p}")));
            }
            *merged.entry(o).or_default() += p;
        }
        let total: Rational = merged.values().sum();
        if total != Rational::one() {
            return Err(Error::Validation(format!("probabilities sum to {total}")));
        }
        merged.retain(|_, p| !p.is_zero());
        let (outcomes, exact): (Vec<_>, Vec<_>) = merged.into_iter().unzip();
        Ok(ClassicalDistribution {
            context,
            alphabets,
            probs: exact.iter().map(Rational::to_f64).collect(),
            outcomes,
            exact: Some(exact),
        })
    }

    /// Distribution with floating-point probabilities (sum within 1e-12 of one).
    pub fn from_f64(variables: &[Variable], pmf: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        let (context, alphabets) = Self::header(variables)?;
        let mut merged: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (o, p) in pmf {
            Self::check_outcome(&alphabets, &o)?;
            if !(p >= -FLOAT_TOL) || !p.is_finite() {
                return Err(Error::Validation(format!("invalid probability {p}")));
            }
            *merged.entry(o).or_default() += p.max(0.0);
        }
        let total: f64 = merged.values().sum();
        if (total - 1.0).abs() > FLOAT_TOL {
            return Err(Error::Validation(format!("probabilities sum to {total}")));
        }
        merged.retain(|_, p| *p > 0.0);
        let (outcomes, probs) = merged.into_iter().unzip();
        Ok(ClassicalDistribution { context, alphabets, outcomes, probs, exact: None })
    }

    /// Uniform mixture over `2^bits` seeds; `assign` maps a seed (its bits
    /// are independent uniform bits) to the joint outcome.
    pub fn from_uniform_bits(
        variables: &[Variable],
        bits: u32,
        assign: impl Fn(u32) -> Vec<u32>,
    ) -> Result<Self> {
        if bits > 20 {
            return Err(Error::Capacity(format!("{bits} seed bits")));
        }
        let n = 1u32 << bits;
        let p = Rational::new(1, n as i64);
        Self::new(variables, (0..n).map(|s| (assign(s), p.clone())))
    }

    /// Random distribution on the full product alphabet: Dirichlet(1) weights
    /// with each atom independently zeroed with probability `sparsity`.
    pub fn random<R: Rng + ?Sized>(variables: &[Variable], sparsity: f64, rng: &mut R) -> Result<Self> {
        let (_, alphabets) = Self::header(variables)?;
        let size: u64 = alphabets.iter().map(|&a| a as u64).product();
        if size > 1 << 20 {
            return Err(Error::Capacity(format!("joint alphabet of size {size}")));
        }
        let mut weights: Vec<f64> = (0..size)
            .map(|_| {
                if rng.random::<f64>() < sparsity {
                    0.0
                } else {
                    Exp1.sample(rng)
                }
            })
            .collect();
        if weights.iter().all(|&w| w == 0.0) {
            let i = rng.random_range(0..size as usize);
            weights[i] = 1.0;
        }
        let total: f64 = weights.iter().sum();
        let pmf = weights.iter().enumerate().map(|(i, w)| (decode(i as u64, &alphabets), w / total));
        Self::from_f64(variables, pmf)
    }

    fn header(variables: &[Variable]) -> Result<(SystemContext, Vec<u32>)> {
        let context = SystemContext::new(variables.iter().map(|v| v.name.clone()))?;
        if let Some(v) = variables.iter().find(|v| v.alphabet == 0) {
            return Err(Error::Validation(format!("variable {} has an empty alphabet", v.name)));
        }
        Ok((context, variables.iter().map(|v| v.alphabet).collect()))
    }

    fn check_outcome(alphabets: &[u32], o: &[u32]) -> Result<()> {
        if o.len() != alphabets.len() {
            return Err(Error::Validation(format!(
                "outcome of length {} for {} variables",
                o.len(),
                alphabets.len()
            )));
        }
        if o.iter().zip(alphabets).any(|(x, a)| x >= a) {
            return Err(Error::Validation(format!("outcome {o:?} outside alphabets {alphabets:?}")));
        }
        Ok(())
    }

    pub fn context(&self) -> &SystemContext {
        &self.context
    }

    pub fn alphabets(&self) -> &[u32] {
        &self.alphabets
    }

    pub fn variables(&self) -> Vec<Variable> {
        self.context.names().iter().zip(&self.alphabets).map(|(n, &a)| Variable::new(n, a)).collect()
    }

    /// Support atoms with their probabilities.
    pub fn atoms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.outcomes.iter().map(Vec::as_slice).zip(self.probs.iter().copied())
    }

    pub fn exact_probabilities(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    fn marginal_probs(&self, mask: SubsetMask) -> Vec<f64> {
        let idx: Vec<usize> = (0..self.alphabets.len()).filter(|i| mask & (1 << i) != 0).collect();
        let mut acc: HashMap<u64, f64> = HashMap::new();
        for (o, p) in self.outcomes.iter().zip(&self.probs) {
            let key = idx.iter().fold(0u64, |k, &i| k * self.alphabets[i] as u64 + o[i] as u64);
            *acc.entry(key).or_default() += p;
        }
        let mut v: Vec<(u64, f64)> = acc.into_iter().collect();
        v.sort_by_key(|(k, _)| *k);
        v.into_iter().map(|(_, p)| p).collect()
    }

    /// Entropy in bits of the marginal on `mask`.
    pub fn shannon_entropy(&self, mask: SubsetMask) -> Result<f64> {
        self.context.check_nonempty(mask)?;
        Ok(entropy_bits(&self.marginal_probs(mask)))
    }

    pub fn entropy_vector(&self) -> Result<EntropyVector> {
        let n = self.context.subset_count();
        let mut values = vec![0.0; n + 1];
        for (m, v) in values.iter_mut().enumerate().skip(1) {
            *v = entropy_bits(&self.marginal_probs(m as SubsetMask));
        }
        EntropyVector::new(self.context.clone(), values)
    }

    /// Marginal distribution on `mask`, variables in context order.
    pub fn marginal(&self, mask: SubsetMask) -> Result<ClassicalDistribution> {
        self.context.check_nonempty(mask)?;
        let idx: Vec<usize> = (0..self.alphabets.len()).filter(|i| mask & (1 << i) != 0).collect();
        let vars: Vec<Variable> = idx.iter().map(|&i| Variable::new(&self.context.names()[i], self.alphabets[i])).collect();
        let project = |o: &[u32]| idx.iter().map(|&i| o[i]).collect::<Vec<u32>>();
        match &self.exact {
            Some(ex) => Self::new(&vars, self.outcomes.iter().zip(ex).map(|(o, p)| (project(o), p.clone()))),
            None => Self::from_f64(&vars, self.outcomes.iter().zip(&self.probs).map(|(o, p)| (project(o), *p))),
        }
    }

    /// Rename variables, keeping order and probabilities.
    pub fn renamed<S: Into<String>>(&self, names: impl IntoIterator<Item = S>) -> Result<Self> {
        let context = SystemContext::new(names)?;
        if context.arity() != self.context.arity() {
            return Err(Error::Domain("renaming must keep the number of variables".into()));
        }
        Ok(ClassicalDistribution { context, ..self.clone() })
    }
}

pub(crate) fn entropy_bits(probs: &[f64]) -> f64 {
    let h: f64 = probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    h.max(0.0)
}

fn decode(mut i: u64, alphabets: &[u32]) -> Vec<u32> {
    let mut o = vec![0; alphabets.len()];
    for (slot, &a) in o.iter_mut().zip(alphabets).rev() {
        *slot = (i % a as u64) as u32;
        i /= a as u64;
    }
    o
}

#[derive(Serialize, Deserialize)]
struct AtomJson {
    outcome: Vec<u32>,
    p: Rational,
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    variables: Vec<Variable>,
    pmf: Vec<AtomJson>,
}

impl Serialize for ClassicalDistribution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let pmf = match &self.exact {
            Some(ex) => self.outcomes.iter().zip(ex).map(|(o, p)| AtomJson { outcome: o.clone(), p: p.clone() }).collect(),
            None => self
                .outcomes
                .iter()
                .zip(&self.probs)
                .map(|(o, p)| AtomJson {
                    outcome: o.clone(),
                    p: Rational::from_f64_exact(*p).unwrap_or_default(),
                })
                .collect(),
        };
        DistributionJson { variables: self.variables(), pmf }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ClassicalDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = DistributionJson::deserialize(deserializer)?;
        let atoms: Vec<(Vec<u32>, Rational)> = raw.pmf.into_iter().map(|a| (a.outcome, a.p)).collect();
        let exact = ClassicalDistribution::new(&raw.variables, atoms.clone());
        match exact {
            Ok(d) => Ok(d),
            // Decimal inputs may miss one by rounding; accept within tolerance.
            Err(Error::Validation(_)) => ClassicalDistribution::from_f64(
                &raw.variables,
                atoms.into_iter().map(|(o, p)| (o, p.to_f64())),
            )
            .map_err(serde::de::Error::custom),
            Err(e) => Err(serde::de::Error::custom(e)),
        }
    }
}
