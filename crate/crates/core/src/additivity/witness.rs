//! Curated XOR-circuit witness distributions. Every output is a tuple of
//! parities of independent uniform bits `R1, R2, ..`, so entropies are GF(2)
//! ranks and Δ evaluates exactly.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::coords::{alpha_name, block_coords, boundedness_rows, parse_alpha_name};
use crate::decouplings::{
    alpha_context, composite_context, delta_functional, orbit_word, DecouplingCode, Reduction, SymmetryKind,
};
use crate::entropic::{ClassicalDistribution, LinearEntropyFunctional as F, SubsetMask, Variable};
use crate::error::{Error, Result};
use crate::polyhedra::linalg::{canonical_basis, reduce_modulo};
use crate::polyhedra::Rational;

/// Raw text of the shipped library.
pub const LIBRARY: &str = include_str!("../../data/witnesses.json");
const MAX_SEED_BITS: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSpec {
    pub name: String,
    /// `None` for the block without auxiliary variables.
    pub class: Option<(u8, u8)>,
    pub description: String,
    /// Output bits of each named variable, each a parity mask over the seed
    /// bits (bit `i` is `R{i+1}`). Absent variables are constant.
    pub assignments: BTreeMap<String, Vec<u32>>,
    /// Δ as a form in α, up to the boundedness equalities.
    pub expected_delta: F,
}

#[derive(Serialize, Deserialize)]
struct RawWitness {
    name: String,
    class: Vec<u8>,
    description: String,
    assignments: BTreeMap<String, Vec<String>>,
    expected: BTreeMap<String, Rational>,
}

#[derive(Serialize, Deserialize)]
struct RawLibrary {
    version: u32,
    witnesses: Vec<RawWitness>,
}

fn parse_parity(s: &str) -> Result<u32> {
    let mut mask = 0;
    for part in s.split('^') {
        let idx: u32 = part
            .trim()
            .strip_prefix('R')
            .and_then(|d| d.parse().ok())
            .filter(|&i| (1..=MAX_SEED_BITS).contains(&i))
            .ok_or_else(|| Error::Parse(format!("bad parity term {part:?}")))?;
        mask ^= 1 << (idx - 1);
    }
    Ok(mask)
}

fn render_parity(mask: u32) -> String {
    (0..MAX_SEED_BITS).filter(|i| mask & (1 << i) != 0).map(|i| format!("R{}", i + 1)).collect::<Vec<_>>().join("^")
}

impl TryFrom<RawWitness> for WitnessSpec {
    type Error = Error;

    fn try_from(raw: RawWitness) -> Result<Self> {
        let class = match raw.class[..] {
            [] => None,
            [a, b] => {
                DecouplingCode::single(a, b)?;
                Some((a, b))
            }
            _ => return Err(Error::Parse(format!("witness {}: bad class", raw.name))),
        };
        let n_aux = class.map_or(0, |_| 1);
        let ctx = alpha_context(n_aux)?;
        let comp = composite_context(n_aux)?;
        let mut assignments = BTreeMap::new();
        for (var, bits) in raw.assignments {
            comp.bit(&var)?;
            let masks = bits.iter().map(|b| parse_parity(b)).collect::<Result<Vec<_>>>()?;
            assignments.insert(var, masks);
        }
        let mut expected_delta = F::zero(&ctx);
        for (name, c) in &raw.expected {
            expected_delta.add_term(parse_alpha_name(&ctx, name)?, c);
        }
        Ok(WitnessSpec { name: raw.name, class, description: raw.description, assignments, expected_delta })
    }
}

impl From<&WitnessSpec> for RawWitness {
    fn from(w: &WitnessSpec) -> Self {
        let ctx = w.expected_delta.context();
        RawWitness {
            name: w.name.clone(),
            class: w.class.map_or(vec![], |(a, b)| vec![a, b]),
            description: w.description.clone(),
            assignments: w
                .assignments
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|&m| render_parity(m)).collect()))
                .collect(),
            expected: w.expected_delta.terms().map(|(m, c)| (alpha_name(ctx, m), c.clone())).collect(),
        }
    }
}

impl Serialize for WitnessSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawWitness::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WitnessSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawWitness::deserialize(d)?;
        WitnessSpec::try_from(raw).map_err(serde::de::Error::custom)
    }
}

fn gf2_rank(mut rows: Vec<u32>) -> u32 {
    let mut rank = 0;
    while let Some(pivot) = rows.iter().copied().find(|&r| r != 0) {
        let low = pivot & pivot.wrapping_neg();
        rows = rows.into_iter().map(|r| if r & low != 0 { r ^ pivot } else { r }).filter(|&r| r != 0).collect();
        rank += 1;
    }
    rank
}

impl WitnessSpec {
    pub fn n_aux(&self) -> usize {
        self.class.map_or(0, |_| 1)
    }

    /// The decoupling this witness is evaluated under.
    pub fn code(&self) -> DecouplingCode {
        match self.class {
            None => DecouplingCode::trivial(),
            Some((a, b)) => DecouplingCode::single(a, b).expect("validated on load"),
        }
    }

    fn seed_bits(&self) -> u32 {
        let all = self.assignments.values().flatten().fold(0, |acc, m| acc | m);
        32 - all.leading_zeros()
    }

    fn masks_per_system(&self) -> Result<Vec<Vec<u32>>> {
        let ctx = composite_context(self.n_aux())?;
        Ok(ctx.names().iter().map(|n| self.assignments.get(n).cloned().unwrap_or_default()).collect())
    }

    /// Exact entropies in bits, indexed by composite mask.
    pub fn exact_entropies(&self) -> Result<Vec<Rational>> {
        let per = self.masks_per_system()?;
        let n = per.len();
        Ok((0..(1u32 << n))
            .map(|m| {
                let rows = (0..n).filter(|i| m & (1 << i) != 0).flat_map(|i| per[i].iter().copied()).collect();
                Rational::from_int(gf2_rank(rows) as i64)
            })
            .collect())
    }

    pub fn to_distribution(&self) -> Result<ClassicalDistribution> {
        let ctx = composite_context(self.n_aux())?;
        let per = self.masks_per_system()?;
        let vars: Vec<Variable> =
            ctx.names().iter().zip(&per).map(|(n, bits)| Variable::new(n.clone(), 1 << bits.len())).collect();
        ClassicalDistribution::from_uniform_bits(&vars, self.seed_bits(), |seed| {
            per.iter()
                .map(|bits| {
                    bits.iter()
                        .enumerate()
                        .fold(0, |acc, (k, m)| acc | (((seed & m).count_ones() & 1) << k))
                })
                .collect()
        })
    }

    /// Exact Δ(e_m) on this witness for each α coordinate `m`.
    pub fn delta_form(&self, coords: &[SubsetMask]) -> Result<Vec<Rational>> {
        let h = self.exact_entropies()?;
        let ctx = alpha_context(self.n_aux())?;
        let code = self.code();
        coords
            .iter()
            .map(|&m| {
                let e = F::from_terms(&ctx, [(m, Rational::one())])?;
                delta_functional(&e, &code)?.evaluate_exact(&h)
            })
            .collect()
    }

    /// Transport along a symmetry of the standard decouplings; purification
    /// duality is not realized on classical witnesses.
    /// Exact Δ agrees with `expected_delta` modulo the boundedness equalities.
    pub fn matches_expected(&self) -> Result<bool> {
        let coords = block_coords(self.n_aux());
        let got = self.delta_form(&coords)?;
        let diff: Vec<Rational> = got.iter().zip(&coords).map(|(a, &m)| a - &self.expected_delta.coeff(m)).collect();
        let (ech, piv) = canonical_basis(&boundedness_rows(self.n_aux(), &coords), coords.len());
        Ok(reduce_modulo(&diff, &ech, &piv).iter().all(|x| x.is_zero()))
    }

    pub fn transformed(&self, kind: SymmetryKind) -> Result<WitnessSpec> {
        let rename: fn(&str) -> &str = match kind {
            SymmetryKind::BESwap => |n| match n {
                "B1" => "E1",
                "E1" => "B1",
                "B2" => "E2",
                "E2" => "B2",
                other => other,
            },
            SymmetryKind::ChannelSwap => |n| match n {
                "B1" => "B2",
                "B2" => "B1",
                "E1" => "E2",
                "E2" => "E1",
                other => other,
            },
            SymmetryKind::PurificationDual => {
                return Err(Error::Unsupported("purification duality has no classical witness map".into()))
            }
        };
        let assignments = self.assignments.iter().map(|(k, v)| (rename(k).to_string(), v.clone())).collect();
        let class = self.class.map(|(a, b)| {
            let c = kind.apply_code(&DecouplingCode::single(a, b).expect("valid"));
            c.as_single().expect("single")
        });
        Ok(WitnessSpec {
            name: format!("{}@{kind:?}", self.name),
            class,
            description: self.description.clone(),
            assignments,
            expected_delta: kind.apply_alpha(&self.expected_delta)?,
        })
    }
}

pub fn witness_library() -> &'static [WitnessSpec] {
    static LIB: OnceLock<Vec<WitnessSpec>> = OnceLock::new();
    LIB.get_or_init(|| {
        let raw: RawLibrary = serde_json::from_str(LIBRARY).expect("bundled witness library parses");
        raw.witnesses.into_iter().map(|w| WitnessSpec::try_from(w).expect("bundled witness valid")).collect()
    })
}

/// Library witnesses for `code`, transported from the curated class
/// representative when needed. Errors if no curated class reaches `code`.
pub fn witnesses_for(code: &DecouplingCode) -> Result<Vec<WitnessSpec>> {
    if code.n_aux() == 0 {
        return Ok(witness_library().iter().filter(|w| w.class.is_none()).cloned().collect());
    }
    code.as_single()?;
    let mut reps: Vec<(u8, u8)> = witness_library().iter().filter_map(|w| w.class).collect();
    reps.dedup();
    for rep in reps {
        let from = DecouplingCode::single(rep.0, rep.1)?;
        if let Some(word) = orbit_word(&from, code, Reduction::Swaps) {
            return witness_library()
                .iter()
                .filter(|w| w.class == Some(rep))
                .map(|w| word.iter().try_fold(w.clone(), |acc, k| acc.transformed(*k)))
                .collect();
        }
    }
    Err(Error::Domain(format!("no curated witnesses for decoupling {code}")))
}
