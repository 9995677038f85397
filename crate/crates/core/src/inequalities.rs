//! Known valid linear entropy inequalities: the basic quantum set and the
//! classical elemental set.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::entropic::{submasks, LinearEntropyFunctional as F, SubsetMask, SystemContext};
use crate::error::{Error, Result};
use crate::polyhedra::Rational;

pub const MAX_ARITY: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InequalityKind {
    NonNegativity,
    #[serde(rename = "SSA")]
    StrongSubadditivity,
    WeakMonotonicity,
    Subadditivity,
    ArakiLieb,
    ClassicalConditional,
    #[serde(rename = "ClassicalCMI")]
    ClassicalConditionalMutualInformation,
}

/// `functional ≥ 0`, with the subsets it was instantiated from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityInstance {
    pub kind: InequalityKind,
    pub parts: Vec<SubsetMask>,
    pub functional: F,
}

impl InequalityInstance {
    pub fn new(ctx: &SystemContext, kind: InequalityKind, parts: Vec<SubsetMask>) -> Result<Self> {
        for (i, p) in parts.iter().enumerate() {
            ctx.check_mask(*p)?;
            if parts[..i].iter().any(|q| q & p != 0) {
                return Err(Error::Validation("inequality parts must be disjoint".into()));
            }
        }
        let functional = build(ctx, kind, &parts)?;
        Ok(InequalityInstance { kind, parts, functional })
    }

    /// Human-readable form such as `I(A;B|C) >= 0`.
    pub fn describe(&self) -> String {
        let ctx = self.functional.context();
        let l = |m: SubsetMask| ctx.label(m);
        let p = &self.parts;
        let body = match self.kind {
            InequalityKind::NonNegativity => format!("H({})", l(p[0])),
            InequalityKind::StrongSubadditivity | InequalityKind::ClassicalConditionalMutualInformation => {
                if p[2] == 0 {
                    format!("I({};{})", l(p[0]), l(p[1]))
                } else {
                    format!("I({};{}|{})", l(p[0]), l(p[1]), l(p[2]))
                }
            }
            InequalityKind::WeakMonotonicity => {
                format!("H({c}|{a}) + H({c}|{b})", a = l(p[0]), b = l(p[1]), c = l(p[2]))
            }
            InequalityKind::Subadditivity => format!("I({};{})", l(p[0]), l(p[1])),
            InequalityKind::ArakiLieb => {
                format!("H({a}{b}) + H({a}) - H({b})", a = l(p[0]), b = l(p[1]))
            }
            InequalityKind::ClassicalConditional => format!("H({}|{})", l(p[0]), l(p[1])),
        };
        format!("{body} >= 0")
    }
}

fn build(ctx: &SystemContext, kind: InequalityKind, p: &[SubsetMask]) -> Result<F> {
    let need = match kind {
        InequalityKind::NonNegativity => 1,
        InequalityKind::Subadditivity | InequalityKind::ArakiLieb | InequalityKind::ClassicalConditional => 2,
        _ => 3,
    };
    if p.len() != need {
        return Err(Error::Validation(format!("{kind:?} takes {need} parts")));
    }
    let one = Rational::one();
    Ok(match kind {
        InequalityKind::NonNegativity => F::entropy(ctx, p[0]),
        InequalityKind::StrongSubadditivity | InequalityKind::ClassicalConditionalMutualInformation => {
            F::conditional_mutual_information(ctx, p[0], p[1], p[2])
        }
        InequalityKind::WeakMonotonicity => {
            let mut f = F::conditional_entropy(ctx, p[2], p[0]);
            f.add_scaled(&F::conditional_entropy(ctx, p[2], p[1]), &one)?;
            f
        }
        InequalityKind::Subadditivity => F::mutual_information(ctx, p[0], p[1]),
        InequalityKind::ArakiLieb => {
            let mut f = F::entropy(ctx, p[0] | p[1]);
            f.add_term(p[0], &one);
            f.add_term(p[1], &-&one);
            f
        }
        InequalityKind::ClassicalConditional => F::conditional_entropy(ctx, p[0], p[1]),
    })
}

fn check_arity(ctx: &SystemContext) -> Result<()> {
    if ctx.arity() > MAX_ARITY {
        return Err(Error::Capacity(format!("inequality generation capped at {MAX_ARITY} systems")));
    }
    Ok(())
}

fn dedup(list: Vec<InequalityInstance>) -> Vec<InequalityInstance> {
    let mut seen = HashSet::new();
    list.into_iter().filter(|i| seen.insert(i.functional.clone())).collect()
}

/// Nonnegativity, strong subadditivity, weak monotonicity, subadditivity and
/// Araki–Lieb over disjoint nonempty parts, deduplicated as functionals.
pub fn quantum_basic_set(ctx: &SystemContext) -> Result<Vec<InequalityInstance>> {
    check_arity(ctx)?;
    let full = ctx.full_mask();
    let mut out = Vec::new();
    let mut push = |kind, parts| -> Result<()> {
        out.push(InequalityInstance::new(ctx, kind, parts)?);
        Ok(())
    };
    for a in 1..=full {
        push(InequalityKind::NonNegativity, vec![a])?;
    }
    for a in 1..=full {
        for b in submasks(full & !a).filter(|&b| b > a) {
            for c in submasks(full & !(a | b)).filter(|&c| c != 0) {
                push(InequalityKind::StrongSubadditivity, vec![a, b, c])?;
            }
        }
    }
    for a in 1..=full {
        for b in submasks(full & !a).filter(|&b| b > a) {
            for c in submasks(full & !(a | b)).filter(|&c| c != 0) {
                push(InequalityKind::WeakMonotonicity, vec![a, b, c])?;
            }
        }
    }
    for a in 1..=full {
        for b in submasks(full & !a).filter(|&b| b > a) {
            push(InequalityKind::Subadditivity, vec![a, b])?;
        }
    }
    for a in 1..=full {
        for b in submasks(full & !a).filter(|&b| b != 0) {
            push(InequalityKind::ArakiLieb, vec![a, b])?;
        }
    }
    sort_parts(&mut out);
    Ok(dedup(out))
}

/// `H(X_i | rest) ≥ 0` and `I(X_i; X_j | K) ≥ 0` for `i < j`, `K` ⊆ rest.
pub fn classical_elemental_set(ctx: &SystemContext) -> Result<Vec<InequalityInstance>> {
    check_arity(ctx)?;
    let n = ctx.arity();
    let full = ctx.full_mask();
    let mut out = Vec::new();
    for i in 0..n {
        let a = 1 << i;
        out.push(InequalityInstance::new(ctx, InequalityKind::ClassicalConditional, vec![a, full & !a])?);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (1 << i, 1 << j);
            let mut ks: Vec<SubsetMask> = submasks(full & !(a | b)).collect();
            ks.sort_unstable();
            for k in ks {
                out.push(InequalityInstance::new(
                    ctx,
                    InequalityKind::ClassicalConditionalMutualInformation,
                    vec![a, b, k],
                )?);
            }
        }
    }
    Ok(out)
}

fn sort_parts(list: &mut [InequalityInstance]) {
    list.sort_by(|x, y| (x.kind, &x.parts).cmp(&(y.kind, &y.parts)));
}

/// Dense coefficient vectors (indexed by `mask - 1`) of the instances.
pub fn generator_matrix(list: &[InequalityInstance]) -> Vec<Vec<Rational>> {
    list.iter().map(|i| i.functional.to_dense()).collect()
}
