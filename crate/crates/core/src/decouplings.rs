//! Standard decouplings, their symmetries, and the Δ functionals they induce.
//!
//! Coefficient vectors α live on the context `[B, E, V]` (or `[B, E, V1, ..,
//! Vn]`); Δ lives on the composite context `[B1, E1, B2, E2, V..]`. A code
//! entry `a` or `b` uses bit 0 for B and bit 1 for E, so `0, 1, 2, 3` stand
//! for `∅, B, E, BE`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::entropic::{LinearEntropyFunctional as F, SubsetMask, SystemContext};
use crate::error::{Error, Result};
use crate::polyhedra::Rational;

pub const MAX_AUX: usize = 4;

/// α-side bits.
pub const B: SubsetMask = 1;
pub const E: SubsetMask = 2;

/// Composite-side bits.
pub const B1: SubsetMask = 1;
pub const E1: SubsetMask = 2;
pub const B2: SubsetMask = 4;
pub const E2: SubsetMask = 8;

pub fn alpha_context(n_aux: usize) -> Result<SystemContext> {
    let mut names = vec!["B".to_string(), "E".to_string()];
    names.extend(aux_names(n_aux));
    SystemContext::new(names)
}

pub fn composite_context(n_aux: usize) -> Result<SystemContext> {
    let mut names: Vec<String> = ["B1", "E1", "B2", "E2"].iter().map(|s| s.to_string()).collect();
    names.extend(aux_names(n_aux));
    SystemContext::new(names)
}

fn aux_names(n_aux: usize) -> Vec<String> {
    match n_aux {
        1 => vec!["V".into()],
        n => (1..=n).map(|i| format!("V{i}")).collect(),
    }
}

/// Mask of `V_i` (0-based) in the α context.
pub fn alpha_v(i: usize) -> SubsetMask {
    4 << i
}

/// Mask of `V_i` (0-based) in the composite context.
pub fn composite_v(i: usize) -> SubsetMask {
    16 << i
}

/// `M̂_1` of an `a` entry as a composite mask.
pub fn m_hat(a: u8) -> SubsetMask {
    a as SubsetMask
}

/// `M̃_2` of a `b` entry as a composite mask.
pub fn m_tilde(b: u8) -> SubsetMask {
    (b as SubsetMask) << 2
}

/// One `(a, b)` pair per auxiliary variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<[u8; 2]>", into = "Vec<[u8; 2]>")]
pub struct DecouplingCode(Vec<(u8, u8)>);

impl DecouplingCode {
    pub fn new(pairs: Vec<(u8, u8)>) -> Result<Self> {
        if pairs.len() > MAX_AUX {
            return Err(Error::Capacity(format!("{} auxiliary variables", pairs.len())));
        }
        if pairs.iter().any(|&(a, b)| a > 3 || b > 3) {
            return Err(Error::Validation(format!("code entries must lie in 0..=3: {pairs:?}")));
        }
        let code = DecouplingCode(pairs);
        if !code.is_consistent() {
            return Err(Error::Validation(format!("inconsistent decoupling {code}")));
        }
        Ok(code)
    }

    pub fn single(a: u8, b: u8) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn trivial() -> Self {
        DecouplingCode(Vec::new())
    }

    pub fn pairs(&self) -> &[(u8, u8)] {
        &self.0
    }

    pub fn n_aux(&self) -> usize {
        self.0.len()
    }

    /// Each of B1, E1 absorbed by at most one variable, likewise B2, E2.
    pub fn is_consistent(&self) -> bool {
        consistent(&self.0)
    }

    pub fn as_single(&self) -> Result<(u8, u8)> {
        match self.0[..] {
            [p] => Ok(p),
            _ => Err(Error::Unsupported(format!("{self} is not a single-variable code"))),
        }
    }

    /// `(a_J, b_J)`: systems absorbed by any variable in `j` (bitmask over variables).
    pub fn induced(&self, j: u32) -> (u8, u8) {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| j & (1 << i) != 0)
            .fold((0, 0), |(a, b), (_, &(x, y))| (a | x, b | y))
    }
}

pub fn consistent(pairs: &[(u8, u8)]) -> bool {
    let mut a_seen = 0;
    let mut b_seen = 0;
    for &(a, b) in pairs {
        if a & a_seen != 0 || b & b_seen != 0 {
            return false;
        }
        a_seen |= a;
        b_seen |= b;
    }
    true
}

impl fmt::Display for DecouplingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(a, b)| format!("({a},{b})")).collect();
        if parts.is_empty() {
            write!(f, "()")
        } else {
            write!(f, "{}", parts.join(""))
        }
    }
}

/// Accepts `(a,b)(c,d)..`, or a bare `a,b` for one variable.
impl std::str::FromStr for DecouplingCode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("decoupling code {s:?}"));
        let body = if s.starts_with('(') { s.clone() } else { format!("({s})") };
        if body == "()" {
            return Ok(DecouplingCode::trivial());
        }
        let mut pairs = Vec::new();
        for part in body.strip_prefix('(').and_then(|b| b.strip_suffix(')')).ok_or_else(bad)?.split(")(") {
            let (a, b) = part.split_once(',').ok_or_else(bad)?;
            pairs.push((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?));
        }
        DecouplingCode::new(pairs)
    }
}

impl TryFrom<Vec<[u8; 2]>> for DecouplingCode {
    type Error = Error;
    fn try_from(v: Vec<[u8; 2]>) -> Result<Self> {
        DecouplingCode::new(v.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<DecouplingCode> for Vec<[u8; 2]> {
    fn from(c: DecouplingCode) -> Self {
        c.0.into_iter().map(|(a, b)| [a, b]).collect()
    }
}

/// Label of an `a` or `b` entry on channel `k` (1 or 2), e.g. `B1E1` or `∅`.
pub fn output_label(x: u8, k: u8) -> String {
    match x {
        0 => "∅".into(),
        1 => format!("B{k}"),
        2 => format!("E{k}"),
        _ => format!("B{k}E{k}"),
    }
}

/// All consistent codes for `n_aux` variables, in lexicographic order.
pub fn enumerate_standard(n_aux: usize) -> Result<Vec<DecouplingCode>> {
    if n_aux > MAX_AUX {
        return Err(Error::Capacity(format!("{n_aux} auxiliary variables")));
    }
    let mut out = vec![Vec::new()];
    for _ in 0..n_aux {
        let mut next = Vec::new();
        for prefix in &out {
            for a in 0..4u8 {
                for b in 0..4u8 {
                    let mut p: Vec<(u8, u8)> = prefix.clone();
                    p.push((a, b));
                    if consistent(&p) {
                        next.push(p);
                    }
                }
            }
        }
        out = next;
    }
    out.sort();
    Ok(out.into_iter().map(DecouplingCode).collect())
}

fn check_alpha(alpha: &F, n_aux: usize) -> Result<()> {
    let expected = alpha_context(n_aux)?;
    if alpha.context() != &expected {
        return Err(Error::Domain(format!(
            "α over {:?} does not match a code with {n_aux} auxiliary variables",
            alpha.context().names()
        )));
    }
    Ok(())
}

/// `f_α(first) + f_α(second) - f_α(joint)` as a functional of the joint
/// output state on `[B1, E1, B2, E2, V..]`.
pub fn delta_functional(alpha: &F, code: &DecouplingCode) -> Result<F> {
    if !code.is_consistent() {
        return Err(Error::Validation(format!("inconsistent decoupling {code}")));
    }
    let n = code.n_aux();
    check_alpha(alpha, n)?;
    let ctx = composite_context(n)?;
    let mut out = F::zero(&ctx);
    let neg = |c: &Rational| -c;
    for (mask, c) in alpha.terms() {
        let s = mask & 3;
        let t = mask >> 2;
        let mut v = 0;
        let mut absorbed_1 = 0;
        let mut absorbed_2 = 0;
        for (i, &(a, b)) in code.pairs().iter().enumerate() {
            if t & (1 << i) != 0 {
                v |= composite_v(i);
                absorbed_1 |= m_tilde(b);
                absorbed_2 |= m_hat(a);
            }
        }
        let s1 = s;
        let s2 = s << 2;
        out.add_term(s1 | v | absorbed_1, c);
        out.add_term(s2 | v | absorbed_2, c);
        out.add_term(s1 | s2 | v, &neg(c));
    }
    Ok(out)
}

/// `H(s1 M̃2 V) + H(M̂1 s2 V) - H(s1 s2 V) - H(M̂1 M̃2 V)` for `s ⊆ {B, E}`.
pub fn esv_term(s: SubsetMask, code: &DecouplingCode) -> Result<F> {
    let (a, b) = code.as_single()?;
    if s > 3 {
        return Err(Error::Domain(format!("s = {s:#b} is not a subset of BE")));
    }
    let ctx = composite_context(1)?;
    let v = composite_v(0);
    let (s1, s2) = (s, s << 2);
    let (mh, mt) = (m_hat(a), m_tilde(b));
    let one = Rational::one();
    let mut f = F::zero(&ctx);
    f.add_term(s1 | mt | v, &one);
    f.add_term(mh | s2 | v, &one);
    f.add_term(s1 | s2 | v, &-&one);
    f.add_term(mh | mt | v, &-&one);
    Ok(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymmetryKind {
    /// Exchange the roles of B and E.
    BESwap,
    /// Exchange the two channels.
    ChannelSwap,
    /// Complement the absorbed systems and dualize α through a purification.
    PurificationDual,
}

fn swap_be(x: u8) -> u8 {
    ((x & 1) << 1) | ((x >> 1) & 1)
}

impl SymmetryKind {
    pub fn apply_code(self, code: &DecouplingCode) -> DecouplingCode {
        let pairs = code
            .pairs()
            .iter()
            .map(|&(a, b)| match self {
                SymmetryKind::BESwap => (swap_be(a), swap_be(b)),
                SymmetryKind::ChannelSwap => (b, a),
                SymmetryKind::PurificationDual => (3 - a, 3 - b),
            })
            .collect();
        DecouplingCode(pairs)
    }

    /// Action on α coefficients. Channel exchange leaves α unchanged;
    /// purification dualizes each `V_t` block by `s ↦ BE \ s` and leaves the
    /// block without auxiliary variables alone.
    pub fn apply_alpha(self, alpha: &F) -> Result<F> {
        let ctx = alpha.context().clone();
        match self {
            SymmetryKind::BESwap => alpha.relabel(&ctx, |m| (m & !3) | swap_be((m & 3) as u8) as SubsetMask),
            SymmetryKind::ChannelSwap => Ok(alpha.clone()),
            SymmetryKind::PurificationDual => {
                alpha.relabel(&ctx, |m| if m >> 2 == 0 { m } else { (m & !3) | (3 & !m) })
            }
        }
    }

    /// Matching relabeling of the composite context, when one exists.
    pub fn composite_images(self, n_aux: usize) -> Option<Vec<SubsetMask>> {
        let mut images: Vec<SubsetMask> = match self {
            SymmetryKind::BESwap => vec![E1, B1, E2, B2],
            SymmetryKind::ChannelSwap => vec![B2, E2, B1, E1],
            SymmetryKind::PurificationDual => return None,
        };
        images.extend((0..n_aux).map(composite_v));
        Some(images)
    }
}

/// Which symmetries to quotient by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reduction {
    /// B/E exchange and channel exchange: the seven single-variable classes.
    Swaps,
    /// Additionally purification duality: the five main cases.
    SwapsAndDuality,
}

impl Reduction {
    pub fn generators(self) -> &'static [SymmetryKind] {
        match self {
            Reduction::Swaps => &[SymmetryKind::BESwap, SymmetryKind::ChannelSwap],
            Reduction::SwapsAndDuality => {
                &[SymmetryKind::BESwap, SymmetryKind::ChannelSwap, SymmetryKind::PurificationDual]
            }
        }
    }
}

/// Preference order for representatives: B1E1 first, then B1, E1, ∅.
fn rep_key(code: &DecouplingCode) -> Vec<(u8, u8)> {
    let rank = |x: u8| [3u8, 1, 2, 0][x as usize];
    code.pairs().iter().map(|&(a, b)| (rank(a), rank(b))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecouplingClass {
    pub representative: DecouplingCode,
    /// Other members, in lexicographic order.
    pub equivalents: Vec<DecouplingCode>,
}

impl DecouplingClass {
    pub fn members(&self) -> impl Iterator<Item = &DecouplingCode> {
        std::iter::once(&self.representative).chain(&self.equivalents)
    }

    pub fn contains(&self, code: &DecouplingCode) -> bool {
        self.members().any(|c| c == code)
    }
}

/// Symmetry element carrying one code to another, as a word in the generators.
pub fn orbit_word(from: &DecouplingCode, to: &DecouplingCode, reduction: Reduction) -> Option<Vec<SymmetryKind>> {
    let mut frontier = vec![(from.clone(), Vec::new())];
    let mut seen = vec![from.clone()];
    while let Some((c, word)) = frontier.first().cloned() {
        frontier.remove(0);
        if &c == to {
            return Some(word);
        }
        for &g in reduction.generators() {
            let d = g.apply_code(&c);
            if !seen.contains(&d) {
                seen.push(d.clone());
                let mut w = word.clone();
                w.push(g);
                frontier.push((d, w));
            }
        }
    }
    None
}

/// Orbits of single-variable codes under the chosen symmetries, ordered by
/// representative preference.
pub fn reduce_by_symmetry(codes: &[DecouplingCode], reduction: Reduction) -> Result<Vec<DecouplingClass>> {
    for c in codes {
        c.as_single()?;
    }
    let mut classes: Vec<Vec<DecouplingCode>> = Vec::new();
    for c in codes {
        if classes.iter().any(|cl| cl.contains(c)) {
            continue;
        }
        let mut orbit = vec![c.clone()];
        let mut i = 0;
        while i < orbit.len() {
            for &g in reduction.generators() {
                let d = g.apply_code(&orbit[i]);
                if !orbit.contains(&d) {
                    orbit.push(d);
                }
            }
            i += 1;
        }
        orbit.retain(|d| codes.contains(d));
        classes.push(orbit);
    }
    let mut out: Vec<DecouplingClass> = classes
        .into_iter()
        .map(|mut orbit| {
            orbit.sort_by_key(rep_key);
            let representative = orbit.remove(0);
            orbit.sort();
            orbit.reverse();
            DecouplingClass { representative, equivalents: orbit }
        })
        .collect();
    out.sort_by_key(|c| rep_key(&c.representative));
    Ok(out)
}

/// One row of the correspondence between the five duality-reduced cases and
/// the seven swap classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseCrossReference {
    pub case: usize,
    /// Label used for the case in the five-row summary table.
    pub label: DecouplingCode,
    pub representative: DecouplingCode,
    /// Swap classes merged into this case, by representative.
    pub swap_classes: Vec<DecouplingCode>,
    pub members: Vec<DecouplingCode>,
}

/// Summary-table labels of the five cases, by the swap-class representative
/// that anchors each case.
const CASE_LABELS: [((u8, u8), (u8, u8)); 5] =
    [((3, 3), (3, 3)), ((3, 1), (3, 2)), ((3, 0), (3, 0)), ((1, 1), (1, 1)), ((1, 2), (1, 2))];

pub fn case_cross_reference() -> Result<Vec<CaseCrossReference>> {
    let codes = enumerate_standard(1)?;
    let seven = reduce_by_symmetry(&codes, Reduction::Swaps)?;
    let five = reduce_by_symmetry(&codes, Reduction::SwapsAndDuality)?;
    let mut out = Vec::new();
    for (i, &((ra, rb), (la, lb))) in CASE_LABELS.iter().enumerate() {
        let rep = DecouplingCode::single(ra, rb)?;
        let class = five
            .iter()
            .find(|c| c.contains(&rep))
            .ok_or_else(|| Error::Validation(format!("no case contains {rep}")))?;
        let swap_classes: Vec<DecouplingCode> = seven
            .iter()
            .filter(|s| class.contains(&s.representative))
            .map(|s| s.representative.clone())
            .collect();
        let mut members: Vec<DecouplingCode> = class.members().cloned().collect();
        members.sort();
        members.reverse();
        out.push(CaseCrossReference {
            case: i + 1,
            label: DecouplingCode::single(la, lb)?,
            representative: rep,
            swap_classes,
            members,
        });
    }
    if out.iter().map(|r| r.members.len()).sum::<usize>() != codes.len() {
        return Err(Error::Validation("cases do not partition the codes".into()));
    }
    Ok(out)
}

/// Serialized form of a code with its class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecouplingJson {
    pub aux: usize,
    pub code: DecouplingCode,
    pub class_rep: [u8; 2],
    pub equivalents: Vec<[u8; 2]>,
}

pub fn decoupling_json(classes: &[DecouplingClass]) -> Result<Vec<DecouplingJson>> {
    let mut out = BTreeMap::new();
    for class in classes {
        let rep = class.representative.as_single()?;
        for code in class.members() {
            let eq = class
                .members()
                .filter(|c| *c != code)
                .map(|c| c.as_single().map(|(a, b)| [a, b]))
                .collect::<Result<Vec<_>>>()?;
            out.insert(
                code.clone(),
                DecouplingJson { aux: 1, code: code.clone(), class_rep: [rep.0, rep.1], equivalents: eq },
            );
        }
    }
    Ok(out.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_codes() {
        let c: DecouplingCode = "(1,2)(2,0)".parse().unwrap();
        assert_eq!(c.to_string(), "(1,2)(2,0)");
        assert_eq!("3,3".parse::<DecouplingCode>().unwrap(), DecouplingCode::single(3, 3).unwrap());
        assert_eq!("()".parse::<DecouplingCode>().unwrap(), DecouplingCode::trivial());
        assert!("(1,2".parse::<DecouplingCode>().is_err());
        assert!("(4,0)".parse::<DecouplingCode>().is_err());
    }
    use crate::entropic::formula::parse;

    fn code(a: u8, b: u8) -> DecouplingCode {
        DecouplingCode::single(a, b).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_standard(0).unwrap(), vec![DecouplingCode::trivial()]);
        assert_eq!(enumerate_standard(1).unwrap().len(), 16);
        assert_eq!(enumerate_standard(2).unwrap().len(), 81);
        assert!(DecouplingCode::new(vec![(1, 0), (3, 0)]).is_err());
    }

    #[test]
    fn induced_assignment() {
        let c = DecouplingCode::new(vec![(1, 2), (2, 0)]).unwrap();
        assert_eq!(c.induced(0b11), (3, 2));
        assert_eq!(c.induced(0b10), (2, 0));
        assert_eq!(c.induced(0), (0, 0));
    }

    #[test]
    fn zero_aux_delta() {
        let ctx = alpha_context(0).unwrap();
        let alpha = parse(&ctx, "H(B)").unwrap();
        let d = delta_functional(&alpha, &DecouplingCode::trivial()).unwrap();
        assert_eq!(d, parse(&composite_context(0).unwrap(), "I(B1;B2)").unwrap());
    }

    #[test]
    fn rejects_mismatched_alpha() {
        let alpha = parse(&alpha_context(0).unwrap(), "H(B)").unwrap();
        assert!(matches!(delta_functional(&alpha, &code(3, 3)), Err(Error::Domain(_))));
    }

    #[test]
    fn seven_classes() {
        let classes = reduce_by_symmetry(&enumerate_standard(1).unwrap(), Reduction::Swaps).unwrap();
        let reps: Vec<_> = classes.iter().map(|c| c.representative.as_single().unwrap()).collect();
        assert_eq!(reps, vec![(3, 3), (3, 1), (3, 0), (1, 1), (1, 2), (1, 0), (0, 0)]);
    }

    #[test]
    fn symmetries_are_involutions() {
        for c in enumerate_standard(1).unwrap() {
            for g in Reduction::SwapsAndDuality.generators() {
                assert_eq!(g.apply_code(&g.apply_code(&c)), c);
            }
        }
    }

    #[test]
    fn orbit_words() {
        let w = orbit_word(&code(3, 1), &code(2, 3), Reduction::Swaps).unwrap();
        let mut c = code(3, 1);
        for g in &w {
            c = g.apply_code(&c);
        }
        assert_eq!(c, code(2, 3));
        assert!(orbit_word(&code(3, 3), &code(0, 0), Reduction::Swaps).is_none());
    }

    #[test]
    fn json_shape() {
        let classes = reduce_by_symmetry(&enumerate_standard(1).unwrap(), Reduction::Swaps).unwrap();
        let rows = decoupling_json(&classes).unwrap();
        let r = rows.iter().find(|r| r.code == code(3, 1)).unwrap();
        assert_eq!(
            serde_json::to_string(r).unwrap(),
            r#"{"aux":1,"code":[[3,1]],"class_rep":[3,1],"equivalents":[[3,2],[2,3],[1,3]]}"#
        );
    }
}
