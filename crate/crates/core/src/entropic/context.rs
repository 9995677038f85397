use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bitmask over the systems of a [`SystemContext`]; bit `i` is the `i`-th name.
pub type SubsetMask = u32;

/// An ordered list of named systems. The order fixes the bit layout of every
/// subset mask built against the context.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct SystemContext {
    names: Vec<String>,
}

impl SystemContext {
    pub const MAX_ARITY: usize = 16;

    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > Self::MAX_ARITY {
            return Err(Error::Capacity(format!(
                "{} systems exceeds the cap of {}",
                names.len(),
                Self::MAX_ARITY
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(Error::Validation("empty system name".into()));
            }
            if names[..i].contains(n) {
                return Err(Error::Validation(format!("duplicate system name {n:?}")));
            }
        }
        Ok(SystemContext { names })
    }

    /// Context with generic labels `X1..Xn`.
    pub fn generic(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("X{i}")))
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn full_mask(&self) -> SubsetMask {
        if self.names.is_empty() {
            0
        } else {
            (1u32 << self.names.len()) - 1
        }
    }

    /// Number of nonempty subsets, `2^n - 1`.
    pub fn subset_count(&self) -> usize {
        self.full_mask() as usize
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn bit(&self, name: &str) -> Result<SubsetMask> {
        self.index_of(name)
            .map(|i| 1 << i)
            .ok_or_else(|| Error::Domain(format!("unknown system {name:?}")))
    }

    pub fn mask_of(&self, names: &[&str]) -> Result<SubsetMask> {
        names.iter().try_fold(0, |m, n| Ok(m | self.bit(n)?))
    }

    pub fn check_mask(&self, mask: SubsetMask) -> Result<()> {
        if mask & !self.full_mask() != 0 {
            return Err(Error::Domain(format!(
                "subset mask {mask:#b} outside a context of {} systems",
                self.arity()
            )));
        }
        Ok(())
    }

    pub fn check_nonempty(&self, mask: SubsetMask) -> Result<()> {
        self.check_mask(mask)?;
        if mask == 0 {
            return Err(Error::Domain("empty subset".into()));
        }
        Ok(())
    }

    /// Parse a concatenation of system names such as `B1E1V` (longest match
    /// first). `""` and `"∅"` are the empty subset.
    pub fn parse_subset(&self, s: &str) -> Result<SubsetMask> {
        let s = s.trim();
        if s.is_empty() || s == "∅" {
            return Ok(0);
        }
        let mut rest = s;
        let mut mask = 0;
        let mut order: Vec<usize> = (0..self.arity()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.names[i].len()));
        'outer: while !rest.is_empty() {
            for &i in &order {
                if let Some(r) = rest.strip_prefix(self.names[i].as_str()) {
                    mask |= 1 << i;
                    rest = r;
                    continue 'outer;
                }
            }
            return Err(Error::Parse(format!("cannot split {s:?} into system names")));
        }
        Ok(mask)
    }

    /// Concatenated names in context order, `∅` for the empty set.
    pub fn label(&self, mask: SubsetMask) -> String {
        if mask == 0 {
            return "∅".into();
        }
        self.names
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, n)| n.as_str())
            .collect()
    }
}

impl fmt::Debug for SystemContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SystemContext{:?}", self.names)
    }
}

impl TryFrom<Vec<String>> for SystemContext {
    type Error = Error;
    fn try_from(names: Vec<String>) -> Result<Self> {
        SystemContext::new(names)
    }
}

impl From<SystemContext> for Vec<String> {
    fn from(c: SystemContext) -> Self {
        c.names
    }
}

/// Iterate over the submasks of `mask`, including `mask` itself and 0.
pub fn submasks(mask: SubsetMask) -> impl Iterator<Item = SubsetMask> {
    let mut cur = Some(mask);
    std::iter::from_fn(move || {
        let s = cur?;
        cur = if s == 0 { None } else { Some((s - 1) & mask) };
        Some(s)
    })
}
