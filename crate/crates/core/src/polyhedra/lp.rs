//! Exact phase-one simplex deciding membership in a finitely generated cone.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::linalg::{dot, is_zero_vec};
use super::rational::Rational;
use crate::error::{Error, Result};

/// Nonnegative multipliers `λ` with `Σ λ_i g_i = target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub multipliers: BTreeMap<usize, Rational>,
    pub residual: Vec<Rational>,
}

impl Certificate {
    /// Recompute the residual against `generators`.
    pub fn with_residual(
        multipliers: BTreeMap<usize, Rational>,
        target: &[Rational],
        generators: &[Vec<Rational>],
    ) -> Self {
        let mut residual = target.to_vec();
        for (&i, m) in &multipliers {
            for (r, g) in residual.iter_mut().zip(&generators[i]) {
                if !g.is_zero() {
                    *r -= m * g;
                }
            }
        }
        Certificate { multipliers, residual }
    }

    pub fn is_valid(&self) -> bool {
        self.multipliers.values().all(|m| !m.is_negative()) && is_zero_vec(&self.residual)
    }

    /// Exact re-check against the original problem.
    pub fn verify(&self, target: &[Rational], generators: &[Vec<Rational>]) -> bool {
        if self.multipliers.keys().any(|&i| i >= generators.len()) {
            return false;
        }
        let fresh = Certificate::with_residual(self.multipliers.clone(), target, generators);
        fresh.is_valid() && fresh.residual == self.residual
    }
}

/// Outcome of [`dual_membership`]: the Farkas alternative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Member(Certificate),
    /// `w` with `w·g_i ≥ 0` for every generator and `w·target < 0`.
    Refuted(Vec<Rational>),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Membership::Member(c) => Some(c),
            Membership::Refuted(_) => None,
        }
    }
}

pub fn verify_refutation(w: &[Rational], target: &[Rational], generators: &[Vec<Rational>]) -> bool {
    dot(w, target).is_negative() && generators.iter().all(|g| !dot(w, g).is_negative())
}

/// Decide whether `target` lies in the cone generated by `generators`, returning
/// either exact multipliers or a separating vector. Both branches are verified
/// before returning.
pub fn dual_membership(target: &[Rational], generators: &[Vec<Rational>]) -> Result<Membership> {
    let m = target.len();
    if let Some(bad) = generators.iter().position(|g| g.len() != m) {
        return Err(Error::Domain(format!(
            "generator {bad} has length {} but the target has length {m}",
            generators[bad].len()
        )));
    }
    let outcome = Tableau::new(target, generators).solve();
    let ok = match &outcome {
        Membership::Member(c) => c.verify(target, generators),
        Membership::Refuted(w) => verify_refutation(w, target, generators),
    };
    if !ok {
        return Err(Error::Validation("simplex produced an invalid certificate".into()));
    }
    Ok(outcome)
}

struct Tableau {
    k: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Reduced costs of the phase-one objective `Σ artificials`.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    sign: Vec<bool>,
    target: Vec<Rational>,
    generators: Vec<Vec<Rational>>,
}

impl Tableau {
    fn new(target: &[Rational], generators: &[Vec<Rational>]) -> Self {
        let m = target.len();
        let k = generators.len();
        let n = k + m;
        let sign: Vec<bool> = target.iter().map(|b| b.is_negative()).collect();
        let mut rows = vec![vec![Rational::zero(); n]; m];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, g) in generators.iter().enumerate() {
                row[j] = if sign[i] { -g[i].clone() } else { g[i].clone() };
            }
            row[k + i] = Rational::one();
        }
        let rhs: Vec<Rational> = target.iter().map(Rational::abs).collect();
        let mut cost = vec![Rational::zero(); n];
        for (j, c) in cost.iter_mut().enumerate().take(k) {
            *c = -rows.iter().map(|r| &r[j]).sum::<Rational>();
        }
        Tableau {
            k,
            rows,
            rhs,
            cost,
            basis: (k..n).collect(),
            sign,
            target: target.to_vec(),
            generators: generators.to_vec(),
        }
    }

    fn solve(mut self) -> Membership {
        // Bland's rule: lowest-index entering column, lowest-index leaving basic variable.
        while let Some(e) = self.cost.iter().position(Rational::is_negative) {
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let (r, _) = leave.expect("phase-one objective is bounded below");
            self.pivot(r, e);
        }
        let art_value: Rational = self
            .basis
            .iter()
            .zip(&self.rhs)
            .filter(|(b, _)| **b >= self.k)
            .map(|(_, v)| v.clone())
            .sum();
        if art_value.is_zero() {
            let mut multipliers = BTreeMap::new();
            for (b, v) in self.basis.iter().zip(&self.rhs) {
                if *b < self.k && !v.is_zero() {
                    multipliers.insert(*b, v.clone());
                }
            }
            return Membership::Member(Certificate::with_residual(
                multipliers,
                &self.target,
                &self.generators,
            ));
        }
        // Dual y_i = 1 - (reduced cost of artificial i); undo the row sign flips.
        let w: Vec<Rational> = (0..self.rows.len())
            .map(|i| {
                let y = Rational::one() - &self.cost[self.k + i];
                if self.sign[i] {
                    y
                } else {
                    -y
                }
            })
            .collect();
        Membership::Refuted(w)
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let inv = self.rows[r][e].recip();
        let nz: Vec<usize> = (0..self.rows[r].len())
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        for &j in &nz {
            self.rows[r][j] *= &inv;
        }
        self.rhs[r] *= &inv;
        let pivot_row: Vec<(usize, Rational)> =
            nz.iter().map(|&j| (j, self.rows[r][j].clone())).collect();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][e].is_zero() {
                continue;
            }
            let f = self.rows[i][e].clone();
            for (j, v) in &pivot_row {
                self.rows[i][*j] -= &f * v;
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        if !self.cost[e].is_zero() {
            let f = self.cost[e].clone();
            for (j, v) in &pivot_row {
                self.cost[*j] -= &f * v;
            }
        }
        self.basis[r] = e;
    }
}
