//! One-time-pad construction moving a distribution for the block `V_T` to
//! one whose full Δ under a multi-variable code equals the block Δ.

use crate::decouplings::{composite_context, DecouplingCode};
use crate::entropic::{ClassicalDistribution, Variable};
use crate::error::{Error, Result};
use crate::polyhedra::Rational;

const MAX_ATOMS: u64 = 1 << 22;

/// `p` over `[B1, E1, B2, E2, V1, .., Vn]`, `t` a bitmask over the
/// auxiliary variables. Outputs are padded with `R^f = Σ_i R_i^f mod d`;
/// each `V_t` with `t ∈ T` also carries its own pads and every other
/// auxiliary variable becomes a copy of the unpadded outputs.
pub fn distribution_transform(
    p: &ClassicalDistribution,
    code: &DecouplingCode,
    t: u32,
) -> Result<ClassicalDistribution> {
    let n = code.n_aux();
    let ctx = composite_context(n)?;
    if p.context() != &ctx {
        return Err(Error::Domain(format!(
            "distribution over {:?} does not match {:?}",
            p.context().names(),
            ctx.names()
        )));
    }
    if !code.is_consistent() {
        return Err(Error::Validation(format!("inconsistent decoupling {code}")));
    }
    if t >> n != 0 {
        return Err(Error::Domain(format!("T = {t:#b} exceeds {n} auxiliary variables")));
    }
    let alph = p.alphabets();
    let d = alph[..4].iter().copied().max().unwrap_or(1).max(1);
    let members: Vec<usize> = (0..n).filter(|i| t & (1 << i) != 0).collect();
    let k = members.len() as u32;
    let d4 = (d as u64).pow(4);
    let pads = d4.pow(k);
    let atoms = p.atoms().count() as u64;
    if atoms.saturating_mul(pads) > MAX_ATOMS {
        return Err(Error::Capacity(format!("{atoms} atoms times {pads} pad values")));
    }
    let mut vars: Vec<Variable> = ctx.names()[..4].iter().map(|s| Variable::new(s.clone(), d)).collect();
    for (i, name) in ctx.names()[4..].iter().enumerate() {
        let size = if t & (1 << i) != 0 { alph[4 + i] as u64 * d4 } else { d4 };
        let size = u32::try_from(size).map_err(|_| Error::Capacity(format!("alphabet of {name}")))?;
        vars.push(Variable::new(name.clone(), size));
    }

    let image = |o: &[u32], pad: u64| -> Vec<u32> {
        // r[i][f] for the i-th member of T.
        let r: Vec<[u32; 4]> = (0..members.len())
            .map(|i| {
                let block = pad / d4.pow(i as u32) % d4;
                std::array::from_fn(|f| (block / (d as u64).pow(f as u32) % d as u64) as u32)
            })
            .collect();
        let mut out: Vec<u32> = (0..4).map(|f| (o[f] + r.iter().map(|ri| ri[f]).sum::<u32>()) % d).collect();
        let outputs = o[..4].iter().rev().fold(0u64, |acc, &x| acc * d as u64 + x as u64);
        for i in 0..n {
            let v = match members.iter().position(|&m| m == i) {
                Some(j) => {
                    let pads = r[j].iter().rev().fold(0u64, |acc, &x| acc * d as u64 + x as u64);
                    o[4 + i] as u64 * d4 + pads
                }
                None => outputs,
            };
            out.push(v as u32);
        }
        out
    };

    match p.exact_probabilities() {
        Some(ex) => {
            let w = Rational::new(1, pads as i64);
            let pmf = p
                .atoms()
                .zip(ex)
                .flat_map(|((o, _), q)| {
                    let q = q * &w;
                    (0..pads).map(move |pad| (image(o, pad), q.clone()))
                })
                .collect::<Vec<_>>();
            ClassicalDistribution::new(&vars, pmf)
        }
        None => {
            let w = 1.0 / pads as f64;
            let pmf = p.atoms().flat_map(|(o, q)| (0..pads).map(move |pad| (image(o, pad), q * w))).collect::<Vec<_>>();
            ClassicalDistribution::from_f64(&vars, pmf)
        }
    }
}
