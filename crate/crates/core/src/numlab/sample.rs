//! Seeded random states, isometries and the sampled Δ check.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::channel::{apply_isometry, IsometryChannel};
use crate::decouplings::{composite_context, delta_functional, DecouplingCode};
use crate::entropic::{ClassicalDistribution, DensityMatrix, LinearEntropyFunctional as F, PureState, SystemContext, Variable, C64};
use crate::error::{Error, Result};

pub const MAX_SAMPLE_DIM: usize = 64;

pub(crate) fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..n).map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect()
}

pub(crate) fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|c| *c /= n);
}

fn total_dim(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Validation(format!("invalid dims {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if total > MAX_SAMPLE_DIM {
        return Err(Error::Capacity(format!("total dimension {total} exceeds {MAX_SAMPLE_DIM}")));
    }
    Ok(total)
}

/// Random mixed state on systems `X1..Xn`: the marginal of a Haar-random
/// pure state with a reference of the same total dimension.
pub fn sample_state(dims: &[usize], seed: u64) -> Result<DensityMatrix> {
    let pure = sample_purified_state(dims, seed)?;
    DensityMatrix::from_pure(&pure)?.partial_trace((1 << dims.len()) - 1)
}

/// Haar-random pure state on `X1..Xn` plus a reference `R` of dimension
/// `∏ dims`.
pub fn sample_purified_state(dims: &[usize], seed: u64) -> Result<PureState> {
    let total = total_dim(dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names: Vec<String> = SystemContext::generic(dims.len())?.names().to_vec();
    names.push("R".into());
    let mut all = dims.to_vec();
    all.push(total);
    let amps = gaussian_vector(total * total, &mut rng);
    PureState::normalized(SystemContext::new(names)?, all, amps.into())
}

pub fn random_isometry(d_in: usize, d_b: usize, d_e: usize, rng: &mut ChaCha8Rng) -> Result<IsometryChannel> {
    if d_b * d_e < d_in {
        return Err(Error::Domain(format!("no isometry from {d_in} into {}", d_b * d_e)));
    }
    let g = DMatrix::from_vec(d_b * d_e, d_in, gaussian_vector(d_b * d_e * d_in, rng));
    IsometryChannel::new(d_in, d_b, d_e, g.qr().q())
}

/// Local dimensions for sampled composite states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaDims {
    pub d_a: usize,
    pub d_b: usize,
    pub d_e: usize,
    /// Per auxiliary variable.
    pub d_v: usize,
    /// Purifying reference, traced out.
    pub d_r: usize,
}

impl Default for DeltaDims {
    fn default() -> Self {
        DeltaDims { d_a: 2, d_b: 2, d_e: 2, d_v: 2, d_r: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaCheck {
    pub samples: usize,
    pub min: f64,
    pub argmin: usize,
}

/// Sum of `c · H(mask)` over the terms of `f`, whose context must be a
/// prefix of the state's.
pub(crate) fn evaluate_prefix(f: &F, state: &PureState) -> Result<f64> {
    let mut total = 0.0;
    for (m, c) in f.terms() {
        total += c.to_f64() * state.entropy(m)?;
    }
    Ok(total)
}

/// `(U_1 ⊗ U_2) φ_{A1 A2 V.. R}` as a pure state on `[B1,E1,B2,E2,V..,R]`.
pub fn composite_state(phi: &[C64], u1: &IsometryChannel, u2: &IsometryChannel, n_aux: usize, d_v: usize, d_r: usize) -> Result<PureState> {
    let mut dims = vec![u1.d_in(), u2.d_in()];
    dims.extend(std::iter::repeat_n(d_v, n_aux));
    dims.push(d_r);
    if phi.len() != dims.iter().product::<usize>() {
        return Err(Error::Domain(format!("{} amplitudes for dims {dims:?}", phi.len())));
    }
    let (amps, dims) = apply_isometry(phi, &dims, 1, u2);
    let (amps, dims) = apply_isometry(&amps, &dims, 0, u1);
    let mut names = composite_context(n_aux)?.names().to_vec();
    names.push("R".into());
    PureState::normalized(SystemContext::new(names)?, dims, amps.into())
}

/// Minimum of Δ_code(α) over states `(U_1 ⊗ U_2) φ` with φ and both
/// isometries sampled per seed.
pub fn numeric_delta_check(alpha: &F, code: &DecouplingCode, samples: usize, dims: &DeltaDims, seed: u64) -> Result<DeltaCheck> {
    let delta = delta_functional(alpha, code)?;
    let n = code.n_aux();
    let phi_dim = dims.d_a * dims.d_a * dims.d_v.pow(n as u32) * dims.d_r;
    if phi_dim * (dims.d_b * dims.d_e).pow(2) > 1 << 14 {
        return Err(Error::Capacity(format!("composite dimension for {dims:?} and {n} variables")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = DeltaCheck { samples, min: f64::INFINITY, argmin: 0 };
    for i in 0..samples {
        let u1 = random_isometry(dims.d_a, dims.d_b, dims.d_e, &mut rng)?;
        let u2 = random_isometry(dims.d_a, dims.d_b, dims.d_e, &mut rng)?;
        let phi = gaussian_vector(phi_dim, &mut rng);
        let state = composite_state(&phi, &u1, &u2, n, dims.d_v, dims.d_r)?;
        let v = evaluate_prefix(&delta, &state)?;
        if v < out.min {
            out.min = v;
            out.argmin = i;
        }
    }
    if samples == 0 {
        out.min = 0.0;
    }
    Ok(out)
}

/// Same minimum over random classical distributions on the composite
/// context with the given alphabet size.
pub fn classical_delta_check(alpha: &F, code: &DecouplingCode, samples: usize, alphabet: u32, seed: u64) -> Result<DeltaCheck> {
    let delta = delta_functional(alpha, code)?;
    let ctx = composite_context(code.n_aux())?;
    let vars: Vec<Variable> = ctx.names().iter().map(|s| Variable::new(s.clone(), alphabet)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = DeltaCheck { samples, min: if samples == 0 { 0.0 } else { f64::INFINITY }, argmin: 0 };
    for i in 0..samples {
        let sparsity = [0.1, 0.3, 1.0][i % 3];
        let p = ClassicalDistribution::random(&vars, sparsity, &mut rng)?;
        let v = delta.evaluate(&p.entropy_vector()?)?;
        if v < out.min {
            out.min = v;
            out.argmin = i;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decouplings::alpha_context;
    use crate::entropic::formula;

    fn alpha(s: &str) -> F {
        formula::parse(&alpha_context(1).unwrap(), s).unwrap()
    }

    #[test]
    fn sampled_states_are_valid() {
        let rho = sample_state(&[2], 3).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        assert_ne!(sample_state(&[2, 3], 1).unwrap(), sample_state(&[2, 3], 2).unwrap());
        assert_eq!(sample_state(&[2, 3], 1).unwrap(), sample_state(&[2, 3], 1).unwrap());
        assert!(sample_state(&[8, 9], 0).is_err());
    }

    #[test]
    fn purified_marginals_match() {
        let psi = sample_purified_state(&[2, 2], 5).unwrap();
        let h12 = psi.entropy(3).unwrap();
        let hr = psi.entropy(4).unwrap();
        assert!((h12 - hr).abs() < 1e-9);
    }

    #[test]
    fn cone_ray_passes_and_outside_fails() {
        let code = DecouplingCode::single(3, 3).unwrap();
        let inside = numeric_delta_check(&alpha("-H(B|V)"), &code, 50, &DeltaDims::default(), 0).unwrap();
        assert!(inside.min >= -1e-8, "{inside:?}");
        let outside = classical_delta_check(&alpha("H(B|V)"), &code, 50, 2, 0).unwrap();
        assert!(outside.min < -1e-3, "{outside:?}");
    }

    #[test]
    fn zero_functional_is_zero() {
        let code = DecouplingCode::single(1, 2).unwrap();
        let r = numeric_delta_check(&F::zero(&alpha_context(1).unwrap()), &code, 5, &DeltaDims::default(), 1).unwrap();
        assert_eq!(r.min, 0.0);
    }
}
