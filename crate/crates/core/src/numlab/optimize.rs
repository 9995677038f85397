//! Multi-restart projected ascent over normalized state vectors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel::{apply_isometry, IsometryChannel};
use super::sample::{evaluate_prefix, gaussian_vector, normalize};
use crate::decouplings::alpha_context;
use crate::entropic::{LinearEntropyFunctional as F, PureState, SystemContext, C64};
use crate::error::{Error, Result};

const FD_STEP: f64 = 1e-4;
pub const MAX_AUX_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Gradient evaluations per restart.
    pub iterations: usize,
    /// Angle of the first step on the unit sphere; doubled after an
    /// accepted step, halved after a rejected one.
    pub initial_step: f64,
    pub min_step: f64,
    pub seed: u64,
    /// Stop once the projected gradient norm falls below this.
    pub tolerance: f64,
    /// Dimension of the traced-out reference; default `d_A · ∏ aux`.
    #[serde(default)]
    pub purifier_dim: Option<usize>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { restarts: 6, iterations: 300, initial_step: 0.3, min_step: 1e-7, seed: 0, tolerance: 1e-9, purifier_dim: None }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.restarts > 0
            && self.iterations > 0
            && self.initial_step > 0.0
            && self.min_step > 0.0
            && self.min_step <= self.initial_step
            && self.tolerance > 0.0
            && self.purifier_dim != Some(0);
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!("optimizer settings must be positive: {self:?}")))
        }
    }

    fn restart_seed(&self, r: usize) -> u64 {
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(r as u64)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Ascent {
    pub value: f64,
    pub point: Vec<C64>,
    pub converged: bool,
    pub evaluations: usize,
}

fn as_real(v: &[C64]) -> Vec<f64> {
    v.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn as_complex(x: &[f64]) -> Vec<C64> {
    let mut v: Vec<C64> = x.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
    normalize(&mut v);
    v
}

fn ascend_one(start: Vec<C64>, objective: &(dyn Fn(&[C64]) -> f64 + Sync), cfg: &OptimizerConfig) -> Ascent {
    let mut x = as_real(&start);
    let norm = x.iter().map(|t| t * t).sum::<f64>().sqrt();
    x.iter_mut().for_each(|t| *t /= norm);
    let f = |x: &[f64]| objective(&as_complex(x));
    let mut value = f(&x);
    let mut evaluations = 1;
    let mut step = cfg.initial_step;
    let mut converged = false;
    'outer: for _ in 0..cfg.iterations {
        let mut g = vec![0.0; x.len()];
        let mut probe = x.clone();
        for j in 0..x.len() {
            probe[j] = x[j] + FD_STEP;
            let up = f(&probe);
            probe[j] = x[j] - FD_STEP;
            let down = f(&probe);
            probe[j] = x[j];
            g[j] = (up - down) / (2.0 * FD_STEP);
        }
        evaluations += 2 * x.len();
        let radial: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
        g.iter_mut().zip(&x).for_each(|(a, b)| *a -= radial * b);
        let gn = g.iter().map(|t| t * t).sum::<f64>().sqrt();
        if gn < cfg.tolerance {
            converged = true;
            break;
        }
        loop {
            let mut y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + step * b / gn).collect();
            let n = y.iter().map(|t| t * t).sum::<f64>().sqrt();
            y.iter_mut().for_each(|t| *t /= n);
            let fy = f(&y);
            evaluations += 1;
            if fy > value {
                x = y;
                value = fy;
                step = (step * 2.0).min(1.0);
                break;
            }
            step /= 2.0;
            if step < cfg.min_step {
                converged = true;
                break 'outer;
            }
        }
    }
    let point = as_complex(&x);
    Ascent { value: objective(&point), point, converged, evaluations }
}

/// Maximizes `objective` over unit vectors of length `n` from
/// `cfg.restarts` random starts plus `warm` starts; restarts run in parallel
/// and the best one (lowest index on ties) wins.
pub(crate) fn ascend(n: usize, warm: &[Vec<C64>], objective: &(dyn Fn(&[C64]) -> f64 + Sync), cfg: &OptimizerConfig) -> Ascent {
    let starts: Vec<Vec<C64>> = warm
        .iter()
        .cloned()
        .chain((0..cfg.restarts).map(|r| gaussian_vector(n, &mut ChaCha8Rng::seed_from_u64(cfg.restart_seed(r)))))
        .collect();
    let runs: Vec<Ascent> = starts.into_par_iter().map(|s| ascend_one(s, objective, cfg)).collect();
    let evaluations = runs.iter().map(|a| a.evaluations).sum();
    let mut best = runs.into_iter().reduce(|a, b| if b.value > a.value { b } else { a }).expect("at least one restart");
    best.evaluations = evaluations;
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Maximization {
    /// Lower bound on the maximum.
    pub value: f64,
    /// Input state on `[A, V.., R]`.
    #[serde(skip)]
    pub input: Option<PureState>,
    pub input_dims: Vec<usize>,
    pub converged: bool,
    pub evaluations: usize,
}

pub(crate) fn input_context(n_aux: usize) -> Result<SystemContext> {
    let mut names = vec!["A".to_string()];
    names.extend(alpha_context(n_aux)?.names()[2..].iter().cloned());
    names.push("R".into());
    SystemContext::new(names)
}

pub(crate) fn input_dims(channel: &IsometryChannel, aux_dims: &[usize], cfg: &OptimizerConfig) -> Result<Vec<usize>> {
    let aux: usize = aux_dims.iter().product();
    if aux_dims.contains(&0) || aux > MAX_AUX_DIM {
        return Err(Error::Capacity(format!("auxiliary dimensions {aux_dims:?} exceed a total of {MAX_AUX_DIM}")));
    }
    let mut dims = vec![channel.d_in()];
    dims.extend_from_slice(aux_dims);
    dims.push(cfg.purifier_dim.unwrap_or(channel.d_in() * aux));
    let out = dims.iter().product::<usize>() / channel.d_in() * channel.d_b() * channel.d_e();
    if out > 1 << 12 {
        return Err(Error::Capacity(format!("output dimension {out}")));
    }
    Ok(dims)
}

/// `U φ` on `[B, E, V.., R]`.
pub fn channel_output(channel: &IsometryChannel, input: &PureState) -> Result<PureState> {
    if input.dims().first() != Some(&channel.d_in()) {
        return Err(Error::Domain(format!("input dims {:?} do not start with A = {}", input.dims(), channel.d_in())));
    }
    let (amps, dims) = apply_isometry(input.amplitudes().as_slice(), input.dims(), 0, channel);
    let mut names = vec!["B".to_string(), "E".to_string()];
    names.extend(input.context().names()[1..].iter().cloned());
    PureState::normalized(SystemContext::new(names)?, dims, amps.into())
}

/// `f_α(U, φ)` for an input on `[A, V.., R]`.
pub fn formula_value(alpha: &F, channel: &IsometryChannel, input: &PureState) -> Result<f64> {
    let n_aux = input.dims().len().saturating_sub(2);
    if alpha.context() != &alpha_context(n_aux)? {
        return Err(Error::Domain(format!("α over {:?} for {n_aux} auxiliary systems", alpha.context().names())));
    }
    evaluate_prefix(alpha, &channel_output(channel, input)?)
}

/// Lower bound on `max_φ f_α(U_N, φ)` over states `φ_{V.. A}`, realized as
/// marginals of pure states with a reference `R`.
pub fn maximize_formula(alpha: &F, channel: &IsometryChannel, aux_dims: &[usize], cfg: &OptimizerConfig) -> Result<Maximization> {
    maximize_with_starts(alpha, channel, aux_dims, cfg, &[])
}

pub(crate) fn maximize_with_starts(
    alpha: &F,
    channel: &IsometryChannel,
    aux_dims: &[usize],
    cfg: &OptimizerConfig,
    warm: &[Vec<C64>],
) -> Result<Maximization> {
    cfg.validate()?;
    if alpha.context() != &alpha_context(aux_dims.len())? {
        return Err(Error::Domain(format!("α over {:?} with {} auxiliary dimensions", alpha.context().names(), aux_dims.len())));
    }
    let dims = input_dims(channel, aux_dims, cfg)?;
    let ctx = input_context(aux_dims.len())?;
    let n: usize = dims.iter().product();
    let objective = |v: &[C64]| {
        let (amps, out_dims) = apply_isometry(v, &dims, 0, channel);
        let mut names = alpha.context().names().to_vec();
        names.push("R".into());
        let state = PureState::normalized(SystemContext::new(names).expect("valid names"), out_dims, amps.into()).expect("nonzero");
        evaluate_prefix(alpha, &state).expect("prefix context")
    };
    let best = ascend(n, warm, &objective, cfg);
    let input = PureState::new(ctx, dims.clone(), best.point.into())?;
    Ok(Maximization { value: best.value, input: Some(input), input_dims: dims, converged: best.converged, evaluations: best.evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropic::formula;

    fn quick() -> OptimizerConfig {
        OptimizerConfig { restarts: 3, iterations: 150, ..Default::default() }
    }

    #[test]
    fn coherent_information_of_identity() {
        let alpha = formula::parse(&alpha_context(0).unwrap(), "H(B) - H(E)").unwrap();
        let ch = IsometryChannel::identity(2).unwrap();
        let m = maximize_formula(&alpha, &ch, &[], &quick()).unwrap();
        assert!((m.value - 1.0).abs() < 1e-4, "{m:?}");
        let again = formula_value(&alpha, &ch, m.input.as_ref().unwrap()).unwrap();
        assert!((again - m.value).abs() < 1e-9);
    }

    #[test]
    fn erasure_at_one_half_has_zero_coherent_information() {
        let alpha = formula::parse(&alpha_context(0).unwrap(), "H(B) - H(E)").unwrap();
        let ch = IsometryChannel::erasure(2, 0.5).unwrap();
        let m = maximize_formula(&alpha, &ch, &[], &quick()).unwrap();
        assert!(m.value.abs() < 1e-4, "{m:?}");
    }

    #[test]
    fn completely_coherent_information_of_identity() {
        let alpha = formula::parse(&alpha_context(1).unwrap(), "H(BV) - H(EV)").unwrap();
        let ch = IsometryChannel::identity(2).unwrap();
        let m = maximize_formula(&alpha, &ch, &[4], &quick()).unwrap();
        assert!((m.value - 1.0).abs() < 1e-4, "{m:?}");
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig { restarts: 0, ..Default::default() }.validate().is_err());
        assert!(OptimizerConfig::default().validate().is_ok());
    }

    #[test]
    fn context_mismatch_rejected() {
        let alpha = formula::parse(&alpha_context(1).unwrap(), "H(BV) - H(EV)").unwrap();
        let ch = IsometryChannel::identity(2).unwrap();
        assert!(maximize_formula(&alpha, &ch, &[], &quick()).is_err());
        assert!(maximize_formula(&alpha, &ch, &[16], &quick()).is_err());
    }
}
