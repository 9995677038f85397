//! Channel-level predicates checked by sampling and optimization.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::channel::{apply_isometry, IsometryChannel};
use super::optimize::{ascend, input_dims, maximize_with_starts, OptimizerConfig};
use super::sample::gaussian_vector;
use crate::entropic::eigen::hermitian_eigenvalues;
use crate::entropic::{DensityMatrix, LinearEntropyFunctional as F, PureState, SystemContext, C64};
use crate::error::{Error, Result};

const VIOLATION_TOL: f64 = 1e-6;
const CQ_ENTROPY_TOL: f64 = 1e-7;
const CQ_DISTANCE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegradabilityVerdict {
    Violated,
    NoViolationFound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegradabilityCheck {
    pub verdict: DegradabilityVerdict,
    /// Smallest `I(V;B) - I(V;E)` found.
    pub worst_margin: f64,
    /// Input `φ_{AV}` attaining it.
    #[serde(skip)]
    pub witness: Option<PureState>,
}

fn margin(channel: &IsometryChannel, phi: &[C64]) -> f64 {
    let d = channel.d_in();
    let (amps, dims) = apply_isometry(phi, &[d, d], 0, channel);
    let ctx = SystemContext::new(["B", "E", "V"]).expect("valid names");
    let s = PureState::normalized(ctx, dims, amps.into()).expect("nonzero");
    let h = |m| s.entropy(m).expect("valid mask");
    // I(V;B) - I(V;E) = H(B) - H(VB) - H(E) + H(VE)
    h(1) - h(5) - h(2) + h(6)
}

/// Minimizes `I(V;B) - I(V;E)` over pure inputs `φ_{AV}` with `|V| = d_A`:
/// `samples` random inputs, then ascent from the best of them and from
/// `cfg.restarts` fresh starts.
pub fn informational_degradability_check(channel: &IsometryChannel, samples: usize, cfg: &OptimizerConfig) -> Result<DegradabilityCheck> {
    cfg.validate()?;
    let d = channel.d_in();
    if d > 8 || channel.d_b() * channel.d_e() > 64 {
        return Err(Error::Capacity("degradability checks take d_A ≤ 8 and d_B d_E ≤ 64".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut warm: Option<(f64, Vec<C64>)> = None;
    for _ in 0..samples {
        let phi = gaussian_vector(d * d, &mut rng);
        let m = margin(channel, &phi);
        if warm.as_ref().is_none_or(|(w, _)| m < *w) {
            warm = Some((m, phi));
        }
    }
    let warm: Vec<Vec<C64>> = warm.into_iter().map(|(_, p)| p).collect();
    let best = ascend(d * d, &warm, &|v| -margin(channel, v), cfg);
    let worst_margin = -best.value;
    let ctx = SystemContext::new(["A", "V"])?;
    Ok(DegradabilityCheck {
        verdict: if worst_margin < -VIOLATION_TOL { DegradabilityVerdict::Violated } else { DegradabilityVerdict::NoViolationFound },
        worst_margin,
        witness: Some(PureState::new(ctx, vec![d, d], best.point.into())?),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub first: f64,
    pub second: f64,
    pub joint: f64,
    /// `joint - first - second`.
    pub gap: f64,
    /// At the joint optimum, `[H(B1)-H(E1)] - [H(B1B2)-H(E1B2)]` and
    /// `[H(B2)-H(E2)] - [H(E1B2)-H(E1E2)]`.
    pub telescoping_slack: [f64; 2],
}

/// Reorders the systems of a state vector: position `i` of the result is
/// system `order[i]` of the input.
fn permute(amps: &[C64], dims: &[usize], order: &[usize]) -> Vec<C64> {
    let new_dims: Vec<usize> = order.iter().map(|&i| dims[i]).collect();
    let mut strides = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    let mut digits = vec![0; dims.len()];
    for o in out.iter_mut() {
        let src: usize = digits.iter().zip(order).map(|(&x, &i)| x * strides[i]).sum();
        *o = amps[src];
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < new_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    out
}

/// Estimates `f_α(N ⊗ M) - f_α(N) - f_α(M)`. The joint maximization uses
/// auxiliary dimensions `aux_n[i] · aux_m[i]` and is also started from the
/// product of the two single-channel optima.
pub fn additivity_spot_check(
    n: &IsometryChannel,
    m: &IsometryChannel,
    alpha: &F,
    aux_dims: &[usize],
    cfg: &OptimizerConfig,
) -> Result<SpotCheck> {
    if n.d_in() * m.d_in() > 36 {
        return Err(Error::Capacity(format!("joint input dimension {}", n.d_in() * m.d_in())));
    }
    if cfg.purifier_dim.is_some() {
        return Err(Error::Unsupported("spot checks use the default reference dimension".into()));
    }
    let single_n = maximize_with_starts(alpha, n, aux_dims, cfg, &[])?;
    let single_m = maximize_with_starts(alpha, m, aux_dims, cfg, &[])?;
    let joint_ch = n.tensor(m)?;
    let joint_aux: Vec<usize> = aux_dims.iter().map(|d| d * d).collect();
    let joint_dims = input_dims(&joint_ch, &joint_aux, cfg)?;

    let (pn, pm) = (single_n.input.as_ref().expect("argmax"), single_m.input.as_ref().expect("argmax"));
    let k = aux_dims.len();
    let amps: Vec<C64> = pn.amplitudes().iter().flat_map(|a| pm.amplitudes().iter().map(move |b| a * b)).collect();
    let mut dims = pn.dims().to_vec();
    dims.extend_from_slice(pm.dims());
    // [A1, V1.., R1, A2, V2.., R2] -> [A1, A2, (V1_i, V2_i).., R1, R2]
    let mut order = vec![0, k + 2];
    for i in 0..k {
        order.extend([1 + i, k + 3 + i]);
    }
    order.extend([k + 1, 2 * k + 3]);
    let product = permute(&amps, &dims, &order);
    debug_assert_eq!(product.len(), joint_dims.iter().product::<usize>());

    let joint = maximize_with_starts(alpha, &joint_ch, &joint_aux, cfg, &[product])?;
    let input = joint.input.as_ref().expect("argmax");
    let (out, _) = apply_isometry(input.amplitudes().as_slice(), &joint_dims, 0, &joint_ch);
    let mut split = vec![n.d_b(), m.d_b(), n.d_e(), m.d_e()];
    split.push(out.len() / split.iter().product::<usize>());
    let s = PureState::normalized(SystemContext::generic(5)?, split, out.into())?;
    let h = |mask| s.entropy(mask).expect("valid mask");
    let (b1, b2, e1, e2) = (1, 2, 4, 8);
    let telescoping_slack = [
        (h(b1) - h(e1)) - (h(b1 | b2) - h(e1 | b2)),
        (h(b2) - h(e2)) - (h(e1 | b2) - h(e1 | e2)),
    ];
    Ok(SpotCheck {
        first: single_n.value,
        second: single_m.value,
        joint: joint.value,
        gap: joint.value - single_n.value - single_m.value,
        telescoping_slack,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CqCondition {
    pub expression: String,
    pub value: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CqReport {
    pub conditions: Vec<CqCondition>,
    pub conditions_hold: bool,
    /// Trace distance between `ρ_{R1A}` and its dephasing on `R1`; only
    /// computed when every condition holds.
    pub dephasing_distance: Option<f64>,
    pub classical_quantum: Option<bool>,
}

fn trace_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    0.5 * hermitian_eigenvalues(&(a - b)).iter().map(|x| x.abs()).sum::<f64>()
}

/// Entropic conditions `H(R_i|R_j) = 0`, `H(R_i|R_jR_k) = 0` on a state
/// over `[R1, R2, R3, A]`, then a dephasing test of `ρ_{R1A}`.
pub fn cq_criterion_check(rho: &DensityMatrix) -> Result<CqReport> {
    if rho.dims().len() != 4 {
        return Err(Error::Domain("state must live on R1 R2 R3 A".into()));
    }
    if rho.dims().iter().product::<usize>() > 16 {
        return Err(Error::Capacity("c-q checks take total dimension ≤ 16".into()));
    }
    let h = |m| rho.von_neumann_entropy(m);
    let names = ["R1", "R2", "R3"];
    let mut conditions = vec![];
    for i in 0..3 {
        for j in (0..3).filter(|&j| j != i) {
            let v = h((1 << i) | (1 << j))? - h(1 << j)?;
            conditions.push(CqCondition { expression: format!("H({}|{})", names[i], names[j]), value: v, holds: v.abs() <= CQ_ENTROPY_TOL });
        }
        let (j, k) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let v = h(7)? - h((1 << j) | (1 << k))?;
        conditions.push(CqCondition {
            expression: format!("H({}|{}{})", names[i], names[j], names[k]),
            value: v,
            holds: v.abs() <= CQ_ENTROPY_TOL,
        });
    }
    let conditions_hold = conditions.iter().all(|c| c.holds);
    let mut report = CqReport { conditions, conditions_hold, dephasing_distance: None, classical_quantum: None };
    if !conditions_hold {
        return Ok(report);
    }

    // Eigenbasis of R1 refined by a generic observable on the rest, so that
    // degenerate marginals still pick out the classical basis.
    let d1 = rho.dims()[0];
    let rest = rho.matrix().nrows() / d1;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let g = DMatrix::from_vec(rest, rest, gaussian_vector(rest * rest, &mut rng));
    let y = &g + g.adjoint();
    let full = rho.matrix();
    let mut k = DMatrix::<C64>::zeros(d1, d1);
    for i in 0..d1 {
        for j in 0..d1 {
            for a in 0..rest {
                for b in 0..rest {
                    k[(i, j)] += full[(i * rest + a, j * rest + b)] * y[(b, a)];
                }
            }
        }
    }
    let k = &k + rho.partial_trace(1)?.matrix() * C64::new(1e-3, 0.0);
    let k = (&k + k.adjoint()) * C64::new(0.5, 0.0);
    let (_, basis) = crate::entropic::eigen::hermitian_eigen(&k);
    let r1a = rho.partial_trace(0b1001)?;
    let da = rho.dims()[3];
    let w = basis.adjoint().kronecker(&DMatrix::<C64>::identity(da, da));
    let sigma = &w * r1a.matrix() * w.adjoint();
    let dephased = DMatrix::from_fn(d1 * da, d1 * da, |r, c| if r / da == c / da { sigma[(r, c)] } else { C64::new(0.0, 0.0) });
    let dist = trace_distance(&sigma, &dephased);
    report.dephasing_distance = Some(dist);
    report.classical_quantum = Some(dist <= CQ_DISTANCE_TOL);
    Ok(report)
}
