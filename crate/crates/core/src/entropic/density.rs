use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::classical::{entropy_bits, ClassicalDistribution};
use super::context::{SubsetMask, SystemContext};
use super::eigen::hermitian_eigenvalues;
use super::functional::EntropyVector;
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

const STATE_TOL: f64 = 1e-10;
const EIG_ZERO: f64 = 1e-12;
/// Largest total dimension for a dense density matrix.
pub const MAX_DENSITY_DIM: usize = 1024;
/// Largest total dimension for a state vector.
pub const MAX_PURE_DIM: usize = 1 << 16;

/// Entropy in bits of a Hermitian PSD matrix, ignoring eigenvalues below 1e-12.
pub fn spectral_entropy(rho: &DMatrix<C64>) -> f64 {
    let w: Vec<f64> = hermitian_eigenvalues(rho).into_iter().filter(|&x| x > EIG_ZERO).collect();
    entropy_bits(&w)
}

/// Splits tensor indices into kept and traced parts. System 0 is the most
/// significant factor of the Kronecker ordering.
struct Split {
    keep_dim: usize,
    rest_dim: usize,
    /// For each full index: (kept index, traced index).
    parts: Vec<(usize, usize)>,
}

impl Split {
    fn new(dims: &[usize], mask: SubsetMask) -> Self {
        let total: usize = dims.iter().product();
        let keep_dim: usize = dims.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, d)| d).product();
        let mut parts = Vec::with_capacity(total);
        let mut digits = vec![0usize; dims.len()];
        for _ in 0..total {
            let (mut k, mut t) = (0, 0);
            for (i, (&d, &x)) in dims.iter().zip(&digits).enumerate() {
                if mask & (1 << i) != 0 {
                    k = k * d + x;
                } else {
                    t = t * d + x;
                }
            }
            parts.push((k, t));
            for i in (0..dims.len()).rev() {
                digits[i] += 1;
                if digits[i] < dims[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
        Split { keep_dim, rest_dim: total / keep_dim.max(1), parts }
    }
}

fn check_dims(dims: &[usize], cap: usize) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Validation(format!("invalid dims {dims:?}")));
    }
    let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).unwrap_or(usize::MAX);
    if total > cap {
        return Err(Error::Capacity(format!("total dimension {total} exceeds {cap}")));
    }
    Ok(total)
}

/// Mixed state on named systems with local dimensions `dims`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    context: SystemContext,
    dims: Vec<usize>,
    data: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to 1e-10.
    pub fn new(context: SystemContext, dims: Vec<usize>, data: DMatrix<C64>) -> Result<Self> {
        let total = check_dims(&dims, MAX_DENSITY_DIM)?;
        if context.arity() != dims.len() {
            return Err(Error::Domain("one dimension per system required".into()));
        }
        if data.nrows() != total || data.ncols() != total {
            return Err(Error::Domain(format!(
                "{}x{} matrix for total dimension {total}",
                data.nrows(),
                data.ncols()
            )));
        }
        if (&data - data.adjoint()).norm() > STATE_TOL {
            return Err(Error::Validation("matrix is not Hermitian".into()));
        }
        if (data.trace() - C64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::Validation(format!("trace {} is not 1", data.trace())));
        }
        let min = hermitian_eigenvalues(&data).first().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::Validation(format!("negative eigenvalue {min}")));
        }
        Ok(DensityMatrix { context, dims, data })
    }

    /// Systems labelled `X1..Xn`.
    pub fn unnamed(dims: Vec<usize>, data: DMatrix<C64>) -> Result<Self> {
        let ctx = SystemContext::generic(dims.len())?;
        Self::new(ctx, dims, data)
    }

    pub fn context(&self) -> &SystemContext {
        &self.context
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    fn reduced_matrix(&self, mask: SubsetMask) -> DMatrix<C64> {
        let split = Split::new(&self.dims, mask);
        let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); split.rest_dim];
        for (x, &(k, t)) in split.parts.iter().enumerate() {
            groups[t].push((x, k));
        }
        let mut out = DMatrix::zeros(split.keep_dim, split.keep_dim);
        for g in &groups {
            for &(x1, k1) in g {
                for &(x2, k2) in g {
                    out[(k1, k2)] += self.data[(x1, x2)];
                }
            }
        }
        out
    }

    /// Reduced state on `mask`, systems in context order.
    pub fn partial_trace(&self, mask: SubsetMask) -> Result<DensityMatrix> {
        self.context.check_nonempty(mask)?;
        let idx: Vec<usize> = (0..self.dims.len()).filter(|i| mask & (1 << i) != 0).collect();
        let ctx = SystemContext::new(idx.iter().map(|&i| self.context.names()[i].clone()))?;
        let dims = idx.iter().map(|&i| self.dims[i]).collect();
        Ok(DensityMatrix { context: ctx, dims, data: self.reduced_matrix(mask) })
    }

    pub fn von_neumann_entropy(&self, mask: SubsetMask) -> Result<f64> {
        self.context.check_nonempty(mask)?;
        Ok(spectral_entropy(&self.reduced_matrix(mask)))
    }

    pub fn entropy_vector(&self) -> Result<EntropyVector> {
        let mut values = vec![0.0; self.context.subset_count() + 1];
        for (m, v) in values.iter_mut().enumerate().skip(1) {
            *v = spectral_entropy(&self.reduced_matrix(m as SubsetMask));
        }
        EntropyVector::new(self.context.clone(), values)
    }

    pub fn from_pure(state: &PureState) -> Result<Self> {
        check_dims(&state.dims, MAX_DENSITY_DIM)?;
        let data = &state.amps * state.amps.adjoint();
        Ok(DensityMatrix { context: state.context.clone(), dims: state.dims.clone(), data })
    }
}

/// Diagonal embedding of a classical distribution; local dimensions are the
/// alphabet sizes.
pub fn embed_classical(dist: &ClassicalDistribution) -> Result<DensityMatrix> {
    let dims: Vec<usize> = dist.alphabets().iter().map(|&a| a as usize).collect();
    let total = check_dims(&dims, MAX_DENSITY_DIM)?;
    let mut data = DMatrix::zeros(total, total);
    for (o, p) in dist.atoms() {
        let i = o.iter().zip(&dims).fold(0, |acc, (&x, &d)| acc * d + x as usize);
        data[(i, i)] += C64::new(p, 0.0);
    }
    Ok(DensityMatrix { context: dist.context().clone(), dims, data })
}

/// Normalized state vector on named systems.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    context: SystemContext,
    dims: Vec<usize>,
    amps: DVector<C64>,
}

impl PureState {
    pub fn new(context: SystemContext, dims: Vec<usize>, amps: DVector<C64>) -> Result<Self> {
        let total = check_dims(&dims, MAX_PURE_DIM)?;
        if context.arity() != dims.len() {
            return Err(Error::Domain("one dimension per system required".into()));
        }
        if amps.len() != total {
            return Err(Error::Domain(format!("{} amplitudes for dimension {total}", amps.len())));
        }
        if (amps.norm() - 1.0).abs() > STATE_TOL {
            return Err(Error::Validation(format!("state norm {} is not 1", amps.norm())));
        }
        Ok(PureState { context, dims, amps })
    }

    /// Normalizes `amps` first; fails on the zero vector.
    pub fn normalized(context: SystemContext, dims: Vec<usize>, amps: DVector<C64>) -> Result<Self> {
        let n = amps.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Validation("cannot normalize a zero vector".into()));
        }
        Self::new(context, dims, amps / C64::new(n, 0.0))
    }

    pub fn context(&self) -> &SystemContext {
        &self.context
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    /// Matrix `M[k, t] = ψ(k, t)` with kept systems as rows.
    fn reshape(&self, mask: SubsetMask) -> DMatrix<C64> {
        let split = Split::new(&self.dims, mask);
        let mut m = DMatrix::zeros(split.keep_dim, split.rest_dim);
        for (x, &(k, t)) in split.parts.iter().enumerate() {
            m[(k, t)] = self.amps[x];
        }
        m
    }

    pub fn reduced(&self, mask: SubsetMask) -> Result<DMatrix<C64>> {
        self.context.check_nonempty(mask)?;
        let m = self.reshape(mask);
        Ok(&m * m.adjoint())
    }

    /// Entropy of the marginal on `mask`, diagonalizing the smaller of the two
    /// Gram matrices.
    pub fn entropy(&self, mask: SubsetMask) -> Result<f64> {
        self.context.check_nonempty(mask)?;
        if mask == self.context.full_mask() {
            return Ok(0.0);
        }
        let m = self.reshape(mask);
        let g = if m.nrows() <= m.ncols() { &m * m.adjoint() } else { m.adjoint() * &m };
        Ok(spectral_entropy(&g))
    }

    pub fn entropy_vector(&self) -> Result<EntropyVector> {
        let mut values = vec![0.0; self.context.subset_count() + 1];
        let full = self.context.full_mask();
        for m in 1..=full {
            // H(S) = H(S^c) halves the work
            let c = full & !m;
            values[m as usize] = if c != 0 && c < m { values[c as usize] } else { self.entropy(m)? };
        }
        EntropyVector::new(self.context.clone(), values)
    }
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
    dims: Vec<usize>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let n = self.data.nrows();
        DensityJson {
            names: Some(self.context.names().to_vec()),
            dims: self.dims.clone(),
            re: (0..n).map(|i| (0..n).map(|j| self.data[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| self.data[(i, j)].im).collect()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = DensityJson::deserialize(deserializer)?;
        let n = raw.re.len();
        if raw.im.len() != n || raw.re.iter().chain(&raw.im).any(|r| r.len() != n) {
            return Err(D::Error::custom("re and im must be square matrices of equal size"));
        }
        let data = DMatrix::from_fn(n, n, |i, j| C64::new(raw.re[i][j], raw.im[i][j]));
        let ctx = match raw.names {
            Some(names) => SystemContext::new(names),
            None => SystemContext::generic(raw.dims.len()),
        }
        .map_err(D::Error::custom)?;
        DensityMatrix::new(ctx, raw.dims, data).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ctx = SystemContext::new(["A", "B"]).unwrap();
        PureState::new(ctx, vec![2, 2], DVector::from_vec(vec![c(s), c(0.), c(0.), c(s)])).unwrap()
    }

    #[test]
    fn maximally_mixed_qubit() {
        let rho = DensityMatrix::unnamed(vec![2], DMatrix::from_diagonal_element(2, 2, c(0.5))).unwrap();
        assert!((rho.von_neumann_entropy(1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_state_marginals() {
        let psi = bell();
        assert!((psi.entropy(1).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(psi.entropy(3).unwrap(), 0.0);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        assert!((rho.von_neumann_entropy(2).unwrap() - 1.0).abs() < 1e-12);
        assert!(rho.von_neumann_entropy(3).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_states() {
        let not_psd = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(matches!(DensityMatrix::unnamed(vec![2], not_psd), Err(Error::Validation(_))));
        let bad_trace = DMatrix::from_diagonal_element(2, 2, c(1.0));
        assert!(DensityMatrix::unnamed(vec![2], bad_trace).is_err());
        assert!(DensityMatrix::unnamed(vec![3], DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn partial_trace_of_product() {
        // |0><0| ⊗ I/2
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = c(0.5);
        m[(1, 1)] = c(0.5);
        let rho = DensityMatrix::unnamed(vec![2, 2], m).unwrap();
        let a = rho.partial_trace(1).unwrap();
        assert!((a.matrix()[(0, 0)] - c(1.0)).norm() < 1e-15);
        let b = rho.partial_trace(2).unwrap();
        assert!((b.matrix()[(1, 1)] - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let rho = DensityMatrix::from_pure(&bell()).unwrap();
        let s = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rho);
        let plain: DensityMatrix =
            serde_json::from_str(r#"{"dims":[2],"re":[[0.5,0],[0,0.5]],"im":[[0,0],[0,0]]}"#).unwrap();
        assert_eq!(plain.context().names(), &["X1".to_string()]);
    }
}
