//! Channels as isometries `U: A → B ⊗ E`; row index `b * d_E + e`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::entropic::C64;
use crate::error::{Error, Result};

const ISOMETRY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct IsometryChannel {
    d_in: usize,
    d_b: usize,
    d_e: usize,
    u: DMatrix<C64>,
}

impl IsometryChannel {
    pub fn new(d_in: usize, d_b: usize, d_e: usize, u: DMatrix<C64>) -> Result<Self> {
        if d_in == 0 || d_b == 0 || d_e == 0 {
            return Err(Error::Validation("channel dimensions must be positive".into()));
        }
        if u.nrows() != d_b * d_e || u.ncols() != d_in {
            return Err(Error::Domain(format!(
                "{}x{} matrix for A={d_in}, B={d_b}, E={d_e}",
                u.nrows(),
                u.ncols()
            )));
        }
        let err = (u.adjoint() * &u - DMatrix::<C64>::identity(d_in, d_in)).norm();
        if err > ISOMETRY_TOL {
            return Err(Error::Validation(format!("U†U deviates from the identity by {err:.3e}")));
        }
        Ok(IsometryChannel { d_in, d_b, d_e, u })
    }

    /// Stinespring dilation of Kraus operators `K_k: A → B`; `E` indexes `k`.
    pub fn from_kraus(kraus: &[DMatrix<C64>]) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::Validation("empty Kraus list".into()))?;
        let (d_b, d_in) = first.shape();
        if kraus.iter().any(|k| k.shape() != (d_b, d_in)) {
            return Err(Error::Domain("Kraus operators differ in shape".into()));
        }
        let d_e = kraus.len();
        let u = DMatrix::from_fn(d_b * d_e, d_in, |r, a| kraus[r % d_e][(r / d_e, a)]);
        Self::new(d_in, d_b, d_e, u)
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(d, d, 1, DMatrix::identity(d, d))
    }

    /// Everything goes to the environment.
    pub fn swap_to_env(d: usize) -> Result<Self> {
        Self::new(d, 1, d, DMatrix::identity(d, d))
    }

    /// `|x⟩ → |x⟩_B |x⟩_E`.
    pub fn dephasing_copy(d: usize) -> Result<Self> {
        let u = DMatrix::from_fn(d * d, d, |r, a| if r == a * d + a { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        Self::new(d, d, d, u)
    }

    /// `|ψ⟩ → √(1-p) |ψ⟩_B |e⟩_E + √p |e⟩_B |ψ⟩_E` with flag `e = d`.
    pub fn erasure(d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("erasure probability {p}")));
        }
        let n = d + 1;
        let mut u = DMatrix::zeros(n * n, d);
        for a in 0..d {
            u[(a * n + d, a)] = C64::new((1.0 - p).sqrt(), 0.0);
            u[(d * n + a, a)] = C64::new(p.sqrt(), 0.0);
        }
        Self::new(d, n, n, u)
    }

    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Domain(format!("damping parameter {gamma}")));
        }
        let c = |x: f64| C64::new(x, 0.0);
        let k0 = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c((1.0 - gamma).sqrt())]);
        let k1 = DMatrix::from_row_slice(2, 2, &[c(0.0), c(gamma.sqrt()), c(0.0), c(0.0)]);
        Self::from_kraus(&[k0, k1])
    }

    /// `U_N ⊗ U_M` with `A = A1A2`, `B = B1B2`, `E = E1E2`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let (d_b, d_e) = (self.d_b * other.d_b, self.d_e * other.d_e);
        let mut u = DMatrix::zeros(d_b * d_e, self.d_in * other.d_in);
        for (b1, e1, b2, e2) in quads(self.d_b, self.d_e, other.d_b, other.d_e) {
            let row = (b1 * other.d_b + b2) * d_e + e1 * other.d_e + e2;
            for a1 in 0..self.d_in {
                for a2 in 0..other.d_in {
                    u[(row, a1 * other.d_in + a2)] = self.u[(b1 * self.d_e + e1, a1)] * other.u[(b2 * other.d_e + e2, a2)];
                }
            }
        }
        Self::new(self.d_in * other.d_in, d_b, d_e, u)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn d_e(&self) -> usize {
        self.d_e
    }

    pub fn isometry(&self) -> &DMatrix<C64> {
        &self.u
    }

    /// The same channel with `B` and `E` exchanged.
    pub fn complementary(&self) -> Self {
        let u = DMatrix::from_fn(self.d_b * self.d_e, self.d_in, |r, a| {
            let (e, b) = (r / self.d_b, r % self.d_b);
            self.u[(b * self.d_e + e, a)]
        });
        IsometryChannel { d_in: self.d_in, d_b: self.d_e, d_e: self.d_b, u }
    }
}

fn quads(a: usize, b: usize, c: usize, d: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..a).flat_map(move |i| (0..b).flat_map(move |j| (0..c).flat_map(move |k| (0..d).map(move |l| (i, j, k, l)))))
}

/// Replaces system `k` of a state vector with `dims` by the two systems
/// `B, E` of `u`, in that order and at the same position.
pub(crate) fn apply_isometry(amps: &[C64], dims: &[usize], k: usize, ch: &IsometryChannel) -> (Vec<C64>, Vec<usize>) {
    debug_assert_eq!(dims[k], ch.d_in);
    let pre: usize = dims[..k].iter().product();
    let post: usize = dims[k + 1..].iter().product();
    let rows = ch.d_b * ch.d_e;
    let mut out = vec![C64::new(0.0, 0.0); pre * rows * post];
    for p in 0..pre {
        for a in 0..ch.d_in {
            let src = &amps[(p * ch.d_in + a) * post..][..post];
            for r in 0..rows {
                let c = ch.u[(r, a)];
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                let dst = &mut out[(p * rows + r) * post..][..post];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += c * s;
                }
            }
        }
    }
    let mut new_dims = dims[..k].to_vec();
    new_dims.extend([ch.d_b, ch.d_e]);
    new_dims.extend_from_slice(&dims[k + 1..]);
    (out, new_dims)
}

#[derive(Serialize, Deserialize)]
struct ComplexMatrixJson {
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ChannelJson {
    Isometry {
        d_in: usize,
        #[serde(rename = "d_B")]
        d_b: usize,
        #[serde(rename = "d_E")]
        d_e: usize,
        isometry_re: Vec<Vec<f64>>,
        #[serde(default)]
        isometry_im: Option<Vec<Vec<f64>>>,
    },
    Kraus {
        kraus: Vec<ComplexMatrixJson>,
    },
}

fn complex_matrix(re: &[Vec<f64>], im: Option<&Vec<Vec<f64>>>) -> Result<DMatrix<C64>> {
    let rows = re.len();
    let cols = re.first().map_or(0, Vec::len);
    if re.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged real part".into()));
    }
    if let Some(im) = im {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("imaginary part does not match the real part".into()));
        }
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| C64::new(re[i][j], im.map_or(0.0, |m| m[i][j]))))
}

impl Serialize for IsometryChannel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..self.u.nrows()).map(|i| (0..self.u.ncols()).map(|j| f(&self.u[(i, j)])).collect()).collect()
        };
        ChannelJson::Isometry {
            d_in: self.d_in,
            d_b: self.d_b,
            d_e: self.d_e,
            isometry_re: rows(|c| c.re),
            isometry_im: Some(rows(|c| c.im)),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IsometryChannel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let built = match ChannelJson::deserialize(deserializer)? {
            ChannelJson::Isometry { d_in, d_b, d_e, isometry_re, isometry_im } => {
                complex_matrix(&isometry_re, isometry_im.as_ref()).and_then(|u| IsometryChannel::new(d_in, d_b, d_e, u))
            }
            ChannelJson::Kraus { kraus } => kraus
                .iter()
                .map(|k| complex_matrix(&k.re, k.im.as_ref()))
                .collect::<Result<Vec<_>>>()
                .and_then(|ks| IsometryChannel::from_kraus(&ks)),
        };
        built.map_err(D::Error::custom)
    }
}
