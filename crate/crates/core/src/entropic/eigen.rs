//! Hermitian eigendecomposition by cyclic Jacobi on the real embedding
//! `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `H` with every
//! eigenvalue doubled.

use nalgebra::{Complex, DMatrix, DVector};

type C64 = Complex<f64>;

const MAX_SWEEPS: usize = 100;

/// Symmetric real matrix diagonalization. Returns eigenvalues and the
/// eigenvector matrix (columns), both unsorted.
fn jacobi(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return (vec![0.0; n], v);
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum::<f64>();
        if off.sqrt() <= 1e-15 * norm {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

fn embed(h: &DMatrix<C64>) -> Vec<f64> {
    let n = h.nrows();
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            // Symmetrize so tiny Hermiticity defects do not break Jacobi.
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[i * m + (j + n)] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    a
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(h: &DMatrix<C64>) -> Vec<f64> {
    let n = h.nrows();
    if n == 1 {
        return vec![h[(0, 0)].re];
    }
    let (mut w, _) = jacobi(embed(h), 2 * n);
    w.sort_by(f64::total_cmp);
    w.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Eigenvalues (ascending) and a unitary whose columns are matching eigenvectors.
pub fn hermitian_eigen(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = h.nrows();
    let m = 2 * n;
    let (w, v) = jacobi(embed(h), m);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| w[i].total_cmp(&w[j]));
    let mut values = Vec::with_capacity(n);
    let mut vectors: Vec<DVector<C64>> = Vec::with_capacity(n);
    // Each real eigenvector [x; y] gives the complex eigenvector x + iy; keep
    // the ones independent of those already chosen.
    for &k in &order {
        if vectors.len() == n {
            break;
        }
        let mut z = DVector::from_fn(n, |i, _| C64::new(v[i * m + k], v[(i + n) * m + k]));
        for u in &vectors {
            let proj = u.dotc(&z);
            z -= u * proj;
        }
        let norm = z.norm();
        if norm > 0.5 {
            vectors.push(z / C64::new(norm, 0.0));
            values.push(w[k]);
        }
    }
    let u = DMatrix::from_columns(&vectors);
    (values, u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let w = hermitian_eigenvalues(&y);
        assert!((w[0] + 1.0).abs() < 1e-12 && (w[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reconstructs_matrix() {
        let h = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(2., 0.), c(1., 1.), c(0., -0.5),
                c(1., -1.), c(3., 0.), c(0.25, 0.),
                c(0., 0.5), c(0.25, 0.), c(1., 0.),
            ],
        );
        let (w, u) = hermitian_eigen(&h);
        let d = DMatrix::from_fn(3, 3, |i, j| if i == j { c(w[i], 0.) } else { c(0., 0.) });
        let back = &u * d * u.adjoint();
        assert!((back - &h).norm() < 1e-10);
        assert!((u.adjoint() * &u - DMatrix::identity(3, 3)).norm() < 1e-10);
    }

    #[test]
    fn degenerate_spectrum() {
        let h = DMatrix::<C64>::identity(4, 4);
        let (w, u) = hermitian_eigen(&h);
        assert_eq!(w.len(), 4);
        assert!((u.adjoint() * &u - DMatrix::identity(4, 4)).norm() < 1e-10);
    }
}
