//! Small exact linear algebra over [`Rational`] rows.

use super::rational::{primitive_scale, Rational};

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Rational::is_zero)
}

pub fn scale(v: &[Rational], k: &Rational) -> Vec<Rational> {
    v.iter().map(|x| x * k).collect()
}

/// `a + k·b`
pub fn axpy(a: &[Rational], k: &Rational, b: &[Rational]) -> Vec<Rational> {
    a.iter()
        .zip(b)
        .map(|(x, y)| if y.is_zero() { x.clone() } else { x + &(k * y) })
        .collect()
}

/// Positive rescaling to coprime integers. Zero vectors are returned unchanged.
pub fn primitive(v: &[Rational]) -> Vec<Rational> {
    match primitive_scale(v) {
        Some(s) => scale(v, &s),
        None => v.to_vec(),
    }
}

/// Reduced row echelon form; returns the nonzero rows (leading entry 1) and
/// their pivot columns.
pub fn rref(rows: &[Vec<Rational>], dim: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        m[r] = scale(&m[r], &inv);
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let k = -row[c].clone();
                *row = axpy(row, &k, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<Rational>], dim: usize) -> usize {
    rref(rows, dim).1.len()
}

/// Basis of `{x : row·x = 0 for all rows}` as primitive integer vectors.
pub fn null_space(rows: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    let (r, pivots) = rref(rows, dim);
    let mut basis = Vec::new();
    for f in (0..dim).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); dim];
        v[f] = Rational::one();
        for (row, &p) in r.iter().zip(&pivots) {
            v[p] = -row[f].clone();
        }
        basis.push(primitive(&v));
    }
    basis
}

/// Reduce `v` modulo the span of rows in reduced echelon form.
pub fn reduce_modulo(v: &[Rational], echelon: &[Vec<Rational>], pivots: &[usize]) -> Vec<Rational> {
    let mut out = v.to_vec();
    for (row, &p) in echelon.iter().zip(pivots) {
        if !out[p].is_zero() {
            let k = -out[p].clone();
            out = axpy(&out, &k, row);
        }
    }
    out
}

/// Rows in echelon form scaled to primitive integers with a positive leading entry.
pub fn canonical_basis(rows: &[Vec<Rational>], dim: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let (r, p) = rref(rows, dim);
    (r.iter().map(|row| primitive(row)).collect(), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_int(x)).collect()
    }

    #[test]
    fn rank_and_null_space() {
        let rows = vec![q(&[1, 1, 1, 1])];
        assert_eq!(rank(&rows, 4), 1);
        let ns = null_space(&rows, 4);
        assert_eq!(ns.len(), 3);
        for v in &ns {
            assert!(dot(&rows[0], v).is_zero());
        }
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![Rational::new(1, 2), Rational::new(-3, 4), Rational::zero()];
        assert_eq!(primitive(&v), q(&[2, -3, 0]));
    }

    #[test]
    fn reduce_is_canonical() {
        let (e, p) = rref(&[q(&[1, 0, 1])], 3);
        let a = reduce_modulo(&q(&[2, 1, 0]), &e, &p);
        let b = reduce_modulo(&q(&[0, 1, -2]), &e, &p);
        assert_eq!(a, b);
    }
}
