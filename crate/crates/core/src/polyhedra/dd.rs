//! Double description: H-representation to generators and back.

use super::cone::{ConeH, ConeV};
use super::linalg::{axpy, dot, null_space, primitive, rank, scale};
use super::rational::Rational;

/// Generators of `{x : a·x ≥ 0, b·x = 0}`, canonically ordered.
pub fn double_description(h: &ConeH) -> ConeV {
    let dim = h.dim();
    let basis = null_space(h.equalities(), dim);
    let k = basis.len();
    // Inequalities in the coordinates of the null-space basis: a'_j = a·n_j.
    let mut rows: Vec<Vec<Rational>> = h
        .inequalities()
        .iter()
        .map(|a| primitive(&basis.iter().map(|n| dot(a, n)).collect::<Vec<_>>()))
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    rows.sort();
    rows.dedup();
    let (rays, lineality) = dd_core(&rows, k);
    let lift = |y: &Vec<Rational>| -> Vec<Rational> {
        let mut x = vec![Rational::zero(); dim];
        for (c, n) in y.iter().zip(&basis) {
            if !c.is_zero() {
                x = axpy(&x, c, n);
            }
        }
        x
    };
    ConeV::new_unchecked(
        dim,
        rays.iter().map(lift).collect(),
        lineality.iter().map(lift).collect(),
    )
    .canonical()
}

/// H-representation of the cone generated by `v`: extreme rays of the polar
/// become facets and its lineality becomes the equalities.
pub fn facet_enumeration(v: &ConeV) -> ConeH {
    let polar = ConeH::new_unchecked(v.dim(), v.rays().to_vec(), v.lineality().to_vec());
    let p = double_description(&polar);
    ConeH::new_unchecked(v.dim(), p.rays().to_vec(), p.lineality().to_vec()).canonical()
}

struct Ray {
    v: Vec<Rational>,
    zeros: Vec<bool>,
}

fn dd_core(rows: &[Vec<Rational>], k: usize) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
    let mut lineality: Vec<Vec<Rational>> = (0..k)
        .map(|i| {
            let mut e = vec![Rational::zero(); k];
            e[i] = Rational::one();
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();
    let mut processed: Vec<usize> = Vec::new();

    for (idx, a) in rows.iter().enumerate() {
        if let Some(p) = lineality.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l0 = lineality.remove(p);
            let mut al0 = dot(a, &l0);
            if al0.is_negative() {
                l0 = scale(&l0, &-Rational::one());
                al0 = -al0;
            }
            for l in lineality.iter_mut() {
                let c = dot(a, l);
                if !c.is_zero() {
                    *l = primitive(&axpy(l, &(-(&c / &al0)), &l0));
                }
            }
            for r in rays.iter_mut() {
                let c = dot(a, &r.v);
                if !c.is_zero() {
                    r.v = primitive(&axpy(&r.v, &(-(&c / &al0)), &l0));
                }
                r.zeros.push(true);
            }
            let mut zeros: Vec<bool> = processed.iter().map(|_| true).collect();
            zeros.push(false);
            rays.push(Ray { v: primitive(&l0), zeros });
            processed.push(idx);
            continue;
        }

        let vals: Vec<Rational> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let target_rank = (k - lineality.len()).saturating_sub(2);
        let mut next: Vec<Ray> = Vec::new();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        for &p in &pos {
            for &n in &neg {
                let common: Vec<usize> = (0..processed.len())
                    .filter(|&j| rays[p].zeros[j] && rays[n].zeros[j])
                    .collect();
                if common.len() < target_rank {
                    continue;
                }
                let sub: Vec<Vec<Rational>> = common.iter().map(|&j| rows[processed[j]].clone()).collect();
                if rank(&sub, k) != target_rank {
                    continue;
                }
                let v = primitive(&axpy(
                    &scale(&rays[n].v, &vals[p]),
                    &(-&vals[n]),
                    &rays[p].v,
                ));
                let mut zeros: Vec<bool> = common_mask(&rays[p].zeros, &rays[n].zeros);
                zeros.push(true);
                next.push(Ray { v, zeros });
            }
        }
        for (i, mut r) in rays.into_iter().enumerate() {
            if !vals[i].is_negative() {
                r.zeros.push(vals[i].is_zero());
                next.push(r);
            }
        }
        rays = next;
        processed.push(idx);
    }
    (rays.into_iter().map(|r| r.v).collect(), lineality)
}

fn common_mask(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x && *y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_int(x)).collect()
    }

    #[test]
    fn orthant() {
        let h = ConeH::new(2, vec![q(&[1, 0]), q(&[0, 1])], vec![]).unwrap();
        let v = double_description(&h);
        assert_eq!(v.rays(), &[q(&[0, 1]), q(&[1, 0])]);
        assert!(v.lineality().is_empty());
    }

    #[test]
    fn half_line_facets() {
        let v = ConeV::new(2, vec![q(&[1, 1])], vec![]).unwrap();
        let h = facet_enumeration(&v);
        assert_eq!(h.equalities().len(), 1);
        assert_eq!(h.inequalities().len(), 1);
        assert!(h.contains(&q(&[2, 2])));
        assert!(!h.contains(&q(&[-1, -1])));
        assert!(!h.contains(&q(&[1, 0])));
    }

    #[test]
    fn whole_space_and_point() {
        let v = double_description(&ConeH::new(3, vec![], vec![]).unwrap());
        assert_eq!(v.lineality().len(), 3);
        let p = double_description(&ConeH::new(1, vec![q(&[1]), q(&[-1])], vec![]).unwrap());
        assert!(p.rays().is_empty() && p.lineality().is_empty());
    }

    #[test]
    fn square_cone_rays() {
        // x ± y ≥ 0, x ± z ≥ 0 is a pointed cone over a square with four rays
        let h = ConeH::new(
            3,
            vec![q(&[1, 1, 0]), q(&[1, -1, 0]), q(&[1, 0, 1]), q(&[1, 0, -1])],
            vec![],
        )
        .unwrap();
        let v = double_description(&h);
        assert_eq!(v.rays().len(), 4);
        for r in v.rays() {
            assert_eq!(r[1].abs(), Rational::one());
            assert_eq!(r[2].abs(), Rational::one());
        }
    }
}
