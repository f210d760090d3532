//! Double description on homogenised points: given full-dimensional points in
//! `ℤ^d`, find the facet inequalities `a0 + a·y ≥ 0` and the irredundant points.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::bitset::BitSet;
use super::int::{self, Int};
use crate::rational::{lcm_of_denominators, make_primitive};

pub(crate) struct RawHull {
    /// Input indices of the vertices, increasing.
    pub vertices: Vec<usize>,
    /// `[a0, a1, .., ad]` with `a0 + a·y ≥ 0` on the hull; primitive.
    pub facets: Vec<Vec<BigInt>>,
    /// Per facet, the tight vertices as positions into `vertices`.
    pub incidence: Vec<BitSet>,
}

/// `points` must affinely span `ℝ^d` when `d > 0`.
pub(crate) fn hull_full_dim(points: &[Vec<BigInt>], d: usize) -> RawHull {
    if d == 0 {
        return RawHull {
            vertices: vec![0],
            facets: Vec::new(),
            incidence: Vec::new(),
        };
    }
    let homog: Vec<Vec<BigInt>> = points
        .iter()
        .map(|p| {
            let mut h = Vec::with_capacity(d + 1);
            h.push(BigInt::one());
            h.extend(p.iter().cloned());
            h
        })
        .collect();
    if let Some(small) = int::convert::<i64>(&homog) {
        if let Some(out) = run::<i64>(&small, d) {
            return out;
        }
    }
    run::<BigInt>(&homog, d).expect("big integer arithmetic cannot overflow")
}

struct Ray<T> {
    coef: Vec<T>,
    zeros: BitSet,
}

fn run<T: Int>(homog: &[Vec<T>], d: usize) -> Option<RawHull> {
    let m = homog.len();
    let (basis_idx, _) = int::independent_rows(homog)?;
    assert_eq!(basis_idx.len(), d + 1, "points do not span the space");

    let mut rays = initial_rays::<T>(homog, &basis_idx)?;
    let mut done = BitSet::new(m);
    for &i in &basis_idx {
        done.insert(i);
    }
    for (j, r) in rays.iter_mut().enumerate() {
        for (jj, &i) in basis_idx.iter().enumerate() {
            if jj != j {
                r.zeros.insert(i);
            }
        }
    }

    for i in 0..m {
        if done.contains(i) {
            continue;
        }
        done.insert(i);
        add_point(&mut rays, &homog[i], i, d)?;
    }

    // Final incidences over all points, then the vertex test.
    let facets_t: Vec<Vec<T>> = rays.into_iter().map(|r| r.coef).collect();
    let mut tight_points: Vec<BitSet> = Vec::with_capacity(facets_t.len());
    for f in &facets_t {
        let mut z = BitSet::new(m);
        for (i, h) in homog.iter().enumerate() {
            let s = int::dot(f, h)?;
            debug_assert!(s.signum() >= 0);
            if s.is_zero() {
                z.insert(i);
            }
        }
        tight_points.push(z);
    }
    let mut point_facets: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (fi, z) in tight_points.iter().enumerate() {
        for i in z.iter() {
            point_facets[i].push(fi);
        }
    }
    let mut vertices = Vec::new();
    for (i, fs) in point_facets.iter().enumerate() {
        if fs.len() < d {
            continue;
        }
        let mut closure = tight_points[fs[0]].clone();
        for &f in &fs[1..] {
            closure.intersect_with(&tight_points[f]);
        }
        if closure.count() == 1 {
            vertices.push(i);
        }
    }
    let incidence = tight_points
        .iter()
        .map(|z| BitSet::from_indices(vertices.len(), vertices.iter().enumerate().filter(|(_, &p)| z.contains(p)).map(|(pos, _)| pos)))
        .collect();
    Some(RawHull {
        vertices,
        facets: facets_t.iter().map(|f| f.iter().map(Int::to_big).collect()).collect(),
        incidence,
    })
}

/// Rays of the simplicial cone spanned by `d+1` independent homogenised
/// points: the columns of the inverse matrix, scaled to primitive integers.
fn initial_rays<T: Int>(homog: &[Vec<T>], basis_idx: &[usize]) -> Option<Vec<Ray<T>>> {
    let n = basis_idx.len();
    let m = homog.len();
    let a: Vec<Vec<BigRational>> = basis_idx
        .iter()
        .map(|&i| homog[i].iter().map(|x| BigRational::from_integer(x.to_big())).collect())
        .collect();
    let inv = invert(a);
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let col: Vec<BigRational> = (0..n).map(|i| inv[i][j].clone()).collect();
        let den = lcm_of_denominators(&col);
        let mut v: Vec<BigInt> = col.iter().map(|q| (q * &den).to_integer()).collect();
        make_primitive(&mut v);
        let coef = v.iter().map(T::from_big).collect::<Option<Vec<T>>>()?;
        out.push(Ray {
            coef,
            zeros: BitSet::new(m),
        });
    }
    Some(out)
}

pub(crate) fn invert(mut a: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("matrix is invertible");
        a.swap(c, p);
        inv.swap(c, p);
        let piv = a[c][c].clone();
        for j in 0..n {
            a[c][j] = &a[c][j] / &piv;
            inv[c][j] = &inv[c][j] / &piv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..n {
                    let t = &f * &a[c][j];
                    a[r][j] -= t;
                    let t = &f * &inv[c][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    inv
}

fn add_point<T: Int>(rays: &mut Vec<Ray<T>>, h: &[T], idx: usize, d: usize) -> Option<()> {
    let mut vals = Vec::with_capacity(rays.len());
    let mut any_neg = false;
    for r in rays.iter() {
        let s = int::dot(&r.coef, h)?;
        any_neg |= s.signum() < 0;
        vals.push(s);
    }
    if !any_neg {
        for (r, s) in rays.iter_mut().zip(&vals) {
            if s.is_zero() {
                r.zeros.insert(idx);
            }
        }
        return Some(());
    }
    let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].signum() > 0).collect();
    let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].signum() < 0).collect();

    let mut new_rays = Vec::new();
    for &p in &pos {
        for &q in &neg {
            let z = rays[p].zeros.intersect(&rays[q].zeros);
            if z.count() + 1 < d {
                continue;
            }
            let adjacent = rays
                .iter()
                .enumerate()
                .all(|(o, r)| o == p || o == q || !z.is_subset(&r.zeros));
            if !adjacent {
                continue;
            }
            // vals[p] > 0 > vals[q]; the combination vanishes at h.
            let a = &vals[p];
            let b = vals[q].neg();
            let mut coef = Vec::with_capacity(h.len());
            for j in 0..h.len() {
                let x = a.mul(&rays[q].coef[j])?;
                let y = b.mul(&rays[p].coef[j])?;
                coef.push(x.add(&y)?);
            }
            int::normalize(&mut coef);
            let mut zeros = z;
            zeros.insert(idx);
            new_rays.push(Ray { coef, zeros });
        }
    }
    let mut kept: Vec<Ray<T>> = Vec::with_capacity(rays.len() + new_rays.len());
    for (r, s) in rays.drain(..).zip(vals) {
        match s.signum() {
            1 => kept.push(r),
            0 => {
                let mut r = r;
                r.zeros.insert(idx);
                kept.push(r);
            }
            _ => {}
        }
    }
    kept.extend(new_rays);
    *rays = kept;
    Some(())
}
