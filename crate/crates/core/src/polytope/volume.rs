//! Normalised volume from a pulling triangulation over the face lattice.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::faces::FaceLattice;
use super::lattice::{LatticeChart, SubLattice};
use super::VPolytope;
use crate::error::Result;

/// Maximal simplices of the pulling triangulation: every face is coned
/// from its smallest vertex over the facets that miss that vertex.
pub fn pulling_triangulation(p: &VPolytope) -> Vec<Vec<usize>> {
    let fl = p.face_lattice();
    let d = fl.dim();
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(d + 1);
    pull(fl, d, 0, &mut stack, &mut out);
    out
}

fn pull(fl: &FaceLattice, level: usize, idx: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let face = &fl.faces(level)[idx];
    let apex = face.vertices.first().expect("nonempty face");
    stack.push(apex);
    if level == 0 {
        out.push(stack.clone());
    } else {
        for &c in &face.children {
            if !fl.faces(level - 1)[c].vertices.contains(apex) {
                pull(fl, level - 1, c, stack, out);
            }
        }
    }
    stack.pop();
}

/// `d!` times the Euclidean volume measured in a basis of the lattice.
pub fn normalized_volume(p: &VPolytope, lattice: &SubLattice) -> Result<BigInt> {
    let chart = LatticeChart::new(p, lattice)?;
    let pts = chart.vertex_coordinates();
    let d = chart.dim();
    if d == 0 {
        return Ok(BigInt::from(1));
    }
    let mut total = BigInt::zero();
    for s in pulling_triangulation(p) {
        let rows: Vec<Vec<BigInt>> = s[1..]
            .iter()
            .map(|&v| pts[v].iter().zip(&pts[s[0]]).map(|(a, b)| a - b).collect())
            .collect();
        total += det(rows).abs();
    }
    Ok(total)
}

/// Fraction-free Gaussian elimination, `i128` first.
pub(crate) fn det(rows: Vec<Vec<BigInt>>) -> BigInt {
    let small: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_i128()).collect())
        .collect();
    if let Some(m) = small {
        if let Some(v) = bareiss_i128(m) {
            return BigInt::from(v);
        }
    }
    bareiss_big(rows)
}

fn bareiss_i128(mut m: Vec<Vec<i128>>) -> Option<i128> {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let p = (k + 1..n).find(|&i| m[i][k] != 0)?;
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(m[k][k])?;
                let b = m[i][k].checked_mul(m[k][j])?;
                m[i][j] = a.checked_sub(b)? / prev;
            }
        }
        prev = m[k][k];
    }
    Some(if n == 0 { 1 } else { sign * m[n - 1][n - 1] })
}

fn bareiss_big(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(p) => {
                    m.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    if n == 0 {
        BigInt::from(1)
    } else {
        sign * m[n - 1][n - 1].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::poly;
    use super::*;

    #[test]
    fn determinants() {
        let m = |v: &[&[i64]]| -> Vec<Vec<BigInt>> { v.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect() };
        assert_eq!(det(m(&[&[2, 1], &[1, 3]])), BigInt::from(5));
        assert_eq!(det(m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(det(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])), BigInt::from(0));
        let big = 1i64 << 62;
        assert_eq!(det(m(&[&[big, 1], &[1, big]])), BigInt::from(big) * big - 1);
    }

    #[test]
    fn volumes() {
        let l3 = SubLattice::full(3);
        let simplex = poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(normalized_volume(&simplex, &l3).unwrap(), BigInt::from(1));
        let mut cube = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    cube.push(vec![a, b, c]);
                }
            }
        }
        let refs: Vec<&[i64]> = cube.iter().map(|v| v.as_slice()).collect();
        let c = poly(&refs);
        assert_eq!(normalized_volume(&c, &l3).unwrap(), BigInt::from(6));
        assert_eq!(pulling_triangulation(&c).len(), 6);
        let oct = poly(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]]);
        assert_eq!(normalized_volume(&oct, &l3).unwrap(), BigInt::from(8));
    }
}
