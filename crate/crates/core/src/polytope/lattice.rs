//! Integer sublattices in Hermite normal form, and coordinates of a lattice
//! polytope in a basis of its lattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{dd, QPoint, VPolytope};
use crate::error::{invalid, Error, Result};
use crate::rational::Rational;

/// Unimodular row reduction of `rows` to echelon form; the same row
/// operations are applied to `aux`. Returns the pivot columns.
fn echelon(rows: &mut [Vec<BigInt>], aux: &mut [Vec<BigInt>]) -> Vec<usize> {
    let width = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        if r == rows.len() {
            break;
        }
        loop {
            // smallest nonzero |entry| in column c at or below r
            let best = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()));
            let Some(p) = best else { break };
            rows.swap(r, p);
            if !aux.is_empty() {
                aux.swap(r, p);
            }
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                sub_multiple(rows, i, r, &q);
                sub_multiple(aux, i, r, &q);
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                negate(rows, r);
                negate(aux, r);
            }
            pivots.push(c);
            r += 1;
        }
    }
    pivots
}

fn sub_multiple(m: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    if m.is_empty() || q.is_zero() {
        return;
    }
    let (a, b) = if target > src {
        let (lo, hi) = m.split_at_mut(target);
        (&mut hi[0], &lo[src])
    } else {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[target], &hi[0])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn negate(m: &mut [Vec<BigInt>], r: usize) {
    if let Some(row) = m.get_mut(r) {
        for x in row.iter_mut() {
            *x = -&*x;
        }
    }
}

/// A basis of `{c ∈ ℤ^r : M c = 0}` for an `m × r` integer matrix `M`.
pub(crate) fn integer_kernel(m: &[Vec<BigInt>], r: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = (0..r).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect();
    let mut aux: Vec<Vec<BigInt>> = (0..r)
        .map(|i| (0..r).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    if m.is_empty() {
        return aux;
    }
    let rank = echelon(&mut rows, &mut aux).len();
    aux.split_off(rank)
}

/// The integer lattice spanned by a set of generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubLattice {
    ambient: usize,
    generators: Vec<Vec<BigInt>>,
    /// Hermite normal form rows: positive pivots, entries above each pivot reduced.
    basis: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl SubLattice {
    pub fn new(ambient: usize, generators: Vec<Vec<BigInt>>) -> Result<SubLattice> {
        if generators.iter().any(|g| g.len() != ambient) {
            return invalid("lattice generator has the wrong length");
        }
        let mut rows = generators.clone();
        let mut none = Vec::new();
        let pivots = echelon(&mut rows, &mut none);
        rows.truncate(pivots.len());
        for (i, &c) in pivots.iter().enumerate() {
            for k in 0..i {
                let q = rows[k][c].div_floor(&rows[i][c]);
                sub_multiple(&mut rows, k, i, &q);
            }
        }
        Ok(SubLattice {
            ambient,
            generators,
            basis: rows,
            pivots,
        })
    }

    pub fn from_points(points: &[QPoint]) -> Result<SubLattice> {
        let ambient = points.first().map_or(0, |p| p.len());
        let gens = points
            .iter()
            .map(|p| integral(p).ok_or_else(|| Error::InvalidArgument("lattice generator is not integral".into())))
            .collect::<Result<Vec<_>>>()?;
        SubLattice::new(ambient, gens)
    }

    pub fn full(ambient: usize) -> SubLattice {
        let gens = (0..ambient)
            .map(|i| (0..ambient).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        SubLattice::new(ambient, gens).expect("unit vectors")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        if x.len() != self.ambient {
            return false;
        }
        let mut x = x.to_vec();
        for (row, &c) in self.basis.iter().zip(&self.pivots) {
            if x[c].is_zero() {
                continue;
            }
            let (q, rem) = x[c].div_rem(&row[c]);
            if !rem.is_zero() {
                return false;
            }
            for (xi, ri) in x.iter_mut().zip(row) {
                *xi -= &q * ri;
            }
        }
        x.iter().all(|v| v.is_zero())
    }

    pub fn contains_point(&self, x: &[Rational]) -> bool {
        integral(x).is_some_and(|v| self.contains(&v))
    }

    /// Index of `self` in its saturation `(self ⊗ ℚ) ∩ ℤ^N`.
    pub fn saturation_index(&self) -> BigInt {
        // product of the elementary divisors = gcd of maximal minors; the
        // Hermite rows of the saturation have the same pivots, so compare
        // via the kernel-of-kernel construction.
        if self.basis.is_empty() {
            return BigInt::one();
        }
        let kernel = integer_kernel(&self.basis, self.ambient);
        let sat_gens = if kernel.is_empty() {
            SubLattice::full(self.ambient).basis
        } else {
            integer_kernel(&kernel, self.ambient)
        };
        let sat = SubLattice::new(self.ambient, sat_gens).expect("shape");
        let prod = |l: &SubLattice| -> BigInt {
            l.basis.iter().zip(&l.pivots).map(|(r, &c)| r[c].clone()).product()
        };
        prod(self) / prod(&sat)
    }
}

pub(crate) fn integral(p: &[Rational]) -> Option<Vec<BigInt>> {
    p.iter().map(|q| q.is_integer().then(|| q.to_integer())).collect()
}

/// A lattice polytope written in a basis of `L ∩ (aff P − v0)`: the vertex
/// `v0` goes to the origin and every vertex gets integer coordinates.
#[derive(Clone, Debug)]
pub struct LatticeChart {
    pub(crate) origin: Vec<BigInt>,
    pub(crate) basis: Vec<Vec<BigInt>>,
    /// Vertex coordinates, in the vertex order of the polytope.
    pub(crate) points: Vec<Vec<BigInt>>,
    pub(crate) facets: Vec<Vec<BigInt>>,
}

impl LatticeChart {
    pub fn new(p: &VPolytope, lattice: &SubLattice) -> Result<LatticeChart> {
        if lattice.ambient() != p.ambient() {
            return invalid("lattice and polytope live in different spaces");
        }
        let verts = p
            .vertices()
            .iter()
            .map(|v| integral(v))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidArgument("polytope has a non-integral vertex".into()))?;
        if let Some(bad) = verts.iter().position(|v| !lattice.contains(v)) {
            return invalid(format!("vertex {bad} is not in the lattice"));
        }
        let origin = verts[0].clone();
        let d = p.dim();
        // L ∩ W with W = {x : E x = 0}: kernel of E Bᵀ.
        let eqs: Vec<&Vec<BigInt>> = p.facets().equations.iter().map(|e| &e.normal).collect();
        let b = lattice.basis();
        let ebt: Vec<Vec<BigInt>> = eqs
            .iter()
            .map(|e| b.iter().map(|row| row.iter().zip(e.iter()).map(|(x, y)| x * y).sum()).collect())
            .collect();
        let coeffs = integer_kernel(&ebt, b.len());
        let basis: Vec<Vec<BigInt>> = coeffs
            .iter()
            .map(|c| {
                let mut v = vec![BigInt::zero(); p.ambient()];
                for (ci, row) in c.iter().zip(b) {
                    if ci.is_zero() {
                        continue;
                    }
                    for (vj, rj) in v.iter_mut().zip(row) {
                        *vj += ci * rj;
                    }
                }
                v
            })
            .collect();
        if basis.len() != d {
            return Err(Error::Internal(format!(
                "lattice section has rank {} but the polytope has dimension {d}",
                basis.len()
            )));
        }
        // Solve x - v0 = Σ y_t u_t on d independent columns.
        let points = if d == 0 {
            vec![Vec::new(); verts.len()]
        } else {
            let (cols, _) = super::int::independent_rows(&transpose(&basis)).expect("bigint");
            let square: Vec<Vec<Rational>> = cols
                .iter()
                .map(|&c| basis.iter().map(|u| Rational::from_integer(u[c].clone())).collect())
                .collect();
            // square[c][t] = u_t[c]; y = square⁻¹ (x - v0)[cols]
            let inv = dd::invert(square);
            verts
                .iter()
                .map(|v| {
                    let rhs: Vec<Rational> = cols.iter().map(|&c| Rational::from_integer(&v[c] - &origin[c])).collect();
                    inv.iter()
                        .map(|row| {
                            let y: Rational = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
                            y.to_integer()
                        })
                        .collect()
                })
                .collect()
        };
        let facets = if d == 0 {
            Vec::new()
        } else {
            let raw = dd::hull_full_dim(&points, d);
            if raw.vertices.len() != points.len() {
                return Err(Error::Internal("chart changed the vertex set".into()));
            }
            raw.facets
        };
        Ok(LatticeChart {
            origin,
            basis,
            points,
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn vertex_coordinates(&self) -> &[Vec<BigInt>] {
        &self.points
    }

    /// `k·v0 + Σ y_t u_t`.
    pub fn to_ambient(&self, y: &[i64], k: i64) -> Vec<BigInt> {
        let mut x: Vec<BigInt> = self.origin.iter().map(|o| o * k).collect();
        for (yt, u) in y.iter().zip(&self.basis) {
            if *yt == 0 {
                continue;
            }
            for (xi, ui) in x.iter_mut().zip(u) {
                *xi += ui * *yt;
            }
        }
        x
    }
}

fn transpose(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::super::tests::poly;
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hermite_membership() {
        let l = SubLattice::new(2, vec![big(&[2, 0]), big(&[0, 3])]).unwrap();
        assert!(l.contains(&big(&[4, -3])));
        assert!(!l.contains(&big(&[1, 0])));
        let l = SubLattice::new(3, vec![big(&[1, 1, 0]), big(&[0, 1, 1]), big(&[1, 2, 1])]).unwrap();
        assert_eq!(l.rank(), 2);
        assert!(l.contains(&big(&[1, 0, -1])));
        assert!(!l.contains(&big(&[1, 0, 0])));
        assert_eq!(SubLattice::full(4).rank(), 4);
    }

    #[test]
    fn kernel_basis() {
        let m = vec![big(&[1, 2, 3])];
        let k = integer_kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigInt = v.iter().zip(&m[0]).map(|(a, b)| a * b).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn saturation() {
        let l = SubLattice::new(2, vec![big(&[2, 0]), big(&[0, 3])]).unwrap();
        assert_eq!(l.saturation_index(), BigInt::from(6));
        let l = SubLattice::new(3, vec![big(&[2, 2, 0])]).unwrap();
        assert_eq!(l.saturation_index(), BigInt::from(2));
        assert_eq!(SubLattice::full(3).saturation_index(), BigInt::one());
    }

    #[test]
    fn chart_of_embedded_triangle() {
        // triangle in the plane x+y+z = 1
        let p = poly(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let c = LatticeChart::new(&p, &SubLattice::full(3)).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.facets.len(), 3);
        for (y, v) in c.points.iter().zip(p.vertices()) {
            let y: Vec<i64> = y.iter().map(|b| i64::try_from(b).unwrap()).collect();
            assert_eq!(c.to_ambient(&y, 1), integral(v).unwrap());
        }
    }

    proptest! {
        // Brute force: x is in the lattice iff it is an integer combination
        // with small coefficients of the generators (coefficient box chosen
        // large enough for these tiny instances).
        #[test]
        fn membership_matches_brute_force(
            gens in proptest::collection::vec(proptest::collection::vec(-2i64..3, 2), 1..4),
            x in proptest::collection::vec(-3i64..4, 2),
        ) {
            let l = SubLattice::new(2, gens.iter().map(|g| big(g)).collect()).unwrap();
            let mut found = false;
            let r = 12i64;
            let mut coef = vec![-r; gens.len()];
            'outer: loop {
                let mut s = [0i64; 2];
                for (c, g) in coef.iter().zip(&gens) {
                    s[0] += c * g[0];
                    s[1] += c * g[1];
                }
                if s[0] == x[0] && s[1] == x[1] {
                    found = true;
                    break;
                }
                for i in 0..coef.len() {
                    if coef[i] < r {
                        coef[i] += 1;
                        continue 'outer;
                    }
                    coef[i] = -r;
                }
                break;
            }
            prop_assert_eq!(l.contains(&big(&x)), found);
        }
    }
}
