//! Polytopes of matching fields: convex hulls of tuple vectors, their
//! Minkowski sums over several cardinalities, and the lattice `ℤS` they span.

use std::collections::HashSet;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::matchfield::{MatchingField, PluckerIndex};
use crate::polytope::{qpoint_from_ints, QPoint, SubLattice, VPolytope};

/// Ambient dimension `(n-1)·n`.
pub fn ambient_dim(n: usize) -> usize {
    (n - 1) * n
}

/// `P^k_Λ`: the hull of the tuple vectors of all `k`-subsets.
pub fn grassmannian_polytope(field: &MatchingField, k: usize) -> Result<VPolytope> {
    if !field.cardinalities().contains(&k) {
        return invalid(format!("the matching field has no indices of size {k}"));
    }
    let mut seen = HashSet::new();
    let mut pts: Vec<QPoint> = Vec::new();
    for idx in field.indices(k) {
        let v = field.tuple_vector(idx)?;
        if !seen.insert(v.clone()) {
            return Err(Error::InvalidArgument(format!("two indices of size {k} share the tuple vector of {idx}")));
        }
        pts.push(qpoint_from_ints(&v));
    }
    VPolytope::hull(&pts)
}

/// All tuple vectors for the given cardinalities.
pub fn tuple_lattice(field: &MatchingField, ks: &[usize]) -> Result<SubLattice> {
    let mut gens = Vec::new();
    for &k in ks {
        for idx in field.indices(k) {
            gens.push(field.tuple_vector(idx)?.into_iter().map(BigInt::from).collect());
        }
    }
    SubLattice::new(ambient_dim(field.n()), gens)
}

/// A matching field together with its per-cardinality polytopes, their
/// Minkowski sum and the lattice of tuple vectors.
#[derive(Clone, Debug)]
pub struct FlagContext {
    pub field: MatchingField,
    pub pieces: Vec<(usize, VPolytope)>,
    pub polytope: VPolytope,
    pub lattice: SubLattice,
}

impl FlagContext {
    pub fn n(&self) -> usize {
        self.field.n()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.pieces.iter().map(|(k, _)| *k).collect()
    }

    pub fn to_json(&self) -> Value {
        let pieces: Vec<Value> = self
            .pieces
            .iter()
            .map(|(k, p)| json!({"k": k, "polytope": p.to_json(false, false)}))
            .collect();
        let basis: Vec<Vec<String>> = self
            .lattice
            .basis()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect();
        json!({
            "matching_field": self.field.to_json(),
            "pieces": pieces,
            "polytope": self.polytope.to_json(false, false),
            "lattice_basis": basis,
        })
    }
}

/// `P^K_Λ = Σ_{k ∈ K} P^k_Λ`.
pub fn flag_polytope(field: &MatchingField, ks: &[usize]) -> Result<FlagContext> {
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() {
        return invalid("the set of cardinalities is empty");
    }
    let pieces: Vec<(usize, VPolytope)> = ks
        .par_iter()
        .map(|&k| grassmannian_polytope(field, k).map(|p| (k, p)))
        .collect::<Result<_>>()?;
    let mut sum = pieces[0].1.clone();
    for (_, p) in &pieces[1..] {
        sum = sum.minkowski(p)?;
    }
    Ok(FlagContext {
        field: field.clone(),
        lattice: tuple_lattice(field, &ks)?,
        pieces,
        polytope: sum,
    })
}

/// The Gelfand–Tsetlin polytope: the flag polytope of the diagonal field.
pub fn gt_polytope(ks: &[usize], n: usize) -> Result<FlagContext> {
    flag_polytope(&MatchingField::diagonal(n, ks)?, ks)
}

/// `Σ_k λ_k P^k_Λ`, where `lambda[k-1]` is the multiplicity of cardinality `k`.
/// All multiplicities zero give the origin.
pub fn scaled_polytope(field: &MatchingField, lambda: &[usize]) -> Result<VPolytope> {
    let n = field.n();
    if lambda.len() != n - 1 {
        return invalid(format!("expected {} multiplicities, got {}", n - 1, lambda.len()));
    }
    let mut sum = VPolytope::point(qpoint_from_ints(&vec![0; ambient_dim(n)]));
    for (i, &m) in lambda.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let piece = grassmannian_polytope(field, i + 1)?;
        for _ in 0..m {
            sum = sum.minkowski(&piece)?;
        }
    }
    Ok(sum)
}

/// The lattice map sending the Plücker coordinate `p_I` to its tuple vector.
#[derive(Clone, Debug)]
pub struct PhiHat {
    n: usize,
    pub indices: Vec<PluckerIndex>,
    /// One column per index, each of length `(n-1)·n`.
    pub columns: Vec<Vec<i64>>,
}

impl PhiHat {
    pub fn new(field: &MatchingField, ks: &[usize]) -> Result<PhiHat> {
        let mut indices = Vec::new();
        let mut columns = Vec::new();
        let mut ks = ks.to_vec();
        ks.sort_unstable();
        for k in ks {
            for idx in field.indices(k) {
                columns.push(field.tuple_vector(idx)?);
                indices.push(idx.clone());
            }
        }
        Ok(PhiHat {
            n: field.n(),
            indices,
            columns,
        })
    }

    /// Rows indexed by matrix entries `x_{i,j}`, columns by Plücker coordinates.
    pub fn matrix(&self) -> Vec<Vec<i64>> {
        (0..ambient_dim(self.n))
            .map(|r| self.columns.iter().map(|c| c[r]).collect())
            .collect()
    }

    pub fn apply(&self, m: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let a = self.matrix();
        let cols = m.first().map_or(0, |r| r.len());
        a.iter()
            .map(|row| (0..cols).map(|j| row.iter().zip(m).map(|(x, mr)| x * mr[j]).sum()).collect())
            .collect()
    }
}

/// A product of simplices `Δ_{m_1 - 1} × ⋯`, one factor per cardinality, with
/// one coordinate per vertex of each factor.
#[derive(Clone, Debug)]
pub struct SimplexProduct {
    pub factors: Vec<usize>,
}

impl SimplexProduct {
    pub fn for_grassmannians(n: usize, ks: &[usize]) -> SimplexProduct {
        SimplexProduct {
            factors: ks.iter().map(|&k| binomial(n, k)).collect(),
        }
    }

    fn total(&self) -> usize {
        self.factors.iter().sum()
    }

    /// Ray generators of the normal fan, one row per coordinate: the unit
    /// vectors of each factor followed by minus their sum.
    pub fn ray_matrix(&self) -> Vec<Vec<i64>> {
        let width: usize = self.factors.iter().map(|m| m - 1).sum();
        let mut rows = Vec::new();
        let mut off = 0;
        for &m in &self.factors {
            for i in 0..m {
                let mut r = vec![0; width];
                if i + 1 < m {
                    r[off + i] = 1;
                } else {
                    for x in &mut r[off..off + m - 1] {
                        *x = -1;
                    }
                }
                rows.push(r);
            }
            off += m - 1;
        }
        rows
    }

    /// Right-hand side of the facet description: 1 on the last coordinate of each factor.
    pub fn rho(&self) -> Vec<i64> {
        let mut v = vec![0; self.total()];
        let mut off = 0;
        for &m in &self.factors {
            v[off + m - 1] = 1;
            off += m;
        }
        v
    }

    /// Grading matrix: row `t` is the indicator of factor `t`.
    pub fn grading_matrix(&self) -> Vec<Vec<i64>> {
        let mut rows = Vec::new();
        let mut off = 0;
        for &m in &self.factors {
            let mut r = vec![0; self.total()];
            for x in &mut r[off..off + m] {
                *x = 1;
            }
            rows.push(r);
            off += m;
        }
        rows
    }

    /// Vertices as columns, the first factor varying slowest.
    pub fn vertex_matrix(&self) -> Vec<Vec<i64>> {
        let mut cols: Vec<Vec<usize>> = vec![Vec::new()];
        for &m in &self.factors {
            cols = cols
                .into_iter()
                .flat_map(|c| {
                    (0..m).map(move |i| {
                        let mut c = c.clone();
                        c.push(i);
                        c
                    })
                })
                .collect();
        }
        let mut rows = vec![vec![0; cols.len()]; self.total()];
        for (j, choice) in cols.iter().enumerate() {
            let mut off = 0;
            for (&m, &i) in self.factors.iter().zip(choice) {
                rows[off + i][j] = 1;
                off += m;
            }
        }
        rows
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Image of the vertices of a simplex product under `φ̂`, as points.
pub fn image_points(phi: &PhiHat, prod: &SimplexProduct) -> Vec<QPoint> {
    let img = phi.apply(&prod.vertex_matrix());
    let cols = img.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| qpoint_from_ints(&img.iter().map(|r| r[j]).collect::<Vec<_>>()))
        .collect()
}
