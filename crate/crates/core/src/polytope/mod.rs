//! Exact rational polytopes: hulls, facets, faces, lattice points and the
//! Ehrhart machinery built on them.

mod bitset;
mod dd;
mod ehrhart;
mod faces;
mod fingerprint;
mod int;
mod lattice;
mod normality;
mod volume;

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub use bitset::BitSet;
pub use ehrhart::{count_interior_points, count_lattice_points, ehrhart, lattice_points, EhrhartMethod, EhrhartPolynomial};
pub use faces::{Face, FaceLattice};
pub use fingerprint::{fingerprint, Fingerprint};
pub use lattice::{LatticeChart, SubLattice};
pub use normality::{is_normal_up_to, NormalityResult};
pub use volume::{normalized_volume, pulling_triangulation};

use crate::error::{invalid, Error, Result};
use crate::rational::{self, Rational};

pub type QPoint = Vec<Rational>;

pub fn qpoint_from_ints(v: &[i64]) -> QPoint {
    v.iter().map(|&x| rational::int(x)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `a·x = b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    pub normal: Vec<BigInt>,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
}

/// `a·x ≥ b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub normal: Vec<BigInt>,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
}

mod serde_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational::to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        rational::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl Inequality {
    pub fn slack(&self, x: &[Rational]) -> Rational {
        int_dot(&self.normal, x) - &self.rhs
    }
}

fn int_dot(a: &[BigInt], x: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (ai, xi) in a.iter().zip(x) {
        if !ai.is_zero() && !xi.is_zero() {
            acc += xi * Rational::from_integer(ai.clone());
        }
    }
    acc
}

/// Facet description inside the affine hull.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPolytope {
    pub equations: Vec<Equation>,
    pub inequalities: Vec<Inequality>,
}

impl HPolytope {
    pub fn contains(&self, x: &[Rational]) -> bool {
        self.equations.iter().all(|e| int_dot(&e.normal, x) == e.rhs)
            && self.inequalities.iter().all(|f| !f.slack(x).is_negative())
    }

    pub fn contains_interior(&self, x: &[Rational]) -> bool {
        self.equations.iter().all(|e| int_dot(&e.normal, x) == e.rhs)
            && self.inequalities.iter().all(|f| f.slack(x).is_positive())
    }
}

/// A polytope given by its irredundant vertices (sorted lexicographically).
/// Facets are computed with the hull; the face lattice is built on demand.
#[derive(Clone, Debug)]
pub struct VPolytope {
    ambient: usize,
    vertices: Vec<QPoint>,
    dim: usize,
    chart: Vec<usize>,
    hrep: HPolytope,
    incidence: Vec<BitSet>,
    faces: OnceLock<FaceLattice>,
}

impl PartialEq for VPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.vertices == other.vertices
    }
}

impl Eq for VPolytope {}

impl VPolytope {
    pub fn hull(points: &[QPoint]) -> Result<VPolytope> {
        let Some(first) = points.first() else {
            return invalid("cannot take the hull of an empty point set");
        };
        let ambient = first.len();
        if points.iter().any(|p| p.len() != ambient) {
            return invalid("points have different lengths");
        }
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();

        let scale = rational::lcm_of_denominators(pts.iter().flatten());
        let scaled: Vec<Vec<BigInt>> = pts
            .iter()
            .map(|p| p.iter().map(|q| (q * &scale).to_integer()).collect())
            .collect();
        let diffs: Vec<Vec<BigInt>> = scaled[1..]
            .iter()
            .map(|p| p.iter().zip(&scaled[0]).map(|(a, b)| a - b).collect())
            .collect();
        let (basis_idx, chart) = match int::convert::<i64>(&diffs).and_then(|d| int::independent_rows(&d)) {
            Some(r) => r,
            None => int::independent_rows(&diffs).expect("bigint"),
        };
        let dim = chart.len();
        let mut chart_sorted = chart.clone();
        chart_sorted.sort_unstable();
        let local: Vec<Vec<BigInt>> = scaled
            .iter()
            .map(|p| chart_sorted.iter().map(|&c| p[c].clone()).collect())
            .collect();
        let raw = dd::hull_full_dim(&local, dim);

        let equations = affine_equations(&diffs, &basis_idx, &pts[0], ambient);
        let scale_q = Rational::from_integer(scale);
        let inequalities: Vec<Inequality> = raw
            .facets
            .iter()
            .map(|f| {
                let mut normal = vec![BigInt::zero(); ambient];
                for (j, &c) in chart_sorted.iter().enumerate() {
                    normal[c] = f[j + 1].clone();
                }
                Inequality {
                    normal,
                    rhs: Rational::from_integer(-f[0].clone()) / &scale_q,
                }
            })
            .collect();
        let vertices: Vec<QPoint> = raw.vertices.iter().map(|&i| pts[i].clone()).collect();
        Ok(VPolytope {
            ambient,
            vertices,
            dim,
            chart: chart_sorted,
            hrep: HPolytope {
                equations,
                inequalities,
            },
            incidence: raw.incidence,
            faces: OnceLock::new(),
        })
    }

    pub fn point(p: QPoint) -> VPolytope {
        VPolytope::hull(&[p]).expect("single point")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[QPoint] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Coordinates that parametrise the affine hull.
    pub fn chart(&self) -> &[usize] {
        &self.chart
    }

    pub fn facets(&self) -> &HPolytope {
        &self.hrep
    }

    pub fn num_facets(&self) -> usize {
        self.hrep.inequalities.len()
    }

    /// Vertex indices on facet `i`.
    pub fn facet_vertices(&self, i: usize) -> Vec<usize> {
        self.incidence[i].iter().collect()
    }

    pub(crate) fn incidence(&self) -> &[BitSet] {
        &self.incidence
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.hrep.contains(x)
    }

    pub fn is_lattice_polytope(&self) -> bool {
        self.vertices.iter().flatten().all(|q| q.is_integer())
    }

    pub fn face_lattice(&self) -> &FaceLattice {
        self.faces
            .get_or_init(|| FaceLattice::from_incidence(self.dim, self.vertices.len(), &self.incidence))
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.face_lattice().f_vector()
    }

    pub fn translate(&self, t: &[Rational]) -> VPolytope {
        let pts: Vec<QPoint> = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(t).map(|(a, b)| a + b).collect())
            .collect();
        VPolytope::hull(&pts).expect("nonempty")
    }

    pub fn scale(&self, k: &Rational) -> VPolytope {
        let pts: Vec<QPoint> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|a| a * k).collect())
            .collect();
        VPolytope::hull(&pts).expect("nonempty")
    }

    pub fn minkowski(&self, other: &VPolytope) -> Result<VPolytope> {
        if self.ambient != other.ambient {
            return invalid(format!(
                "Minkowski sum of polytopes in dimensions {} and {}",
                self.ambient, other.ambient
            ));
        }
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                pts.push(a.iter().zip(b).map(|(x, y)| x + y).collect::<QPoint>());
            }
        }
        VPolytope::hull(&pts)
    }

    /// Vertex pairs `(u, v)`, `u < v`, spanning an edge.
    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        let mut closure: Option<BitSet> = None;
        for inc in &self.incidence {
            if inc.contains(u) && inc.contains(v) {
                closure = Some(match closure {
                    None => inc.clone(),
                    Some(c) => c.intersect(inc),
                });
            }
        }
        match closure {
            Some(c) => c.count() == 2,
            None => self.vertices.len() == 2,
        }
    }

    /// `P ∩ {⟨f,x⟩ ≥ 0}` and `P ∩ {⟨f,x⟩ ≤ 0}`; `None` for an empty side.
    pub fn halfspace_split(&self, f: &[Rational]) -> Result<(Option<VPolytope>, Option<VPolytope>)> {
        if f.len() != self.ambient {
            return invalid("split direction has the wrong length");
        }
        let vals: Vec<Rational> = self.vertices.iter().map(|v| dot(f, v)).collect();
        let mut plus: Vec<QPoint> = Vec::new();
        let mut minus: Vec<QPoint> = Vec::new();
        for (v, s) in self.vertices.iter().zip(&vals) {
            if !s.is_negative() {
                plus.push(v.clone());
            }
            if !s.is_positive() {
                minus.push(v.clone());
            }
        }
        for u in 0..self.vertices.len() {
            if !vals[u].is_positive() {
                continue;
            }
            for w in 0..self.vertices.len() {
                if !vals[w].is_negative() || !self.is_edge(u, w) {
                    continue;
                }
                let (a, b) = (&vals[u], &vals[w]);
                let denom = a - b;
                let x: QPoint = self.vertices[u]
                    .iter()
                    .zip(&self.vertices[w])
                    .map(|(pu, pw)| (a * pw - b * pu) / &denom)
                    .collect();
                plus.push(x.clone());
                minus.push(x);
            }
        }
        let build = |pts: Vec<QPoint>| if pts.is_empty() { Ok(None) } else { VPolytope::hull(&pts).map(Some) };
        Ok((build(plus)?, build(minus)?))
    }

    /// Image under the linear map `x ↦ A x` (A given row by row).
    pub fn linear_image(&self, rows: &[Vec<Rational>]) -> Result<VPolytope> {
        if rows.iter().any(|r| r.len() != self.ambient) {
            return invalid("matrix width does not match the ambient dimension");
        }
        let pts: Vec<QPoint> = self
            .vertices
            .iter()
            .map(|v| rows.iter().map(|r| dot(r, v)).collect())
            .collect();
        VPolytope::hull(&pts)
    }

    pub fn to_json(&self, with_facets: bool, with_fvector: bool) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        m.insert("ambient".into(), self.ambient.into());
        m.insert("dim".into(), self.dim.into());
        m.insert(
            "vertices".into(),
            self.vertices
                .iter()
                .map(|v| v.iter().map(rational::to_string).collect::<Vec<_>>())
                .collect::<Vec<_>>()
                .into(),
        );
        if with_facets {
            m.insert(
                "facets".into(),
                serde_json::to_value(&self.hrep).expect("serialisable"),
            );
        }
        if with_fvector {
            m.insert("f_vector".into(), self.f_vector().into());
        }
        serde_json::Value::Object(m)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<VPolytope> {
        let bad = |m: &str| Error::Parse(format!("polytope JSON: {m}"));
        let verts = v
            .get("vertices")
            .and_then(|x| x.as_array())
            .ok_or_else(|| bad("missing vertices"))?;
        let mut pts = Vec::new();
        for row in verts {
            let row = row.as_array().ok_or_else(|| bad("vertex is not an array"))?;
            let p = row
                .iter()
                .map(|e| match e {
                    serde_json::Value::String(s) => rational::parse(s),
                    serde_json::Value::Number(n) => rational::parse(&n.to_string()),
                    _ => Err(bad("coordinate is not a number")),
                })
                .collect::<Result<QPoint>>()?;
            pts.push(p);
        }
        VPolytope::hull(&pts)
    }
}

/// Equations of the affine span of `x0 + span(diffs)`, one per free coordinate.
fn affine_equations(diffs: &[Vec<BigInt>], basis_idx: &[usize], x0: &QPoint, ambient: usize) -> Vec<Equation> {
    let mut rows: Vec<Vec<Rational>> = basis_idx
        .iter()
        .map(|&i| diffs[i].iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    // reduced row echelon form
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ambient {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let piv = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x /= &piv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ambient {
                    let t = &f * &rows[r][j];
                    rows[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut out = Vec::new();
    for free in 0..ambient {
        if pivots.contains(&free) {
            continue;
        }
        let mut a = vec![Rational::zero(); ambient];
        a[free] = rational::int(1);
        for (i, &pc) in pivots.iter().enumerate() {
            a[pc] = -rows[i][free].clone();
        }
        let den = rational::lcm_of_denominators(&a);
        let mut normal: Vec<BigInt> = a.iter().map(|q| (q * &den).to_integer()).collect();
        rational::make_primitive(&mut normal);
        let rhs = int_dot(&normal, x0);
        out.push(Equation { normal, rhs });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    pub(crate) fn poly(v: &[&[i64]]) -> VPolytope {
        VPolytope::hull(&v.iter().map(|r| qpoint_from_ints(r)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn interior_point_is_dropped() {
        let pts = vec![
            qpoint_from_ints(&[0, 0]),
            qpoint_from_ints(&[1, 0]),
            qpoint_from_ints(&[0, 1]),
            vec![ratio(1, 4), ratio(1, 4)],
        ];
        let p = VPolytope::hull(&pts).unwrap();
        assert_eq!(p.num_vertices(), 3);
        assert_eq!(p.dim(), 2);
        for q in &pts {
            assert!(p.contains(q));
        }
    }

    #[test]
    fn single_point_and_segment() {
        let p = poly(&[&[3, 4, 5]]);
        assert_eq!(p.dim(), 0);
        assert_eq!(p.facets().equations.len(), 3);
        let s = poly(&[&[0, 0, 0], &[1, 1, 1], &[2, 2, 2]]);
        assert_eq!(s.dim(), 1);
        assert_eq!(s.num_vertices(), 2);
        assert_eq!(s.num_facets(), 2);
        assert!(s.contains(&qpoint_from_ints(&[1, 1, 1])));
        assert!(!s.contains(&qpoint_from_ints(&[1, 1, 0])));
    }

    #[test]
    fn square_facets_and_embedded_square() {
        let sq = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(sq.num_facets(), 4);
        let emb = poly(&[&[0, 0, 7], &[1, 0, 7], &[0, 1, 7], &[1, 1, 7]]);
        assert_eq!(emb.dim(), 2);
        assert_eq!(emb.facets().equations.len(), 1);
        assert_eq!(emb.num_facets(), 4);
    }

    #[test]
    fn minkowski_examples() {
        let a = poly(&[&[0, 0], &[1, 0]]);
        let b = poly(&[&[0, 0], &[0, 1]]);
        assert_eq!(a.minkowski(&b).unwrap(), poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]));
        let t = poly(&[&[5, -2]]);
        let tri = poly(&[&[0, 0], &[2, 0], &[0, 3]]);
        assert_eq!(tri.minkowski(&t).unwrap(), poly(&[&[5, -2], &[7, -2], &[5, 1]]));
        assert!(a.minkowski(&poly(&[&[0, 0, 0]])).is_err());
    }

    #[test]
    fn split_segment() {
        let s = poly(&[&[-1], &[1]]);
        let (p, m) = s.halfspace_split(&qpoint_from_ints(&[1])).unwrap();
        assert_eq!(p.unwrap(), poly(&[&[0], &[1]]));
        assert_eq!(m.unwrap(), poly(&[&[-1], &[0]]));
        let pos = poly(&[&[1], &[2]]);
        let (p, m) = pos.halfspace_split(&qpoint_from_ints(&[1])).unwrap();
        assert_eq!(p.unwrap(), pos);
        assert!(m.is_none());
        let touch = poly(&[&[0], &[2]]);
        let (_, m) = touch.halfspace_split(&qpoint_from_ints(&[1])).unwrap();
        assert_eq!(m.unwrap(), poly(&[&[0]]));
    }

    #[test]
    fn split_square_diagonal() {
        let sq = poly(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2]]);
        let f = qpoint_from_ints(&[1, -1]);
        let (p, m) = sq.halfspace_split(&f).unwrap();
        assert_eq!(p.unwrap(), poly(&[&[0, 0], &[2, 0], &[2, 2]]));
        assert_eq!(m.unwrap(), poly(&[&[0, 0], &[0, 2], &[2, 2]]));
        let g = qpoint_from_ints(&[1, 0]);
        let shifted = sq.translate(&qpoint_from_ints(&[-1, 0]));
        let (p, _) = shifted.halfspace_split(&g).unwrap();
        assert_eq!(p.unwrap(), poly(&[&[0, 0], &[1, 0], &[0, 2], &[1, 2]]));
    }

    #[test]
    fn json_round_trip() {
        let p = VPolytope::hull(&[vec![ratio(1, 2), ratio(0, 1)], qpoint_from_ints(&[0, 1]), qpoint_from_ints(&[0, 0])]).unwrap();
        let j = p.to_json(true, true);
        assert_eq!(VPolytope::from_json(&j).unwrap(), p);
        assert_eq!(j["vertices"][2][0], "1/2");
    }

    #[test]
    fn rehull_is_idempotent() {
        let p = poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1], &[1, 1, 0]]);
        let q = VPolytope::hull(p.vertices()).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.facets(), q.facets());
    }
}
