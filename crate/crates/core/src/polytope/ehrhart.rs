//! Lattice-point counting in dilates and Ehrhart interpolation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::dd;
use super::lattice::{LatticeChart, SubLattice};
use super::VPolytope;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Which dilates feed the interpolation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EhrhartMethod {
    /// Counts of `kP` for `k = 1..=d`, checked again at `k = d+1`.
    Dilates,
    /// Counts at `k = 1, 2, …` together with interior counts, which give
    /// the values at `-1, -2, …` by reciprocity. Roughly halves the largest
    /// dilate needed.
    Reciprocal,
    /// `Dilates` up to dimension 9, `Reciprocal` above.
    #[default]
    Auto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EhrhartPolynomial {
    /// `c_0, c_1, …, c_d`.
    #[serde(with = "rational::serde_rational_vec")]
    coefficients: Vec<Rational>,
}

impl EhrhartPolynomial {
    pub fn from_coefficients(coefficients: Vec<Rational>) -> Self {
        EhrhartPolynomial { coefficients }
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, k: i64) -> Rational {
        let x = rational::int(k);
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * &x + c)
    }

    pub fn leading(&self) -> &Rational {
        self.coefficients.last().expect("nonempty")
    }

    /// `d!` times the leading coefficient.
    pub fn normalized_volume(&self) -> Rational {
        let fact: BigInt = (1..=self.degree() as u64).map(BigInt::from).product();
        self.leading() * Rational::from_integer(fact)
    }

    /// Lagrange interpolation through `(x_i, y_i)`; degree `len - 1`.
    pub fn interpolate(points: &[(i64, Rational)]) -> EhrhartPolynomial {
        let n = points.len();
        let mut coeffs = vec![Rational::zero(); n];
        for (i, (xi, yi)) in points.iter().enumerate() {
            // basis polynomial ∏_{j≠i} (x - x_j) / (x_i - x_j)
            let mut basis = vec![Rational::one()];
            let mut denom = Rational::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut next = vec![Rational::zero(); basis.len() + 1];
                for (t, b) in basis.iter().enumerate() {
                    next[t + 1] += b;
                    next[t] -= b * rational::int(*xj);
                }
                basis = next;
                denom *= rational::int(xi - xj);
            }
            let f = yi / denom;
            for (c, b) in coeffs.iter_mut().zip(&basis) {
                *c += b * &f;
            }
        }
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        EhrhartPolynomial { coefficients: coeffs }
    }
}

impl fmt::Display for EhrhartPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() && !(i == 0 && first) {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = rational::to_string(&c.abs());
            match i {
                0 => f.write_str(&a)?,
                _ => {
                    if !c.abs().is_one() {
                        write!(f, "{a}*")?;
                    }
                    f.write_str("k")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

struct Constraint {
    coef: Vec<i64>,
    rhs: i64,
    strict: bool,
}

/// Bound propagation over the coordinates of a lattice chart: level `i`
/// fixes `y_i` using facets of the projection onto `y_0..=y_i`.
pub(crate) struct Enumerator {
    dim: usize,
    levels: Vec<Vec<Constraint>>,
    coord_bound: i64,
}

impl Enumerator {
    pub(crate) fn new(chart: &LatticeChart, interior: bool) -> Result<Enumerator> {
        let d = chart.dim();
        let pts = &chart.points;
        let to_i64 = |v: &BigInt| v.to_i64().ok_or(Error::Overflow("lattice point enumeration"));
        let mut coord_bound = 0i64;
        for p in pts {
            for x in p {
                coord_bound = coord_bound.max(to_i64(&x.abs())?);
            }
        }
        let mut levels: Vec<Vec<Constraint>> = (0..d).map(|_| Vec::new()).collect();
        for i in 0..d {
            let mut proj: Vec<Vec<BigInt>> = pts.iter().map(|p| p[..=i].to_vec()).collect();
            proj.sort();
            proj.dedup();
            let facets = if i + 1 == d {
                chart.facets.clone()
            } else {
                dd::hull_full_dim(&proj, i + 1).facets
            };
            for f in facets {
                if f[i + 1].is_zero() {
                    continue;
                }
                levels[i].push(Constraint {
                    coef: f[1..].iter().map(&to_i64).collect::<Result<_>>()?,
                    rhs: to_i64(&-&f[0])?,
                    strict: interior && i + 1 == d,
                });
            }
        }
        if interior {
            // facets of P supported on a proper prefix of coordinates
            for f in &chart.facets {
                let last = (1..=d).rev().find(|&j| !f[j].is_zero()).expect("nonzero normal") - 1;
                if last + 1 == d {
                    continue;
                }
                levels[last].push(Constraint {
                    coef: f[1..=last + 1].iter().map(&to_i64).collect::<Result<_>>()?,
                    rhs: to_i64(&-&f[0])?,
                    strict: true,
                });
            }
        }
        Ok(Enumerator {
            dim: d,
            levels,
            coord_bound,
        })
    }

    fn check_range(&self, k: i64) -> Result<()> {
        let limit: i128 = 1 << 62;
        let yb = self.coord_bound as i128 * k as i128;
        for lvl in &self.levels {
            for c in lvl {
                let s: i128 = c.coef.iter().map(|a| (*a as i128).abs()).sum::<i128>() * yb
                    + (c.rhs as i128 * k as i128).abs()
                    + 2;
                if s >= limit {
                    return Err(Error::Overflow("lattice point enumeration"));
                }
            }
        }
        Ok(())
    }

    fn bounds(&self, level: usize, y: &[i64], k: i64) -> Option<(i64, i64)> {
        let mut lo = i64::MIN;
        let mut hi = i64::MAX;
        for c in &self.levels[level] {
            let a = c.coef[level];
            let s: i64 = c.coef[..level].iter().zip(y).map(|(a, b)| a * b).sum();
            // a·y_level ≥ k·rhs - s (+1 when strict)
            let t = k * c.rhs - s + c.strict as i64;
            if a > 0 {
                lo = lo.max(div_ceil(t, a));
            } else {
                hi = hi.min(div_floor(-t, -a));
            }
            if lo > hi {
                return None;
            }
        }
        Some((lo, hi))
    }

    pub(crate) fn count(&self, k: i64) -> Result<u128> {
        if self.dim == 0 {
            return Ok(1);
        }
        self.check_range(k)?;
        let mut y = vec![0i64; self.dim];
        Ok(self.count_rec(0, &mut y, k))
    }

    fn count_rec(&self, level: usize, y: &mut [i64], k: i64) -> u128 {
        let Some((lo, hi)) = self.bounds(level, &y[..level], k) else {
            return 0;
        };
        if level + 1 == self.dim {
            return (hi - lo + 1) as u128;
        }
        let mut total = 0;
        for v in lo..=hi {
            y[level] = v;
            total += self.count_rec(level + 1, y, k);
        }
        total
    }

    pub(crate) fn points(&self, k: i64) -> Result<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        if self.dim == 0 {
            out.push(Vec::new());
            return Ok(out);
        }
        self.check_range(k)?;
        let mut y = vec![0i64; self.dim];
        self.points_rec(0, &mut y, k, &mut out);
        Ok(out)
    }

    fn points_rec(&self, level: usize, y: &mut [i64], k: i64, out: &mut Vec<Vec<i64>>) {
        let Some((lo, hi)) = self.bounds(level, &y[..level], k) else {
            return;
        };
        for v in lo..=hi {
            y[level] = v;
            if level + 1 == self.dim {
                out.push(y.to_vec());
            } else {
                self.points_rec(level + 1, y, k, out);
            }
        }
    }
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}

/// Number of points of `kP` in the lattice.
pub fn count_lattice_points(p: &VPolytope, lattice: &SubLattice, k: u32) -> Result<u128> {
    if k == 0 {
        return Ok(1);
    }
    let chart = LatticeChart::new(p, lattice)?;
    Enumerator::new(&chart, false)?.count(k as i64)
}

/// Number of points of `kP` in the lattice and in the relative interior.
pub fn count_interior_points(p: &VPolytope, lattice: &SubLattice, k: u32) -> Result<u128> {
    let chart = LatticeChart::new(p, lattice)?;
    if k == 0 {
        return Ok((chart.dim() == 0) as u128);
    }
    Enumerator::new(&chart, true)?.count(k as i64)
}

/// The points of `kP` in the lattice, in ambient coordinates.
pub fn lattice_points(p: &VPolytope, lattice: &SubLattice, k: u32) -> Result<Vec<Vec<BigInt>>> {
    let chart = LatticeChart::new(p, lattice)?;
    if k == 0 {
        return Ok(vec![vec![BigInt::zero(); p.ambient()]]);
    }
    let pts = Enumerator::new(&chart, false)?.points(k as i64)?;
    Ok(pts.iter().map(|y| chart.to_ambient(y, k as i64)).collect())
}

pub fn ehrhart(p: &VPolytope, lattice: &SubLattice, method: EhrhartMethod) -> Result<EhrhartPolynomial> {
    let chart = LatticeChart::new(p, lattice)?;
    let d = chart.dim();
    if d == 0 {
        return Ok(EhrhartPolynomial::from_coefficients(vec![Rational::one()]));
    }
    let method = match method {
        EhrhartMethod::Auto if d <= 9 => EhrhartMethod::Dilates,
        EhrhartMethod::Auto => EhrhartMethod::Reciprocal,
        m => m,
    };
    let closed = Enumerator::new(&chart, false)?;
    let count = |k: i64| -> Result<Rational> {
        Ok(Rational::from_integer(BigInt::from(closed.count(k)?)))
    };
    let mut nodes: Vec<(i64, Rational)> = vec![(0, Rational::one())];
    let check = match method {
        EhrhartMethod::Dilates => {
            for k in 1..=d as i64 {
                nodes.push((k, count(k)?));
            }
            (d as i64 + 1, count(d as i64 + 1)?)
        }
        _ => {
            let open = Enumerator::new(&chart, true)?;
            let sign = if d % 2 == 0 { Rational::one() } else { -Rational::one() };
            let interior = |k: i64| -> Result<Rational> {
                Ok(&sign * Rational::from_integer(BigInt::from(open.count(k)?)))
            };
            // d+1 nodes beyond k = 0, alternating sides, plus one check node.
            let mut k = 1i64;
            let mut extra = Vec::new();
            while nodes.len() + extra.len() < d + 2 {
                extra.push((k, count(k)?));
                if nodes.len() + extra.len() < d + 2 {
                    extra.push((-k, interior(k)?));
                }
                k += 1;
            }
            let last = extra.pop().expect("at least one node");
            nodes.extend(extra);
            last
        }
    };
    let poly = EhrhartPolynomial::interpolate(&nodes);
    if poly.eval(check.0) != check.1 || poly.degree() != d {
        return Err(Error::Internal(format!(
            "Ehrhart interpolant disagrees with the count at k = {}",
            check.0
        )));
    }
    Ok(poly)
}
