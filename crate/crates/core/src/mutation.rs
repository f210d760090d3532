//! Tropical maps `x ↦ x - min_{v ∈ F} ⟨x, v⟩ w`, their action on polytopes,
//! and the chain of mutations from `P^K_σ` to the Gelfand–Tsetlin polytope.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::matchfield::{MatchingField, PluckerIndex};
use crate::mfpolytope::{ambient_dim, flag_polytope, gt_polytope, FlagContext};
use crate::perm::Permutation;
use crate::polytope::{dot, ehrhart, EhrhartMethod, EhrhartPolynomial, QPoint, VPolytope};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalMap {
    w: Vec<BigInt>,
    factor: Vec<Vec<BigInt>>,
}

impl TropicalMap {
    /// `w` must be primitive and orthogonal to every vertex of the factor.
    pub fn new(w: Vec<BigInt>, factor: Vec<Vec<BigInt>>) -> Result<TropicalMap> {
        if factor.is_empty() {
            return invalid("the factor polytope has no vertices");
        }
        if factor.iter().any(|v| v.len() != w.len()) {
            return invalid("factor vertices and w have different lengths");
        }
        let g = w.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
        if !g.is_one() {
            return invalid("w must be a primitive integer vector");
        }
        for v in &factor {
            let s: BigInt = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            if !s.is_zero() {
                return invalid("a factor vertex is not orthogonal to w");
            }
        }
        Ok(TropicalMap { w, factor })
    }

    /// The map with factor `conv{0, f}`.
    pub fn segment(w: Vec<BigInt>, f: Vec<BigInt>) -> Result<TropicalMap> {
        let zero = vec![BigInt::zero(); f.len()];
        TropicalMap::new(w, vec![zero, f])
    }

    pub fn from_ints(w: &[i64], f: &[i64]) -> Result<TropicalMap> {
        TropicalMap::segment(w.iter().map(|&x| BigInt::from(x)).collect(), f.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn w(&self) -> &[BigInt] {
        &self.w
    }

    pub fn factor(&self) -> &[Vec<BigInt>] {
        &self.factor
    }

    /// The same factor with `-w`, which undoes this map.
    pub fn inverse(&self) -> TropicalMap {
        TropicalMap {
            w: self.w.iter().map(|x| -x).collect(),
            factor: self.factor.clone(),
        }
    }

    /// `f` when the factor is a segment `conv{0, f}`.
    pub fn segment_direction(&self) -> Result<&[BigInt]> {
        let mut nonzero = self.factor.iter().filter(|v| v.iter().any(|x| !x.is_zero()));
        let has_zero = self.factor.iter().any(|v| v.iter().all(|x| x.is_zero()));
        match (nonzero.next(), nonzero.next(), has_zero, self.factor.len()) {
            (Some(f), None, true, 2) => Ok(f),
            (None, None, true, 1) => Ok(&self.factor[0]),
            _ => Err(Error::UnsupportedFactor(format!(
                "factor with {} vertices is not a segment from the origin",
                self.factor.len()
            ))),
        }
    }

    pub fn apply_point(&self, x: &[Rational]) -> QPoint {
        let m = self
            .factor
            .iter()
            .map(|v| int_pair(v, x))
            .min()
            .expect("factor is nonempty");
        x.iter()
            .zip(&self.w)
            .map(|(xi, wi)| xi - &m * Rational::from_integer(wi.clone()))
            .collect()
    }

    /// Image of `P` and whether it is a combinatorial mutation, i.e. whether
    /// the piecewise-linear image is already convex.
    pub fn apply_polytope(&self, p: &VPolytope) -> Result<(VPolytope, bool)> {
        let f: QPoint = self.segment_direction()?.iter().map(|x| Rational::from_integer(x.clone())).collect();
        if f.len() != p.ambient() {
            return invalid("map and polytope live in different spaces");
        }
        let (plus, minus) = p.halfspace_split(&f)?;
        let minus_img = match &minus {
            Some(m) => Some(VPolytope::hull(&m.vertices().iter().map(|v| self.apply_point(v)).collect::<Vec<_>>())?),
            None => None,
        };
        let mut pts: Vec<QPoint> = Vec::new();
        if let Some(pl) = &plus {
            pts.extend(pl.vertices().iter().cloned());
        }
        if let Some(mi) = &minus_img {
            pts.extend(mi.vertices().iter().cloned());
        }
        let image = VPolytope::hull(&pts)?;
        let (ip, im) = image.halfspace_split(&f)?;
        let inside = |part: &Option<VPolytope>, piece: &Option<VPolytope>| match (part, piece) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a.vertices().iter().all(|v| b.contains(v)),
        };
        let convex = inside(&ip, &plus) && inside(&im, &minus_img);
        Ok((image, convex))
    }

    pub fn to_json(&self) -> Value {
        let ints = |v: &[BigInt]| -> Vec<String> { v.iter().map(|x| x.to_string()).collect() };
        json!({
            "w": ints(&self.w),
            "factor": self.factor.iter().map(|v| ints(v)).collect::<Vec<_>>(),
        })
    }
}

fn int_pair(v: &[BigInt], x: &[Rational]) -> Rational {
    v.iter()
        .zip(x)
        .filter(|(a, _)| !a.is_zero())
        .map(|(a, b)| b * Rational::from_integer(a.clone()))
        .sum()
}

fn row_major(n: usize, entries: &[(usize, usize, i64)]) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); ambient_dim(n)];
    for &(i, j, x) in entries {
        if i < n {
            v[(i - 1) * n + (j - 1)] += x;
        }
    }
    v
}

/// `λ = σ⁻¹(ℓ)` and `μ = σ⁻¹(ℓ+1)`.
pub fn lambda_mu(sigma: &Permutation, ell: usize) -> Result<(usize, usize)> {
    let n = sigma.len();
    if ell == 0 || ell >= n {
        return invalid(format!("ℓ = {ell} outside 1..={}", n.saturating_sub(1)));
    }
    Ok((sigma.position(ell), sigma.position(ell + 1)))
}

/// The map exchanging `B^σ` and `B^τ`, `τ = (ℓ ℓ+1) σ`: `w` is `+1` at
/// `(1,λ), (2,μ)` and `-1` at `(1,μ), (2,λ)`; `f` is `1` in row 1 where
/// `σ(j) > ℓ+1` and `-1` in row 2 where `σ(j) ≥ ℓ`. For `n = 2` only the
/// first row exists.
pub fn sigma_ell_map(sigma: &Permutation, ell: usize) -> Result<TropicalMap> {
    let n = sigma.len();
    let (lambda, mu) = lambda_mu(sigma, ell)?;
    if lambda >= mu {
        return invalid(format!("σ⁻¹(ℓ) = {lambda} is not smaller than σ⁻¹(ℓ+1) = {mu}"));
    }
    let w = row_major(n, &[(1, lambda, 1), (2, mu, 1), (1, mu, -1), (2, lambda, -1)]);
    let mut f = Vec::new();
    for j in 1..=n {
        if sigma.apply(j) > ell + 1 {
            f.push((1, j, 1));
        }
        if sigma.apply(j) >= ell {
            f.push((2, j, -1));
        }
    }
    let f = row_major(n, &f);
    debug_assert!(f.iter().zip(&w).map(|(a, b)| a * b).sum::<BigInt>().is_zero());
    TropicalMap::segment(w, f)
}

/// Predicted `⟨f, v_I⟩` for the vertex of `B^σ` indexed by `I`.
pub fn predicted_pairing(sigma: &Permutation, ell: usize, idx: &PluckerIndex) -> Result<i32> {
    let (lambda, mu) = lambda_mu(sigma, ell)?;
    let e = idx.elements();
    if e.len() == 1 {
        return Ok((sigma.apply(e[0]) > ell + 1) as i32);
    }
    let (a, b) = (e[0], e[1]);
    if (a, b) == (lambda.min(mu), lambda.max(mu)) {
        return Ok(-1);
    }
    let hi = sigma.apply(a).max(sigma.apply(b));
    let lo = sigma.apply(a).min(sigma.apply(b));
    Ok((hi > ell + 1 && lo < ell) as i32)
}

fn pairing(map_f: &[BigInt], v: &[i64]) -> i64 {
    map_f
        .iter()
        .zip(v)
        .map(|(a, &b)| if b == 0 { 0 } else { i64::try_from(a).expect("small") * b })
        .sum()
}

/// Checks the pairing classification and that the map sends `v_I^σ` to
/// `v_I^τ` for every index of the given sizes. Returns the first failure.
pub fn check_vertex_correspondence(sigma: &Permutation, ell: usize, ks: &[usize]) -> Result<Option<String>> {
    let tau = sigma.swap_values(ell)?;
    let map = sigma_ell_map(sigma, ell)?;
    let f = map.segment_direction()?.to_vec();
    let fs = MatchingField::bsigma(sigma, ks)?;
    let ft = MatchingField::bsigma(&tau, ks)?;
    for &k in ks {
        for idx in fs.indices(k) {
            let v = fs.tuple_vector(idx)?;
            let s = pairing(&f, &v);
            let predicted = predicted_pairing(sigma, ell, idx)? as i64;
            if s != predicted || !(-1..=1).contains(&s) {
                return Ok(Some(format!("σ={sigma} ℓ={ell} {idx}: pairing {s}, predicted {predicted}")));
            }
            let image = map.apply_point(&crate::polytope::qpoint_from_ints(&v));
            let target = crate::polytope::qpoint_from_ints(&ft.tuple_vector(idx)?);
            if image != target {
                return Ok(Some(format!("σ={sigma} ℓ={ell} {idx}: image is not the vertex of τ={tau}")));
            }
        }
    }
    Ok(None)
}

/// Column in each row for a vertex `v_I` of `B^σ`.
fn rows_of(field: &MatchingField, idx: &PluckerIndex) -> Vec<usize> {
    field.columns(idx).expect("index in field")
}

fn vector_of(n: usize, cols: &[usize]) -> Vec<i64> {
    let mut v = vec![0; ambient_dim(n)];
    for (a, &j) in cols.iter().enumerate() {
        v[a * n + j - 1] += 1;
    }
    v
}

/// The explicit exchange `v_I + v_J = u_1 + u_2` for a vertex `v_I` on the
/// negative side and `v_J` on the positive side, both of `B^σ`.
pub fn exchange_witness(
    sigma: &Permutation,
    ell: usize,
    i_cols: &[usize],
    j_cols: &[usize],
) -> Result<(Vec<usize>, Vec<usize>)> {
    let (lambda, mu) = lambda_mu(sigma, ell)?;
    let (k, h) = (i_cols.len(), j_cols.len());
    if k < 2 || i_cols[0] != mu || i_cols[1] != lambda {
        return invalid("first vertex is not on the negative side");
    }
    let tail_i = &i_cols[2..];
    let j1 = j_cols[0];
    let with = |head: &[usize], tail: &[usize]| -> Vec<usize> { head.iter().chain(tail).copied().collect() };
    Ok(match h {
        1 => (with(&[j1, lambda], tail_i), vec![mu]),
        2 => (with(&[j1, lambda], tail_i), vec![mu, j_cols[1]]),
        _ => {
            let j2 = j_cols[1];
            let tail_j = &j_cols[2..];
            if k == 2 {
                (vec![mu, j2], with(&[j1, lambda], tail_j))
            } else if j2 < mu {
                (with(&[mu, j2], tail_i), with(&[j1, lambda], tail_j))
            } else {
                (with(&[j1, lambda], tail_i), with(&[mu, j2], tail_j))
            }
        }
    })
}

/// Outcome of checking the exchange property on one `(σ, ℓ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExchangeReport {
    pub pairs: usize,
    /// Pairs where the explicit witness was not a valid pair of vertices in `f^⊥`.
    pub witness_failures: Vec<String>,
    /// Pairs for which no exchange exists at all among vertices in `f^⊥`.
    pub search_failures: Vec<String>,
}

/// For all `v_I ∈ P^k` with `⟨f,v_I⟩ = -1` and `v_J ∈ P^h` with `⟨f,v_J⟩ = 1`
/// (`k, h ∈ K`), checks the explicit witness and, independently, searches
/// all vertex pairs of `P^k × P^h` in `f^⊥` with the same sum.
/// Index, its columns, tuple vector and pairing with `f`.
type Vertex = (PluckerIndex, Vec<usize>, Vec<i64>, i64);

pub fn check_exchange(sigma: &Permutation, ell: usize, ks: &[usize]) -> Result<ExchangeReport> {
    let n = sigma.len();
    let map = sigma_ell_map(sigma, ell)?;
    let f = map.segment_direction()?.to_vec();
    let field = MatchingField::bsigma(sigma, ks)?;
    let mut by_k: HashMap<usize, Vec<Vertex>> = HashMap::new();
    for &k in ks {
        for idx in field.indices(k) {
            let cols = rows_of(&field, idx);
            let v = vector_of(n, &cols);
            let s = pairing(&f, &v);
            by_k.entry(k).or_default().push((idx.clone(), cols, v, s));
        }
    }
    let mut report = ExchangeReport::default();
    for &k in ks {
        for &h in ks {
            let vk = &by_k[&k];
            let vh = &by_k[&h];
            let zero_k: Vec<&Vec<i64>> = vk.iter().filter(|x| x.3 == 0).map(|x| &x.2).collect();
            let zero_h: Vec<&Vec<i64>> = vh.iter().filter(|x| x.3 == 0).map(|x| &x.2).collect();
            for (ii, icols, iv, is) in vk {
                if *is != -1 {
                    continue;
                }
                for (jj, jcols, jv, js) in vh {
                    if *js != 1 {
                        continue;
                    }
                    report.pairs += 1;
                    let sum: Vec<i64> = iv.iter().zip(jv).map(|(a, b)| a + b).collect();
                    let (u1, u2) = exchange_witness(sigma, ell, icols, jcols)?;
                    let (u1v, u2v) = (vector_of(n, &u1), vector_of(n, &u2));
                    let ok = zero_k.contains(&&u1v)
                        && zero_h.contains(&&u2v)
                        && u1v.iter().zip(&u2v).map(|(a, b)| a + b).eq(sum.iter().copied());
                    if !ok {
                        report.witness_failures.push(format!("σ={sigma} ℓ={ell} {ii} + {jj}"));
                    }
                    let found = zero_k.iter().any(|a| {
                        let rest: Vec<i64> = sum.iter().zip(a.iter()).map(|(s, x)| s - x).collect();
                        zero_h.iter().any(|b| **b == rest)
                    });
                    if !found {
                        report.search_failures.push(format!("σ={sigma} ℓ={ell} {ii} + {jj}"));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// One step of the chain towards `w0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationStep {
    pub sigma: Permutation,
    pub ell: usize,
    pub lambda: usize,
    pub mu: usize,
    pub tau: Permutation,
    pub map: TropicalMap,
}

/// `μ = max{i : σ(i) > n+1-i}`, `ℓ + 1 = σ(μ)`, `λ = σ⁻¹(ℓ)`.
pub fn next_step(sigma: &Permutation) -> Result<MutationStep> {
    let n = sigma.len();
    if sigma.is_longest() {
        return Err(Error::NoStep(format!("{sigma} is already the longest permutation")));
    }
    if !sigma.is_mutation_admissible() {
        return invalid(format!("{sigma} contains a forbidden pattern"));
    }
    let mu = (1..=n)
        .filter(|&i| sigma.apply(i) > n + 1 - i)
        .max()
        .ok_or_else(|| Error::Internal(format!("no position with σ(i) > n+1-i in {sigma}")))?;
    let ell = sigma.apply(mu) - 1;
    let lambda = sigma.position(ell);
    if lambda >= mu {
        return Err(Error::Internal(format!("λ = {lambda} ≥ μ = {mu} for σ = {sigma}")));
    }
    let tau = sigma.swap_values(ell)?;
    if !tau.is_mutation_admissible() {
        return Err(Error::Internal(format!("τ = {tau} gained a forbidden pattern")));
    }
    Ok(MutationStep {
        map: sigma_ell_map(sigma, ell)?,
        sigma: sigma.clone(),
        ell,
        lambda,
        mu,
        tau,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VerifyMode {
    /// Vertex sets, convexity certificate, f-vectors and Ehrhart polynomials.
    #[default]
    Full,
    /// Vertex sets and the convexity certificate only.
    Fast,
}

#[derive(Clone, Debug)]
pub struct StepReport {
    pub step: MutationStep,
    pub f_vector_before: Vec<usize>,
    pub f_vector_after: Vec<usize>,
    pub is_mutation: bool,
    pub ehrhart_preserved: Option<bool>,
}

impl StepReport {
    pub fn to_json(&self) -> Value {
        let ints = |v: &[BigInt]| -> Vec<String> { v.iter().map(|x| x.to_string()).collect() };
        let f = self.step.map.segment_direction().map(ints).unwrap_or_default();
        json!({
            "sigma": self.step.sigma.one_line(),
            "ell": self.step.ell,
            "lambda": self.step.lambda,
            "mu": self.step.mu,
            "tau": self.step.tau.one_line(),
            "w": ints(self.step.map.w()),
            "f": f,
            "f_vector_before": self.f_vector_before,
            "f_vector_after": self.f_vector_after,
            "is_mutation": self.is_mutation,
            "ehrhart_preserved": self.ehrhart_preserved,
        })
    }
}

#[derive(Clone, Debug)]
pub struct MutationChain {
    pub start: Permutation,
    pub cardinalities: Vec<usize>,
    pub steps: Vec<StepReport>,
    pub ends_at_gt: bool,
}

impl MutationChain {
    pub fn to_json(&self) -> Value {
        json!({
            "sigma": self.start.one_line(),
            "K": self.cardinalities,
            "steps": self.steps.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
            "ends_at_gt": self.ends_at_gt,
        })
    }
}

type Shared<T> = Arc<Mutex<HashMap<(Permutation, Vec<usize>), T>>>;

/// Memoises flag polytopes and their Ehrhart polynomials by `(σ, K)`, so
/// chains that meet reuse each other's work.
#[derive(Clone, Default)]
pub struct ChainCache {
    contexts: Shared<Arc<FlagContext>>,
    ehrhart: Shared<EhrhartPolynomial>,
}

impl ChainCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn context(&self, sigma: &Permutation, ks: &[usize]) -> Result<Arc<FlagContext>> {
        let key = (sigma.clone(), ks.to_vec());
        if let Some(c) = self.contexts.lock().expect("poisoned").get(&key) {
            return Ok(c.clone());
        }
        let ctx = Arc::new(flag_polytope(&MatchingField::bsigma(sigma, ks)?, ks)?);
        self.contexts.lock().expect("poisoned").insert(key, ctx.clone());
        Ok(ctx)
    }

    pub fn ehrhart(&self, sigma: &Permutation, ks: &[usize]) -> Result<EhrhartPolynomial> {
        let key = (sigma.clone(), ks.to_vec());
        if let Some(e) = self.ehrhart.lock().expect("poisoned").get(&key) {
            return Ok(e.clone());
        }
        let ctx = self.context(sigma, ks)?;
        let e = ehrhart(&ctx.polytope, &ctx.lattice, EhrhartMethod::Auto)?;
        self.ehrhart.lock().expect("poisoned").insert(key, e.clone());
        Ok(e)
    }
}

/// Facets as sets of vertex indices, independent of how the hull was built.
fn facet_sets(p: &VPolytope) -> Vec<Vec<usize>> {
    let mut v: Vec<Vec<usize>> = (0..p.num_facets()).map(|i| p.facet_vertices(i)).collect();
    v.sort();
    v
}

/// Follows `next_step` from `σ` to `w0`, certifying every step.
pub fn mutation_sequence_to_gt(
    sigma: &Permutation,
    ks: &[usize],
    mode: VerifyMode,
    cache: &ChainCache,
) -> Result<MutationChain> {
    let n = sigma.len();
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if !sigma.is_mutation_admissible() {
        return invalid(format!("{sigma} contains a forbidden pattern"));
    }
    let mut steps = Vec::new();
    let mut cur = sigma.clone();
    while !cur.is_longest() {
        let step = next_step(&cur)?;
        let src = cache.context(&cur, &ks)?;
        let (image, is_mutation) = step.map.apply_polytope(&src.polytope)?;
        let dst = cache.context(&step.tau, &ks)?;
        let context = |what: &str| {
            Error::Verification(format!(
                "step σ={} ℓ={} τ={} (K={ks:?}): {what}",
                step.sigma, step.ell, step.tau
            ))
        };
        if !is_mutation {
            return Err(context("image is not convex"));
        }
        if image != dst.polytope {
            return Err(context("image differs from the polytope of τ"));
        }
        let mut ehrhart_preserved = None;
        let (fb, fa) = (src.polytope.f_vector(), dst.polytope.f_vector());
        if mode == VerifyMode::Full {
            if facet_sets(&image) != facet_sets(&dst.polytope) {
                return Err(context("facets of the image differ from those of τ"));
            }
            let (a, b) = rayon::join(|| cache.ehrhart(&cur, &ks), || cache.ehrhart(&step.tau, &ks));
            let same = a? == b?;
            if !same {
                return Err(context("Ehrhart polynomial changed"));
            }
            ehrhart_preserved = Some(true);
        }
        cur = step.tau.clone();
        steps.push(StepReport {
            step,
            f_vector_before: fb,
            f_vector_after: fa,
            is_mutation,
            ehrhart_preserved,
        });
    }
    let last = cache.context(&cur, &ks)?;
    let gt = gt_polytope(&ks, n)?;
    let ends_at_gt = last.polytope == gt.polytope;
    if !ends_at_gt {
        return Err(Error::Verification("final polytope is not the Gelfand–Tsetlin polytope".into()));
    }
    Ok(MutationChain {
        start: sigma.clone(),
        cardinalities: ks,
        steps,
        ends_at_gt,
    })
}

/// Parses a matrix given as rows of integers (JSON), padded with zero rows
/// to the `(n-1) × n` ambient space.
pub fn matrix_from_json(v: &Value, n: usize) -> Result<Vec<BigInt>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
    if rows.len() > n - 1 {
        return invalid(format!("matrix has {} rows, at most {} allowed", rows.len(), n - 1));
    }
    let mut out = vec![BigInt::zero(); ambient_dim(n)];
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().ok_or_else(|| Error::Parse("matrix row must be an array".into()))?;
        if r.len() != n {
            return invalid(format!("matrix row {} has length {}, expected {n}", i + 1, r.len()));
        }
        for (j, e) in r.iter().enumerate() {
            let q = match e {
                Value::Number(x) => rational::parse(&x.to_string())?,
                Value::String(s) => rational::parse(s)?,
                _ => return Err(Error::Parse("matrix entry must be a number".into())),
            };
            if !q.is_integer() {
                return invalid("tropical map entries must be integers");
            }
            out[i * n + j] = q.to_integer();
        }
    }
    Ok(out)
}

/// Applies the maps in order, returning every intermediate polytope with
/// its convexity certificate.
pub fn replay(p: &VPolytope, maps: &[TropicalMap]) -> Result<Vec<(VPolytope, bool)>> {
    let mut out: Vec<(VPolytope, bool)> = Vec::with_capacity(maps.len());
    for m in maps {
        let cur = out.last().map(|x| &x.0).unwrap_or(p);
        out.push(m.apply_polytope(cur)?);
    }
    Ok(out)
}

/// Reads `[{"w": matrix, "f": matrix}, ...]` with matrices given as rows.
pub fn maps_from_json(v: &Value, n: usize) -> Result<Vec<TropicalMap>> {
    let steps = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected an array of {w, f} objects".into()))?;
    steps
        .iter()
        .map(|s| {
            let get = |key: &str| {
                s.get(key)
                    .ok_or_else(|| Error::Parse(format!("map is missing \"{key}\"")))
                    .and_then(|m| matrix_from_json(m, n))
            };
            TropicalMap::segment(get("w")?, get("f")?)
        })
        .collect()
}

/// Sign of `⟨f, x⟩`, for reporting.
pub fn side(map: &TropicalMap, x: &[Rational]) -> Result<i32> {
    let f: QPoint = map.segment_direction()?.iter().map(|a| Rational::from_integer(a.clone())).collect();
    let s = dot(&f, x);
    Ok(if s.is_positive() { 1 } else if s.is_negative() { -1 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::qpoint_from_ints;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn next_step_examples() {
        let s = next_step(&p("12")).unwrap();
        assert_eq!((s.mu, s.ell, s.lambda), (2, 1, 1));
        assert_eq!(s.tau, p("21"));
        let s = next_step(&p("216543")).unwrap();
        assert_eq!((s.mu, s.ell, s.lambda), (6, 2, 1));
        assert!(matches!(next_step(&p("4321")), Err(Error::NoStep(_))));
        assert!(next_step(&p("624351")).is_err());
    }

    #[test]
    fn map_is_orthogonal_and_inverts() {
        for sigma in Permutation::all(4) {
            for ell in 1..4 {
                let Ok(m) = sigma_ell_map(&sigma, ell) else { continue };
                let f = m.segment_direction().unwrap();
                assert!(f.iter().zip(m.w()).map(|(a, b)| a * b).sum::<BigInt>().is_zero());
                let x: QPoint = (0..12).map(|i| rational::ratio(i * 7 % 5 - 2, 3)).collect();
                assert_eq!(m.inverse().apply_point(&m.apply_point(&x)), x);
            }
        }
        assert!(sigma_ell_map(&p("4321"), 1).is_err());
    }

    #[test]
    fn fixed_hyperplane_and_identity_case() {
        let m = TropicalMap::from_ints(&[1, -1, 0], &[0, 0, 1]).unwrap();
        let x = qpoint_from_ints(&[3, 4, 0]);
        assert_eq!(m.apply_point(&x), x);
        let y = qpoint_from_ints(&[3, 4, -2]);
        assert_eq!(m.apply_point(&y), qpoint_from_ints(&[5, 2, -2]));
        let pos = VPolytope::hull(&[qpoint_from_ints(&[0, 0, 1]), qpoint_from_ints(&[1, 0, 2])]).unwrap();
        let (img, ok) = m.apply_polytope(&pos).unwrap();
        assert!(ok);
        assert_eq!(img, pos);
    }

    #[test]
    fn rejects_bad_factors() {
        assert!(TropicalMap::from_ints(&[2, 0], &[0, 1]).is_err());
        assert!(TropicalMap::from_ints(&[1, 0], &[1, 1]).is_err());
        let tri = TropicalMap::new(
            vec![BigInt::from(1), BigInt::zero(), BigInt::zero()],
            vec![
                vec![BigInt::zero(); 3],
                vec![BigInt::zero(), BigInt::one(), BigInt::zero()],
                vec![BigInt::zero(), BigInt::zero(), BigInt::one()],
            ],
        )
        .unwrap();
        let pt = VPolytope::point(qpoint_from_ints(&[0, 0, 0]));
        assert!(matches!(tri.apply_polytope(&pt), Err(Error::UnsupportedFactor(_))));
    }

    #[test]
    fn non_convex_image_is_detected() {
        // a square folded across its diagonal direction loses convexity
        let sq = VPolytope::hull(&[
            qpoint_from_ints(&[-1, -1]),
            qpoint_from_ints(&[1, -1]),
            qpoint_from_ints(&[-1, 1]),
            qpoint_from_ints(&[1, 1]),
        ])
        .unwrap();
        let m = TropicalMap::from_ints(&[1, 0], &[0, 1]).unwrap();
        let (_, ok) = m.apply_polytope(&sq).unwrap();
        assert!(!ok);
    }

    #[test]
    fn vertex_correspondence_s4() {
        for sigma in Permutation::all(4) {
            for ell in 1..4 {
                let (l, m) = lambda_mu(&sigma, ell).unwrap();
                if l < m {
                    assert_eq!(check_vertex_correspondence(&sigma, ell, &[1, 2, 3]).unwrap(), None);
                }
            }
        }
    }

    #[test]
    fn exchange_s5() {
        for sigma in Permutation::all(5) {
            if sigma.is_longest() || !sigma.is_mutation_admissible() {
                continue;
            }
            let s = next_step(&sigma).unwrap();
            let r = check_exchange(&sigma, s.ell, &[1, 2, 3, 4]).unwrap();
            assert!(r.witness_failures.is_empty(), "{:?}", r.witness_failures);
            assert!(r.search_failures.is_empty(), "{:?}", r.search_failures);
        }
    }

    #[test]
    fn short_chain() {
        let cache = ChainCache::new();
        let chain = mutation_sequence_to_gt(&p("1234"), &[2], VerifyMode::Full, &cache).unwrap();
        assert_eq!(chain.steps.len(), 6);
        assert!(chain.ends_at_gt);
        assert!(mutation_sequence_to_gt(&p("4321"), &[1, 2, 3], VerifyMode::Fast, &cache).unwrap().steps.is_empty());
    }

    #[test]
    fn hand_written_sequence_gr36() {
        // w2 with its -1/+1 in column 4 would not be orthogonal to f2
        let bad = json!([{"f": [[1,0,0,0,0,0],[-1,0,-1,0,-1,0],[0,0,-1,0,0,0]],
                          "w": [[0,0,1,-1,0,0],[0,0,-1,1,0,0],[0,0,0,0,0,0]]}]);
        assert!(maps_from_json(&bad, 6).is_err());
        let maps = json!([
            {"f": [[0,0,0,-1,0,0],[0,1,0,0,0,0],[0,0,-1,-1,0,0]],
             "w": [[0,0,0,0,0,0],[0,0,-1,1,0,0],[0,0,1,-1,0,0]]},
            {"f": [[1,0,0,0,0,0],[-1,0,-1,0,-1,0],[0,0,-1,0,0,0]],
             "w": [[0,0,1,0,-1,0],[0,0,-1,0,1,0],[0,0,0,0,0,0]]},
            {"f": [[0,0,0,-1,0,0],[0,1,0,0,0,0],[0,0,-1,-1,0,0]],
             "w": [[0,0,0,0,0,0],[0,0,1,-1,0,0],[0,0,-1,1,0,0]]},
        ]);
        let maps = maps_from_json(&maps, 6).unwrap();
        let build = |s: &str| {
            let f = MatchingField::bsigma(&p(s), &[3]).unwrap();
            crate::mfpolytope::grassmannian_polytope(&f, 3).unwrap()
        };
        let (src, dst) = (build("624351"), build("625341"));
        let out = replay(&src, &maps).unwrap();
        assert!(out.iter().all(|x| x.1));
        assert_eq!(out[2].0, dst);
        let mut v: QPoint = [1, 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 1, 0, 1]
            .iter()
            .map(|&x| rational::ratio(x, 2))
            .collect();
        v.extend(vec![Rational::zero(); 12]);
        assert!(out[1].0.vertices().contains(&v));
        assert!(!out[1].0.is_lattice_polytope());
    }
}
