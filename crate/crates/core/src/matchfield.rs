//! Matching fields: a permutation of `1..=k` for every `k`-subset of `[n]`,
//! choosing one monomial of each minor. Coherent ones come from weight
//! matrices by unique minimisation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::perm::{next_combination, next_lex, Permutation};
use crate::rational::{self, Rational};

/// A nonempty proper subset of `[n]`, stored increasing and 1-based.
/// Ordered by size, then colexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PluckerIndex {
    elements: Vec<usize>,
}

impl PluckerIndex {
    pub fn new(mut elements: Vec<usize>, n: usize) -> Result<PluckerIndex> {
        elements.sort_unstable();
        let k = elements.len();
        if k == 0 || k >= n {
            return invalid(format!("index {elements:?} must have between 1 and {} elements", n - 1));
        }
        if elements[0] == 0 || elements[k - 1] > n || elements.windows(2).any(|w| w[0] == w[1]) {
            return invalid(format!("{elements:?} is not a subset of 1..={n}"));
        }
        Ok(PluckerIndex { elements })
    }

    /// All `k`-subsets of `[n]` in colexicographic order.
    pub fn all(n: usize, k: usize) -> Vec<PluckerIndex> {
        let mut out = Vec::new();
        if k == 0 || k > n {
            return out;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(PluckerIndex {
                elements: idx.iter().map(|i| i + 1).collect(),
            });
            if !next_combination(&mut idx, n) {
                break;
            }
        }
        out.sort();
        out
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `i_a` for 1-based `a`.
    pub fn get(&self, a: usize) -> usize {
        self.elements[a - 1]
    }
}

impl Ord for PluckerIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.elements.iter().rev().cmp(other.elements.iter().rev()))
    }
}

impl PartialOrd for PluckerIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PluckerIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.elements.iter().any(|&e| e > 9) { "," } else { "" };
        let s: Vec<String> = self.elements.iter().map(|e| e.to_string()).collect();
        write!(f, "p{}", s.join(sep))
    }
}

impl fmt::Debug for PluckerIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A matrix of exact rationals with `n` columns. Row `a` weighs the column
/// matched to the `a`-th element of an index, so indices of size `k` need
/// at least `k` rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightMatrix {
    n: usize,
    rows: Vec<Vec<Rational>>,
}

impl WeightMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<WeightMatrix> {
        let Some(n) = rows.first().map(|r| r.len()) else {
            return invalid("a weight matrix needs at least one row");
        };
        if n < 2 || rows.iter().any(|r| r.len() != n) {
            return invalid("weight matrix rows must share a length of at least 2");
        }
        Ok(WeightMatrix { n, rows })
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<WeightMatrix> {
        WeightMatrix::new(rows.iter().map(|r| r.iter().map(|&x| rational::int(x)).collect()).collect())
    }

    /// Rows `0`, `σ`, then `N^r (n, n-1, …, 1)` for `r = 1..=n-2`.
    pub fn bsigma(sigma: &Permutation, big_n: u64) -> Result<WeightMatrix> {
        let n = sigma.len();
        if n < 2 {
            return invalid("weight matrices need n ≥ 2");
        }
        if big_n <= n as u64 {
            return invalid(format!("N = {big_n} must be at least n + 1 = {}", n + 1));
        }
        Ok(WeightMatrix::stacked(sigma, &BigInt::from(1), &BigInt::from(big_n)))
    }

    /// Rows `0`, `c·σ`, then `p^r (n, n-1, …, 1)` for `r = 1..=n-2`.
    /// Primes `p ≥ n+1` always give a coherent field; smaller primes are
    /// accepted and any tie surfaces when the field is induced.
    pub fn c_sigma(sigma: &Permutation, c: u64, p: u64) -> Result<WeightMatrix> {
        let n = sigma.len();
        if n < 2 {
            return invalid("weight matrices need n ≥ 2");
        }
        if !is_prime(p) {
            return invalid(format!("p = {p} is not prime"));
        }
        if c == 0 || c.is_multiple_of(p) {
            return invalid(format!("c = {c} must be positive and not divisible by p = {p}"));
        }
        Ok(WeightMatrix::stacked(sigma, &BigInt::from(c), &BigInt::from(p)))
    }

    fn stacked(sigma: &Permutation, c: &BigInt, base: &BigInt) -> WeightMatrix {
        let n = sigma.len();
        let mut rows = Vec::with_capacity(n);
        rows.push(vec![Rational::zero(); n]);
        rows.push(sigma.values().iter().map(|&s| Rational::from_integer(c * s)).collect());
        let mut pow = base.clone();
        for _ in 2..n {
            rows.push((0..n).map(|j| Rational::from_integer(&pow * (n - j))).collect());
            pow *= base;
        }
        WeightMatrix { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_rows(&self, ks: &[usize]) -> Result<()> {
        match ks.iter().max() {
            Some(&k) if k > self.rows.len() => invalid(format!(
                "indices of size {k} need {k} weight rows, the matrix has {}",
                self.rows.len()
            )),
            _ => Ok(()),
        }
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// `M_{a,j}` with 1-based indices.
    pub fn entry(&self, a: usize, j: usize) -> &Rational {
        &self.rows[a - 1][j - 1]
    }

    /// `Σ_a M_{a, i_{π(a)}}`.
    pub fn matching_weight(&self, index: &PluckerIndex, pi: &[usize]) -> Rational {
        pi.iter()
            .enumerate()
            .map(|(a, &t)| self.entry(a + 1, index.get(t)).clone())
            .sum()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| Value::Array(r.iter().map(|q| Value::String(rational::to_string(q))).collect()))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<WeightMatrix> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::Parse("weight matrix must be an array of rows".into()))?;
        let rows = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Parse("weight matrix row must be an array".into()))?
                    .iter()
                    .map(|e| match e {
                        Value::String(s) => rational::parse(s),
                        Value::Number(x) => rational::parse(&x.to_string()),
                        _ => Err(Error::Parse("weight matrix entry must be a number".into())),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        WeightMatrix::new(rows)
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// The smallest prime `≥ n + 1`.
pub fn default_prime(n: usize) -> u64 {
    (n as u64 + 1..).find(|&p| is_prime(p)).expect("primes are unbounded")
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Provenance {
    WeightMatrix(WeightMatrix),
    BSigma { sigma: Permutation },
    BSigmaC { sigma: Permutation, c: u64, p: u64 },
    Block { parts: Vec<usize> },
    Explicit,
}

impl Provenance {
    pub fn to_json(&self) -> Value {
        match self {
            Provenance::WeightMatrix(m) => json!({"kind": "weight-matrix", "matrix": m.to_json()}),
            Provenance::BSigma { sigma } => json!({"kind": "bsigma", "sigma": sigma.one_line()}),
            Provenance::BSigmaC { sigma, c, p } => {
                json!({"kind": "bsigma-c", "sigma": sigma.one_line(), "c": c, "p": p})
            }
            Provenance::Block { parts } => json!({"kind": "block", "parts": parts}),
            Provenance::Explicit => json!({"kind": "explicit"}),
        }
    }

    /// Short stable label, used in cache keys and reports.
    pub fn label(&self) -> String {
        match self {
            Provenance::WeightMatrix(m) => {
                let rows: Vec<String> = m
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(rational::to_string).collect::<Vec<_>>().join(","))
                    .collect();
                format!("matrix[{}]", rows.join(";"))
            }
            Provenance::BSigma { sigma } => format!("bsigma({})", sigma.to_comma_string()),
            Provenance::BSigmaC { sigma, c, p } => format!("bsigma-c({},{c},{p})", sigma.to_comma_string()),
            Provenance::Block { parts } => {
                format!("block({})", parts.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            }
            Provenance::Explicit => "explicit".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MatchingField {
    n: usize,
    cardinalities: Vec<usize>,
    assignment: BTreeMap<PluckerIndex, Permutation>,
    provenance: Provenance,
    certificate: Option<WeightMatrix>,
}

impl PartialEq for MatchingField {
    /// Two matching fields are equal when their assignment tables agree.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.cardinalities == other.cardinalities && self.assignment == other.assignment
    }
}

impl Eq for MatchingField {}

fn check_cardinalities(n: usize, ks: &[usize]) -> Result<Vec<usize>> {
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() {
        return invalid("the set of cardinalities is empty");
    }
    if ks[0] == 0 || ks[ks.len() - 1] >= n {
        return invalid(format!("cardinalities {ks:?} must lie in 1..={}", n.saturating_sub(1)));
    }
    Ok(ks)
}

/// Permutations of `1..=k` in lexicographic order.
fn all_perms(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(cur.clone());
        if !next_lex(&mut cur) {
            break;
        }
    }
    out
}

impl MatchingField {
    /// `id` when `σ(i_1) > σ(i_2)` or `|I| = 1`, the transposition `(12)` otherwise.
    pub fn bsigma(sigma: &Permutation, ks: &[usize]) -> Result<MatchingField> {
        let n = sigma.len();
        let ks = check_cardinalities(n, ks)?;
        let mut assignment = BTreeMap::new();
        for &k in &ks {
            for idx in PluckerIndex::all(n, k) {
                let swap = k >= 2 && sigma.apply(idx.get(1)) < sigma.apply(idx.get(2));
                let mut v: Vec<usize> = (1..=k).collect();
                if swap {
                    v.swap(0, 1);
                }
                assignment.insert(idx, Permutation::new(v)?);
            }
        }
        let certificate = if n >= 2 {
            Some(WeightMatrix::bsigma(sigma, n as u64 + 1)?)
        } else {
            None
        };
        Ok(MatchingField {
            n,
            cardinalities: ks,
            assignment,
            provenance: Provenance::BSigma { sigma: sigma.clone() },
            certificate,
        })
    }

    /// The field induced by `M_c^σ`.
    pub fn bsigma_c(sigma: &Permutation, c: u64, p: u64, ks: &[usize]) -> Result<MatchingField> {
        let m = WeightMatrix::c_sigma(sigma, c, p)?;
        let mut f = MatchingField::induce(&m, ks)?;
        f.provenance = Provenance::BSigmaC {
            sigma: sigma.clone(),
            c,
            p,
        };
        Ok(f)
    }

    pub fn block(parts: &[usize], ks: &[usize]) -> Result<MatchingField> {
        let mut f = MatchingField::bsigma(&Permutation::block(parts)?, ks)?;
        f.provenance = Provenance::Block { parts: parts.to_vec() };
        Ok(f)
    }

    /// The diagonal field `B^{w0}`: every index gets the identity.
    pub fn diagonal(n: usize, ks: &[usize]) -> Result<MatchingField> {
        MatchingField::bsigma(&Permutation::longest(n), ks)
    }

    pub fn explicit(n: usize, ks: &[usize], table: Vec<(PluckerIndex, Permutation)>) -> Result<MatchingField> {
        let ks = check_cardinalities(n, ks)?;
        let mut assignment = BTreeMap::new();
        for (idx, pi) in table {
            if idx.elements().last().is_some_and(|&e| e > n) || idx.len() != pi.len() {
                return invalid(format!("entry {idx} -> {pi} does not fit"));
            }
            if !ks.contains(&idx.len()) {
                return invalid(format!("entry {idx} has a cardinality outside {ks:?}"));
            }
            assignment.insert(idx, pi);
        }
        for &k in &ks {
            if let Some(missing) = PluckerIndex::all(n, k).into_iter().find(|i| !assignment.contains_key(i)) {
                return invalid(format!("no permutation given for {missing}"));
            }
        }
        Ok(MatchingField {
            n,
            cardinalities: ks,
            assignment,
            provenance: Provenance::Explicit,
            certificate: None,
        })
    }

    /// For every index, the unique permutation minimising the matching weight.
    pub fn induce(m: &WeightMatrix, ks: &[usize]) -> Result<MatchingField> {
        let n = m.n();
        let ks = check_cardinalities(n, ks)?;
        m.check_rows(&ks)?;
        let mut assignment = BTreeMap::new();
        for &k in &ks {
            let perms = all_perms(k);
            for idx in PluckerIndex::all(n, k) {
                let mut best: Option<Rational> = None;
                let mut argmin: Vec<&Vec<usize>> = Vec::new();
                for pi in &perms {
                    let w = m.matching_weight(&idx, pi);
                    match best.as_ref().map(|b| w.cmp(b)) {
                        None | Some(Ordering::Less) => {
                            best = Some(w);
                            argmin.clear();
                            argmin.push(pi);
                        }
                        Some(Ordering::Equal) => argmin.push(pi),
                        Some(Ordering::Greater) => {}
                    }
                }
                if argmin.len() > 1 {
                    return Err(Error::NonCoherent {
                        index: idx.elements().to_vec(),
                        tied: argmin.into_iter().cloned().collect(),
                    });
                }
                assignment.insert(idx, Permutation::new(argmin[0].clone())?);
            }
        }
        Ok(MatchingField {
            n,
            cardinalities: ks,
            assignment,
            provenance: Provenance::WeightMatrix(m.clone()),
            certificate: Some(m.clone()),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// A weight matrix inducing this field, when one is known.
    pub fn certificate(&self) -> Option<&WeightMatrix> {
        self.certificate.as_ref()
    }

    pub fn is_coherent(&self) -> bool {
        self.certificate.as_ref().is_some_and(|m| {
            MatchingField::induce(m, &self.cardinalities).is_ok_and(|f| f.assignment == self.assignment)
        })
    }

    pub fn get(&self, idx: &PluckerIndex) -> Option<&Permutation> {
        self.assignment.get(idx)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&PluckerIndex, &Permutation)> {
        self.assignment.iter()
    }

    /// Indices of size `k` in colexicographic order.
    pub fn indices(&self, k: usize) -> impl Iterator<Item = &PluckerIndex> {
        self.assignment.keys().filter(move |i| i.len() == k)
    }

    /// Column chosen for each row `1..=k`.
    pub fn columns(&self, idx: &PluckerIndex) -> Result<Vec<usize>> {
        let pi = self
            .assignment
            .get(idx)
            .ok_or_else(|| Error::InvalidArgument(format!("{idx} has no assigned permutation")))?;
        Ok(pi.values().iter().map(|&t| idx.get(t)).collect())
    }

    /// The 0/1 point of `ℤ^{(n-1)×n}` (row-major) with ones at `(a, i_{Λ(I)(a)})`.
    pub fn tuple_vector(&self, idx: &PluckerIndex) -> Result<Vec<i64>> {
        let cols = self.columns(idx)?;
        let mut v = vec![0; (self.n - 1) * self.n];
        for (a, j) in cols.iter().enumerate() {
            v[a * self.n + (j - 1)] = 1;
        }
        Ok(v)
    }

    /// Sign of `Λ(I)` in the minor expansion.
    pub fn tuple_sign(&self, idx: &PluckerIndex) -> Result<i32> {
        self.assignment
            .get(idx)
            .map(|p| p.sign())
            .ok_or_else(|| Error::InvalidArgument(format!("{idx} has no assigned permutation")))
    }

    /// Every monomial `x_{1,j_1} ⋯ x_{k,j_k}` has degree `e_k`.
    pub fn check_grading(&self) -> bool {
        self.assignment.iter().all(|(idx, _)| {
            let cols = self.columns(idx).expect("assigned");
            let entries: Vec<(usize, usize)> = cols.iter().enumerate().map(|(a, &j)| (a + 1, j)).collect();
            let mut target = vec![0i64; self.n - 1];
            target[idx.len() - 1] = 1;
            monomial_degree(&entries, self.n) == target
        })
    }

    pub fn to_json(&self) -> Value {
        let assignment: Vec<Value> = self
            .assignment
            .iter()
            .map(|(i, p)| json!([i.elements(), p.one_line()]))
            .collect();
        json!({
            "n": self.n,
            "K": self.cardinalities,
            "provenance": self.provenance.to_json(),
            "assignment": assignment,
        })
    }
}

/// Degree in `ℤ^{n-1}` of `∏ x_{i,j}` with `deg x_{i,j} = e_i - e_{i-1}`.
pub fn monomial_degree(entries: &[(usize, usize)], n: usize) -> Vec<i64> {
    let mut deg = vec![0i64; n - 1];
    for &(i, _) in entries {
        deg[i - 1] += 1;
        if i >= 2 {
            deg[i - 2] -= 1;
        }
    }
    deg
}

/// Plücker weight of each index: the minimal matching weight.
pub fn plucker_weight_vector(m: &WeightMatrix, ks: &[usize]) -> Result<Vec<(PluckerIndex, Rational)>> {
    let n = m.n();
    let ks = check_cardinalities(n, ks)?;
    m.check_rows(&ks)?;
    let mut out = Vec::new();
    for &k in &ks {
        let perms = all_perms(k);
        for idx in PluckerIndex::all(n, k) {
            let w = perms
                .iter()
                .map(|pi| m.matching_weight(&idx, pi))
                .min()
                .expect("k ≥ 1");
            out.push((idx, w));
        }
    }
    Ok(out)
}
