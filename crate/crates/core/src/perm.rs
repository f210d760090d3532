//! Permutations in one-line notation.
//!
//! Values are 1-based: `Permutation::new(vec![2, 3, 1])` is the map
//! `1 -> 2, 2 -> 3, 3 -> 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// The four patterns whose avoidance makes a permutation reachable from the
/// longest word by elementary mutations.
pub const FORBIDDEN_PATTERNS: [[usize; 4]; 4] = [[4, 1, 2, 3], [3, 1, 2, 4], [1, 4, 2, 3], [1, 3, 2, 4]];

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<usize>,
}

impl Permutation {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return invalid("permutation must be nonempty");
        }
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v > n || seen[v] {
                return invalid(format!("{values:?} is not a permutation of 1..={n}"));
            }
            seen[v] = true;
        }
        Ok(Permutation { values })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            values: (1..=n).collect(),
        }
    }

    /// The longest word `(n, n-1, ..., 1)`.
    pub fn longest(n: usize) -> Self {
        Permutation {
            values: (1..=n).rev().collect(),
        }
    }

    /// Every permutation of `1..=n` in lexicographic order of one-line notation.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (1..=n).collect();
        loop {
            out.push(Permutation { values: cur.clone() });
            if !next_lex(&mut cur) {
                break;
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `σ(i)` for 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.values[i - 1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { values: inv }
    }

    /// Position of the value `v`, i.e. `σ⁻¹(v)`.
    pub fn position(&self, v: usize) -> usize {
        self.values.iter().position(|&x| x == v).expect("value in range") + 1
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    pub fn is_longest(&self) -> bool {
        let n = self.len();
        self.values.iter().enumerate().all(|(i, &v)| v == n - i)
    }

    /// Number of pairs `i < j` with `σ(i) > σ(j)`.
    pub fn inversions(&self) -> usize {
        let v = &self.values;
        let mut count = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// +1 for even permutations, -1 for odd ones.
    pub fn sign(&self) -> i32 {
        if self.inversions().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Lexicographically smallest increasing index sequence (1-based) on which
    /// `self` has the relative order of `pattern`.
    pub fn contains_pattern(&self, pattern: &Permutation) -> Result<Option<Vec<usize>>> {
        let k = pattern.len();
        let n = self.len();
        if k > n {
            return invalid(format!("pattern of length {k} is longer than permutation of length {n}"));
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            if self.matches_at(pattern, &idx) {
                return Ok(Some(idx.iter().map(|i| i + 1).collect()));
            }
            if !next_combination(&mut idx, n) {
                return Ok(None);
            }
        }
    }

    fn matches_at(&self, pattern: &Permutation, idx: &[usize]) -> bool {
        let p = &pattern.values;
        for a in 0..idx.len() {
            for b in a + 1..idx.len() {
                let lhs = self.values[idx[a]] < self.values[idx[b]];
                if lhs != (p[a] < p[b]) {
                    return false;
                }
            }
        }
        true
    }

    /// True when none of 4123, 3124, 1423, 1324 occurs.
    pub fn is_mutation_admissible(&self) -> bool {
        if self.len() < 4 {
            return true;
        }
        FORBIDDEN_PATTERNS.iter().all(|p| {
            let pattern = Permutation { values: p.to_vec() };
            matches!(self.contains_pattern(&pattern), Ok(None))
        })
    }

    /// `(ℓ ℓ+1) σ`: exchange the values `ℓ` and `ℓ+1`.
    pub fn swap_values(&self, ell: usize) -> Result<Permutation> {
        let n = self.len();
        if ell == 0 || ell >= n {
            return invalid(format!("swap index {ell} outside 1..={}", n.saturating_sub(1)));
        }
        let values = self
            .values
            .iter()
            .map(|&v| {
                if v == ell {
                    ell + 1
                } else if v == ell + 1 {
                    ell
                } else {
                    v
                }
            })
            .collect();
        Ok(Permutation { values })
    }

    /// Blocks of the composition listed consecutively, each in descending order.
    /// `(2, 4)` gives `(2, 1, 6, 5, 4, 3)`.
    pub fn block(parts: &[usize]) -> Result<Permutation> {
        if parts.is_empty() || parts.contains(&0) {
            return invalid(format!("{parts:?} is not a composition"));
        }
        let mut values = Vec::new();
        let mut start = 0;
        for &a in parts {
            values.extend((start + 1..=start + a).rev());
            start += a;
        }
        Ok(Permutation { values })
    }

    /// Compact form: digits when every value is below 10, comma separated otherwise.
    pub fn one_line(&self) -> String {
        if self.len() <= 9 {
            self.values.iter().map(|v| v.to_string()).collect()
        } else {
            self.to_comma_string()
        }
    }

    pub fn to_comma_string(&self) -> String {
        self.values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let values: std::result::Result<Vec<usize>, _> = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse::<usize>()).collect()
        } else if s.chars().all(|c| c.is_ascii_digit()) && !s.is_empty() {
            if s.len() > 9 {
                return Err(Error::Parse(format!(
                    "digit-string permutation {s:?} is too long; use commas"
                )));
            }
            Ok(s.chars().map(|c| c as usize - '0' as usize).collect())
        } else {
            return Err(Error::Parse(format!("cannot parse permutation {s:?}")));
        };
        let values = values.map_err(|e| Error::Parse(format!("permutation {s:?}: {e}")))?;
        Permutation::new(values).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.one_line())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({})", self.one_line())
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<usize>::deserialize(d)?;
        Permutation::new(values).map_err(serde::de::Error::custom)
    }
}

/// Advance `v` to the next permutation in lexicographic order.
pub(crate) fn next_lex(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Advance an increasing index sequence over `0..n` to the next one in lexicographic order.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
