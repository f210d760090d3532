use clap::{Args, ValueEnum};
use mfield_core::matchfield::default_prime;
use mfield_core::{MatchingField, Permutation};

/// A parsed cardinality list. A newtype so clap treats it as one value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ks(pub Vec<usize>);

pub fn parse_ks(s: &str) -> Result<Ks, String> {
    parse_cardinalities(s).map(Ks)
}

/// Parses `2`, `1-4`, `1,3` or combinations such as `1,3-4`.
pub fn parse_cardinalities(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("{t:?} is not a positive integer"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty range {part:?}"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    if out.contains(&0) {
        return Err("cardinalities start at 1".into());
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CValues(pub Vec<u64>);

/// A list of `c` values in the same grammar as cardinalities.
pub fn parse_c_values(s: &str) -> Result<CValues, String> {
    Ok(CValues(parse_cardinalities(s)?.into_iter().map(|c| c as u64).collect()))
}

pub fn parse_sigma(s: &str) -> Result<Permutation, String> {
    s.parse::<Permutation>().map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Which matching field to build.
#[derive(Args, Clone, Debug)]
pub struct FieldArgs {
    #[arg(long)]
    pub n: usize,
    /// Cardinalities: `2`, `1-4` or `1,3`. Defaults to the full flag `1..n-1`.
    #[arg(long = "k", visible_alias = "K", value_parser = parse_ks)]
    pub k: Option<Ks>,
    /// Permutation, `624351` or `6,2,4,3,5,1`. Defaults to the longest permutation.
    #[arg(long, value_parser = parse_sigma)]
    pub sigma: Option<Permutation>,
    /// Scale of the second weight row; selects `B_c^σ`.
    #[arg(long)]
    pub c: Option<u64>,
    /// Prime for `B_c^σ`; defaults to the smallest prime ≥ n+1.
    #[arg(long)]
    pub p: Option<u64>,
}

impl FieldArgs {
    pub fn cardinalities(&self) -> Result<Vec<usize>, String> {
        if self.n < 2 {
            return Err("--n must be at least 2".into());
        }
        let ks = self.k.clone().map(|k| k.0).unwrap_or_else(|| (1..self.n).collect());
        if ks.iter().any(|&k| k >= self.n) {
            return Err(format!("--k values must lie in 1..={}", self.n - 1));
        }
        Ok(ks)
    }

    pub fn sigma(&self) -> Result<Permutation, String> {
        let s = self.sigma.clone().unwrap_or_else(|| Permutation::longest(self.n));
        if s.len() != self.n {
            return Err(format!("--sigma has length {} but --n is {}", s.len(), self.n));
        }
        Ok(s)
    }

    pub fn field(&self) -> Result<MatchingField, String> {
        let ks = self.cardinalities()?;
        let sigma = self.sigma()?;
        let built = match self.c {
            Some(c) => MatchingField::bsigma_c(&sigma, c, self.p.unwrap_or_else(|| default_prime(self.n)), &ks),
            None if self.p.is_some() => return Err("--p only applies together with --c".into()),
            None => MatchingField::bsigma(&sigma, &ks),
        };
        built.map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinality_grammar() {
        assert_eq!(parse_cardinalities("2").unwrap(), vec![2]);
        assert_eq!(parse_cardinalities("1-4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_cardinalities("1,3").unwrap(), vec![1, 3]);
        assert_eq!(parse_cardinalities("3,1-2").unwrap(), vec![1, 2, 3]);
        assert!(parse_cardinalities("0").is_err());
        assert!(parse_cardinalities("3-1").is_err());
        assert!(parse_cardinalities("a").is_err());
    }
}
