//! A fast battery of invariant checks, runnable from the command line.

use serde::Serialize;

use crate::degen::{is_toric_degeneration, DegenOptions};
use crate::error::Result;
use crate::matchfield::{MatchingField, PluckerIndex, WeightMatrix};
use crate::mfpolytope::{flag_polytope, gt_polytope};
use crate::mutation::{check_exchange, check_vertex_correspondence, lambda_mu, mutation_sequence_to_gt, next_step};
use crate::mutation::{ChainCache, VerifyMode};
use crate::perm::Permutation;
use crate::polytope::{ehrhart, is_normal_up_to, normalized_volume, EhrhartMethod};
use crate::rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

pub fn run() -> Vec<Check> {
    vec![
        check("fl3-diagonal", || {
            let ctx = gt_polytope(&[1, 2], 3)?;
            let f = ctx.polytope.f_vector();
            Ok((ctx.polytope.dim() == 3 && f == [7, 11, 6], format!("f-vector {f:?}")))
        }),
        check("gr24-weights", || {
            let m1 = WeightMatrix::from_ints(&[vec![0, 0, 0, 0], vec![3, 2, 1, 0]])?;
            let m2 = WeightMatrix::from_ints(&[vec![0, 0, 0, 0], vec![9, 5, 4, 0]])?;
            let w = |m: &WeightMatrix| -> Result<Vec<String>> {
                Ok(crate::matchfield::plucker_weight_vector(m, &[2])?
                    .iter()
                    .map(|(_, x)| rational::to_string(x))
                    .collect())
            };
            let (a, b) = (w(&m1)?, w(&m2)?);
            let same = MatchingField::induce(&m1, &[2])? == MatchingField::induce(&m2, &[2])?;
            Ok((
                a == ["2", "1", "1", "0", "0", "0"] && b == ["5", "4", "4", "0", "0", "0"] && same,
                format!("{a:?} {b:?}"),
            ))
        }),
        check("vertex-pairings-s4", || {
            for sigma in Permutation::all(4) {
                for ell in 1..4 {
                    let (l, m) = lambda_mu(&sigma, ell)?;
                    if l < m {
                        if let Some(bad) = check_vertex_correspondence(&sigma, ell, &[1, 2, 3])? {
                            return Ok((false, bad));
                        }
                    }
                }
            }
            Ok((true, "all σ ∈ S4".into()))
        }),
        check("exchange-witnesses-s4", || {
            let mut pairs = 0;
            for sigma in Permutation::all(4).into_iter().filter(|s| s.is_mutation_admissible() && !s.is_longest()) {
                let r = check_exchange(&sigma, next_step(&sigma)?.ell, &[1, 2, 3])?;
                if !r.witness_failures.is_empty() || !r.search_failures.is_empty() {
                    return Ok((false, format!("{:?} {:?}", r.witness_failures, r.search_failures)));
                }
                pairs += r.pairs;
            }
            Ok((true, format!("{pairs} pairs")))
        }),
        check("chains-s4-flag", || {
            let cache = ChainCache::new();
            let mut n = 0;
            for sigma in Permutation::all(4).into_iter().filter(|s| s.is_mutation_admissible()) {
                let c = mutation_sequence_to_gt(&sigma, &[1, 2, 3], VerifyMode::Full, &cache)?;
                if c.steps.len() != 6 - sigma.inversions() || !c.ends_at_gt {
                    return Ok((false, format!("chain from {sigma}")));
                }
                n += 1;
            }
            Ok((true, format!("{n} chains")))
        }),
        check("kernel-fl4", || {
            let ctx = gt_polytope(&[1, 2, 3], 4)?;
            let e = ehrhart(&ctx.polytope, &ctx.lattice, EhrhartMethod::Dilates)?;
            let vol = normalized_volume(&ctx.polytope, &ctx.lattice)?;
            let euler = ctx.polytope.face_lattice().satisfies_euler();
            let ok = euler && e.eval(0) == rational::int(1) && e.normalized_volume() == rational::Rational::from_integer(vol.clone());
            Ok((ok, format!("E = {e}, volume {vol}")))
        }),
        check("normality-gr24", || {
            let mut ok = true;
            for sigma in Permutation::all(4) {
                let ctx = flag_polytope(&MatchingField::bsigma(&sigma, &[2])?, &[2])?;
                ok &= is_normal_up_to(&ctx.polytope, &ctx.lattice, 3)?.is_normal();
            }
            Ok((ok, "B^σ, σ ∈ S4, K = {2}, up to 3P".into()))
        }),
        check("volume-obstruction-gr36", || {
            let f = MatchingField::bsigma_c(&"615234".parse()?, 3, 7, &[3])?;
            let r = is_toric_degeneration(&f, &[3], &DegenOptions { kmax: 0, ..Default::default() })?;
            let ok = !r.verdict && r.evidence.volume == 38 && r.evidence.volume_gt == 42;
            Ok((ok, format!("volumes {} vs {}", r.evidence.volume, r.evidence.volume_gt)))
        }),
        check("plucker-order", || {
            let all = PluckerIndex::all(4, 2);
            let s: Vec<String> = all.iter().map(|i| i.to_string()).collect();
            Ok((s == ["p12", "p13", "p23", "p14", "p24", "p34"], s.join(" ")))
        }),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_pass() {
        for c in super::run() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
