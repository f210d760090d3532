use std::collections::HashSet;

use num_bigint::BigInt;

use super::ehrhart::Enumerator;
use super::lattice::{LatticeChart, SubLattice};
use super::VPolytope;
use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalityResult {
    Normal,
    /// A point of `m·P` in the lattice that is not a sum of `m` lattice points of `P`.
    Gap { m: u32, point: Vec<BigInt> },
}

impl NormalityResult {
    pub fn is_normal(&self) -> bool {
        matches!(self, NormalityResult::Normal)
    }
}

/// Checks `mP ∩ L = (m-1)P ∩ L + P ∩ L` for `m = 2..=kmax`.
pub fn is_normal_up_to(p: &VPolytope, lattice: &SubLattice, kmax: u32) -> Result<NormalityResult> {
    if kmax < 2 {
        return invalid("kmax must be at least 2");
    }
    let chart = LatticeChart::new(p, lattice)?;
    if chart.dim() == 0 {
        return Ok(NormalityResult::Normal);
    }
    let en = Enumerator::new(&chart, false)?;
    let base = en.points(1)?;
    let mut prev: HashSet<Vec<i64>> = base.iter().cloned().collect();
    for m in 2..=kmax {
        let layer = en.points(m as i64)?;
        for x in &layer {
            let ok = base.iter().any(|s| {
                let r: Vec<i64> = x.iter().zip(s).map(|(a, b)| a - b).collect();
                prev.contains(&r)
            });
            if !ok {
                return Ok(NormalityResult::Gap {
                    m,
                    point: chart.to_ambient(x, m as i64),
                });
            }
        }
        prev = layer.into_iter().collect();
    }
    Ok(NormalityResult::Normal)
}

#[cfg(test)]
mod tests {
    use super::super::tests::poly;
    use super::*;

    #[test]
    fn cube_is_normal() {
        let c = poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        assert!(is_normal_up_to(&c, &SubLattice::full(3), 3).unwrap().is_normal());
    }

    #[test]
    fn reeve_tetrahedron_is_not() {
        let t = poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 3]]);
        match is_normal_up_to(&t, &SubLattice::full(3), 3).unwrap() {
            NormalityResult::Gap { m, point } => {
                assert_eq!(m, 2);
                // brute force: the gap point is not a sum of two of the four vertices
                let verts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 3]];
                let target: Vec<i64> = point.iter().map(|b| i64::try_from(b).unwrap()).collect();
                for a in &verts {
                    for b in &verts {
                        let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                        assert_ne!(s, target);
                    }
                }
            }
            NormalityResult::Normal => panic!("expected a gap"),
        }
    }
}
