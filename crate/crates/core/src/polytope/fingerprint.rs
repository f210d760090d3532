//! Canonical form of the vertex–facet incidence graph, so that two polytopes
//! get the same token exactly when their face lattices are isomorphic.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ehrhart::count_lattice_points;
use super::lattice::SubLattice;
use super::VPolytope;
use crate::error::{Error, Result};

/// Search leaves visited before giving up on a highly symmetric graph.
const LEAF_LIMIT: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    pub f_vector: Vec<usize>,
    /// Lattice points of `P` and `2P`, when a lattice was supplied.
    pub lattice_counts: Option<[u128; 2]>,
    /// SHA-256 of the canonical incidence certificate, hex encoded.
    pub incidence: String,
}

impl Fingerprint {
    pub fn token(&self) -> String {
        let f: Vec<String> = self.f_vector.iter().map(|x| x.to_string()).collect();
        let counts = match &self.lattice_counts {
            Some([a, b]) => format!("{a},{b}"),
            None => "-".into(),
        };
        format!("{}|{}|{}", f.join(" "), counts, &self.incidence[..16])
    }
}

pub fn fingerprint(p: &VPolytope, lattice: Option<&SubLattice>) -> Result<Fingerprint> {
    let cert = canonical_incidence(p)?;
    let mut h = Sha256::new();
    h.update((p.num_vertices() as u64).to_le_bytes());
    h.update((p.num_facets() as u64).to_le_bytes());
    for (a, b) in &cert {
        h.update(a.to_le_bytes());
        h.update(b.to_le_bytes());
    }
    let incidence = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    let lattice_counts = match lattice {
        Some(l) => Some([count_lattice_points(p, l, 1)?, count_lattice_points(p, l, 2)?]),
        None => None,
    };
    Ok(Fingerprint {
        f_vector: p.f_vector(),
        lattice_counts,
        incidence,
    })
}

struct Graph {
    adj: Vec<Vec<u32>>,
    num_vertices: usize,
}

/// Sorted edge list `(vertex label, facet label)` under the canonical labelling.
pub(crate) fn canonical_incidence(p: &VPolytope) -> Result<Vec<(u32, u32)>> {
    let nv = p.num_vertices();
    let nf = p.num_facets();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); nv + nf];
    for (f, inc) in p.incidence().iter().enumerate() {
        for v in inc.iter() {
            adj[v].push((nv + f) as u32);
            adj[nv + f].push(v as u32);
        }
    }
    let g = Graph { adj, num_vertices: nv };
    let colour: Vec<u32> = (0..nv + nf).map(|i| (i >= nv) as u32).collect();
    let start = refine(&g, colour);
    let mut best: Option<Vec<(u32, u32)>> = None;
    let mut leaves = 0;
    search(&g, start, &mut best, &mut leaves)?;
    Ok(best.expect("at least one leaf"))
}

/// Equitable refinement: nodes are split by their neighbours' cell counts
/// until stable. Cell numbers are canonical (derived only from the sort).
fn refine(g: &Graph, mut cell: Vec<u32>) -> Vec<u32> {
    let n = cell.len();
    let mut ncells = count_cells(&cell);
    loop {
        let mut keys: Vec<(u32, Vec<u32>, usize)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u32> = g.adj[v].iter().map(|&u| cell[u as usize]).collect();
                nb.sort_unstable();
                (cell[v], nb, v)
            })
            .collect();
        keys.sort_unstable();
        let mut next = vec![0u32; n];
        let mut id = 0u32;
        for i in 0..n {
            if i > 0 && (keys[i].0 != keys[i - 1].0 || keys[i].1 != keys[i - 1].1) {
                id += 1;
            }
            next[keys[i].2] = id;
        }
        cell = next;
        let c = count_cells(&cell);
        if c == ncells {
            return cell;
        }
        ncells = c;
    }
}

fn count_cells(cell: &[u32]) -> usize {
    cell.iter().copied().max().map_or(0, |m| m as usize + 1)
}

fn search(g: &Graph, cell: Vec<u32>, best: &mut Option<Vec<(u32, u32)>>, leaves: &mut usize) -> Result<()> {
    let n = cell.len();
    let ncells = count_cells(&cell);
    if ncells == n {
        *leaves += 1;
        if *leaves > LEAF_LIMIT {
            return Err(Error::Internal("incidence graph too symmetric to canonicalise".into()));
        }
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for v in 0..g.num_vertices {
            for &f in &g.adj[v] {
                edges.push((cell[v], cell[f as usize]));
            }
        }
        edges.sort_unstable();
        if best.as_ref().is_none_or(|b| edges < *b) {
            *best = Some(edges);
        }
        return Ok(());
    }
    // first smallest non-singleton cell
    let mut sizes = vec![0usize; ncells];
    for &c in &cell {
        sizes[c as usize] += 1;
    }
    let target = (0..ncells)
        .filter(|&c| sizes[c] > 1)
        .min_by_key(|&c| (sizes[c], c))
        .expect("partition not discrete") as u32;
    for v in 0..n {
        if cell[v] != target {
            continue;
        }
        // individualise v: it keeps the cell number, the rest of the cell
        // moves just behind it
        let next: Vec<u32> = (0..n)
            .map(|u| {
                let c = cell[u];
                if c > target || (c == target && u != v) {
                    c + 1
                } else {
                    c
                }
            })
            .collect();
        search(g, refine(g, next), best, leaves)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::tests::poly;
    use super::*;
    use crate::polytope::qpoint_from_ints;

    fn cube() -> VPolytope {
        let mut v = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    v.push(qpoint_from_ints(&[a, b, c]));
                }
            }
        }
        VPolytope::hull(&v).unwrap()
    }

    #[test]
    fn translation_and_relabelling_invariant() {
        let c = cube();
        let t = c.translate(&qpoint_from_ints(&[5, -3, 2]));
        let l = SubLattice::full(3);
        assert_eq!(fingerprint(&c, Some(&l)).unwrap(), fingerprint(&t, Some(&l)).unwrap());
        // a skewed copy has the same combinatorics but a different vertex order
        let skew = poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]])
            .linear_image(&[qpoint_from_ints(&[1, 2, 0]), qpoint_from_ints(&[0, 1, 0]), qpoint_from_ints(&[3, 0, -1])])
            .unwrap();
        assert_eq!(fingerprint(&c, None).unwrap(), fingerprint(&skew, None).unwrap());
    }

    #[test]
    fn distinguishes_equal_f_vectors() {
        // both (6, 10, 6): one pentagon and five triangles, versus a prism
        // with one vertex pushed out so a square splits into two triangles
        let pyramid = poly(&[&[0, 0, 0], &[2, 0, 0], &[3, 2, 0], &[1, 3, 0], &[-1, 2, 0], &[1, 1, 2]]);
        let bent = poly(&[&[0, 0, 0], &[2, 0, 0], &[0, 2, 0], &[0, 0, 2], &[3, 0, 2], &[0, 2, 2]]);
        assert_eq!(pyramid.f_vector(), vec![6, 10, 6]);
        assert_eq!(bent.f_vector(), vec![6, 10, 6]);
        let sizes = |p: &VPolytope| {
            let mut s: Vec<usize> = (0..p.num_facets()).map(|i| p.facet_vertices(i).len()).collect();
            s.sort();
            s
        };
        assert_eq!(sizes(&pyramid), vec![3, 3, 3, 3, 3, 5]);
        assert_eq!(sizes(&bent), vec![3, 3, 3, 3, 4, 4]);
        assert_ne!(fingerprint(&pyramid, None).unwrap(), fingerprint(&bent, None).unwrap());
    }

    #[test]
    fn cube_vs_octahedron() {
        let o = poly(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]]);
        assert_ne!(fingerprint(&cube(), None).unwrap(), fingerprint(&o, None).unwrap());
    }
}
