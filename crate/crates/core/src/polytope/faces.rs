use std::collections::HashMap;

use super::bitset::BitSet;

#[derive(Clone, Debug)]
pub struct Face {
    pub vertices: BitSet,
    /// Indices (into the level one below) of the facets of this face.
    pub children: Vec<usize>,
}

/// All nonempty faces, grouped by dimension. `levels[d]` holds the polytope itself.
#[derive(Clone, Debug)]
pub struct FaceLattice {
    levels: Vec<Vec<Face>>,
}

impl FaceLattice {
    pub(crate) fn from_incidence(dim: usize, num_vertices: usize, facets: &[BitSet]) -> FaceLattice {
        let mut levels: Vec<Vec<Face>> = vec![Vec::new(); dim + 1];
        levels[dim].push(Face {
            vertices: BitSet::full(num_vertices),
            children: Vec::new(),
        });
        for j in (1..=dim).rev() {
            let mut index: HashMap<BitSet, usize> = HashMap::new();
            let mut below: Vec<Face> = Vec::new();
            for face in levels[j].iter_mut() {
                let mut cands: Vec<BitSet> = Vec::new();
                for g in facets {
                    let c = face.vertices.intersect(g);
                    if c.is_empty() || c == face.vertices {
                        continue;
                    }
                    if !cands.contains(&c) {
                        cands.push(c);
                    }
                }
                let maximal: Vec<&BitSet> = cands
                    .iter()
                    .filter(|c| !cands.iter().any(|o| o != *c && c.is_subset(o)))
                    .collect();
                let mut children = Vec::with_capacity(maximal.len());
                for c in maximal {
                    let id = *index.entry(c.clone()).or_insert_with(|| {
                        below.push(Face {
                            vertices: c.clone(),
                            children: Vec::new(),
                        });
                        below.len() - 1
                    });
                    children.push(id);
                }
                children.sort_unstable();
                face.children = children;
            }
            levels[j - 1] = below;
        }
        // With j == 1 the maximal intersections are the two endpoints, so level 0
        // holds exactly the vertices, but in discovery order. Reindex by vertex.
        if dim > 0 {
            let remap: Vec<usize> = levels[0]
                .iter()
                .map(|f| f.vertices.first().expect("nonempty"))
                .collect();
            levels[0].sort_by_key(|f| f.vertices.first());
            for e in levels[1].iter_mut() {
                for c in e.children.iter_mut() {
                    *c = remap[*c];
                }
                e.children.sort_unstable();
            }
        }
        FaceLattice { levels }
    }

    pub fn dim(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn faces(&self, dim: usize) -> &[Face] {
        &self.levels[dim]
    }

    /// `(f_0, …, f_{d-1})`.
    pub fn f_vector(&self) -> Vec<usize> {
        self.levels[..self.dim()].iter().map(|l| l.len()).collect()
    }

    /// `Σ (-1)^i f_i` against `1 - (-1)^d` (for `d ≥ 1`).
    pub fn satisfies_euler(&self) -> bool {
        let d = self.dim() as i64;
        if d == 0 {
            return true;
        }
        let lhs: i64 = self
            .f_vector()
            .iter()
            .enumerate()
            .map(|(i, &f)| if i % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum();
        lhs == 1 - (-1i64).pow(d as u32)
    }
}
