//! Cellular chain complex of a glued triangulation and its first homology.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::triangulation::{edge_index, Skeleton, Triangulation};

use super::{smith_normal_form, AbelianGroup, HomologyError, SparseIntMatrix};

/// Homology summary of a cusped complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    /// H₁ of the complex with every cusp coned off.
    pub quotient: AbelianGroup,
    /// quotient ⊕ Z^cusps.
    pub h1: AbelianGroup,
    pub cusps: usize,
}

/// Face vertex triples in increasing order, indexed by the omitted vertex.
const FACE_VERTS: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

fn edge_sign(sk: &Skeleton, t: usize, a: usize, b: usize) -> (usize, i64) {
    let (cls, rev) = sk.edge_of[t][edge_index(a, b)];
    (cls as usize, if rev { -1 } else { 1 })
}

fn boundaries(sk: &Skeleton) -> (SparseIntMatrix, SparseIntMatrix) {
    // ∂2 built transposed (face rows), then flipped to edges × faces
    let mut d2t = SparseIntMatrix::new(sk.nfaces, sk.nedges);
    for (f, &(t, face)) in sk.face_rep.iter().enumerate() {
        let [a, b, c] = FACE_VERTS[face as usize];
        let t = t as usize;
        for (x, y, s) in [(b, c, 1), (a, c, -1), (a, b, 1)] {
            let (e, sign) = edge_sign(sk, t, x, y);
            d2t.add(f, e, s * sign);
        }
    }
    let mut d1 = SparseIntMatrix::new(sk.nvertices, sk.nedges);
    for (e, &(t, k)) in sk.edge_rep.iter().enumerate() {
        let (a, b) = crate::triangulation::EDGES[k as usize];
        let t = t as usize;
        d1.add(sk.vertex_of[t][b] as usize, e, 1);
        d1.add(sk.vertex_of[t][a] as usize, e, -1);
    }
    (d2t.transpose(), d1)
}

/// Boundary maps ∂2 (edges × faces) and ∂1 (vertices × edges) over the
/// skeleton classes.
pub fn boundary_matrices(
    tri: &Triangulation,
) -> Result<(SparseIntMatrix, SparseIntMatrix), HomologyError> {
    if !tri.is_closed() {
        return Err(HomologyError::Incomplete);
    }
    if !tri.is_orientable() {
        return Err(HomologyError::NotOrientable);
    }
    Ok(boundaries(&tri.skeleton()))
}

/// Number of connected components of the 1-skeleton, which is V − rank ∂1.
fn vertex_components(sk: &Skeleton, d1: &SparseIntMatrix) -> usize {
    let mut parent: Vec<usize> = (0..sk.nvertices).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let cols = d1.transpose();
    let mut comps = sk.nvertices;
    for r in &cols.rows {
        if r.len() == 2 {
            let (a, b) = (find(&mut parent, r[0].0 as usize), find(&mut parent, r[1].0 as usize));
            if a != b {
                parent[a] = b;
                comps -= 1;
            }
        }
    }
    comps
}

/// H₁ of the coned complex, and H₁ of the cusped manifold as its sum with
/// one free summand per cusp.
pub fn h1_with_quotient(tri: &Triangulation) -> Result<HomologyReport, HomologyError> {
    if !tri.is_closed() {
        return Err(HomologyError::Incomplete);
    }
    if !tri.is_orientable() {
        return Err(HomologyError::NotOrientable);
    }
    let sk = tri.skeleton();
    let (d2, d1) = boundaries(&sk);
    let r1 = sk.nvertices - vertex_components(&sk, &d1);
    let snf = smith_normal_form(&d2);
    let free = sk.nedges - r1 - snf.rank;
    let quotient = AbelianGroup::from_divisors(free, &snf.divisors);
    let cusps = sk.vertex_ideal.iter().filter(|&&b| b).count();
    let h1 = quotient.plus(&AbelianGroup::free(cusps));
    Ok(HomologyReport { quotient, h1, cusps })
}

/// H₁ from explicit boundary maps, for complexes given as matrices.
pub fn h1_from_boundaries(d2: &SparseIntMatrix, d1: &SparseIntMatrix) -> AbelianGroup {
    let r1 = smith_normal_form(d1).rank;
    let s2 = smith_normal_form(d2);
    let divisors: Vec<BigInt> = s2.divisors.clone();
    AbelianGroup::from_divisors(d1.ncols - r1 - s2.rank, &divisors)
}
