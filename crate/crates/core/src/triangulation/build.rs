//! Gluing labeled copies of the fundamental domain.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::geometry::FundamentalDomain;
use crate::ring::{proj_canonicalize, psl_order, ProjMatrix, QuadIdeal, QuadInt};

use super::{Perm, Triangulation, TriangulationError, EDGES};

/// Default tetrahedron budget for the builders.
pub const DEFAULT_TET_BUDGET: usize = 2_000_000;

/// BFS over copy labels. Copy 0 has label `start`; face 3 of simplex j in
/// the copy labelled x is glued to face 3 of `mate(j)` in copy `next(x, j)`.
fn glue_copies<K, F>(
    dom: &FundamentalDomain,
    start: K,
    expected: usize,
    budget: usize,
    next: F,
    flatten: impl Fn(&K) -> Vec<i64>,
) -> Result<Triangulation, TriangulationError>
where
    K: Hash + Eq + Clone,
    F: Fn(&K, usize) -> K,
{
    let ns = dom.len();
    if expected.saturating_mul(ns) > budget {
        return Err(TriangulationError::BudgetExceeded(budget));
    }
    let mut index: HashMap<K, u32> = HashMap::with_capacity(expected);
    let mut labels: Vec<K> = Vec::with_capacity(expected);
    index.insert(start.clone(), 0);
    labels.push(start);
    let mut tri = Triangulation::new(0);
    let mut queue = VecDeque::from([0usize]);
    let grow = |tri: &mut Triangulation, copy: usize| {
        let base = tri.len();
        debug_assert_eq!(base, copy * ns);
        tri.adj.extend(std::iter::repeat_n([super::NONE; 4], ns));
        tri.gluing.extend(std::iter::repeat_n([Perm::IDENTITY; 4], ns));
        for s in &dom.simplices {
            tri.ideal.push([s.ideal_vertex, false, false, false]);
        }
        for (j, s) in dom.simplices.iter().enumerate() {
            for f in 0..3 {
                tri.adj[base + j][f] = (base + s.neighbors[f]) as u32;
            }
        }
    };
    grow(&mut tri, 0);
    while let Some(c) = queue.pop_front() {
        for (j, s) in dom.simplices.iter().enumerate() {
            let t = c * ns + j;
            if tri.adj[t][3] != super::NONE {
                continue;
            }
            let key = next(&labels[c], j);
            let other = match index.get(&key) {
                Some(&o) => o as usize,
                None => {
                    let o = labels.len();
                    if (o + 1) * ns > budget {
                        return Err(TriangulationError::BudgetExceeded(budget));
                    }
                    index.insert(key.clone(), o as u32);
                    labels.push(key);
                    grow(&mut tri, o);
                    queue.push_back(o);
                    o
                }
            };
            let u = other * ns + s.mate;
            if tri.adj[u][3] != super::NONE && tri.adj[u][3] as usize != t {
                return Err(TriangulationError::InconsistentGluing(format!(
                    "copy {} simplex {} face 3 already glued",
                    other, s.mate
                )));
            }
            tri.glue(t, 3, u, Perm::IDENTITY);
        }
    }
    if labels.len() != expected {
        return Err(TriangulationError::InconsistentGluing(format!(
            "{} copies, expected {}",
            labels.len(),
            expected
        )));
    }
    tri.labels = labels.iter().map(flatten).collect();
    tri.per_copy = ns;
    tri.check()?;
    Ok(tri)
}

/// H³/Γ(I): one copy per residue in PSL(2, O_d/I).
pub fn build_principal(
    dom: &FundamentalDomain,
    ideal: &QuadIdeal,
    budget: usize,
) -> Result<Triangulation, TriangulationError> {
    let order = psl_order(ideal)? as usize;
    let start = proj_canonicalize(&ProjMatrix::identity(dom.d), ideal);
    let mats: Vec<ProjMatrix> = dom.simplices.iter().map(|s| s.matrix).collect();
    glue_copies(
        dom,
        start,
        order,
        budget,
        |m, j| proj_canonicalize(&(*m * mats[j]), ideal),
        |m| m.to_ints().iter().flatten().copied().collect(),
    )
}

type Row = [QuadInt; 2];

/// Canonical row modulo I and sign.
fn canonical_row(v: Row, ideal: &QuadIdeal) -> Row {
    let p = [ideal.reduce(&v[0]), ideal.reduce(&v[1])];
    let q = [ideal.reduce(&-v[0]), ideal.reduce(&-v[1])];
    let key = |r: &Row| [r[0].a, r[0].b, r[1].a, r[1].b];
    if key(&q) < key(&p) {
        q
    } else {
        p
    }
}

/// H³/Γ₁(I): copies labelled by first rows modulo I and sign. The row of
/// the neighbour across simplex j is `row · g_j`, so no witness matrix is
/// needed.
pub fn build_gamma1(
    dom: &FundamentalDomain,
    ideal: &QuadIdeal,
    budget: usize,
) -> Result<Triangulation, TriangulationError> {
    let order = psl_order(ideal)? as usize;
    let norm = ideal.norm() as usize;
    let expected = order / norm;
    let d = dom.d;
    let start = canonical_row([QuadInt::one(d), QuadInt::zero(d)], ideal);
    let mats: Vec<ProjMatrix> = dom.simplices.iter().map(|s| s.matrix).collect();
    glue_copies(
        dom,
        start,
        expected,
        budget,
        |v, j| {
            let g = &mats[j].e;
            canonical_row([v[0] * g[0] + v[1] * g[2], v[0] * g[1] + v[1] * g[3]], ideal)
        },
        |v| vec![v[0].a, v[0].b, v[1].a, v[1].b],
    )
}

/// True iff some edge class of `tri` has degree different from the degree
/// of its image in the domain times that edge's singular order, i.e. the
/// quotient is an orbifold.
pub fn detect_orbifold(tri: &Triangulation, dom: &FundamentalDomain) -> bool {
    let ns = dom.len();
    let single = glue_copies(dom, (), 1, usize::MAX, |_, _| (), |_| Vec::new())
        .expect("the domain glues to itself");
    let fsk = single.skeleton();
    let mut ford = vec![1u32; fsk.nedges];
    for (j, s) in dom.simplices.iter().enumerate() {
        for (k, &(a, b)) in [(0usize, 1usize), (0, 2), (1, 2)].iter().enumerate() {
            let e = super::edge_index(a, b);
            let cls = fsk.edge_of[j][e].0 as usize;
            ford[cls] = ford[cls].max(s.singular[k]);
        }
    }
    let tsk = tri.skeleton();
    let mut seen = vec![false; tsk.nedges];
    for t in 0..tri.len() {
        let j = t % ns;
        for e in 0..EDGES.len() {
            let cls = tsk.edge_of[t][e].0 as usize;
            if seen[cls] {
                continue;
            }
            seen[cls] = true;
            let fcls = fsk.edge_of[j][e].0 as usize;
            if tsk.edge_degree[cls] != fsk.edge_degree[fcls] * ford[fcls] as usize {
                return true;
            }
        }
    }
    false
}

/// True iff Γ(I) contains torsion: some proper power of an elliptic cycle
/// product of the domain is ±Id modulo I. Γ(I) is normal, so conjugates
/// need not be checked.
pub fn principal_has_torsion(dom: &FundamentalDomain, ideal: &QuadIdeal) -> bool {
    let id = proj_canonicalize(&ProjMatrix::identity(dom.d), ideal);
    crate::geometry::elliptic_elements(dom)
        .iter()
        .any(|(h, k)| (1..*k as i64).any(|j| proj_canonicalize(&h.pow(j), ideal) == id))
}
