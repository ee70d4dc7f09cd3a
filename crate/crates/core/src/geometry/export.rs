//! Barycentric subdivision of a verified polyhedron into the domain format.

use std::collections::HashMap;

use crate::ring::ProjMatrix;

use super::domain::{DomainSimplex, FundamentalDomain};
use super::polyhedron::ConvexPolyhedron;

/// One simplex per flag (vertex ⊂ edge ⊂ face). Vertex i of a simplex is
/// the centre of its i-cell; faces 0, 1, 2 swap the vertex, edge and face
/// of the flag; face 3 goes to the mate flag through g_f.
pub fn barycentric_export(p: &ConvexPolyhedron) -> FundamentalDomain {
    let mut flags: Vec<(usize, usize, usize)> = Vec::new();
    for (fi, face) in p.faces.iter().enumerate() {
        let n = face.vertices.len();
        for k in 0..n {
            let (a, b) = (face.vertices[k], face.vertices[(k + 1) % n]);
            let e = p.edge_id(a, b).expect("edge");
            flags.push((a, e, fi));
            flags.push((b, e, fi));
        }
    }
    let index: HashMap<(usize, usize, usize), usize> =
        flags.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut simplices = Vec::with_capacity(flags.len());
    for &(v, e, f) in &flags {
        let (a, b) = p.edges[e];
        let other_v = if a == v { b } else { a };
        let face = &p.faces[f];
        let n = face.vertices.len();
        let k = face.vertices.iter().position(|&x| x == v).expect("vertex of face");
        let (prev, next) = (face.vertices[(k + n - 1) % n], face.vertices[(k + 1) % n]);
        let e_prev = p.edge_id(prev, v).expect("edge");
        let e_next = p.edge_id(v, next).expect("edge");
        let other_e = if e_prev == e { e_next } else { e_prev };
        let other_f = if p.edge_faces[e][0] == f { p.edge_faces[e][1] } else { p.edge_faces[e][0] };
        let mf = face.mate;
        let mv = p.map_vertex(f, v);
        let me = p.edge_id(p.map_vertex(f, a), p.map_vertex(f, b)).expect("mapped edge");
        simplices.push(DomainSimplex {
            mate: index[&(mv, me, mf)],
            matrix: face.element,
            singular: [1, 1, 1],
            ideal_vertex: p.ideal[v],
            neighbors: [index[&(other_v, e, f)], index[&(v, other_e, f)], index[&(v, e, other_f)]],
        });
    }
    let mut dom = FundamentalDomain { d: p.d, simplices };
    let triples = singular_triples(&dom);
    for (s, t) in dom.simplices.iter_mut().zip(triples) {
        s.singular = t;
    }
    dom
}

/// Face-3 edge pairs in singular-triple order.
pub const FACE3_EDGES: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Walks around every face-3 edge class, alternating the inner face and
/// face 3. Yields (edge slot, simplices visited, product of the mating
/// matrices picked up on the way).
fn edge_cycles(dom: &FundamentalDomain) -> Vec<(usize, Vec<usize>, ProjMatrix)> {
    let n = dom.len();
    let mut out = Vec::new();
    for (k, &(a, b)) in FACE3_EDGES.iter().enumerate() {
        let c = 3 - a - b;
        let mut done = vec![false; n];
        for start in 0..n {
            if done[start] {
                continue;
            }
            let mut h = ProjMatrix::identity(dom.d);
            let mut cur = start;
            let mut visited = Vec::new();
            loop {
                visited.push(cur);
                cur = dom.simplices[cur].neighbors[c];
                visited.push(cur);
                h = h * dom.simplices[cur].matrix;
                cur = dom.simplices[cur].mate;
                if cur == start {
                    break;
                }
            }
            for &s in &visited {
                done[s] = true;
            }
            out.push((k, visited, h));
        }
    }
    out
}

fn element_order(h: &ProjMatrix) -> u32 {
    (1..=6).find(|&e| h.pow(e).is_identity()).unwrap_or(0) as u32
}

/// Singular order of the face-3 edges (0,1), (0,2), (1,2) of every simplex:
/// the order of the product of mating matrices around the edge.
pub fn singular_triples(dom: &FundamentalDomain) -> Vec<[u32; 3]> {
    let mut out = vec![[0u32; 3]; dom.len()];
    for (k, visited, h) in edge_cycles(dom) {
        let order = element_order(&h);
        for s in visited {
            out[s][k] = order;
        }
    }
    out
}

/// Elliptic cycle products with their orders. Every torsion element of
/// PSL(2, O_d) is conjugate to a power of one of them.
pub fn elliptic_elements(dom: &FundamentalDomain) -> Vec<(ProjMatrix, u32)> {
    let mut out: Vec<(ProjMatrix, u32)> = Vec::new();
    for (_, _, h) in edge_cycles(dom) {
        let order = element_order(&h);
        if order > 1 && !out.iter().any(|(g, _)| g.canonical() == h.canonical()) {
            out.push((h, order));
        }
    }
    out
}
