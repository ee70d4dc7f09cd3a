//! Tetrahedral complexes glued along faces: skeleton classes, vertex links,
//! orientation, canonical signatures, and the congruence-quotient builders.

pub mod build;
pub mod perm;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::RingError;

pub use build::{
    build_gamma1, build_principal, detect_orbifold, principal_has_torsion, DEFAULT_TET_BUDGET,
};
pub use perm::Perm;

/// Unglued face marker.
pub const NONE: u32 = u32::MAX;

/// Vertex pairs of the six edges, in edge-index order.
pub const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn edge_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    EDGES.iter().position(|&e| e == (a, b)).expect("distinct vertices")
}

#[derive(Debug, Error)]
pub enum TriangulationError {
    #[error("triangulation would need more than {0} tetrahedra")]
    BudgetExceeded(usize),
    #[error("inconsistent gluing: {0}")]
    InconsistentGluing(String),
    #[error("not a barycentric subdivision: {0}")]
    NotBarycentric(String),
    #[error("invalid triangulation file: {0}")]
    Format(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A tetrahedral complex. Face `f` of tet `t` is glued to face
/// `gluing[t][f].apply(f)` of `adj[t][f]`, vertex i going to vertex
/// `gluing[t][f].apply(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    pub adj: Vec<[u32; 4]>,
    pub gluing: Vec<[Perm; 4]>,
    pub ideal: Vec<[bool; 4]>,
    /// Label of each domain copy (integer residue data), if built by copies.
    pub labels: Vec<Vec<i64>>,
    /// Tetrahedra per copy, 0 when there is no copy structure.
    pub per_copy: usize,
}

/// Vertex, edge and face classes.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub vertex_of: Vec<[u32; 4]>,
    /// Edge class of each (tet, edge) and whether the tet orientation
    /// (low → high vertex) is opposite to the class orientation.
    pub edge_of: Vec<[(u32, bool); 6]>,
    pub face_of: Vec<[u32; 4]>,
    pub nvertices: usize,
    pub nedges: usize,
    pub nfaces: usize,
    pub edge_degree: Vec<usize>,
    pub vertex_ideal: Vec<bool>,
    /// A representative (tet, edge) of each edge class, class-oriented.
    pub edge_rep: Vec<(u32, u8)>,
    /// A representative (tet, face) of each face class.
    pub face_rep: Vec<(u32, u8)>,
}

/// Cusp and vertex-link data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspInfo {
    pub count: usize,
    pub finite: usize,
    /// Euler characteristic of the link of each vertex class.
    pub link_euler: Vec<i64>,
    pub ideal: Vec<bool>,
    /// (tet, vertex) members of each ideal class, in cusp order.
    pub members: Vec<Vec<(u32, u8)>>,
}

struct ParityUf {
    parent: Vec<u32>,
    parity: Vec<bool>,
}

impl ParityUf {
    fn new(n: usize) -> Self {
        ParityUf { parent: (0..n as u32).collect(), parity: vec![false; n] }
    }
    fn find(&mut self, x: usize) -> (usize, bool) {
        let mut path = Vec::new();
        let mut r = x;
        let mut par = false;
        while self.parent[r] as usize != r {
            path.push(r);
            par ^= self.parity[r];
            r = self.parent[r] as usize;
        }
        // compress
        let mut acc = par;
        for &p in &path {
            let own = self.parity[p];
            self.parent[p] = r as u32;
            self.parity[p] = acc;
            acc ^= own;
        }
        (r, par)
    }
    /// Records x ~ y with relative parity p.
    fn union(&mut self, x: usize, y: usize, p: bool) {
        let (rx, px) = self.find(x);
        let (ry, py) = self.find(y);
        if rx != ry {
            let (a, b) = if rx < ry { (ry, rx) } else { (rx, ry) };
            self.parent[a] = b as u32;
            self.parity[a] = px ^ py ^ p;
        }
    }
}

impl Triangulation {
    pub fn new(n: usize) -> Self {
        Triangulation {
            adj: vec![[NONE; 4]; n],
            gluing: vec![[Perm::IDENTITY; 4]; n],
            ideal: vec![[false; 4]; n],
            labels: Vec::new(),
            per_copy: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Glues face f of a to the face p(f) of b, both directions.
    pub fn glue(&mut self, a: usize, f: usize, b: usize, p: Perm) {
        let g = p.apply(f);
        self.adj[a][f] = b as u32;
        self.gluing[a][f] = p;
        self.adj[b][g] = a as u32;
        self.gluing[b][g] = p.inverse();
    }

    pub fn is_closed(&self) -> bool {
        self.adj.iter().all(|a| a.iter().all(|&x| x != NONE))
    }

    /// Gluing consistency: every glued face points back with the inverse
    /// permutation and no face is glued to itself.
    pub fn check(&self) -> Result<(), TriangulationError> {
        for t in 0..self.len() {
            for f in 0..4 {
                let u = self.adj[t][f];
                if u == NONE {
                    continue;
                }
                let p = self.gluing[t][f];
                let g = p.apply(f);
                let u = u as usize;
                if u >= self.len() {
                    return Err(TriangulationError::InconsistentGluing(format!("tet {} face {}", t, f)));
                }
                if (u, g) == (t, f)
                    || self.adj[u][g] as usize != t
                    || self.gluing[u][g] != p.inverse()
                {
                    return Err(TriangulationError::InconsistentGluing(format!(
                        "tet {} face {} does not glue back",
                        t, f
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn skeleton(&self) -> Skeleton {
        let n = self.len();
        let mut vuf = ParityUf::new(4 * n);
        let mut euf = ParityUf::new(6 * n);
        let mut face_of = vec![[NONE; 4]; n];
        let mut face_rep = Vec::new();
        for t in 0..n {
            for f in 0..4 {
                let u = self.adj[t][f];
                if face_of[t][f] == NONE {
                    let id = face_rep.len() as u32;
                    face_rep.push((t as u32, f as u8));
                    face_of[t][f] = id;
                    if u != NONE {
                        let g = self.gluing[t][f].apply(f);
                        face_of[u as usize][g] = id;
                    }
                }
                if u == NONE {
                    continue;
                }
                let p = self.gluing[t][f];
                let u = u as usize;
                for v in (0..4).filter(|&v| v != f) {
                    vuf.union(4 * t + v, 4 * u + p.apply(v), false);
                }
                for &(a, b) in EDGES.iter() {
                    if a == f || b == f {
                        continue;
                    }
                    let (pa, pb) = (p.apply(a), p.apply(b));
                    euf.union(6 * t + edge_index(a, b), 6 * u + edge_index(pa, pb), pa > pb);
                }
            }
        }
        let mut vmap = vec![NONE; 4 * n];
        let mut nvertices = 0u32;
        let mut vertex_of = vec![[0u32; 4]; n];
        let mut vertex_ideal = Vec::new();
        for t in 0..n {
            for v in 0..4 {
                let (r, _) = vuf.find(4 * t + v);
                if vmap[r] == NONE {
                    vmap[r] = nvertices;
                    nvertices += 1;
                    vertex_ideal.push(false);
                }
                vertex_of[t][v] = vmap[r];
                if self.ideal[t][v] {
                    vertex_ideal[vmap[r] as usize] = true;
                }
            }
        }
        let mut emap = vec![NONE; 6 * n];
        let mut edge_of = vec![[(0u32, false); 6]; n];
        let mut edge_degree = Vec::new();
        let mut edge_rep = Vec::new();
        for t in 0..n {
            for e in 0..6 {
                let (r, par) = euf.find(6 * t + e);
                if emap[r] == NONE {
                    emap[r] = edge_degree.len() as u32;
                    edge_degree.push(0);
                    let (rt, re) = (r / 6, r % 6);
                    edge_rep.push((rt as u32, re as u8));
                }
                let id = emap[r];
                edge_of[t][e] = (id, par);
                edge_degree[id as usize] += 1;
            }
        }
        Skeleton {
            vertex_of,
            edge_of,
            face_of,
            nvertices: nvertices as usize,
            nedges: edge_degree.len(),
            nfaces: face_rep.len(),
            edge_degree,
            vertex_ideal,
            edge_rep,
            face_rep,
        }
    }

    /// Cusps and vertex links. The link of a class with n corners and
    /// g edge-end germs has χ = g − n/2.
    pub fn classify_vertices(&self) -> CuspInfo {
        let sk = self.skeleton();
        self.classify_with(&sk)
    }

    pub fn classify_with(&self, sk: &Skeleton) -> CuspInfo {
        let nv = sk.nvertices;
        let mut corners = vec![0i64; nv];
        let mut germs = vec![std::collections::HashSet::new(); nv];
        for t in 0..self.len() {
            for v in 0..4 {
                corners[sk.vertex_of[t][v] as usize] += 1;
            }
            for (e, &(a, b)) in EDGES.iter().enumerate() {
                let (cls, rev) = sk.edge_of[t][e];
                // germ = (edge class, which end in class orientation)
                let (lo_end, hi_end) = if rev { (1u8, 0u8) } else { (0u8, 1u8) };
                germs[sk.vertex_of[t][a] as usize].insert((cls, lo_end));
                germs[sk.vertex_of[t][b] as usize].insert((cls, hi_end));
            }
        }
        let link_euler: Vec<i64> =
            (0..nv).map(|c| germs[c].len() as i64 - corners[c] / 2).collect();
        let mut members = vec![Vec::new(); nv];
        for t in 0..self.len() {
            for v in 0..4 {
                members[sk.vertex_of[t][v] as usize].push((t as u32, v as u8));
            }
        }
        let ideal_members: Vec<Vec<(u32, u8)>> = members
            .into_iter()
            .enumerate()
            .filter(|(c, _)| sk.vertex_ideal[*c])
            .map(|(_, m)| m)
            .collect();
        let count = ideal_members.len();
        CuspInfo {
            count,
            finite: nv - count,
            link_euler,
            ideal: sk.vertex_ideal.clone(),
            members: ideal_members,
        }
    }

    /// V − E + F − T.
    pub fn euler_characteristic(&self) -> i64 {
        let sk = self.skeleton();
        sk.nvertices as i64 - sk.nedges as i64 + sk.nfaces as i64 - self.len() as i64
    }

    /// Tetrahedron signs with ε_a ε_b sign(p) = −1 across every gluing,
    /// or None if no consistent choice exists.
    pub fn orientation(&self) -> Option<Vec<i8>> {
        let n = self.len();
        let mut sign = vec![0i8; n];
        for s in 0..n {
            if sign[s] != 0 {
                continue;
            }
            sign[s] = 1;
            let mut queue = VecDeque::from([s]);
            while let Some(t) = queue.pop_front() {
                for f in 0..4 {
                    let u = self.adj[t][f];
                    if u == NONE {
                        continue;
                    }
                    let want = -sign[t] * self.gluing[t][f].sign();
                    let u = u as usize;
                    if sign[u] == 0 {
                        sign[u] = want;
                        queue.push_back(u);
                    } else if sign[u] != want {
                        return None;
                    }
                }
            }
        }
        Some(sign)
    }

    pub fn is_orientable(&self) -> bool {
        self.orientation().is_some()
    }

    pub fn components(&self) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(t) = stack.pop() {
                for &u in &self.adj[t] {
                    if u != NONE && !seen[u as usize] {
                        seen[u as usize] = true;
                        stack.push(u as usize);
                    }
                }
            }
        }
        count
    }

    /// Relabeling-invariant signature: the lexicographically least BFS
    /// encoding over all start tetrahedra and start permutations (only the
    /// identity start when `labelled`, i.e. vertex labels are intrinsic).
    pub fn canonical_signature(&self, labelled: bool) -> Vec<u32> {
        let starts: Vec<Perm> = if labelled { vec![Perm::IDENTITY] } else { Perm::all() };
        let mut best: Option<Vec<u32>> = None;
        for s in 0..self.len() {
            for &p0 in &starts {
                let code = self.encode_from(s, p0, best.as_deref());
                if let Some(c) = code {
                    if best.as_ref().is_none_or(|b| c < *b) {
                        best = Some(c);
                    }
                }
            }
        }
        best.unwrap_or_default()
    }

    /// BFS encoding; relabelling maps old vertex i of a visited tet to new
    /// vertex perm(i). Aborts early once the code exceeds `bound`.
    fn encode_from(&self, start: usize, p0: Perm, bound: Option<&[u32]>) -> Option<Vec<u32>> {
        let n = self.len();
        let mut order = vec![NONE; n];
        let mut perm = vec![Perm::IDENTITY; n];
        let mut queue = Vec::with_capacity(n);
        order[start] = 0;
        perm[start] = p0;
        queue.push(start);
        let mut code = Vec::with_capacity(n * 12);
        let mut head = 0;
        let mut less = false;
        while head < queue.len() {
            let t = queue[head];
            head += 1;
            let inv = perm[t].inverse();
            for nf in 0..4 {
                let f = inv.apply(nf);
                let u = self.adj[t][f];
                let entry = if u == NONE {
                    [NONE, 0]
                } else {
                    let u = u as usize;
                    let g = self.gluing[t][f];
                    if order[u] == NONE {
                        order[u] = queue.len() as u32;
                        // new vertex labels of u make the gluing read as identity
                        perm[u] = perm[t].compose(&g.inverse());
                        queue.push(u);
                    }
                    // gluing in new labels: perm[u] ∘ g ∘ perm[t]^-1
                    let q = perm[u].compose(&g).compose(&inv);
                    [order[u], q.index() as u32]
                };
                for x in entry {
                    if let Some(b) = bound {
                        if !less {
                            let k = code.len();
                            if k < b.len() {
                                if x > b[k] {
                                    return None;
                                }
                                if x < b[k] {
                                    less = true;
                                }
                            }
                        }
                    }
                    code.push(x);
                }
            }
            // ideal flags in new labels
            let mut flags = 0u32;
            for v in 0..4 {
                if self.ideal[t][inv.apply(v)] {
                    flags |= 1 << v;
                }
            }
            code.push(flags);
        }
        if queue.len() < n {
            // disconnected: encode remaining count to distinguish
            code.push(NONE - (n - queue.len()) as u32);
        }
        Some(code)
    }
}

/// JSON layout of a triangulation.
#[derive(Serialize, Deserialize)]
pub struct TriangulationFile {
    pub format_version: u32,
    pub tetrahedra: Vec<TetFile>,
    pub labels: Vec<Vec<i64>>,
    pub per_copy: usize,
    pub vertex_classes: Vec<[u32; 4]>,
    pub cusps: usize,
}

#[derive(Serialize, Deserialize)]
pub struct TetFile {
    pub neighbors: [i64; 4],
    pub gluings: [[u8; 4]; 4],
    pub ideal: [bool; 4],
}

pub const TRIANGULATION_FORMAT_VERSION: u32 = 1;

impl Triangulation {
    pub fn to_json(&self) -> String {
        let sk = self.skeleton();
        let cusps = sk.vertex_ideal.iter().filter(|&&b| b).count();
        let f = TriangulationFile {
            format_version: TRIANGULATION_FORMAT_VERSION,
            tetrahedra: (0..self.len())
                .map(|t| TetFile {
                    neighbors: self.adj[t].map(|u| if u == NONE { -1 } else { u as i64 }),
                    gluings: self.gluing[t].map(|p| p.images()),
                    ideal: self.ideal[t],
                })
                .collect(),
            labels: self.labels.clone(),
            per_copy: self.per_copy,
            vertex_classes: sk.vertex_of.clone(),
            cusps,
        };
        serde_json::to_string(&f).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, TriangulationError> {
        let f: TriangulationFile =
            serde_json::from_str(text).map_err(|e| TriangulationError::Format(e.to_string()))?;
        let mut t = Triangulation::new(f.tetrahedra.len());
        for (i, tet) in f.tetrahedra.iter().enumerate() {
            for k in 0..4 {
                t.adj[i][k] = if tet.neighbors[k] < 0 { NONE } else { tet.neighbors[k] as u32 };
                t.gluing[i][k] = Perm::from_images(tet.gluings[k])
                    .ok_or_else(|| TriangulationError::Format(format!("bad permutation at {}", i)))?;
            }
            t.ideal[i] = tet.ideal;
        }
        t.labels = f.labels;
        t.per_copy = f.per_copy;
        t.check()?;
        Ok(t)
    }
}
