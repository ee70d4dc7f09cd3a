//! Shrinking triangulations before homology: coarsening the barycentric
//! subdivision, then collapsing edges to remove finite vertices.

use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::triangulation::{edge_index, Perm, Triangulation, TriangulationError, EDGES, NONE};

/// Simplex counts per phase.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplifyStats {
    pub input: usize,
    pub coarsened: usize,
    pub collapsed: usize,
    pub collapses: usize,
    pub finite_vertices: usize,
}

/// Merges each group of four simplices around an edge from vertex 1 to
/// vertex 2 into one tetrahedron. The new vertices are, in order, the two
/// polyhedron vertices and the two cell centres of the group.
pub fn coarsen_barycentric(tri: &Triangulation) -> Result<Triangulation, TriangulationError> {
    let bad = |m: String| Err(TriangulationError::NotBarycentric(m));
    let n = tri.len();
    if tri.per_copy == 0 || !n.is_multiple_of(tri.per_copy) || !n.is_multiple_of(4) {
        return bad("no copy structure".into());
    }
    for t in 0..n {
        if tri.adj[t].contains(&NONE) || tri.gluing[t].iter().any(|p| *p != Perm::IDENTITY) {
            return bad(format!("tetrahedron {} is not glued by identities", t));
        }
        if tri.ideal[t][1] || tri.ideal[t][2] || tri.ideal[t][3] {
            return bad(format!("tetrahedron {} has an ideal centre vertex", t));
        }
        let n0 = tri.adj[t][0] as usize;
        let n3 = tri.adj[t][3] as usize;
        if n0 == t || n3 == t || tri.adj[n3][0] as usize != tri.adj[n0][3] as usize {
            return bad(format!("tetrahedron {} does not close a group of four", t));
        }
    }
    // group id and role (a = vertex swapped, b = cell swapped)
    let mut group = vec![u32::MAX; n];
    let mut role = vec![(0u8, 0u8); n];
    let mut reps = Vec::with_capacity(n / 4);
    for t in 0..n {
        if group[t] != u32::MAX {
            continue;
        }
        let g = reps.len() as u32;
        let n0 = tri.adj[t][0] as usize;
        let n3 = tri.adj[t][3] as usize;
        let n03 = tri.adj[n3][0] as usize;
        let members = [(t, 0, 0), (n0, 1, 0), (n3, 0, 1), (n03, 1, 1)];
        for &(s, a, b) in &members {
            if group[s] != u32::MAX {
                return bad(format!("tetrahedron {} lies in two groups", s));
            }
            group[s] = g;
            role[s] = (a, b);
        }
        reps.push([t, n0, n3, n03]);
    }
    let member = |g: usize, a: u8, b: u8| reps[g][(a + 2 * b) as usize];
    // coarse vertex of fine vertex i of s, if it is one
    let coarse = |s: usize, i: usize| -> Option<usize> {
        match i {
            0 => Some(role[s].0 as usize),
            3 => Some(2 + role[s].1 as usize),
            _ => None,
        }
    };
    let m = reps.len();
    let mut out = Triangulation::new(m);
    for g in 0..m {
        let r = reps[g][0];
        out.ideal[g] = [tri.ideal[r][0], tri.ideal[reps[g][1]][0], false, false];
        for x in 0..4 {
            // members and fine face forming the coarse face opposite x
            let (fine_face, fixed_a, fixed_b) = match x {
                3 => (2, None, Some(0u8)),
                2 => (2, None, Some(1u8)),
                1 => (1, Some(0u8), None),
                _ => (1, Some(1u8), None),
            };
            let mut images = [usize::MAX; 4];
            for y in (0..4).filter(|&y| y != x) {
                let (a, b, fine_v) = match y {
                    0 | 1 => (y as u8, fixed_b.unwrap_or(0), 0),
                    _ => (fixed_a.unwrap_or(0), (y - 2) as u8, 3),
                };
                let a = fixed_a.unwrap_or(a);
                let b = fixed_b.unwrap_or(b);
                let s = member(g, a, b);
                debug_assert_eq!(coarse(s, fine_v), Some(y));
                let u = tri.adj[s][fine_face] as usize;
                let img = coarse(u, tri.gluing[s][fine_face].apply(fine_v));
                match img {
                    Some(c) => images[y] = c,
                    None => return bad(format!("tetrahedron {} glues a centre to a corner", s)),
                }
            }
            let s = member(g, fixed_a.unwrap_or(0), fixed_b.unwrap_or(0));
            let h = group[tri.adj[s][fine_face] as usize] as usize;
            let used: Vec<usize> = images.iter().copied().filter(|&v| v != usize::MAX).collect();
            images[x] = (0..4).find(|v| !used.contains(v)).expect("three images");
            let p = Perm::from_images(images.map(|v| v as u8))
                .ok_or_else(|| TriangulationError::NotBarycentric(format!("group {} face {}", g, x)))?;
            out.adj[g][x] = h as u32;
            out.gluing[g][x] = p;
        }
    }
    out.check().map_err(|e| TriangulationError::NotBarycentric(e.to_string()))?;
    Ok(out)
}

/// Working state for edge collapses on a triangulation with dead slots.
struct Collapser {
    tri: Triangulation,
    alive: Vec<bool>,
    /// Vertex class id of every (tet, vertex) slot.
    vclass: Vec<[u32; 4]>,
    members: Vec<Vec<(u32, u8)>>,
    vertex_ideal: Vec<bool>,
    touched: Vec<usize>,
}

/// One step of a walk around an edge.
#[derive(Clone, Copy)]
struct Embedding {
    tet: usize,
    a: usize,
    b: usize,
}

impl Collapser {
    fn new(tri: &Triangulation) -> Self {
        let sk = tri.skeleton();
        let mut members = vec![Vec::new(); sk.nvertices];
        for t in 0..tri.len() {
            for v in 0..4 {
                members[sk.vertex_of[t][v] as usize].push((t as u32, v as u8));
            }
        }
        Collapser {
            tri: tri.clone(),
            alive: vec![true; tri.len()],
            vclass: sk.vertex_of.clone(),
            members,
            vertex_ideal: sk.vertex_ideal.clone(),
            touched: Vec::new(),
        }
    }

    /// Tetrahedra around edge (a, b) of tet t, in cyclic order.
    fn walk(&self, t: usize, a: usize, b: usize) -> Vec<Embedding> {
        let mut out = Vec::new();
        let others: Vec<usize> = (0..4).filter(|&v| v != a && v != b).collect();
        let (mut cur, mut ca, mut cb, mut exit) = (t, a, b, others[0]);
        loop {
            out.push(Embedding { tet: cur, a: ca, b: cb });
            let p = self.tri.gluing[cur][exit];
            let next = self.tri.adj[cur][exit] as usize;
            let entry = p.apply(exit);
            ca = p.apply(ca);
            cb = p.apply(cb);
            cur = next;
            exit = 6 - ca - cb - entry;
            if cur == t && ((ca, cb) == (a, b) || (ca, cb) == (b, a)) && exit == others[0] {
                break;
            }
            if out.len() > 4 * self.tri.len() + 8 {
                break;
            }
        }
        out
    }

    fn edge_key(&self, t: usize, a: usize, b: usize) -> (usize, usize) {
        let w = self.walk(t, a, b);
        let key = w.iter().map(|e| 6 * e.tet + edge_index(e.a, e.b)).min().expect("nonempty");
        (key, w.len())
    }

    fn face_key(&self, t: usize, f: usize) -> usize {
        let u = self.tri.adj[t][f] as usize;
        let g = self.tri.gluing[t][f].apply(f);
        (4 * t + f).min(4 * u + g)
    }

    /// Collapses edge (a, b) of t if it is collapsible; returns success.
    fn try_collapse(&mut self, t: usize, a: usize, b: usize) -> bool {
        let (p, q) = (self.vclass[t][a], self.vclass[t][b]);
        if p == q || (self.vertex_ideal[p as usize] && self.vertex_ideal[q as usize]) {
            return false;
        }
        let star = self.walk(t, a, b);
        let mut seen = std::collections::HashSet::new();
        if !star.iter().all(|e| seen.insert(e.tet)) {
            return false;
        }
        // the edge must occur only once in each tetrahedron of its star
        let key = self.edge_key(t, a, b).0;
        for e in &star {
            for &(x, y) in EDGES.iter() {
                if (x, y) != (e.a.min(e.b), e.a.max(e.b)) && self.edge_key(e.tet, x, y).0 == key {
                    return false;
                }
            }
        }
        // edges identified in pairs must form a forest
        let mut uf: HashMap<usize, usize> = HashMap::new();
        fn find(uf: &mut HashMap<usize, usize>, x: usize) -> usize {
            let mut r = x;
            while let Some(&p) = uf.get(&r) {
                if p == r {
                    break;
                }
                r = p;
            }
            uf.insert(x, r);
            r
        }
        let mut tri_seen = std::collections::HashSet::new();
        for e in &star {
            for x in (0..4).filter(|&v| v != e.a && v != e.b) {
                // triangle (a, b, x) of this tetrahedron
                let opp = 6 - e.a - e.b - x;
                if !tri_seen.insert(self.face_key(e.tet, opp)) {
                    continue;
                }
                let ea = self.edge_key(e.tet, e.a, x).0;
                let eb = self.edge_key(e.tet, e.b, x).0;
                let (ra, rb) = (find(&mut uf, ea), find(&mut uf, eb));
                if ra == rb {
                    return false;
                }
                uf.insert(ra, rb);
            }
        }
        // faces identified in pairs must form a forest
        let mut fuf: HashMap<usize, usize> = HashMap::new();
        for e in &star {
            let fa = self.face_key(e.tet, e.a);
            let fb = self.face_key(e.tet, e.b);
            let (ra, rb) = (find(&mut fuf, fa), find(&mut fuf, fb));
            if ra == rb {
                return false;
            }
            fuf.insert(ra, rb);
        }
        self.collapse(&star, p, q);
        true
    }

    fn collapse(&mut self, star: &[Embedding], p: u32, q: u32) {
        self.touched.clear();
        for e in star {
            let t = e.tet;
            let (ua, pa) = (self.tri.adj[t][e.a] as usize, self.tri.gluing[t][e.a]);
            let (ub, pb) = (self.tri.adj[t][e.b] as usize, self.tri.gluing[t][e.b]);
            let fa = pa.apply(e.a);
            let fb = pb.apply(e.b);
            let sigma = Perm::swap(e.a, e.b);
            // u_a → t → (swap) → t → u_b
            let link = pb.compose(&sigma).compose(&pa.inverse());
            self.tri.adj[t] = [NONE; 4];
            self.alive[t] = false;
            self.tri.adj[ua][fa] = ub as u32;
            self.tri.gluing[ua][fa] = link;
            self.tri.adj[ub][fb] = ua as u32;
            self.tri.gluing[ub][fb] = link.inverse();
            self.touched.push(ua);
            self.touched.push(ub);
        }
        // merge the finite vertex into the other one
        let (keep, gone) = if self.vertex_ideal[q as usize] { (q, p) } else { (p, q) };
        let moved = std::mem::take(&mut self.members[gone as usize]);
        for &(t, v) in &moved {
            self.vclass[t as usize][v as usize] = keep;
        }
        self.members[keep as usize].extend(moved);
        self.members[keep as usize].retain(|&(t, _)| self.alive[t as usize]);
    }

    fn finish(self) -> Triangulation {
        let mut map = vec![NONE; self.tri.len()];
        let mut k = 0u32;
        for t in 0..self.tri.len() {
            if self.alive[t] {
                map[t] = k;
                k += 1;
            }
        }
        let mut out = Triangulation::new(k as usize);
        for t in 0..self.tri.len() {
            if !self.alive[t] {
                continue;
            }
            let i = map[t] as usize;
            out.adj[i] = self.tri.adj[t].map(|u| map[u as usize]);
            out.gluing[i] = self.tri.gluing[t];
            out.ideal[i] = std::array::from_fn(|v| self.vertex_ideal[self.vclass[t][v] as usize]);
        }
        out
    }

    fn finite_vertices(&self) -> usize {
        (0..self.members.len())
            .filter(|&v| !self.vertex_ideal[v] && self.members[v].iter().any(|&(t, _)| self.alive[t as usize]))
            .count()
    }
}

/// Collapses edges, highest degree first, until no edge joining a finite
/// vertex to another vertex can be collapsed. Returns the result and the
/// number of collapses.
pub fn collapse_edges(tri: &Triangulation) -> (Triangulation, usize) {
    let mut c = Collapser::new(tri);
    let mut count = 0;
    loop {
        let before = count;
        let mut heap = BinaryHeap::new();
        for t in 0..c.tri.len() {
            if !c.alive[t] {
                continue;
            }
            for &(a, b) in EDGES.iter() {
                let (p, q) = (c.vclass[t][a], c.vclass[t][b]);
                if p == q || (c.vertex_ideal[p as usize] && c.vertex_ideal[q as usize]) {
                    continue;
                }
                let (key, deg) = c.edge_key(t, a, b);
                if key == 6 * t + edge_index(a, b) {
                    heap.push((deg, std::cmp::Reverse(key)));
                }
            }
        }
        while let Some((deg, std::cmp::Reverse(key))) = heap.pop() {
            let (t, e) = (key / 6, key % 6);
            if !c.alive[t] {
                continue;
            }
            let (a, b) = EDGES[e];
            let (cur_key, cur_deg) = c.edge_key(t, a, b);
            if cur_key != key {
                continue;
            }
            if cur_deg != deg {
                heap.push((cur_deg, std::cmp::Reverse(key)));
                continue;
            }
            if c.try_collapse(t, a, b) {
                count += 1;
                // requeue edges of the tetrahedra next to the removed star
                let touched = c.touched.clone();
                for u in touched {
                    if !c.alive[u] {
                        continue;
                    }
                    for &(x, y) in EDGES.iter() {
                        let (p, q) = (c.vclass[u][x], c.vclass[u][y]);
                        if p == q || (c.vertex_ideal[p as usize] && c.vertex_ideal[q as usize]) {
                            continue;
                        }
                        let (k2, d2) = c.edge_key(u, x, y);
                        heap.push((d2, std::cmp::Reverse(k2)));
                    }
                }
            }
        }
        if count == before || c.finite_vertices() == 0 {
            break;
        }
    }
    (c.finish(), count)
}

/// Coarsening (when the input is barycentric) followed by edge collapse.
pub fn simplify(tri: &Triangulation) -> (Triangulation, SimplifyStats) {
    let mut stats = SimplifyStats { input: tri.len(), ..Default::default() };
    let coarse = coarsen_barycentric(tri).unwrap_or_else(|_| tri.clone());
    stats.coarsened = coarse.len();
    let (out, n) = collapse_edges(&coarse);
    stats.collapsed = out.len();
    stats.collapses = n;
    stats.finite_vertices = out.classify_vertices().finite;
    (out, stats)
}
