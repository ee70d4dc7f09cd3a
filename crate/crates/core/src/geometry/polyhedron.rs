//! Exact Dirichlet polyhedra by incremental half-space cutting.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::ring::{ProjMatrix, QuadInt};

use super::{q, Centering, GeometryError, HalfSpace, Qd, Q};

/// Homogeneous integer point (x0, x1, x2, x3′) with x0 > 0.
pub type HPoint = [BigInt; 4];

/// A face of the polyhedron with its pairing.
#[derive(Clone, Debug)]
pub struct PolyFace {
    /// Covector c with c·x ≤ 0 inside.
    pub plane: [BigInt; 4],
    /// g_f: carries the mate face onto this one.
    pub element: ProjMatrix,
    pub mate: usize,
    /// Vertex cycle.
    pub vertices: Vec<usize>,
    /// Image under g_f⁻¹ of each vertex in `vertices` (a vertex of the mate).
    pub vertex_map: Vec<usize>,
}

/// A verified candidate fundamental polyhedron in centred coordinates.
#[derive(Clone, Debug)]
pub struct ConvexPolyhedron {
    pub d: i64,
    pub centering: Centering,
    pub vertices: Vec<HPoint>,
    pub ideal: Vec<bool>,
    pub faces: Vec<PolyFace>,
    pub edges: Vec<(usize, usize)>,
    /// The two faces containing each edge.
    pub edge_faces: Vec<[usize; 2]>,
    pub edge_orders: Vec<u32>,
}

#[derive(Clone, Debug)]
struct Vertex {
    x: HPoint,
    planes: Vec<u32>,
}

fn dot(c: &[BigInt; 4], x: &HPoint) -> BigInt {
    &c[0] * &x[0] + &c[1] * &x[1] + &c[2] * &x[2] + &c[3] * &x[3]
}

fn primitive(mut x: HPoint) -> HPoint {
    let mut g = BigInt::zero();
    for v in &x {
        g = g.gcd(v);
    }
    if !g.is_zero() && !g.is_one() {
        for v in x.iter_mut() {
            *v = &*v / &g;
        }
    }
    if x[0].is_negative() {
        for v in x.iter_mut() {
            *v = -&*v;
        }
    }
    x
}

fn shared(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().filter(|x| b.binary_search(x).is_ok()).copied().collect()
}

/// Incremental intersection of half-spaces with a bounding box.
struct Cutter {
    planes: Vec<[BigInt; 4]>,
    verts: Vec<Vertex>,
}

const BOX_PLANES: usize = 6;

impl Cutter {
    /// The box |x|, |y|, |z′| ≤ 2 around the unit quadric.
    fn new() -> Self {
        let mut planes = Vec::new();
        for axis in 1..4 {
            for s in [1i64, -1] {
                let mut c: [BigInt; 4] = std::array::from_fn(|_| BigInt::zero());
                c[0] = BigInt::from(-2);
                c[axis] = BigInt::from(s);
                planes.push(c);
            }
        }
        let mut verts = Vec::new();
        for sx in [1i64, -1] {
            for sy in [1i64, -1] {
                for sz in [1i64, -1] {
                    let x = [1, 2 * sx, 2 * sy, 2 * sz].map(BigInt::from);
                    let pl = |axis: usize, s: i64| ((axis - 1) * 2 + (s < 0) as usize) as u32;
                    let mut ps = vec![pl(1, sx), pl(2, sy), pl(3, sz)];
                    ps.sort_unstable();
                    verts.push(Vertex { x, planes: ps });
                }
            }
        }
        Cutter { planes, verts }
    }

    /// Cuts by c·x ≤ 0. Returns false if the half-space is redundant.
    fn cut(&mut self, c: [BigInt; 4]) -> bool {
        let s: Vec<BigInt> = self.verts.iter().map(|v| dot(&c, &v.x)).collect();
        if s.iter().all(|x| !x.is_positive()) {
            return false;
        }
        let id = self.planes.len() as u32;
        let mut next = Vec::with_capacity(self.verts.len() + 8);
        let neg: Vec<usize> = (0..s.len()).filter(|&i| s[i].is_negative()).collect();
        let pos: Vec<usize> = (0..s.len()).filter(|&i| s[i].is_positive()).collect();
        for &u in &neg {
            for &v in &pos {
                let (pu, pv) = (&self.verts[u].planes, &self.verts[v].planes);
                if shared(pu, pv) < 2 {
                    continue;
                }
                let x: HPoint = std::array::from_fn(|k| &s[v] * &self.verts[u].x[k] - &s[u] * &self.verts[v].x[k]);
                let mut planes = intersect(pu, pv);
                planes.push(id);
                next.push(Vertex { x: primitive(x), planes });
            }
        }
        for (i, v) in self.verts.iter().enumerate() {
            if s[i].is_negative() {
                next.push(v.clone());
            } else if s[i].is_zero() {
                let mut v = v.clone();
                v.planes.push(id);
                next.push(v);
            }
        }
        self.planes.push(c);
        self.verts = next;
        true
    }
}

/// All elements of PSL(2, O_d) with |a|² + |b|² + |c|² + |d|² ≤ bound,
/// one sign representative each.
pub fn sample_elements(d: i64, bound: i64) -> Vec<ProjMatrix> {
    let mut small = Vec::new();
    let r = (2.0 * (bound as f64).sqrt()).ceil() as i64 + 1;
    for b in -r..=r {
        for a in -r - r..=r + r {
            let x = QuadInt::new(d, a, b);
            if x.norm() <= bound {
                small.push(x);
            }
        }
    }
    small.sort_by_key(|x| x.norm());
    let one = QuadInt::one(d);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |m: ProjMatrix, out: &mut Vec<ProjMatrix>| {
        let m = m.canonical();
        if seen.insert(m.to_ints()) {
            out.push(m);
        }
    };
    for a in &small {
        for c in &small {
            let nac = a.norm() + c.norm();
            if nac > bound || (a.is_zero() && c.is_zero()) {
                continue;
            }
            if a.is_zero() {
                // −bc = 1: c a unit, b = −c⁻¹
                if !c.is_unit() {
                    continue;
                }
                let b = -(one.div_exact(c).expect("unit"));
                for dd in &small {
                    if nac + b.norm() + dd.norm() <= bound {
                        push(ProjMatrix::new(*a, b, *c, *dd), &mut out);
                    }
                }
                continue;
            }
            for b in &small {
                if nac + b.norm() > bound {
                    break;
                }
                if let Some(dd) = (one + *b * *c).div_exact(a) {
                    if nac + b.norm() + dd.norm() <= bound {
                        push(ProjMatrix::new(*a, *b, *c, dd), &mut out);
                    }
                }
            }
        }
    }
    out
}

/// Base points tried in order until no sampled element fixes one.
fn base_candidates(d: i64) -> Vec<Centering> {
    [(1, 7, 1, 11, 5, 4), (1, 5, 1, 9, 4, 3), (2, 7, 1, 13, 6, 5), (1, 9, 2, 17, 7, 5)]
        .iter()
        .map(|&(a, b, c, e, f, g)| Centering::at(Qd::new(d, q(a, b), q(c, e)), q(f, g)))
        .collect()
}

fn half_space_of(y: &[Q; 4], d: i64) -> HalfSpace {
    HalfSpace { c: [y[1].clone(), y[2].clone(), q(d, 1) * &y[3]], c0: &y[0] - Q::one() }
}

/// Candidate Dirichlet polyhedron from all elements with entry-norm sum
/// at most `sample_radius²`, verified for pairings, vertex matching and
/// edge orders.
pub fn dirichlet_domain(d: i64, sample_radius: i64) -> Result<ConvexPolyhedron, GeometryError> {
    if !crate::fpgroups::SUPPORTED_D.contains(&d) {
        return Err(GeometryError::UnsupportedD(d));
    }
    let bound = sample_radius * sample_radius;
    let elems: Vec<ProjMatrix> =
        sample_elements(d, bound).into_iter().filter(|m| !m.is_identity()).collect();
    let mut last = GeometryError::DegenerateBisector;
    for centering in base_candidates(d) {
        let mut ys = Vec::with_capacity(elems.len());
        let mut degenerate = false;
        for m in &elems {
            let y = centering.orbit_point(m);
            if y[0] == Q::one() {
                degenerate = true;
                break;
            }
            ys.push(y);
        }
        if degenerate {
            continue;
        }
        match build(d, centering, &elems, &ys) {
            Ok(p) => return Ok(p),
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn build(
    d: i64,
    centering: Centering,
    elems: &[ProjMatrix],
    ys: &[[Q; 4]],
) -> Result<ConvexPolyhedron, GeometryError> {
    let mut order: Vec<usize> = (0..elems.len()).collect();
    order.sort_by(|&a, &b| ys[a][0].cmp(&ys[b][0]));
    let mut cutter = Cutter::new();
    let mut plane_elem: Vec<Option<usize>> = vec![None; BOX_PLANES];
    for &i in &order {
        let h = half_space_of(&ys[i], d);
        let a = h.integer_covector();
        let c = [-a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone()];
        if cutter.cut(c) {
            plane_elem.push(Some(i));
        }
    }
    let dd = BigInt::from(d);
    for v in &cutter.verts {
        if v.planes.iter().any(|&p| (p as usize) < BOX_PLANES) {
            return Err(GeometryError::NotFiniteVolume);
        }
        let x = &v.x;
        if &x[1] * &x[1] + &x[2] * &x[2] + &dd * &x[3] * &x[3] > &x[0] * &x[0] {
            return Err(GeometryError::NotFiniteVolume);
        }
    }
    assemble(d, centering, elems, cutter, plane_elem)
}

fn assemble(
    d: i64,
    centering: Centering,
    elems: &[ProjMatrix],
    cutter: Cutter,
    plane_elem: Vec<Option<usize>>,
) -> Result<ConvexPolyhedron, GeometryError> {
    let dd = BigInt::from(d);
    let verts = cutter.verts;
    let ideal: Vec<bool> = verts
        .iter()
        .map(|v| {
            let x = &v.x;
            &x[1] * &x[1] + &x[2] * &x[2] + &dd * &x[3] * &x[3] == &x[0] * &x[0]
        })
        .collect();
    // facets: planes with at least three vertices
    let mut on_plane: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, v) in verts.iter().enumerate() {
        for &p in &v.planes {
            on_plane.entry(p).or_default().push(i);
        }
    }
    let mut facet_planes: Vec<u32> =
        on_plane.iter().filter(|(_, vs)| vs.len() >= 3).map(|(&p, _)| p).collect();
    facet_planes.sort_unstable();
    let facet_set: HashSet<u32> = facet_planes.iter().copied().collect();
    // edges: vertex pairs sharing two facet planes
    let fplanes: Vec<Vec<u32>> = verts
        .iter()
        .map(|v| v.planes.iter().copied().filter(|p| facet_set.contains(p)).collect())
        .collect();
    let mut edges = Vec::new();
    let mut edge_index = HashMap::new();
    for a in 0..verts.len() {
        for b in a + 1..verts.len() {
            if shared(&fplanes[a], &fplanes[b]) >= 2 {
                edge_index.insert((a, b), edges.len());
                edges.push((a, b));
            }
        }
    }
    // face cycles
    let mut faces = Vec::new();
    let mut face_of_plane = HashMap::new();
    for &p in &facet_planes {
        let vs = &on_plane[&p];
        let inface: HashSet<usize> = vs.iter().copied().collect();
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(a, b) in &edges {
            if inface.contains(&a) && inface.contains(&b) {
                adj.entry(a).or_default().push(b);
                adj.entry(b).or_default().push(a);
            }
        }
        if vs.iter().any(|v| adj.get(v).map_or(0, |n| n.len()) != 2) {
            return Err(GeometryError::IncompleteSample("face is not a polygon".into()));
        }
        let mut cycle = vec![vs[0]];
        let mut prev = usize::MAX;
        let mut cur = vs[0];
        loop {
            let n = &adj[&cur];
            let nx = if n[0] != prev { n[0] } else { n[1] };
            if nx == vs[0] {
                break;
            }
            cycle.push(nx);
            prev = cur;
            cur = nx;
        }
        if cycle.len() != vs.len() {
            return Err(GeometryError::IncompleteSample("face boundary is not one cycle".into()));
        }
        let ei = plane_elem[p as usize].ok_or(GeometryError::NotFiniteVolume)?;
        face_of_plane.insert(elems[ei].to_ints(), faces.len());
        faces.push(PolyFace {
            plane: cutter.planes[p as usize].clone(),
            element: elems[ei],
            mate: usize::MAX,
            vertices: cycle,
            vertex_map: Vec::new(),
        });
    }
    // pairings and vertex matching
    let lookup: HashMap<HPoint, usize> =
        verts.iter().enumerate().map(|(i, v)| (v.x.clone(), i)).collect();
    for f in 0..faces.len() {
        let inv = faces[f].element.inverse().canonical();
        let mate = *face_of_plane.get(&inv.to_ints()).ok_or_else(|| {
            GeometryError::IncompleteSample(format!("face {} has no mate", f))
        })?;
        let lm = centering.conjugate(&inv);
        let mut map = Vec::new();
        for &v in &faces[f].vertices {
            let img = lm.apply(&verts[v].x.clone().map(Q::from_integer));
            let y = to_integer_point(&img);
            let w = lookup.get(&y).copied().filter(|w| faces[mate].vertices.contains(w)).ok_or_else(|| {
                GeometryError::IncompleteSample(format!("vertex {} of face {} has no match", v, f))
            })?;
            map.push(w);
        }
        let distinct: HashSet<usize> = map.iter().copied().collect();
        if distinct.len() != faces[mate].vertices.len() || map.len() != distinct.len() {
            return Err(GeometryError::IncompleteSample(format!("face {} pairing is not a bijection", f)));
        }
        faces[f].mate = mate;
        faces[f].vertex_map = map;
    }
    let mut edge_faces = vec![[usize::MAX; 2]; edges.len()];
    for (fi, f) in faces.iter().enumerate() {
        let n = f.vertices.len();
        for k in 0..n {
            let (a, b) = (f.vertices[k], f.vertices[(k + 1) % n]);
            let e = edge_index[&(a.min(b), a.max(b))];
            let slot = if edge_faces[e][0] == usize::MAX { 0 } else { 1 };
            edge_faces[e][slot] = fi;
        }
    }
    if edge_faces.iter().any(|e| e[1] == usize::MAX) {
        return Err(GeometryError::IncompleteSample("edge in fewer than two faces".into()));
    }
    let mut poly = ConvexPolyhedron {
        d,
        centering,
        vertices: verts.into_iter().map(|v| v.x).collect(),
        ideal,
        faces,
        edges,
        edge_faces,
        edge_orders: Vec::new(),
    };
    poly.edge_orders = edge_singular_orders(&poly)?;
    Ok(poly)
}

fn to_integer_point(v: &[Q; 4]) -> HPoint {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    primitive(std::array::from_fn(|i| (&v[i] * &l).to_integer()))
}

impl ConvexPolyhedron {
    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.iter().position(|&e| e == key)
    }

    /// Image of vertex v of face f under g_f⁻¹.
    pub fn map_vertex(&self, f: usize, v: usize) -> usize {
        let face = &self.faces[f];
        let k = face.vertices.iter().position(|&x| x == v).expect("vertex of face");
        face.vertex_map[k]
    }

    /// Vertex classes under the face pairings.
    pub fn vertex_classes(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for f in &self.faces {
            for (k, &v) in f.vertices.iter().enumerate() {
                let (a, b) = (find(&mut parent, v), find(&mut parent, f.vertex_map[k]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let mut ids = HashMap::new();
        (0..n)
            .map(|v| {
                let r = find(&mut parent, v);
                let k = ids.len();
                *ids.entry(r).or_insert(k)
            })
            .collect()
    }

    /// Number of vertex classes of ideal vertices (cusps of the quotient).
    pub fn ideal_vertex_classes(&self) -> usize {
        let cls = self.vertex_classes();
        let set: HashSet<usize> = (0..cls.len()).filter(|&v| self.ideal[v]).map(|v| cls[v]).collect();
        set.len()
    }

    /// Exact check that each pairing maps its mate's vertices onto the
    /// face and the mate's plane onto the face plane.
    pub fn verify_pairings(&self) -> bool {
        for (fi, f) in self.faces.iter().enumerate() {
            let mate = &self.faces[f.mate];
            if mate.mate != fi || !(mate.element * f.element).is_identity() {
                return false;
            }
            let l = self.centering.conjugate(&f.element);
            for (k, &v) in f.vertices.iter().enumerate() {
                let w = f.vertex_map[k];
                let img = l.apply(&self.vertices[w].clone().map(Q::from_integer));
                if to_integer_point(&img) != self.vertices[v] || !dot(&f.plane, &self.vertices[v]).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Singular order of each edge: the order of the product of face
/// pairings around its cycle.
pub fn edge_singular_orders(p: &ConvexPolyhedron) -> Result<Vec<u32>, GeometryError> {
    let mut orders = vec![0u32; p.edges.len()];
    for e0 in 0..p.edges.len() {
        if orders[e0] != 0 {
            continue;
        }
        let (a0, b0) = p.edges[e0];
        let f0 = p.edge_faces[e0][0];
        let mut h = ProjMatrix::identity(p.d);
        let (mut a, mut b, mut f) = (a0, b0, f0);
        let mut visited = Vec::new();
        loop {
            visited.push(p.edge_id(a, b).expect("edge"));
            h = h * p.faces[f].element;
            let (a2, b2) = (p.map_vertex(f, a), p.map_vertex(f, b));
            let m = p.faces[f].mate;
            let e2 = p.edge_id(a2, b2).ok_or(GeometryError::BadEdgeCycle)?;
            let nf = if p.edge_faces[e2][0] == m { p.edge_faces[e2][1] } else { p.edge_faces[e2][0] };
            a = a2;
            b = b2;
            f = nf;
            if (a, b, f) == (a0, b0, f0) {
                break;
            }
            if visited.len() > 4 * p.edges.len() + 4 {
                return Err(GeometryError::BadEdgeCycle);
            }
        }
        let k = (1..=3).find(|&k| h.pow(k).is_identity()).ok_or(GeometryError::BadEdgeCycle)?;
        for e in visited {
            orders[e] = k as u32;
        }
    }
    Ok(orders)
}

/// Sample radii tried by [`dirichlet_domain_auto`].
pub const AUTO_RADII: [i64; 15] = [3, 4, 5, 6, 7, 8, 10, 12, 14, 16, 20, 24, 28, 32, 40];

/// Increases the sample until the candidate passes every closure check
/// and its volume matches the covolume oracle.
pub fn dirichlet_domain_auto(d: i64) -> Result<ConvexPolyhedron, GeometryError> {
    dirichlet_domain_search(d, &AUTO_RADII).map(|(p, _)| p)
}

/// As [`dirichlet_domain_auto`] over the given radii, also returning the
/// radius that succeeded.
pub fn dirichlet_domain_search(d: i64, radii: &[i64]) -> Result<(ConvexPolyhedron, i64), GeometryError> {
    let target = super::volume::covolume_oracle(d);
    let mut last = GeometryError::IncompleteSample("no sample tried".into());
    for &radius in radii {
        match dirichlet_domain(d, radius) {
            Ok(p) => {
                let v = super::volume::polyhedron_volume(&p);
                if (v - target).abs() < 1e-6 && p.ideal_vertex_classes() == crate::ring::class_number(d) {
                    return Ok((p, radius));
                }
                last = GeometryError::IncompleteSample(format!(
                    "radius {}: volume {} vs {}",
                    radius, v, target
                ));
            }
            Err(e @ GeometryError::UnsupportedD(_)) => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}
