//! Helpers and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use bianchi_core::geometry::{barycentric_export, dirichlet_domain_auto, FundamentalDomain};
use bianchi_core::ring::{ideals_up_to_norm, parse_ideal_gens, ProjMatrix, QuadIdeal};
use bianchi_core::triangulation::{Perm, Triangulation};

fn domain_cache() -> &'static Mutex<HashMap<i64, FundamentalDomain>> {
    static CACHE: OnceLock<Mutex<HashMap<i64, FundamentalDomain>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Verified domain for d, computed once per test binary.
pub fn domain(d: i64) -> FundamentalDomain {
    if let Some(dom) = domain_cache().lock().unwrap().get(&d) {
        return dom.clone();
    }
    let dom = barycentric_export(&dirichlet_domain_auto(d).unwrap());
    remember_domain(d, dom.clone());
    dom
}

/// Stores a domain computed elsewhere so later `domain` calls reuse it.
pub fn remember_domain(d: i64, dom: FundamentalDomain) {
    domain_cache().lock().unwrap().insert(d, dom);
}

pub fn ideal(d: i64, text: &str) -> QuadIdeal {
    QuadIdeal::from_generators(d, &parse_ideal_gens(d, text).unwrap()).unwrap()
}

/// Every vertex link is a torus (ideal) or a sphere (finite), the Euler
/// characteristic equals the number of ideal vertices, and the complex is
/// orientable.
pub fn link_check(tri: &Triangulation) -> Result<(), String> {
    let info = tri.classify_vertices();
    for (c, &chi) in info.link_euler.iter().enumerate() {
        let want = if info.ideal[c] { 0 } else { 2 };
        if chi != want {
            return Err(format!("vertex class {} has link χ = {}, expected {}", c, chi, want));
        }
    }
    let chi = tri.euler_characteristic();
    if chi != info.count as i64 {
        return Err(format!("χ = {} but {} cusps", chi, info.count));
    }
    if !tri.is_orientable() {
        return Err("not orientable".into());
    }
    Ok(())
}

/// Renumbers tetrahedra by `order` (new index k holds old tet order[k]) and
/// relabels the vertices of old tet t by `sigma[t]`.
pub fn relabel(tri: &Triangulation, order: &[usize], sigma: &[Perm]) -> Triangulation {
    let n = tri.len();
    let mut pos = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let mut out = Triangulation::new(n);
    for t in 0..n {
        for i in 0..4 {
            out.ideal[pos[t]][sigma[t].apply(i)] = tri.ideal[t][i];
        }
    }
    for t in 0..n {
        for f in 0..4 {
            let u = tri.adj[t][f] as usize;
            let p = sigma[u].compose(&tri.gluing[t][f]).compose(&sigma[t].inverse());
            out.glue(pos[t], sigma[t].apply(f), pos[u], p);
        }
    }
    out.check().unwrap();
    out
}

/// Product of generators (index taken mod the generator count) and inverses.
pub fn word_matrix(gens: &[ProjMatrix], word: &[(usize, bool)], d: i64) -> ProjMatrix {
    word.iter().fold(ProjMatrix::identity(d), |acc, &(g, inv)| {
        let m = gens[g % gens.len()];
        acc * if inv { m.inverse() } else { m }
    })
}

fn det(mut m: Vec<Vec<i128>>) -> i128 {
    // Bareiss elimination, exact over the integers
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == k)
        .map(|s| (0..n).filter(|&i| s >> i & 1 == 1).collect())
        .collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Rank and elementary divisors from determinantal divisors:
/// d_k = g_k / g_{k−1}, g_k the gcd of all k×k minors.
pub fn minors_oracle(a: &[Vec<i64>]) -> (usize, Vec<i128>) {
    let (r, c) = (a.len(), a[0].len());
    let mut prev = 1i128;
    let mut divisors = Vec::new();
    for k in 1..=r.min(c) {
        let mut g = 0i128;
        for rows in subsets(r, k) {
            for cols in subsets(c, k) {
                let m = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j] as i128).collect()).collect();
                g = gcd(g, det(m));
            }
        }
        if g == 0 {
            return (k - 1, divisors);
        }
        divisors.push(g / prev);
        prev = g;
    }
    (r.min(c), divisors)
}

/// Class number by brute force: ideals of norm up to the Minkowski bound,
/// grouped by I ~ J iff I·J̄ is principal.
pub fn class_group_order(d: i64) -> usize {
    let disc = discriminant(d) as f64;
    let bound = (2.0 / std::f64::consts::PI * (-disc).sqrt()).floor() as i64;
    let conj = |i: &QuadIdeal| {
        let [a, b] = i.basis();
        QuadIdeal::from_generators(d, &[a.conj(), b.conj()]).unwrap()
    };
    let mut reps: Vec<QuadIdeal> = Vec::new();
    for i in ideals_up_to_norm(d, bound.max(1)) {
        if reps.iter().all(|r| i.mul(&conj(r)).generator().is_none()) {
            reps.push(i);
        }
    }
    reps.len()
}

pub fn discriminant(d: i64) -> i64 {
    if d % 4 == 3 {
        -d
    } else {
        -4 * d
    }
}

/// Catalan's constant; the d = 1 covolume is a third of it.
pub const CATALAN: f64 = 0.915_965_594_177_219;
