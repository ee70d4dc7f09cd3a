//! Hyperbolic volumes: Lobachevsky function, orthoscheme decomposition of
//! the Dirichlet polyhedron, and the covolume of PSL(2, O_d).

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::ring::discriminant;

use super::polyhedron::ConvexPolyhedron;
use super::to_f64;

fn zeta_even(k: u32) -> f64 {
    if k == 1 {
        return PI * PI / 6.0;
    }
    let s = 2 * k as i32;
    let n = 1000usize;
    let mut sum = 0.0;
    for m in (1..n).rev() {
        sum += (m as f64).powi(-s);
    }
    // Euler–Maclaurin tail from n
    let nf = n as f64;
    sum + nf.powi(1 - s) / (s as f64 - 1.0) + 0.5 * nf.powi(-s)
}

/// Clausen function Cl₂(θ) = Σ sin(nθ)/n².
pub fn clausen(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    } else if t <= -PI {
        t += 2.0 * PI;
    }
    if t == 0.0 {
        return 0.0;
    }
    let sign = t.signum();
    let t = t.abs();
    let mut s = t - t * t.ln();
    let r = t / (2.0 * PI);
    let mut pw = t * r * r;
    for k in 1..60u32 {
        let kk = k as f64;
        let term = 2.0 * zeta_even(k) * pw / (2.0 * kk * (2.0 * kk + 1.0));
        s += term;
        if term.abs() < 1e-18 {
            break;
        }
        pw *= r * r;
    }
    sign * s
}

/// Лобачевский function Л(x) = −∫₀ˣ log|2 sin t| dt.
pub fn lobachevsky(x: f64) -> f64 {
    0.5 * clausen(2.0 * x)
}

/// Kronecker symbol (D/n) for a fundamental discriminant D.
pub fn kronecker(disc: i64, n: i64) -> i64 {
    let mut n = n;
    let mut result = 1;
    let mut p = 2;
    while n > 1 {
        if p * p > n {
            p = n;
        }
        if n % p == 0 {
            let chi = if p == 2 {
                match disc.rem_euclid(8) {
                    1 | 7 => 1,
                    3 | 5 => -1,
                    _ => 0,
                }
            } else {
                legendre(disc, p)
            };
            while n % p == 0 {
                result *= chi;
                n /= p;
            }
        }
        p += 1;
    }
    result
}

fn legendre(a: i64, p: i64) -> i64 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut r: i64 = 1;
    let mut b = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// L(2, χ_D) through the Clausen values at multiples of 2π/|D|.
pub fn l_two(d: i64) -> f64 {
    let disc = discriminant(d);
    let q = disc.abs();
    let s: f64 = (1..q).map(|a| kronecker(disc, a) as f64 * clausen(2.0 * PI * a as f64 / q as f64)).sum();
    s / (q as f64).sqrt()
}

/// Covolume of PSL(2, O_d): |D|^{3/2} L(2, χ_D) / 24.
pub fn covolume_oracle(d: i64) -> f64 {
    let q = discriminant(d).abs() as f64;
    q.powf(1.5) * l_two(d) / 24.0
}

type V4 = [f64; 4];

struct Mink {
    d: f64,
}

impl Mink {
    fn ip(&self, u: &V4, v: &V4) -> f64 {
        u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - self.d * u[3] * v[3]
    }
    fn unit(&self, v: V4) -> V4 {
        let n = self.ip(&v, &v);
        if n <= 0.0 {
            // light-like: scale to x0 = 1
            return v.map(|x| x / v[0]);
        }
        let s = n.sqrt();
        v.map(|x| x / s)
    }
    /// Tangent direction at unit point a towards b.
    fn tangent(&self, a: &V4, b: &V4) -> V4 {
        let c = self.ip(a, b);
        std::array::from_fn(|i| b[i] - c * a[i])
    }
    /// Positive-definite tangent inner product.
    fn g(&self, u: &V4, v: &V4) -> f64 {
        -self.ip(u, v)
    }
    fn angle(&self, u: &V4, v: &V4) -> Option<f64> {
        let (uu, vv) = (self.g(u, u), self.g(v, v));
        if uu < 1e-24 || vv < 1e-24 {
            return None;
        }
        Some((self.g(u, v) / (uu * vv).sqrt()).clamp(-1.0, 1.0).acos())
    }
}

/// Volume of the orthoscheme with essential angles α1, α2 (middle), α3.
pub fn orthoscheme_volume(a1: f64, a2: f64, a3: f64) -> f64 {
    let num = (a2.cos().powi(2) - (a1.sin() * a3.sin()).powi(2)).max(0.0).sqrt();
    let delta = num.atan2(a1.cos() * a3.cos());
    let l = lobachevsky;
    0.25 * (l(a1 + delta) - l(a1 - delta) + l(a3 + delta) - l(a3 - delta) - l(PI / 2.0 - a2 + delta)
        + l(PI / 2.0 - a2 - delta)
        + 2.0 * l(PI / 2.0 - delta))
}

fn point_f64(x: &[BigInt; 4]) -> V4 {
    let r = |i: usize| to_f64(&BigRational::new(x[i].clone(), x[0].clone()));
    [1.0, r(1), r(2), r(3)]
}

/// Volume by signed orthoschemes (centre, face foot, edge foot, vertex).
pub fn polyhedron_volume(p: &ConvexPolyhedron) -> f64 {
    let m = Mink { d: p.d as f64 };
    let o: V4 = [1.0, 0.0, 0.0, 0.0];
    let pts: Vec<V4> = p.vertices.iter().map(|x| m.unit(point_f64(x))).collect();
    let covec = |c: &[BigInt; 4]| -> V4 {
        let s = c.iter().map(|x| to_f64(&BigRational::from_integer(x.clone())).abs()).fold(0.0, f64::max);
        std::array::from_fn(|i| to_f64(&BigRational::from_integer(c[i].clone())) / s)
    };
    let mut total = 0.0;
    for (fi, face) in p.faces.iter().enumerate() {
        let c = covec(&face.plane);
        // vector n with ⟨x, n⟩ = c·x
        let n: V4 = [c[0], -c[1], -c[2], -c[3] / m.d];
        let k = m.ip(&o, &n) / m.ip(&n, &n);
        let f = m.unit(std::array::from_fn(|i| o[i] - k * n[i]));
        let nv = face.vertices.len();
        for idx in 0..nv {
            let (a, b) = (face.vertices[idx], face.vertices[(idx + 1) % nv]);
            let e_id = p.edge_id(a, b).expect("edge");
            let other = if p.edge_faces[e_id][0] == fi { p.edge_faces[e_id][1] } else { p.edge_faces[e_id][0] };
            let c2 = covec(&p.faces[other].plane);
            let side: f64 = (0..4).map(|i| c2[i] * f[i]).sum();
            let eps_f = if side < -1e-13 {
                1.0
            } else if side > 1e-13 {
                -1.0
            } else {
                continue;
            };
            let (u, v) = (pts[a], pts[b]);
            let (uu, uv, vv) = (m.ip(&u, &u), m.ip(&u, &v), m.ip(&v, &v));
            let (fu, fv) = (m.ip(&f, &u), m.ip(&f, &v));
            let det = uu * vv - uv * uv;
            let alpha = (fu * vv - fv * uv) / det;
            let beta = (uu * fv - uv * fu) / det;
            let e = m.unit(std::array::from_fn(|i| alpha * u[i] + beta * v[i]));
            for (vert, coef) in [(u, beta), (v, alpha)] {
                let eps_v = if coef > 1e-13 {
                    1.0
                } else if coef < -1e-13 {
                    -1.0
                } else {
                    continue;
                };
                let a3 = match m.angle(&m.tangent(&f, &e), &m.tangent(&f, &vert)) {
                    Some(x) => x,
                    None => continue,
                };
                let a1 = match m.angle(&m.tangent(&e, &f), &m.tangent(&e, &o)) {
                    Some(x) => x,
                    None => continue,
                };
                let tv = m.tangent(&o, &vert);
                let proj = |t: V4| -> V4 {
                    let s = m.g(&t, &tv) / m.g(&tv, &tv);
                    std::array::from_fn(|i| t[i] - s * tv[i])
                };
                let a2 = match m.angle(&proj(m.tangent(&o, &e)), &proj(m.tangent(&o, &f))) {
                    Some(x) => x,
                    None => continue,
                };
                total += eps_f * eps_v * orthoscheme_volume(a1, a2, a3);
            }
        }
    }
    total
}
