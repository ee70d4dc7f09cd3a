//! Exact hyperbolic geometry for Bianchi groups.
//!
//! Points of upper half-space z + tj are kept as (z, t²) with z ∈ Q(√−d).
//! The hyperboloid model uses coordinates (x0, x1, x2, x3′) with form
//! diag(1, −1, −1, −d), so the PSL(2, O_d) action is rational. Scaled Klein
//! coordinates are (x1, x2, x3′)/x0.

pub mod domain;
pub mod export;
pub mod polyhedron;
pub mod volume;

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ring::{omega_trace_norm, ProjMatrix, QuadInt};

pub use domain::{DomainSimplex, FundamentalDomain, OMEGA_CONVENTION};
pub use export::{barycentric_export, elliptic_elements, singular_triples};
pub use polyhedron::{
    dirichlet_domain, dirichlet_domain_auto, dirichlet_domain_search, edge_singular_orders, AUTO_RADII, ConvexPolyhedron, PolyFace,
};
pub use volume::{covolume_oracle, lobachevsky, polyhedron_volume};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("bisector is degenerate: the element fixes the base point")]
    DegenerateBisector,
    #[error("sample too small: {0}")]
    IncompleteSample(String),
    #[error("candidate polyhedron does not have finite volume")]
    NotFiniteVolume,
    #[error("edge cycle returns an element of order > 3")]
    BadEdgeCycle,
    #[error("no bundled data for d = {0}")]
    UnsupportedD(i64),
    #[error("invalid fundamental domain: {0}")]
    InvalidDomain(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Q = BigRational;

pub fn q(n: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(den))
}

/// Element re + im·√−d of Q(√−d).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Qd {
    pub d: i64,
    pub re: Q,
    pub im: Q,
}

impl Qd {
    pub fn new(d: i64, re: Q, im: Q) -> Self {
        Qd { d, re, im }
    }

    pub fn zero(d: i64) -> Self {
        Qd::new(d, Q::zero(), Q::zero())
    }

    pub fn from_quad(x: &QuadInt) -> Self {
        let (t, _) = omega_trace_norm(x.d);
        // ω = √−d, or (1 + √−d)/2
        if t == 0 {
            Qd::new(x.d, q(x.a, 1), q(x.b, 1))
        } else {
            Qd::new(x.d, q(2 * x.a + x.b, 2), q(x.b, 2))
        }
    }

    pub fn conj(&self) -> Self {
        Qd::new(self.d, self.re.clone(), -self.im.clone())
    }

    /// |x|² = re² + d·im².
    pub fn norm(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im * BigInt::from(self.d)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn inverse(&self) -> Self {
        let n = self.norm();
        let c = self.conj();
        Qd::new(self.d, c.re / &n, c.im / n)
    }
}

impl Add for &Qd {
    type Output = Qd;
    fn add(self, o: &Qd) -> Qd {
        Qd::new(self.d, &self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &Qd {
    type Output = Qd;
    fn sub(self, o: &Qd) -> Qd {
        Qd::new(self.d, &self.re - &o.re, &self.im - &o.im)
    }
}

impl Neg for &Qd {
    type Output = Qd;
    fn neg(self) -> Qd {
        Qd::new(self.d, -self.re.clone(), -self.im.clone())
    }
}

impl Mul for &Qd {
    type Output = Qd;
    fn mul(self, o: &Qd) -> Qd {
        let d = BigInt::from(self.d);
        Qd::new(
            self.d,
            &self.re * &o.re - &self.im * &o.im * d,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

/// A point z + tj of upper half-space, stored as (z, t²).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpacePoint {
    pub z: Qd,
    pub tsq: Q,
}

impl HalfSpacePoint {
    pub fn new(z: Qd, tsq: Q) -> Self {
        assert!(tsq.is_positive(), "height must be positive");
        HalfSpacePoint { z, tsq }
    }

    /// The point j.
    pub fn j(d: i64) -> Self {
        HalfSpacePoint::new(Qd::zero(d), Q::one())
    }

    /// Hyperboloid vector scaled by t (rational): Hermitian form
    /// [[|z|² + t², z], [z̄, 1]].
    pub fn lorentz(&self) -> [Q; 4] {
        let h = self.z.norm() + &self.tsq;
        let two = q(2, 1);
        [
            (&h + Q::one()) / &two,
            self.z.re.clone(),
            (h - Q::one()) / two,
            self.z.im.clone(),
        ]
    }

    /// Scaled Klein coordinates (x, y, z′).
    pub fn klein(&self) -> [Q; 3] {
        let v = self.lorentz();
        [&v[1] / &v[0], &v[2] / &v[0], &v[3] / &v[0]]
    }

    /// Poincaré ball coordinates of the scaled-Klein point, as floats in the
    /// ellipsoid model with the third axis rescaled by √d.
    pub fn poincare(&self) -> [f64; 3] {
        let k = self.klein();
        let f: Vec<f64> = k.iter().map(to_f64).collect();
        let third = f[2] * (self.z.d as f64).sqrt();
        let r2 = f[0] * f[0] + f[1] * f[1] + third * third;
        let s = 1.0 / (1.0 + (1.0 - r2).max(0.0).sqrt());
        [f[0] * s, f[1] * s, third * s]
    }
}

pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // very large numerators: scale down
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let dn = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / dn
    })
}

fn entries(m: &ProjMatrix) -> [Qd; 4] {
    [
        Qd::from_quad(&m.e[0]),
        Qd::from_quad(&m.e[1]),
        Qd::from_quad(&m.e[2]),
        Qd::from_quad(&m.e[3]),
    ]
}

/// The action (az+b)(c̄z̄+d̄) + a c̄ t² over |cz+d|² + |c|² t².
pub fn halfspace_action(m: &ProjMatrix, p: &HalfSpacePoint) -> HalfSpacePoint {
    let [a, b, c, d] = entries(m);
    let num_l = &(&a * &p.z) + &b;
    let den_l = &(&c * &p.z) + &d;
    let denom = den_l.norm() + c.norm() * &p.tsq;
    let ac = &a * &c.conj();
    let tsq_term = Qd::new(p.z.d, &ac.re * &p.tsq, &ac.im * &p.tsq);
    let num = &(&num_l * &den_l.conj()) + &tsq_term;
    HalfSpacePoint {
        z: Qd::new(p.z.d, &num.re / &denom, &num.im / &denom),
        tsq: &p.tsq / (&denom * &denom),
    }
}

/// 4×4 rational matrix on (x0, x1, x2, x3′).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LorentzMatrix {
    pub d: i64,
    pub m: [[Q; 4]; 4],
}

/// Minkowski product for diag(1, −1, −1, −d).
pub fn minkowski(d: i64, u: &[Q; 4], v: &[Q; 4]) -> Q {
    &u[0] * &v[0] - &u[1] * &v[1] - &u[2] * &v[2] - &u[3] * &v[3] * BigInt::from(d)
}

impl LorentzMatrix {
    pub fn identity(d: i64) -> Self {
        let m = std::array::from_fn(|i| std::array::from_fn(|j| if i == j { Q::one() } else { Q::zero() }));
        LorentzMatrix { d, m }
    }

    pub fn apply(&self, v: &[Q; 4]) -> [Q; 4] {
        std::array::from_fn(|i| {
            let mut s = Q::zero();
            for j in 0..4 {
                if !self.m[i][j].is_zero() && !v[j].is_zero() {
                    s += &self.m[i][j] * &v[j];
                }
            }
            s
        })
    }

    pub fn mul(&self, o: &LorentzMatrix) -> LorentzMatrix {
        let m = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut s = Q::zero();
                for k in 0..4 {
                    s += &self.m[i][k] * &o.m[k][j];
                }
                s
            })
        });
        LorentzMatrix { d: self.d, m }
    }

    /// ΛᵀQΛ = Q.
    pub fn preserves_form(&self) -> bool {
        let qd = [Q::one(), -Q::one(), -Q::one(), -q(self.d, 1)];
        for i in 0..4 {
            for j in 0..4 {
                let mut s = Q::zero();
                for k in 0..4 {
                    s += &self.m[k][i] * &qd[k] * &self.m[k][j];
                }
                let want = if i == j { qd[i].clone() } else { Q::zero() };
                if s != want {
                    return false;
                }
            }
        }
        true
    }

    pub fn det(&self) -> Q {
        let m = &self.m;
        let mut total = Q::zero();
        for (sign, p) in perms4() {
            let mut prod = Q::one();
            for i in 0..4 {
                prod *= &m[i][p[i]];
            }
            if sign > 0 {
                total += prod;
            } else {
                total -= prod;
            }
        }
        total
    }

    /// Inverse via the form: Λ⁻¹ = Q Λᵀ Q.
    pub fn inverse(&self) -> LorentzMatrix {
        let qd = [Q::one(), -Q::one(), -Q::one(), -q(self.d, 1)];
        let m = std::array::from_fn(|i| {
            std::array::from_fn(|j| &self.m[j][i] * &qd[j] / &qd[i])
        });
        LorentzMatrix { d: self.d, m }
    }
}

fn perms4() -> Vec<(i32, [usize; 4])> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for e in 0..4 {
                    let p = [a, b, c, e];
                    let mut ok = true;
                    for i in 0..4 {
                        for j in i + 1..4 {
                            if p[i] == p[j] {
                                ok = false;
                            }
                        }
                    }
                    if ok {
                        let mut inv = 0;
                        for i in 0..4 {
                            for j in i + 1..4 {
                                if p[i] > p[j] {
                                    inv += 1;
                                }
                            }
                        }
                        out.push((if inv % 2 == 0 { 1 } else { -1 }, p));
                    }
                }
            }
        }
    }
    out
}

/// Hermitian matrix [[A, w], [w̄, B]] of a Lorentz vector.
fn hermitian(d: i64, v: &[Q; 4]) -> (Q, Q, Qd) {
    (&v[0] + &v[2], &v[0] - &v[2], Qd::new(d, v[1].clone(), v[3].clone()))
}

fn from_hermitian(a: &Q, b: &Q, w: &Qd) -> [Q; 4] {
    let two = q(2, 1);
    [(a + b) / &two, w.re.clone(), (a - b) / two, w.im.clone()]
}

/// g H g* for a Hermitian H = [[A, w], [w̄, B]].
fn conj_action(g: &[Qd; 4], a: &Q, b: &Q, w: &Qd) -> (Q, Q, Qd) {
    let d = w.d;
    let aa = Qd::new(d, a.clone(), Q::zero());
    let bb = Qd::new(d, b.clone(), Q::zero());
    let wc = w.conj();
    // M = g H
    let m00 = &(&g[0] * &aa) + &(&g[1] * &wc);
    let m01 = &(&g[0] * w) + &(&g[1] * &bb);
    let m10 = &(&g[2] * &aa) + &(&g[3] * &wc);
    let m11 = &(&g[2] * w) + &(&g[3] * &bb);
    // (M g*)
    let h00 = &(&m00 * &g[0].conj()) + &(&m01 * &g[1].conj());
    let h01 = &(&m00 * &g[2].conj()) + &(&m01 * &g[3].conj());
    let h11 = &(&m10 * &g[2].conj()) + &(&m11 * &g[3].conj());
    (h00.re, h11.re, h01)
}

/// Adjoint action of m on Hermitian forms in hyperboloid coordinates.
pub fn psl_to_lorentz(m: &ProjMatrix) -> LorentzMatrix {
    let d = m.d();
    let g = entries(m);
    let mut cols: Vec<[Q; 4]> = Vec::with_capacity(4);
    for k in 0..4 {
        let mut e: [Q; 4] = std::array::from_fn(|_| Q::zero());
        e[k] = Q::one();
        let (a, b, w) = hermitian(d, &e);
        let (a2, b2, w2) = conj_action(&g, &a, &b, &w);
        cols.push(from_hermitian(&a2, &b2, &w2));
    }
    let mm = std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()));
    LorentzMatrix { d, m: mm }
}

/// Image of a Lorentz vector under m without forming Λ(m).
pub fn lorentz_apply(m: &ProjMatrix, v: &[Q; 4]) -> [Q; 4] {
    let d = m.d();
    let g = entries(m);
    let (a, b, w) = hermitian(d, v);
    let (a2, b2, w2) = conj_action(&g, &a, &b, &w);
    from_hermitian(&a2, &b2, &w2)
}

/// Coordinates centred at a base point p0 of rational height: the Lorentz
/// reflection exchanging p0 with j, so that p0 becomes the Klein origin.
#[derive(Clone, Debug)]
pub struct Centering {
    pub d: i64,
    pub base: HalfSpacePoint,
    /// Unit hyperboloid vector of the base point.
    pub p0: [Q; 4],
    /// Reflection normal, None when p0 = j.
    normal: Option<([Q; 4], Q)>,
}

impl Centering {
    pub fn identity(d: i64) -> Self {
        let base = HalfSpacePoint::j(d);
        let p0 = base.lorentz();
        Centering { d, base, p0, normal: None }
    }

    /// Centres at z + tj; `t` must be rational.
    pub fn at(z: Qd, t: Q) -> Self {
        let d = z.d;
        let base = HalfSpacePoint::new(z, &t * &t);
        let p0: [Q; 4] = base.lorentz().map(|x| x / &t);
        let e0: [Q; 4] = [Q::one(), Q::zero(), Q::zero(), Q::zero()];
        if p0 == e0 {
            return Centering { d, base, p0, normal: None };
        }
        let n: [Q; 4] = std::array::from_fn(|i| &p0[i] - &e0[i]);
        let nn = minkowski(d, &n, &n);
        Centering { d, base, p0, normal: Some((n, nn)) }
    }

    /// The reflection (an involution).
    pub fn reflect(&self, v: &[Q; 4]) -> [Q; 4] {
        match &self.normal {
            None => v.clone(),
            Some((n, nn)) => {
                let c = minkowski(self.d, v, n) * q(2, 1) / nn;
                std::array::from_fn(|i| &v[i] - &c * &n[i])
            }
        }
    }

    /// Λ′(m) = R Λ(m) R.
    pub fn conjugate(&self, m: &ProjMatrix) -> LorentzMatrix {
        let l = psl_to_lorentz(m);
        let mut cols: Vec<[Q; 4]> = Vec::with_capacity(4);
        for k in 0..4 {
            let mut e: [Q; 4] = std::array::from_fn(|_| Q::zero());
            e[k] = Q::one();
            cols.push(self.reflect(&l.apply(&self.reflect(&e))));
        }
        LorentzMatrix { d: self.d, m: std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone())) }
    }

    /// Image of the origin under Λ′(m).
    pub fn orbit_point(&self, m: &ProjMatrix) -> [Q; 4] {
        self.reflect(&lorentz_apply(m, &self.p0))
    }

    /// Centred homogeneous coordinates of a half-space point.
    pub fn centred(&self, p: &HalfSpacePoint) -> [Q; 4] {
        self.reflect(&p.lorentz())
    }
}

/// c1·x + c2·y + c3·z′ ≤ c0 in centred scaled Klein coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpace {
    pub c: [Q; 3],
    pub c0: Q,
}

impl HalfSpace {
    pub fn contains(&self, klein: &[Q; 3]) -> bool {
        &self.c[0] * &klein[0] + &self.c[1] * &klein[1] + &self.c[2] * &klein[2] <= self.c0
    }

    pub fn on_boundary(&self, klein: &[Q; 3]) -> bool {
        &self.c[0] * &klein[0] + &self.c[1] * &klein[1] + &self.c[2] * &klein[2] == self.c0
    }

    /// Integer covector (a0, a1, a2, a3) with a1x1 + a2x2 + a3x3 − a0x0 ≤ 0,
    /// primitive.
    pub fn integer_covector(&self) -> [BigInt; 4] {
        use num_integer::Integer;
        let all = [&self.c0, &self.c[0], &self.c[1], &self.c[2]];
        let mut l = BigInt::one();
        for x in &all {
            l = l.lcm(x.denom());
        }
        let mut v: [BigInt; 4] = std::array::from_fn(|i| (all[i] * &l).to_integer());
        let mut g = BigInt::zero();
        for x in &v {
            g = g.gcd(x);
        }
        if !g.is_zero() {
            for x in v.iter_mut() {
                *x = &*x / &g;
            }
        }
        v
    }
}

/// Points at least as close to the base point as to its image under m.
pub fn bisector_halfspace(m: &ProjMatrix, centering: &Centering) -> Result<HalfSpace, GeometryError> {
    let y = centering.orbit_point(m);
    if y[0] == Q::one() {
        return Err(GeometryError::DegenerateBisector);
    }
    let d = q(centering.d, 1);
    Ok(HalfSpace { c: [y[1].clone(), y[2].clone(), &d * &y[3]], c0: &y[0] - Q::one() })
}
