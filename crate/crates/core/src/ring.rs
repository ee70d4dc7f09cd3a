//! Arithmetic in the ring of integers O_d of Q(sqrt(-d)), ideals as rank-2
//! lattices, and the finite groups PSL(2, O_d/I).

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("d = {0} is not a positive square-free integer")]
    NotSquareFree(i64),
    #[error("all generators are zero")]
    ZeroIdeal,
    #[error("could not resolve the splitting of {0}")]
    FactorizationFailed(i64),
    #[error("ideal is not proper")]
    UnitIdeal,
    #[error("closure exceeded the budget of {0} elements")]
    BudgetExceeded(usize),
    #[error("cannot parse `{0}`: {1}")]
    Parse(String, String),
    #[error("element is not an algebraic integer of O_{0}")]
    NotIntegral(i64),
}

pub fn is_square_free(d: i64) -> bool {
    if d <= 0 {
        return false;
    }
    let mut p = 2;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

pub fn check_d(d: i64) -> Result<(), RingError> {
    if is_square_free(d) {
        Ok(())
    } else {
        Err(RingError::NotSquareFree(d))
    }
}

/// Trace and norm of omega_d: omega^2 = trace * omega - norm.
pub fn omega_trace_norm(d: i64) -> (i64, i64) {
    if d % 4 == 3 {
        (1, (1 + d) / 4)
    } else {
        (0, d)
    }
}

/// Discriminant of O_d.
pub fn discriminant(d: i64) -> i64 {
    if d % 4 == 3 {
        -d
    } else {
        -4 * d
    }
}

/// The element a + b*omega_d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadInt {
    pub d: i64,
    pub a: i64,
    pub b: i64,
}

impl QuadInt {
    pub fn new(d: i64, a: i64, b: i64) -> Self {
        QuadInt { d, a, b }
    }
    pub fn zero(d: i64) -> Self {
        QuadInt { d, a: 0, b: 0 }
    }
    pub fn one(d: i64) -> Self {
        QuadInt { d, a: 1, b: 0 }
    }
    pub fn int(d: i64, a: i64) -> Self {
        QuadInt { d, a, b: 0 }
    }
    pub fn omega(d: i64) -> Self {
        QuadInt { d, a: 0, b: 1 }
    }
    /// sqrt(-d) expressed in the omega basis.
    pub fn sqrt_minus_d(d: i64) -> Self {
        if d % 4 == 3 {
            QuadInt { d, a: -1, b: 2 }
        } else {
            QuadInt { d, a: 0, b: 1 }
        }
    }
    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }
    pub fn conj(&self) -> Self {
        let (t, _) = omega_trace_norm(self.d);
        QuadInt { d: self.d, a: self.a + self.b * t, b: -self.b }
    }
    pub fn norm(&self) -> i64 {
        let (t, n) = omega_trace_norm(self.d);
        self.a * self.a + t * self.a * self.b + n * self.b * self.b
    }
    /// Twice the real part.
    pub fn trace(&self) -> i64 {
        let (t, _) = omega_trace_norm(self.d);
        2 * self.a + t * self.b
    }
    pub fn scale(&self, k: i64) -> Self {
        QuadInt { d: self.d, a: self.a * k, b: self.b * k }
    }
    pub fn pow(&self, e: u32) -> Self {
        let mut r = QuadInt::one(self.d);
        for _ in 0..e {
            r = r * *self;
        }
        r
    }
    /// Coordinates (x, y) with value x + y*sqrt(-d), each scaled by 2 so that
    /// they are integers: returns (2x, 2y).
    pub fn doubled_rect(&self) -> (i64, i64) {
        if self.d % 4 == 3 {
            (2 * self.a + self.b, self.b)
        } else {
            (2 * self.a, 2 * self.b)
        }
    }
    /// Exact division when the quotient is integral.
    pub fn div_exact(&self, other: &QuadInt) -> Option<QuadInt> {
        let n = other.norm();
        if n == 0 {
            return None;
        }
        let p = *self * other.conj();
        if p.a % n == 0 && p.b % n == 0 {
            Some(QuadInt { d: self.d, a: p.a / n, b: p.b / n })
        } else {
            None
        }
    }
    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }
}

impl Add for QuadInt {
    type Output = QuadInt;
    fn add(self, o: QuadInt) -> QuadInt {
        debug_assert_eq!(self.d, o.d);
        QuadInt { d: self.d, a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for QuadInt {
    type Output = QuadInt;
    fn sub(self, o: QuadInt) -> QuadInt {
        debug_assert_eq!(self.d, o.d);
        QuadInt { d: self.d, a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt { d: self.d, a: -self.a, b: -self.b }
    }
}

impl Mul for QuadInt {
    type Output = QuadInt;
    fn mul(self, o: QuadInt) -> QuadInt {
        debug_assert_eq!(self.d, o.d);
        let (t, n) = omega_trace_norm(self.d);
        let bb = self.b * o.b;
        QuadInt {
            d: self.d,
            a: self.a * o.a - n * bb,
            b: self.a * o.b + self.b * o.a + t * bb,
        }
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{}", a),
            (0, 1) => write!(f, "w"),
            (0, -1) => write!(f, "-w"),
            (0, b) => write!(f, "{}*w", b),
            (a, 1) => write!(f, "{}+w", a),
            (a, -1) => write!(f, "{}-w", a),
            (a, b) if b < 0 => write!(f, "{}{}*w", a, b),
            (a, b) => write!(f, "{}+{}*w", a, b),
        }
    }
}

/// The ideal n*Z + (k + l*omega_d)*Z, stored in canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadIdeal {
    pub d: i64,
    pub n: i64,
    pub k: i64,
    pub l: i64,
}

/// Hermite basis {(n, 0), (k, l)} of the Z-span of the given vectors.
fn lattice_hnf(vectors: &[(i64, i64)]) -> Option<(i64, i64, i64)> {
    let mut n: i64 = 0;
    let mut v: (i64, i64) = (0, 0);
    for &w in vectors {
        if w.1 == 0 {
            n = n.gcd(&w.0);
            continue;
        }
        if v.1 == 0 {
            if v.0 != 0 {
                n = n.gcd(&v.0);
            }
            v = w;
            continue;
        }
        let eg = v.1.extended_gcd(&w.1);
        let (g, s, t) = (eg.gcd, eg.x, eg.y);
        let nv = (s * v.0 + t * w.0, s * v.1 + t * w.1);
        let rest = (w.1 / g) * v.0 - (v.1 / g) * w.0;
        n = n.gcd(&rest);
        v = nv;
        if n != 0 {
            v.0 = v.0.rem_euclid(n);
        }
    }
    if v.1 == 0 || n == 0 {
        return None;
    }
    if v.1 < 0 {
        v = (-v.0, -v.1);
    }
    Some((n, v.0.rem_euclid(n), v.1))
}

impl QuadIdeal {
    /// The ideal generated by `gens`.
    pub fn from_generators(d: i64, gens: &[QuadInt]) -> Result<QuadIdeal, RingError> {
        check_d(d)?;
        let w = QuadInt::omega(d);
        let mut vecs = Vec::new();
        for g in gens {
            if g.is_zero() {
                continue;
            }
            let gw = *g * w;
            vecs.push((g.a, g.b));
            vecs.push((gw.a, gw.b));
        }
        if vecs.is_empty() {
            return Err(RingError::ZeroIdeal);
        }
        let (n, k, l) = lattice_hnf(&vecs).ok_or(RingError::ZeroIdeal)?;
        let ideal = QuadIdeal { d, n, k, l };
        debug_assert!(ideal.is_ideal());
        Ok(ideal)
    }

    pub fn principal(x: QuadInt) -> Result<QuadIdeal, RingError> {
        QuadIdeal::from_generators(x.d, &[x])
    }

    pub fn unit(d: i64) -> QuadIdeal {
        QuadIdeal { d, n: 1, k: 0, l: 1 }
    }

    /// Builds an ideal from a triple (n, k, l) given in the omega_d basis,
    /// normalizing negative l by the sign flip and reducing k mod n.
    pub fn from_triple(d: i64, n: i64, k: i64, l: i64) -> Option<QuadIdeal> {
        if n <= 0 || l == 0 {
            return None;
        }
        let (k, l) = if l < 0 { (-k, -l) } else { (k, l) };
        let ideal = QuadIdeal { d, n, k: k.rem_euclid(n), l };
        if n % l != 0 || ideal.k % l != 0 || !ideal.is_ideal() {
            return None;
        }
        Some(ideal)
    }

    pub fn basis(&self) -> [QuadInt; 2] {
        [QuadInt::int(self.d, self.n), QuadInt::new(self.d, self.k, self.l)]
    }

    pub fn norm(&self) -> i64 {
        self.n * self.l
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    pub fn contains(&self, x: &QuadInt) -> bool {
        if x.b % self.l != 0 {
            return false;
        }
        let q = x.b / self.l;
        (x.a - q * self.k) % self.n == 0
    }

    /// The lattice is closed under multiplication by omega_d.
    pub fn is_ideal(&self) -> bool {
        let w = QuadInt::omega(self.d);
        self.basis().iter().all(|x| self.contains(&(*x * w)))
    }

    pub fn is_subset_of(&self, other: &QuadIdeal) -> bool {
        self.basis().iter().all(|x| other.contains(x))
    }

    pub fn mul(&self, other: &QuadIdeal) -> QuadIdeal {
        let mut gens = Vec::new();
        for x in self.basis() {
            for y in other.basis() {
                gens.push(x * y);
            }
        }
        QuadIdeal::from_generators(self.d, &gens).expect("product of nonzero ideals")
    }

    pub fn pow(&self, e: u32) -> QuadIdeal {
        let mut r = QuadIdeal::unit(self.d);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Representative of x + I in the half-open parallelogram spanned by the basis.
    pub fn reduce(&self, x: &QuadInt) -> QuadInt {
        let b = x.b.rem_euclid(self.l);
        let q = (x.b - b) / self.l;
        let a = (x.a - q * self.k).rem_euclid(self.n);
        QuadInt { d: self.d, a, b }
    }

    /// Is the ideal principal? Returns a generator of minimal norm if so.
    pub fn generator(&self) -> Option<QuadInt> {
        let target = self.norm();
        let (t, nn) = omega_trace_norm(self.d);
        // norm(a + b w) = (a + t b / 2)^2 + (nn - t^2/4) b^2
        let disc4 = 4 * nn - t * t;
        let bmax = ((4 * target) as f64 / disc4 as f64).sqrt() as i64 + 1;
        for b in -bmax..=bmax {
            let amax = (target as f64).sqrt() as i64 + bmax.abs() + 1;
            for a in -amax..=amax {
                let x = QuadInt::new(self.d, a, b);
                if x.norm() == target && self.contains(&x) {
                    return Some(x);
                }
            }
        }
        None
    }
}

impl fmt::Display for QuadIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.k, self.l)
    }
}

pub fn reduce_mod_ideal(x: &QuadInt, ideal: &QuadIdeal) -> QuadInt {
    ideal.reduce(x)
}

pub fn ideal_from_generators(d: i64, gens: &[QuadInt]) -> Result<QuadIdeal, RingError> {
    QuadIdeal::from_generators(d, gens)
}

fn prime_factors(mut m: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Prime ideals of O_d above the rational prime p.
pub fn primes_above(d: i64, p: i64) -> Result<Vec<QuadIdeal>, RingError> {
    let (t, n) = omega_trace_norm(d);
    let roots: Vec<i64> = (0..p)
        .filter(|&r| (r * r - t * r + n).rem_euclid(p) == 0)
        .collect();
    let mk = |gens: &[QuadInt]| QuadIdeal::from_generators(d, gens);
    match roots.len() {
        0 => Ok(vec![mk(&[QuadInt::int(d, p)])?]),
        1 | 2 => {
            let mut out = Vec::new();
            for r in roots {
                let q = mk(&[QuadInt::int(d, p), QuadInt::new(d, -r, 1)])?;
                if q.norm() != p {
                    return Err(RingError::FactorizationFailed(p));
                }
                out.push(q);
            }
            Ok(out)
        }
        _ => Err(RingError::FactorizationFailed(p)),
    }
}

/// Prime factorization of a proper nonzero ideal.
pub fn factor_ideal(ideal: &QuadIdeal) -> Result<Vec<(QuadIdeal, u32)>, RingError> {
    if ideal.is_unit() {
        return Err(RingError::UnitIdeal);
    }
    let mut out = Vec::new();
    for p in prime_factors(ideal.norm()) {
        for prime in primes_above(ideal.d, p)? {
            let mut e = 0;
            let mut power = prime;
            while ideal.is_subset_of(&power) {
                e += 1;
                power = power.mul(&prime);
            }
            if e > 0 {
                out.push((prime, e));
            }
        }
    }
    let mut prod = QuadIdeal::unit(ideal.d);
    for (p, e) in &out {
        prod = prod.mul(&p.pow(*e));
    }
    if prod != *ideal {
        return Err(RingError::FactorizationFailed(ideal.norm()));
    }
    Ok(out)
}

/// |PSL(2, O_d/I)|.
pub fn psl_order(ideal: &QuadIdeal) -> Result<u64, RingError> {
    let factors = factor_ideal(ideal)?;
    let n = ideal.norm() as u128;
    let mut num = n * n * n;
    let mut den: u128 = 1;
    for (p, _) in &factors {
        let q = p.norm() as u128;
        num *= q * q - 1;
        den *= q * q;
    }
    let tau = if ideal.contains(&QuadInt::int(ideal.d, 2)) { 1 } else { 2 };
    den *= tau;
    debug_assert_eq!(num % den, 0);
    Ok((num / den) as u64)
}

/// A 2x2 matrix over O_d of determinant one, viewed up to sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProjMatrix {
    pub e: [QuadInt; 4],
}

impl ProjMatrix {
    pub fn new(a: QuadInt, b: QuadInt, c: QuadInt, d: QuadInt) -> Self {
        ProjMatrix { e: [a, b, c, d] }
    }
    pub fn from_ints(d: i64, m: [[i64; 2]; 4]) -> Self {
        ProjMatrix {
            e: [
                QuadInt::new(d, m[0][0], m[0][1]),
                QuadInt::new(d, m[1][0], m[1][1]),
                QuadInt::new(d, m[2][0], m[2][1]),
                QuadInt::new(d, m[3][0], m[3][1]),
            ],
        }
    }
    pub fn to_ints(&self) -> [[i64; 2]; 4] {
        [
            [self.e[0].a, self.e[0].b],
            [self.e[1].a, self.e[1].b],
            [self.e[2].a, self.e[2].b],
            [self.e[3].a, self.e[3].b],
        ]
    }
    pub fn d(&self) -> i64 {
        self.e[0].d
    }
    pub fn identity(d: i64) -> Self {
        let (o, z) = (QuadInt::one(d), QuadInt::zero(d));
        ProjMatrix { e: [o, z, z, o] }
    }
    pub fn det(&self) -> QuadInt {
        self.e[0] * self.e[3] - self.e[1] * self.e[2]
    }
    pub fn inverse(&self) -> Self {
        ProjMatrix { e: [self.e[3], -self.e[1], -self.e[2], self.e[0]] }
    }
    pub fn neg(&self) -> Self {
        ProjMatrix { e: self.e.map(|x| -x) }
    }
    pub fn trace(&self) -> QuadInt {
        self.e[0] + self.e[3]
    }
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { *self };
        let mut r = ProjMatrix::identity(self.d());
        for _ in 0..k.unsigned_abs() {
            r = r * base;
        }
        r
    }
    pub fn is_identity(&self) -> bool {
        let c = self.canonical();
        c == ProjMatrix::identity(self.d())
    }
    /// Sign representative whose first nonzero coefficient is positive.
    pub fn canonical(&self) -> Self {
        for x in &self.e {
            for c in [x.a, x.b] {
                if c > 0 {
                    return *self;
                }
                if c < 0 {
                    return self.neg();
                }
            }
        }
        *self
    }
    pub fn max_coeff(&self) -> i64 {
        self.e.iter().map(|x| x.a.abs().max(x.b.abs())).max().unwrap_or(0)
    }
    /// Sum of entry norms, i.e. 2 cosh of the displacement of j.
    pub fn frobenius_norm(&self) -> i64 {
        self.e.iter().map(|x| x.norm()).sum()
    }
    pub fn reduce(&self, ideal: &QuadIdeal) -> Self {
        ProjMatrix { e: self.e.map(|x| ideal.reduce(&x)) }
    }
}

impl Mul for ProjMatrix {
    type Output = ProjMatrix;
    fn mul(self, o: ProjMatrix) -> ProjMatrix {
        let [a, b, c, d] = self.e;
        let [e, f, g, h] = o.e;
        ProjMatrix { e: [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h] }
    }
}

impl fmt::Display for ProjMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.e[0], self.e[1], self.e[2], self.e[3])
    }
}

/// Compact key of a residue matrix modulo I and sign.
pub type ResidueKey = [i64; 8];

fn key_of(m: &ProjMatrix) -> ResidueKey {
    [
        m.e[0].a, m.e[0].b, m.e[1].a, m.e[1].b, m.e[2].a, m.e[2].b, m.e[3].a, m.e[3].b,
    ]
}

/// Canonical representative of m in PSL(2, O_d/I): entries reduced into the
/// fundamental parallelogram, then the smaller of the two sign choices.
pub fn proj_canonicalize(m: &ProjMatrix, ideal: &QuadIdeal) -> ProjMatrix {
    let p = m.reduce(ideal);
    let q = m.neg().reduce(ideal);
    if key_of(&q) < key_of(&p) {
        q
    } else {
        p
    }
}

pub fn residue_key(m: &ProjMatrix, ideal: &QuadIdeal) -> ResidueKey {
    key_of(&proj_canonicalize(m, ideal))
}

/// PSL(2, O_d/I) as an explicit list of canonical residues.
#[derive(Clone, Debug)]
pub struct FiniteProjGroup {
    pub ideal: QuadIdeal,
    pub elements: Vec<ProjMatrix>,
    pub lookup: HashMap<ResidueKey, usize>,
}

pub const DEFAULT_ENUMERATION_BUDGET: usize = 5_000_000;

pub fn enumerate_psl(
    ideal: &QuadIdeal,
    generators: &[ProjMatrix],
    budget: usize,
) -> Result<FiniteProjGroup, RingError> {
    let id = proj_canonicalize(&ProjMatrix::identity(ideal.d), ideal);
    let mut gens: Vec<ProjMatrix> = Vec::new();
    for g in generators {
        gens.push(proj_canonicalize(g, ideal));
        gens.push(proj_canonicalize(&g.inverse(), ideal));
    }
    let mut elements = vec![id];
    let mut lookup = HashMap::new();
    lookup.insert(key_of(&id), 0usize);
    let mut head = 0;
    while head < elements.len() {
        let m = elements[head];
        head += 1;
        for g in &gens {
            let p = proj_canonicalize(&(m * *g), ideal);
            let k = key_of(&p);
            if let std::collections::hash_map::Entry::Vacant(e) = lookup.entry(k) {
                if elements.len() >= budget {
                    return Err(RingError::BudgetExceeded(budget));
                }
                e.insert(elements.len());
                elements.push(p);
            }
        }
    }
    Ok(FiniteProjGroup { ideal: *ideal, elements, lookup })
}

impl FiniteProjGroup {
    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
    pub fn index_of(&self, m: &ProjMatrix) -> Option<usize> {
        self.lookup.get(&residue_key(m, &self.ideal)).copied()
    }
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.index_of(&(self.elements[i] * self.elements[j])).expect("closed under products")
    }
    /// Indices of the subgroup generated by the images of `gens`.
    pub fn subgroup(&self, gens: &[ProjMatrix]) -> Vec<usize> {
        let gi: Vec<usize> = gens.iter().filter_map(|g| self.index_of(g)).collect();
        let id = self.index_of(&ProjMatrix::identity(self.ideal.d)).unwrap();
        let mut seen = vec![false; self.len()];
        seen[id] = true;
        let mut out = vec![id];
        let mut head = 0;
        while head < out.len() {
            let x = out[head];
            head += 1;
            for &g in &gi {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }
    /// Left coset g*H, as a sorted list of element indices.
    pub fn left_coset(&self, g: usize, subgroup: &[usize]) -> Vec<usize> {
        let mut v: Vec<usize> = subgroup.iter().map(|&h| self.mul(g, h)).collect();
        v.sort_unstable();
        v
    }
}

/// Reduced binary quadratic forms of discriminant disc(O_d): the class number.
pub fn class_number(d: i64) -> usize {
    let disc = discriminant(d);
    let mut count = 0;
    let mut a = 1;
    while 3 * a * a <= -disc {
        for b in -a + 1..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if c == a && b < 0 {
                continue;
            }
            count += 1;
        }
        a += 1;
    }
    count
}

/// All ideals of O_d of norm at most `max_norm`, in canonical form.
pub fn ideals_up_to_norm(d: i64, max_norm: i64) -> Vec<QuadIdeal> {
    let mut out = Vec::new();
    for l in 1..=max_norm {
        for n in 1..=max_norm {
            if n * l > max_norm || n % l != 0 {
                continue;
            }
            let mut k = 0;
            while k < n {
                let ideal = QuadIdeal { d, n, k, l };
                if ideal.is_ideal() {
                    out.push(ideal);
                }
                k += l;
            }
        }
    }
    out.sort_by_key(|i| (i.norm(), i.n, i.k, i.l));
    out
}

/// Parses an element of Q(sqrt(-d)) written with integers, `w` (omega_d),
/// `s` (sqrt(-d)), `i` (sqrt(-1), only for d = 1), `+ - * /` and parentheses,
/// and returns it as an element of O_d.
pub fn parse_quad(d: i64, text: &str) -> Result<QuadInt, RingError> {
    let mut p = ExprParser { d, src: text.as_bytes(), pos: 0, text };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    v.to_quad_int(d).ok_or(RingError::NotIntegral(d))
}

/// Parses a comma-separated generator list, optionally wrapped as
/// `gens=[...]` or in angle brackets.
pub fn parse_ideal_gens(d: i64, text: &str) -> Result<Vec<QuadInt>, RingError> {
    let mut t = text.trim();
    if let Some(rest) = t.strip_prefix("gens=") {
        t = rest.trim();
    }
    let t = t
        .trim_start_matches(['[', '<', '⟨'])
        .trim_end_matches([']', '>', '⟩'])
        .trim();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = t.as_bytes();
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b',' if depth == 0 => {
                out.push(parse_quad(d, &t[start..i])?);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(parse_quad(d, &t[start..])?);
    Ok(out)
}

/// x + y*sqrt(-d) with rational x = xn/den, y = yn/den.
#[derive(Clone, Copy, Debug)]
struct RectQ {
    xn: i64,
    yn: i64,
    den: i64,
}

impl RectQ {
    fn norm(self) -> RectQ {
        let g = self.xn.gcd(&self.yn).gcd(&self.den);
        let s = if self.den < 0 { -1 } else { 1 };
        RectQ { xn: s * self.xn / g, yn: s * self.yn / g, den: s * self.den / g }
    }
    fn add(self, o: RectQ) -> RectQ {
        RectQ {
            xn: self.xn * o.den + o.xn * self.den,
            yn: self.yn * o.den + o.yn * self.den,
            den: self.den * o.den,
        }
        .norm()
    }
    fn neg(self) -> RectQ {
        RectQ { xn: -self.xn, yn: -self.yn, den: self.den }
    }
    fn mul(self, o: RectQ, d: i64) -> RectQ {
        RectQ {
            xn: self.xn * o.xn - d * self.yn * o.yn,
            yn: self.xn * o.yn + self.yn * o.xn,
            den: self.den * o.den,
        }
        .norm()
    }
    fn inv(self, d: i64) -> Option<RectQ> {
        let n = self.xn * self.xn + d * self.yn * self.yn;
        if n == 0 {
            return None;
        }
        Some(RectQ { xn: self.xn * self.den, yn: -self.yn * self.den, den: n }.norm())
    }
    fn to_quad_int(self, d: i64) -> Option<QuadInt> {
        // x + y sqrt(-d) = a + b w
        if d % 4 == 3 {
            // w = 1/2 + sqrt(-d)/2, so b = 2y and a = x - y.
            let b2 = 2 * self.yn;
            if b2 % self.den != 0 {
                return None;
            }
            let an = self.xn - self.yn;
            if an % self.den != 0 {
                return None;
            }
            Some(QuadInt::new(d, an / self.den, b2 / self.den))
        } else {
            if self.xn % self.den != 0 || self.yn % self.den != 0 {
                return None;
            }
            Some(QuadInt::new(d, self.xn / self.den, self.yn / self.den))
        }
    }
}

struct ExprParser<'a> {
    d: i64,
    src: &'a [u8],
    pos: usize,
    text: &'a str,
}

impl<'a> ExprParser<'a> {
    fn err(&self, msg: &str) -> RingError {
        RingError::Parse(self.text.to_string(), format!("{} at offset {}", msg, self.pos))
    }
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }
    fn expr(&mut self) -> Result<RectQ, RingError> {
        let mut v = self.term()?;
        while let Some(c) = self.peek() {
            if c == b'+' {
                self.pos += 1;
                v = v.add(self.term()?);
            } else if c == b'-' {
                self.pos += 1;
                v = v.add(self.term()?.neg());
            } else {
                break;
            }
        }
        Ok(v)
    }
    fn term(&mut self) -> Result<RectQ, RingError> {
        let mut v = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    v = v.mul(self.unary()?, self.d);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let r = self.unary()?;
                    let inv = r.inv(self.d).ok_or_else(|| self.err("division by zero"))?;
                    v = v.mul(inv, self.d);
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => {
                    // implicit multiplication such as `2w` or `3s`
                    v = v.mul(self.unary()?, self.d);
                }
                _ => break,
            }
        }
        Ok(v)
    }
    fn unary(&mut self) -> Result<RectQ, RingError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }
    fn atom(&mut self) -> Result<RectQ, RingError> {
        let d = self.d;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let n: i64 = self.text[start..self.pos]
                    .parse()
                    .map_err(|_| self.err("bad integer"))?;
                Ok(RectQ { xn: n, yn: 0, den: 1 })
            }
            Some(b'w') => {
                self.pos += 1;
                if d % 4 == 3 {
                    Ok(RectQ { xn: 1, yn: 1, den: 2 })
                } else {
                    Ok(RectQ { xn: 0, yn: 1, den: 1 })
                }
            }
            Some(b's') => {
                self.pos += 1;
                Ok(RectQ { xn: 0, yn: 1, den: 1 })
            }
            Some(b'i') if d == 1 => {
                self.pos += 1;
                Ok(RectQ { xn: 0, yn: 1, den: 1 })
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples_from_generators() {
        let x = QuadInt::new(2, 1, 1);
        assert_eq!(QuadIdeal::principal(x).unwrap(), QuadIdeal { d: 2, n: 3, k: 1, l: 1 });
        let y = QuadInt::new(2, 1, 3);
        assert_eq!(QuadIdeal::principal(y).unwrap(), QuadIdeal { d: 2, n: 19, k: 13, l: 1 });
        assert_eq!(
            QuadIdeal::from_generators(1, &[QuadInt::one(1)]).unwrap(),
            QuadIdeal::unit(1)
        );
        assert_eq!(
            QuadIdeal::from_generators(1, &[QuadInt::zero(1)]),
            Err(RingError::ZeroIdeal)
        );
        assert_eq!(
            QuadIdeal::from_generators(4, &[QuadInt::one(4)]),
            Err(RingError::NotSquareFree(4))
        );
    }

    #[test]
    fn reduction_examples() {
        let i = QuadIdeal { d: 2, n: 3, k: 1, l: 1 };
        assert_eq!(i.reduce(&QuadInt::int(2, 4)), QuadInt::int(2, 1));
        assert_eq!(i.reduce(&QuadInt::omega(2)), QuadInt::int(2, 2));
        assert_eq!(i.reduce(&QuadInt::zero(2)), QuadInt::zero(2));
    }

    #[test]
    fn factorization_examples() {
        let two = QuadIdeal::principal(QuadInt::int(1, 2)).unwrap();
        let f = factor_ideal(&two).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].0, QuadIdeal::principal(QuadInt::new(1, 1, 1)).unwrap());
        assert_eq!(f[0].1, 2);
        let three = QuadIdeal::principal(QuadInt::int(2, 3)).unwrap();
        let f = factor_ideal(&three).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|(p, e)| p.norm() == 3 && *e == 1));
        assert_eq!(f[0].0.mul(&f[1].0), three);
        let two7 = QuadIdeal::principal(QuadInt::int(7, 2)).unwrap();
        let f = factor_ideal(&two7).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|(p, e)| p.norm() == 2 && *e == 1));
    }

    #[test]
    fn psl_orders() {
        let o = |d, a, b| psl_order(&QuadIdeal::principal(QuadInt::new(d, a, b)).unwrap()).unwrap();
        assert_eq!(o(1, 2, 0), 48);
        assert_eq!(o(7, 0, 1), 6);
        assert_eq!(o(2, 3, 0), 288);
        assert_eq!(o(1, 3, 0), 360);
        assert_eq!(o(1, 1, 1), 6);
    }

    #[test]
    fn canonical_residues() {
        let i = QuadIdeal { d: 2, n: 3, k: 1, l: 1 };
        let id = ProjMatrix::identity(2);
        assert_eq!(proj_canonicalize(&id, &i), proj_canonicalize(&id.neg(), &i));
        let t3 = ProjMatrix::from_ints(2, [[1, 0], [3, 0], [0, 0], [1, 0]]);
        assert_eq!(proj_canonicalize(&t3, &i), proj_canonicalize(&id, &i));
    }

    #[test]
    fn class_numbers() {
        let expect = [
            (1, 1), (2, 1), (3, 1), (5, 2), (6, 2), (7, 1), (11, 1), (15, 2), (19, 1),
            (23, 3), (31, 3), (39, 4), (47, 5), (71, 7),
        ];
        for (d, h) in expect {
            assert_eq!(class_number(d), h, "d = {}", d);
        }
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_quad(7, "(1+s)/2").unwrap(), QuadInt::omega(7));
        assert_eq!(parse_quad(2, "1+w").unwrap(), QuadInt::new(2, 1, 1));
        assert_eq!(parse_quad(1, "3+2i").unwrap(), QuadInt::new(1, 3, 2));
        assert_eq!(parse_quad(5, "1+s").unwrap(), QuadInt::new(5, 1, 1));
        assert_eq!(parse_quad(11, "(3+s)/2").unwrap(), QuadInt::new(11, 1, 1));
        assert!(parse_quad(2, "1/2").is_err());
        let g = parse_ideal_gens(15, "2, (1+s)/2").unwrap();
        assert_eq!(g, vec![QuadInt::int(15, 2), QuadInt::omega(15)]);
        let g = parse_ideal_gens(2, "gens=[1+w, 3]").unwrap();
        assert_eq!(g.len(), 2);
    }
}
