//! Integer homology of glued complexes, abelian group invariants and the
//! cover-degree obstructions.

pub mod chain;
pub mod snf;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chain::{boundary_matrices, h1_with_quotient, HomologyReport};
pub use snf::{dense_smith, smith_normal_form, SmithForm, SparseIntMatrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("triangulation is not orientable")]
    NotOrientable,
    #[error("triangulation has unglued faces")]
    Incomplete,
}

/// Finitely generated abelian group Z^rank ⊕ Z/d1 ⊕ ... with d1 | d2 | ...
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { rank, torsion: Vec::new() }
    }

    /// Canonical form from a free rank and arbitrary nonzero divisors.
    pub fn from_divisors(rank: usize, divisors: &[BigInt]) -> Self {
        let mut d: Vec<BigInt> = divisors.iter().map(|x| x.abs()).filter(|x| !x.is_one()).collect();
        let mut rank = rank;
        // zero divisors contribute free summands
        let zeros = d.iter().filter(|x| x.is_zero()).count();
        rank += zeros;
        d.retain(|x| !x.is_zero());
        let mut torsion = normalize(d);
        torsion.retain(|x| !x.is_one());
        AbelianGroup { rank, torsion }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    /// Order, None when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.rank > 0 {
            return None;
        }
        Some(self.torsion.iter().fold(BigInt::one(), |a, b| a * b))
    }

    /// Direct sum.
    pub fn plus(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut t = self.torsion.clone();
        t.extend(other.torsion.iter().cloned());
        AbelianGroup::from_divisors(self.rank + other.rank, &t)
    }

    /// Parses the display form, e.g. `Z^2 + Z/3`, `Z/2 + Z/4`, `0`.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if text == "0" {
            return Some(AbelianGroup::trivial());
        }
        let mut rank = 0;
        let mut tors = Vec::new();
        for part in text.split('+') {
            let p = part.trim();
            if p == "Z" {
                rank += 1;
            } else if let Some(r) = p.strip_prefix("Z^") {
                rank += r.parse::<usize>().ok()?;
            } else {
                let m = p.strip_prefix("Z/")?;
                tors.push(m.parse::<BigInt>().ok()?);
            }
        }
        Some(AbelianGroup::from_divisors(rank, &tors))
    }
}

fn normalize(mut d: Vec<BigInt>) -> Vec<BigInt> {
    use num_integer::Integer;
    let n = d.len();
    for i in 0..n {
        for j in i + 1..n {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{}", r)),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{}", t));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Which cover-degree lemma an obstruction check applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObstructionKind {
    /// A cover of degree below |H1(M)/ι*H1(∂M)| has nontrivial quotient.
    MinCoverDegree,
    /// Γ(I) is excluded when the Γ1(I) quotient exceeds 𝒩(I).
    Gamma1Degree,
    /// Γ(J) is excluded when the Γ(I) quotient exceeds |PSL(O/J)|/|PSL(O/I)|.
    PrincipalCover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Excluded,
    Inconclusive,
}

/// Compares |quotient| (None = infinite) with the cover degree.
pub fn cover_obstruction(
    _kind: ObstructionKind,
    quotient_order: Option<&BigInt>,
    degree: u64,
) -> Verdict {
    // every lemma is the same strict inequality
    let exceeds = match quotient_order {
        None => true,
        Some(q) => q > &BigInt::from(degree),
    };
    if exceeds {
        Verdict::Excluded
    } else {
        Verdict::Inconclusive
    }
}

/// Degree of the cover H³/Γ(J) → H³/Γ(I) for J ⊂ I.
pub fn principal_cover_degree(psl_j: u64, psl_i: u64) -> Option<u64> {
    (psl_i > 0 && psl_j.is_multiple_of(psl_i)).then(|| psl_j / psl_i)
}

/// Convenience: order as u64 if finite and small.
pub fn small_order(g: &AbelianGroup) -> Option<u64> {
    g.order().and_then(|o| o.to_u64())
}
