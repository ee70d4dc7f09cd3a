//! Permutations of the four tetrahedron vertices.

use std::fmt;

/// A permutation of {0,1,2,3}, stored as its image list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm([u8; 4]);

impl Perm {
    pub const IDENTITY: Perm = Perm([0, 1, 2, 3]);

    pub fn from_images(images: [u8; 4]) -> Option<Perm> {
        let mut seen = [false; 4];
        for &i in &images {
            if i > 3 || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm(images))
    }

    pub fn images(&self) -> [u8; 4] {
        self.0
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// (self ∘ other)(i) = self(other(i)).
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm([self.0[other.0[0] as usize], self.0[other.0[1] as usize], self.0[other.0[2] as usize], self.0[other.0[3] as usize]])
    }

    pub fn inverse(&self) -> Perm {
        let mut out = [0u8; 4];
        for i in 0..4 {
            out[self.0[i] as usize] = i as u8;
        }
        Perm(out)
    }

    /// +1 for even, −1 for odd.
    pub fn sign(&self) -> i8 {
        let mut inv = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Transposition of a and b.
    pub fn swap(a: usize, b: usize) -> Perm {
        let mut p = [0u8, 1, 2, 3];
        p.swap(a, b);
        Perm(p)
    }

    /// All 24 permutations in lexicographic order.
    pub fn all() -> Vec<Perm> {
        let mut out = Vec::with_capacity(24);
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    if a == b || a == c || b == c {
                        continue;
                    }
                    let d = 6 - a - b - c;
                    {
                        out.push(Perm([a, b, c, d]));
                    }
                }
            }
        }
        out
    }

    /// Position in the lexicographic order of [`Perm::all`].
    pub fn index(&self) -> usize {
        let mut idx = 0;
        let mut used = [false; 4];
        let fact = [6, 2, 1, 1];
        for i in 0..4 {
            let v = self.0[i];
            let smaller = (0..v).filter(|&k| !used[k as usize]).count();
            idx += smaller * fact[i];
            used[v as usize] = true;
        }
        idx
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_laws() {
        let all = Perm::all();
        assert_eq!(all.len(), 24);
        for (i, p) in all.iter().enumerate() {
            assert_eq!(p.index(), i);
            assert_eq!(p.compose(&p.inverse()), Perm::IDENTITY);
            for q in &all {
                assert_eq!(p.compose(q).sign(), p.sign() * q.sign());
            }
        }
        assert_eq!(all.iter().filter(|p| p.sign() == 1).count(), 12);
    }
}
