//! Free-group words and the textual word grammar used by presentations and
//! certificates.
//!
//! ```text
//! word   := factor ("*" factor)*
//! factor := gen ("^" int)? | "(" word ")" ("^" int)? | "[" word "," word "]" ("^" int)?
//! ```
//! `[x,y]` is x^-1 y^-1 x y; the Magma spelling `(x,y)` is accepted too.
//! `Id`, `Id(...)` and `1` denote the empty word.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::FpError;

/// A letter: generator `g` is encoded as `2g`, its inverse as `2g + 1`.
pub type Letter = u32;

pub fn letter(gen: usize, inverse: bool) -> Letter {
    (2 * gen + inverse as usize) as Letter
}

pub fn inv_letter(x: Letter) -> Letter {
    x ^ 1
}

pub fn letter_gen(x: Letter) -> usize {
    (x >> 1) as usize
}

pub fn letter_is_inverse(x: Letter) -> bool {
    x & 1 == 1
}

/// A freely reduced word, stored as syllables (generator, nonzero exponent).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    pub syllables: Vec<(usize, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Word { syllables: Vec::new() }
    }

    pub fn gen(g: usize) -> Self {
        Word { syllables: vec![(g, 1)] }
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
        for &x in letters {
            if stack.last() == Some(&inv_letter(x)) {
                stack.pop();
            } else {
                stack.push(x);
            }
        }
        let mut syllables: Vec<(usize, i64)> = Vec::new();
        for x in stack {
            let g = letter_gen(x);
            let e = if letter_is_inverse(x) { -1 } else { 1 };
            match syllables.last_mut() {
                Some((h, f)) if *h == g => *f += e,
                _ => syllables.push((g, e)),
            }
        }
        Word { syllables }
    }

    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::with_capacity(self.len());
        for &(g, e) in &self.syllables {
            let x = letter(g, e < 0);
            for _ in 0..e.unsigned_abs() {
                out.push(x);
            }
        }
        out
    }

    /// Number of letters.
    pub fn len(&self) -> usize {
        self.syllables.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word {
            syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Self {
        let mut l = self.letters();
        l.extend(other.letters());
        Word::from_letters(&l)
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut l = Vec::new();
        let bl = base.letters();
        for _ in 0..k.unsigned_abs() {
            l.extend_from_slice(&bl);
        }
        Word::from_letters(&l)
    }

    pub fn commutator(x: &Word, y: &Word) -> Self {
        x.inverse().mul(&y.inverse()).mul(x).mul(y)
    }

    pub fn conjugate_by(&self, g: &Word) -> Self {
        g.mul(self).mul(&g.inverse())
    }

    /// Cyclically reduced letters.
    pub fn cyclic_letters(&self) -> Vec<Letter> {
        let l = self.letters();
        let (mut i, mut j) = (0usize, l.len());
        while j >= i + 2 && l[i] == inv_letter(l[j - 1]) {
            i += 1;
            j -= 1;
        }
        l[i..j].to_vec()
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, ngens: usize) -> Vec<i64> {
        let mut v = vec![0; ngens];
        for &(g, e) in &self.syllables {
            v[g] += e;
        }
        v
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.syllables.is_empty() {
            return "Id".to_string();
        }
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|&(g, e)| {
                if e == 1 {
                    names[g].clone()
                } else {
                    format!("{}^{}", names[g], e)
                }
            })
            .collect();
        parts.join("*")
    }

    /// Evaluates the word with the given generator values.
    pub fn evaluate<T: Clone>(
        &self,
        values: &[T],
        inverses: &[T],
        identity: T,
        mul: impl Fn(&T, &T) -> T,
    ) -> T {
        let mut acc = identity;
        for &(g, e) in &self.syllables {
            let v = if e > 0 { &values[g] } else { &inverses[g] };
            for _ in 0..e.unsigned_abs() {
                acc = mul(&acc, v);
            }
        }
        acc
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self
            .syllables
            .iter()
            .map(|s| s.0 + 1)
            .max()
            .unwrap_or(0))
            .map(|i| format!("x{}", i))
            .collect();
        write!(f, "{}", self.format(&names))
    }
}

/// Parses `text` over the generator `names`.
pub fn parse_word(names: &[String], text: &str) -> Result<Word, FpError> {
    let mut p = WordParser { names, text, pos: 0 };
    p.skip_ws();
    if p.pos == text.len() {
        return Ok(Word::identity());
    }
    let w = p.word()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.err("trailing input"));
    }
    Ok(w)
}

struct WordParser<'a> {
    names: &'a [String],
    text: &'a str,
    pos: usize,
}

impl<'a> WordParser<'a> {
    fn err(&self, msg: &str) -> FpError {
        FpError::Parse(self.text.to_string(), format!("{} at offset {}", msg, self.pos))
    }

    fn skip_ws(&mut self) {
        let b = self.text.as_bytes();
        while self.pos < b.len() && b[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.as_bytes().get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), FpError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn word(&mut self) -> Result<Word, FpError> {
        let mut w = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            w = w.mul(&self.factor()?);
        }
        Ok(w)
    }

    fn exponent(&mut self) -> Result<Option<i64>, FpError> {
        if self.peek() != Some(b'^') {
            return Ok(None);
        }
        self.pos += 1;
        self.skip_ws();
        let b = self.text.as_bytes();
        let start = self.pos;
        if self.pos < b.len() && (b[self.pos] == b'-' || b[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < b.len() && b[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.text[start..self.pos]
            .parse::<i64>()
            .map(Some)
            .map_err(|_| self.err("bad exponent"))
    }

    fn factor(&mut self) -> Result<Word, FpError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let mut w = self.word()?;
                if self.peek() == Some(b',') {
                    // Magma commutator notation (x,y)
                    self.pos += 1;
                    let y = self.word()?;
                    w = Word::commutator(&w, &y);
                }
                self.expect(b')')?;
                let e = self.exponent()?.unwrap_or(1);
                Ok(w.pow(e))
            }
            Some(b'[') => {
                self.pos += 1;
                let x = self.word()?;
                self.expect(b',')?;
                let y = self.word()?;
                self.expect(b']')?;
                let e = self.exponent()?.unwrap_or(1);
                Ok(Word::commutator(&x, &y).pow(e))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Word::identity())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let b = self.text.as_bytes();
                let start = self.pos;
                while self.pos < b.len() && (b[self.pos].is_ascii_alphanumeric() || b[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = &self.text[start..self.pos];
                if name == "Id" {
                    // optional group argument as in Id(G)
                    if self.peek() == Some(b'(') {
                        while self.pos < b.len() && b[self.pos] != b')' {
                            self.pos += 1;
                        }
                        self.expect(b')')?;
                    }
                    self.exponent()?;
                    return Ok(Word::identity());
                }
                let g = self
                    .names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| self.err(&format!("unknown generator `{}`", name)))?;
                let e = self.exponent()?.unwrap_or(1);
                Ok(Word::gen(g).pow(e))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        ["a", "t", "u"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn grammar() {
        let n = names();
        let w = parse_word(&n, "(t*a)^3").unwrap();
        assert_eq!(w.len(), 6);
        let c = parse_word(&n, "[t,u]").unwrap();
        assert_eq!(c.format(&n), "t^-1*u^-1*t*u");
        assert!(parse_word(&n, "Id").unwrap().is_identity());
        assert!(parse_word(&n, "Id(Bianchi2)").unwrap().is_identity());
        assert!(parse_word(&n, "t*t^-1").unwrap().is_identity());
        let w = parse_word(&n, "t^-1*a*(t^-2*u)*a^-1*t").unwrap();
        assert_eq!(w.format(&n), "t^-1*a*t^-2*u*a^-1*t");
        assert!(parse_word(&n, "x").is_err());
        assert!(parse_word(&n, "t*").is_err());
    }

    #[test]
    fn reduction() {
        let w = Word::from_letters(&[letter(0, false), letter(1, false), letter(1, true), letter(0, false)]);
        assert_eq!(w.syllables, vec![(0, 2)]);
        let u = Word { syllables: vec![(1, 1), (0, 1), (1, -1)] };
        assert_eq!(u.cyclic_letters(), vec![letter(0, false)]);
    }
}
