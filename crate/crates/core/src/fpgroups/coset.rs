//! Todd–Coxeter coset enumeration (HLT strategy with lookahead).
//!
//! Columns are letters: column `2g` is generator g, column `2g + 1` its
//! inverse. Coset 0 is the subgroup itself.

use super::word::{inv_letter, Letter};
use super::{FpError, Presentation, Word};

pub const DEFAULT_COSET_BUDGET: usize = 2_000_000;

const NONE: u32 = u32::MAX;

/// A complete coset table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    pub ngens: usize,
    /// Row-major, `index * 2 * ngens` entries.
    pub table: Vec<u32>,
    pub index: usize,
}

impl CosetTable {
    pub fn ncols(&self) -> usize {
        2 * self.ngens
    }

    pub fn act(&self, coset: usize, x: Letter) -> usize {
        self.table[coset * self.ncols() + x as usize] as usize
    }

    /// Image of `coset` under the word (right action).
    pub fn trace(&self, coset: usize, w: &Word) -> usize {
        let mut c = coset;
        for &(g, e) in &w.syllables {
            let x = 2 * g as Letter + (e < 0) as Letter;
            for _ in 0..e.unsigned_abs() {
                c = self.act(c, x);
            }
        }
        c
    }

    pub fn trace_letters(&self, coset: usize, w: &[Letter]) -> usize {
        w.iter().fold(coset, |c, &x| self.act(c, x))
    }

    /// Checks the defining properties of a complete table.
    pub fn verify(&self, p: &Presentation, subgroup: &[Word]) -> bool {
        let nc = self.ncols();
        if self.table.len() != self.index * nc {
            return false;
        }
        for c in 0..self.index {
            for x in 0..nc {
                let y = self.table[c * nc + x];
                if y == NONE || y as usize >= self.index {
                    return false;
                }
                if self.act(y as usize, inv_letter(x as Letter)) != c {
                    return false;
                }
            }
            if p.relators.iter().any(|r| self.trace(c, r) != c) {
                return false;
            }
        }
        subgroup.iter().all(|w| self.trace(0, w) == 0)
    }
}

struct Enumerator {
    ncols: usize,
    table: Vec<u32>,
    fwd: Vec<u32>,
    live: usize,
    budget: usize,
    queue: Vec<u32>,
}

impl Enumerator {
    fn new(ncols: usize, budget: usize) -> Self {
        let mut e = Enumerator {
            ncols,
            table: Vec::new(),
            fwd: Vec::new(),
            live: 0,
            budget,
            queue: Vec::new(),
        };
        e.new_row();
        e
    }

    fn rows(&self) -> usize {
        self.fwd.len()
    }

    fn new_row(&mut self) -> u32 {
        let r = self.fwd.len() as u32;
        self.fwd.push(r);
        self.table.extend(std::iter::repeat_n(NONE, self.ncols));
        self.live += 1;
        r
    }

    #[inline]
    fn get(&self, c: u32, x: Letter) -> u32 {
        self.table[c as usize * self.ncols + x as usize]
    }

    #[inline]
    fn set(&mut self, c: u32, x: Letter, v: u32) {
        self.table[c as usize * self.ncols + x as usize] = v;
    }

    #[inline]
    fn alive(&self, c: u32) -> bool {
        self.fwd[c as usize] == c
    }

    fn define(&mut self, c: u32, x: Letter) -> u32 {
        let d = self.new_row();
        self.set(c, x, d);
        self.set(d, inv_letter(x), c);
        d
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.fwd[r as usize] != r {
            r = self.fwd[r as usize];
        }
        let mut s = c;
        while self.fwd[s as usize] != r {
            let next = self.fwd[s as usize];
            self.fwd[s as usize] = r;
            s = next;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.fwd[hi as usize] = lo;
        self.live -= 1;
        self.queue.push(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i];
            i += 1;
            for x in 0..self.ncols as Letter {
                let f = self.get(e, x);
                if f == NONE {
                    continue;
                }
                let xi = inv_letter(x);
                if self.get(f, xi) == e {
                    self.set(f, xi, NONE);
                }
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                let t = self.get(e1, x);
                if t != NONE {
                    self.merge(f1, t);
                } else {
                    let s = self.get(f1, xi);
                    if s != NONE {
                        self.merge(e1, s);
                    } else {
                        self.set(e1, x, f1);
                        self.set(f1, xi, e1);
                    }
                }
            }
        }
    }

    /// Scans `w` from `alpha`; fills gaps when `fill`, otherwise only
    /// records deductions and coincidences. Returns false on overflow.
    fn scan(&mut self, alpha: u32, w: &[Letter], fill: bool) -> bool {
        if w.is_empty() {
            return true;
        }
        let mut f = alpha;
        let mut i = 0usize;
        let mut b = alpha;
        let mut j = w.len() as isize - 1;
        loop {
            while (i as isize) <= j {
                let n = self.get(f, w[i]);
                if n == NONE {
                    break;
                }
                f = n;
                i += 1;
            }
            if i as isize > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return true;
            }
            while j >= i as isize {
                let n = self.get(b, inv_letter(w[j as usize]));
                if n == NONE {
                    break;
                }
                b = n;
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return true;
            }
            if j == i as isize {
                self.set(f, w[i], b);
                self.set(b, inv_letter(w[i]), f);
                return true;
            }
            if !fill {
                return true;
            }
            if self.rows() >= self.budget {
                return false;
            }
            self.define(f, w[i]);
        }
    }

    /// Scans every relator from every live coset without defining.
    fn lookahead(&mut self, rels: &[Vec<Letter>]) {
        let mut c = 0;
        while c < self.rows() {
            if self.alive(c as u32) {
                for r in rels {
                    if !self.alive(c as u32) {
                        break;
                    }
                    self.scan(c as u32, r, false);
                }
            }
            c += 1;
        }
    }

    /// Renumbers live cosets in order. Returns the new index of each old
    /// row (NONE for dead rows).
    fn compact(&mut self) -> Vec<u32> {
        let n = self.rows();
        let mut map = vec![NONE; n];
        let mut k = 0u32;
        for c in 0..n {
            if self.fwd[c] == c as u32 {
                map[c] = k;
                k += 1;
            }
        }
        let nc = self.ncols;
        let mut table = vec![NONE; k as usize * nc];
        for c in 0..n {
            if map[c] == NONE {
                continue;
            }
            for x in 0..nc {
                let v = self.table[c * nc + x];
                table[map[c] as usize * nc + x] = if v == NONE { NONE } else { map[v as usize] };
            }
        }
        self.table = table;
        self.fwd = (0..k).collect();
        self.live = k as usize;
        map
    }
}

/// Enumerates the cosets of the subgroup generated by `subgroup` in the
/// group presented by `p`, with at most `budget` coset rows in memory.
pub fn todd_coxeter(
    p: &Presentation,
    subgroup: &[Word],
    budget: usize,
) -> Result<CosetTable, FpError> {
    let ncols = 2 * p.ngens();
    let budget = budget.max(2);
    let rels: Vec<Vec<Letter>> = p.relators.iter().map(|r| r.cyclic_letters()).collect();
    let subs: Vec<Vec<Letter>> = subgroup.iter().map(|w| w.letters()).collect();
    let mut e = Enumerator::new(ncols, budget);

    // subgroup generators from coset 0
    for s in &subs {
        while !e.scan(0, s, true) {
            relieve(&mut e, &rels, 0)?;
        }
    }

    let mut c: usize = 0;
    'outer: while c < e.rows() {
        if !e.alive(c as u32) {
            c += 1;
            continue;
        }
        for r in &rels {
            if !e.alive(c as u32) {
                break;
            }
            if !e.scan(c as u32, r, true) {
                c = relieve(&mut e, &rels, c)?;
                continue 'outer;
            }
        }
        if e.alive(c as u32) {
            for x in 0..ncols as Letter {
                if e.get(c as u32, x) == NONE {
                    if e.rows() >= e.budget {
                        c = relieve(&mut e, &rels, c)?;
                        continue 'outer;
                    }
                    e.define(c as u32, x);
                }
            }
        }
        c += 1;
    }

    e.compact();
    let index = e.rows();
    let table = CosetTable { ngens: p.ngens(), table: e.table, index };
    if table.table.contains(&NONE) {
        return Err(FpError::IncompleteTable);
    }
    debug_assert!(table.verify(p, subgroup));
    Ok(table)
}

/// Lookahead plus compaction when the row budget is hit. Returns the new
/// position of row `c`, or of the first live row after it if `c` died.
fn relieve(e: &mut Enumerator, rels: &[Vec<Letter>], c: usize) -> Result<usize, FpError> {
    e.lookahead(rels);
    let map = e.compact();
    if e.rows() + e.budget / 64 + 1 >= e.budget {
        return Err(FpError::BudgetExceeded(e.budget));
    }
    Ok(map[..c].iter().filter(|&&m| m != NONE).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(names: &[&str], rels: &[&str]) -> Presentation {
        Presentation::parse(names, rels).unwrap()
    }

    #[test]
    fn small_groups() {
        let p = pres(&["x"], &["x^3"]);
        let x = p.parse_word("x").unwrap();
        assert_eq!(todd_coxeter(&p, &[x], 100).unwrap().index, 1);
        assert_eq!(todd_coxeter(&p, &[], 100).unwrap().index, 3);
        // S3
        let p = pres(&["a", "b"], &["a^2", "b^3", "(a*b)^2"]);
        assert_eq!(todd_coxeter(&p, &[], 100).unwrap().index, 6);
        // A5 as (2,3,5) triangle group
        let p = pres(&["a", "b"], &["a^2", "b^3", "(a*b)^5"]);
        let t = todd_coxeter(&p, &[], 1000).unwrap();
        assert_eq!(t.index, 60);
        assert!(t.verify(&p, &[]));
        // PSL(2,7) = (2,3,7;4)
        let p = pres(&["a", "b"], &["a^2", "b^3", "(a*b)^7", "[a,b]^4"]);
        assert_eq!(todd_coxeter(&p, &[], 10_000).unwrap().index, 168);
    }

    #[test]
    fn budget_is_reported() {
        let p = pres(&["x", "y"], &["[x,y]"]);
        assert!(matches!(todd_coxeter(&p, &[], 500), Err(FpError::BudgetExceeded(500))));
    }

    #[test]
    fn lookahead_recovers() {
        // a tight budget forces several compactions
        let p = pres(&["a", "b"], &["a^2", "b^3", "(a*b)^7", "[a,b]^4"]);
        let t = todd_coxeter(&p, &[], 400).unwrap();
        assert_eq!(t.index, 168);
        assert!(t.verify(&p, &[]));
    }
}
