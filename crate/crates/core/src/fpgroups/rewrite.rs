//! Reidemeister–Schreier subgroup presentations and Tietze simplification.

use std::collections::{HashSet, VecDeque};

use super::coset::CosetTable;
use super::word::{inv_letter, letter, letter_gen, letter_is_inverse, Letter};
use super::{FpError, Presentation, Word};

/// Schreier transversal and generator numbering for a complete coset table.
#[derive(Clone, Debug)]
pub struct SchreierRewriter {
    pub table: CosetTable,
    /// Subgroup generator attached to edge (coset, generator), if non-tree.
    gen_of: Vec<Option<u32>>,
    /// Edge (coset, generator) of each Schreier generator.
    pub edges: Vec<(usize, usize)>,
    /// Transversal word of each coset.
    pub reps: Vec<Word>,
}

impl SchreierRewriter {
    pub fn new(table: CosetTable) -> Self {
        let n = table.index;
        let ng = table.ngens;
        // BFS spanning tree: parent[c] = (p, x) with p·x = c
        let mut parent: Vec<Option<(usize, Letter)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut reps = vec![Word::identity(); n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for x in 0..(2 * ng) as Letter {
                let e = table.act(c, x);
                if !seen[e] {
                    seen[e] = true;
                    parent[e] = Some((c, x));
                    reps[e] = reps[c].mul(&Word::from_letters(&[x]));
                    queue.push_back(e);
                }
            }
        }
        let mut gen_of = vec![None; n * ng];
        let mut edges = Vec::new();
        for c in 0..n {
            for g in 0..ng {
                let x = letter(g, false);
                let e = table.act(c, x);
                let tree = parent[e] == Some((c, x)) || parent[c] == Some((e, inv_letter(x)));
                if !tree {
                    gen_of[c * ng + g] = Some(edges.len() as u32);
                    edges.push((c, g));
                }
            }
        }
        SchreierRewriter { table, gen_of, edges, reps }
    }

    pub fn ngens(&self) -> usize {
        self.edges.len()
    }

    /// Rewrites a word read from `coset` as a word in Schreier generators.
    /// Returns the rewritten word and the final coset.
    pub fn rewrite_from(&self, coset: usize, w: &Word) -> (Word, usize) {
        let ng = self.table.ngens;
        let mut out: Vec<Letter> = Vec::new();
        let mut c = coset;
        for x in w.letters() {
            let g = letter_gen(x);
            if letter_is_inverse(x) {
                let prev = self.table.act(c, x);
                if let Some(s) = self.gen_of[prev * ng + g] {
                    out.push(letter(s as usize, true));
                }
                c = prev;
            } else {
                if let Some(s) = self.gen_of[c * ng + g] {
                    out.push(letter(s as usize, false));
                }
                c = self.table.act(c, x);
            }
        }
        (Word::from_letters(&out), c)
    }

    /// Rewrites an element of the subgroup; None if it is not in it.
    pub fn rewrite(&self, w: &Word) -> Option<Word> {
        let (r, c) = self.rewrite_from(0, w);
        (c == 0).then_some(r)
    }

    /// Word in the ambient generators for Schreier generator `i`.
    pub fn generator_word(&self, i: usize) -> Word {
        let (c, g) = self.edges[i];
        let e = self.table.act(c, letter(g, false));
        self.reps[c].mul(&Word::gen(g)).mul(&self.reps[e].inverse())
    }
}

/// Presentation of the subgroup with coset table `table` on Schreier
/// generators: every relator rewritten from every coset.
pub fn reidemeister_schreier(
    p: &Presentation,
    table: &CosetTable,
) -> Result<(Presentation, SchreierRewriter), FpError> {
    if table.table.len() != table.index * 2 * p.ngens() || table.ngens != p.ngens() {
        return Err(FpError::IncompleteTable);
    }
    let rw = SchreierRewriter::new(table.clone());
    let mut rels = Vec::new();
    for c in 0..table.index {
        for r in &p.relators {
            let (w, end) = rw.rewrite_from(c, r);
            if end != c {
                return Err(FpError::IncompleteTable);
            }
            rels.push(w);
        }
    }
    let names = (0..rw.ngens()).map(|i| format!("s{}", i)).collect();
    Ok((Presentation::new(names, rels), rw))
}

fn cyclic_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
    for &x in w {
        if stack.last() == Some(&inv_letter(x)) {
            stack.pop();
        } else {
            stack.push(x);
        }
    }
    let (mut i, mut j) = (0, stack.len());
    while j >= i + 2 && stack[i] == inv_letter(stack[j - 1]) {
        i += 1;
        j -= 1;
    }
    stack[i..j].to_vec()
}

/// Canonical key of a cyclic word up to rotation and inversion.
fn cyclic_key(w: &[Letter]) -> Vec<Letter> {
    let inv: Vec<Letter> = w.iter().rev().map(|&x| inv_letter(x)).collect();
    let mut best = w.to_vec();
    for cand in [w, &inv[..]] {
        for s in 0..cand.len() {
            let rot: Vec<Letter> = cand[s..].iter().chain(&cand[..s]).copied().collect();
            if rot < best {
                best = rot;
            }
        }
    }
    best
}

/// Eliminates generators occurring exactly once in some relator, shortest
/// relator first, while total length stays below `growth` times the
/// starting length (and at least 10 000 letters). Free generators survive.
pub fn tietze_simplify(p: &Presentation, growth: f64) -> Presentation {
    let ng = p.ngens();
    let mut rels: Vec<Vec<Letter>> =
        p.relators.iter().map(|r| cyclic_reduce(&r.letters())).filter(|r| !r.is_empty()).collect();
    let start: usize = rels.iter().map(|r| r.len()).sum();
    let cap = ((start as f64 * growth) as usize).max(10_000);
    let mut alive = vec![true; ng];
    loop {
        // dedupe
        let mut seen = HashSet::new();
        rels.retain(|r| !r.is_empty() && seen.insert(cyclic_key(r)));
        rels.sort_by_key(|r| r.len());
        let total: usize = rels.iter().map(|r| r.len()).sum();
        let mut done = false;
        'search: for ri in 0..rels.len() {
            let r = &rels[ri];
            let mut count = vec![0usize; ng];
            for &x in r {
                count[letter_gen(x)] += 1;
            }
            for pos in 0..r.len() {
                let g = letter_gen(r[pos]);
                if count[g] != 1 {
                    continue;
                }
                // r = A x^e B  =>  x^e = A^-1 B^-1 ... rotate so x is first
                let rot: Vec<Letter> = r[pos..].iter().chain(&r[..pos]).copied().collect();
                let rest: Vec<Letter> = rot[1..].iter().rev().map(|&y| inv_letter(y)).collect();
                // x^e = rest  (rot = x^e · rest^-1)
                let value: Vec<Letter> = if letter_is_inverse(rot[0]) {
                    rest.iter().rev().map(|&y| inv_letter(y)).collect()
                } else {
                    rest
                };
                let occurrences: usize = rels
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != ri)
                    .map(|(_, s)| s.iter().filter(|&&y| letter_gen(y) == g).count())
                    .sum();
                let new_total = total - r.len() + occurrences * value.len();
                if new_total > cap.max(total) && occurrences > 0 {
                    continue;
                }
                let vinv: Vec<Letter> = value.iter().rev().map(|&y| inv_letter(y)).collect();
                let mut next = Vec::with_capacity(rels.len() - 1);
                for (i, s) in rels.iter().enumerate() {
                    if i == ri {
                        continue;
                    }
                    let mut t = Vec::with_capacity(s.len());
                    for &y in s {
                        if letter_gen(y) == g {
                            t.extend_from_slice(if letter_is_inverse(y) { &vinv } else { &value });
                        } else {
                            t.push(y);
                        }
                    }
                    next.push(cyclic_reduce(&t));
                }
                rels = next;
                alive[g] = false;
                done = true;
                break 'search;
            }
        }
        if !done {
            break;
        }
    }
    // renumber surviving generators
    let mut map = vec![usize::MAX; ng];
    let mut names = Vec::new();
    for g in 0..ng {
        if alive[g] {
            map[g] = names.len();
            names.push(p.names[g].clone());
        }
    }
    let relators = rels
        .iter()
        .map(|r| {
            let l: Vec<Letter> =
                r.iter().map(|&x| letter(map[letter_gen(x)], letter_is_inverse(x))).collect();
            Word::from_letters(&l)
        })
        .collect();
    Presentation::new(names, relators)
}
