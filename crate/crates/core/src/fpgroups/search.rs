//! Cusp representatives as words and a heuristic search for Dehn fillings
//! that pass the link certificate tests.

use std::collections::HashSet;

use crate::homology::{smith_normal_form, SparseIntMatrix};
use crate::ring::{enumerate_psl, psl_order, FiniteProjGroup, ProjMatrix, QuadIdeal};

use super::cert::{build_bi, expand_triples, verify_link, LinkCertificate, LinkVerdict};
use super::coset::todd_coxeter;
use super::data::BianchiData;
use super::rewrite::{reidemeister_schreier, SchreierRewriter};
use super::{FpError, Word};

/// Filling slopes tried by [`search_fillings`], one per ± pair.
pub const SLOPES: [[i64; 2]; 8] = [[0, 1], [1, 0], [1, 1], [1, -1], [1, 2], [2, 1], [1, -2], [2, -1]];

/// Full verifications tried on assignments with trivial abelianization.
const MAX_ATTEMPTS: usize = 24;

/// Coset budget of one full verification inside the search.
const ATTEMPT_BUDGET: usize = 200_000;

/// Sparse abelianized word: (generator, exponent) pairs.
type SparseRow = Vec<(usize, i64)>;

/// Shortest-word representative of every element of PSL(2, O_d/I), in
/// breadth-first order.
fn element_words(data: &BianchiData, group: &FiniteProjGroup) -> Vec<(usize, Word)> {
    let d = data.d;
    let mut seen = vec![false; group.len()];
    let id = group.index_of(&ProjMatrix::identity(d)).expect("identity");
    seen[id] = true;
    let mut out = vec![(id, Word::identity())];
    let steps: Vec<(ProjMatrix, Word)> = (0..data.ngens())
        .flat_map(|g| {
            let m = data.matrices[g];
            [(m, Word::gen(g)), (m.inverse(), Word::gen(g).inverse())]
        })
        .collect();
    let mut head = 0;
    while head < out.len() {
        let (x, w) = out[head].clone();
        head += 1;
        for (m, s) in &steps {
            let y = group.index_of(&(group.elements[x] * *m)).expect("closed");
            if !seen[y] {
                seen[y] = true;
                out.push((y, w.mul(s)));
            }
        }
    }
    out
}

/// One word per cusp of H³/Γ(I) over each cusp class: representatives of
/// the left cosets of the stabilizer image.
pub fn cusp_representatives(
    data: &BianchiData,
    ideal: &QuadIdeal,
    budget: usize,
) -> Result<Vec<Vec<Word>>, FpError> {
    let group = enumerate_psl(ideal, &data.matrices, budget)?;
    let words = element_words(data, &group);
    let mut out = Vec::new();
    for class in 0..data.cusp_classes() {
        let stab: Vec<ProjMatrix> =
            data.stabilizer_words(class).iter().map(|w| data.evaluate_mod(w, ideal)).collect();
        let sub = group.subgroup(&stab);
        let mut seen = HashSet::new();
        let mut reps = Vec::new();
        for (x, w) in &words {
            if seen.insert(group.left_coset(*x, &sub)[0]) {
                reps.push(w.clone());
            }
        }
        out.push(reps);
    }
    Ok(out)
}

/// Lexicographic badness of the abelianized quotient: free rank, number of
/// cyclic factors, log of the torsion order.
type Score = (usize, usize, u64);

struct Scorer {
    base: Vec<Vec<(usize, i64)>>,
    ncols: usize,
}

impl Scorer {
    fn new(rw: &SchreierRewriter, relators: &[Word]) -> Self {
        let ncols = rw.ngens();
        let base = relators.iter().map(|r| sparse_row(r, ncols)).collect();
        Scorer { base, ncols }
    }

    fn score(&self, extra: &[&Vec<(usize, i64)>]) -> Score {
        let mut m = SparseIntMatrix::new(self.base.len() + extra.len(), self.ncols);
        for (i, row) in self.base.iter().chain(extra.iter().copied()).enumerate() {
            for &(j, v) in row {
                m.add(i, j, v);
            }
        }
        let snf = smith_normal_form(&m);
        let bits: u64 = snf.divisors.iter().map(|x| x.bits()).sum();
        (self.ncols - snf.rank, snf.divisors.len(), bits)
    }
}

fn sparse_row(w: &Word, n: usize) -> Vec<(usize, i64)> {
    w.exponent_sums(n).into_iter().enumerate().filter(|&(_, e)| e != 0).collect()
}

/// Searches for fillings that make the certificate tests pass: first one
/// slope per cusp class, then single-cusp changes that shrink the
/// abelianized quotient, for at most `passes` sweeps. Returns None when
/// |B(I)| differs from |PSL(2, O_d/I)| or no certificate is found.
pub fn search_fillings(
    data: &BianchiData,
    ideal: &QuadIdeal,
    triples: &[[i64; 3]],
    budget: usize,
    passes: usize,
) -> Result<Option<(LinkCertificate, LinkVerdict)>, FpError> {
    let triples = expand_triples(data, triples)?;
    let psl = psl_order(ideal)?;
    let table = todd_coxeter(&build_bi(data, &triples)?, &[], budget)?;
    if table.index as u64 != psl {
        return Ok(None);
    }
    let (npres, rw) = reidemeister_schreier(&data.presentation, &table)?;
    let scorer = Scorer::new(&rw, &npres.relators);
    let reps = cusp_representatives(data, ideal, budget)?;

    // rows[class][cusp][slope]
    let mut rows: Vec<Vec<Vec<SparseRow>>> = Vec::new();
    for (class, list) in reps.iter().enumerate() {
        let (p1, p2) = &data.peripherals[class];
        let [n, k, l] = triples[class];
        let m = p1.pow(n);
        let kl = p1.pow(k).mul(&p2.pow(l));
        let mut per_cusp = Vec::new();
        for g in list {
            let mut per_slope = Vec::new();
            for [p, q] in SLOPES {
                let w = m.pow(p).mul(&kl.pow(q)).conjugate_by(g);
                let r = rw.rewrite(&w).ok_or_else(|| {
                    FpError::Test2Failed(format!("peripheral element of class {} is not in N(I)", class))
                })?;
                per_slope.push(sparse_row(&r, scorer.ncols));
            }
            per_cusp.push(per_slope);
        }
        rows.push(per_cusp);
    }

    let flat: Vec<(usize, usize)> =
        reps.iter().enumerate().flat_map(|(c, l)| (0..l.len()).map(move |j| (c, j))).collect();
    let eval = |assign: &[usize]| -> Score {
        let extra: Vec<&Vec<(usize, i64)>> =
            flat.iter().zip(assign).map(|(&(c, j), &s)| &rows[c][j][s]).collect();
        scorer.score(&extra)
    };
    let tried = std::cell::RefCell::new(HashSet::new());
    let attempt_budget = budget.min((4 * psl as usize).max(ATTEMPT_BUDGET));
    let attempt = |assign: &[usize]| -> Result<Option<(LinkCertificate, LinkVerdict)>, FpError> {
        let mut fillings: Vec<Vec<(Word, [i64; 2])>> = vec![Vec::new(); reps.len()];
        for (&(c, j), &s) in flat.iter().zip(assign) {
            fillings[c].push((reps[c][j].clone(), SLOPES[s]));
        }
        let cert = LinkCertificate {
            d: data.d,
            ideal: *ideal,
            triples: triples.clone(),
            expected_order: psl,
            fillings,
            link2: None,
        };
        if !tried.borrow_mut().insert(assign.to_vec()) {
            return Ok(None);
        }
        match verify_link(&cert, attempt_budget) {
            Ok(v) => Ok(Some((cert, v))),
            Err(FpError::Test2Failed(_)) | Err(FpError::BudgetExceeded(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };

    // uniform slope per class
    let h = reps.len();
    let mut uniform: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..h {
        uniform = uniform
            .into_iter()
            .flat_map(|v| {
                (0..SLOPES.len()).map(move |s| {
                    let mut v = v.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
        if uniform.len() > 64 {
            // many classes: same slope everywhere
            uniform = (0..SLOPES.len()).map(|s| vec![s; h]).collect();
            break;
        }
    }
    let mut best: Option<(Score, Vec<usize>)> = None;
    for per_class in &uniform {
        let assign: Vec<usize> = flat.iter().map(|&(c, _)| per_class[c]).collect();
        let s = eval(&assign);
        if s == (0, 0, 0) {
            if let Some(found) = attempt(&assign)? {
                return Ok(Some(found));
            }
        }
        if best.as_ref().is_none_or(|(b, _)| s < *b) {
            best = Some((s, assign));
        }
    }
    let (mut score, mut assign) = best.expect("at least one slope");
    let mut attempts = 0;
    for _ in 0..passes {
        let mut improved = false;
        for i in 0..assign.len() {
            for s in 0..SLOPES.len() {
                if s == assign[i] {
                    continue;
                }
                let old = assign[i];
                assign[i] = s;
                let t = eval(&assign);
                if t == (0, 0, 0) && attempts < MAX_ATTEMPTS {
                    attempts += 1;
                    if let Some(found) = attempt(&assign)? {
                        return Ok(Some(found));
                    }
                }
                if t < score {
                    score = t;
                    improved = true;
                } else {
                    assign[i] = old;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok(None)
}
