//! B(I) presentations, peripheral triples and link certificates.
//!
//! A certificate lists, per cusp class of the Bianchi orbifold, Dehn
//! fillings `(g, (p, q))` standing for the element
//! `g (p1^n)^p (p1^k p2^l)^q g^-1` of N(I). Verification runs three tests:
//! the order of B(I), generation of N(I) by the fillings, and distinctness
//! of the cusps they name.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ring::{
    enumerate_psl, parse_ideal_gens, proj_canonicalize, psl_order, ProjMatrix, QuadIdeal,
    DEFAULT_ENUMERATION_BUDGET,
};

use super::coset::todd_coxeter;
use super::data::{bianchi_data, BianchiData};
use super::rewrite::{reidemeister_schreier, tietze_simplify};
use super::{abelian_invariants, FpError, Presentation, Word};

/// One Dehn filling as written in a certificate file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillingEntry {
    pub g: String,
    pub pq: [i64; 2],
}

/// `Symmetrize(s, order, fixed, moved)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryShorthand {
    pub g: String,
    pub order: u32,
    pub fixed: Vec<Vec<FillingEntry>>,
    pub moved: Vec<Vec<FillingEntry>>,
}

/// `Expand(gs, pq)`: the same list of g for every cusp class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandShorthand {
    pub gs: Vec<String>,
    pub pq: Vec<Vec<[i64; 2]>>,
}

/// Certificate file layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub d: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal_gens: Option<String>,
    pub triples: Vec<[i64; 3]>,
    pub expected_order: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fillings: Option<Vec<Vec<FillingEntry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryShorthand>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expand: Option<ExpandShorthand>,
    /// Optional per-class (p, q) for the single-relator check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link2: Option<Vec<[i64; 2]>>,
}

impl CertificateFile {
    pub fn read(path: &Path) -> Result<Self, FpError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FpError::Io(format!("{}: {}", path.display(), e)))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, FpError> {
        serde_json::from_str(text).map_err(|e| FpError::Parse("certificate".into(), e.to_string()))
    }
}

/// A resolved certificate with parsed words and explicit filling lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkCertificate {
    pub d: i64,
    pub ideal: QuadIdeal,
    pub triples: Vec<[i64; 3]>,
    pub expected_order: u64,
    pub fillings: Fillings,
    pub link2: Option<Vec<[i64; 2]>>,
}

/// Outcome of a successful verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkVerdict {
    pub cusps: usize,
    pub order: u64,
    pub label: String,
}

impl LinkVerdict {
    fn new(cusps: usize, order: u64) -> Self {
        LinkVerdict { cusps, order, label: format!("{}-Link", cusps) }
    }
}

fn parse_entries(
    data: &BianchiData,
    prefix: &Word,
    list: &[FillingEntry],
) -> Result<Vec<(Word, [i64; 2])>, FpError> {
    list.iter()
        .map(|e| {
            if e.pq == [0, 0] {
                return Err(FpError::MalformedShorthand(format!("filling {} has (p,q) = (0,0)", e.g)));
            }
            Ok((prefix.mul(&data.word(&e.g)?), e.pq))
        })
        .collect()
}

/// Filling words with their (p, q), one list per cusp class.
pub type Fillings = Vec<Vec<(Word, [i64; 2])>>;

/// Explicit filling lists from whichever form the file uses.
pub fn expand_certificate(
    file: &CertificateFile,
    data: &BianchiData,
) -> Result<Fillings, FpError> {
    let forms = [file.fillings.is_some(), file.symmetry.is_some(), file.expand.is_some()];
    if forms.iter().filter(|&&b| b).count() != 1 {
        return Err(FpError::MalformedShorthand(
            "exactly one of fillings, symmetry, expand is required".into(),
        ));
    }
    let id = Word::identity();
    if let Some(f) = &file.fillings {
        return f.iter().map(|l| parse_entries(data, &id, l)).collect();
    }
    if let Some(e) = &file.expand {
        let gs = e.gs.iter().map(|g| data.word(g)).collect::<Result<Vec<_>, _>>()?;
        return e
            .pq
            .iter()
            .map(|row| {
                if row.len() != gs.len() {
                    return Err(FpError::MalformedShorthand(format!(
                        "expand row has {} entries for {} elements",
                        row.len(),
                        gs.len()
                    )));
                }
                Ok(gs.iter().cloned().zip(row.iter().copied()).collect())
            })
            .collect();
    }
    let s = file.symmetry.as_ref().expect("checked above");
    if s.fixed.len() != s.moved.len() || s.order == 0 {
        return Err(FpError::MalformedShorthand(
            "symmetry needs one fixed and one moved list per class and positive order".into(),
        ));
    }
    let sym = data.word(&s.g)?;
    let mut out = Vec::new();
    for (fixed, moved) in s.fixed.iter().zip(&s.moved) {
        let mut list = parse_entries(data, &id, fixed)?;
        for j in 0..s.order {
            list.extend(parse_entries(data, &sym.pow(j as i64), moved)?);
        }
        out.push(list);
    }
    Ok(out)
}

impl LinkCertificate {
    pub fn from_file(file: &CertificateFile) -> Result<Self, FpError> {
        let data = bianchi_data(file.d)?;
        let triples = expand_triples(&data, &file.triples)?;
        let ideal = ideal_of_triple(&data, triples[0])
            .ok_or(FpError::InvalidTriple { class: 0, triple: triples[0] })?;
        if let Some(g) = &file.ideal_gens {
            let stated = QuadIdeal::from_generators(file.d, &parse_ideal_gens(file.d, g)?)?;
            if stated != ideal {
                return Err(FpError::MalformedShorthand(format!(
                    "ideal {} does not match the triple lattice {}",
                    stated, ideal
                )));
            }
        }
        let fillings = expand_certificate(file, &data)?;
        if fillings.len() != triples.len() {
            return Err(FpError::MalformedShorthand(format!(
                "{} filling lists for {} cusp classes",
                fillings.len(),
                triples.len()
            )));
        }
        Ok(LinkCertificate {
            d: file.d,
            ideal,
            triples,
            expected_order: file.expected_order,
            fillings,
            link2: file.link2.clone(),
        })
    }

    pub fn read(path: &Path) -> Result<Self, FpError> {
        Self::from_file(&CertificateFile::read(path)?)
    }
}

/// One triple per cusp class, replicating a shared triple when the
/// presentation recipe uses a single one.
pub(crate) fn expand_triples(data: &BianchiData, triples: &[[i64; 3]]) -> Result<Vec<[i64; 3]>, FpError> {
    let h = data.cusp_classes();
    if triples.len() == h {
        Ok(triples.to_vec())
    } else if triples.len() == 1 && data.shared_triple {
        Ok(vec![triples[0]; h])
    } else {
        Err(FpError::TripleCount { expected: h, got: triples.len() })
    }
}

/// The ideal whose translation lattice is the class-∞ triple.
pub fn ideal_of_triple(data: &BianchiData, t: [i64; 3]) -> Option<QuadIdeal> {
    let [n, k, l] = t;
    let (k, l) = if l < 0 { (-k, -l) } else { (k, l) };
    // d = 3 triples refer to the basis {1, ω²} with ω² = ω − 1
    let k = if data.omega_squared { k - l } else { k };
    QuadIdeal::from_triple(data.d, n, k, l)
}

fn is_pm_identity(m: &ProjMatrix, ideal: &QuadIdeal) -> bool {
    proj_canonicalize(m, ideal) == proj_canonicalize(&ProjMatrix::identity(ideal.d), ideal)
}

/// Smallest (n, k, l) with l > 0, 0 <= k < n spanning the lattice of (s, t)
/// with p1^s p2^t = ±Id mod I. None if no such lattice within `bound`.
pub fn class_triple(
    data: &BianchiData,
    ideal: &QuadIdeal,
    class: usize,
    bound: i64,
) -> Option<[i64; 3]> {
    let (p1, p2) = &data.peripherals[class];
    let m1 = data.evaluate_mod(p1, ideal);
    let m2 = data.evaluate_mod(p2, ideal);
    let mut n = 0;
    let mut acc = ProjMatrix::identity(data.d);
    for s in 1..=bound {
        acc = (acc * m1).reduce(ideal);
        if is_pm_identity(&acc, ideal) {
            n = s;
            break;
        }
    }
    if n == 0 {
        return None;
    }
    let mut col = ProjMatrix::identity(data.d);
    for l in 1..=bound {
        col = (col * m2).reduce(ideal);
        let mut acc = col;
        for k in 0..n {
            if is_pm_identity(&acc, ideal) {
                return Some([n, k, l]);
            }
            acc = (acc * m1).reduce(ideal);
        }
    }
    None
}

/// Checks p1^n = ±Id, p1^k p2^l = ±Id mod I and that no smaller lattice
/// point does; negative l is accepted after flipping the signs of k and l.
pub fn validate_peripheral_triple(
    data: &BianchiData,
    ideal: &QuadIdeal,
    class: usize,
    triple: [i64; 3],
) -> bool {
    let [n, k, l] = triple;
    if n <= 0 || l == 0 || class >= data.cusp_classes() {
        return false;
    }
    let (k, l) = if l < 0 { (-k, -l) } else { (k, l) };
    let bound = n.max(l);
    match class_triple(data, ideal, class, bound) {
        Some([n0, k0, l0]) => n0 == n && l0 == l && (k - k0).rem_euclid(n) == 0,
        None => false,
    }
}

/// Canonical triples of every cusp class for I.
pub fn derive_triples(data: &BianchiData, ideal: &QuadIdeal) -> Result<Vec<[i64; 3]>, FpError> {
    let bound = 2 * ideal.norm() + 2;
    (0..data.cusp_classes())
        .map(|i| {
            class_triple(data, ideal, i, bound)
                .ok_or(FpError::InvalidTriple { class: i, triple: [0, 0, 0] })
        })
        .collect()
}

/// Bianchi presentation plus p1^n and p1^k p2^l for each cusp class.
pub fn build_bi(data: &BianchiData, triples: &[[i64; 3]]) -> Result<Presentation, FpError> {
    let triples = expand_triples(data, triples)?;
    let mut extra = Vec::new();
    for ((p1, p2), [n, k, l]) in data.peripherals.iter().zip(triples) {
        extra.push(p1.pow(n));
        extra.push(p1.pow(k).mul(&p2.pow(l)));
    }
    Ok(data.presentation.with_relators(extra))
}

/// Order of B(I) by coset enumeration.
pub fn bi_order(data: &BianchiData, triples: &[[i64; 3]], budget: usize) -> Result<u64, FpError> {
    let b = build_bi(data, triples)?;
    Ok(todd_coxeter(&b, &[], budget)?.index as u64)
}

/// Runs tests 1, 2 and 3 on a certificate.
pub fn verify_link(cert: &LinkCertificate, budget: usize) -> Result<LinkVerdict, FpError> {
    let data = bianchi_data(cert.d)?;
    let triples = expand_triples(&data, &cert.triples)?;
    let ideal = cert.ideal;
    for (i, &t) in triples.iter().enumerate() {
        if !validate_peripheral_triple(&data, &ideal, i, t) {
            return Err(FpError::InvalidTriple { class: i, triple: t });
        }
    }

    // test 1: |B(I)| = |PSL(2, O_d/I)|
    let psl = psl_order(&ideal)?;
    let b = build_bi(&data, &triples)?;
    let table = todd_coxeter(&b, &[], budget)?;
    let order = table.index as u64;
    if order != cert.expected_order || order != psl {
        return Err(FpError::Test1Failed { expected: cert.expected_order, found: order });
    }

    // test 2: the fillings generate N(I)
    let (npres, rw) = reidemeister_schreier(&data.presentation, &table)?;
    let mut extra = Vec::new();
    for (i, list) in cert.fillings.iter().enumerate() {
        let (p1, p2) = &data.peripherals[i];
        let [n, k, l] = triples[i];
        let m = p1.pow(n);
        let kl = p1.pow(k).mul(&p2.pow(l));
        for (j, (g, [p, q])) in list.iter().enumerate() {
            let w = m.pow(*p).mul(&kl.pow(*q)).conjugate_by(g);
            let r = rw.rewrite(&w).ok_or_else(|| {
                FpError::Test2Failed(format!("filling {} of class {} is not in N(I)", j, i))
            })?;
            extra.push(r);
        }
    }
    let q = npres.with_relators(extra);
    let ab = abelian_invariants(&q);
    if !ab.is_trivial() {
        return Err(FpError::Test2Failed(format!(
            "N(I) modulo the fillings has abelianization {}",
            ab
        )));
    }
    let s = tietze_simplify(&q, 2.0);
    if s.ngens() > 0 {
        prove_trivial(&s, budget)?;
    }

    // test 3: fillings name distinct cusps
    let group = enumerate_psl(&ideal, &data.matrices, DEFAULT_ENUMERATION_BUDGET.max(budget))?;
    let mut cusps = 0;
    for (i, list) in cert.fillings.iter().enumerate() {
        let stab: Vec<ProjMatrix> =
            data.stabilizer_words(i).iter().map(|w| data.evaluate_mod(w, &ideal)).collect();
        let sub = group.subgroup(&stab);
        let expected = group.len() / sub.len();
        if list.len() != expected {
            return Err(FpError::Test3Failed(format!(
                "class {}: {} fillings for {} cusps",
                i,
                list.len(),
                expected
            )));
        }
        let mut seen = HashSet::new();
        for (j, (g, _)) in list.iter().enumerate() {
            let gi = group
                .index_of(&data.evaluate_mod(g, &ideal))
                .expect("group is closed");
            let coset = group.left_coset(gi, &sub);
            if !seen.insert(coset[0]) {
                return Err(FpError::Test3Failed(format!(
                    "class {}: filling {} repeats a cusp",
                    i, j
                )));
            }
        }
        cusps += list.len();
    }
    Ok(LinkVerdict::new(cusps, order))
}

/// Proves a group with trivial abelianization trivial by finding a
/// generator x with [G : <x>] = 1 (then G is cyclic, hence trivial). A
/// finite index above 1 proves it nontrivial.
fn prove_trivial(s: &Presentation, budget: usize) -> Result<(), FpError> {
    let mut exhausted = false;
    for g in 0..s.ngens() {
        match todd_coxeter(s, &[Word::gen(g)], budget) {
            Ok(t) if t.index == 1 => return Ok(()),
            Ok(t) => {
                return Err(FpError::Test2Failed(format!(
                    "N(I) modulo the fillings has a subgroup of index {}",
                    t.index
                )))
            }
            Err(FpError::BudgetExceeded(_)) => exhausted = true,
            Err(e) => return Err(e),
        }
    }
    debug_assert!(exhausted);
    Err(FpError::BudgetExceeded(budget))
}

/// Single-relator-per-class check: |⟨G | p1^p p2^q⟩| = expected. The cusp
/// count is the number of cosets of each peripheral image in the quotient.
pub fn verify_link2(
    data: &BianchiData,
    pqs: &[[i64; 2]],
    expected: u64,
    budget: usize,
) -> Result<LinkVerdict, FpError> {
    if !data.stabilizer_extra.is_empty() {
        return Err(FpError::UnsupportedD(data.d));
    }
    if pqs.len() != data.cusp_classes() {
        return Err(FpError::TripleCount { expected: data.cusp_classes(), got: pqs.len() });
    }
    let rels = data
        .peripherals
        .iter()
        .zip(pqs)
        .map(|((p1, p2), [p, q])| p1.pow(*p).mul(&p2.pow(*q)));
    let q = data.presentation.with_relators(rels);
    let order = todd_coxeter(&q, &[], budget)?.index as u64;
    if order != expected {
        return Err(FpError::OrderMismatch { expected, found: order });
    }
    let mut cusps = 0;
    for (p1, p2) in &data.peripherals {
        cusps += todd_coxeter(&q, &[p1.clone(), p2.clone()], budget)?.index;
    }
    Ok(LinkVerdict::new(cusps, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_quad;

    fn ideal(d: i64, gens: &[&str]) -> QuadIdeal {
        let g: Vec<_> = gens.iter().map(|s| parse_quad(d, s).unwrap()).collect();
        QuadIdeal::from_generators(d, &g).unwrap()
    }

    #[test]
    fn triples_validate() {
        let d15 = bianchi_data(15).unwrap();
        let i = ideal(15, &["2", "w"]);
        assert!(validate_peripheral_triple(&d15, &i, 0, [2, 0, 1]));
        assert!(!validate_peripheral_triple(&d15, &i, 0, [1, 0, 1]));
        assert!(validate_peripheral_triple(&d15, &i, 1, [1, 0, 2]));
        let d2 = bianchi_data(2).unwrap();
        let i = ideal(2, &["1+3*s"]);
        assert!(validate_peripheral_triple(&d2, &i, 0, [19, 6, -1]));
        assert_eq!(derive_triples(&d2, &i).unwrap(), vec![[19, 13, 1]]);
    }

    #[test]
    fn small_bi_orders() {
        let d2 = bianchi_data(2).unwrap();
        assert_eq!(bi_order(&d2, &[[3, 1, 1]], 100_000).unwrap(), 12);
        let d5 = bianchi_data(5).unwrap();
        assert_eq!(bi_order(&d5, &[[2, 1, 1]], 100_000).unwrap(), 12);
    }

    #[test]
    fn link2_unsupported_for_extra_stabilizer() {
        let d1 = bianchi_data(1).unwrap();
        assert!(matches!(verify_link2(&d1, &[[0, 1]], 6, 1000), Err(FpError::UnsupportedD(1))));
    }

    #[test]
    fn expand_and_symmetrize() {
        let d15 = bianchi_data(15).unwrap();
        let f = CertificateFile {
            d: 15,
            ideal_gens: None,
            triples: vec![[2, 0, 1], [1, 0, 2]],
            expected_order: 6,
            fillings: None,
            symmetry: None,
            expand: Some(ExpandShorthand { gs: vec![], pq: vec![vec![], vec![]] }),
            link2: None,
        };
        let e = expand_certificate(&f, &d15).unwrap();
        assert!(e.iter().all(|l| l.is_empty()));
    }
}
