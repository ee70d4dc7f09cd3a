//! Finitely presented groups: words, bundled Bianchi presentations, coset
//! enumeration, Reidemeister–Schreier rewriting and link certificates.

pub mod cert;
pub mod coset;
pub mod data;
pub mod rewrite;
pub mod search;
pub mod word;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homology::{smith_normal_form, AbelianGroup, SparseIntMatrix};
use crate::ring::RingError;

pub use cert::{
    bi_order, build_bi, derive_triples, expand_certificate, validate_peripheral_triple, verify_link,
    verify_link2, CertificateFile, FillingEntry, Fillings, LinkCertificate, LinkVerdict,
};
pub use coset::{todd_coxeter, CosetTable, DEFAULT_COSET_BUDGET};
pub use data::{bianchi_data, BianchiData, SUPPORTED_D};
pub use rewrite::{reidemeister_schreier, tietze_simplify, SchreierRewriter};
pub use search::{cusp_representatives, search_fillings};
pub use word::{parse_word, Letter, Word};

#[derive(Debug, Error)]
pub enum FpError {
    #[error("cannot parse `{0}`: {1}")]
    Parse(String, String),
    #[error("no bundled presentation for d = {0}")]
    UnsupportedD(i64),
    #[error("coset enumeration exceeded {0} cosets; order not determined within budget")]
    BudgetExceeded(usize),
    #[error("coset table is incomplete")]
    IncompleteTable,
    #[error("malformed certificate shorthand: {0}")]
    MalformedShorthand(String),
    #[error("expected {expected} peripheral triples, got {got}")]
    TripleCount { expected: usize, got: usize },
    #[error("test 1 failed: |B(I)| = {found}, expected {expected}")]
    Test1Failed { expected: u64, found: u64 },
    #[error("test 2 failed: {0}")]
    Test2Failed(String),
    #[error("test 3 failed: {0}")]
    Test3Failed(String),
    #[error("order mismatch: found {found}, expected {expected}")]
    OrderMismatch { expected: u64, found: u64 },
    #[error("invalid peripheral triple {triple:?} for cusp class {class}")]
    InvalidTriple { class: usize, triple: [i64; 3] },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("i/o error: {0}")]
    Io(String),
}

/// A finite presentation ⟨names | relators⟩.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub names: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(names: Vec<String>, relators: Vec<Word>) -> Self {
        let relators = relators.into_iter().filter(|r| !r.is_identity()).collect();
        Presentation { names, relators }
    }

    /// Parses relator strings over the given generator names.
    pub fn parse(names: &[&str], relators: &[&str]) -> Result<Self, FpError> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let rels = relators
            .iter()
            .map(|r| parse_word(&names, r))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Presentation::new(names, rels))
    }

    pub fn ngens(&self) -> usize {
        self.names.len()
    }

    pub fn with_relators(&self, extra: impl IntoIterator<Item = Word>) -> Self {
        let mut rels = self.relators.clone();
        rels.extend(extra);
        Presentation::new(self.names.clone(), rels)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, FpError> {
        parse_word(&self.names, text)
    }

    /// Total relator length.
    pub fn total_length(&self) -> usize {
        self.relators.iter().map(|r| r.len()).sum()
    }
}

/// Abelianization: Smith form of the relator exponent-sum matrix.
pub fn abelian_invariants(p: &Presentation) -> AbelianGroup {
    let n = p.ngens();
    let mut m = SparseIntMatrix::new(p.relators.len(), n);
    for (i, r) in p.relators.iter().enumerate() {
        for (g, e) in r.exponent_sums(n).into_iter().enumerate() {
            if e != 0 {
                m.add(i, g, e);
            }
        }
    }
    let snf = smith_normal_form(&m);
    AbelianGroup::from_divisors(n - snf.rank, &snf.divisors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelianization_examples() {
        let p = Presentation::parse(&["a", "b"], &["[a,b]"]).unwrap();
        assert_eq!(abelian_invariants(&p).to_string(), "Z^2");
        let p = Presentation::parse(&["x", "y"], &["x^2", "y^3"]).unwrap();
        assert_eq!(abelian_invariants(&p).to_string(), "Z/6");
        let p = Presentation::parse(&["x"], &["x^3"]).unwrap();
        assert_eq!(abelian_invariants(&p).to_string(), "Z/3");
    }
}
