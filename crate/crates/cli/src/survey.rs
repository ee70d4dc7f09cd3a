//! One row per ideal up to a norm bound, deciding as much as this artifact
//! can: torsion, |B(I)| against |PSL(2, O_d/I)|, a searched link
//! certificate, or a homological obstruction.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use bianchi_core::fpgroups::{
    bi_order, bianchi_data, derive_triples, search_fillings, BianchiData, FpError,
};
use bianchi_core::homology::h1_with_quotient;
use bianchi_core::ring::{ideals_up_to_norm, parse_ideal_gens, psl_order, QuadIdeal};
use bianchi_core::simplify::simplify;
use bianchi_core::triangulation::{build_principal, principal_has_torsion};
use serde::Serialize;
use serde_json::json;

use crate::cache::DomainInfo;
use crate::commands::domain_for;
use crate::label::{conjugate, conjugate_label, ideal_label};
use crate::{Cli, CliError, Report};

/// Cases settled by external computations, given as (d, generator).
pub const SPECIAL_CASES: [(i64, &str); 3] = [(1, "4+3*i"), (2, "1+3*s"), (3, "(11+s)/2")];

pub const SPECIAL: &str = "special-case (external proof)";
pub const NOT_CHECKED: &str = "not checked by this artifact";

/// Sweeps of single-cusp slope changes in the filling search.
const SEARCH_PASSES: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurveyRow {
    pub ideal: String,
    /// Label of the conjugate ideal when it is different and folded into
    /// this row.
    pub conjugate: Option<String>,
    pub norm: i64,
    pub psl_order: u64,
    pub method: String,
    pub result: String,
}

fn is_special(i: &QuadIdeal) -> bool {
    SPECIAL_CASES.iter().any(|&(d, g)| {
        d == i.d && {
            let s = QuadIdeal::from_generators(d, &parse_ideal_gens(d, g).expect("special case parses"))
                .expect("special case is an ideal");
            s == *i || conjugate(&s) == *i
        }
    })
}

/// H1 quotient of H³/Γ(I), when the build fits the budget.
fn homology_quotient(dom: &DomainInfo, ideal: &QuadIdeal, psl: u64, budget: usize) -> Option<String> {
    if (psl as usize).saturating_mul(dom.domain.len()) > budget {
        return None;
    }
    let tri = build_principal(&dom.domain, ideal, budget).ok()?;
    let (s, _) = simplify(&tri);
    let r = h1_with_quotient(&s).ok()?;
    (!r.quotient.is_trivial()).then(|| r.quotient.to_string())
}

fn classify(
    data: &BianchiData,
    dom: Option<&DomainInfo>,
    ideal: &QuadIdeal,
    psl: u64,
    budget: usize,
) -> Result<(String, String), CliError> {
    let row = |m: &str, r: String| Ok((m.to_string(), r));
    if is_special(ideal) {
        return row("special-case", SPECIAL.to_string());
    }
    if let Some(dom) = dom {
        if principal_has_torsion(&dom.domain, ideal) {
            return row("torsion", "Orbifold".to_string());
        }
    }
    let triples = derive_triples(data, ideal)?;
    let b = match bi_order(data, &triples, budget) {
        Ok(b) => b,
        Err(FpError::BudgetExceeded(_)) => {
            if let Some(q) = dom.and_then(|dom| homology_quotient(dom, ideal, psl, budget)) {
                return row("homology", format!("not a link complement (H1 quotient {})", q));
            }
            return row("LowerBound", NOT_CHECKED.to_string());
        }
        Err(e) => return Err(e.into()),
    };
    if b > psl {
        return row("Order", format!("not a link complement (|B(I)| = {})", b));
    }
    let Some(dom) = dom else {
        return row("none", NOT_CHECKED.to_string());
    };
    if let Some((_, v)) = search_fillings(data, ideal, &triples, budget, SEARCH_PASSES)? {
        return row("certificate", v.label);
    }
    if let Some(q) = homology_quotient(dom, ideal, psl, budget) {
        return row("homology", format!("not a link complement (H1 quotient {})", q));
    }
    row("search", "link candidate, no certificate found".to_string())
}

/// Ideals of norm 2..=max_norm, one per conjugate pair.
pub fn survey_ideals(d: i64, max_norm: i64) -> Vec<(QuadIdeal, Option<QuadIdeal>)> {
    let all = ideals_up_to_norm(d, max_norm);
    let mut out = Vec::new();
    for i in &all {
        if i.is_unit() {
            continue;
        }
        let c = conjugate(i);
        if c == *i {
            out.push((*i, None));
        } else if !out.iter().any(|(x, y)| *x == c || *y == Some(c)) {
            out.push((*i, Some(c)));
        }
    }
    out
}

pub fn survey_rows(cli: &Cli, d: i64, max_norm: i64) -> Result<Vec<SurveyRow>, CliError> {
    let data = bianchi_data(d)?;
    // without a verified domain only the group-theoretic checks run
    let dom = domain_for(cli, d).ok();
    let ideals = survey_ideals(d, max_norm);
    let rows: Mutex<Vec<Option<SurveyRow>>> = Mutex::new(vec![None; ideals.len()]);
    let next = AtomicUsize::new(0);
    let work = || loop {
        let k = next.fetch_add(1, Ordering::SeqCst);
        let Some((ideal, conj)) = ideals.get(k) else { break };
        let psl = psl_order(ideal).expect("proper ideal");
        let (method, result) = classify(&data, dom.as_ref(), ideal, psl, cli.budget)
            .unwrap_or_else(|e| ("error".to_string(), e.to_string()));
        let row = SurveyRow {
            ideal: ideal_label(ideal),
            conjugate: conj.map(|_| conjugate_label(ideal)),
            norm: ideal.norm(),
            psl_order: psl,
            method,
            result,
        };
        rows.lock().expect("row lock")[k] = Some(row);
    };
    let jobs = cli.jobs.max(1);
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(work);
        }
    });
    Ok(rows.into_inner().expect("row lock").into_iter().map(|r| r.expect("every row filled")).collect())
}

fn render(d: i64, max_norm: i64, rows: &[SurveyRow]) -> String {
    let names: Vec<String> = rows
        .iter()
        .map(|r| match &r.conjugate {
            Some(c) => format!("{} ~ {}", r.ideal, c),
            None => r.ideal.clone(),
        })
        .collect();
    let w = names.iter().map(|n| n.chars().count()).max().unwrap_or(0).max(5);
    let mut out = format!("d = {}, norm <= {}\n", d, max_norm);
    out.push_str(&format!("{:<w$}  {:>4}  {:>8}  {:<12}  result", "ideal", "N", "|PSL|", "method", w = w));
    for (r, n) in rows.iter().zip(&names) {
        let pad = w - n.chars().count();
        out.push_str(&format!(
            "\n{}{}  {:>4}  {:>8}  {:<12}  {}",
            n,
            " ".repeat(pad),
            r.norm,
            r.psl_order,
            r.method,
            r.result
        ));
    }
    out
}

pub fn survey(cli: &Cli, d: i64, max_norm: i64) -> Result<Report, CliError> {
    let rows = survey_rows(cli, d, max_norm)?;
    let body = json!({ "d": d, "max_norm": max_norm, "rows": rows });
    Ok(Report::ok("survey", body, render(d, max_norm, &rows)))
}
