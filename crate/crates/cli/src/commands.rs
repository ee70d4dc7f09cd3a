//! The single-case subcommands.

use std::path::Path;

use bianchi_core::fpgroups::{
    bi_order as core_bi_order, bianchi_data, derive_triples, verify_link2, FpError, LinkCertificate,
};
use bianchi_core::geometry::covolume_oracle;
use bianchi_core::homology::h1_with_quotient;
use bianchi_core::ring::{class_number, parse_ideal_gens, psl_order as core_psl_order, QuadIdeal};
use bianchi_core::simplify::simplify;
use bianchi_core::triangulation::{build_gamma1, build_principal, detect_orbifold, Triangulation};
use serde_json::json;

use crate::cache::{load_or_compute, DomainInfo};
use crate::label::ideal_label;
use crate::{Cli, CliError, IdealArgs, Report, Target, EXIT_NEGATIVE};

pub fn parse_ideal(args: &IdealArgs) -> Result<QuadIdeal, CliError> {
    let gens = parse_ideal_gens(args.d, &args.ideal)?;
    Ok(QuadIdeal::from_generators(args.d, &gens)?)
}

pub fn domain_for(cli: &Cli, d: i64) -> Result<DomainInfo, CliError> {
    load_or_compute(d, cli.resolved_cache_dir().as_deref())
}

pub fn domain(cli: &Cli, d: i64) -> Result<Report, CliError> {
    let info = domain_for(cli, d)?;
    if let Some(path) = &cli.out {
        info.domain.write(path)?;
    }
    let oracle = covolume_oracle(d);
    let h = class_number(d);
    let body = json!({
        "d": d,
        "radius": info.radius,
        "simplices": info.domain.len(),
        "cusp_classes": info.cusp_classes,
        "class_number": h,
        "volume": info.volume,
        "covolume_oracle": oracle,
        "pairings_verified": info.pairings_verified,
    });
    let text = format!(
        "d = {}: {} simplices (sample radius {}), {} cusp classes (h = {}), volume {:.10} (oracle {:.10}), pairings {}",
        d,
        info.domain.len(),
        info.radius,
        info.cusp_classes,
        h,
        info.volume,
        oracle,
        if info.pairings_verified { "verified" } else { "NOT verified" }
    );
    Ok(Report::ok("domain", body, text))
}

struct Built {
    ideal: QuadIdeal,
    raw: Triangulation,
    orbifold: bool,
    simplified: Triangulation,
    finite_after: usize,
}

fn build_target(cli: &Cli, t: &Target) -> Result<Built, CliError> {
    let ideal = parse_ideal(&t.ideal)?;
    core_psl_order(&ideal)?;
    let info = domain_for(cli, t.ideal.d)?;
    let raw = if t.gamma1 {
        build_gamma1(&info.domain, &ideal, cli.budget)?
    } else {
        build_principal(&info.domain, &ideal, cli.budget)?
    };
    let orbifold = detect_orbifold(&raw, &info.domain);
    let (simplified, stats) = simplify(&raw);
    Ok(Built { ideal, raw, orbifold, simplified, finite_after: stats.finite_vertices })
}

fn group_name(t: &Target) -> &'static str {
    if t.gamma1 {
        "Γ₁"
    } else {
        "Γ"
    }
}

pub fn build(cli: &Cli, t: &Target) -> Result<Report, CliError> {
    let b = build_target(cli, t)?;
    if let Some(path) = &cli.out {
        std::fs::write(path, b.simplified.to_json()).map_err(|e| CliError::io(path, e))?;
    }
    let info = b.raw.classify_vertices();
    let body = json!({
        "d": t.ideal.d,
        "ideal": ideal_label(&b.ideal),
        "gamma1": t.gamma1,
        "copies": b.raw.labels.len(),
        "tetrahedra": b.raw.len(),
        "cusps": info.count,
        "finite_vertices": info.finite,
        "orbifold": b.orbifold,
        "orientable": b.raw.is_orientable(),
        "euler_characteristic": b.raw.euler_characteristic(),
        "simplified_tetrahedra": b.simplified.len(),
        "simplified_finite_vertices": b.finite_after,
    });
    let text = format!(
        "(d, I) = ({}, {}), {}: {} copies, {} tetrahedra, {} cusps, {}; simplified to {} tetrahedra with {} finite vertices",
        t.ideal.d,
        ideal_label(&b.ideal),
        group_name(t),
        b.raw.labels.len(),
        b.raw.len(),
        info.count,
        if b.orbifold { "orbifold" } else { "manifold" },
        b.simplified.len(),
        b.finite_after
    );
    Ok(Report::ok("build", body, text))
}

pub fn homology(cli: &Cli, t: &Target) -> Result<Report, CliError> {
    let b = build_target(cli, t)?;
    let r = h1_with_quotient(&b.simplified)?;
    let body = json!({
        "d": t.ideal.d,
        "ideal": ideal_label(&b.ideal),
        "gamma1": t.gamma1,
        "orbifold": b.orbifold,
        "cusps": r.cusps,
        "quotient": r.quotient.to_string(),
        "h1": r.h1.to_string(),
    });
    let text = format!(
        "(d, I) = ({}, {}), {}: H1 = {}, H1/peripheral = {}, {} cusps{}",
        t.ideal.d,
        ideal_label(&b.ideal),
        group_name(t),
        r.h1,
        r.quotient,
        r.cusps,
        if b.orbifold { " (orbifold)" } else { "" }
    );
    Ok(Report::ok("homology", body, text))
}

pub fn psl_order(args: &IdealArgs) -> Result<Report, CliError> {
    let ideal = parse_ideal(args)?;
    let n = core_psl_order(&ideal)?;
    let body = json!({ "d": args.d, "ideal": ideal_label(&ideal), "norm": ideal.norm(), "psl_order": n });
    Ok(Report::ok("psl-order", body, n.to_string()))
}

fn parse_triples(text: &str) -> Result<Vec<[i64; 3]>, CliError> {
    text.split(';')
        .map(|t| {
            let v: Vec<i64> = t
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("bad triple `{}`: {}", t, e)))?;
            <[i64; 3]>::try_from(v).map_err(|_| CliError::Usage(format!("triple `{}` needs three integers", t)))
        })
        .collect()
}

pub fn bi_order(cli: &Cli, args: &IdealArgs, triples: Option<&str>) -> Result<Report, CliError> {
    let ideal = parse_ideal(args)?;
    let data = bianchi_data(args.d)?;
    let triples = match triples {
        Some(t) => parse_triples(t)?,
        None => derive_triples(&data, &ideal)?,
    };
    let psl = core_psl_order(&ideal)?;
    let b = core_bi_order(&data, &triples, cli.budget)?;
    let body = json!({
        "d": args.d,
        "ideal": ideal_label(&ideal),
        "triples": triples,
        "bi_order": b,
        "psl_order": psl,
    });
    let rel = match b.cmp(&psl) {
        std::cmp::Ordering::Equal => "=",
        std::cmp::Ordering::Greater => ">",
        std::cmp::Ordering::Less => "<",
    };
    let text = format!("|B(I)| = {} {} |PSL(2, O/I)| = {}", b, rel, psl);
    Ok(Report::ok("bi-order", body, text))
}

pub fn verify_link(cli: &Cli, path: &Path) -> Result<Report, CliError> {
    let cert = LinkCertificate::read(path)?;
    let v = match bianchi_core::fpgroups::verify_link(&cert, cli.budget) {
        Ok(v) => v,
        Err(e @ (FpError::Test1Failed { .. } | FpError::Test2Failed(_) | FpError::Test3Failed(_))) => {
            let text = format!("FAILED: {}", e);
            let body = json!({ "d": cert.d, "ideal": ideal_label(&cert.ideal), "verified": false, "failure": e.to_string() });
            return Ok(Report { command: "verify-link", body, text, exit_code: EXIT_NEGATIVE });
        }
        Err(e) => return Err(e.into()),
    };
    let mut text = v.label.clone();
    let mut body = json!({
        "d": cert.d,
        "ideal": ideal_label(&cert.ideal),
        "verified": true,
        "cusps": v.cusps,
        "order": v.order,
        "label": v.label,
    });
    if let Some(pqs) = &cert.link2 {
        let data = bianchi_data(cert.d)?;
        let v2 = verify_link2(&data, pqs, cert.expected_order, cli.budget)?;
        text.push_str(&format!("\nsingle-relator check: {}", v2.label));
        body["link2"] = json!({ "cusps": v2.cusps, "order": v2.order, "label": v2.label });
    }
    Ok(Report::ok("verify-link", body, text))
}
