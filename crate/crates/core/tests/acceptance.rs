//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails or overruns its time limit.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bianchi_core::fpgroups::{
    bi_order, bianchi_data, validate_peripheral_triple, verify_link, verify_link2, CertificateFile,
    FillingEntry, FpError, LinkCertificate, DEFAULT_COSET_BUDGET, SUPPORTED_D,
};
use bianchi_core::geometry::{
    barycentric_export, covolume_oracle, dirichlet_domain_auto, halfspace_action, lorentz_apply,
    polyhedron_volume, psl_to_lorentz, HalfSpacePoint,
};
use bianchi_core::homology::{
    boundary_matrices, cover_obstruction, h1_with_quotient, principal_cover_degree,
    smith_normal_form, AbelianGroup, ObstructionKind, SparseIntMatrix, Verdict,
};
use bianchi_core::ring::{enumerate_psl, ideals_up_to_norm, psl_order, QuadIdeal};
use bianchi_core::simplify::simplify;
use bianchi_core::triangulation::{
    build_gamma1, build_principal, detect_orbifold, principal_has_torsion, Perm, Triangulation,
    DEFAULT_TET_BUDGET,
};
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

mod common;
use common::{domain, ideal, link_check, minors_oracle, relabel, word_matrix};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eq<T: PartialEq + std::fmt::Debug>(got: T, want: T, what: &str) -> Result<(), String> {
    ensure(got == want, || format!("{}: got {:?}, want {:?}", what, got, want))
}

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

/// Builds Γ(I), checks that the two torsion tests agree, and runs the
/// link and Euler characteristic checks on manifolds.
fn principal(d: i64, text: &str) -> Result<(Triangulation, bool), String> {
    let dom = domain(d);
    let i = ideal(d, text);
    let tri = build_principal(&dom, &i, DEFAULT_TET_BUDGET).map_err(|e| e.to_string())?;
    let orbifold = detect_orbifold(&tri, &dom);
    eq(orbifold, principal_has_torsion(&dom, &i), &format!("({}, {}) torsion tests", d, text))?;
    if !orbifold {
        link_check(&tri).map_err(|e| format!("({}, {}): {}", d, text, e))?;
    }
    Ok((tri, orbifold))
}

fn simplified_h1(tri: &Triangulation) -> Result<(AbelianGroup, AbelianGroup, usize), String> {
    let (s, stats) = simplify(tri);
    eq(stats.finite_vertices, 0, "finite vertices after simplification")?;
    link_check(&s)?;
    let r = h1_with_quotient(&s).map_err(|e| e.to_string())?;
    Ok((r.quotient, r.h1, r.cusps))
}

fn criterion_1() -> Outcome {
    let mut count = 0;
    for d in [1, 2, 3, 7, 11] {
        let gens = bianchi_data(d).map_err(|e| e.to_string())?.matrices;
        for i in ideals_up_to_norm(d, 13).into_iter().filter(|i| !i.is_unit()) {
            let g = enumerate_psl(&i, &gens, 10_000_000).map_err(|e| e.to_string())?;
            eq(psl_order(&i).map_err(|e| e.to_string())?, g.len() as u64, &format!("d={} I={}", d, i))?;
            count += 1;
        }
    }
    for (d, text, want) in [(1, "2", 48), (2, "3", 288), (1, "3", 360), (7, "(1+s)/2", 6)] {
        eq(psl_order(&ideal(d, text)).map_err(|e| e.to_string())?, want, &format!("|PSL| ({}, {})", d, text))?;
    }
    Ok(format!("{} ideals match enumeration; spot values 48, 288, 360, 6", count))
}

fn criterion_2(limit: Duration) -> Outcome {
    let mut slowest = Duration::ZERO;
    for d in [1, 2, 3, 5, 7, 11, 15] {
        let start = Instant::now();
        let p = dirichlet_domain_auto(d).map_err(|e| format!("d={}: {}", d, e))?;
        ensure(p.verify_pairings(), || format!("d={}: pairings not verified", d))?;
        eq(p.ideal_vertex_classes(), common::class_group_order(d), &format!("d={} cusp classes", d))?;
        let v = polyhedron_volume(&p);
        ensure((v - covolume_oracle(d)).abs() < 1e-6, || {
            format!("d={}: volume {} vs oracle {}", d, v, covolume_oracle(d))
        })?;
        let elapsed = start.elapsed();
        ensure(elapsed <= limit, || format!("d={} took {:.1?}", d, elapsed))?;
        slowest = slowest.max(elapsed);
        common::remember_domain(d, barycentric_export(&p));
    }
    ensure((covolume_oracle(1) - 0.305322).abs() < 1e-6, || "d=1 covolume".into())?;
    Ok(format!("7 domains verified, slowest {:.1?}", slowest))
}

fn cert_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/certs").join(name)
}

fn load(name: &str) -> Result<CertificateFile, String> {
    CertificateFile::read(&cert_path(name)).map_err(|e| format!("{}: {}", name, e))
}

fn verify(file: &CertificateFile) -> Result<String, FpError> {
    let cert = LinkCertificate::from_file(file)?;
    verify_link(&cert, DEFAULT_COSET_BUDGET).map(|v| v.label)
}

fn criterion_3() -> Outcome {
    let (tri, orbifold) = principal(2, "1+s")?;
    eq(tri.labels.len(), 12, "copies")?;
    eq(tri.classify_vertices().count, 4, "cusps")?;
    ensure(!orbifold, || "reported orbifold".into())?;
    let (q, h1, _) = simplified_h1(&tri)?;
    ensure(q.is_trivial(), || format!("quotient {}", q))?;
    eq(h1, AbelianGroup::free(4), "H1")?;
    eq(verify(&load("d2_1ps2.json")?).map_err(|e| e.to_string())?, "4-Link".to_string(), "certificate")?;
    Ok("12 copies, 4 cusps, quotient 0, H1 = Z^4, 4-Link".into())
}

fn criterion_4() -> Outcome {
    ensure(principal(1, "1+i")?.1, || "(1, ⟨1+i⟩) not reported orbifold".into())?;
    ensure(principal(3, "(3+s)/2")?.1, || "(3, ⟨(3+√−3)/2⟩) not reported orbifold".into())?;
    let (tri, orbifold) = principal(1, "2+i")?;
    ensure(!orbifold, || "(1, ⟨2+i⟩) reported orbifold".into())?;
    eq(tri.classify_vertices().count, 6, "(1, ⟨2+i⟩) cusps")?;
    Ok("two orbifolds, (1, ⟨2+i⟩) manifold with 6 cusps".into())
}

fn criterion_5() -> Outcome {
    for (d, text, copies, cusps, quotient) in [
        (1, "3", 360, 20, AbelianGroup::trivial()),
        (2, "2", 48, 12, AbelianGroup::trivial()),
        (1, "3+3*i", 2160, 60, AbelianGroup::free(5)),
    ] {
        let (tri, orbifold) = principal(d, text)?;
        ensure(!orbifold, || format!("({}, {}) reported orbifold", d, text))?;
        eq(tri.labels.len(), copies, &format!("({}, {}) copies", d, text))?;
        let (q, _, c) = simplified_h1(&tri)?;
        eq(c, cusps, &format!("({}, {}) cusps", d, text))?;
        eq(q, quotient, &format!("({}, {}) quotient", d, text))?;
    }
    Ok("(1,⟨3⟩) 0/20, (2,⟨2⟩) 0/12, (1,⟨3+3i⟩) Z^5/60".into())
}

fn criterion_6(limit: Duration) -> Outcome {
    let d23 = ideal(23, "6, 3-w");
    let d23_triples = vec![[6, -2, 1], [6, 1, 1], [3, 0, 2]];
    let data23 = bianchi_data(23).map_err(|e| e.to_string())?;
    for (c, t) in d23_triples.iter().enumerate() {
        ensure(validate_peripheral_triple(&data23, &d23, c, *t), || format!("d=23 triple {:?} invalid", t))?;
    }
    let cases = [
        (7, vec![[3, 0, 3]], ideal(7, "3"), 1080, 360),
        (5, vec![[2, 1, 1]], ideal(5, "2, 1+s"), 12, 6),
        (23, d23_triples, d23, 288, 72),
    ];
    let mut slowest = Duration::ZERO;
    for (d, triples, i, want_b, want_psl) in cases {
        let start = Instant::now();
        let data = bianchi_data(d).map_err(|e| e.to_string())?;
        let b = bi_order(&data, &triples, DEFAULT_COSET_BUDGET).map_err(|e| format!("d={}: {}", d, e))?;
        eq(b, want_b, &format!("d={} |B(I)|", d))?;
        eq(psl_order(&i).map_err(|e| e.to_string())?, want_psl, &format!("d={} |PSL|", d))?;
        let elapsed = start.elapsed();
        ensure(elapsed <= limit, || format!("d={} took {:.1?}", d, elapsed))?;
        slowest = slowest.max(elapsed);
    }
    Ok(format!("1080 vs 360, 12 vs 6, 288 vs 72; slowest {:.1?}", slowest))
}

fn criterion_7() -> Outcome {
    for (name, label) in [
        ("d2_1ps2.json", "4-Link"),
        ("d15_2_w.json", "6-Link"),
        ("d11_1+w.json", "12-Link"),
        ("d15_w.json", "12-Link"),
        ("d7_w.json", "3-Link"),
    ] {
        eq(verify(&load(name)?).map_err(|e| format!("{}: {}", name, e))?, label.to_string(), name)?;
    }
    let d7 = load("d7_w.json")?;
    let data7 = bianchi_data(7).map_err(|e| e.to_string())?;
    let pqs = d7.link2.as_ref().ok_or("d7 certificate has no single-relator data")?;
    let v = verify_link2(&data7, pqs, 6, DEFAULT_COSET_BUDGET).map_err(|e| e.to_string())?;
    eq((v.cusps, v.order), (3, 6), "d=7 single-relator check")?;

    let base = load("d2_1ps2.json")?;
    let mut wrong_order = base.clone();
    wrong_order.expected_order = 24;
    ensure(matches!(verify(&wrong_order), Err(FpError::Test1Failed { .. })), || "wrong order not caught by Test1".into())?;
    let mut dropped = base.clone();
    dropped.fillings.as_mut().ok_or("no fillings")?[0].pop();
    ensure(matches!(verify(&dropped), Err(FpError::Test2Failed(_))), || "dropped filling not caught by Test2".into())?;
    let mut duplicated = base.clone();
    duplicated.fillings.as_mut().ok_or("no fillings")?[0][3].g = "a*t^3".into();
    ensure(matches!(verify(&duplicated), Err(FpError::Test3Failed(_))), || "duplicated cusp not caught by Test3".into())?;
    let mut extra = base;
    extra.fillings.as_mut().ok_or("no fillings")?[0].push(FillingEntry { g: "a*t^3".into(), pq: [0, 1] });
    ensure(matches!(verify(&extra), Err(FpError::Test3Failed(_))), || "extra filling not caught by Test3".into())?;
    Ok("5 certificates verify; mutations fail Test1/Test2/Test3".into())
}

/// Returns the outcome and the time spent outside domain computation.
fn criterion_8() -> (Outcome, Duration) {
    // domains are precomputed so only the arithmetic and builds are timed
    let doms = [(31, domain(31)), (47, domain(47))];
    let start = Instant::now();
    let run = || -> Outcome {
        let j = psl_order(&ideal(5, "4+2*s")).map_err(|e| e.to_string())?;
        let i = psl_order(&ideal(5, "2")).map_err(|e| e.to_string())?;
        eq((j, i), (15552, 48), "|PSL| for d=5")?;
        let deg = principal_cover_degree(j, i).ok_or("degree not integral")?;
        eq(deg, 324, "cover degree")?;
        eq(cover_obstruction(ObstructionKind::PrincipalCover, None, deg), Verdict::Excluded, "principal cover")?;
        let i31 = ideal(31, "s");
        eq(
            cover_obstruction(ObstructionKind::Gamma1Degree, None, i31.norm() as u64),
            Verdict::Excluded,
            "Γ₁ obstruction for (31, ⟨√−31⟩)",
        )?;
        for ((d, dom), (text, copies)) in doms.iter().zip([("s", 480usize), ("5", 312)]) {
            let i = ideal(*d, text);
            eq(psl_order(&i).map_err(|e| e.to_string())? / i.norm() as u64, copies as u64, "index formula")?;
            let tri = build_gamma1(dom, &i, DEFAULT_TET_BUDGET).map_err(|e| e.to_string())?;
            eq(tri.labels.len(), copies, &format!("({}, {}) Γ₁ copies", d, text))?;
        }
        Ok("degree 324, Γ₁ lemma applies at d=31, copies 480 and 312".into())
    };
    let out = run();
    (out, start.elapsed())
}

fn arb_word() -> impl Strategy<Value = Vec<(usize, bool)>> {
    proptest::collection::vec((0usize..16, any::<bool>()), 0..10)
}

fn lorentz_words(d: i64) -> Result<(), String> {
    let gens = bianchi_data(d).map_err(|e| e.to_string())?.matrices;
    runner(1000)
        .run(&(arb_word(), arb_word()), |(u, v)| {
            let a = word_matrix(&gens, &u, d);
            let b = word_matrix(&gens, &v, d);
            let la = psl_to_lorentz(&a);
            prop_assert!(la.preserves_form());
            prop_assert_eq!(psl_to_lorentz(&(a * b)), la.mul(&psl_to_lorentz(&b)));
            prop_assert_eq!(psl_to_lorentz(&a.inverse()), la.inverse());
            let j = HalfSpacePoint::j(d);
            let x = halfspace_action(&a, &j).lorentz();
            let y = lorentz_apply(&a, &j.lorentz());
            prop_assert!(x[0].is_positive() && y[0].is_positive());
            for k in 1..4 {
                prop_assert_eq!(&x[k] * &y[0], &y[k] * &x[0]);
            }
            Ok(())
        })
        .map_err(|e| format!("d={}: {}", d, e))
}

fn small_cases() -> Vec<(i64, QuadIdeal)> {
    let mut out = Vec::new();
    for (d, max) in [(1, 9), (2, 6), (3, 7), (7, 8), (11, 5)] {
        out.extend(ideals_up_to_norm(d, max).into_iter().filter(|i| !i.is_unit()).map(|i| (d, i)));
    }
    out
}

fn criterion_9() -> Outcome {
    let matrices = (proptest::collection::vec(proptest::collection::vec(-10i64..=10, 8), 8), 0usize..4);
    runner(200)
        .run(&matrices, |(mut a, zero_rows)| {
            for i in 0..zero_rows {
                let src = a[(i + 1) % 8].clone();
                a[i] = src.iter().map(|x| 2 * x).collect();
            }
            let (rank, divs) = minors_oracle(&a);
            let snf = smith_normal_form(&SparseIntMatrix::from_dense(&a));
            prop_assert_eq!(snf.rank, rank);
            let want: Vec<BigInt> = divs.into_iter().filter(|&x| x != 1).map(BigInt::from).collect();
            prop_assert_eq!(snf.divisors, want);
            Ok(())
        })
        .map_err(|e| format!("SNF: {}", e))?;

    for d in SUPPORTED_D {
        lorentz_words(d)?;
    }

    let mut manifolds = 0;
    let cases = small_cases();
    for (d, i) in &cases {
        let dom = domain(*d);
        let tri = build_principal(&dom, i, DEFAULT_TET_BUDGET).map_err(|e| e.to_string())?;
        let (d2, d1) = boundary_matrices(&tri).map_err(|e| e.to_string())?;
        ensure(d1.mul(&d2).is_zero(), || format!("d={} I={}: boundary of boundary", d, i))?;
        let orbifold = detect_orbifold(&tri, &dom);
        eq(orbifold, principal_has_torsion(&dom, i), &format!("d={} I={} torsion tests", d, i))?;
        if orbifold {
            continue;
        }
        link_check(&tri).map_err(|e| format!("d={} I={}: {}", d, i, e))?;
        let (s, stats) = simplify(&tri);
        eq(stats.finite_vertices, 0, &format!("d={} I={} finite vertices", d, i))?;
        link_check(&s).map_err(|e| format!("d={} I={} simplified: {}", d, i, e))?;
        eq(h1_with_quotient(&s).ok(), h1_with_quotient(&tri).ok(), &format!("d={} I={} H1", d, i))?;
        manifolds += 1;
    }

    let tri = build_principal(&domain(2), &ideal(2, "1+s"), DEFAULT_TET_BUDGET).map_err(|e| e.to_string())?;
    let base = h1_with_quotient(&tri).map_err(|e| e.to_string())?;
    let n = tri.len();
    let relabels = (
        proptest::collection::vec(any::<u64>(), n),
        proptest::collection::vec(0usize..24, n),
    );
    runner(12)
        .run(&relabels, |(keys, perms)| {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&t| (keys[t], t));
            let all = Perm::all();
            let sigma: Vec<Perm> = perms.iter().map(|&k| all[k]).collect();
            let moved = relabel(&tri, &order, &sigma);
            let (s, _) = simplify(&moved);
            prop_assert_eq!(h1_with_quotient(&s).unwrap(), base.clone());
            Ok(())
        })
        .map_err(|e| format!("relabelling: {}", e))?;

    Ok(format!(
        "200 SNF cases, 1000 words for each of {} values of d, {} complexes ({} manifolds), 12 relabellings",
        SUPPORTED_D.len(),
        cases.len(),
        manifolds
    ))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {}", msg))
    })
}

fn report(n: usize, outcome: Outcome, elapsed: Duration, limit: Duration) -> bool {
    let (ok, detail) = match outcome {
        Ok(detail) if elapsed <= limit => (true, detail),
        Ok(detail) => (false, format!("{} (took {:.1?}, limit {:?})", detail, elapsed, limit)),
        Err(e) => (false, e),
    };
    println!("criterion {}: {} - {} [{:.1?}]", n, if ok { "PASS" } else { "FAIL" }, detail, elapsed);
    ok
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let out = guarded(f);
    (out, start.elapsed())
}

fn main() -> ExitCode {
    let min = |m: u64| Duration::from_secs(60 * m);
    let sec = Duration::from_secs;
    let mut all = true;

    let (o, t) = timed(criterion_1);
    all &= report(1, o, t, sec(30));
    // per-d limit is checked inside; the total gets one limit per d
    let (o, t) = timed(|| criterion_2(min(10)));
    all &= report(2, o, t, min(70));
    let (o, t) = timed(criterion_3);
    all &= report(3, o, t, sec(60));
    let (o, t) = timed(criterion_4);
    all &= report(4, o, t, sec(60));
    let (o, t) = timed(criterion_5);
    all &= report(5, o, t, min(10));
    let (o, t) = timed(|| criterion_6(min(5)));
    all &= report(6, o, t, min(15));
    let (o, t) = timed(criterion_7);
    all &= report(7, o, t, min(10));
    let (o, t) = match catch_unwind(criterion_8) {
        Ok(r) => r,
        Err(_) => (Err("panicked".into()), Duration::ZERO),
    };
    all &= report(8, o, t, sec(60));
    let (o, t) = timed(criterion_9);
    all &= report(9, o, t, min(5));

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
