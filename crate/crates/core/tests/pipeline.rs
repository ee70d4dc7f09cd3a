use bianchi_core::homology::{h1_with_quotient, AbelianGroup};
use bianchi_core::ring::psl_order;
use bianchi_core::simplify::simplify;
use bianchi_core::triangulation::{
    build_gamma1, build_principal, detect_orbifold, principal_has_torsion, Triangulation,
    DEFAULT_TET_BUDGET,
};

mod common;
use common::{domain, ideal};

fn check_links(tri: &Triangulation) {
    common::link_check(tri).unwrap();
}

struct Built {
    copies: usize,
    cusps: usize,
    orbifold: bool,
    tri: Triangulation,
}

fn principal(d: i64, text: &str) -> Built {
    let dom = domain(d);
    let i = ideal(d, text);
    let tri = build_principal(&dom, &i, DEFAULT_TET_BUDGET).unwrap();
    let orbifold = detect_orbifold(&tri, &dom);
    assert_eq!(orbifold, principal_has_torsion(&dom, &i), "({}, {}) orbifold tests disagree", d, text);
    Built { copies: tri.labels.len(), cusps: tri.classify_vertices().count, orbifold, tri }
}

fn simplified_quotient(tri: &Triangulation) -> AbelianGroup {
    let (s, stats) = simplify(tri);
    assert_eq!(stats.finite_vertices, 0);
    check_links(&s);
    let raw_cusps = tri.classify_vertices().count;
    let r = h1_with_quotient(&s).unwrap();
    assert_eq!(r.cusps, raw_cusps);
    r.quotient
}

#[test]
fn d2_one_plus_s_end_to_end() {
    let b = principal(2, "1+s");
    assert_eq!(b.copies, 12);
    assert_eq!(b.cusps, 4);
    assert!(!b.orbifold);
    check_links(&b.tri);
    let (s, stats) = simplify(&b.tri);
    assert_eq!(stats.finite_vertices, 0);
    assert!(s.len() < b.tri.len());
    let r = h1_with_quotient(&s).unwrap();
    assert!(r.quotient.is_trivial());
    assert_eq!(r.h1, AbelianGroup::free(4));
    // the raw complex agrees
    assert_eq!(h1_with_quotient(&b.tri).unwrap(), r);
}

#[test]
fn orbifold_detection() {
    assert!(principal(1, "1+i").orbifold);
    assert!(principal(3, "(3+s)/2").orbifold);
    let b = principal(1, "2+i");
    assert!(!b.orbifold);
    assert_eq!(b.cusps, 6);
    check_links(&b.tri);
    assert!(simplified_quotient(&b.tri).is_trivial());
}

#[test]
fn homology_table_values() {
    let b = principal(1, "3");
    assert_eq!((b.copies, b.cusps), (360, 20));
    assert!(simplified_quotient(&b.tri).is_trivial());

    let b = principal(2, "2");
    assert_eq!((b.copies, b.cusps), (48, 12));
    assert!(simplified_quotient(&b.tri).is_trivial());
}

#[test]
fn d1_three_plus_three_i() {
    let b = principal(1, "3+3i");
    assert_eq!((b.copies, b.cusps), (2160, 60));
    assert!(!b.orbifold);
    assert_eq!(simplified_quotient(&b.tri), AbelianGroup::free(5));
}

#[test]
fn copies_equal_psl_order() {
    for (d, text) in [(1, "2"), (1, "1+i"), (2, "1+s"), (3, "2"), (7, "w"), (7, "2"), (11, "w")] {
        let b = principal(d, text);
        assert_eq!(b.copies as u64, psl_order(&ideal(d, text)).unwrap(), "({}, {})", d, text);
        if !b.orbifold {
            check_links(&b.tri);
        }
    }
}

#[test]
fn gamma1_copy_counts() {
    // |PSL(2, O/I)| / N(I)
    for (d, text, copies) in [(31, "s", 480usize), (47, "5", 312)] {
        let dom = domain(d);
        let i = ideal(d, text);
        assert_eq!(psl_order(&i).unwrap() / i.norm() as u64, copies as u64);
        let tri = build_gamma1(&dom, &i, DEFAULT_TET_BUDGET).unwrap();
        assert_eq!(tri.labels.len(), copies);
        assert_eq!(tri.len(), copies * dom.len());
    }
}

#[test]
fn gamma1_small_homology() {
    // Γ₁ complexes at small scale: links, χ, and homology through simplification
    let mut checked = 0;
    for (d, text) in [(1, "2+i"), (1, "3"), (1, "4"), (1, "4+i"), (2, "1+s"), (2, "3"), (3, "2"), (3, "3"), (7, "2"), (7, "3")] {
        let dom = domain(d);
        let i = ideal(d, text);
        let tri = build_gamma1(&dom, &i, DEFAULT_TET_BUDGET).unwrap();
        assert_eq!(tri.labels.len() as u64, psl_order(&i).unwrap() / i.norm() as u64);
        if detect_orbifold(&tri, &dom) {
            continue;
        }
        check_links(&tri);
        let raw = h1_with_quotient(&tri).unwrap();
        let (s, _) = simplify(&tri);
        assert_eq!(h1_with_quotient(&s).unwrap(), raw, "({}, {})", d, text);
        checked += 1;
    }
    assert!(checked >= 3, "only {} torsion-free cases", checked);
}

#[test]
fn orbifold_simplify_falls_back() {
    let b = principal(1, "1+i");
    let (s, stats) = simplify(&b.tri);
    assert_eq!(s.classify_vertices().count, b.cusps);
    assert!(stats.collapsed <= stats.input);
}
