use bianchi_core::geometry::{
    barycentric_export, covolume_oracle, dirichlet_domain_auto, polyhedron_volume, singular_triples,
    FundamentalDomain,
};
use bianchi_core::ring::class_number;

mod common;

fn check_domain(d: i64) {
    let p = dirichlet_domain_auto(d).unwrap();
    assert!(p.verify_pairings(), "d={} pairings", d);
    assert_eq!(p.ideal_vertex_classes(), common::class_group_order(d), "d={} cusp classes", d);
    let v = polyhedron_volume(&p);
    assert!((v - covolume_oracle(d)).abs() < 1e-6, "d={} volume {} vs {}", d, v, covolume_oracle(d));

    let dom = barycentric_export(&p);
    dom.validate().unwrap();
    assert_eq!(dom.len() % 4, 0);
    let back = FundamentalDomain::from_json(&dom.to_json()).unwrap();
    assert_eq!(back, dom);
    assert!(singular_triples(&dom).iter().flatten().all(|&k| (1..=3).contains(&k)));
}

#[test]
fn gaussian_domain() {
    check_domain(1);
    // |D|^{3/2} ζ_K(2) / 4π² with D = −4 is Catalan's constant over 3
    assert!((covolume_oracle(1) - common::CATALAN / 3.0).abs() < 1e-12);
    assert!((covolume_oracle(1) - 0.305322).abs() < 1e-6);
}

#[test]
fn small_class_number_one_domains() {
    for d in [2, 3, 7, 11] {
        check_domain(d);
    }
}

#[test]
fn class_number_two_domains() {
    for d in [5, 15] {
        check_domain(d);
    }
}

#[test]
fn class_numbers_by_ideal_classes() {
    for d in [1i64, 2, 3, 5, 6, 7, 11, 15, 19, 23, 31, 39, 47, 71] {
        assert_eq!(class_number(d), common::class_group_order(d), "d={}", d);
    }
}
