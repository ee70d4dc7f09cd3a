use bianchi_core::fpgroups::{bianchi_data, SUPPORTED_D};
use bianchi_core::geometry::{
    halfspace_action, lorentz_apply, psl_to_lorentz, HalfSpacePoint,
};
use bianchi_core::homology::{
    boundary_matrices, h1_with_quotient, smith_normal_form, SparseIntMatrix,
};
use bianchi_core::ring::{ideals_up_to_norm, QuadIdeal};
use bianchi_core::simplify::simplify;
use bianchi_core::triangulation::{
    build_principal, detect_orbifold, principal_has_torsion, Perm, Triangulation,
    DEFAULT_TET_BUDGET,
};
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

mod common;
use common::{domain, ideal, link_check, minors_oracle, relabel, word_matrix};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn snf_matches_minors(
        rows in proptest::collection::vec(proptest::collection::vec(-10i64..=10, 8), 8),
        zero_rows in 0usize..4,
    ) {
        // some matrices get forced low rank
        let mut a = rows;
        for i in 0..zero_rows {
            let src = a[(i + 1) % 8].clone();
            a[i] = src.iter().map(|x| 2 * x).collect();
        }
        let (rank, divs) = minors_oracle(&a);
        let snf = smith_normal_form(&SparseIntMatrix::from_dense(&a));
        prop_assert_eq!(snf.rank, rank);
        let want: Vec<BigInt> = divs.into_iter().filter(|&x| x != 1).map(BigInt::from).collect();
        prop_assert_eq!(snf.divisors, want);
    }
}

fn arb_word() -> impl Strategy<Value = Vec<(usize, bool)>> {
    proptest::collection::vec((0usize..16, any::<bool>()), 0..10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lorentz_is_a_homomorphism(u in arb_word(), v in arb_word()) {
        for d in SUPPORTED_D {
            let gens = bianchi_data(d).unwrap().matrices;
            let a = word_matrix(&gens, &u, d);
            let b = word_matrix(&gens, &v, d);
            let la = psl_to_lorentz(&a);
            prop_assert!(la.preserves_form());
            prop_assert_eq!(psl_to_lorentz(&(a * b)), la.mul(&psl_to_lorentz(&b)));
            prop_assert_eq!(psl_to_lorentz(&a.neg()), la.clone());
            prop_assert_eq!(psl_to_lorentz(&a.inverse()), la.inverse());
            // the action on j in both models, up to positive scale
            let j = HalfSpacePoint::j(d);
            let x = halfspace_action(&a, &j).lorentz();
            let y = lorentz_apply(&a, &j.lorentz());
            prop_assert!(x[0].is_positive() && y[0].is_positive());
            for k in 1..4 {
                prop_assert_eq!(&x[k] * &y[0], &y[k] * &x[0]);
            }
        }
    }
}

fn cases() -> Vec<(i64, QuadIdeal)> {
    let mut out = Vec::new();
    for (d, max) in [(1, 9), (2, 6), (3, 7), (7, 8), (11, 5)] {
        for i in ideals_up_to_norm(d, max) {
            if !i.is_unit() {
                out.push((d, i));
            }
        }
    }
    out
}

#[test]
fn orbifold_detection_matches_torsion_test() {
    for (d, i) in cases() {
        let dom = domain(d);
        let tri = build_principal(&dom, &i, DEFAULT_TET_BUDGET).unwrap();
        assert_eq!(detect_orbifold(&tri, &dom), principal_has_torsion(&dom, &i), "d={} I={}", d, i);
    }
}

#[test]
fn built_complexes_are_manifold_like() {
    for (d, i) in cases() {
        let dom = domain(d);
        let tri = build_principal(&dom, &i, DEFAULT_TET_BUDGET).unwrap();
        let (d2, d1) = boundary_matrices(&tri).unwrap();
        assert!(d1.mul(&d2).is_zero(), "d={} I={}", d, i);
        if detect_orbifold(&tri, &dom) {
            continue;
        }
        link_check(&tri).unwrap_or_else(|e| panic!("d={} I={}: {}", d, i, e));
        let info = tri.classify_vertices();
        let (s, stats) = simplify(&tri);
        assert_eq!(stats.finite_vertices, 0, "d={} I={}", d, i);
        let (d2, d1) = boundary_matrices(&s).unwrap();
        assert!(d1.mul(&d2).is_zero());
        assert_eq!(s.euler_characteristic(), info.count as i64);
        assert_eq!(h1_with_quotient(&s).unwrap(), h1_with_quotient(&tri).unwrap(), "d={} I={}", d, i);
    }
}

const MAX_TETS: usize = 4096;

fn arb_relabel() -> impl Strategy<Value = (Vec<u64>, Vec<usize>)> {
    (
        proptest::collection::vec(any::<u64>(), MAX_TETS),
        proptest::collection::vec(0usize..24, MAX_TETS),
    )
}

fn d2_complex() -> Triangulation {
    // (2, ⟨1+√−2⟩)
    build_principal(&domain(2), &ideal(2, "1+s"), DEFAULT_TET_BUDGET).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn homology_invariant_under_relabelling((keys, perms) in arb_relabel()) {
        let tri = d2_complex();
        let n = tri.len();
        prop_assert!(n <= MAX_TETS);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&t| (keys[t], t));
        let all = Perm::all();
        let sigma: Vec<Perm> = perms[..n].iter().map(|&k| all[k]).collect();
        let base = h1_with_quotient(&tri).unwrap();
        let moved = relabel(&tri, &order, &sigma);
        prop_assert_eq!(h1_with_quotient(&moved).unwrap(), base.clone());
        let (s, stats) = simplify(&moved);
        prop_assert_eq!(stats.finite_vertices, 0);
        prop_assert_eq!(h1_with_quotient(&s).unwrap(), base);
    }
}
