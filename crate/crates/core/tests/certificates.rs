use std::path::PathBuf;

use bianchi_core::fpgroups::{
    bianchi_data, verify_link, verify_link2, CertificateFile, FillingEntry, FpError,
    LinkCertificate, DEFAULT_COSET_BUDGET,
};

fn cert_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/certs").join(name)
}

fn load(name: &str) -> CertificateFile {
    CertificateFile::read(&cert_path(name)).unwrap()
}

fn verify(file: &CertificateFile) -> Result<String, FpError> {
    let cert = LinkCertificate::from_file(file)?;
    verify_link(&cert, DEFAULT_COSET_BUDGET).map(|v| v.label)
}

#[test]
fn d2_four_link() {
    assert_eq!(verify(&load("d2_1ps2.json")).unwrap(), "4-Link");
}

#[test]
fn d15_expand_six_link() {
    assert_eq!(verify(&load("d15_2_w.json")).unwrap(), "6-Link");
}

#[test]
fn d11_symmetrized_twelve_link() {
    assert_eq!(verify(&load("d11_1+w.json")).unwrap(), "12-Link");
}

#[test]
fn d15_symmetric_twelve_link() {
    assert_eq!(verify(&load("d15_w.json")).unwrap(), "12-Link");
}

#[test]
fn d7_three_cusps_both_checks() {
    let file = load("d7_w.json");
    assert_eq!(verify(&file).unwrap(), "3-Link");
    let data = bianchi_data(7).unwrap();
    let v = verify_link2(&data, file.link2.as_ref().unwrap(), 6, DEFAULT_COSET_BUDGET).unwrap();
    assert_eq!((v.cusps, v.order), (3, 6));
}

#[test]
fn wrong_order_fails_test_1() {
    let mut file = load("d2_1ps2.json");
    file.expected_order = 24;
    assert!(matches!(verify(&file), Err(FpError::Test1Failed { expected: 24, found: 12 })));
}

#[test]
fn dropped_filling_fails_test_2() {
    let mut file = load("d2_1ps2.json");
    file.fillings.as_mut().unwrap()[0].pop();
    assert!(matches!(verify(&file), Err(FpError::Test2Failed(_))));
}

#[test]
fn duplicated_cusp_fails_test_3() {
    // a*t^3 names the same cusp as a; with the last filling's (p, q) kept
    // the fillings still generate N(I), so only the cusp test can object
    let mut file = load("d2_1ps2.json");
    file.fillings.as_mut().unwrap()[0][3].g = "a*t^3".into();
    assert!(matches!(verify(&file), Err(FpError::Test3Failed(_))));
}

#[test]
fn extra_filling_fails_test_3() {
    let mut file = load("d2_1ps2.json");
    file.fillings.as_mut().unwrap()[0].push(FillingEntry { g: "a*t^3".into(), pq: [0, 1] });
    assert!(matches!(verify(&file), Err(FpError::Test3Failed(_))));
}

#[test]
fn mutated_d15_symmetry_fails() {
    let mut file = load("d15_w.json");
    file.symmetry.as_mut().unwrap().order = 1;
    assert!(verify(&file).is_err());
}

