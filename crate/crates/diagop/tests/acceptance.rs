//! Acceptance suite: runs every criterion of the built-in reproduction
//! suite and fails loudly on any miss. One test per criterion so the
//! pass/fail lines are visible in the test output.

use diagop::reproduce::run_selected;

fn check(id: u32) {
    let results = run_selected(&[id]);
    assert_eq!(results.len(), 1, "criterion {id} missing");
    let c = &results[0];
    println!(
        "{} #{:02} {} - {} ({:.0} ms)",
        if c.pass { "PASS" } else { "FAIL" },
        c.id,
        c.name,
        c.details,
        c.runtime_ms
    );
    assert!(c.pass, "criterion {id} failed: {}", c.details);
}

#[test]
fn criterion_01_essential_spectra_of_built_ins() {
    check(1);
}

#[test]
fn criterion_02_sigma_bar_reduction() {
    check(2);
}

#[test]
fn criterion_03_bt_obstruction_bound() {
    check(3);
}

#[test]
fn criterion_04_fw_violation_for_a04_vs_a06() {
    check(4);
}

#[test]
fn criterion_05_domain_equality() {
    check(5);
}

#[test]
fn criterion_06_interpolation_lemma() {
    check(6);
}

#[test]
fn criterion_07_nrt_nonseparability_witness() {
    check(7);
}

#[test]
fn criterion_08_permutation_matching() {
    check(8);
}

#[test]
fn criterion_09_turbulence_walks() {
    check(9);
}

#[test]
fn criterion_10_epsnet_diagonalization() {
    check(10);
}

#[test]
fn criterion_11_perturbation_intersection() {
    check(11);
}

#[test]
fn criterion_12_relative_compactness() {
    check(12);
}
