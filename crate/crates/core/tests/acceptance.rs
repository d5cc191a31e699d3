//! One test per acceptance criterion; each prints a PASS/FAIL line.

use srf_core::acceptance::{self, CriterionOutcome};

fn report(o: CriterionOutcome) {
    println!("{o}");
    assert!(o.passed, "{o}");
}

#[test]
fn c01_bracket() {
    report(acceptance::bracket());
}

#[test]
fn c02_upper_chain() {
    report(acceptance::upper_chain());
}

#[test]
fn c03_lower_shape() {
    report(acceptance::lower_shape());
}

#[test]
fn c04_contiguity() {
    report(acceptance::contiguity());
}

#[test]
fn c05_scaling() {
    report(acceptance::scaling());
}

#[test]
fn c06_minimax() {
    report(acceptance::minimax());
}

#[test]
fn c07_reproduction() {
    report(acceptance::reproduction());
}

#[test]
fn c08_faber() {
    report(acceptance::faber());
}

#[test]
fn c09_growth() {
    report(acceptance::growth());
}

#[test]
fn c10_small_y() {
    report(acceptance::small_y());
}

#[test]
fn c11_oracles() {
    report(acceptance::oracles());
}
