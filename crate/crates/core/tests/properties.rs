mod common;

use common::SUITES;

const CASES: u32 = 256;

fn run(name: &str) {
    let suite = SUITES.iter().find(|s| s.name == name).expect("known suite");
    if let Err(e) = (suite.run)(CASES) {
        panic!("{name}: {e}");
    }
}

#[test]
fn ring_laws() {
    run("ring laws");
}

#[test]
fn invert_soundness() {
    run("invert soundness");
}

#[test]
fn truncation_monotonicity() {
    run("truncation monotonicity");
}

#[test]
fn partition_of_unity() {
    run("partition of unity");
}

#[test]
fn projection_algebra() {
    run("projection algebra");
}

#[test]
fn triple_product_on_fuzzed_arguments() {
    run("triple product on fuzzed arguments");
}

#[test]
fn parser_round_trip() {
    run("parser round trip");
}

#[test]
fn parser_totality() {
    run("parser totality");
}

#[test]
fn evaluation_homomorphism() {
    run("evaluation homomorphism");
}

#[test]
fn certificate_soundness_bridge() {
    run("certificate soundness bridge");
}
