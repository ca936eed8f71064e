//! End-to-end acceptance gate: every certified fact is re-checked at its
//! stated tolerance and reported as one pass/fail line per criterion.

use smod::verify::{run_suite, Check};

const SEED: u64 = 42;

fn report(num: usize, label: &str, checks: &[Check]) -> bool {
    let passed = checks.iter().all(|c| c.passed);
    let status = if passed { "PASS" } else { "FAIL" };
    println!("[{status}] criterion {num}: {label} ({} checks)", checks.len());
    for c in checks.iter().filter(|c| !c.passed) {
        println!(
            "       failed check {}: observed {} expected {} tolerance {}",
            c.name, c.observed, c.expected, c.tolerance
        );
    }
    passed
}

#[test]
fn acceptance() {
    let mut ok = true;

    let hilbert = run_suite("hilbert", SEED).expect("hilbert suite");
    ok &= report(1, "inner-product witness matches 2ad and the grid oracle", &hilbert.checks);

    let l1 = run_suite("l1", SEED).expect("l1 suite");
    ok &= report(2, "atomic-L1 formula pinched by witnesses and segment pairs", &l1.checks);
    if let Some(c) = l1.checks.iter().find(|c| c.name == "whole-atom-error-rate-constant") {
        println!("       discretization error constant: max(n * err) = {}", c.observed);
    }

    let thmc = run_suite("thmC", SEED).expect("thmC suite");
    ok &= report(3, "flat-sphere segment pair certified below the formula", &thmc.checks);

    let plemma = run_suite("plemma", SEED).expect("plemma suite");
    ok &= report(4, "p-power sandwich holds on random spaces", &plemma.checks);

    let ucremark = run_suite("ucremark", SEED).expect("ucremark suite");
    ok &= report(5, "uniform-convexity perturbation reaches its modulus bound", &ucremark.checks);

    let bochner = run_suite("bochner", SEED).expect("bochner suite");
    ok &= report(6, "vector-valued prefix kill achieves a'd exactly", &bochner.checks);

    let lp2 = run_suite("lp2", SEED).expect("lp2 suite");
    ok &= report(7, "lp^2 two-point gap below its order bound and near the oracle", &lp2.checks);

    let thmd = run_suite("thmD", SEED).expect("thmD suite");
    let (transfer, machine): (Vec<_>, Vec<_>) = thmd
        .checks
        .iter()
        .cloned()
        .partition(|c| c.name.starts_with("squared-transfer"));
    ok &= report(8, "square-sum renorm case machine meets its polynomial floor", &machine);
    for c in machine.iter().filter(|c| c.name.ends_with("-count")) {
        println!("       {}: {}", c.name, c.observed);
    }
    ok &= report(9, "squared transfer inequality on hypothesis-filtered triples", &transfer);

    assert!(ok, "one or more acceptance criteria failed; see lines above");
}
