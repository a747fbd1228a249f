//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::Rng;

use common::{ball, SchreierOracle};
use fpfix::analysis::{centralizer, fix_report};
use fpfix::folding::ambient_euler_characteristic;
use fpfix::random::{derive_seed, random_inner, random_symmetric_automorphism, random_word, rng_from_seed, RandomParams};
use fpfix::report::{render, verify_records, Format};
use fpfix::verify::{automorphism_onto_violations, verify_suite, Check, VerificationReport, VerifyParams};
use fpfix::{catalog, Signature, SubgroupGraph, Word};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn named_catalog() -> Vec<(String, Signature)> {
    catalog::all().into_iter().map(|(n, s)| (n.to_string(), s)).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for (name, sig) in catalog::all() {
        let g = SubgroupGraph::from_generators(&sig, &sig.ambient_generators()).unwrap();
        let rank = g.kurosh_decomposition().unwrap().kurosh_rank();
        if rank != sig.num_factors() + sig.free_rank() {
            bad.push(format!("{name}: {rank}"));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && elapsed < Duration::from_secs(1),
        format!("{} signatures, mismatches {:?}, {:.3}s", catalog::NAMES.len(), bad, elapsed.as_secs_f64()),
    )
}

fn count(report: &VerificationReport, checks: &[Check]) -> usize {
    report.violations().filter(|f| checks.contains(&f.check)).count()
}

fn criterion_2(report: &VerificationReport, elapsed: Duration) -> Outcome {
    let bad = count(report, &[Check::MonotonicTotal, Check::MonotonicFree, Check::Symmetry]);
    let levels: usize = report.outcomes.iter().map(|o| o.ranks.len()).sum();
    let errors = report.inspections().filter(|f| f.check == Check::Error).count();
    outcome(
        bad == 0 && errors == 0 && report.iterations() == 1000 && elapsed < Duration::from_secs(600),
        format!(
            "{} endomorphisms, {levels} chain levels, {bad} violations, {errors} errors, {:.1}s",
            report.iterations(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_3(report: &VerificationReport) -> Outcome {
    let bad = count(
        report,
        &[Check::StableRank, Check::StableOnto, Check::FixGenerator, Check::FixProduct, Check::FixBound],
    );
    let inspect = report.inspections().count();
    let (s, n) = report.stabilization_fraction();
    outcome(
        bad == 0,
        format!("{bad} violations, {inspect} needing inspection, stabilized {s}/{n}"),
    )
}

fn criterion_4() -> Outcome {
    let sigs = catalog::all();
    let mut bad = Vec::new();
    for k in 0..200u64 {
        let (name, sig) = &sigs[k as usize % sigs.len()];
        let aut = random_symmetric_automorphism(sig, derive_seed(4, 0, k), &RandomParams::default());
        for v in automorphism_onto_violations(sig, &aut.automorphism).unwrap() {
            bad.push(format!("{name} #{k}: {v}"));
        }
    }
    outcome(bad.is_empty(), format!("200 automorphisms, {} violations {:?}", bad.len(), bad))
}

fn criterion_5() -> Outcome {
    let sigs = catalog::all();
    let mut mismatches = Vec::new();
    let mut over = 0;
    let total = 120u64;
    for k in 0..total {
        let (name, sig) = &sigs[k as usize % sigs.len()];
        let (phi, w) = random_inner(sig, derive_seed(5, 0, k), 5, 2);
        let fix = fix_report(&phi, 8, 4).unwrap();
        let c = centralizer(sig, &w).unwrap();
        if !c.subgroup_equals(&fix.graph).unwrap() || fix.oracle_comparison != Some(true) {
            mismatches.push(format!("{name}: {}", sig.format_word(&w)));
        }
        if fix.decomposition.kurosh_rank() > sig.kurosh_rank() {
            over += 1;
        }
    }
    outcome(
        mismatches.is_empty() && over == 0,
        format!("{total} inner endomorphisms, {} mismatches {:?}, {over} over bound", mismatches.len(), mismatches),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let sig = catalog::by_name("z2z3f1").unwrap();
    let words = ball(&sig, 6, 3);
    let mut disagreements = 0;
    let mut members = 0;
    for k in 0..50u64 {
        let mut rng = rng_from_seed(derive_seed(6, 0, k));
        let n = rng.gen_range(1..=3);
        let gens: Vec<Word> = (0..n).map(|_| random_word(&sig, &mut rng, 4, 3)).collect();
        let graph = SubgroupGraph::from_generators(&sig, &gens).unwrap();
        let mut oracle = SchreierOracle::new(&sig, &gens);
        for w in &words {
            let a = graph.contains(w).unwrap();
            if a != oracle.contains(w) {
                disagreements += 1;
            }
            members += a as usize;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        disagreements == 0 && elapsed < Duration::from_secs(120),
        format!(
            "50 subgroups x {} words, {members} memberships, {disagreements} disagreements, {:.1}s",
            words.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_7(report: &VerificationReport) -> Outcome {
    let mut checked = report.outcomes.iter().map(|o| o.complete_graphs).sum::<usize>();
    let mut bad = count(report, &[Check::Euler]);
    let z2z3 = catalog::by_name("z2z3").unwrap();
    if ambient_euler_characteristic(&z2z3) != Rational64::new(-1, 6) {
        bad += 1;
    }
    let z2z2 = catalog::by_name("z2z2").unwrap();
    let h = SubgroupGraph::from_generators(&z2z2, &[z2z2.parse_word("A[g0]").unwrap(), z2z2.parse_word("B[g0] A[g0] B[g0]").unwrap()])
        .unwrap();
    if h.completeness_and_index().unwrap() != Some(2) || h.euler_characteristic().unwrap() != Rational64::from_integer(0) {
        bad += 1;
    }
    for (_, sig) in catalog::all() {
        for k in 0..60u64 {
            let mut rng = rng_from_seed(derive_seed(7, 0, k));
            let gens: Vec<Word> = (0..rng.gen_range(1..=4)).map(|_| random_word(&sig, &mut rng, 4, 2)).collect();
            let g = SubgroupGraph::from_generators(&sig, &gens).unwrap();
            if let Some(index) = g.completeness_and_index().unwrap() {
                checked += 1;
                if g.euler_characteristic().unwrap() != ambient_euler_characteristic(&sig) * index as i64 {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0 && checked > 0, format!("{checked} complete graphs, {bad} violations"))
}

fn criterion_8() -> Outcome {
    let cat = named_catalog();
    let params = VerifyParams::default();
    let runs: Vec<String> = (0..3)
        .map(|i| {
            let p = VerifyParams {
                parallel: i != 2,
                ..params
            };
            render(&verify_records(&verify_suite(&cat, 60, 8, &p)), Format::Machine)
        })
        .collect();
    let same = runs.windows(2).all(|w| w[0] == w[1]);
    outcome(same, format!("3 runs (2 parallel, 1 serial), {} bytes each", runs[0].len()))
}

fn main() {
    let start = Instant::now();
    let suite_start = Instant::now();
    let suite = verify_suite(&named_catalog(), 1000, 2, &VerifyParams::default());
    let suite_elapsed = suite_start.elapsed();
    let results = [
        ("rank of the whole group", criterion_1()),
        ("chain monotonicity", criterion_2(&suite, suite_elapsed)),
        ("stable image and fixed subgroup pipeline", criterion_3(&suite)),
        ("automorphisms map factors onto conjugates", criterion_4()),
        ("fixed subgroups of inner maps are centralizers", criterion_5()),
        ("folded membership against oracle", criterion_6()),
        ("Euler characteristic of finite-index subgroups", criterion_7(&suite)),
        ("deterministic reports", criterion_8()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!(
            "criterion {}: {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += !o.pass as usize;
    }
    println!("acceptance: {}/{} passed in {:.1}s", results.len() - failed, results.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
