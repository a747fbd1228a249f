mod common;

use common::{ball, products, SchreierOracle};
use fpfix::random::{random_word, rng_from_seed};
use fpfix::{catalog, SubgroupGraph, Word};
use rand::Rng;

fn random_gens(sig: &fpfix::Signature, seed: u64, max_gens: usize, max_len: usize) -> Vec<Word> {
    let mut rng = rng_from_seed(seed);
    let count = rng.gen_range(1..=max_gens);
    (0..count).map(|_| random_word(sig, &mut rng, max_len, 2)).collect()
}

#[test]
fn oracle_agrees_on_known_subgroups() {
    let sig = catalog::by_name("z2z2").unwrap();
    let p = |t: &str| sig.parse_word(t).unwrap();
    let mut o = SchreierOracle::new(&sig, &[p("A[g0] B[g0]")]);
    assert!(o.contains(&p("B[g0] A[g0]")));
    assert!(!o.contains(&p("A[g0]")));
    let mut o = SchreierOracle::new(&sig, &[p("A[g0]"), p("B[g0] A[g0] B[g0]")]);
    assert!(o.contains(&p("A[g0] B[g0] A[g0] B[g0]")));
    assert!(!o.contains(&p("B[g0]")));
}

#[test]
fn folded_membership_matches_oracle() {
    for (name, sig) in catalog::all() {
        let words = ball(&sig, 5, 2);
        for seed in 0..12 {
            let gens = random_gens(&sig, seed, 3, 4);
            let graph = SubgroupGraph::from_generators(&sig, &gens).unwrap();
            let mut oracle = SchreierOracle::new(&sig, &gens);
            for w in &words {
                assert_eq!(
                    graph.contains(w).unwrap(),
                    oracle.contains(w),
                    "{name} seed {seed}: {}",
                    sig.format_word(w)
                );
            }
        }
    }
}

#[test]
fn products_of_generators_are_members() {
    for (_, sig) in catalog::all() {
        for seed in 100..110 {
            let gens = random_gens(&sig, seed, 3, 4);
            let graph = SubgroupGraph::from_generators(&sig, &gens).unwrap();
            for w in products(&sig, &gens, 3) {
                assert!(graph.contains(&w).unwrap(), "{}", sig.format_word(&w));
            }
        }
    }
}

#[test]
fn folding_is_independent_of_generating_set() {
    for (_, sig) in catalog::all() {
        for seed in 200..215 {
            let gens = random_gens(&sig, seed, 3, 4);
            let graph = SubgroupGraph::from_generators(&sig, &gens).unwrap();
            let again = SubgroupGraph::from_generators(&sig, &graph.basis().unwrap()).unwrap();
            assert!(graph.same_structure(&again));
            let kd = graph.kurosh_decomposition().unwrap();
            let instance_gens: usize = kd.instances.iter().map(|i| i.generators.len()).sum();
            assert_eq!(instance_gens + kd.free_rank, graph.basis().unwrap().len());
            let mut shuffled: Vec<Word> = gens.iter().rev().map(|g| sig.invert(g)).collect();
            shuffled.extend(products(&sig, &gens, 2).into_iter().take(5));
            let third = SubgroupGraph::from_generators(&sig, &shuffled).unwrap();
            assert!(graph.same_structure(&third));
        }
    }
}
