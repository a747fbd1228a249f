//! Seeded generators for words, symmetric endomorphisms and automorphisms.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::{enumerate_homs, FactorHom, DEFAULT_HOM_PRODUCT_CAP};
use crate::morphism::Endomorphism;
use crate::word::{Signature, Slot, Syllable, Word};

/// Mixes a base seed with a stream tag and an index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomParams {
    /// Longest conjugator used for factor images.
    pub max_conjugator_len: usize,
    /// Longest image of a free letter.
    pub max_image_len: usize,
    /// Largest absolute free exponent in random words.
    pub max_exp: i64,
    /// Most elementary moves in a random automorphism.
    pub max_moves: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            max_conjugator_len: 2,
            max_image_len: 6,
            max_exp: 2,
            max_moves: 4,
        }
    }
}

fn slots(sig: &Signature) -> Vec<Slot> {
    (0..sig.num_factors() as u32)
        .map(Slot::Factor)
        .chain((0..sig.free_rank() as u32).map(Slot::Free))
        .collect()
}

fn random_syllable<R: Rng>(sig: &Signature, rng: &mut R, slot: Slot, max_exp: i64) -> Syllable {
    match slot {
        Slot::Factor(i) => {
            let order = sig.factor(i as usize).order() as u32;
            Syllable::factor(i as usize, rng.gen_range(1..order))
        }
        Slot::Free(j) => {
            let k = rng.gen_range(1..=max_exp.max(1));
            Syllable::free(j as usize, if rng.gen_bool(0.5) { k } else { -k })
        }
    }
}

/// Uniform length in `0..=max_len`, then uniform syllables avoiding the
/// previous slot.
pub fn random_word<R: Rng>(sig: &Signature, rng: &mut R, max_len: usize, max_exp: i64) -> Word {
    let all = slots(sig);
    let len = rng.gen_range(0..=max_len);
    let mut raw = Vec::with_capacity(len);
    let mut prev: Option<Slot> = None;
    for _ in 0..len {
        let choices: Vec<Slot> = all.iter().copied().filter(|&s| Some(s) != prev).collect();
        let Some(&slot) = choices.choose(rng) else { break };
        raw.push(random_syllable(sig, rng, slot, max_exp));
        prev = Some(slot);
    }
    sig.normalize_unchecked(raw)
}

/// Factor images `c · h(g) · c^-1` for a random target factor, hom and
/// conjugator; free letters go to random words.
pub fn random_symmetric_endomorphism(sig: &Signature, seed: u64, params: &RandomParams) -> Endomorphism {
    let mut rng = rng_from_seed(seed);
    let n = sig.num_factors();
    let mut factor_images = Vec::with_capacity(n);
    for i in 0..n {
        let j = rng.gen_range(0..n);
        let homs = enumerate_homs(&sig.factors()[i], &sig.factors()[j], DEFAULT_HOM_PRODUCT_CAP)
            .expect("catalog-sized factors");
        let h = homs.choose(&mut rng).expect("trivial hom always exists");
        let c = random_word(sig, &mut rng, params.max_conjugator_len, params.max_exp);
        factor_images.push(
            h.generator_images()
                .into_iter()
                .map(|e| sig.conjugate(&sig.element(j, e), &c))
                .collect(),
        );
    }
    let free_images = (0..sig.free_rank())
        .map(|_| random_word(sig, &mut rng, params.max_image_len, params.max_exp))
        .collect();
    Endomorphism::build(sig, factor_images, free_images).expect("conjugated homs are consistent")
}

/// A random inner endomorphism together with its conjugating word.
pub fn random_inner(sig: &Signature, seed: u64, max_len: usize, max_exp: i64) -> (Endomorphism, Word) {
    let mut rng = rng_from_seed(seed);
    let w = random_word(sig, &mut rng, max_len, max_exp);
    (Endomorphism::inner(sig, &w), w)
}

/// Elementary automorphisms of a free product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementaryMove {
    /// An automorphism of one factor.
    FactorAutomorphism { factor: usize, hom: FactorHom },
    /// `G_i -> s G_i s^-1`, everything else fixed; `s` from another slot.
    ConjugateFactor { factor: usize, by: Syllable },
    /// `x_j -> s x_j s^-1`; `s` from another slot.
    ConjugateLetter { letter: usize, by: Syllable },
    /// Exchange two factors with identical tables.
    SwapFactors { first: usize, second: usize },
    /// `x_j -> x_j^-1`.
    InvertLetter { letter: usize },
    /// `x_j -> x_j x_k^sign`.
    Transvection { letter: usize, other: usize, sign: i64 },
    /// Conjugation of everything by `s`.
    Inner { by: Syllable },
}

impl ElementaryMove {
    fn build(&self, sig: &Signature) -> Endomorphism {
        let mut factor_images: Vec<Vec<Word>> = (0..sig.num_factors())
            .map(|i| {
                sig.factor(i)
                    .generators()
                    .iter()
                    .map(|&g| sig.element(i, g))
                    .collect()
            })
            .collect();
        let mut free_images: Vec<Word> = (0..sig.free_rank()).map(|j| sig.letter(j)).collect();
        let single = |s: Syllable| sig.normalize_unchecked([s]);
        match self {
            ElementaryMove::FactorAutomorphism { factor, hom } => {
                factor_images[*factor] = hom
                    .generator_images()
                    .into_iter()
                    .map(|e| sig.element(*factor, e))
                    .collect();
            }
            ElementaryMove::ConjugateFactor { factor, by } => {
                let c = single(*by);
                for w in factor_images[*factor].iter_mut() {
                    *w = sig.conjugate(w, &c);
                }
            }
            ElementaryMove::ConjugateLetter { letter, by } => {
                free_images[*letter] = sig.conjugate(&free_images[*letter], &single(*by));
            }
            ElementaryMove::SwapFactors { first, second } => {
                let (a, b) = (*first, *second);
                let ga: Vec<u32> = sig.factor(a).generators().to_vec();
                let gb: Vec<u32> = sig.factor(b).generators().to_vec();
                factor_images[a] = gb.iter().map(|&e| sig.element(b, e)).collect();
                factor_images[b] = ga.iter().map(|&e| sig.element(a, e)).collect();
            }
            ElementaryMove::InvertLetter { letter } => {
                free_images[*letter] = sig.invert(&sig.letter(*letter));
            }
            ElementaryMove::Transvection { letter, other, sign } => {
                free_images[*letter] =
                    sig.normalize_unchecked([Syllable::free(*letter, 1), Syllable::free(*other, *sign)]);
            }
            ElementaryMove::Inner { by } => return Endomorphism::inner(sig, &single(*by)),
        }
        Endomorphism::build(sig, factor_images, free_images).expect("elementary moves are homomorphisms")
    }

    fn inverse(&self, sig: &Signature) -> ElementaryMove {
        match self {
            ElementaryMove::FactorAutomorphism { factor, hom } => ElementaryMove::FactorAutomorphism {
                factor: *factor,
                hom: hom.inverse().expect("automorphism"),
            },
            ElementaryMove::ConjugateFactor { factor, by } => ElementaryMove::ConjugateFactor {
                factor: *factor,
                by: sig.invert_syllable(*by),
            },
            ElementaryMove::ConjugateLetter { letter, by } => ElementaryMove::ConjugateLetter {
                letter: *letter,
                by: sig.invert_syllable(*by),
            },
            ElementaryMove::Transvection { letter, other, sign } => ElementaryMove::Transvection {
                letter: *letter,
                other: *other,
                sign: -sign,
            },
            ElementaryMove::Inner { by } => ElementaryMove::Inner {
                by: sig.invert_syllable(*by),
            },
            m @ (ElementaryMove::SwapFactors { .. } | ElementaryMove::InvertLetter { .. }) => m.clone(),
        }
    }
}

/// A random automorphism with the moves it was built from and its inverse.
#[derive(Clone, Debug)]
pub struct RandomAutomorphism {
    pub automorphism: Endomorphism,
    pub inverse: Endomorphism,
    /// Applied first to last.
    pub moves: Vec<ElementaryMove>,
}

/// Applies `moves` in order: the result is `m_k ∘ ... ∘ m_1`.
pub fn compose_moves(sig: &Signature, moves: &[ElementaryMove]) -> RandomAutomorphism {
    let mut forward = Endomorphism::identity(sig);
    let mut inverse = Endomorphism::identity(sig);
    for m in moves {
        forward = m.build(sig).compose(&forward).expect("same signature");
        inverse = inverse
            .compose(&m.inverse(sig).build(sig))
            .expect("same signature");
    }
    RandomAutomorphism {
        automorphism: forward,
        inverse,
        moves: moves.to_vec(),
    }
}

fn random_move<R: Rng>(sig: &Signature, rng: &mut R, auts: &[Vec<FactorHom>]) -> Option<ElementaryMove> {
    let (n, r) = (sig.num_factors(), sig.free_rank());
    let all = slots(sig);
    let other_syllable = |rng: &mut R, avoid: Slot| {
        let choices: Vec<Slot> = all.iter().copied().filter(|&s| s != avoid).collect();
        choices
            .choose(rng)
            .map(|&s| random_syllable(sig, rng, s, 1))
    };
    match rng.gen_range(0..7) {
        0 if n > 0 => {
            let factor = rng.gen_range(0..n);
            let hom = auts[factor].choose(rng)?.clone();
            Some(ElementaryMove::FactorAutomorphism { factor, hom })
        }
        1 if n > 0 => {
            let factor = rng.gen_range(0..n);
            let by = other_syllable(rng, Slot::Factor(factor as u32))?;
            Some(ElementaryMove::ConjugateFactor { factor, by })
        }
        2 if r > 0 => {
            let letter = rng.gen_range(0..r);
            let by = other_syllable(rng, Slot::Free(letter as u32))?;
            Some(ElementaryMove::ConjugateLetter { letter, by })
        }
        3 => {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .filter(|&(a, b)| sig.factor(a).same_structure(sig.factor(b)))
                .collect();
            let &(first, second) = pairs.choose(rng)?;
            Some(ElementaryMove::SwapFactors { first, second })
        }
        4 if r > 0 => Some(ElementaryMove::InvertLetter {
            letter: rng.gen_range(0..r),
        }),
        5 if r > 1 => {
            let letter = rng.gen_range(0..r);
            let mut other = rng.gen_range(0..r - 1);
            if other >= letter {
                other += 1;
            }
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            Some(ElementaryMove::Transvection { letter, other, sign })
        }
        6 => {
            let &slot = all.choose(rng)?;
            Some(ElementaryMove::Inner {
                by: random_syllable(sig, rng, slot, 1),
            })
        }
        _ => None,
    }
}

/// Random product of up to `params.max_moves` elementary automorphisms.
pub fn random_symmetric_automorphism(sig: &Signature, seed: u64, params: &RandomParams) -> RandomAutomorphism {
    let mut rng = rng_from_seed(seed);
    let auts: Vec<Vec<FactorHom>> = sig
        .factors()
        .iter()
        .map(|g: &Arc<_>| {
            enumerate_homs(g, g, DEFAULT_HOM_PRODUCT_CAP)
                .expect("catalog-sized factors")
                .into_iter()
                .filter(FactorHom::is_bijective)
                .collect()
        })
        .collect();
    let count = rng.gen_range(0..=params.max_moves);
    let mut moves = Vec::with_capacity(count);
    while moves.len() < count {
        if let Some(m) = random_move(sig, &mut rng, &auts) {
            moves.push(m);
        }
    }
    compose_moves(sig, &moves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn derived_seeds_differ_by_index() {
        let a = derive_seed(42, 0, 0);
        let b = derive_seed(42, 0, 1);
        let c = derive_seed(42, 1, 0);
        assert!(a != b && a != c && b != c);
        assert_eq!(a, derive_seed(42, 0, 0));
    }

    #[test]
    fn random_endomorphisms_are_symmetric_and_reproducible() {
        for (_, sig) in catalog::all() {
            for seed in 0..20 {
                let phi = random_symmetric_endomorphism(&sig, seed, &RandomParams::default());
                assert!(phi.symmetry_check().symmetric);
                assert_eq!(phi, random_symmetric_endomorphism(&sig, seed, &RandomParams::default()));
            }
        }
    }

    #[test]
    fn zero_length_params_give_factorwise_maps() {
        let sig = catalog::by_name("z2z2z2").unwrap();
        let params = RandomParams {
            max_conjugator_len: 0,
            max_image_len: 0,
            ..RandomParams::default()
        };
        for seed in 0..10 {
            let phi = random_symmetric_endomorphism(&sig, seed, &params);
            for imgs in phi.factor_images() {
                assert!(imgs.iter().all(|w| w.len() <= 1));
            }
        }
        let free = Signature::new(vec![], 2).unwrap();
        let phi = random_symmetric_endomorphism(&free, 7, &RandomParams::default());
        assert_eq!(phi.free_images().len(), 2);
    }

    #[test]
    fn empty_composition_is_identity() {
        let sig = catalog::by_name("z2z3f1").unwrap();
        let aut = compose_moves(&sig, &[]);
        assert_eq!(aut.automorphism, Endomorphism::identity(&sig));
    }

    #[test]
    fn single_partial_conjugation() {
        let sig = catalog::by_name("z2z2").unwrap();
        let aut = compose_moves(
            &sig,
            &[ElementaryMove::ConjugateFactor {
                factor: 1,
                by: Syllable::factor(0, 1),
            }],
        );
        assert_eq!(
            aut.automorphism.factor_images()[1][0],
            sig.parse_word("A[g0] B[g0] A[g0]").unwrap()
        );
        assert_eq!(aut.automorphism.factor_images()[0][0], sig.parse_word("A[g0]").unwrap());
    }

    #[test]
    fn recorded_inverse_undoes_automorphism() {
        for (_, sig) in catalog::all() {
            for seed in 0..25 {
                let aut = random_symmetric_automorphism(&sig, seed, &RandomParams::default());
                let id = aut.inverse.compose(&aut.automorphism).unwrap();
                assert_eq!(id, Endomorphism::identity(&sig), "seed {seed} {:?}", aut.moves);
                assert!(aut.automorphism.symmetry_check().symmetric);
            }
        }
    }
}
