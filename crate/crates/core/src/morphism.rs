//! Endomorphisms of a free product given by generator images.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::group::{hom_from_generator_images, FactorHom};
use crate::word::{Signature, Syllable, Word};

/// An endomorphism `φ: G -> G`.
///
/// The factor images are extended to every factor element at build time; that
/// table doubles as the witness that all factor relations are respected.
#[derive(Clone, Debug)]
pub struct Endomorphism {
    sig: Signature,
    factor_images: Vec<Vec<Word>>,
    free_images: Vec<Word>,
    element_images: Vec<Vec<Word>>,
    inner: Option<Word>,
}

impl PartialEq for Endomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.sig == other.sig
            && self.element_images == other.element_images
            && self.free_images == other.free_images
    }
}

impl Eq for Endomorphism {}

impl Endomorphism {
    /// Builds `φ` from images of every factor generator and every free letter.
    pub fn build(
        sig: &Signature,
        factor_gen_images: Vec<Vec<Word>>,
        free_images: Vec<Word>,
    ) -> Result<Self> {
        if factor_gen_images.len() != sig.num_factors() || free_images.len() != sig.free_rank() {
            return Err(Error::SignatureMismatch);
        }
        for (i, imgs) in factor_gen_images.iter().enumerate() {
            if imgs.len() != sig.factor(i).generators().len() {
                return Err(Error::SignatureMismatch);
            }
        }
        for w in factor_gen_images.iter().flatten().chain(&free_images) {
            sig.check_word(w).map_err(|_| Error::SignatureMismatch)?;
        }
        let mut element_images = Vec::with_capacity(sig.num_factors());
        for (i, imgs) in factor_gen_images.iter().enumerate() {
            let g = sig.factor(i);
            let mut table: Vec<Option<Word>> = vec![None; g.order()];
            table[0] = Some(Word::identity());
            let mut queue = VecDeque::from([0u32]);
            while let Some(x) = queue.pop_front() {
                let fx = table[x as usize].clone().unwrap();
                for (&gen, img) in g.generators().iter().zip(imgs) {
                    let y = g.mul(x, gen);
                    let fy = sig.multiply(&fx, img);
                    match &table[y as usize] {
                        None => {
                            table[y as usize] = Some(fy);
                            queue.push_back(y);
                        }
                        Some(prev) if *prev != fy => {
                            return Err(Error::Inconsistent(format!(
                                "factor {} element {y}: {} vs {}",
                                g.name(),
                                sig.format_word(prev),
                                sig.format_word(&fy)
                            )));
                        }
                        Some(_) => {}
                    }
                }
            }
            element_images.push(table.into_iter().map(Option::unwrap).collect());
        }
        Ok(Endomorphism {
            sig: sig.clone(),
            factor_images: factor_gen_images,
            free_images,
            element_images,
            inner: None,
        })
    }

    pub fn identity(sig: &Signature) -> Self {
        Self::inner(sig, &Word::identity())
    }

    /// Conjugation `g -> w g w^-1`.
    pub fn inner(sig: &Signature, w: &Word) -> Self {
        let factor_images = (0..sig.num_factors())
            .map(|i| {
                sig.factor(i)
                    .generators()
                    .iter()
                    .map(|&g| sig.conjugate(&sig.element(i, g), w))
                    .collect()
            })
            .collect();
        let free_images = (0..sig.free_rank())
            .map(|j| sig.conjugate(&sig.letter(j), w))
            .collect();
        let mut phi = Self::build(sig, factor_images, free_images).expect("inner maps are homomorphisms");
        phi.inner = Some(w.clone());
        phi
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn factor_images(&self) -> &[Vec<Word>] {
        &self.factor_images
    }

    pub fn free_images(&self) -> &[Word] {
        &self.free_images
    }

    /// Image of factor element `e` of factor `i`.
    pub fn element_image(&self, i: usize, e: u32) -> &Word {
        &self.element_images[i][e as usize]
    }

    /// The conjugating word when built by [`Endomorphism::inner`].
    pub fn inner_conjugator(&self) -> Option<&Word> {
        self.inner.as_ref()
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut parts: Vec<std::borrow::Cow<'_, Word>> = Vec::with_capacity(w.len());
        for s in w.syllables() {
            match *s {
                Syllable::Factor { factor, elem } => {
                    parts.push(std::borrow::Cow::Borrowed(self.element_image(factor as usize, elem)))
                }
                Syllable::Free { letter, exp } => parts.push(std::borrow::Cow::Owned(
                    self.sig.power(&self.free_images[letter as usize], exp),
                )),
            }
        }
        self.sig.product(parts.iter().map(|c| c.as_ref()))
    }

    /// Applies `φ`, checking the word's indices against the signature.
    pub fn apply_checked(&self, w: &Word) -> Result<Word> {
        self.sig.check_word(w).map_err(|_| Error::SignatureMismatch)?;
        Ok(self.apply(w))
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &Endomorphism) -> Result<Endomorphism> {
        if self.sig != inner.sig {
            return Err(Error::SignatureMismatch);
        }
        let factor_images = inner
            .factor_images
            .iter()
            .map(|imgs| imgs.iter().map(|w| self.apply(w)).collect())
            .collect();
        let free_images = inner.free_images.iter().map(|w| self.apply(w)).collect();
        let mut out = Self::build(&self.sig, factor_images, free_images)?;
        if let (Some(a), Some(b)) = (&self.inner, &inner.inner) {
            out.inner = Some(self.sig.multiply(a, b));
        }
        Ok(out)
    }

    /// `φ^k`, with `φ^0` the identity.
    pub fn power(&self, k: u32) -> Endomorphism {
        let mut acc = Self::identity(&self.sig);
        for _ in 0..k {
            acc = self.compose(&acc).expect("same signature");
        }
        acc
    }

    pub fn fixes(&self, w: &Word) -> bool {
        self.apply(w) == *w
    }

    /// Whether every factor is sent into a conjugate of some factor.
    pub fn symmetry_check(&self) -> SymmetryReport {
        let sig = &self.sig;
        let mut factors = Vec::with_capacity(sig.num_factors());
        for (i, imgs) in self.factor_images.iter().enumerate() {
            let Some(first) = imgs.iter().find(|w| !w.is_identity()) else {
                factors.push(FactorSymmetry::Trivial);
                continue;
            };
            let Some((j, _, c)) = sig.conjugates_into_factor(first) else {
                factors.push(FactorSymmetry::NotSymmetric);
                continue;
            };
            let gj = sig.factor(j);
            let mut found = FactorSymmetry::NotSymmetric;
            'candidates: for h in 0..gj.order() as u32 {
                let conj = sig.multiply(&c, &sig.element(j, h));
                let conj_inv = sig.invert(&conj);
                let mut gen_images = Vec::with_capacity(imgs.len());
                for img in imgs {
                    let a = sig.product([&conj_inv, img, &conj]);
                    match a.syllables() {
                        [] => gen_images.push(0),
                        [Syllable::Factor { factor, elem }] if *factor as usize == j => {
                            gen_images.push(*elem)
                        }
                        _ => continue 'candidates,
                    }
                }
                if let Ok(hom) = hom_from_generator_images(
                    &sig.factors()[i],
                    &sig.factors()[j],
                    &gen_images,
                ) {
                    found = FactorSymmetry::Conjugate {
                        target: j,
                        conjugator: conj,
                        hom,
                    };
                    break;
                }
            }
            factors.push(found);
        }
        let symmetric = factors
            .iter()
            .all(|f| !matches!(f, FactorSymmetry::NotSymmetric));
        SymmetryReport { factors, symmetric }
    }

    /// Generators of `φ(G_i)`.
    pub fn factor_image_generators(&self, i: usize) -> Vec<Word> {
        self.factor_images[i].clone()
    }
}

/// How one factor sits under `φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorSymmetry {
    /// Every element maps to the identity.
    Trivial,
    /// `φ(e) = c · hom(e) · c^-1` with `hom: G_i -> G_target`.
    Conjugate {
        target: usize,
        conjugator: Word,
        hom: FactorHom,
    },
    NotSymmetric,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryReport {
    pub factors: Vec<FactorSymmetry>,
    pub symmetric: bool,
}

impl SymmetryReport {
    /// Indices of factors with trivial image (counted as symmetric).
    pub fn trivial_factors(&self) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, f)| matches!(f, FactorSymmetry::Trivial))
            .map(|(i, _)| i)
            .collect()
    }
}
