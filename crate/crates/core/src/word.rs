//! Normal forms in `G = G_1 * ... * G_n * F(x_1..x_r)`.
//!
//! A [`Word`] is a reduced alternating sequence of syllables: adjacent
//! syllables never share a slot, factor syllables are never the identity and
//! free exponents are never zero. Free letters are stored exponent-collapsed,
//! so `x1^3` is a single syllable.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// One syllable of a normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Syllable {
    /// Non-identity element `elem` of factor `factor`.
    Factor { factor: u32, elem: u32 },
    /// `x_{letter+1}^exp`, `exp != 0`.
    Free { letter: u32, exp: i64 },
}

/// The free factor a syllable lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Factor(u32),
    Free(u32),
}

impl Syllable {
    pub fn factor(factor: usize, elem: u32) -> Self {
        Syllable::Factor {
            factor: factor as u32,
            elem,
        }
    }

    pub fn free(letter: usize, exp: i64) -> Self {
        Syllable::Free {
            letter: letter as u32,
            exp,
        }
    }

    pub fn slot(&self) -> Slot {
        match *self {
            Syllable::Factor { factor, .. } => Slot::Factor(factor),
            Syllable::Free { letter, .. } => Slot::Free(letter),
        }
    }

    fn is_trivial(&self) -> bool {
        matches!(
            self,
            Syllable::Factor { elem: 0, .. } | Syllable::Free { exp: 0, .. }
        )
    }

    /// Number of unit steps this syllable takes in a subgroup graph.
    pub fn weight(&self) -> usize {
        match *self {
            Syllable::Factor { .. } => 1,
            Syllable::Free { exp, .. } => exp.unsigned_abs() as usize,
        }
    }
}

/// An element of the free product in normal form. The empty word is the
/// identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Syllable>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of syllable weights; the number of edges the word traces.
    pub fn weight(&self) -> usize {
        self.0.iter().map(Syllable::weight).sum()
    }

    pub fn first_slot(&self) -> Option<Slot> {
        self.0.first().map(Syllable::slot)
    }

    pub fn last_slot(&self) -> Option<Slot> {
        self.0.last().map(Syllable::slot)
    }

    /// Shortlex order key: syllable count first, then syllables.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }

    /// Concatenation of two words known to meet at distinct slots.
    pub(crate) fn concat_reduced(&self, other: &Word) -> Word {
        debug_assert!(
            self.last_slot().is_none()
                || other.first_slot().is_none()
                || self.last_slot() != other.first_slot()
        );
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

struct SigInner {
    factors: Vec<Arc<FiniteGroup>>,
    free_rank: usize,
}

/// The ambient free product: ordered finite factors plus a free rank.
#[derive(Clone)]
pub struct Signature(Arc<SigInner>);

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.free_rank == other.0.free_rank
                && self.0.factors.len() == other.0.factors.len()
                && self
                    .0
                    .factors
                    .iter()
                    .zip(&other.0.factors)
                    .all(|(a, b)| a.name() == b.name() && a.same_structure(b)))
    }
}

impl Eq for Signature {}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({})", self)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .factors()
            .iter()
            .map(|g| format!("{}(order {})", g.name(), g.order()))
            .collect();
        if self.free_rank() > 0 {
            parts.push(format!("F{}", self.free_rank()));
        }
        write!(f, "{}", parts.join(" * "))
    }
}

pub(crate) fn valid_factor_name(name: &str) -> bool {
    let mut chars = name.chars();
    let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
    let looks_free =
        name.len() > 1 && name.starts_with('x') && name[1..].chars().all(|c| c.is_ascii_digit());
    head_ok && chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !looks_free
}

impl Signature {
    pub fn new(factors: Vec<FiniteGroup>, free_rank: usize) -> Result<Self> {
        if factors.is_empty() && free_rank == 0 {
            return Err(Error::InvalidSignature(
                "need at least one factor or free letter".into(),
            ));
        }
        for (i, g) in factors.iter().enumerate() {
            if !valid_factor_name(g.name()) {
                return Err(Error::InvalidSignature(format!(
                    "bad factor name `{}`",
                    g.name()
                )));
            }
            if factors[..i].iter().any(|h| h.name() == g.name()) {
                return Err(Error::InvalidSignature(format!(
                    "duplicate factor name `{}`",
                    g.name()
                )));
            }
            if g.order() < 2 {
                return Err(Error::InvalidSignature(format!(
                    "factor `{}` is trivial",
                    g.name()
                )));
            }
        }
        Ok(Signature(Arc::new(SigInner {
            factors: factors.into_iter().map(Arc::new).collect(),
            free_rank,
        })))
    }

    pub fn factors(&self) -> &[Arc<FiniteGroup>] {
        &self.0.factors
    }

    pub fn factor(&self, i: usize) -> &FiniteGroup {
        &self.0.factors[i]
    }

    pub fn num_factors(&self) -> usize {
        self.0.factors.len()
    }

    pub fn free_rank(&self) -> usize {
        self.0.free_rank
    }

    /// `n + r`, the Kurosh rank of the whole group.
    pub fn kurosh_rank(&self) -> usize {
        self.num_factors() + self.free_rank()
    }

    pub fn factor_index(&self, name: &str) -> Option<usize> {
        self.factors().iter().position(|g| g.name() == name)
    }

    /// Every factor generator followed by every free letter, as words.
    pub fn ambient_generators(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for (i, g) in self.factors().iter().enumerate() {
            for &e in g.generators() {
                if e != 0 {
                    out.push(Word(vec![Syllable::factor(i, e)]));
                }
            }
        }
        for j in 0..self.free_rank() {
            out.push(Word(vec![Syllable::free(j, 1)]));
        }
        out
    }

    pub fn letter(&self, j: usize) -> Word {
        Word(vec![Syllable::free(j, 1)])
    }

    /// The single-syllable word for a factor element (identity gives ε).
    pub fn element(&self, factor: usize, elem: u32) -> Word {
        if elem == 0 {
            Word::identity()
        } else {
            Word(vec![Syllable::factor(factor, elem)])
        }
    }

    fn check_syllable(&self, s: &Syllable) -> Result<()> {
        match *s {
            Syllable::Factor { factor, elem } => {
                let g = self.factors().get(factor as usize).ok_or_else(|| {
                    Error::IndexOutOfRange(format!("factor {factor}"))
                })?;
                if !g.contains(elem) {
                    return Err(Error::IndexOutOfRange(format!(
                        "element {elem} of factor {}",
                        g.name()
                    )));
                }
            }
            Syllable::Free { letter, .. } => {
                if letter as usize >= self.free_rank() {
                    return Err(Error::IndexOutOfRange(format!("free letter x{}", letter + 1)));
                }
            }
        }
        Ok(())
    }

    /// Checks that every syllable of `w` is in range for this signature.
    pub fn check_word(&self, w: &Word) -> Result<()> {
        w.0.iter().try_for_each(|s| self.check_syllable(s))
    }

    // Merges two same-slot syllables.
    fn combine(&self, a: Syllable, b: Syllable) -> Syllable {
        match (a, b) {
            (Syllable::Factor { factor, elem: x }, Syllable::Factor { elem: y, .. }) => {
                Syllable::Factor {
                    factor,
                    elem: self.factor(factor as usize).mul(x, y),
                }
            }
            (Syllable::Free { letter, exp: x }, Syllable::Free { exp: y, .. }) => Syllable::Free {
                letter,
                exp: x + y,
            },
            _ => unreachable!("combine called on distinct slots"),
        }
    }

    fn push_reduced(&self, stack: &mut Vec<Syllable>, s: Syllable) {
        if s.is_trivial() {
            return;
        }
        match stack.last() {
            Some(top) if top.slot() == s.slot() => {
                let merged = self.combine(*top, s);
                stack.pop();
                if !merged.is_trivial() {
                    stack.push(merged);
                }
            }
            _ => stack.push(s),
        }
    }

    /// Reduces an arbitrary syllable sequence to normal form.
    pub fn normalize(&self, raw: &[Syllable]) -> Result<Word> {
        raw.iter().try_for_each(|s| self.check_syllable(s))?;
        Ok(self.normalize_unchecked(raw.iter().copied()))
    }

    pub(crate) fn normalize_unchecked(&self, raw: impl IntoIterator<Item = Syllable>) -> Word {
        let mut stack = Vec::new();
        for s in raw {
            self.push_reduced(&mut stack, s);
        }
        Word(stack)
    }

    pub fn invert_syllable(&self, s: Syllable) -> Syllable {
        match s {
            Syllable::Factor { factor, elem } => Syllable::Factor {
                factor,
                elem: self.factor(factor as usize).inv(elem),
            },
            Syllable::Free { letter, exp } => Syllable::Free { letter, exp: -exp },
        }
    }

    pub fn multiply(&self, u: &Word, v: &Word) -> Word {
        let mut stack = u.0.clone();
        for &s in &v.0 {
            self.push_reduced(&mut stack, s);
        }
        Word(stack)
    }

    /// Product of a sequence of words.
    pub fn product<'a>(&self, words: impl IntoIterator<Item = &'a Word>) -> Word {
        let mut stack = Vec::new();
        for w in words {
            for &s in &w.0 {
                self.push_reduced(&mut stack, s);
            }
        }
        Word(stack)
    }

    pub fn invert(&self, w: &Word) -> Word {
        Word(w.0.iter().rev().map(|&s| self.invert_syllable(s)).collect())
    }

    /// `c * w * c^-1`.
    pub fn conjugate(&self, w: &Word, c: &Word) -> Word {
        self.product([c, w, &self.invert(c)])
    }

    /// `w^k` for any integer `k`.
    pub fn power(&self, w: &Word, k: i64) -> Word {
        let base = if k < 0 { self.invert(w) } else { w.clone() };
        let mut acc = Word::identity();
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.multiply(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.multiply(&sq, &sq);
            }
        }
        acc
    }

    /// Splits `w = conjugator * core * conjugator^-1` with `core` cyclically
    /// reduced.
    pub fn cyclically_reduce(&self, w: &Word) -> (Word, Word) {
        let s = &w.0;
        let (mut i, mut j) = (0usize, s.len());
        let mut conj = Vec::new();
        while j > i + 1 && s[i].slot() == s[j - 1].slot() {
            let wrap = self.combine(s[j - 1], s[i]);
            conj.push(s[i]);
            if wrap.is_trivial() {
                i += 1;
                j -= 1;
            } else {
                let mut core = s[i + 1..j - 1].to_vec();
                core.push(wrap);
                return (Word(core), Word(conj));
            }
        }
        (Word(s[i..j].to_vec()), Word(conj))
    }

    /// For a nontrivial elliptic `w`, the witness `(i, e, c)` with
    /// `w = c e c^-1`, `e` in factor `i`, and `c` shortest.
    pub fn conjugates_into_factor(&self, w: &Word) -> Option<(usize, u32, Word)> {
        let (core, conj) = self.cyclically_reduce(w);
        match core.0.as_slice() {
            [Syllable::Factor { factor, elem }] => Some((*factor as usize, *elem, conj)),
            _ => None,
        }
    }

    pub fn is_elliptic(&self, w: &Word) -> bool {
        w.is_identity() || self.conjugates_into_factor(w).is_some()
    }

    /// Maximal root: `w = root^exponent` with `exponent` as large as possible.
    pub fn hyperbolic_root(&self, w: &Word) -> Result<(Word, u64)> {
        let (core, conj) = self.cyclically_reduce(w);
        let (root_core, exponent) = match core.0.as_slice() {
            [] | [Syllable::Factor { .. }] => return Err(Error::NotHyperbolic),
            [Syllable::Free { letter, exp }] => (
                Word(vec![Syllable::Free {
                    letter: *letter,
                    exp: exp.signum(),
                }]),
                exp.unsigned_abs(),
            ),
            syl => {
                let len = syl.len();
                let period = (1..=len)
                    .find(|&p| len % p == 0 && (p..len).all(|k| syl[k] == syl[k - p]))
                    .unwrap_or(len);
                (Word(syl[..period].to_vec()), (len / period) as u64)
            }
        };
        Ok((self.conjugate(&root_core, &conj), exponent))
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        crate::grammar::parse_word(self, text)
    }

    pub fn format_word(&self, w: &Word) -> String {
        crate::grammar::format_word(self, w)
    }
}
