//! Image chains, stable images, bounded fixed-subgroup search and
//! centralizers.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::folding::{KuroshDecomposition, SubgroupGraph, DEFAULT_MAX_VERTICES};
use crate::group::centralizer_in_factor;
use crate::morphism::Endomorphism;
use crate::word::{Signature, Slot, Syllable, Word};

pub const DEFAULT_MAX_K: usize = 50;
pub const DEFAULT_MAX_WEIGHT: usize = 1 << 15;
pub const DEFAULT_FIX_LEN: usize = 8;
pub const DEFAULT_FIX_EXP: i64 = 4;
pub const DEFAULT_HALF_WORD_CAP: usize = 1 << 21;

/// Bounds for [`image_chain`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainParams {
    pub max_k: usize,
    /// Largest total syllable weight of one level's generators.
    pub max_weight: usize,
    pub max_vertices: usize,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            max_k: DEFAULT_MAX_K,
            max_weight: DEFAULT_MAX_WEIGHT,
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }
}

impl ChainParams {
    pub fn with_max_k(max_k: usize) -> Self {
        ChainParams {
            max_k,
            ..Self::default()
        }
    }
}

/// One subgroup `S_k = φ^k(G)` of the chain.
#[derive(Clone, Debug)]
pub struct ChainLevel {
    pub k: usize,
    /// Generators of `S_k`: images of a basis of `S_{k-1}`.
    pub generators: Vec<Word>,
    pub graph: SubgroupGraph,
    pub decomposition: KuroshDecomposition,
    /// Every Kurosh instance of `S_k` maps into a conjugate of a factor.
    pub symmetric: bool,
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    pub levels: Vec<ChainLevel>,
    pub stabilized_at: Option<usize>,
    pub cutoff: usize,
    /// Level whose generators exceeded the weight budget; the chain stops
    /// there.
    pub truncated_at: Option<usize>,
    pub monotonic_total: bool,
    pub monotonic_free: bool,
}

impl ChainReport {
    pub fn ranks(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.decomposition.kurosh_rank()).collect()
    }

    pub fn free_ranks(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.decomposition.free_rank).collect()
    }

    pub fn all_symmetric(&self) -> bool {
        self.levels.iter().all(|l| l.symmetric)
    }

    /// The stabilized subgroup, when there is one.
    pub fn stable(&self) -> Option<&SubgroupGraph> {
        self.stabilized_at.map(|k| &self.levels[k].graph)
    }
}

fn level(phi: &Endomorphism, k: usize, generators: Vec<Word>, graph: SubgroupGraph) -> Result<ChainLevel> {
    let decomposition = graph.kurosh_decomposition()?;
    let sig = phi.signature();
    let mut symmetric = true;
    for inst in &decomposition.instances {
        let images: Vec<Word> = inst.generators.iter().map(|w| phi.apply(w)).collect();
        let img = SubgroupGraph::from_generators(sig, &images)?.kurosh_decomposition()?;
        if img.free_rank > 0 || img.instances.len() > 1 {
            symmetric = false;
            break;
        }
    }
    Ok(ChainLevel {
        k,
        generators,
        graph,
        decomposition,
        symmetric,
    })
}

/// `S_0 = G`, `S_{k+1} = φ(S_k)`, each folded and ranked, until
/// `S_k = S_{k+1}` or the cutoff.
pub fn image_chain(phi: &Endomorphism, params: &ChainParams) -> Result<ChainReport> {
    let sig = phi.signature();
    let gens = sig.ambient_generators();
    let graph = SubgroupGraph::from_generators_capped(sig, &gens, params.max_vertices)?;
    let mut levels = vec![level(phi, 0, gens, graph)?];
    let mut stabilized_at = None;
    let mut truncated_at = None;
    for k in 0..params.max_k {
        let prev = &levels[k];
        let images: Vec<Word> = prev.graph.basis()?.iter().map(|w| phi.apply(w)).collect();
        if images.iter().map(Word::weight).sum::<usize>() > params.max_weight {
            truncated_at = Some(k + 1);
            break;
        }
        let graph = SubgroupGraph::from_generators_capped(sig, &images, params.max_vertices)?;
        let equal = prev.graph.subgroup_equals(&graph)?;
        levels.push(level(phi, k + 1, images, graph)?);
        if equal {
            stabilized_at = Some(k);
            break;
        }
    }
    let pairs = || levels.windows(2).map(|w| (&w[0].decomposition, &w[1].decomposition));
    let monotonic_total = pairs().all(|(a, b)| b.kurosh_rank() <= a.kurosh_rank());
    let monotonic_free = pairs().all(|(a, b)| b.free_rank <= a.free_rank);
    Ok(ChainReport {
        levels,
        stabilized_at,
        cutoff: params.max_k,
        truncated_at,
        monotonic_total,
        monotonic_free,
    })
}

#[derive(Clone, Debug)]
pub enum StableImage {
    Stabilized { k: usize, graph: SubgroupGraph },
    NotStabilized(ChainReport),
}

/// `φ^∞(G)` when the chain stabilizes within the cutoff.
pub fn stable_image(phi: &Endomorphism, params: &ChainParams) -> Result<StableImage> {
    let report = image_chain(phi, params)?;
    Ok(match report.stabilized_at {
        Some(k) => StableImage::Stabilized {
            k,
            graph: report.levels[k].graph.clone(),
        },
        None => StableImage::NotStabilized(report),
    })
}

/// Whether `φ` maps `stable` onto itself.
pub fn verify_stable_automorphism(phi: &Endomorphism, stable: &SubgroupGraph) -> Result<bool> {
    if !stable.is_folded() {
        return Err(Error::NotFolded);
    }
    let images: Vec<Word> = stable.basis()?.iter().map(|w| phi.apply(w)).collect();
    SubgroupGraph::from_generators(phi.signature(), &images)?.subgroup_equals(stable)
}

/// Injectivity on the stable image follows from the Hopf property when every
/// factor is finite.
pub fn hopf_annotation(sig: &Signature) -> Option<&'static str> {
    (sig.free_rank() == 0).then_some("injective by Hopf property (finitely generated residually finite)")
}

/// `C_G(g)` as a folded subgroup graph.
pub fn centralizer(sig: &Signature, g: &Word) -> Result<SubgroupGraph> {
    if g.is_identity() {
        return Ok(SubgroupGraph::whole_group(sig));
    }
    let gens = match sig.conjugates_into_factor(g) {
        Some((i, e, c)) => centralizer_in_factor(sig.factor(i), e)
            .into_iter()
            .filter(|&k| k != 0)
            .map(|k| sig.conjugate(&sig.element(i, k), &c))
            .collect(),
        None => vec![sig.hyperbolic_root(g)?.0],
    };
    SubgroupGraph::from_generators(sig, &gens)
}

fn all_slots(sig: &Signature) -> Vec<Slot> {
    (0..sig.num_factors() as u32)
        .map(Slot::Factor)
        .chain((0..sig.free_rank() as u32).map(Slot::Free))
        .collect()
}

fn slot_syllables(sig: &Signature, slot: Slot, max_exp: i64) -> Vec<Syllable> {
    match slot {
        Slot::Factor(i) => (1..sig.factor(i as usize).order() as u32)
            .map(|e| Syllable::factor(i as usize, e))
            .collect(),
        Slot::Free(j) => (1..=max_exp)
            .flat_map(|k| [-k, k])
            .map(|k| Syllable::free(j as usize, k))
            .collect(),
    }
}

/// All normal-form words with at most `max_len` syllables and free exponents
/// bounded by `max_exp`, shortest first.
pub fn words_up_to(sig: &Signature, max_len: usize, max_exp: i64, cap: usize) -> Result<Vec<Word>> {
    let by_slot: Vec<(Slot, Vec<Syllable>)> = all_slots(sig)
        .into_iter()
        .map(|s| (s, slot_syllables(sig, s, max_exp)))
        .collect();
    let mut out = vec![Word::identity()];
    let mut frontier = 0;
    for _ in 0..max_len {
        let end = out.len();
        for idx in frontier..end {
            let last = out[idx].last_slot();
            for (slot, syls) in &by_slot {
                if Some(*slot) == last {
                    continue;
                }
                for &s in syls {
                    if out.len() >= cap {
                        return Err(Error::CapExceeded {
                            what: "enumerated words",
                            limit: cap,
                        });
                    }
                    let mut v = out[idx].syllables().to_vec();
                    v.push(s);
                    out.push(sig.normalize_unchecked(v));
                }
            }
        }
        frontier = end;
    }
    Ok(out)
}

#[derive(Default)]
struct Buckets {
    by_slot: BTreeMap<Option<Slot>, Vec<usize>>,
}

impl Buckets {
    fn push(&mut self, slot: Option<Slot>, idx: usize) {
        self.by_slot.entry(slot).or_default().push(idx);
    }

    /// Removes every entry compatible with `slot`.
    fn drain_compatible(&mut self, slot: Option<Slot>) -> Vec<usize> {
        let mut out = Vec::new();
        for (&s, items) in self.by_slot.iter_mut() {
            if slot.is_none() || s.is_none() || s != slot {
                out.append(items);
            }
        }
        out
    }
}

/// Generators of the subgroup spanned by the fixed words `u v` in one key
/// class, taken along a spanning forest of the compatibility graph.
fn forest_words(prefixes: &[&Word], suffixes: &[&Word], out: &mut Vec<Word>) {
    let mut u_left = Buckets::default();
    let mut v_left = Buckets::default();
    for (i, u) in prefixes.iter().enumerate() {
        u_left.push(u.last_slot(), i);
    }
    for (i, v) in suffixes.iter().enumerate() {
        v_left.push(v.first_slot(), i);
    }
    let mut u_seen = vec![false; prefixes.len()];
    for start in 0..prefixes.len() {
        if u_seen[start] {
            continue;
        }
        u_left.by_slot.get_mut(&prefixes[start].last_slot()).unwrap().retain(|&i| i != start);
        u_seen[start] = true;
        // alternate u -> v -> u layers
        let mut us = vec![start];
        while !us.is_empty() {
            let mut vs = Vec::new();
            for &u in &us {
                for v in v_left.drain_compatible(prefixes[u].last_slot()) {
                    out.push(prefixes[u].concat_reduced(suffixes[v]));
                    vs.push(v);
                }
            }
            us.clear();
            for &v in &vs {
                for u in u_left.drain_compatible(suffixes[v].first_slot()) {
                    u_seen[u] = true;
                    out.push(prefixes[u].concat_reduced(suffixes[v]));
                    us.push(u);
                }
            }
        }
    }
}

/// Candidate fixed words of length at most `max_len` whose subgroup is
/// generated by all fixed words in that ball.
fn fixed_candidates(phi: &Endomorphism, max_len: usize, max_exp: i64, cap: usize) -> Result<Vec<Word>> {
    let sig = phi.signature();
    let halves = words_up_to(sig, max_len.div_ceil(2), max_exp, cap)?;
    let suffix_len = max_len / 2;
    let mut classes: HashMap<Word, (Vec<&Word>, Vec<&Word>)> = HashMap::new();
    for w in &halves {
        let image = phi.apply(w);
        classes
            .entry(sig.multiply(&sig.invert(w), &image))
            .or_default()
            .0
            .push(w);
        if w.len() <= suffix_len {
            classes
                .entry(sig.multiply(w, &sig.invert(&image)))
                .or_default()
                .1
                .push(w);
        }
    }
    let mut keys: Vec<&Word> = classes.keys().collect();
    keys.sort_by(|a, b| a.shortlex_cmp(b));
    let mut out = Vec::new();
    for key in keys {
        let (us, vs) = &classes[key];
        if !us.is_empty() && !vs.is_empty() {
            forest_words(us, vs, &mut out);
        }
    }
    out.retain(|w| !w.is_identity());
    out.sort_by(|a, b| a.shortlex_cmp(b));
    out.dedup();
    Ok(out)
}

/// Fixed words up to `max_len` syllables and exponent `max_exp`, in shortlex
/// order, each outside the subgroup generated by the ones before it.
pub fn fixed_words_up_to(phi: &Endomorphism, max_len: usize, max_exp: i64) -> Result<Vec<Word>> {
    fixed_words_capped(phi, max_len, max_exp, DEFAULT_HALF_WORD_CAP)
}

pub fn fixed_words_capped(phi: &Endomorphism, max_len: usize, max_exp: i64, cap: usize) -> Result<Vec<Word>> {
    let sig = phi.signature();
    let mut found: Vec<Word> = Vec::new();
    let mut graph = SubgroupGraph::from_generators(sig, &[])?;
    for w in fixed_candidates(phi, max_len, max_exp, cap)? {
        if !graph.contains(&w)? {
            found.push(w);
            graph = SubgroupGraph::from_generators(sig, &found)?;
        }
    }
    Ok(found)
}

#[derive(Clone, Debug)]
pub struct FixReport {
    pub max_len: usize,
    pub max_exp: i64,
    pub generators: Vec<Word>,
    pub graph: SubgroupGraph,
    pub decomposition: KuroshDecomposition,
    pub bound: usize,
    pub within_bound: bool,
    /// Same subgroup at `max_len` and `max_len - 2`.
    pub search_stabilized: bool,
    /// Equality with the centralizer of the conjugating word, for inner maps.
    pub oracle_comparison: Option<bool>,
}

impl FixReport {
    pub fn needs_inspection(&self) -> bool {
        !self.within_bound
    }
}

pub fn fix_report(phi: &Endomorphism, max_len: usize, max_exp: i64) -> Result<FixReport> {
    let sig = phi.signature();
    let generators = fixed_words_up_to(phi, max_len, max_exp)?;
    let graph = SubgroupGraph::from_generators(sig, &generators)?;
    let decomposition = graph.kurosh_decomposition()?;
    let shorter = fixed_words_up_to(phi, max_len.saturating_sub(2), max_exp)?;
    let search_stabilized = SubgroupGraph::from_generators(sig, &shorter)?.subgroup_equals(&graph)?;
    let oracle_comparison = match phi.inner_conjugator() {
        Some(w) => Some(centralizer(sig, w)?.subgroup_equals(&graph)?),
        None => None,
    };
    let bound = sig.kurosh_rank();
    Ok(FixReport {
        max_len,
        max_exp,
        within_bound: decomposition.kurosh_rank() <= bound,
        generators,
        graph,
        decomposition,
        bound,
        search_stabilized,
        oracle_comparison,
    })
}
