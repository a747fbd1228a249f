//! Seeded property checks over a catalog of signatures.
//!
//! Each iteration draws an independent sub-seed from the run seed and its
//! index, so iterations can run in any order (or in parallel) and still
//! produce the same report.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::analysis::{self, ChainParams};
use crate::error::Result;
use crate::folding::{ambient_euler_characteristic, SubgroupGraph};
use crate::morphism::{Endomorphism, FactorSymmetry};
use crate::random::{self, derive_seed, RandomParams};
use crate::word::{Signature, Word};

const STREAM_ENDO: u64 = 1;
const STREAM_AUTO: u64 = 2;
const STREAM_SPOT: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyParams {
    pub chain: ChainParams,
    pub random: RandomParams,
    pub fix_len: usize,
    pub fix_exp: i64,
    /// Every `inner_every`-th iteration uses an inner endomorphism (0: never).
    pub inner_every: usize,
    pub max_inner_len: usize,
    pub spot_checks: usize,
    pub parallel: bool,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            chain: ChainParams::with_max_k(20),
            random: RandomParams::default(),
            fix_len: 6,
            fix_exp: 3,
            inner_every: 4,
            max_inner_len: 5,
            spot_checks: 8,
            parallel: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Symmetry,
    MonotonicTotal,
    MonotonicFree,
    StableRank,
    StableOnto,
    FixGenerator,
    FixProduct,
    FixBound,
    Oracle,
    Onto,
    Euler,
    Error,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Symmetry => "symmetry",
            Check::MonotonicTotal => "monotonic_total",
            Check::MonotonicFree => "monotonic_free",
            Check::StableRank => "stable_rank",
            Check::StableOnto => "stable_onto",
            Check::FixGenerator => "fix_generator",
            Check::FixProduct => "fix_product",
            Check::FixBound => "fix_bound",
            Check::Oracle => "oracle",
            Check::Onto => "automorphism_onto",
            Check::Euler => "euler",
            Check::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub iteration: usize,
    pub signature: String,
    pub check: Check,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    Endomorphism,
    Inner,
}

impl MapKind {
    pub fn name(self) -> &'static str {
        match self {
            MapKind::Endomorphism => "endomorphism",
            MapKind::Inner => "inner",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationOutcome {
    pub iteration: usize,
    pub signature: String,
    pub seed: u64,
    pub kind: MapKind,
    pub ranks: Vec<usize>,
    pub free_ranks: Vec<usize>,
    pub stabilized_at: Option<usize>,
    pub truncated_at: Option<usize>,
    pub stable_rank: Option<usize>,
    pub fix_rank: Option<usize>,
    pub fix_generators: usize,
    pub search_stabilized: bool,
    pub oracle: Option<bool>,
    pub automorphism_moves: usize,
    pub complete_graphs: usize,
    pub violations: Vec<Finding>,
    pub inspections: Vec<Finding>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub seed: u64,
    pub outcomes: Vec<IterationOutcome>,
}

impl VerificationReport {
    pub fn iterations(&self) -> usize {
        self.outcomes.len()
    }

    pub fn stabilized(&self) -> usize {
        self.outcomes.iter().filter(|o| o.stabilized_at.is_some()).count()
    }

    /// `(stabilized, iterations)`.
    pub fn stabilization_fraction(&self) -> (usize, usize) {
        (self.stabilized(), self.iterations())
    }

    pub fn violations(&self) -> impl Iterator<Item = &Finding> {
        self.outcomes.iter().flat_map(|o| &o.violations)
    }

    pub fn inspections(&self) -> impl Iterator<Item = &Finding> {
        self.outcomes.iter().flat_map(|o| &o.inspections)
    }

    pub fn is_clean(&self) -> bool {
        self.violations().next().is_none() && self.inspections().next().is_none()
    }
}

struct Ctx<'a> {
    iteration: usize,
    name: &'a str,
    violations: Vec<Finding>,
    inspections: Vec<Finding>,
}

impl Ctx<'_> {
    fn fail(&mut self, check: Check, detail: impl Into<String>) {
        self.violations.push(Finding {
            iteration: self.iteration,
            signature: self.name.to_string(),
            check,
            detail: detail.into(),
        });
    }

    fn inspect(&mut self, check: Check, detail: impl Into<String>) {
        self.inspections.push(Finding {
            iteration: self.iteration,
            signature: self.name.to_string(),
            check,
            detail: detail.into(),
        });
    }

    fn euler(&mut self, graph: &SubgroupGraph, what: &str) -> Result<bool> {
        let Some(index) = graph.completeness_and_index()? else {
            return Ok(false);
        };
        let chi_h = graph.euler_characteristic()?;
        let chi_g = ambient_euler_characteristic(graph.signature());
        if chi_h != chi_g * index as i64 {
            self.fail(
                Check::Euler,
                format!("{what}: chi(H)={chi_h} index={index} chi(G)={chi_g}"),
            );
        }
        Ok(true)
    }
}

/// Runs `iterations` seeded iterations cycling through `catalog`.
pub fn verify_suite(
    catalog: &[(String, Signature)],
    iterations: usize,
    seed: u64,
    params: &VerifyParams,
) -> VerificationReport {
    if catalog.is_empty() {
        return VerificationReport {
            seed,
            outcomes: Vec::new(),
        };
    }
    let run = |i: usize| {
        let (name, sig) = &catalog[i % catalog.len()];
        run_iteration(name, sig, i, seed, params)
    };
    let outcomes = if params.parallel {
        (0..iterations).into_par_iter().map(run).collect()
    } else {
        (0..iterations).map(run).collect()
    };
    VerificationReport { seed, outcomes }
}

/// One iteration; errors are recorded as findings rather than returned.
pub fn run_iteration(name: &str, sig: &Signature, iteration: usize, seed: u64, params: &VerifyParams) -> IterationOutcome {
    let sub = derive_seed(seed, STREAM_ENDO, iteration as u64);
    let kind = if params.inner_every > 0 && iteration % params.inner_every == params.inner_every - 1 {
        MapKind::Inner
    } else {
        MapKind::Endomorphism
    };
    let mut out = IterationOutcome {
        iteration,
        signature: name.to_string(),
        seed: sub,
        kind,
        ranks: Vec::new(),
        free_ranks: Vec::new(),
        stabilized_at: None,
        truncated_at: None,
        stable_rank: None,
        fix_rank: None,
        fix_generators: 0,
        search_stabilized: false,
        oracle: None,
        automorphism_moves: 0,
        complete_graphs: 0,
        violations: Vec::new(),
        inspections: Vec::new(),
    };
    let mut ctx = Ctx {
        iteration,
        name,
        violations: Vec::new(),
        inspections: Vec::new(),
    };
    if let Err(e) = check_endomorphism(sig, sub, params, &mut out, &mut ctx) {
        ctx.inspect(Check::Error, e.to_string());
    }
    let auto_seed = derive_seed(seed, STREAM_AUTO, iteration as u64);
    if let Err(e) = check_automorphism(sig, auto_seed, params, &mut out, &mut ctx) {
        ctx.inspect(Check::Error, e.to_string());
    }
    out.violations = ctx.violations;
    out.inspections = ctx.inspections;
    out
}

fn check_endomorphism(
    sig: &Signature,
    sub: u64,
    params: &VerifyParams,
    out: &mut IterationOutcome,
    ctx: &mut Ctx<'_>,
) -> Result<()> {
    let phi = match out.kind {
        MapKind::Inner => random::random_inner(sig, sub, params.max_inner_len, params.random.max_exp).0,
        MapKind::Endomorphism => random::random_symmetric_endomorphism(sig, sub, &params.random),
    };
    // (a)
    if !phi.symmetry_check().symmetric {
        ctx.fail(Check::Symmetry, "generated endomorphism is not symmetric");
    }
    // (b)
    let chain = analysis::image_chain(&phi, &params.chain)?;
    out.ranks = chain.ranks();
    out.free_ranks = chain.free_ranks();
    out.stabilized_at = chain.stabilized_at;
    out.truncated_at = chain.truncated_at;
    if !chain.monotonic_total {
        ctx.fail(Check::MonotonicTotal, format!("ranks {:?}", out.ranks));
    }
    if !chain.monotonic_free {
        ctx.fail(Check::MonotonicFree, format!("free ranks {:?}", out.free_ranks));
    }
    for level in &chain.levels {
        if ctx.euler(&level.graph, &format!("chain level {}", level.k))? {
            out.complete_graphs += 1;
        }
    }
    // (c)
    if let Some(stable) = chain.stable() {
        let rank = stable.kurosh_decomposition()?.kurosh_rank();
        out.stable_rank = Some(rank);
        if rank > sig.kurosh_rank() {
            ctx.fail(Check::StableRank, format!("rank {rank} > {}", sig.kurosh_rank()));
        }
        if !analysis::verify_stable_automorphism(&phi, stable)? {
            ctx.fail(Check::StableOnto, "φ does not map the stable image onto itself");
        }
    }
    // (d)
    let fix = analysis::fix_report(&phi, params.fix_len, params.fix_exp)?;
    out.fix_rank = Some(fix.decomposition.kurosh_rank());
    out.fix_generators = fix.generators.len();
    out.search_stabilized = fix.search_stabilized;
    for w in &fix.generators {
        if !phi.fixes(w) {
            ctx.fail(Check::FixGenerator, sig.format_word(w));
        }
    }
    let mut rng = random::rng_from_seed(derive_seed(sub, STREAM_SPOT, 0));
    for _ in 0..params.spot_checks {
        if fix.generators.is_empty() {
            break;
        }
        let count = rng.gen_range(1..=4);
        let parts: Vec<Word> = (0..count)
            .map(|_| {
                let w = fix.generators.choose(&mut rng).unwrap();
                if rng.gen_bool(0.5) {
                    sig.invert(w)
                } else {
                    w.clone()
                }
            })
            .collect();
        let w = sig.product(&parts);
        if !phi.fixes(&w) {
            ctx.fail(Check::FixProduct, sig.format_word(&w));
        }
    }
    if ctx.euler(&fix.graph, "fixed subgroup")? {
        out.complete_graphs += 1;
    }
    if !fix.within_bound {
        let complete = fix.graph.completeness_and_index()?.is_some();
        let detail = format!("fixed subgroup rank {} > {}", fix.decomposition.kurosh_rank(), fix.bound);
        if sig.free_rank() == 0 && fix.search_stabilized && (complete || fix.oracle_comparison == Some(true)) {
            ctx.fail(Check::FixBound, detail);
        } else {
            ctx.inspect(Check::FixBound, detail);
        }
    }
    // (e)
    out.oracle = fix.oracle_comparison;
    if fix.oracle_comparison == Some(false) {
        let w = phi.inner_conjugator().cloned().unwrap_or_default();
        ctx.fail(Check::Oracle, format!("centralizer of {} differs", sig.format_word(&w)));
    }
    Ok(())
}

/// Each factor must map onto a conjugate of a factor.
pub fn automorphism_onto_violations(sig: &Signature, phi: &Endomorphism) -> Result<Vec<String>> {
    let report = phi.symmetry_check();
    let mut bad = Vec::new();
    for (i, fs) in report.factors.iter().enumerate() {
        match fs {
            FactorSymmetry::Conjugate { target, conjugator, .. } => {
                let image = SubgroupGraph::from_generators(sig, &phi.factor_image_generators(i))?;
                let gens: Vec<Word> = sig
                    .factor(*target)
                    .generators()
                    .iter()
                    .map(|&g| sig.conjugate(&sig.element(*target, g), conjugator))
                    .collect();
                let conj = SubgroupGraph::from_generators(sig, &gens)?;
                if !(image.is_subgroup_of(&conj)? && conj.is_subgroup_of(&image)?) {
                    bad.push(format!("factor {} not onto its conjugate", sig.factor(i).name()));
                }
            }
            _ => bad.push(format!("factor {} not mapped into a conjugate factor", sig.factor(i).name())),
        }
    }
    Ok(bad)
}

fn check_automorphism(
    sig: &Signature,
    seed: u64,
    params: &VerifyParams,
    out: &mut IterationOutcome,
    ctx: &mut Ctx<'_>,
) -> Result<()> {
    let aut = random::random_symmetric_automorphism(sig, seed, &params.random);
    out.automorphism_moves = aut.moves.len();
    if aut.inverse.compose(&aut.automorphism)? != Endomorphism::identity(sig) {
        ctx.fail(Check::Onto, "recorded inverse does not undo the automorphism");
    }
    for detail in automorphism_onto_violations(sig, &aut.automorphism)? {
        ctx.fail(Check::Onto, detail);
    }
    Ok(())
}
