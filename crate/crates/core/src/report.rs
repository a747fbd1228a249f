//! Line-oriented reports.
//!
//! Machine output is a sequence of records. Each record opens with a
//! `record=<kind>` line followed by `key=value` lines; a key may repeat
//! (for example one `generator=` line per word). Text output shows the same
//! fields on one line per record; every record after the first is prefixed
//! with its kind.

use std::fmt::Write as _;

use crate::analysis::{ChainReport, FixReport};
use crate::error::Result;
use crate::folding::{ambient_euler_characteristic, SubgroupGraph};
use crate::verify::{Finding, VerificationReport};
use crate::word::{Signature, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub kind: &'static str,
    pub fields: Vec<(&'static str, String)>,
}

impl Record {
    pub fn new(kind: &'static str) -> Self {
        Record {
            kind,
            fields: Vec::new(),
        }
    }

    pub fn field(mut self, key: &'static str, value: impl ToString) -> Self {
        self.fields.push((key, value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str())
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

pub fn render(records: &[Record], format: Format) -> String {
    let mut out = String::new();
    for (idx, r) in records.iter().enumerate() {
        match format {
            Format::Machine => {
                writeln!(out, "record={}", r.kind).unwrap();
                for (k, v) in &r.fields {
                    writeln!(out, "{k}={v}").unwrap();
                }
            }
            Format::Text => {
                let fields: Vec<String> = r
                    .fields
                    .iter()
                    .map(|(k, v)| {
                        if v.contains(char::is_whitespace) {
                            format!("{k}=\"{v}\"")
                        } else {
                            format!("{k}={v}")
                        }
                    })
                    .collect();
                if idx > 0 {
                    write!(out, "{}: ", r.kind).unwrap();
                }
                writeln!(out, "{}", fields.join(" ")).unwrap();
            }
        }
    }
    out
}

/// Splits machine output back into records.
pub fn parse_machine(text: &str) -> Vec<Vec<(String, String)>> {
    let mut out: Vec<Vec<(String, String)>> = Vec::new();
    for line in text.lines() {
        let Some((k, v)) = line.split_once('=') else { continue };
        if k == "record" {
            out.push(Vec::new());
        }
        if let Some(last) = out.last_mut() {
            last.push((k.to_string(), v.to_string()));
        }
    }
    out
}

pub fn word_record(sig: &Signature, w: &Word) -> Record {
    Record::new("word")
        .field("word", sig.format_word(w))
        .field("syllables", w.len())
}

pub fn rank_records(graph: &SubgroupGraph) -> Result<Vec<Record>> {
    let sig = graph.signature();
    let kd = graph.kurosh_decomposition()?;
    let mut summary = Record::new("rank")
        .field("kurosh_rank", kd.kurosh_rank())
        .field("instances", kd.instances.len())
        .field("free_rank", kd.free_rank);
    let index = graph.completeness_and_index()?;
    summary = summary
        .field("vertices", graph.num_vertices())
        .field("index", opt(index))
        .field("euler", graph.euler_characteristic()?);
    if index.is_some() {
        summary = summary.field("ambient_euler", ambient_euler_characteristic(sig));
    }
    let mut out = vec![summary];
    for inst in &kd.instances {
        let mut r = Record::new("instance")
            .field("factor", sig.factor(inst.factor).name())
            .field("order", inst.order)
            .field("conjugator", sig.format_word(&inst.conjugator));
        for g in &inst.generators {
            r = r.field("generator", sig.format_word(g));
        }
        out.push(r);
    }
    let mut basis = Record::new("basis");
    for w in graph.basis()? {
        basis = basis.field("generator", sig.format_word(&w));
    }
    out.push(basis);
    Ok(out)
}

pub fn chain_records(sig: &Signature, chain: &ChainReport) -> Vec<Record> {
    let mut out = vec![Record::new("chain")
        .field("levels", join(&chain.ranks()))
        .field("stabilized_at", opt(chain.stabilized_at))
        .field("free_levels", join(&chain.free_ranks()))
        .field("cutoff", chain.cutoff)
        .field("truncated_at", opt(chain.truncated_at))
        .field("monotonic_total", chain.monotonic_total)
        .field("monotonic_free", chain.monotonic_free)
        .field("symmetric", chain.all_symmetric())];
    for level in &chain.levels {
        let mut r = Record::new("level")
            .field("k", level.k)
            .field("kurosh_rank", level.decomposition.kurosh_rank())
            .field("instances", level.decomposition.instances.len())
            .field("free_rank", level.decomposition.free_rank)
            .field("symmetric", level.symmetric);
        for g in &level.generators {
            r = r.field("generator", sig.format_word(g));
        }
        out.push(r);
    }
    out
}

pub fn stable_records(sig: &Signature, k: usize, graph: &SubgroupGraph, onto: bool) -> Result<Vec<Record>> {
    let kd = graph.kurosh_decomposition()?;
    let mut r = Record::new("stable")
        .field("stabilized_at", k)
        .field("kurosh_rank", kd.kurosh_rank())
        .field("instances", kd.instances.len())
        .field("free_rank", kd.free_rank)
        .field("bound", sig.kurosh_rank())
        .field("onto", onto);
    if let Some(note) = crate::analysis::hopf_annotation(sig) {
        r = r.field("injectivity", note);
    }
    for w in graph.basis()? {
        r = r.field("generator", sig.format_word(&w));
    }
    Ok(vec![r])
}

pub fn fix_records(sig: &Signature, fix: &FixReport) -> Vec<Record> {
    let mut r = Record::new("fix")
        .field("kurosh_rank", fix.decomposition.kurosh_rank())
        .field("instances", fix.decomposition.instances.len())
        .field("free_rank", fix.decomposition.free_rank)
        .field("bound", fix.bound)
        .field("within_bound", fix.within_bound)
        .field("search_stabilized", fix.search_stabilized)
        .field("oracle", opt(fix.oracle_comparison))
        .field("max_len", fix.max_len)
        .field("max_exp", fix.max_exp);
    if fix.needs_inspection() {
        r = r.field("status", "needs inspection");
    }
    for w in &fix.generators {
        r = r.field("generator", sig.format_word(w));
    }
    vec![r]
}

fn finding_record(kind: &'static str, f: &Finding) -> Record {
    Record::new(kind)
        .field("iteration", f.iteration)
        .field("signature", &f.signature)
        .field("check", f.check.name())
        .field("detail", &f.detail)
}

pub fn verify_records(report: &VerificationReport) -> Vec<Record> {
    let (stable, total) = report.stabilization_fraction();
    let mut out = vec![Record::new("verify")
        .field("seed", report.seed)
        .field("iterations", total)
        .field("stabilized", stable)
        .field("stabilization_fraction", format!("{stable}/{total}"))
        .field("violations", report.violations().count())
        .field("needs_inspection", report.inspections().count())];
    for o in &report.outcomes {
        out.push(
            Record::new("iteration")
                .field("index", o.iteration)
                .field("signature", &o.signature)
                .field("seed", o.seed)
                .field("kind", o.kind.name())
                .field("levels", join(&o.ranks))
                .field("free_levels", join(&o.free_ranks))
                .field("stabilized_at", opt(o.stabilized_at))
                .field("truncated_at", opt(o.truncated_at))
                .field("stable_rank", opt(o.stable_rank))
                .field("fix_rank", opt(o.fix_rank))
                .field("fix_generators", o.fix_generators)
                .field("search_stabilized", o.search_stabilized)
                .field("oracle", opt(o.oracle))
                .field("automorphism_moves", o.automorphism_moves)
                .field("complete_graphs", o.complete_graphs),
        );
    }
    out.extend(report.violations().map(|f| finding_record("violation", f)));
    out.extend(report.inspections().map(|f| finding_record("inspection", f)));
    out
}
