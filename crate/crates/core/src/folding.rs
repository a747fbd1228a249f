//! Folded subgroup graphs for free products.
//!
//! A subgroup `H` is represented by a based graph whose base vertices carry
//! directed free edges (one per letter step) and which are grouped, per
//! factor `G_i`, into factor components. A component is a partial coset
//! graph of a subgroup `K <= G_i`: each member vertex sits at a distinct right
//! coset `K t`, and there is an arc `(u, e, v)` exactly when `K t_u e = K t_v`.
//! Components with `|K| > 1` are the conjugate-factor pieces of the Kurosh
//! decomposition of `H`; the cycle rank of the bipartite vertex/component
//! graph is the rank of the free part.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::word::{Signature, Syllable, Word};

/// Default limit on the number of vertices created while folding.
pub const DEFAULT_MAX_VERTICES: usize = 1_000_000;

const NONE: u32 = u32::MAX;

/// A unit free edge `src --x_{letter+1}--> dst`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FreeEdge {
    pub src: usize,
    pub letter: usize,
    pub dst: usize,
}

/// An unfolded factor arc `src --e--> dst` with `e` in factor `factor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorArc {
    pub src: usize,
    pub factor: usize,
    pub elem: u32,
    pub dst: usize,
}

/// A factor component of a folded graph, framed at its anchor vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorComponent {
    pub factor: usize,
    /// Vertex group at the anchor, ascending element indices.
    pub stabilizer: Vec<u32>,
    /// `(vertex, canonical coset representative)`, ascending by
    /// representative. The anchor comes first with representative `0`.
    pub members: Vec<(usize, u32)>,
    // element -> canonical representative of `stabilizer * element`
    coset_rep: Vec<u32>,
    // canonical representative -> member vertex
    vertex_at: Vec<u32>,
}

impl FactorComponent {
    pub fn anchor(&self) -> usize {
        self.members[0].0
    }

    /// Number of cosets of the stabilizer in the whole factor.
    pub fn full_coset_count(&self, g: &FiniteGroup) -> usize {
        g.order() / self.stabilizer.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TreeParent {
    Root,
    /// Reached along the free edge `(from, letter, v)`.
    Forward { from: u32, letter: u32 },
    /// Reached backwards along the free edge `(v, letter, from)`.
    Backward { from: u32, letter: u32 },
    /// Reached through a component from its anchor.
    Component(u32),
}

/// One conjugate-factor piece `H ∩ c G_i c^-1` of a Kurosh decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KuroshInstance {
    pub factor: usize,
    pub order: usize,
    pub conjugator: Word,
    pub generators: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KuroshDecomposition {
    pub instances: Vec<KuroshInstance>,
    pub free_rank: usize,
}

impl KuroshDecomposition {
    pub fn kurosh_rank(&self) -> usize {
        self.instances.len() + self.free_rank
    }
}

/// A based subgroup graph, either freshly traced from generators or folded.
#[derive(Clone, Debug)]
pub struct SubgroupGraph {
    sig: Signature,
    generators: Vec<Word>,
    num_vertices: usize,
    free_edges: Vec<FreeEdge>,
    arcs: Vec<FactorArc>,
    components: Vec<FactorComponent>,
    folded: bool,
    out: Vec<u32>,
    inc: Vec<u32>,
    comp_at: Vec<u32>,
    rep_at: Vec<u32>,
    tree: Vec<TreeParent>,
}

/// Traces each generator as a closed path at the basepoint.
pub fn graph_from_generators(sig: &Signature, gens: &[Word]) -> SubgroupGraph {
    let mut num_vertices = 1usize;
    let mut free_edges = Vec::new();
    let mut arcs = Vec::new();
    for w in gens {
        let steps = w.weight();
        let mut done = 0usize;
        let mut cur = 0usize;
        let next = |done: usize, num_vertices: &mut usize| {
            if done == steps {
                0
            } else {
                *num_vertices += 1;
                *num_vertices - 1
            }
        };
        for s in w.syllables() {
            match *s {
                Syllable::Factor { factor, elem } => {
                    done += 1;
                    let dst = next(done, &mut num_vertices);
                    arcs.push(FactorArc {
                        src: cur,
                        factor: factor as usize,
                        elem,
                        dst,
                    });
                    cur = dst;
                }
                Syllable::Free { letter, exp } => {
                    for _ in 0..exp.unsigned_abs() {
                        done += 1;
                        let dst = next(done, &mut num_vertices);
                        let (src, dst_e) = if exp > 0 { (cur, dst) } else { (dst, cur) };
                        free_edges.push(FreeEdge {
                            src,
                            letter: letter as usize,
                            dst: dst_e,
                        });
                        cur = dst;
                    }
                }
            }
        }
    }
    SubgroupGraph {
        sig: sig.clone(),
        generators: gens.to_vec(),
        num_vertices,
        free_edges,
        arcs,
        components: Vec::new(),
        folded: false,
        out: Vec::new(),
        inc: Vec::new(),
        comp_at: Vec::new(),
        rep_at: Vec::new(),
        tree: Vec::new(),
    }
}

/// Folds and core-prunes a traced graph.
pub fn fold(graph: &SubgroupGraph, max_vertices: usize) -> Result<SubgroupGraph> {
    if graph.folded {
        return Ok(graph.clone());
    }
    if graph.num_vertices > max_vertices {
        return Err(Error::CapExceeded {
            what: "subgroup graph vertices",
            limit: max_vertices,
        });
    }
    let mut folder = Folder::new(&graph.sig, graph.num_vertices);
    for e in &graph.free_edges {
        folder.add_free_edge(e.src as u32, e.letter, e.dst as u32);
        folder.drain();
    }
    for a in &graph.arcs {
        folder.add_arc(a.src as u32, a.factor, a.elem, a.dst as u32);
        folder.drain();
    }
    folder.finish();
    folder.prune();
    Ok(folder.build(graph.generators.clone()))
}

struct Comp {
    factor: usize,
    mask: Vec<bool>,
    elems: Vec<u32>,
    members: Vec<(u32, u32)>,
}

struct Folder<'a> {
    sig: &'a Signature,
    n: usize,
    r: usize,
    parent: Vec<u32>,
    removed: Vec<bool>,
    out: Vec<u32>,
    inc: Vec<u32>,
    comp_of: Vec<u32>,
    comps: Vec<Option<Comp>>,
    pending: Vec<(u32, u32)>,
}

impl<'a> Folder<'a> {
    fn new(sig: &'a Signature, vertices: usize) -> Self {
        let (n, r) = (sig.num_factors(), sig.free_rank());
        Folder {
            sig,
            n,
            r,
            parent: (0..vertices as u32).collect(),
            removed: vec![false; vertices],
            out: vec![NONE; vertices * r],
            inc: vec![NONE; vertices * r],
            comp_of: vec![NONE; vertices * n],
            comps: Vec::new(),
            pending: Vec::new(),
        }
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let gp = self.parent[self.parent[v as usize] as usize];
            self.parent[v as usize] = gp;
            v = gp;
        }
        v
    }

    fn add_free_edge(&mut self, u: u32, j: usize, v: u32) {
        let (u, v) = (self.find(u), self.find(v));
        let oi = u as usize * self.r + j;
        match self.out[oi] {
            NONE => self.out[oi] = v,
            w => self.pending.push((w, v)),
        }
        let ii = v as usize * self.r + j;
        match self.inc[ii] {
            NONE => self.inc[ii] = u,
            w => self.pending.push((w, u)),
        }
    }

    fn add_arc(&mut self, u: u32, i: usize, e: u32, v: u32) {
        let g = &self.sig.factors()[i];
        let (u, v) = (self.find(u), self.find(v));
        let mut mask = vec![false; g.order()];
        mask[0] = true;
        let id = self.comps.len() as u32;
        self.comps.push(Some(Comp {
            factor: i,
            mask,
            elems: vec![0],
            members: vec![(u, 0), (v, e)],
        }));
        self.settle(id);
    }

    fn drain(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a != b {
                self.merge_vertices(a, b);
            }
        }
    }

    fn merge_vertices(&mut self, a: u32, b: u32) {
        let (keep, gone) = (a.min(b), a.max(b));
        self.parent[gone as usize] = keep;
        for j in 0..self.r {
            let (k, g) = (keep as usize * self.r + j, gone as usize * self.r + j);
            for forward in [true, false] {
                let table = if forward { &mut self.out } else { &mut self.inc };
                let moved = table[g];
                if moved != NONE {
                    if table[k] == NONE {
                        table[k] = moved;
                    } else {
                        let existing = table[k];
                        self.pending.push((existing, moved));
                    }
                }
            }
        }
        for i in 0..self.n {
            let (k, g) = (keep as usize * self.n + i, gone as usize * self.n + i);
            let (ck, cg) = (self.comp_of[k], self.comp_of[g]);
            match (ck, cg) {
                (_, NONE) => {}
                (NONE, c) => {
                    self.comp_of[k] = c;
                    self.settle(c);
                }
                (c, d) if c == d => self.settle(c),
                (c, d) => {
                    self.merge_comps(c, d, keep);
                    self.settle(c);
                }
            }
        }
    }

    fn position_of(&mut self, c: u32, v: u32) -> u32 {
        let members = self.comps[c as usize].as_ref().unwrap().members.clone();
        for (w, p) in members {
            if self.find(w) == v {
                return p;
            }
        }
        unreachable!("vertex {v} not in component {c}")
    }

    /// Absorbs component `gone` into `keep`; both contain vertex `shared`.
    fn merge_comps(&mut self, keep: u32, gone: u32, shared: u32) {
        let i = self.comps[keep as usize].as_ref().unwrap().factor;
        let g = self.sig.factors()[i].clone();
        let t = self.position_of(keep, shared);
        let s = self.position_of(gone, shared);
        let shift = g.mul(t, g.inv(s));
        let absorbed = self.comps[gone as usize].take().unwrap();
        let kc = self.comps[keep as usize].as_mut().unwrap();
        let mut seeds = kc.elems.clone();
        seeds.extend(absorbed.elems.iter().map(|&k| g.mul(g.mul(shift, k), g.inv(shift))));
        kc.mask = g.subgroup_mask(seeds);
        kc.elems = (0..g.order() as u32).filter(|&x| kc.mask[x as usize]).collect();
        kc.members
            .extend(absorbed.members.iter().map(|&(w, p)| (w, g.mul(shift, p))));
        for (w, _) in absorbed.members {
            let w = self.find(w);
            let slot = w as usize * self.n + i;
            if self.comp_of[slot] == gone {
                self.comp_of[slot] = keep;
            }
        }
    }

    fn coset_key(g: &FiniteGroup, elems: &[u32], t: u32) -> u32 {
        elems.iter().map(|&k| g.mul(k, t)).min().unwrap()
    }

    /// Restores the component invariants: registered members, one coset per
    /// vertex, and queued merges for vertices sharing a coset.
    fn settle(&mut self, c: u32) {
        let i = self.comps[c as usize].as_ref().unwrap().factor;
        let g = self.sig.factors()[i].clone();
        'outer: loop {
            let mut members = std::mem::take(&mut self.comps[c as usize].as_mut().unwrap().members);
            for m in members.iter_mut() {
                m.0 = self.find(m.0);
            }
            self.comps[c as usize].as_mut().unwrap().members = members.clone();
            for &(w, _) in &members {
                let slot = w as usize * self.n + i;
                match self.comp_of[slot] {
                    NONE => self.comp_of[slot] = c,
                    d if d == c => {}
                    d => {
                        debug_assert!(self.comps[d as usize].is_some());
                        self.merge_comps(c, d, w);
                        continue 'outer;
                    }
                }
            }
            let comp = self.comps[c as usize].as_mut().unwrap();
            comp.members.sort_unstable();
            let mut extra = Vec::new();
            for pair in comp.members.windows(2) {
                let ((v1, p1), (v2, p2)) = (pair[0], pair[1]);
                if v1 == v2
                    && Self::coset_key(&g, &comp.elems, p1) != Self::coset_key(&g, &comp.elems, p2)
                {
                    extra.push(g.mul(p2, g.inv(p1)));
                }
            }
            if !extra.is_empty() {
                let mut seeds = comp.elems.clone();
                seeds.extend(extra);
                comp.mask = g.subgroup_mask(seeds);
                comp.elems = (0..g.order() as u32).filter(|&x| comp.mask[x as usize]).collect();
                continue;
            }
            comp.members.dedup_by_key(|m| m.0);
            let mut by_coset: HashMap<u32, u32> = HashMap::new();
            let mut merges = Vec::new();
            for &(v, p) in &comp.members {
                let key = Self::coset_key(&g, &comp.elems, p);
                match by_coset.get(&key) {
                    Some(&w) => merges.push((w, v)),
                    None => {
                        by_coset.insert(key, v);
                    }
                }
            }
            self.pending.extend(merges);
            return;
        }
    }

    fn finish(&mut self) {
        loop {
            for c in 0..self.comps.len() as u32 {
                if self.comps[c as usize].is_some() {
                    self.settle(c);
                }
            }
            if self.pending.is_empty() {
                break;
            }
            self.drain();
        }
        // free-edge targets may still name merged-away vertices
        for k in 0..self.out.len() {
            for forward in [true, false] {
                let t = if forward { self.out[k] } else { self.inc[k] };
                if t != NONE {
                    let root = self.find(t);
                    if forward {
                        self.out[k] = root;
                    } else {
                        self.inc[k] = root;
                    }
                }
            }
        }
    }

    fn is_root(&self, v: u32) -> bool {
        self.parent[v as usize] == v && !self.removed[v as usize]
    }

    fn vacuous(comp: &Comp) -> bool {
        comp.members.is_empty() || (comp.elems.len() == 1 && comp.members.len() <= 1)
    }

    fn degree(&self, v: u32) -> usize {
        let free = (0..self.r)
            .map(|j| {
                let k = v as usize * self.r + j;
                (self.out[k] != NONE) as usize + (self.inc[k] != NONE) as usize
            })
            .sum::<usize>();
        let comps = (0..self.n)
            .filter(|&i| self.comp_of[v as usize * self.n + i] != NONE)
            .count();
        free + comps
    }

    fn drop_comp(&mut self, c: u32, work: &mut Vec<u32>) {
        let comp = self.comps[c as usize].take().unwrap();
        for (w, _) in comp.members {
            self.comp_of[w as usize * self.n + comp.factor] = NONE;
            work.push(w);
        }
    }

    fn prune(&mut self) {
        let mut work: Vec<u32> = Vec::new();
        for c in 0..self.comps.len() as u32 {
            if matches!(&self.comps[c as usize], Some(comp) if Self::vacuous(comp)) {
                self.drop_comp(c, &mut work);
            }
        }
        work.extend((1..self.parent.len() as u32).filter(|&v| self.is_root(v)));
        while let Some(v) = work.pop() {
            if v == 0 || !self.is_root(v) || self.degree(v) > 1 {
                continue;
            }
            self.removed[v as usize] = true;
            for j in 0..self.r {
                let k = v as usize * self.r + j;
                let t = std::mem::replace(&mut self.out[k], NONE);
                if t != NONE && t != v {
                    self.inc[t as usize * self.r + j] = NONE;
                    work.push(t);
                }
                let s = std::mem::replace(&mut self.inc[k], NONE);
                if s != NONE && s != v {
                    self.out[s as usize * self.r + j] = NONE;
                    work.push(s);
                }
            }
            for i in 0..self.n {
                let c = std::mem::replace(&mut self.comp_of[v as usize * self.n + i], NONE);
                if c == NONE {
                    continue;
                }
                let comp = self.comps[c as usize].as_mut().unwrap();
                comp.members.retain(|&(w, _)| w != v);
                if Self::vacuous(comp) {
                    self.drop_comp(c, &mut work);
                }
            }
        }
    }

    fn build(mut self, generators: Vec<Word>) -> SubgroupGraph {
        let (n, r) = (self.n, self.r);
        let total = self.parent.len();
        let mut new_id = vec![NONE; total];
        let mut order: Vec<u32> = Vec::new();
        let mut tree: Vec<TreeParent> = Vec::new();
        let mut comp_seen = vec![false; self.comps.len()];
        let mut components: Vec<FactorComponent> = Vec::new();
        let mut queue = VecDeque::new();
        new_id[0] = 0;
        order.push(0);
        tree.push(TreeParent::Root);
        queue.push_back(0u32);
        while let Some(u) = queue.pop_front() {
            let nu = new_id[u as usize];
            for j in 0..r {
                for (table, forward) in [(&self.out, true), (&self.inc, false)] {
                    let t = table[u as usize * r + j];
                    if t != NONE && new_id[t as usize] == NONE {
                        new_id[t as usize] = order.len() as u32;
                        order.push(t);
                        tree.push(if forward {
                            TreeParent::Forward {
                                from: nu,
                                letter: j as u32,
                            }
                        } else {
                            TreeParent::Backward {
                                from: nu,
                                letter: j as u32,
                            }
                        });
                        queue.push_back(t);
                    }
                }
            }
            for i in 0..n {
                let c = self.comp_of[u as usize * n + i];
                if c == NONE || comp_seen[c as usize] {
                    continue;
                }
                comp_seen[c as usize] = true;
                let ci = components.len() as u32;
                let comp = self.comps[c as usize].take().unwrap();
                let g = &self.sig.factors()[i];
                let t_anchor = comp
                    .members
                    .iter()
                    .find(|m| m.0 == u)
                    .map(|m| m.1)
                    .unwrap();
                let ti = g.inv(t_anchor);
                let mut stabilizer: Vec<u32> = comp
                    .elems
                    .iter()
                    .map(|&k| g.mul(g.mul(ti, k), t_anchor))
                    .collect();
                stabilizer.sort_unstable();
                let coset_rep: Vec<u32> = (0..g.order() as u32)
                    .map(|x| stabilizer.iter().map(|&k| g.mul(k, x)).min().unwrap())
                    .collect();
                let mut members: Vec<(u32, u32)> = comp
                    .members
                    .iter()
                    .map(|&(w, p)| (w, coset_rep[g.mul(ti, p) as usize]))
                    .collect();
                members.sort_unstable_by_key(|m| m.1);
                let mut framed = Vec::with_capacity(members.len());
                for (w, rep) in members {
                    if new_id[w as usize] == NONE {
                        new_id[w as usize] = order.len() as u32;
                        order.push(w);
                        tree.push(TreeParent::Component(ci));
                        queue.push_back(w);
                    }
                    framed.push((new_id[w as usize] as usize, rep));
                }
                let mut vertex_at = vec![NONE; g.order()];
                for &(w, rep) in &framed {
                    vertex_at[rep as usize] = w as u32;
                }
                components.push(FactorComponent {
                    factor: i,
                    stabilizer,
                    members: framed,
                    coset_rep,
                    vertex_at,
                });
            }
        }
        let nv = order.len();
        let mut out = vec![NONE; nv * r];
        let mut inc = vec![NONE; nv * r];
        let mut free_edges = Vec::new();
        for (nu, &u) in order.iter().enumerate() {
            for j in 0..r {
                let t = self.out[u as usize * r + j];
                if t != NONE {
                    let nt = new_id[t as usize] as usize;
                    out[nu * r + j] = nt as u32;
                    inc[nt * r + j] = nu as u32;
                    free_edges.push(FreeEdge {
                        src: nu,
                        letter: j,
                        dst: nt,
                    });
                }
            }
        }
        let mut comp_at = vec![NONE; nv * n];
        let mut rep_at = vec![NONE; nv * n];
        for (ci, comp) in components.iter().enumerate() {
            for &(w, rep) in &comp.members {
                comp_at[w * n + comp.factor] = ci as u32;
                rep_at[w * n + comp.factor] = rep;
            }
        }
        SubgroupGraph {
            sig: self.sig.clone(),
            generators,
            num_vertices: nv,
            free_edges,
            arcs: Vec::new(),
            components,
            folded: true,
            out,
            inc,
            comp_at,
            rep_at,
            tree,
        }
    }
}

impl SubgroupGraph {
    /// Traces and folds in one step.
    pub fn from_generators(sig: &Signature, gens: &[Word]) -> Result<Self> {
        Self::from_generators_capped(sig, gens, DEFAULT_MAX_VERTICES)
    }

    pub fn from_generators_capped(sig: &Signature, gens: &[Word], max_vertices: usize) -> Result<Self> {
        let traced: usize = 1 + gens.iter().map(Word::weight).sum::<usize>();
        if traced > max_vertices {
            return Err(Error::CapExceeded {
                what: "subgroup graph vertices",
                limit: max_vertices,
            });
        }
        fold(&graph_from_generators(sig, gens), max_vertices)
    }

    /// The whole group.
    pub fn whole_group(sig: &Signature) -> Self {
        Self::from_generators(sig, &sig.ambient_generators()).expect("ambient graph is tiny")
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn is_folded(&self) -> bool {
        self.folded
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn free_edges(&self) -> &[FreeEdge] {
        &self.free_edges
    }

    /// Raw factor arcs of an unfolded graph.
    pub fn arcs(&self) -> &[FactorArc] {
        &self.arcs
    }

    pub fn components(&self) -> &[FactorComponent] {
        &self.components
    }

    fn require_folded(&self) -> Result<()> {
        if self.folded {
            Ok(())
        } else {
            Err(Error::NotFolded)
        }
    }

    /// Identical canonical structure; equivalent to equality of subgroups.
    pub fn same_structure(&self, other: &SubgroupGraph) -> bool {
        self.folded
            && other.folded
            && self.sig == other.sig
            && self.num_vertices == other.num_vertices
            && self.free_edges == other.free_edges
            && self.components == other.components
    }

    fn step(&self, v: usize, s: &Syllable) -> Option<usize> {
        let (n, r) = (self.sig.num_factors(), self.sig.free_rank());
        match *s {
            Syllable::Factor { factor, elem } => {
                let i = factor as usize;
                let c = self.comp_at[v * n + i];
                if c == NONE {
                    return None;
                }
                let comp = &self.components[c as usize];
                let g = self.sig.factor(i);
                let target = comp.coset_rep[g.mul(self.rep_at[v * n + i], elem) as usize];
                match comp.vertex_at[target as usize] {
                    NONE => None,
                    w => Some(w as usize),
                }
            }
            Syllable::Free { letter, exp } => {
                let table = if exp > 0 { &self.out } else { &self.inc };
                let mut cur = v;
                for _ in 0..exp.unsigned_abs() {
                    match table[cur * r + letter as usize] {
                        NONE => return None,
                        w => cur = w as usize,
                    }
                }
                Some(cur)
            }
        }
    }

    /// Reads `w` from the basepoint; `Some(end vertex)` if the path exists.
    pub fn read(&self, w: &Word) -> Result<Option<usize>> {
        self.require_folded()?;
        let mut v = 0;
        for s in w.syllables() {
            match self.step(v, s) {
                Some(next) => v = next,
                None => return Ok(None),
            }
        }
        Ok(Some(v))
    }

    pub fn contains(&self, w: &Word) -> Result<bool> {
        Ok(self.read(w)? == Some(0))
    }

    /// Every original generator of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &SubgroupGraph) -> Result<bool> {
        self.require_folded()?;
        other.require_folded()?;
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch);
        }
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn subgroup_equals(&self, other: &SubgroupGraph) -> Result<bool> {
        Ok(self.is_subgroup_of(other)? && other.is_subgroup_of(self)?)
    }

    fn tree_syllable(&self, v: usize) -> (usize, Syllable) {
        match self.tree[v] {
            TreeParent::Root => unreachable!(),
            TreeParent::Forward { from, letter } => (from as usize, Syllable::free(letter as usize, 1)),
            TreeParent::Backward { from, letter } => {
                (from as usize, Syllable::free(letter as usize, -1))
            }
            TreeParent::Component(c) => {
                let comp = &self.components[c as usize];
                let rep = self.rep_at[v * self.sig.num_factors() + comp.factor];
                (comp.anchor(), Syllable::factor(comp.factor, rep))
            }
        }
    }

    /// Spanning-tree path word from the basepoint to `v`.
    pub fn path_to(&self, v: usize) -> Word {
        let mut syl = Vec::new();
        let mut cur = v;
        while cur != 0 {
            let (p, s) = self.tree_syllable(cur);
            syl.push(s);
            cur = p;
        }
        syl.reverse();
        self.sig.normalize_unchecked(syl)
    }

    /// The conjugate-factor pieces and free rank of the subgroup.
    pub fn kurosh_decomposition(&self) -> Result<KuroshDecomposition> {
        self.require_folded()?;
        let mut instances = Vec::new();
        for comp in &self.components {
            if comp.stabilizer.len() < 2 {
                continue;
            }
            let g = self.sig.factor(comp.factor);
            let mut mask = vec![false; g.order()];
            for &k in &comp.stabilizer {
                mask[k as usize] = true;
            }
            let conjugator = self.path_to(comp.anchor());
            let generators = g
                .subgroup_generators(&mask)
                .into_iter()
                .map(|k| self.sig.conjugate(&self.sig.element(comp.factor, k), &conjugator))
                .collect();
            instances.push(KuroshInstance {
                factor: comp.factor,
                order: comp.stabilizer.len(),
                conjugator,
                generators,
            });
        }
        let incidences: usize = self.components.iter().map(|c| c.members.len()).sum();
        let edges = incidences + self.free_edges.len();
        let nodes = self.num_vertices + self.components.len();
        Ok(KuroshDecomposition {
            instances,
            free_rank: edges + 1 - nodes,
        })
    }

    /// A generating set adapted to the Kurosh decomposition: the instance
    /// generators followed by one word per non-tree edge.
    pub fn basis(&self) -> Result<Vec<Word>> {
        let kd = self.kurosh_decomposition()?;
        let mut out: Vec<Word> = kd.instances.into_iter().flat_map(|i| i.generators).collect();
        let mut paths: HashMap<usize, Word> = HashMap::new();
        let mut path = |g: &SubgroupGraph, v: usize| -> Word {
            paths.entry(v).or_insert_with(|| g.path_to(v)).clone()
        };
        for e in &self.free_edges {
            let tree_edge = self.tree[e.dst]
                == TreeParent::Forward {
                    from: e.src as u32,
                    letter: e.letter as u32,
                }
                || self.tree[e.src]
                    == TreeParent::Backward {
                        from: e.dst as u32,
                        letter: e.letter as u32,
                    };
            if !tree_edge {
                let pu = path(self, e.src);
                let pv = path(self, e.dst);
                out.push(self.sig.product([&pu, &self.sig.letter(e.letter), &self.sig.invert(&pv)]));
            }
        }
        for (ci, comp) in self.components.iter().enumerate() {
            let anchor = comp.anchor();
            for &(w, rep) in &comp.members[1..] {
                if self.tree[w] != TreeParent::Component(ci as u32) {
                    let pa = path(self, anchor);
                    let pw = path(self, w);
                    out.push(self.sig.product([
                        &pa,
                        &self.sig.element(comp.factor, rep),
                        &self.sig.invert(&pw),
                    ]));
                }
            }
        }
        Ok(out)
    }

    /// `Some(index)` when the graph is a complete coset graph.
    pub fn completeness_and_index(&self) -> Result<Option<usize>> {
        self.require_folded()?;
        let (n, r) = (self.sig.num_factors(), self.sig.free_rank());
        if n == 1 && r == 0 {
            // core of a subgroup of a single finite group is just the basepoint
            let k = self.components.first().map_or(1, |c| c.stabilizer.len());
            return Ok(Some(self.sig.factor(0).order() / k));
        }
        for v in 0..self.num_vertices {
            for j in 0..r {
                if self.out[v * r + j] == NONE || self.inc[v * r + j] == NONE {
                    return Ok(None);
                }
            }
            for i in 0..n {
                let c = self.comp_at[v * n + i];
                if c == NONE {
                    return Ok(None);
                }
                let comp = &self.components[c as usize];
                if comp.members.len() != comp.full_coset_count(self.sig.factor(i)) {
                    return Ok(None);
                }
            }
        }
        Ok(Some(self.num_vertices))
    }

    /// Rational Euler characteristic from the Kurosh data.
    pub fn euler_characteristic(&self) -> Result<Rational64> {
        let kd = self.kurosh_decomposition()?;
        let mut chi = Rational64::from_integer(1 - kd.kurosh_rank() as i64);
        for inst in &kd.instances {
            chi += Rational64::new(1, inst.order as i64);
        }
        Ok(chi)
    }

    /// Whether every vertex is reachable from the basepoint.
    pub fn is_connected(&self) -> bool {
        !self.folded || self.tree.len() == self.num_vertices
    }
}

/// Euler characteristic of the ambient group: `Σ 1/|G_i| + 1 - n - r`.
pub fn ambient_euler_characteristic(sig: &Signature) -> Rational64 {
    let mut chi = Rational64::from_integer(1 - sig.kurosh_rank() as i64);
    for g in sig.factors() {
        chi += Rational64::new(1, g.order() as i64);
    }
    chi
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<SubgroupGraph>();
    check::<Arc<FiniteGroup>>();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn z2z2() -> Signature {
        catalog::by_name("z2z2").unwrap()
    }

    fn words(sig: &Signature, texts: &[&str]) -> Vec<Word> {
        texts.iter().map(|t| sig.parse_word(t).unwrap()).collect()
    }

    fn folded(sig: &Signature, texts: &[&str]) -> SubgroupGraph {
        SubgroupGraph::from_generators(sig, &words(sig, texts)).unwrap()
    }

    #[test]
    fn traced_graphs() {
        let sig = z2z2();
        let empty = graph_from_generators(&sig, &[]);
        assert_eq!(empty.num_vertices(), 1);
        assert!(empty.free_edges().is_empty() && empty.arcs().is_empty());
        let a = graph_from_generators(&sig, &words(&sig, &["A[g0]"]));
        assert_eq!(
            a.arcs(),
            &[FactorArc {
                src: 0,
                factor: 0,
                elem: 1,
                dst: 0
            }]
        );
        let ab = graph_from_generators(&sig, &words(&sig, &["A[g0] B[g0]"]));
        assert_eq!(ab.num_vertices(), 2);
        assert_eq!(
            ab.arcs(),
            &[
                FactorArc {
                    src: 0,
                    factor: 0,
                    elem: 1,
                    dst: 1
                },
                FactorArc {
                    src: 1,
                    factor: 1,
                    elem: 1,
                    dst: 0
                }
            ]
        );
        assert!(matches!(ab.contains(&Word::identity()), Err(Error::NotFolded)));
    }

    #[test]
    fn fold_examples() {
        let sig = z2z2();
        let g = folded(&sig, &["A[g0]", "B[g0]"]);
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.components().len(), 2);
        assert!(g.components().iter().all(|c| c.stabilizer.len() == 2));
        let ab = folded(&sig, &["A[g0] B[g0]"]);
        assert_eq!(ab.num_vertices(), 2);
        assert_eq!(ab.components().len(), 2);
        assert!(ab.components().iter().all(|c| c.stabilizer.len() == 1));
        assert!(ab.free_edges().is_empty());
        let e = folded(&sig, &[]);
        assert_eq!(e.num_vertices(), 1);
        assert!(e.components().is_empty());
    }

    #[test]
    fn kurosh_examples() {
        let sig = z2z2();
        let g = folded(&sig, &["A[g0]", "B[g0]"]).kurosh_decomposition().unwrap();
        assert_eq!((g.instances.len(), g.free_rank, g.kurosh_rank()), (2, 0, 2));
        let ab = folded(&sig, &["A[g0] B[g0]"]).kurosh_decomposition().unwrap();
        assert_eq!((ab.instances.len(), ab.free_rank, ab.kurosh_rank()), (0, 1, 1));
        let h = folded(&sig, &["A[g0]", "B[g0] A[g0] B[g0]"]);
        let kd = h.kurosh_decomposition().unwrap();
        assert_eq!((kd.instances.len(), kd.free_rank), (2, 0));
        assert!(kd.instances.iter().all(|i| i.factor == 0 && i.order == 2));
        let conj: Vec<String> = kd.instances.iter().map(|i| sig.format_word(&i.conjugator)).collect();
        assert_eq!(conj, vec!["ε", "B[g0]"]);
    }

    #[test]
    fn membership_examples() {
        let sig = z2z2();
        let ab = folded(&sig, &["A[g0] B[g0]"]);
        assert!(ab.contains(&Word::identity()).unwrap());
        assert!(ab.contains(&sig.parse_word("A[g0] B[g0]").unwrap()).unwrap());
        assert!(ab.contains(&sig.parse_word("B[g0] A[g0]").unwrap()).unwrap());
        assert!(!ab.contains(&sig.parse_word("A[g0]").unwrap()).unwrap());
        let h = folded(&sig, &["A[g0]", "B[g0] A[g0] B[g0]"]);
        assert!(h.contains(&sig.parse_word("B[g0] A[g0] B[g0]").unwrap()).unwrap());
        assert!(!h.contains(&sig.parse_word("B[g0]").unwrap()).unwrap());
    }

    #[test]
    fn equality_and_inclusion() {
        let sig = z2z2();
        let a = folded(&sig, &["A[g0]"]);
        let b = folded(&sig, &["B[g0]"]);
        let all = folded(&sig, &["A[g0]", "B[g0]"]);
        assert!(a.is_subgroup_of(&all).unwrap());
        assert!(!all.is_subgroup_of(&a).unwrap());
        assert!(!a.subgroup_equals(&b).unwrap());
        let ab = folded(&sig, &["A[g0] B[g0]"]);
        let ba = folded(&sig, &["B[g0] A[g0]"]);
        assert!(ab.subgroup_equals(&ba).unwrap());
        assert!(ab.same_structure(&ba));
    }

    #[test]
    fn indices() {
        let sig = z2z2();
        assert_eq!(folded(&sig, &["A[g0]", "B[g0]"]).completeness_and_index().unwrap(), Some(1));
        let h = folded(&sig, &["A[g0]", "B[g0] A[g0] B[g0]"]);
        assert_eq!(h.completeness_and_index().unwrap(), Some(2));
        // <ab> is the rotation subgroup of the infinite dihedral group
        let ab = folded(&sig, &["A[g0] B[g0]"]);
        assert_eq!(ab.completeness_and_index().unwrap(), Some(2));
        assert_eq!(folded(&sig, &["A[g0]"]).completeness_and_index().unwrap(), None);
        let f = catalog::by_name("z2f2").unwrap();
        assert_eq!(folded(&f, &["x1"]).completeness_and_index().unwrap(), None);
    }

    #[test]
    fn euler_characteristics() {
        let z23 = catalog::by_name("z2z3").unwrap();
        assert_eq!(ambient_euler_characteristic(&z23), Rational64::new(-1, 6));
        let sig = z2z2();
        let h = folded(&sig, &["A[g0]", "B[g0] A[g0] B[g0]"]);
        assert_eq!(h.euler_characteristic().unwrap(), Rational64::from_integer(0));
        assert_eq!(ambient_euler_characteristic(&sig), Rational64::from_integer(0));
    }

    #[test]
    fn basis_generates_the_same_subgroup() {
        let sig = catalog::by_name("z2z3f1").unwrap();
        let g = folded(&sig, &["A[g0] x1 B[g0]", "x1^2", "B[g0] A[g0] B[g0 g0]"]);
        let basis = g.basis().unwrap();
        assert_eq!(basis.len(), g.kurosh_decomposition().unwrap().kurosh_rank());
        let again = SubgroupGraph::from_generators(&sig, &basis).unwrap();
        assert!(again.subgroup_equals(&g).unwrap());
        assert!(again.same_structure(&g));
    }

    #[test]
    fn cap_is_enforced() {
        let sig = catalog::by_name("z2f2").unwrap();
        let w = sig.parse_word("x1^50").unwrap();
        assert!(matches!(
            SubgroupGraph::from_generators_capped(&sig, &[w], 10),
            Err(Error::CapExceeded { .. })
        ));
    }
}
