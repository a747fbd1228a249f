//! Test oracles that share no code with the folding module.

#![allow(dead_code)]

use std::collections::HashMap;

use fpfix::{Signature, Syllable, Word};

/// Coset graph of a subgroup built by naive folding over generator letters,
/// with every factor orbit completed to a full Schreier graph of that factor.
pub struct SchreierOracle {
    sig: Signature,
    parent: Vec<usize>,
    out: Vec<HashMap<usize, usize>>,
    inc: Vec<HashMap<usize, usize>>,
    pending: Vec<(usize, usize)>,
    label_base: Vec<usize>,
    free_base: usize,
}

impl SchreierOracle {
    pub fn new(sig: &Signature, gens: &[Word]) -> Self {
        let mut label_base = Vec::new();
        let mut next = 0;
        for g in sig.factors() {
            label_base.push(next);
            next += g.generators().len();
        }
        let mut o = SchreierOracle {
            sig: sig.clone(),
            parent: vec![0],
            out: vec![HashMap::new()],
            inc: vec![HashMap::new()],
            pending: Vec::new(),
            label_base,
            free_base: next,
        };
        for w in gens {
            let letters = o.letters(w);
            let mut cur = 0;
            for (i, &(label, forward)) in letters.iter().enumerate() {
                let dst = if i + 1 == letters.len() { 0 } else { o.vertex() };
                if forward {
                    o.edge(cur, label, dst);
                } else {
                    o.edge(dst, label, cur);
                }
                cur = dst;
            }
        }
        o.settle();
        o.complete();
        o
    }

    fn vertex(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.out.push(HashMap::new());
        self.inc.push(HashMap::new());
        self.parent.len() - 1
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// `(label, forward)` letters spelling `w`.
    fn letters(&self, w: &Word) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        for s in w.syllables() {
            match *s {
                Syllable::Factor { factor, elem } => {
                    let g = self.sig.factor(factor as usize);
                    for k in g.spelling(elem) {
                        out.push((self.label_base[factor as usize] + k, true));
                    }
                }
                Syllable::Free { letter, exp } => {
                    for _ in 0..exp.unsigned_abs() {
                        out.push((self.free_base + letter as usize, exp > 0));
                    }
                }
            }
        }
        out
    }

    fn edge(&mut self, u: usize, label: usize, v: usize) {
        let (u, v) = (self.find(u), self.find(v));
        match self.out[u].get(&label).copied() {
            Some(t) => self.pending.push((t, v)),
            None => {
                self.out[u].insert(label, v);
            }
        }
        match self.inc[v].get(&label).copied() {
            Some(s) => self.pending.push((s, u)),
            None => {
                self.inc[v].insert(label, u);
            }
        }
    }

    fn settle(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let (keep, gone) = (a.min(b), a.max(b));
            self.parent[gone] = keep;
            let outs: Vec<_> = self.out[gone].drain().collect();
            let ins: Vec<_> = self.inc[gone].drain().collect();
            for (l, t) in outs {
                self.edge(keep, l, t);
            }
            for (l, s) in ins {
                self.edge(s, l, keep);
            }
        }
    }

    fn step(&mut self, v: usize, label: usize) -> Option<usize> {
        let t = *self.out[v].get(&label)?;
        Some(self.find(t))
    }

    /// Closes every factor orbit the graph touches into a quotient of that
    /// factor's Cayley graph.
    fn complete(&mut self) {
        loop {
            let mut changed = false;
            for v in 0..self.parent.len() {
                for i in 0..self.sig.num_factors() {
                    if self.find(v) != v {
                        break;
                    }
                    let labels = self.label_base[i]..self.label_base[i] + self.sig.factor(i).generators().len();
                    let touched = self.out[v].keys().chain(self.inc[v].keys()).any(|l| labels.contains(l));
                    if touched {
                        changed |= self.fill_orbit(v, i);
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Walks the factor's Cayley graph from `v`, adding missing edges and
    /// merging vertices the relations force together.
    fn fill_orbit(&mut self, v: usize, i: usize) -> bool {
        let g = self.sig.factors()[i].clone();
        let base = self.label_base[i];
        let mut changed = false;
        let mut at: Vec<Option<usize>> = vec![None; g.order()];
        at[0] = Some(v);
        let mut queue = std::collections::VecDeque::from([0u32]);
        while let Some(x) = queue.pop_front() {
            for (k, &gen) in g.generators().iter().enumerate() {
                let y = g.mul(x, gen);
                let from = self.find(at[x as usize].unwrap());
                let target = match (self.step(from, base + k), at[y as usize]) {
                    (Some(t), Some(prev)) => {
                        if self.find(t) != self.find(prev) {
                            self.pending.push((t, prev));
                            changed = true;
                        }
                        t
                    }
                    (Some(t), None) => t,
                    (None, Some(prev)) => {
                        self.edge(from, base + k, prev);
                        changed = true;
                        prev
                    }
                    (None, None) => {
                        let t = self.vertex();
                        self.edge(from, base + k, t);
                        changed = true;
                        t
                    }
                };
                self.settle();
                if at[y as usize].is_none() {
                    at[y as usize] = Some(target);
                    queue.push_back(y);
                }
            }
        }
        changed
    }

    pub fn contains(&mut self, w: &Word) -> bool {
        let mut v = 0;
        for (label, forward) in self.letters(w) {
            let v0 = self.find(v);
            let next = if forward {
                self.out[v0].get(&label).copied()
            } else {
                self.inc[v0].get(&label).copied()
            };
            match next {
                Some(t) => v = t,
                None => return false,
            }
        }
        self.find(v) == self.find(0)
    }
}

/// Every normal-form word with at most `max_len` syllables and free
/// exponents bounded by `max_exp`.
pub fn ball(sig: &Signature, max_len: usize, max_exp: i64) -> Vec<Word> {
    let mut choices: Vec<Syllable> = Vec::new();
    for i in 0..sig.num_factors() {
        for e in 1..sig.factor(i).order() as u32 {
            choices.push(Syllable::factor(i, e));
        }
    }
    for j in 0..sig.free_rank() {
        for k in 1..=max_exp {
            choices.push(Syllable::free(j, k));
            choices.push(Syllable::free(j, -k));
        }
    }
    let mut out = vec![Vec::<Syllable>::new()];
    let mut start = 0;
    for _ in 0..max_len {
        let end = out.len();
        for idx in start..end {
            for &s in &choices {
                if out[idx].last().map(Syllable::slot) != Some(s.slot()) {
                    let mut v = out[idx].clone();
                    v.push(s);
                    out.push(v);
                }
            }
        }
        start = end;
    }
    out.into_iter()
        .map(|v| sig.normalize(&v).expect("valid syllables"))
        .collect()
}

/// Normal forms of all products of at most `depth` generators or inverses.
pub fn products(sig: &Signature, gens: &[Word], depth: usize) -> Vec<Word> {
    let letters: Vec<Word> = gens
        .iter()
        .flat_map(|g| [g.clone(), sig.invert(g)])
        .collect();
    let mut layer = vec![Word::identity()];
    let mut all = layer.clone();
    for _ in 0..depth {
        layer = layer
            .iter()
            .flat_map(|w| letters.iter().map(move |l| sig.multiply(w, l)))
            .collect();
        all.extend(layer.iter().cloned());
    }
    all
}
