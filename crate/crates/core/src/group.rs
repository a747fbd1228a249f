//! Finite factor groups given by permutation generators, closed into full
//! multiplication tables, and homomorphisms between them.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default bound on the order of a factor group.
pub const DEFAULT_GROUP_CAP: usize = 1024;

/// Default bound on `|src| * |dst|` for homomorphism enumeration.
pub const DEFAULT_HOM_PRODUCT_CAP: usize = 1 << 16;

/// A finite group with canonically indexed elements.
///
/// Element `0` is the identity. Elements are numbered in breadth-first
/// discovery order from the identity, right-multiplying by the generators in
/// input order. The product `i * j` applies permutation `i` first, then `j`.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    degree: usize,
    elements: Vec<Vec<u32>>,
    mult: Vec<u32>,
    inv: Vec<u32>,
    gens: Vec<u32>,
    // parent[e] = (predecessor, generator position) in the BFS tree.
    parent: Vec<(u32, u32)>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("gens", &self.gens)
            .finish()
    }
}

fn check_permutation(degree: usize, perm: &[u32]) -> Result<()> {
    if perm.len() != degree {
        return Err(Error::InvalidPermutation(format!(
            "expected {degree} images, got {}",
            perm.len()
        )));
    }
    let mut seen = vec![false; degree];
    for &p in perm {
        let p = p as usize;
        if p >= degree || seen[p] {
            return Err(Error::InvalidPermutation(format!(
                "{perm:?} is not a bijection on 0..{degree}"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

fn compose(p: &[u32], q: &[u32]) -> Vec<u32> {
    p.iter().map(|&x| q[x as usize]).collect()
}

/// Closes a set of permutations of `{0..degree-1}` into a group.
pub fn close_group(
    name: &str,
    degree: usize,
    generator_perms: &[Vec<u32>],
    cap: usize,
) -> Result<FiniteGroup> {
    if degree == 0 {
        return Err(Error::InvalidPermutation("degree must be positive".into()));
    }
    for g in generator_perms {
        check_permutation(degree, g)?;
    }
    let identity: Vec<u32> = (0..degree as u32).collect();
    let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut elements = vec![identity.clone()];
    let mut parent = vec![(0u32, u32::MAX)];
    index.insert(identity, 0);
    let mut queue = VecDeque::from([0u32]);
    while let Some(cur) = queue.pop_front() {
        for (gi, g) in generator_perms.iter().enumerate() {
            let next = compose(&elements[cur as usize], g);
            if index.contains_key(&next) {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::CapExceeded {
                    what: "group order",
                    limit: cap,
                });
            }
            let id = elements.len() as u32;
            index.insert(next.clone(), id);
            elements.push(next);
            parent.push((cur, gi as u32));
            queue.push_back(id);
        }
    }
    let order = elements.len();
    let mut mult = vec![0u32; order * order];
    for i in 0..order {
        for j in 0..order {
            mult[i * order + j] = index[&compose(&elements[i], &elements[j])];
        }
    }
    let mut inv = vec![0u32; order];
    for i in 0..order {
        for j in 0..order {
            if mult[i * order + j] == 0 {
                inv[i] = j as u32;
                break;
            }
        }
    }
    let gens = generator_perms.iter().map(|g| index[g]).collect();
    Ok(FiniteGroup {
        name: name.to_string(),
        degree,
        elements,
        mult,
        inv,
        gens,
        parent,
    })
}

impl FiniteGroup {
    /// Cyclic group of order `m` acting on `m` points.
    pub fn cyclic(name: &str, m: usize) -> Result<Self> {
        let perm: Vec<u32> = (0..m as u32).map(|i| (i + 1) % m as u32).collect();
        close_group(name, m, &[perm], DEFAULT_GROUP_CAP)
    }

    /// Symmetric group on `d` points generated by a transposition and a long cycle.
    pub fn symmetric(name: &str, d: usize) -> Result<Self> {
        let mut swap: Vec<u32> = (0..d as u32).collect();
        if d >= 2 {
            swap.swap(0, 1);
        }
        let cycle: Vec<u32> = (0..d as u32).map(|i| (i + 1) % d as u32).collect();
        close_group(name, d, &[swap, cycle], DEFAULT_GROUP_CAP)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Vec<u32>] {
        &self.elements
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    /// The permutations the group was closed from, in input order.
    pub fn generator_perms(&self) -> Vec<Vec<u32>> {
        self.gens
            .iter()
            .map(|&g| self.elements[g as usize].clone())
            .collect()
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mult[a as usize * self.order() + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn contains(&self, e: u32) -> bool {
        (e as usize) < self.order()
    }

    pub fn element_order(&self, e: u32) -> usize {
        let mut x = e;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, e);
            k += 1;
        }
        k
    }

    /// Shortest generator spelling of `e` along the BFS tree, as generator
    /// positions multiplied left to right.
    pub fn spelling(&self, e: u32) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = e;
        while cur != 0 {
            let (p, g) = self.parent[cur as usize];
            out.push(g as usize);
            cur = p;
        }
        out.reverse();
        out
    }

    /// Product of the listed generator positions, left to right.
    pub fn from_spelling(&self, gens: &[usize]) -> Result<u32> {
        let mut x = 0;
        for &g in gens {
            let gi = *self.gens.get(g).ok_or_else(|| {
                Error::IndexOutOfRange(format!("generator g{g} of factor {}", self.name))
            })?;
            x = self.mul(x, gi);
        }
        Ok(x)
    }

    /// Subgroup generated by `seeds`, as a membership mask.
    pub fn subgroup_mask(&self, seeds: impl IntoIterator<Item = u32>) -> Vec<bool> {
        let mut mask = vec![false; self.order()];
        mask[0] = true;
        let seeds: Vec<u32> = seeds.into_iter().filter(|&s| s != 0).collect();
        let mut members = vec![0u32];
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for &s in &seeds {
                let y = self.mul(x, s);
                if !mask[y as usize] {
                    mask[y as usize] = true;
                    members.push(y);
                }
            }
            i += 1;
        }
        mask
    }

    /// A small generating set for the subgroup given by `mask`: greedy in
    /// element order.
    pub fn subgroup_generators(&self, mask: &[bool]) -> Vec<u32> {
        let mut chosen = Vec::new();
        let mut span = self.subgroup_mask([]);
        for e in 0..self.order() as u32 {
            if mask[e as usize] && !span[e as usize] {
                chosen.push(e);
                span = self.subgroup_mask(chosen.iter().copied());
            }
        }
        chosen
    }

    /// Same multiplication table and generator positions.
    pub fn same_structure(&self, other: &FiniteGroup) -> bool {
        self.mult == other.mult && self.gens == other.gens
    }

    /// Checks the table axioms exhaustively.
    pub fn check_axioms(&self) -> bool {
        let n = self.order() as u32;
        for a in 0..n {
            if self.mul(0, a) != a || self.mul(a, 0) != a || self.mul(a, self.inv(a)) != 0 {
                return false;
            }
            for b in 0..n {
                let ab = self.mul(a, b);
                if self.inv(ab) != self.mul(self.inv(b), self.inv(a)) {
                    return false;
                }
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// A homomorphism between finite factor groups, as a total element map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorHom {
    src: Arc<FiniteGroup>,
    dst: Arc<FiniteGroup>,
    image: Vec<u32>,
}

impl FactorHom {
    pub fn src(&self) -> &Arc<FiniteGroup> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<FiniteGroup> {
        &self.dst
    }

    pub fn image(&self) -> &[u32] {
        &self.image
    }

    pub fn apply(&self, e: u32) -> u32 {
        self.image[e as usize]
    }

    pub fn generator_images(&self) -> Vec<u32> {
        self.src.generators().iter().map(|&g| self.apply(g)).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.image.iter().all(|&x| x == 0)
    }

    pub fn is_bijective(&self) -> bool {
        if self.src.order() != self.dst.order() {
            return false;
        }
        let mut seen = vec![false; self.dst.order()];
        self.image.iter().all(|&x| !std::mem::replace(&mut seen[x as usize], true))
    }

    /// Inverse of a bijective hom.
    pub fn inverse(&self) -> Option<FactorHom> {
        if !self.is_bijective() {
            return None;
        }
        let mut image = vec![0u32; self.image.len()];
        for (e, &x) in self.image.iter().enumerate() {
            image[x as usize] = e as u32;
        }
        Some(FactorHom {
            src: self.dst.clone(),
            dst: self.src.clone(),
            image,
        })
    }
}

/// Extends generator images to a total homomorphism, checking every edge of
/// the Cayley graph of `src`.
pub fn hom_from_generator_images(
    src: &Arc<FiniteGroup>,
    dst: &Arc<FiniteGroup>,
    gen_images: &[u32],
) -> Result<FactorHom> {
    if gen_images.len() != src.generators().len() {
        return Err(Error::IndexOutOfRange(format!(
            "{} generator images given for {} generators",
            gen_images.len(),
            src.generators().len()
        )));
    }
    if let Some(bad) = gen_images.iter().find(|&&x| !dst.contains(x)) {
        return Err(Error::IndexOutOfRange(format!(
            "element {bad} of {}",
            dst.name()
        )));
    }
    let image = extend_images(src, dst, gen_images).ok_or_else(|| {
        Error::Inconsistent(format!(
            "generator images {gen_images:?} do not define a hom {} -> {}",
            src.name(),
            dst.name()
        ))
    })?;
    Ok(FactorHom {
        src: src.clone(),
        dst: dst.clone(),
        image,
    })
}

fn extend_images(src: &FiniteGroup, dst: &FiniteGroup, gen_images: &[u32]) -> Option<Vec<u32>> {
    let mut image = vec![u32::MAX; src.order()];
    image[0] = 0;
    let mut queue = VecDeque::from([0u32]);
    while let Some(x) = queue.pop_front() {
        let fx = image[x as usize];
        for (&g, &fg) in src.generators().iter().zip(gen_images) {
            let y = src.mul(x, g);
            let fy = dst.mul(fx, fg);
            match image[y as usize] {
                u32::MAX => {
                    image[y as usize] = fy;
                    queue.push_back(y);
                }
                prev if prev != fy => return None,
                _ => {}
            }
        }
    }
    Some(image)
}

/// All homomorphisms `src -> dst`, lexicographic in generator images.
pub fn enumerate_homs(
    src: &Arc<FiniteGroup>,
    dst: &Arc<FiniteGroup>,
    product_cap: usize,
) -> Result<Vec<FactorHom>> {
    if src.order().saturating_mul(dst.order()) > product_cap {
        return Err(Error::CapExceeded {
            what: "hom enumeration |src|*|dst|",
            limit: product_cap,
        });
    }
    // Candidate images per generator: orders must divide.
    let candidates: Vec<Vec<u32>> = src
        .generators()
        .iter()
        .map(|&g| {
            let m = src.element_order(g);
            (0..dst.order() as u32)
                .filter(|&y| m.is_multiple_of(dst.element_order(y)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; candidates.len()];
    loop {
        let images: Vec<u32> = choice
            .iter()
            .zip(&candidates)
            .map(|(&c, cands)| cands[c])
            .collect();
        if let Some(image) = extend_images(src, dst, &images) {
            out.push(FactorHom {
                src: src.clone(),
                dst: dst.clone(),
                image,
            });
        }
        // odometer, last position fastest
        let mut pos = candidates.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < candidates[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// Elements commuting with `e`, ascending.
pub fn centralizer_in_factor(g: &FiniteGroup, e: u32) -> Vec<u32> {
    (0..g.order() as u32)
        .filter(|&h| g.mul(h, e) == g.mul(e, h))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> Arc<FiniteGroup> {
        Arc::new(close_group("S", 3, &[vec![1, 0, 2], vec![0, 2, 1]], 1024).unwrap())
    }

    fn z(m: usize) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic("Z", m).unwrap())
    }

    #[test]
    fn closes_small_groups() {
        let z2 = close_group("A", 2, &[vec![1, 0]], 1024).unwrap();
        assert_eq!(z2.order(), 2);
        assert_eq!(z2.mult, vec![0, 1, 1, 0]);
        assert_eq!(close_group("B", 3, &[vec![1, 2, 0]], 1024).unwrap().order(), 3);
        let s = s3();
        assert_eq!(s.order(), 6);
        assert!(s.check_axioms());
    }

    #[test]
    fn s3_order_matches_brute_force_closure() {
        // independent closure: repeatedly compose all pairs until nothing new
        let mut set: Vec<Vec<u32>> = vec![vec![0, 1, 2], vec![1, 0, 2], vec![0, 2, 1]];
        loop {
            let mut grew = false;
            for i in 0..set.len() {
                for j in 0..set.len() {
                    let c = compose(&set[i], &set[j]);
                    if !set.contains(&c) {
                        set.push(c);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        assert_eq!(set.len(), 6);
        assert_eq!(s3().order(), set.len());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            close_group("A", 3, &[vec![0, 0, 1]], 1024),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            close_group("A", 2, &[vec![0]], 1024),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            close_group("S", 4, &[vec![1, 0, 2, 3], vec![1, 2, 3, 0]], 10),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn redundant_generators_do_not_change_element_set() {
        let base = s3();
        let extra = close_group(
            "S",
            3,
            &[vec![1, 0, 2], vec![0, 2, 1], vec![1, 2, 0]],
            1024,
        )
        .unwrap();
        let mut a = base.elements().to_vec();
        let mut b = extra.elements().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn spelling_round_trips() {
        let s = s3();
        for e in 0..s.order() as u32 {
            assert_eq!(s.from_spelling(&s.spelling(e)).unwrap(), e);
        }
    }

    #[test]
    fn homs_from_generator_images() {
        let z2 = z(2);
        let z3 = z(3);
        let id = hom_from_generator_images(&z2, &z2, &[1]).unwrap();
        assert_eq!(id.image(), &[0, 1]);
        // b -> b^2 in Z3 is inversion
        let b2 = z3.mul(1, 1);
        let inv = hom_from_generator_images(&z3, &z3, &[b2]).unwrap();
        for e in 0..3 {
            assert_eq!(inv.apply(e), z3.inv(e));
        }
        assert!(matches!(
            hom_from_generator_images(&z3, &z2, &[1]),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn hom_enumeration_counts() {
        let z2 = z(2);
        let z3 = z(3);
        let s = s3();
        assert_eq!(enumerate_homs(&z2, &z2, 1 << 16).unwrap().len(), 2);
        let z3z2 = enumerate_homs(&z3, &z2, 1 << 16).unwrap();
        assert_eq!(z3z2.len(), 1);
        assert!(z3z2[0].is_trivial());
        // oracle: involutions of S3 plus identity
        let involutions = (1..6u32).filter(|&x| s.mul(x, x) == 0).count();
        assert_eq!(involutions, 3);
        let z2s3 = enumerate_homs(&z2, &s, 1 << 16).unwrap();
        assert_eq!(z2s3.len(), involutions + 1);
        assert!(z2s3[0].is_trivial());
        assert!(matches!(
            enumerate_homs(&s, &s, 10),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn enumerated_homs_are_homomorphisms() {
        let s = s3();
        let groups = [z(2), z(3), s.clone(), z(4)];
        for a in &groups {
            for b in &groups {
                for h in enumerate_homs(a, b, 1 << 16).unwrap() {
                    for i in 0..a.order() as u32 {
                        for j in 0..a.order() as u32 {
                            assert_eq!(h.apply(a.mul(i, j)), b.mul(h.apply(i), h.apply(j)));
                        }
                    }
                }
            }
        }
        // Aut(S3) has 6 elements
        let auts = enumerate_homs(&s, &s, 1 << 16).unwrap();
        assert_eq!(auts.iter().filter(|h| h.is_bijective()).count(), 6);
    }

    #[test]
    fn centralizers() {
        let z2 = z(2);
        assert_eq!(centralizer_in_factor(&z2, 1), vec![0, 1]);
        let s = s3();
        let t = s.generators()[0];
        assert_eq!(centralizer_in_factor(&s, t), vec![0, t]);
        assert_eq!(centralizer_in_factor(&s, 0), (0..6).collect::<Vec<_>>());
        for e in 0..6 {
            let c = centralizer_in_factor(&s, e);
            assert!(c.contains(&0) && c.contains(&e));
            for &x in &c {
                assert!(c.contains(&s.inv(x)));
                for &y in &c {
                    assert!(c.contains(&s.mul(x, y)));
                }
            }
        }
    }
}
