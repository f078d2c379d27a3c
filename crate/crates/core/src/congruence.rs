//! Congruences, their lattice, and quotient algebras.

use std::collections::HashSet;

use crate::algebra::{for_each_tuple, index_to_args, Elem, FiniteAlgebra};
use crate::budget::Budget;
use crate::error::{invalid, invariant, Result};
use crate::hom::Homomorphism;

/// A partition of `{0..n-1}` stored as canonical block labels.
///
/// Labels are assigned in order of first occurrence, so two congruences are
/// equal exactly when their label vectors are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    class_of: Vec<u32>,
    classes: usize,
}

impl Congruence {
    /// Verifies that `class_of` is preserved by every operation of `algebra`.
    pub fn new(algebra: &FiniteAlgebra, class_of: Vec<u32>) -> Result<Self> {
        if class_of.len() != algebra.size() {
            return Err(invalid(format!(
                "partition covers {} elements, algebra has {}",
                class_of.len(),
                algebra.size()
            )));
        }
        let c = Self::from_labels(&class_of);
        if let Some((op, x, y)) = c.violation(algebra) {
            return Err(invalid(format!(
                "partition is not preserved by {op}: {x:?} ~ {y:?} but images differ"
            )));
        }
        Ok(c)
    }

    /// Canonicalizes arbitrary labels without checking compatibility.
    pub(crate) fn from_labels(labels: &[u32]) -> Self {
        let mut map = std::collections::HashMap::new();
        let class_of: Vec<u32> = labels
            .iter()
            .map(|l| {
                let next = map.len() as u32;
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Congruence {
            classes: map.len(),
            class_of,
        }
    }

    pub(crate) fn from_blocks(n: usize, blocks: &[Vec<Elem>]) -> Result<Self> {
        let mut labels = vec![u32::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                let slot = labels
                    .get_mut(x as usize)
                    .ok_or_else(|| invalid(format!("element {x} outside universe")))?;
                if *slot != u32::MAX {
                    return Err(invalid(format!("element {x} appears in two classes")));
                }
                *slot = b as u32;
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == u32::MAX) {
            return Err(invalid(format!("element {x} belongs to no class")));
        }
        Ok(Self::from_labels(&labels))
    }

    pub fn identity(n: usize) -> Self {
        Congruence {
            class_of: (0..n as u32).collect(),
            classes: n,
        }
    }

    pub fn full(n: usize) -> Self {
        Congruence {
            class_of: vec![0; n],
            classes: 1,
        }
    }

    pub fn base_size(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_of(&self, x: Elem) -> u32 {
        self.class_of[x as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.class_of
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn related(&self, x: Elem, y: Elem) -> bool {
        self.class_of[x as usize] == self.class_of[y as usize]
    }

    /// Blocks in order of their smallest element.
    pub fn classes(&self) -> Vec<Vec<Elem>> {
        let mut out = vec![Vec::new(); self.classes];
        for (x, &c) in self.class_of.iter().enumerate() {
            out[c as usize].push(x as Elem);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.classes == self.class_of.len()
    }

    /// `self ⊆ other` as sets of pairs.
    pub fn is_below(&self, other: &Congruence) -> bool {
        let mut image = vec![u32::MAX; self.classes];
        for (x, &c) in self.class_of.iter().enumerate() {
            let o = other.class_of[x];
            if image[c as usize] == u32::MAX {
                image[c as usize] = o;
            } else if image[c as usize] != o {
                return false;
            }
        }
        true
    }

    pub fn meet(&self, other: &Congruence) -> Congruence {
        let labels: Vec<u32> = self
            .class_of
            .iter()
            .zip(&other.class_of)
            .map(|(&a, &b)| a * other.classes as u32 + b)
            .collect();
        Self::from_labels(&labels)
    }

    /// Join as equivalence relations (not checked for compatibility).
    pub(crate) fn join_partition(&self, other: &Congruence) -> Congruence {
        let mut uf = UnionFind::new(self.class_of.len());
        for part in [self, other] {
            let mut first = vec![u32::MAX; part.classes];
            for (x, &c) in part.class_of.iter().enumerate() {
                if first[c as usize] == u32::MAX {
                    first[c as usize] = x as u32;
                } else {
                    uf.union(first[c as usize], x as u32);
                }
            }
        }
        uf.to_congruence()
    }

    fn violation(&self, algebra: &FiniteAlgebra) -> Option<(String, Vec<Elem>, Vec<Elem>)> {
        // Changing one argument within its class at a time is enough.
        for (i, op) in algebra.ops().iter().enumerate() {
            let m = op.arity();
            let mut found = None;
            for_each_tuple(algebra.size(), m, |args| {
                let r = algebra.apply(i, args);
                let mut other = args.to_vec();
                for pos in 0..m {
                    for y in 0..algebra.size() as Elem {
                        if y != args[pos] && self.related(y, args[pos]) {
                            other[pos] = y;
                            if !self.related(algebra.apply(i, &other), r) {
                                found = Some((op.name().to_string(), args.to_vec(), other.clone()));
                                return false;
                            }
                        }
                    }
                    other[pos] = args[pos];
                }
                true
            });
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Merges the classes of `a` and `b`; returns true if they were distinct.
    pub(crate) fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        true
    }

    pub(crate) fn to_congruence(&mut self) -> Congruence {
        let labels: Vec<u32> = (0..self.parent.len() as u32).map(|x| self.find(x)).collect();
        Congruence::from_labels(&labels)
    }
}

/// The least congruence containing all `pairs`.
///
/// Only pairs that actually merge two blocks are pushed through the unary
/// polynomials; their translates generate the rest by transitivity.
pub fn generated_congruence(algebra: &FiniteAlgebra, pairs: &[(Elem, Elem)]) -> Congruence {
    let n = algebra.size();
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(Elem, Elem)> = Vec::new();
    for &(a, b) in pairs {
        if uf.union(a, b) {
            work.push((a, b));
        }
    }
    let mut args = Vec::new();
    while let Some((a, b)) = work.pop() {
        for (i, op) in algebra.ops().iter().enumerate() {
            let m = op.arity();
            if m == 0 {
                continue;
            }
            args.resize(m, 0);
            let others = n.pow(m as u32 - 1);
            for pos in 0..m {
                for idx in 0..others {
                    // fill every slot but `pos` from idx
                    let mut rest = vec![0; m - 1];
                    index_to_args(n, idx, &mut rest);
                    let mut r = rest.iter();
                    for (k, slot) in args.iter_mut().enumerate() {
                        if k != pos {
                            *slot = *r.next().unwrap();
                        }
                    }
                    args[pos] = a;
                    let x = algebra.apply(i, &args);
                    args[pos] = b;
                    let y = algebra.apply(i, &args);
                    if uf.union(x, y) {
                        work.push((x, y));
                    }
                }
            }
        }
    }
    uf.to_congruence()
}

/// All congruences of `algebra`, sorted by descending class count then labels
/// (so the identity comes first and the full congruence last).
pub fn congruence_lattice(algebra: &FiniteAlgebra, budget: Budget) -> Result<Vec<Congruence>> {
    let n = algebra.size();
    budget.check(
        &format!("pairs of {}", algebra.name()),
        (n as u128) * (n as u128),
    )?;
    let mut principal: Vec<Congruence> = Vec::new();
    let mut seen = HashSet::new();
    for x in 0..n as Elem {
        for y in x + 1..n as Elem {
            let c = generated_congruence(algebra, &[(x, y)]);
            if seen.insert(c.clone()) {
                principal.push(c);
            }
        }
    }
    let mut all: Vec<Congruence> = vec![Congruence::identity(n)];
    seen.clear();
    seen.insert(Congruence::identity(n));
    let mut frontier = all.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for c in &frontier {
            for p in &principal {
                // A join of congruences, closed again under the operations.
                let j = c.join_partition(p);
                let j = close_partition(algebra, &j);
                if seen.insert(j.clone()) {
                    budget.check("number of congruences", seen.len() as u128)?;
                    next.push(j.clone());
                    all.push(j);
                }
            }
        }
        frontier = next;
    }
    all.sort_unstable_by(|a, b| b.classes.cmp(&a.classes).then_with(|| a.class_of.cmp(&b.class_of)));
    Ok(all)
}

fn close_partition(algebra: &FiniteAlgebra, p: &Congruence) -> Congruence {
    let mut pairs = Vec::new();
    for block in p.classes() {
        for w in block.windows(2) {
            pairs.push((w[0], w[1]));
        }
    }
    generated_congruence(algebra, &pairs)
}

/// True iff the congruence lattice has a least non-identity element.
pub fn is_subdirectly_irreducible(algebra: &FiniteAlgebra, budget: Budget) -> Result<bool> {
    Ok(monolith(algebra, budget)?.is_some())
}

/// The least non-identity congruence, if the algebra is subdirectly irreducible.
pub fn monolith(algebra: &FiniteAlgebra, budget: Budget) -> Result<Option<Congruence>> {
    let lattice = congruence_lattice(algebra, budget)?;
    let mut meet: Option<Congruence> = None;
    for c in lattice.iter().filter(|c| !c.is_identity()) {
        meet = Some(match meet {
            None => c.clone(),
            Some(m) => m.meet(c),
        });
    }
    Ok(meet.filter(|m| !m.is_identity()))
}

/// `A/θ` together with the canonical projection.
pub fn quotient_algebra(
    algebra: &FiniteAlgebra,
    theta: &Congruence,
) -> Result<(FiniteAlgebra, Homomorphism)> {
    if theta.base_size() != algebra.size() {
        return Err(invalid("congruence is over a different universe"));
    }
    let classes = theta.classes();
    let k = theta.class_count();
    let mut ops = Vec::new();
    for (i, op) in algebra.ops().iter().enumerate() {
        let m = op.arity();
        let mut table = Vec::with_capacity(k.pow(m as u32));
        let mut reps = vec![0; m];
        let mut err = None;
        for_each_tuple(k, m, |cls| {
            for (r, &c) in reps.iter_mut().zip(cls) {
                *r = classes[c as usize][0];
            }
            let value = theta.class_of(algebra.apply(i, &reps));
            table.push(value);
            true
        });
        // well-definedness: every choice of representatives lands in the same class
        for_each_tuple(algebra.size(), m, |args| {
            let cls: Vec<Elem> = args.iter().map(|&a| theta.class_of(a)).collect();
            let idx = crate::algebra::table_index(k, &cls);
            if theta.class_of(algebra.apply(i, args)) != table[idx] {
                err = Some(format!("{} is not well defined on classes at {args:?}", op.name()));
                return false;
            }
            true
        });
        if let Some(e) = err {
            return Err(invariant(e));
        }
        ops.push((op.name().to_string(), m, table));
    }
    let quotient = FiniteAlgebra::new(format!("{}_q", algebra.name()), k, ops)?;
    let projection = Homomorphism::from_verified(algebra.size(), k, theta.labels().to_vec());
    Ok((quotient, projection))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn mod_two_quotient_of_z4() {
        let z4 = catalog::cyclic_group(4);
        let theta = Congruence::new(&z4, vec![0, 1, 0, 1]).unwrap();
        let (q, f) = quotient_algebra(&z4, &theta).unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(f.map(), &[0, 1, 0, 1]);
        let add = q.op_index("add").unwrap();
        assert_eq!(q.apply(add, &[1, 1]), 0);
        assert!(crate::hom::Homomorphism::new(&z4, &q, f.map().to_vec()).is_ok());
        // q is Z2 on the nose
        let z2 = catalog::cyclic_group(2);
        assert!(crate::hom::Homomorphism::new(&q, &z2, vec![0, 1]).is_ok());
    }

    #[test]
    fn identity_and_full_quotients() {
        let z4 = catalog::cyclic_group(4);
        let (q, f) = quotient_algebra(&z4, &Congruence::identity(4)).unwrap();
        assert_eq!(q.size(), 4);
        assert!(f.is_surjective());
        let (q, _) = quotient_algebra(&z4, &Congruence::full(4)).unwrap();
        assert_eq!(q.size(), 1);
    }

    #[test]
    fn rejects_non_congruence() {
        let z4 = catalog::cyclic_group(4);
        assert!(Congruence::new(&z4, vec![0, 0, 1, 1]).is_err());
        assert!(Congruence::new(&z4, vec![0, 0]).is_err());
    }

    #[test]
    fn lattices() {
        let b = Budget::default();
        assert_eq!(congruence_lattice(&catalog::cyclic_group(4), b).unwrap().len(), 3);
        assert_eq!(congruence_lattice(&catalog::klein_group(), b).unwrap().len(), 5);
        assert_eq!(congruence_lattice(&catalog::cyclic_group(6), b).unwrap().len(), 4);
        // normal subgroups of S3: 1, A3, S3
        assert_eq!(congruence_lattice(&catalog::symmetric_group_s3(), b).unwrap().len(), 3);
        // every equivalence relation on 3 points is a congruence of a set with no ops
        let set3 = FiniteAlgebra::new("set3", 3, vec![]).unwrap();
        assert_eq!(congruence_lattice(&set3, b).unwrap().len(), 5);
    }

    #[test]
    fn lattice_members_are_congruences() {
        let b = Budget::default();
        let a = catalog::cyclic_group(6).power(2, b).unwrap();
        let lat = congruence_lattice(&a, b).unwrap();
        // subgroups of Z6^2 = Z2^2 x Z3^2: 5 * 6
        assert_eq!(lat.len(), 30);
        for c in &lat {
            assert!(Congruence::new(&a, c.labels().to_vec()).is_ok());
        }
        assert!(lat[0].is_identity());
        assert_eq!(lat.last().unwrap().class_count(), 1);
    }

    #[test]
    fn subdirect_irreducibility() {
        let b = Budget::default();
        assert!(is_subdirectly_irreducible(&catalog::cyclic_group(4), b).unwrap());
        assert!(is_subdirectly_irreducible(&catalog::cyclic_group(2), b).unwrap());
        assert!(!is_subdirectly_irreducible(&catalog::klein_group(), b).unwrap());
        assert!(!is_subdirectly_irreducible(&catalog::cyclic_group(6), b).unwrap());
        assert!(!is_subdirectly_irreducible(&catalog::cyclic_group(1), b).unwrap());
        assert!(is_subdirectly_irreducible(&catalog::symmetric_group_s3(), b).unwrap());
    }

    #[test]
    fn meet_and_order() {
        let b = Budget::default();
        let lat = congruence_lattice(&catalog::klein_group(), b).unwrap();
        let atoms: Vec<_> = lat.iter().filter(|c| c.class_count() == 2).collect();
        assert_eq!(atoms.len(), 3);
        assert!(atoms[0].meet(atoms[1]).is_identity());
        assert!(Congruence::identity(4).is_below(atoms[0]));
        assert!(atoms[0].is_below(&Congruence::full(4)));
        assert!(!atoms[0].is_below(atoms[1]));
    }
}
