//! Subuniverse generation and enumeration.

use std::collections::{HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::budget::Budget;
use crate::error::{invalid, Result};
use crate::relation::Relation;

/// Calls `f` on every `m`-tuple over `{0..=i}` containing `i` at least once.
///
/// Over `i = 0, 1, ..` this visits every tuple exactly once, which is what a
/// semi-naive closure needs.
pub(crate) fn for_each_tuple_with_max(i: usize, m: usize, mut f: impl FnMut(&[usize])) {
    let mut t = vec![0usize; m];
    for p in 0..m {
        // positions < p range over [0, i), position p is i, positions > p over [0, i]
        if p > 0 && i == 0 {
            break;
        }
        for slot in t.iter_mut() {
            *slot = 0;
        }
        t[p] = i;
        'outer: loop {
            f(&t);
            let mut pos = m;
            loop {
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                if pos == p {
                    continue;
                }
                let bound = if pos < p { i } else { i + 1 };
                t[pos] += 1;
                if t[pos] < bound {
                    break;
                }
                t[pos] = 0;
            }
        }
    }
}

/// Incremental worklist closure of a set under all operations.
#[derive(Clone)]
pub(crate) struct Closure<'a> {
    algebra: &'a FiniteAlgebra,
    members: Vec<Elem>,
    present: FixedBitSet,
    processed: usize,
}

impl<'a> Closure<'a> {
    /// Starts from the values of the constants of `algebra`.
    pub(crate) fn new(algebra: &'a FiniteAlgebra) -> Self {
        let mut c = Closure {
            algebra,
            members: Vec::new(),
            present: FixedBitSet::with_capacity(algebra.size()),
            processed: 0,
        };
        for (i, op) in algebra.ops().iter().enumerate() {
            if op.arity() == 0 {
                c.insert(algebra.apply(i, &[]));
            }
        }
        c
    }

    /// Starts from a set already known to be closed.
    pub(crate) fn from_closed(algebra: &'a FiniteAlgebra, closed: &[Elem]) -> Self {
        let mut present = FixedBitSet::with_capacity(algebra.size());
        for &e in closed {
            present.insert(e as usize);
        }
        Closure {
            algebra,
            members: closed.to_vec(),
            present,
            processed: closed.len(),
        }
    }

    pub(crate) fn insert(&mut self, e: Elem) {
        if !self.present.put(e as usize) {
            self.members.push(e);
        }
    }

    pub(crate) fn contains(&self, e: Elem) -> bool {
        self.present.contains(e as usize)
    }

    pub(crate) fn run(&mut self) {
        let mut args = Vec::new();
        let mut found = Vec::new();
        while self.processed < self.members.len() {
            let i = self.processed;
            for (op_index, op) in self.algebra.ops().iter().enumerate() {
                let m = op.arity();
                if m == 0 {
                    continue;
                }
                args.resize(m, 0);
                let members = &self.members;
                let algebra = self.algebra;
                let present = &self.present;
                for_each_tuple_with_max(i, m, |picks| {
                    for (a, &p) in args.iter_mut().zip(picks) {
                        *a = members[p];
                    }
                    let r = algebra.apply(op_index, &args);
                    if !present.contains(r as usize) {
                        found.push(r);
                    }
                });
                for r in found.drain(..) {
                    self.insert(r);
                }
            }
            self.processed += 1;
        }
    }

    pub(crate) fn bits(&self) -> &FixedBitSet {
        &self.present
    }

    pub(crate) fn into_sorted(self) -> Vec<Elem> {
        let mut m = self.members;
        m.sort_unstable();
        m
    }
}

/// The least subuniverse of `algebra` containing `seed`, sorted.
///
/// An empty seed is accepted only when `algebra` has constants.
pub fn generated_subuniverse(algebra: &FiniteAlgebra, seed: &[Elem]) -> Result<Vec<Elem>> {
    if seed.is_empty() && !algebra.has_constants() {
        return Err(invalid(format!(
            "empty seed generates nothing in {} (no constants)",
            algebra.name()
        )));
    }
    if let Some(bad) = seed.iter().find(|&&e| e as usize >= algebra.size()) {
        return Err(invalid(format!("seed element {bad} outside universe")));
    }
    let mut c = Closure::new(algebra);
    for &e in seed {
        c.insert(e);
    }
    c.run();
    Ok(c.into_sorted())
}

fn sort_canonically(sets: &mut [Vec<Elem>]) {
    sets.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
}

/// All nonempty subuniverses as sorted element lists, ordered by `(cardinality, lexicographic)`.
pub fn enumerate_subuniverse_sets(algebra: &FiniteAlgebra, budget: Budget) -> Result<Vec<Vec<Elem>>> {
    let n = algebra.size() as u128;
    budget.check(&format!("universe of {}", algebra.name()), n)?;
    // one round of one-element extensions materializes up to |A| closures of up to |A| elements
    budget.check(&format!("extension round of {} (|A|^2)", algebra.name()), n * n)?;
    let mut stored: u128 = 0;
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    let mut found: Vec<Vec<Elem>> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();

    let mut record = |c: Closure<'_>,
                      seen: &mut HashSet<FixedBitSet>,
                      found: &mut Vec<Vec<Elem>>,
                      queue: &mut VecDeque<usize>|
     -> Result<()> {
        if c.bits().is_clear() || seen.contains(c.bits()) {
            return Ok(());
        }
        seen.insert(c.bits().clone());
        found.push(c.into_sorted());
        queue.push_back(found.len() - 1);
        stored += found[found.len() - 1].len() as u128;
        budget.check("elements stored across subuniverses", stored)
    };

    if algebra.has_constants() {
        let mut c = Closure::new(algebra);
        c.run();
        record(c, &mut seen, &mut found, &mut queue)?;
    }
    for x in 0..algebra.size() as Elem {
        let mut c = Closure::new(algebra);
        c.insert(x);
        c.run();
        record(c, &mut seen, &mut found, &mut queue)?;
    }
    while let Some(idx) = queue.pop_front() {
        let base = found[idx].clone();
        let start = Closure::from_closed(algebra, &base);
        let extensions: Vec<Closure<'_>> = (0..algebra.size() as Elem)
            .into_par_iter()
            .filter(|&x| !start.contains(x))
            .map(|x| {
                let mut c = start.clone();
                c.insert(x);
                c.run();
                c
            })
            .collect();
        for c in extensions {
            record(c, &mut seen, &mut found, &mut queue)?;
        }
    }
    sort_canonically(&mut found);
    Ok(found)
}

/// All nonempty subuniverses as relations.
///
/// When `algebra` is a power `B^k` the relations are `k`-ary over `B`;
/// otherwise they are unary.
pub fn enumerate_subuniverses(algebra: &FiniteAlgebra, budget: Budget) -> Result<Vec<Relation>> {
    let sets = enumerate_subuniverse_sets(algebra, budget)?;
    let arity = algebra.coordinate_count();
    let base = algebra.coordinate_size();
    Ok(sets
        .iter()
        .map(|s| Relation::from_codes(arity, base, s))
        .collect())
}

/// A generating set chosen greedily: repeatedly add the least element not yet generated.
pub fn generating_set(algebra: &FiniteAlgebra) -> Vec<Elem> {
    let mut gens = Vec::new();
    let mut c = Closure::new(algebra);
    c.run();
    for x in 0..algebra.size() as Elem {
        if !c.contains(x) {
            gens.push(x);
            c.insert(x);
            c.run();
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::for_each_tuple;
    use crate::catalog;

    #[test]
    fn tuples_with_max_cover_each_tuple_once() {
        for m in 1..4 {
            let mut seen = HashSet::new();
            for i in 0..4 {
                for_each_tuple_with_max(i, m, |t| {
                    assert_eq!(*t.iter().max().unwrap(), i);
                    assert!(seen.insert(t.to_vec()));
                });
            }
            assert_eq!(seen.len(), 4usize.pow(m as u32));
        }
    }

    #[test]
    fn z4_generation() {
        let z4 = catalog::cyclic_group(4);
        assert_eq!(generated_subuniverse(&z4, &[2]).unwrap(), vec![0, 2]);
        assert_eq!(generated_subuniverse(&z4, &[1]).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(generated_subuniverse(&z4, &[]).unwrap(), vec![0]);
        assert_eq!(
            generated_subuniverse(&z4, &[0, 1, 2, 3]).unwrap(),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn empty_seed_without_constants_is_an_error() {
        assert!(generated_subuniverse(&catalog::cyclic_affine(3), &[]).is_err());
        assert!(generated_subuniverse(&catalog::cyclic_affine(3), &[5]).is_err());
    }

    /// Brute-force oracle: filter every nonempty subset for closure.
    fn brute_force_subuniverses(a: &FiniteAlgebra) -> Vec<Vec<Elem>> {
        let n = a.size();
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            let set: Vec<Elem> = (0..n as Elem).filter(|&x| mask >> x & 1 == 1).collect();
            let mut closed = true;
            for (i, op) in a.ops().iter().enumerate() {
                for_each_tuple(set.len(), op.arity(), |picks| {
                    let args: Vec<Elem> = picks.iter().map(|&p| set[p as usize]).collect();
                    if mask >> a.apply(i, &args) & 1 == 0 {
                        closed = false;
                    }
                    closed
                });
            }
            if closed {
                out.push(set);
            }
        }
        sort_canonically(&mut out);
        out
    }

    #[test]
    fn matches_brute_force_on_small_algebras() {
        let b = Budget::default();
        for a in [
            catalog::cyclic_group(2),
            catalog::cyclic_group(4),
            catalog::cyclic_affine(4),
            catalog::klein_group(),
            catalog::semilattice2(),
            catalog::symmetric_group_s3(),
            catalog::cyclic_group(2).power(3, b).unwrap(),
            catalog::cyclic_affine(2).power(3, b).unwrap(),
        ] {
            assert_eq!(
                enumerate_subuniverse_sets(&a, b).unwrap(),
                brute_force_subuniverses(&a),
                "{}",
                a.name()
            );
        }
    }

    /// Number of subspaces of GF(q)^n, via Gaussian binomials.
    fn subspace_count(q: u64, n: u32) -> u64 {
        let mut total = 0;
        for k in 0..=n {
            let mut num = 1u64;
            let mut den = 1u64;
            for i in 0..k {
                num *= q.pow(n - i) - 1;
                den *= q.pow(i + 1) - 1;
            }
            total += num / den;
        }
        total
    }

    #[test]
    fn subspace_counts_of_powers() {
        let b = Budget::default();
        let z2 = catalog::cyclic_group(2);
        assert_eq!(enumerate_subuniverses(&z2, b).unwrap().len(), 2);
        let z2_4 = z2.power(4, b).unwrap();
        let subs = enumerate_subuniverses(&z2_4, b).unwrap();
        assert_eq!(subs.len(), 67);
        assert_eq!(subs.len() as u64, subspace_count(2, 4));
        assert!(subs.iter().all(|r| r.arity() == 4 && r.base_size() == 2));
        let z3_4 = catalog::cyclic_group(3).power(4, b).unwrap();
        let n = enumerate_subuniverses(&z3_4, b).unwrap().len();
        assert_eq!(n, 212);
        assert_eq!(n as u64, subspace_count(3, 4));
    }

    #[test]
    fn enumerated_subuniverses_are_closed() {
        let b = Budget::default();
        let a = catalog::cyclic_group(4).power(2, b).unwrap();
        for s in enumerate_subuniverse_sets(&a, b).unwrap() {
            assert_eq!(generated_subuniverse(&a, &s).unwrap(), s);
        }
    }

    #[test]
    fn generating_sets_generate() {
        let b = Budget::default();
        for a in [
            catalog::cyclic_group(4).power(3, b).unwrap(),
            catalog::symmetric_group_s3(),
            catalog::cyclic_affine(3).power(2, b).unwrap(),
        ] {
            let g = generating_set(&a);
            if g.is_empty() {
                assert_eq!(generated_subuniverse(&a, &[]).unwrap().len(), a.size());
            } else {
                assert_eq!(generated_subuniverse(&a, &g).unwrap().len(), a.size());
            }
        }
        let z4_3 = catalog::cyclic_group(4).power(3, b).unwrap();
        assert_eq!(generating_set(&z4_3).len(), 3);
    }

    #[test]
    fn budget_is_enforced() {
        let z2 = catalog::cyclic_group(2).power(4, Budget::default()).unwrap();
        assert!(enumerate_subuniverse_sets(&z2, Budget(10)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn generation_is_monotone_and_idempotent(
                a in proptest::collection::vec(0u32..16, 0..4),
                b in proptest::collection::vec(0u32..16, 0..4),
            ) {
                let alg = catalog::cyclic_group(4).power(2, Budget::default()).unwrap();
                let ga = generated_subuniverse(&alg, &a).unwrap();
                let mut ab = a.clone();
                ab.extend(&b);
                let gab = generated_subuniverse(&alg, &ab).unwrap();
                prop_assert!(ga.iter().all(|x| gab.binary_search(x).is_ok()));
                prop_assert_eq!(generated_subuniverse(&alg, &ga).unwrap(), ga);
            }
        }
    }
}
