//! Alter egos made of compatible relations, duals `B* = Hom(B, A)` with the
//! lifted relations, double duals, and the evaluation maps `e_B`.
//!
//! All structures are finite and discrete, so continuity is automatic and the
//! double dual is just the set of relation-preserving maps `B* -> A`.

use std::collections::HashSet;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::budget::Budget;
use crate::error::{invalid, Error, Result};
use crate::hom::{enumerate_homs, Homomorphism};
use crate::homgroups::prime_signature;
use crate::relation::{compatibility_witness, Relation};
use crate::subcong::SubalgebraWitness;
use crate::subuniverse::{enumerate_subuniverse_sets, enumerate_subuniverses};

/// `max α_i³` for `|A| = Π p_i^{α_i}`: enough generators for every `𝓗(A², S)`
/// with `S` a subdirectly irreducible in the variety of `A`.
pub fn generator_bound(size: usize) -> usize {
    let a = prime_signature(size as u64).max_exponent() as usize;
    a * a * a
}

/// `N = max(4, 1 + max α_i³)`; 4 for the trivial algebra.
pub fn arity_bound_for_size(size: usize) -> usize {
    if size <= 1 {
        return 4;
    }
    (1 + generator_bound(size)).max(4)
}

pub fn arity_bound(a: &FiniteAlgebra) -> usize {
    arity_bound_for_size(a.size())
}

/// A purely relational alter ego `⟨A; G⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlterEgo {
    base_size: usize,
    relations: Vec<Relation>,
    partial: bool,
}

impl AlterEgo {
    /// A caller-chosen set of relations, each checked for compatibility.
    pub fn partial(a: &FiniteAlgebra, relations: Vec<Relation>) -> Result<Self> {
        for (i, r) in relations.iter().enumerate() {
            if r.base_size() != a.size() {
                return Err(invalid(format!("relation {i} is over a different universe")));
            }
            if let Some((op, rows, image)) = compatibility_witness(a, r) {
                return Err(invalid(format!(
                    "relation {i} is not compatible with {}: {op} maps {rows:?} to {image:?}",
                    a.name()
                )));
            }
        }
        Ok(AlterEgo {
            base_size: a.size(),
            relations,
            partial: true,
        })
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    /// Whether the relations were supplied rather than all `N`-ary ones.
    pub fn is_partial(&self) -> bool {
        self.partial
    }
}

/// All `arity`-ary compatible relations of `a`.
pub fn build_alter_ego(a: &FiniteAlgebra, arity: usize, budget: Budget) -> Result<AlterEgo> {
    let power = a.power(arity, budget).map_err(with_partial_hint)?;
    let relations = enumerate_subuniverses(&power, budget).map_err(with_partial_hint)?;
    Ok(AlterEgo {
        base_size: a.size(),
        relations,
        partial: false,
    })
}

fn with_partial_hint(e: Error) -> Error {
    match e {
        Error::BudgetExceeded {
            what, count, limit, ..
        } => Error::BudgetExceeded {
            what,
            count,
            limit,
            hint: Some("supply a relation subset with --partial-relations".into()),
        },
        other => other,
    }
}

/// `B* = Hom(B, A)` with every alter-ego relation lifted pointwise.
#[derive(Debug, Clone)]
pub struct DualStructure {
    pub b: SubalgebraWitness,
    /// Homomorphisms from the re-indexed subalgebra: `homs[i].apply(j)` is the
    /// image of `b.carrier()[j]`.
    pub homs: Vec<Homomorphism>,
    /// For each alter-ego relation, the tuples of hom indices lying pointwise in it.
    pub lifted: Vec<Vec<Vec<usize>>>,
}

/// Builds `B*` for a subalgebra `b` of `ambient` (typically a power of `A`).
pub fn dual_of(
    a: &FiniteAlgebra,
    ambient: &FiniteAlgebra,
    b: &SubalgebraWitness,
    ego: &AlterEgo,
    budget: Budget,
) -> Result<DualStructure> {
    if ego.base_size != a.size() {
        return Err(invalid("alter ego over a different universe"));
    }
    let sub = ambient.subalgebra(b.carrier(), "B")?;
    let homs = enumerate_homs(&sub, a, budget)?;
    let lifted = ego
        .relations
        .iter()
        .map(|r| lift_relation(&homs, sub.size(), a.size(), r, budget))
        .collect::<Result<_>>()?;
    Ok(DualStructure {
        b: b.clone(),
        homs,
        lifted,
    })
}

/// Tuples `(f_1..f_k)` of hom indices with `(f_1(x)..f_k(x)) ∈ r` for every `x`.
///
/// Depth-first over positions, pruning with the prefixes of `r`.
fn lift_relation(homs: &[Homomorphism], b_size: usize, q: usize, r: &Relation, budget: Budget) -> Result<Vec<Vec<usize>>> {
    let k = r.arity();
    let q64 = q as u64;
    let mut prefixes: Vec<HashSet<u64>> = vec![HashSet::new(); k + 1];
    for t in r.tuples() {
        let mut code = 0u64;
        for (d, &v) in t.iter().enumerate() {
            code = code * q64 + v as u64;
            prefixes[d + 1].insert(code);
        }
    }
    struct Search<'a> {
        homs: &'a [Homomorphism],
        prefixes: &'a [HashSet<u64>],
        q: u64,
        b_size: usize,
        budget: Budget,
        visited: u128,
        pick: Vec<usize>,
        out: Vec<Vec<usize>>,
    }
    impl Search<'_> {
        fn rec(&mut self, depth: usize, codes: &[u64]) -> Result<()> {
            if depth + 1 == self.prefixes.len() {
                self.out.push(self.pick.clone());
                return self.budget.check("lifted relation tuples", self.out.len() as u128);
            }
            let mut next = vec![0u64; self.b_size];
            for f in 0..self.homs.len() {
                self.visited += 1;
                self.budget.check("lifted relation search nodes", self.visited)?;
                let h = &self.homs[f];
                let ok = (0..self.b_size).all(|x| {
                    next[x] = codes[x] * self.q + h.apply(x as Elem) as u64;
                    self.prefixes[depth + 1].contains(&next[x])
                });
                if ok {
                    self.pick.push(f);
                    self.rec(depth + 1, &next)?;
                    self.pick.pop();
                }
            }
            Ok(())
        }
    }
    let mut search = Search {
        homs,
        prefixes: &prefixes,
        q: q64,
        b_size,
        budget,
        visited: 0,
        pick: Vec::with_capacity(k),
        out: Vec::new(),
    };
    search.rec(0, &vec![0; b_size])?;
    Ok(search.out)
}

/// All maps `φ: B* -> A` preserving every lifted relation, sorted.
///
/// Backtracking over hom indices; each constraint is checked as soon as its
/// largest index is assigned. Full relations constrain nothing and are skipped.
pub fn double_dual(dual: &DualStructure, ego: &AlterEgo, budget: Budget) -> Result<Vec<Vec<Elem>>> {
    let m = dual.homs.len();
    let mut by_last: Vec<Vec<(usize, &[usize])>> = vec![Vec::new(); m];
    for (ri, (r, tuples)) in ego.relations.iter().zip(&dual.lifted).enumerate() {
        if r.is_full() {
            continue;
        }
        let mut seen = HashSet::new();
        for t in tuples {
            if seen.insert(t.as_slice()) {
                let last = *t.iter().max().expect("positive arity");
                by_last[last].push((ri, t.as_slice()));
            }
        }
    }
    struct Search<'a> {
        base: usize,
        by_last: &'a [Vec<(usize, &'a [usize])>],
        rels: &'a [Relation],
        budget: Budget,
        visited: u128,
        phi: Vec<Elem>,
        image: Vec<Elem>,
        out: Vec<Vec<Elem>>,
    }
    impl Search<'_> {
        fn rec(&mut self, v: usize) -> Result<()> {
            if v == self.phi.len() {
                self.out.push(self.phi.clone());
                return self.budget.check("maps in the double dual", self.out.len() as u128);
            }
            for a in 0..self.base as Elem {
                self.visited += 1;
                self.budget.check("double dual search nodes", self.visited)?;
                self.phi[v] = a;
                let Search { by_last, rels, phi, image, .. } = self;
                let ok = by_last[v].iter().all(|&(ri, t)| {
                    image.clear();
                    image.extend(t.iter().map(|&f| phi[f]));
                    rels[ri].contains(image)
                });
                if ok {
                    self.rec(v + 1)?;
                }
            }
            Ok(())
        }
    }
    let mut search = Search {
        base: ego.base_size,
        by_last: &by_last,
        rels: &ego.relations,
        budget,
        visited: 0,
        phi: vec![0; m],
        image: Vec::new(),
        out: Vec::new(),
    };
    search.rec(0)?;
    Ok(search.out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationReport {
    pub power: usize,
    pub carrier: Vec<Elem>,
    pub b_size: usize,
    pub hom_count: usize,
    pub double_dual_size: usize,
    pub injective: bool,
    pub bijective: bool,
    /// Elements of the double dual not of the form `e_B(x)`.
    pub missing: Vec<Vec<Elem>>,
}

/// `e_B(x)(f) = f(x)`; compares its image with the double dual.
pub fn evaluate(
    a: &FiniteAlgebra,
    ambient: &FiniteAlgebra,
    power: usize,
    b: &SubalgebraWitness,
    ego: &AlterEgo,
    budget: Budget,
) -> Result<EvaluationReport> {
    let dual = dual_of(a, ambient, b, ego, budget)?;
    let dd = double_dual(&dual, ego, budget)?;
    let images: Vec<Vec<Elem>> = (0..b.len() as Elem)
        .map(|x| dual.homs.iter().map(|f| f.apply(x)).collect())
        .collect();
    let distinct: HashSet<&Vec<Elem>> = images.iter().collect();
    let injective = distinct.len() == images.len();
    let ddset: HashSet<&Vec<Elem>> = dd.iter().collect();
    if let Some(x) = images.iter().position(|e| !ddset.contains(e)) {
        return Err(Error::Invariant(format!(
            "e_B({}) does not preserve the lifted relations",
            b.carrier()[x]
        )));
    }
    let missing: Vec<Vec<Elem>> = dd.iter().filter(|p| !distinct.contains(p)).cloned().collect();
    Ok(EvaluationReport {
        power,
        carrier: b.carrier().to_vec(),
        b_size: b.len(),
        hom_count: dual.homs.len(),
        double_dual_size: dd.len(),
        injective,
        bijective: injective && dd.len() == b.len(),
        missing,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityReport {
    pub max_power: usize,
    pub relations: usize,
    pub partial: bool,
    pub reports: Vec<EvaluationReport>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.bijective)
    }
}

/// Checks `e_B` for every subalgebra `B` of `A^k`, `1 <= k <= max_power`.
pub fn verify_duality(
    a: &FiniteAlgebra,
    ego: &AlterEgo,
    max_power: usize,
    budget: Budget,
) -> Result<DualityReport> {
    let mut reports = Vec::new();
    for k in 1..=max_power {
        let ak = a.power(k, budget)?;
        for carrier in enumerate_subuniverse_sets(&ak, budget)? {
            let b = SubalgebraWitness::new(&ak, carrier)?;
            reports.push(evaluate(a, &ak, k, &b, ego, budget)?);
        }
    }
    Ok(DualityReport {
        max_power,
        relations: ego.relations.len(),
        partial: ego.partial,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn bounds() {
        assert_eq!(arity_bound_for_size(2), 4);
        assert_eq!(arity_bound_for_size(4), 9);
        assert_eq!(arity_bound_for_size(12), 9);
        assert_eq!(arity_bound_for_size(8), 28);
        assert_eq!(arity_bound_for_size(1), 4);
        assert_eq!(generator_bound(2), 1);
    }

    #[test]
    fn alter_ego_sizes() {
        assert_eq!(build_alter_ego(&catalog::cyclic_group(2), 4, b()).unwrap().relations().len(), 67);
        assert_eq!(build_alter_ego(&catalog::cyclic_group(3), 4, b()).unwrap().relations().len(), 212);
        assert_eq!(build_alter_ego(&catalog::cyclic_group(2), 1, b()).unwrap().relations().len(), 2);
        let err = build_alter_ego(&catalog::cyclic_group(4), 9, b()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { hint: Some(ref h), .. } if h.contains("partial")));
    }

    #[test]
    fn duals_over_z2() {
        let z2 = catalog::cyclic_group(2);
        let ego = build_alter_ego(&z2, 4, b()).unwrap();
        let full = SubalgebraWitness::new(&z2, vec![0, 1]).unwrap();
        let d = dual_of(&z2, &z2, &full, &ego, b()).unwrap();
        assert_eq!(d.homs.len(), 2);
        assert_eq!(double_dual(&d, &ego, b()).unwrap().len(), 2);

        let zero = SubalgebraWitness::new(&z2, vec![0]).unwrap();
        let d = dual_of(&z2, &z2, &zero, &ego, b()).unwrap();
        assert_eq!(d.homs.len(), 1);
        assert_eq!(double_dual(&d, &ego, b()).unwrap(), vec![vec![0]]);

        let sq = z2.power(2, b()).unwrap();
        let all = SubalgebraWitness::new(&sq, vec![0, 1, 2, 3]).unwrap();
        let d = dual_of(&z2, &sq, &all, &ego, b()).unwrap();
        assert_eq!(d.homs.len(), 4);
        assert_eq!(double_dual(&d, &ego, b()).unwrap().len(), 4);
    }

    #[test]
    fn duality_holds_for_z2_and_fails_for_the_diagonal_alone() {
        let z2 = catalog::cyclic_group(2);
        let ego = build_alter_ego(&z2, 4, b()).unwrap();
        let r = verify_duality(&z2, &ego, 2, b()).unwrap();
        assert!(r.passed());
        assert!(r.reports.iter().all(|e| e.injective));

        let diag = AlterEgo::partial(&z2, vec![Relation::diagonal(2, 2)]).unwrap();
        let r = verify_duality(&z2, &diag, 2, b()).unwrap();
        assert!(!r.passed());
        let z2_itself = r.reports.iter().find(|e| e.power == 1 && e.b_size == 2).unwrap();
        assert_eq!(z2_itself.double_dual_size, 4);
        assert_eq!(z2_itself.missing.len(), 2);
    }

    #[test]
    fn adding_relations_never_grows_the_double_dual() {
        let z3 = catalog::cyclic_group(3);
        let sq = z3.power(2, b()).unwrap();
        let whole = SubalgebraWitness::new(&sq, (0..9).collect()).unwrap();
        // binary relations cannot express addition: every odd map of B* survives
        let binary = build_alter_ego(&z3, 2, b()).unwrap();
        let d = dual_of(&z3, &sq, &whole, &binary, b()).unwrap();
        assert_eq!(double_dual(&d, &binary, b()).unwrap().len(), 81);

        let all = build_alter_ego(&z3, 3, b()).unwrap();
        let mut prev = usize::MAX;
        for i in 0..=all.relations().len() {
            let ego = AlterEgo::partial(&z3, all.relations()[..i].to_vec()).unwrap();
            let d = dual_of(&z3, &sq, &whole, &ego, b()).unwrap();
            let size = double_dual(&d, &ego, b()).unwrap().len();
            assert!(size <= prev);
            prev = size;
        }
        assert_eq!(prev, 9);
    }

    #[test]
    fn partial_rejects_incompatible_relations() {
        let z2 = catalog::cyclic_group(2);
        let r = Relation::new(1, 2, vec![vec![1]]).unwrap();
        assert!(AlterEgo::partial(&z2, vec![r]).is_err());
    }
}
