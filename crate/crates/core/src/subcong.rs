//! Subalgebras versus congruences in an affine algebra: `Θ_B`, `C(α, B)`,
//! their Galois correspondence, meet-irreducible subalgebras and the
//! subdirectly irreducible quotients they determine.

use crate::affine::TernaryTermOperation;
use crate::algebra::{Elem, FiniteAlgebra};
use crate::budget::Budget;
use crate::congruence::{congruence_lattice, monolith, quotient_algebra, Congruence};
use crate::error::{invalid, invariant, Error, Result};
use crate::hom::Homomorphism;
use crate::report::{Report, Verdict};
use crate::subuniverse::{enumerate_subuniverse_sets, generated_subuniverse};

/// A nonempty subuniverse of some ambient algebra (checked at construction).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubalgebraWitness {
    ambient_size: usize,
    carrier: Vec<Elem>,
}

impl SubalgebraWitness {
    pub fn new(ambient: &FiniteAlgebra, mut carrier: Vec<Elem>) -> Result<Self> {
        carrier.sort_unstable();
        carrier.dedup();
        if carrier.is_empty() {
            return Err(invalid("subalgebra carrier must be nonempty"));
        }
        if carrier.iter().any(|&x| x as usize >= ambient.size()) {
            return Err(invalid("subalgebra carrier leaves the universe"));
        }
        if generated_subuniverse(ambient, &carrier)? != carrier {
            return Err(invalid(format!(
                "{:?} is not closed under the operations of {}",
                carrier,
                ambient.name()
            )));
        }
        Ok(SubalgebraWitness {
            ambient_size: ambient.size(),
            carrier,
        })
    }

    pub(crate) fn from_closed(ambient_size: usize, carrier: Vec<Elem>) -> Self {
        SubalgebraWitness {
            ambient_size,
            carrier,
        }
    }

    pub fn carrier(&self) -> &[Elem] {
        &self.carrier
    }

    pub fn ambient_size(&self) -> usize {
        self.ambient_size
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.carrier.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &SubalgebraWitness) -> bool {
        self.carrier.iter().all(|&x| other.contains(x))
    }

    fn membership(&self) -> Vec<bool> {
        let mut m = vec![false; self.ambient_size];
        for &x in &self.carrier {
            m[x as usize] = true;
        }
        m
    }
}

/// A subdirectly irreducible quotient `f: A -> S` with `B = f⁻¹(c)`.
#[derive(Debug, Clone)]
pub struct KernelTriple {
    pub s: FiniteAlgebra,
    pub f: Homomorphism,
    pub c: Elem,
    pub theta: Congruence,
    /// The affine term of `S` induced from the one of `A`.
    pub t_s: TernaryTermOperation,
}

fn check_term(algebra: &FiniteAlgebra, t: &TernaryTermOperation) -> Result<()> {
    if t.base_size() != algebra.size() {
        return Err(invalid(format!(
            "ternary term over {} elements, algebra {} has {}",
            t.base_size(),
            algebra.name(),
            algebra.size()
        )));
    }
    Ok(())
}

fn check_witness(algebra: &FiniteAlgebra, b: &SubalgebraWitness) -> Result<()> {
    if b.ambient_size != algebra.size() {
        return Err(invalid("subalgebra belongs to an algebra of another size"));
    }
    Ok(())
}

/// Labels of the equivalence given by `related`, or an error if it is not one.
fn equivalence_labels(n: usize, related: &[bool]) -> Result<Vec<u32>> {
    let mut labels = vec![u32::MAX; n];
    let mut next = 0;
    for x in 0..n {
        if labels[x] != u32::MAX {
            continue;
        }
        for y in x..n {
            if related[x * n + y] {
                if labels[y] != u32::MAX {
                    return Err(invariant(format!("relation is not transitive at ({x},{y})")));
                }
                labels[y] = next;
            }
        }
        next += 1;
    }
    for x in 0..n {
        for y in 0..n {
            if related[x * n + y] != (labels[x] == labels[y]) {
                return Err(invariant(format!("relation is not an equivalence at ({x},{y})")));
            }
        }
    }
    Ok(labels)
}

/// `Θ_B = {(x,y) : ∀ b ∈ B, t(x,y,b) ∈ B}`, cross-checked against the ∃-form.
pub fn theta_of_subalgebra(
    algebra: &FiniteAlgebra,
    t: &TernaryTermOperation,
    b: &SubalgebraWitness,
) -> Result<Congruence> {
    check_term(algebra, t)?;
    check_witness(algebra, b)?;
    let n = algebra.size();
    let inside = b.membership();
    let mut forall = vec![false; n * n];
    for x in 0..n as Elem {
        for y in 0..n as Elem {
            let all = b.carrier.iter().all(|&e| inside[t.apply(x, y, e) as usize]);
            let any = b.carrier.iter().any(|&e| inside[t.apply(x, y, e) as usize]);
            if all != any {
                return Err(invariant(format!(
                    "the ∀ and ∃ descriptions of Θ_B differ at ({x},{y})"
                )));
            }
            forall[x as usize * n + y as usize] = all;
        }
    }
    let labels = equivalence_labels(n, &forall)?;
    Congruence::new(algebra, labels)
        .map_err(|e| invariant(format!("Θ_B is not a congruence: {e}")))
}

/// `C(α, B) = {x : ∀ b ∈ B, (x,b) ∈ α}`; requires `α ⊇ Θ_B`.
pub fn c_of_congruence(
    algebra: &FiniteAlgebra,
    t: &TernaryTermOperation,
    b: &SubalgebraWitness,
    alpha: &Congruence,
) -> Result<SubalgebraWitness> {
    if alpha.base_size() != algebra.size() {
        return Err(invalid("congruence over a different universe"));
    }
    let theta = theta_of_subalgebra(algebra, t, b)?;
    if let Some((x, y)) = first_pair_outside(&theta, alpha) {
        return Err(Error::Precondition(format!(
            "α does not contain Θ_B: ({x},{y}) ∈ Θ_B but not in α"
        )));
    }
    let n = algebra.size() as Elem;
    let forall: Vec<Elem> = (0..n)
        .filter(|&x| b.carrier.iter().all(|&e| alpha.related(x, e)))
        .collect();
    let exists: Vec<Elem> = (0..n)
        .filter(|&x| b.carrier.iter().any(|&e| alpha.related(x, e)))
        .collect();
    if forall != exists {
        return Err(invariant("the ∀ and ∃ descriptions of C(α,B) differ"));
    }
    let c = SubalgebraWitness::new(algebra, forall)
        .map_err(|e| invariant(format!("C(α,B) is not a subalgebra: {e}")))?;
    if !b.is_subset(&c) {
        return Err(invariant("B is not contained in C(α,B)"));
    }
    Ok(c)
}

fn first_pair_outside(small: &Congruence, big: &Congruence) -> Option<(Elem, Elem)> {
    let n = small.base_size() as Elem;
    (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .find(|&(x, y)| small.related(x, y) && !big.related(x, y))
}

/// Outcome of checking that `Θ_-` and `C(-, B)` are mutually inverse lattice isomorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisReport {
    pub subalgebras_above: usize,
    pub congruences_above: usize,
    pub counterexamples: Vec<String>,
}

impl GaloisReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty() && self.subalgebras_above == self.congruences_above
    }

    pub fn to_report(&self, algebra: &str, b: &SubalgebraWitness) -> Report {
        let mut r = Report::new(
            format!(
                "Θ and C(-,B) are inverse lattice isomorphisms above B = {:?} in {algebra}",
                b.carrier()
            ),
            Verdict::from_bool(self.passed()),
        )
        .with_section(
            "cardinalities",
            [
                format!("subalgebras above B = {}", self.subalgebras_above),
                format!("congruences above Θ_B = {}", self.congruences_above),
            ],
        );
        if !self.counterexamples.is_empty() {
            r.push_section("counterexamples", self.counterexamples.clone());
        }
        r
    }
}

pub fn verify_galois(
    algebra: &FiniteAlgebra,
    t: &TernaryTermOperation,
    b: &SubalgebraWitness,
    budget: Budget,
) -> Result<GaloisReport> {
    let theta_b = theta_of_subalgebra(algebra, t, b)?;
    let subs: Vec<SubalgebraWitness> = enumerate_subuniverse_sets(algebra, budget)?
        .into_iter()
        .map(|c| SubalgebraWitness::from_closed(algebra.size(), c))
        .filter(|x| b.is_subset(x))
        .collect();
    let cons: Vec<Congruence> = congruence_lattice(algebra, budget)?
        .into_iter()
        .filter(|a| theta_b.is_below(a))
        .collect();
    let mut bad = Vec::new();

    let thetas: Vec<Congruence> = subs
        .iter()
        .map(|x| theta_of_subalgebra(algebra, t, x))
        .collect::<Result<_>>()?;
    for (x, th) in subs.iter().zip(&thetas) {
        let back = c_of_congruence(algebra, t, b, th)?;
        if &back != x {
            bad.push(format!("C(Θ_X,B) = {:?} for X = {:?}", back.carrier(), x.carrier()));
        }
    }
    let cs: Vec<SubalgebraWitness> = cons
        .iter()
        .map(|a| c_of_congruence(algebra, t, b, a))
        .collect::<Result<_>>()?;
    for (a, c) in cons.iter().zip(&cs) {
        let back = theta_of_subalgebra(algebra, t, c)?;
        if &back != a {
            bad.push(format!("Θ_C(α,B) = {:?} for α = {:?}", back.classes(), a.classes()));
        }
    }
    for (i, x) in subs.iter().enumerate() {
        for (j, y) in subs.iter().enumerate() {
            if x.is_subset(y) && !thetas[i].is_below(&thetas[j]) {
                bad.push(format!("Θ not isotone on {:?} ⊆ {:?}", x.carrier(), y.carrier()));
            }
        }
    }
    for (i, a) in cons.iter().enumerate() {
        for (j, c) in cons.iter().enumerate() {
            if a.is_below(c) && !cs[i].is_subset(&cs[j]) {
                bad.push(format!("C(-,B) not isotone on {:?} ⊆ {:?}", a.classes(), c.classes()));
            }
        }
    }
    Ok(GaloisReport {
        subalgebras_above: subs.len(),
        congruences_above: cons.len(),
        counterexamples: bad,
    })
}

/// Intersection of all subuniverses strictly above `b`, or `None` when `b` is the top.
///
/// Every strict superset contains some `Sg(B ∪ {x})` with `x ∉ B`, so it is
/// enough to intersect those.
pub fn strict_upper_intersection(
    algebra: &FiniteAlgebra,
    b: &SubalgebraWitness,
) -> Result<Option<Vec<Elem>>> {
    check_witness(algebra, b)?;
    let mut acc: Option<Vec<bool>> = None;
    let mut seed = b.carrier.clone();
    for x in 0..algebra.size() as Elem {
        if b.contains(x) {
            continue;
        }
        seed.push(x);
        let sg = generated_subuniverse(algebra, &seed)?;
        seed.pop();
        let mut mask = vec![false; algebra.size()];
        for e in sg {
            mask[e as usize] = true;
        }
        acc = Some(match acc {
            None => mask,
            Some(prev) => prev.iter().zip(&mask).map(|(p, q)| *p && *q).collect(),
        });
    }
    Ok(acc.map(|m| {
        m.iter()
            .enumerate()
            .filter(|(_, &v)| v)
            .map(|(i, _)| i as Elem)
            .collect()
    }))
}

/// Whether `b` is (completely) meet-irreducible in `Sub A`.
pub fn is_meet_irreducible(algebra: &FiniteAlgebra, b: &SubalgebraWitness) -> Result<bool> {
    Ok(match strict_upper_intersection(algebra, b)? {
        None => false,
        Some(i) => i.len() > b.len(),
    })
}

/// All meet-irreducible subuniverses, ordered by (cardinality, lexicographic).
pub fn meet_irreducibles(algebra: &FiniteAlgebra, budget: Budget) -> Result<Vec<SubalgebraWitness>> {
    let all = enumerate_subuniverse_sets(algebra, budget)?;
    let n = algebra.size();
    let mut out = Vec::new();
    for (i, b) in all.iter().enumerate() {
        if b.len() == n {
            continue;
        }
        let mut inter: Option<Vec<Elem>> = None;
        for c in &all[i + 1..] {
            if c.len() > b.len() && b.iter().all(|x| c.binary_search(x).is_ok()) {
                inter = Some(match inter {
                    None => c.clone(),
                    Some(prev) => prev.into_iter().filter(|x| c.binary_search(x).is_ok()).collect(),
                });
            }
        }
        if inter.is_some_and(|s| s.len() > b.len()) {
            out.push(SubalgebraWitness::from_closed(n, b.clone()));
        }
    }
    Ok(out)
}

/// `S = A/Θ_B` with its projection `f` and `c = f(B)`; `B` must be meet-irreducible.
pub fn kernel_quotient(
    algebra: &FiniteAlgebra,
    t: &TernaryTermOperation,
    b: &SubalgebraWitness,
    budget: Budget,
) -> Result<KernelTriple> {
    if !is_meet_irreducible(algebra, b)? {
        return Err(Error::Precondition(format!(
            "{:?} is not meet-irreducible in Sub {}",
            b.carrier(),
            algebra.name()
        )));
    }
    let theta = theta_of_subalgebra(algebra, t, b)?;
    let (s, f) = quotient_algebra(algebra, &theta)?;
    let c = f.apply(b.carrier[0]);
    let preimage: Vec<Elem> = (0..algebra.size() as Elem).filter(|&x| f.apply(x) == c).collect();
    if preimage != b.carrier {
        return Err(invariant("f⁻¹(c) differs from B"));
    }
    for (i, op) in s.ops().iter().enumerate() {
        if s.apply(i, &vec![c; op.arity()]) != c {
            return Err(invariant(format!("{{c}} is not closed under {}", op.name())));
        }
    }
    if monolith(&s, budget)?.is_none() {
        return Err(invariant(format!(
            "quotient by Θ_B for B = {:?} is not subdirectly irreducible",
            b.carrier()
        )));
    }
    let t_s = t.induced(&theta)?;
    Ok(KernelTriple { s, f, c, theta, t_s })
}

/// Number of congruences of `S` (used when reporting quotients).
pub fn congruence_count(s: &FiniteAlgebra, budget: Budget) -> Result<usize> {
    Ok(congruence_lattice(s, budget)?.len())
}
