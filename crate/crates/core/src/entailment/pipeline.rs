//! Certifying that a compatible relation of any arity is entailed by
//! compatible relations of bounded arity together with the affine term.
//!
//! A compatible `R ⊆ A^n` is the intersection of the meet-irreducible
//! subuniverses of `A^n` above it. Each such `M` is `f⁻¹(c)` for the
//! projection `f` onto the subdirectly irreducible `S = A^n/Θ_M`; factoring
//! `f = g ∘ (p_1..p_{N+1})` gives `M = {x⃗ : p(x⃗) ∈ g⁻¹(c)}`, a term preimage
//! of the `(N+1)`-ary relation `g⁻¹(c)`.

use std::collections::HashMap;

use super::{
    derive, Derived, EntailmentCertificate, Node, Premise, Rule, TableOperation, TermSpec, Value,
};
use crate::affine::TernaryTermOperation;
use crate::algebra::{encode, Elem, FiniteAlgebra};
use crate::budget::Budget;
use crate::error::{invalid, invariant, Error, Result};
use crate::factorize::factor_morphism;
use crate::hom::Homomorphism;
use crate::homgroups::{build_hk_group, generating_family};
use crate::relation::{is_compatible_relation, Relation};
use crate::subcong::{kernel_quotient, meet_irreducibles, SubalgebraWitness};

/// Name of the affine-term premise in pipeline certificates.
pub const TERM_PREMISE: &str = "t";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionResult {
    pub input: Relation,
    /// The relations `g⁻¹(c)`, each of arity at most `N + 1`.
    pub bounded_premises: Vec<Relation>,
    pub certificate: EntailmentCertificate,
}

/// Derives `r` from relations of arity at most `n_bound + 1` and `t`.
///
/// Relations that are already that small certify themselves; larger ones go
/// through [`certify_via_kernels`].
pub fn reduce_to_bounded_arity(
    a: &FiniteAlgebra,
    t: &TernaryTermOperation,
    r: &Relation,
    n_bound: usize,
    budget: Budget,
) -> Result<ReductionResult> {
    check_input(a, r)?;
    if r.arity() <= n_bound + 1 {
        let premise = Premise {
            name: "R".into(),
            value: Value::Relation(r.clone()),
        };
        let derived = Derived::premise("R", premise.value.clone());
        let certificate =
            EntailmentCertificate::from_derived("R", a.size(), vec![premise], derived, budget)?;
        return Ok(ReductionResult {
            input: r.clone(),
            bounded_premises: vec![r.clone()],
            certificate,
        });
    }
    certify_via_kernels(a, t, r, n_bound, budget)
}

fn check_input(a: &FiniteAlgebra, r: &Relation) -> Result<()> {
    if r.is_empty() {
        return Err(invalid("relation must be nonempty"));
    }
    if !is_compatible_relation(a, r)? {
        return Err(Error::Precondition(format!(
            "relation is not compatible with {}",
            a.name()
        )));
    }
    Ok(())
}

/// Always runs the meet-irreducible / quotient / factorization pipeline.
pub fn certify_via_kernels(
    a: &FiniteAlgebra,
    t: &TernaryTermOperation,
    r: &Relation,
    n_bound: usize,
    budget: Budget,
) -> Result<ReductionResult> {
    check_input(a, r)?;
    let q = a.size();
    let n = r.arity();
    let an = a.power(n, budget)?;
    let t_n = t.power(n, budget)?;
    let carrier = SubalgebraWitness::new(&an, r.codes())?;
    let above: Vec<SubalgebraWitness> = meet_irreducibles(&an, budget)?
        .into_iter()
        .filter(|m| carrier.is_subset(m))
        .collect();
    // dropping non-minimal members leaves the intersection unchanged
    let components: Vec<SubalgebraWitness> = above
        .iter()
        .filter(|m| !above.iter().any(|o| o != *m && o.is_subset(m)))
        .cloned()
        .collect();

    let t_value = Value::Operation(TableOperation::from_ternary(t));
    let t_premise = Derived::premise(TERM_PREMISE, t_value.clone());
    let mut premises = vec![Premise {
        name: TERM_PREMISE.into(),
        value: t_value,
    }];
    let mut names: HashMap<Relation, String> = HashMap::new();
    let mut bounded = Vec::new();
    let mut steps = Vec::with_capacity(components.len());
    for m in &components {
        let kt = kernel_quotient(&an, &t_n, m, budget)?;
        let k_map: Vec<Elem> = (0..q as Elem).map(|x| kt.f.apply(encode(q, &vec![x; n]))).collect();
        let k = Homomorphism::new(a, &kt.s, k_map)?;
        let hk = build_hk_group(a, &kt.s, t, &kt.t_s, &k, budget)?;
        let gens = generating_family(hk.group())?;
        if gens.len() > n_bound {
            return Err(Error::Precondition(format!(
                "𝓗(A², S) for |S| = {} needs {} generators, more than N = {n_bound}",
                kt.s.size(),
                gens.len()
            )));
        }
        let fact = factor_morphism(a, &kt.s, t, &kt.t_s, &kt.f, n, &hk, &gens, 0, budget)?;
        let b_codes: Vec<Elem> = (0..fact.g.domain_size() as Elem)
            .filter(|&y| fact.g.apply(y) == kt.c)
            .collect();
        let b = Relation::from_codes(gens.len() + 1, q, &b_codes);
        let name = match names.get(&b) {
            Some(name) => name.clone(),
            None => {
                let name = format!("B{}", names.len() + 1);
                names.insert(b.clone(), name.clone());
                premises.push(Premise {
                    name: name.clone(),
                    value: Value::Relation(b.clone()),
                });
                bounded.push(b.clone());
                name
            }
        };
        let terms = fact.terms.iter().cloned().map(TermSpec::Affine).collect();
        let step = derive(
            Rule::TermPreimage { arity: n, terms },
            vec![Derived::premise(name, Value::Relation(b)), t_premise.clone()],
            q,
            budget,
        )?;
        if step.value.as_relation()?.codes() != m.carrier() {
            return Err(invariant("term preimage of g⁻¹(c) differs from the component"));
        }
        steps.push(step);
    }
    let derived = derive(Rule::Intersection { arity: n }, steps, q, budget)?;
    if derived.value.as_relation()? != r {
        return Err(invariant(
            "meet-irreducible components do not intersect to the relation",
        ));
    }
    let certificate = EntailmentCertificate::from_derived("R", q, premises, derived, budget)?;
    Ok(ReductionResult {
        input: r.clone(),
        bounded_premises: bounded,
        certificate,
    })
}

fn padded(r: &Relation, arity: usize) -> Relation {
    let mut out = r.clone();
    while out.arity() < arity {
        out = out.pad_last();
    }
    out
}

fn strips(node: Node, count: usize) -> Node {
    (0..count).fold(node, |n, _| Node::Apply {
        rule: Rule::StripLast,
        inputs: vec![n],
    })
}

/// Derives the operation `t` from the graph of `t` padded to arity `arity`.
pub fn eliminate_t(
    a: &FiniteAlgebra,
    t: &TernaryTermOperation,
    arity: usize,
    budget: Budget,
) -> Result<EntailmentCertificate> {
    if arity < 4 {
        return Err(Error::Precondition(format!(
            "the graph of a ternary operation needs arity 4, got {arity}"
        )));
    }
    let op = TableOperation::from_ternary(t);
    let graph = padded(&op.graph(), arity);
    let premise = Premise {
        name: "gra_t".into(),
        value: Value::Relation(graph),
    };
    let mut d = Derived::premise("gra_t", premise.value.clone());
    for _ in 4..arity {
        d = derive(Rule::StripLast, vec![d], a.size(), budget)?;
    }
    let d = derive(Rule::GraphToOperation, vec![d], a.size(), budget)?;
    EntailmentCertificate::from_derived("t", a.size(), vec![premise], d, budget)
}

/// Rewrites a certificate so that every premise is a relation of arity exactly
/// `arity`: smaller relations are padded (and stripped back in the
/// derivation), operations are replaced by their padded graphs.
pub fn lift_to_relational_premises(
    cert: &EntailmentCertificate,
    arity: usize,
    budget: Budget,
) -> Result<EntailmentCertificate> {
    let mut replacements: HashMap<String, Node> = HashMap::new();
    let mut premises = Vec::new();
    for p in &cert.premises {
        match &p.value {
            Value::Relation(r) => {
                if r.arity() > arity {
                    return Err(invalid(format!(
                        "premise {} has arity {} > {arity}",
                        p.name,
                        r.arity()
                    )));
                }
                replacements.insert(p.name.clone(), strips(Node::Premise(p.name.clone()), arity - r.arity()));
                premises.push(Premise {
                    name: p.name.clone(),
                    value: Value::Relation(padded(r, arity)),
                });
            }
            Value::Operation(o) => {
                if o.arity() + 1 > arity {
                    return Err(invalid(format!(
                        "graph of operation premise {} has arity {} > {arity}",
                        p.name,
                        o.arity() + 1
                    )));
                }
                let name = format!("gra_{}", p.name);
                let node = Node::Apply {
                    rule: Rule::GraphToOperation,
                    inputs: vec![strips(Node::Premise(name.clone()), arity - o.arity() - 1)],
                };
                replacements.insert(p.name.clone(), node);
                premises.push(Premise {
                    name,
                    value: Value::Relation(padded(&o.graph(), arity)),
                });
            }
        }
    }
    fn substitute(node: &Node, rep: &HashMap<String, Node>) -> Node {
        match node {
            Node::Premise(n) => rep[n].clone(),
            Node::Apply { rule, inputs } => Node::Apply {
                rule: rule.clone(),
                inputs: inputs.iter().map(|i| substitute(i, rep)).collect(),
            },
        }
    }
    let lifted = EntailmentCertificate {
        name: cert.name.clone(),
        base_size: cert.base_size,
        premises,
        conclusion: cert.conclusion.clone(),
        derivation: substitute(&cert.derivation, &replacements),
    };
    if !lifted.replay(None, budget)?.matches {
        return Err(invariant("lifted certificate does not replay"));
    }
    Ok(lifted)
}

/// A certificate for `r` whose premises are all compatible relations of
/// arity `premise_arity` (the affine term enters through its padded graph).
pub fn certify_with_relations(
    a: &FiniteAlgebra,
    t: &TernaryTermOperation,
    r: &Relation,
    n_bound: usize,
    premise_arity: usize,
    budget: Budget,
) -> Result<EntailmentCertificate> {
    if n_bound + 1 > premise_arity {
        return Err(Error::Precondition(format!(
            "premises of arity {premise_arity} cannot hold relations of arity {}",
            n_bound + 1
        )));
    }
    let reduced = reduce_to_bounded_arity(a, t, r, n_bound, budget)?;
    lift_to_relational_premises(&reduced.certificate, premise_arity, budget)
}
