use super::*;
use crate::affine::find_affine_term;
use crate::catalog;
use crate::subuniverse::enumerate_subuniverses;

fn rel(arity: usize, base: usize, t: &[&[Elem]]) -> Relation {
    Relation::new(arity, base, t.iter().map(|x| x.to_vec()).collect()).unwrap()
}

fn term(a: &FiniteAlgebra) -> TernaryTermOperation {
    find_affine_term(a, Budget::default()).unwrap().unwrap()
}

fn b() -> Budget {
    Budget::default()
}

#[test]
fn intersection_rule() {
    let d = Derived::premise("D", Value::Relation(rel(2, 2, &[&[0, 0], &[1, 1]])));
    let e = Derived::premise("E", Value::Relation(rel(2, 2, &[&[0, 0], &[1, 1], &[0, 1]])));
    let out = derive(Rule::Intersection { arity: 2 }, vec![d, e], 2, b()).unwrap();
    assert_eq!(out.value, Value::Relation(rel(2, 2, &[&[0, 0], &[1, 1]])));
    let full = derive(Rule::Intersection { arity: 2 }, vec![], 2, b()).unwrap();
    assert_eq!(full.value.as_relation().unwrap().len(), 4);
}

#[test]
fn term_preimage_rule() {
    let z4 = catalog::cyclic_group(4);
    let plus = Derived::premise("plus", Value::Relation(Relation::graph_of(&z4, 0)));
    let terms = vec![
        TermSpec::Tree(Term::Var(0)),
        TermSpec::Tree(Term::Var(0)),
        TermSpec::Tree(Term::Var(1)),
    ];
    let out = derive(Rule::TermPreimage { arity: 2, terms }, vec![plus], 4, b()).unwrap();
    assert_eq!(
        out.value,
        Value::Relation(rel(2, 4, &[&[0, 0], &[1, 2], &[2, 0], &[3, 2]]))
    );
}

#[test]
fn term_preimage_with_composed_terms() {
    // {(x, y) : t(x, y, y) = x} is everything when t is Mal'cev
    let z3 = catalog::cyclic_group(3);
    let t = Derived::premise("t", Value::Operation(TableOperation::from_ternary(&term(&z3))));
    let diag = Derived::premise("D", Value::Relation(Relation::diagonal(2, 3)));
    let tree = Term::parse("f0(x1,x2,x2)").unwrap();
    let out = derive(
        Rule::TermPreimage {
            arity: 2,
            terms: vec![TermSpec::Tree(tree), TermSpec::Tree(Term::Var(0))],
        },
        vec![diag, t],
        3,
        b(),
    )
    .unwrap();
    assert!(out.value.as_relation().unwrap().is_full());
}

#[test]
fn strip_and_graph_rules() {
    let d = rel(2, 2, &[&[0, 1], &[1, 0]]);
    let s = Derived::premise("S", Value::Relation(d.pad_last()));
    let out = derive(Rule::StripLast, vec![s], 2, b()).unwrap();
    assert_eq!(out.value, Value::Relation(d.clone()));
    let g = derive(Rule::GraphToOperation, vec![out], 2, b()).unwrap();
    assert_eq!(g.value.as_operation().unwrap().table(), &[1, 0]);
    let bad = Derived::premise("X", Value::Relation(rel(2, 2, &[&[0, 0], &[0, 1]])));
    assert!(derive(Rule::GraphToOperation, vec![bad], 2, b()).is_err());
    let bad = Derived::premise("X", Value::Relation(rel(2, 2, &[&[0, 1]])));
    assert!(derive(Rule::StripLast, vec![bad], 2, b()).is_err());
}

#[test]
fn refuter_examples() {
    let z2 = catalog::cyclic_group(2);
    let diag = Value::Relation(Relation::diagonal(2, 2));
    let plus = Value::Relation(Relation::graph_of(&z2, 0));
    match refute_entailment(2, &[diag.clone()], &plus, 1, b()).unwrap() {
        RefutationOutcome::Witness { arity, map } => {
            assert_eq!(arity, 1);
            // x ↦ x+1 is the first unary map (in table order) moving the graph of + off itself
            assert_eq!(map, vec![1, 0]);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        refute_entailment(2, &[plus.clone()], &plus, 2, b()).unwrap(),
        RefutationOutcome::NoWitness { max_arity: 2, .. }
    ));
    let rels4: Vec<Value> = enumerate_subuniverses(&z2.power(4, b()).unwrap(), b())
        .unwrap()
        .into_iter()
        .map(Value::Relation)
        .collect();
    assert_eq!(rels4.len(), 67);
    for target in enumerate_subuniverses(&z2.power(2, b()).unwrap(), b()).unwrap() {
        assert!(matches!(
            refute_entailment(2, &rels4, &Value::Relation(target), 2, b()).unwrap(),
            RefutationOutcome::NoWitness { .. }
        ));
    }
    let err = refute_entailment(4, &[], &plus_over(4), 2, b()).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { count, .. } if count == 4 * 4 * 4 * 4 + (1u128 << 32)));
}

fn plus_over(n: usize) -> Value {
    Value::Relation(Relation::graph_of(&catalog::cyclic_group(n), 0))
}

#[test]
fn eliminate_t_examples() {
    let z2 = catalog::cyclic_group(2);
    let t = term(&z2);
    let c = eliminate_t(&z2, &t, 4, b()).unwrap();
    assert_eq!(c.derivation.steps(), 1);
    assert_eq!(c.premises[0].value.arity(), 4);
    assert_eq!(c.conclusion.as_operation().unwrap().table(), t.table());
    let c = eliminate_t(&z2, &t, 6, b()).unwrap();
    assert_eq!(c.derivation.steps(), 3);
    assert!(c.replay(Some(&z2), b()).unwrap().matches);
    let z4 = catalog::cyclic_group(4);
    let c = eliminate_t(&z4, &term(&z4), 9, b()).unwrap();
    assert_eq!(c.derivation.steps(), 6);
    assert!(eliminate_t(&z2, &t, 3, b()).is_err());
}

#[test]
fn diagonal_of_cube_over_z2() {
    let z2 = catalog::cyclic_group(2);
    let t = term(&z2);
    let d = Relation::diagonal(3, 2);
    let res = reduce_to_bounded_arity(&z2, &t, &d, 1, b()).unwrap();
    let out = res.certificate.replay(Some(&z2), b()).unwrap();
    assert!(out.matches);
    assert!(res.bounded_premises.iter().all(|r| r.arity() <= 2));
    // three planes (subspaces of dimension 2 containing the diagonal)
    let Node::Apply { inputs, .. } = &res.certificate.derivation else { panic!() };
    assert_eq!(inputs.len(), 3);
}

#[test]
fn small_relations_certify_themselves() {
    let z2 = catalog::cyclic_group(2);
    let res = reduce_to_bounded_arity(&z2, &term(&z2), &Relation::diagonal(2, 2), 1, b()).unwrap();
    assert_eq!(res.certificate.derivation, Node::Premise("R".into()));
}

#[test]
fn incompatible_input_is_rejected() {
    let z4 = catalog::cyclic_group(4);
    let coset = rel(2, 4, &[&[0, 2], &[1, 3], &[2, 0], &[3, 1]]);
    assert!(matches!(
        reduce_to_bounded_arity(&z4, &term(&z4), &coset, 9, b()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn coset_over_affine_z4() {
    let a = catalog::cyclic_affine(4);
    let t = term(&a);
    let coset = rel(2, 4, &[&[0, 2], &[1, 3], &[2, 0], &[3, 1]]);
    let res = certify_via_kernels(&a, &t, &coset, 9, b()).unwrap();
    assert!(res.certificate.replay(Some(&a), b()).unwrap().matches);
    let Node::Apply { inputs, .. } = &res.certificate.derivation else { panic!() };
    assert_eq!(inputs.len(), 1, "the coset is meet-irreducible");
    assert!(res.bounded_premises.iter().all(|r| r.arity() <= 10));
}

fn all_compatible(a: &FiniteAlgebra, n: usize) -> Vec<Relation> {
    enumerate_subuniverses(&a.power(n, b()).unwrap(), b()).unwrap()
}

#[test]
fn pipeline_replays_for_every_compatible_relation_over_two_elements() {
    for a in [catalog::cyclic_group(2), catalog::cyclic_affine(2)] {
        let t = term(&a);
        for n in 1..=3 {
            for r in all_compatible(&a, n) {
                let res = certify_via_kernels(&a, &t, &r, 1, b()).unwrap();
                let out = res.certificate.replay(Some(&a), b()).unwrap();
                assert!(out.matches, "{} {r}", a.name());
                assert_eq!(out.value, Value::Relation(r));
            }
        }
    }
}

#[test]
fn certified_conclusions_are_never_refuted() {
    let a = catalog::cyclic_group(2);
    let t = term(&a);
    for r in all_compatible(&a, 3) {
        let cert = certify_with_relations(&a, &t, &r, 1, 4, b()).unwrap();
        assert!(cert.premises.iter().all(|p| p.value.arity() == 4));
        assert!(cert.replay(Some(&a), b()).unwrap().matches);
        let premises: Vec<Value> = cert.premises.iter().map(|p| p.value.clone()).collect();
        assert!(matches!(
            refute_entailment(2, &premises, &cert.conclusion, 2, b()).unwrap(),
            RefutationOutcome::NoWitness { .. }
        ));
    }
}

#[test]
fn replay_rejects_tampering() {
    let a = catalog::cyclic_group(2);
    let t = term(&a);
    let mut cert = certify_via_kernels(&a, &t, &Relation::diagonal(3, 2), 1, b())
        .unwrap()
        .certificate;
    cert.conclusion = Value::Relation(Relation::full(3, 2));
    assert!(!cert.replay(None, b()).unwrap().matches);
    cert.derivation = Node::Premise("nope".into());
    assert!(cert.replay(None, b()).is_err());
}

#[test]
fn replay_flags_incompatible_premises() {
    let z2 = catalog::cyclic_group(2);
    let premise = Premise {
        name: "X".into(),
        value: Value::Relation(rel(2, 2, &[&[0, 0], &[0, 1], &[1, 1]])),
    };
    let d = Derived::premise("X", premise.value.clone());
    let cert = EntailmentCertificate::from_derived("X", 2, vec![premise], d, b()).unwrap();
    assert!(cert.replay(None, b()).unwrap().matches);
    assert!(matches!(cert.replay(Some(&z2), b()), Err(Error::Invariant(_))));
}
