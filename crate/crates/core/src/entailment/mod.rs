//! Entailment between relations and operations on a finite set: the four
//! derivation rules, replayable certificates, a brute-force refuter, and the
//! reduction of compatible relations to relations of bounded arity.
//!
//! The rules, for sets `F` of relations/operations on `A`:
//! 1. `F` entails any intersection of its relations of equal arity;
//! 2. if `R ∈ F` is `k`-ary and `p_1..p_k` are `n`-ary terms in the operations
//!    of `F`, then `F` entails `{x⃗ : (p_1(x⃗), .., p_k(x⃗)) ∈ R}`;
//! 3. a relation with a duplicated last coordinate entails its strip;
//! 4. the graph of an operation entails the operation.

mod pipeline;
mod refute;

pub use pipeline::{
    certify_via_kernels, certify_with_relations, eliminate_t, lift_to_relational_premises,
    reduce_to_bounded_arity, ReductionResult,
};
pub use refute::{preserves, refute_entailment, RefutationOutcome};

use std::collections::HashMap;
use std::fmt;

use crate::affine::{AffineTerm, GroupStructure, Term, TernaryTermOperation};
use crate::algebra::{for_each_tuple, table_index, Elem, FiniteAlgebra};
use crate::budget::{checked_pow, Budget};
use crate::error::{invalid, invariant, Error, Result};
use crate::relation::{compatibility_witness, Relation};

/// A total operation on `{0..base_size-1}` given by its table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TableOperation {
    base_size: usize,
    arity: usize,
    table: Vec<Elem>,
}

impl TableOperation {
    pub fn new(base_size: usize, arity: usize, table: Vec<Elem>) -> Result<Self> {
        let expected = checked_pow(base_size as u128, arity as u128);
        if table.len() as u128 != expected {
            return Err(invalid(format!(
                "{arity}-ary table over {base_size} elements needs {expected} entries, got {}",
                table.len()
            )));
        }
        if table.iter().any(|&v| v as usize >= base_size) {
            return Err(invalid("operation table entry outside universe"));
        }
        Ok(TableOperation {
            base_size,
            arity,
            table,
        })
    }

    pub fn from_ternary(t: &TernaryTermOperation) -> Self {
        TableOperation {
            base_size: t.base_size(),
            arity: 3,
            table: t.table().to_vec(),
        }
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn apply(&self, args: &[Elem]) -> Elem {
        self.table[table_index(self.base_size, args)]
    }

    pub fn graph(&self) -> Relation {
        Relation::graph_of_table(self.base_size, self.arity, &self.table)
    }
}

/// A relation or an operation: what premises and conclusions can be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Relation(Relation),
    Operation(TableOperation),
}

impl Value {
    pub fn base_size(&self) -> usize {
        match self {
            Value::Relation(r) => r.base_size(),
            Value::Operation(o) => o.base_size(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Value::Relation(r) => r.arity(),
            Value::Operation(o) => o.arity(),
        }
    }

    pub fn as_relation(&self) -> Result<&Relation> {
        match self {
            Value::Relation(r) => Ok(r),
            Value::Operation(_) => Err(invalid("expected a relation, found an operation")),
        }
    }

    pub fn as_operation(&self) -> Result<&TableOperation> {
        match self {
            Value::Operation(o) => Ok(o),
            Value::Relation(_) => Err(invalid("expected an operation, found a relation")),
        }
    }

    /// The relation itself, or the graph of the operation.
    pub fn to_relation(&self) -> Relation {
        match self {
            Value::Relation(r) => r.clone(),
            Value::Operation(o) => o.graph(),
        }
    }
}

/// How a term in rule 2 is written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermSpec {
    /// `Σ u_k x_k`, evaluated in the group of the first operation child (taken
    /// as an affine term) with neutral 0.
    Affine(AffineTerm),
    /// A composition tree; `f<i>` is the `i`-th operation child.
    Tree(Term),
}

impl fmt::Display for TermSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermSpec::Affine(a) => write!(f, "affine {a}"),
            TermSpec::Tree(t) => write!(f, "tree {t}"),
        }
    }
}

/// A rule application, without its inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// Rule 1; zero inputs give the full relation of this arity.
    Intersection { arity: usize },
    /// Rule 2; inputs are the relation followed by the operations the terms use.
    TermPreimage { arity: usize, terms: Vec<TermSpec> },
    /// Rule 3.
    StripLast,
    /// Rule 4.
    GraphToOperation,
}

/// A derivation tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Premise(String),
    Apply { rule: Rule, inputs: Vec<Node> },
}

impl Node {
    /// Number of rule applications.
    pub fn steps(&self) -> usize {
        match self {
            Node::Premise(_) => 0,
            Node::Apply { inputs, .. } => 1 + inputs.iter().map(Node::steps).sum::<usize>(),
        }
    }

    fn premise_names<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Node::Premise(n) => out.push(n),
            Node::Apply { inputs, .. } => inputs.iter().for_each(|i| i.premise_names(out)),
        }
    }
}

/// A value together with the derivation that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derived {
    pub value: Value,
    pub node: Node,
}

impl Derived {
    pub fn premise(name: impl Into<String>, value: Value) -> Self {
        Derived {
            value,
            node: Node::Premise(name.into()),
        }
    }
}

fn affine_group(ops: &[&TableOperation]) -> Result<GroupStructure> {
    let t = ops
        .first()
        .ok_or_else(|| invalid("affine terms need a ternary operation child"))?;
    if t.arity() != 3 {
        return Err(invalid("affine terms need a ternary first operation child"));
    }
    let t = TernaryTermOperation::from_table(t.base_size(), t.table().to_vec())?;
    GroupStructure::from_affine(&t, 0)
        .map_err(|e| invalid(format!("first operation child is not affine: {e}")))
}

/// Applies one rule to values.
pub fn apply_rule(rule: &Rule, base_size: usize, inputs: &[&Value], budget: Budget) -> Result<Value> {
    if inputs.iter().any(|v| v.base_size() != base_size) {
        return Err(invalid("rule input over a different universe"));
    }
    match rule {
        Rule::Intersection { arity } => {
            let mut acc: Option<Relation> = None;
            for v in inputs {
                let r = v.as_relation()?;
                if r.arity() != *arity {
                    return Err(invalid(format!(
                        "intersection of arity {arity} given a relation of arity {}",
                        r.arity()
                    )));
                }
                acc = Some(match acc {
                    None => r.clone(),
                    Some(a) => a.intersection(r)?,
                });
            }
            match acc {
                Some(r) => Ok(Value::Relation(r)),
                None => {
                    budget.check(
                        "full relation tuples",
                        checked_pow(base_size as u128, *arity as u128),
                    )?;
                    Ok(Value::Relation(Relation::full(*arity, base_size)))
                }
            }
        }
        Rule::TermPreimage { arity, terms } => {
            let (rel, ops) = inputs
                .split_first()
                .ok_or_else(|| invalid("term preimage needs a relation"))?;
            let rel = rel.as_relation()?;
            let ops: Vec<&TableOperation> =
                ops.iter().map(|v| v.as_operation()).collect::<Result<_>>()?;
            term_preimage(base_size, *arity, rel, terms, &ops, budget).map(Value::Relation)
        }
        Rule::StripLast => {
            let [v] = inputs else {
                return Err(invalid("strip takes one relation"));
            };
            v.as_relation()?.strip_last().map(Value::Relation)
        }
        Rule::GraphToOperation => {
            let [v] = inputs else {
                return Err(invalid("graph-to-operation takes one relation"));
            };
            let r = v.as_relation()?;
            let table = r.to_function_table()?;
            TableOperation::new(base_size, r.arity() - 1, table).map(Value::Operation)
        }
    }
}

/// `{x⃗ ∈ A^arity : (p_1(x⃗), .., p_k(x⃗)) ∈ rel}`.
pub fn term_preimage(
    base_size: usize,
    arity: usize,
    rel: &Relation,
    terms: &[TermSpec],
    ops: &[&TableOperation],
    budget: Budget,
) -> Result<Relation> {
    if arity == 0 {
        return Err(invalid("term preimage must have positive arity"));
    }
    if terms.len() != rel.arity() {
        return Err(invalid(format!(
            "{} terms given for a relation of arity {}",
            terms.len(),
            rel.arity()
        )));
    }
    let mut group = None;
    for term in terms {
        match term {
            TermSpec::Affine(a) => {
                if a.arity() != arity {
                    return Err(invalid(format!(
                        "affine term of arity {} in a preimage of arity {arity}",
                        a.arity()
                    )));
                }
                if group.is_none() {
                    group = Some(affine_group(ops)?);
                }
            }
            TermSpec::Tree(t) => {
                if t.var_count() > arity {
                    return Err(invalid(format!("term {t} uses more than {arity} variables")));
                }
                check_tree_ops(t, ops)?;
            }
        }
    }
    budget.check(
        "term preimage domain",
        checked_pow(base_size as u128, arity as u128),
    )?;
    let mut image = vec![0; terms.len()];
    let mut tuples = Vec::new();
    for_each_tuple(base_size, arity, |x| {
        for (slot, term) in image.iter_mut().zip(terms) {
            *slot = match term {
                TermSpec::Affine(a) => group
                    .as_ref()
                    .expect("group built above")
                    .linear_combination(a.coeffs(), x),
                TermSpec::Tree(t) => t.eval_with(x, &|op, args| ops[op].apply(args)),
            };
        }
        if rel.contains(&image) {
            tuples.push(x.to_vec());
        }
        true
    });
    Relation::new(arity, base_size, tuples)
}

fn check_tree_ops(t: &Term, ops: &[&TableOperation]) -> Result<()> {
    match t {
        Term::Var(_) => Ok(()),
        Term::Apply { op, args } => {
            let o = ops
                .get(*op)
                .ok_or_else(|| invalid(format!("term refers to f{op}, only {} operations given", ops.len())))?;
            if o.arity() != args.len() {
                return Err(invalid(format!(
                    "f{op} has arity {}, applied to {} arguments",
                    o.arity(),
                    args.len()
                )));
            }
            args.iter().try_for_each(|a| check_tree_ops(a, ops))
        }
    }
}

/// Applies `rule` to derived inputs, recording the derivation.
pub fn derive(rule: Rule, inputs: Vec<Derived>, base_size: usize, budget: Budget) -> Result<Derived> {
    let values: Vec<&Value> = inputs.iter().map(|d| &d.value).collect();
    let value = apply_rule(&rule, base_size, &values, budget)?;
    Ok(Derived {
        value,
        node: Node::Apply {
            rule,
            inputs: inputs.into_iter().map(|d| d.node).collect(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Premise {
    pub name: String,
    pub value: Value,
}

/// Premises, a conclusion and a derivation of the conclusion from the premises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntailmentCertificate {
    pub name: String,
    pub base_size: usize,
    pub premises: Vec<Premise>,
    pub conclusion: Value,
    pub derivation: Node,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub value: Value,
    pub steps: usize,
    pub matches: bool,
}

impl EntailmentCertificate {
    /// Packages a derivation, keeping only the premises it uses, and replays it.
    pub fn from_derived(
        name: impl Into<String>,
        base_size: usize,
        premises: Vec<Premise>,
        derived: Derived,
        budget: Budget,
    ) -> Result<Self> {
        let mut used = Vec::new();
        derived.node.premise_names(&mut used);
        let premises = premises
            .into_iter()
            .filter(|p| used.contains(&p.name.as_str()))
            .collect();
        let cert = EntailmentCertificate {
            name: name.into(),
            base_size,
            premises,
            conclusion: derived.value,
            derivation: derived.node,
        };
        if !cert.replay(None, budget)?.matches {
            return Err(invariant("certificate does not replay to its conclusion"));
        }
        Ok(cert)
    }

    pub fn premise(&self, name: &str) -> Option<&Premise> {
        self.premises.iter().find(|p| p.name == name)
    }

    /// Re-derives the conclusion from the premises alone. With `algebra`,
    /// every premise and every relation produced along the way must also be
    /// compatible with it.
    pub fn replay(&self, algebra: Option<&FiniteAlgebra>, budget: Budget) -> Result<ReplayOutcome> {
        let mut env: HashMap<&str, &Value> = HashMap::new();
        for p in &self.premises {
            if p.value.base_size() != self.base_size {
                return Err(invalid(format!("premise {} over a different universe", p.name)));
            }
            if env.insert(&p.name, &p.value).is_some() {
                return Err(invalid(format!("duplicate premise name {}", p.name)));
            }
            if let Some(a) = algebra {
                check_compatible(a, &p.value, &format!("premise {}", p.name))?;
            }
        }
        let value = self.evaluate(&self.derivation, &env, algebra, budget)?;
        Ok(ReplayOutcome {
            matches: value == self.conclusion,
            value,
            steps: self.derivation.steps(),
        })
    }

    fn evaluate(
        &self,
        node: &Node,
        env: &HashMap<&str, &Value>,
        algebra: Option<&FiniteAlgebra>,
        budget: Budget,
    ) -> Result<Value> {
        match node {
            Node::Premise(name) => env
                .get(name.as_str())
                .map(|v| (*v).clone())
                .ok_or_else(|| invalid(format!("unknown premise {name}"))),
            Node::Apply { rule, inputs } => {
                let vals: Vec<Value> = inputs
                    .iter()
                    .map(|n| self.evaluate(n, env, algebra, budget))
                    .collect::<Result<_>>()?;
                let refs: Vec<&Value> = vals.iter().collect();
                let out = apply_rule(rule, self.base_size, &refs, budget)?;
                if let (Some(a), Value::Relation(_)) = (algebra, &out) {
                    check_compatible(a, &out, "derived relation")?;
                }
                Ok(out)
            }
        }
    }
}

fn check_compatible(algebra: &FiniteAlgebra, value: &Value, what: &str) -> Result<()> {
    if value.base_size() != algebra.size() {
        return Err(invalid(format!("{what} is over a different universe than {}", algebra.name())));
    }
    let rel = value.to_relation();
    if let Some((op, rows, image)) = compatibility_witness(algebra, &rel) {
        return Err(Error::Invariant(format!(
            "{what} is not compatible with {}: {op} maps rows {rows:?} to {image:?}",
            algebra.name()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
