//! Affine terms: discovery inside the ternary term clone, the Abelian group
//! structures they induce, and evaluation of integer affine combinations.

use std::collections::HashMap;
use std::fmt;

use crate::algebra::{decode, encode, for_each_tuple, Elem, FiniteAlgebra};
use crate::budget::Budget;
use crate::congruence::Congruence;
use crate::error::{invalid, invariant, Result};
use crate::subuniverse::for_each_tuple_with_max;

/// A term built from variables `x1, x2, ..` and operation symbols referenced by index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Apply { op: usize, args: Vec<Term> },
}

impl Term {
    /// Evaluates the term with `apply(op, args)` interpreting the operation symbols.
    pub fn eval_with(&self, vars: &[Elem], apply: &impl Fn(usize, &[Elem]) -> Elem) -> Elem {
        match self {
            Term::Var(i) => vars[*i],
            Term::Apply { op, args } => {
                let vals: Vec<Elem> = args.iter().map(|a| a.eval_with(vars, apply)).collect();
                apply(*op, &vals)
            }
        }
    }

    pub fn eval(&self, algebra: &FiniteAlgebra, vars: &[Elem]) -> Elem {
        self.eval_with(vars, &|op, args| algebra.apply(op, args))
    }

    /// Largest variable index plus one.
    pub fn var_count(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::Apply { args, .. } => args.iter().map(Term::var_count).max().unwrap_or(0),
        }
    }

    pub fn max_op(&self) -> Option<usize> {
        match self {
            Term::Var(_) => None,
            Term::Apply { op, args } => args
                .iter()
                .filter_map(Term::max_op)
                .chain(std::iter::once(*op))
                .max(),
        }
    }

    /// Renders with `f<i>` for operation symbols and `x<i+1>` for variables.
    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Parses the [`Term::render`] syntax, e.g. `f0(x1,f1(x2),x3)`.
    pub fn parse(s: &str) -> Result<Term> {
        let bytes: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse_term(&bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(invalid(format!("trailing input in term `{s}`")));
        }
        Ok(t)
    }
}

fn parse_number(s: &[char], pos: &mut usize) -> Result<usize> {
    let start = *pos;
    while *pos < s.len() && s[*pos].is_ascii_digit() {
        *pos += 1;
    }
    s[start..*pos]
        .iter()
        .collect::<String>()
        .parse()
        .map_err(|_| invalid("expected a number in term"))
}

fn parse_term(s: &[char], pos: &mut usize) -> Result<Term> {
    match s.get(*pos) {
        Some('x') => {
            *pos += 1;
            let i = parse_number(s, pos)?;
            if i == 0 {
                return Err(invalid("variables are numbered from x1"));
            }
            Ok(Term::Var(i - 1))
        }
        Some('f') => {
            *pos += 1;
            let op = parse_number(s, pos)?;
            let mut args = Vec::new();
            if s.get(*pos) == Some(&'(') {
                *pos += 1;
                if s.get(*pos) == Some(&')') {
                    *pos += 1;
                } else {
                    loop {
                        args.push(parse_term(s, pos)?);
                        match s.get(*pos) {
                            Some(',') => *pos += 1,
                            Some(')') => {
                                *pos += 1;
                                break;
                            }
                            _ => return Err(invalid("expected `,` or `)` in term")),
                        }
                    }
                }
            }
            Ok(Term::Apply { op, args })
        }
        _ => Err(invalid("expected `x<n>` or `f<n>(..)` in term")),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{}", i + 1),
            Term::Apply { op, args } => {
                write!(f, "f{op}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A ternary operation given by its `n^3` table, optionally with the term that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryTermOperation {
    base_size: usize,
    table: Vec<Elem>,
    provenance: Option<Term>,
}

impl TernaryTermOperation {
    pub fn from_table(base_size: usize, table: Vec<Elem>) -> Result<Self> {
        if table.len() != base_size.pow(3) {
            return Err(invalid(format!(
                "ternary table needs {} entries, got {}",
                base_size.pow(3),
                table.len()
            )));
        }
        if table.iter().any(|&v| v as usize >= base_size) {
            return Err(invalid("ternary table entry outside universe"));
        }
        Ok(TernaryTermOperation {
            base_size,
            table,
            provenance: None,
        })
    }

    /// Attaches a derivation; fails unless it reproduces the table.
    pub fn with_provenance(mut self, algebra: &FiniteAlgebra, term: Term) -> Result<Self> {
        let n = self.base_size;
        for (i, &v) in self.table.iter().enumerate() {
            let vars = [(i / (n * n)) as Elem, ((i / n) % n) as Elem, (i % n) as Elem];
            if term.eval(algebra, &vars) != v {
                return Err(invariant("provenance term does not reproduce the table"));
            }
        }
        self.provenance = Some(term);
        Ok(self)
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn provenance(&self) -> Option<&Term> {
        self.provenance.as_ref()
    }

    #[inline]
    pub fn apply(&self, x: Elem, y: Elem, z: Elem) -> Elem {
        let n = self.base_size;
        self.table[(x as usize * n + y as usize) * n + z as usize]
    }

    /// The coordinatewise operation on `A^n`, with power elements encoded as in
    /// [`FiniteAlgebra::power`].
    pub fn power(&self, n: usize, budget: Budget) -> Result<TernaryTermOperation> {
        let size = crate::budget::checked_pow(self.base_size as u128, n as u128);
        budget.check("power universe", size)?;
        budget.check("ternary table of a power", size.saturating_pow(3))?;
        let size = size as usize;
        let mut table = Vec::with_capacity(size * size * size);
        for x in 0..size as Elem {
            let xs = decode(self.base_size, n, x);
            for y in 0..size as Elem {
                let ys = decode(self.base_size, n, y);
                for z in 0..size as Elem {
                    let zs = decode(self.base_size, n, z);
                    let v: Vec<Elem> = (0..n).map(|i| self.apply(xs[i], ys[i], zs[i])).collect();
                    table.push(encode(self.base_size, &v));
                }
            }
        }
        TernaryTermOperation::from_table(size, table)
    }

    pub fn is_maltsev(&self) -> bool {
        let n = self.base_size as Elem;
        (0..n).all(|x| (0..n).all(|y| self.apply(x, y, y) == x && self.apply(y, y, x) == x))
    }

    /// The operation induced on the blocks of `theta` (well defined when `theta`
    /// is a congruence and this operation is a term operation).
    pub fn induced(&self, theta: &Congruence) -> Result<TernaryTermOperation> {
        if theta.base_size() != self.base_size {
            return Err(invalid("congruence over a different universe"));
        }
        let k = theta.class_count();
        let reps: Vec<Elem> = theta.classes().iter().map(|c| c[0]).collect();
        let mut table = Vec::with_capacity(k * k * k);
        for &a in &reps {
            for &b in &reps {
                for &c in &reps {
                    table.push(theta.class_of(self.apply(a, b, c)));
                }
            }
        }
        let n = self.base_size as Elem;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let i = (theta.class_of(x) as usize * k + theta.class_of(y) as usize) * k
                        + theta.class_of(z) as usize;
                    if table[i] != theta.class_of(self.apply(x, y, z)) {
                        return Err(invariant("ternary operation does not respect the congruence"));
                    }
                }
            }
        }
        TernaryTermOperation::from_table(k, table)
    }
}

/// True iff `t` is a Mal'cev operation compatible with every basic operation of `algebra`.
pub fn is_affine_term(algebra: &FiniteAlgebra, t: &TernaryTermOperation) -> bool {
    t.base_size == algebra.size() && t.is_maltsev() && affine_violation(algebra, t).is_none()
}

/// First basic operation that does not commute with `t`.
fn affine_violation(algebra: &FiniteAlgebra, t: &TernaryTermOperation) -> Option<String> {
    let n = algebra.size();
    for (i, op) in algebra.ops().iter().enumerate() {
        let m = op.arity();
        if m == 0 {
            let c = algebra.apply(i, &[]);
            if t.apply(c, c, c) != c {
                return Some(op.name().to_string());
            }
            continue;
        }
        let mut ok = true;
        let mut mixed = vec![0; m];
        for_each_tuple(n, 3 * m, |v| {
            let (x, rest) = v.split_at(m);
            let (y, z) = rest.split_at(m);
            for k in 0..m {
                mixed[k] = t.apply(x[k], y[k], z[k]);
            }
            let lhs = t.apply(algebra.apply(i, x), algebra.apply(i, y), algebra.apply(i, z));
            ok = lhs == algebra.apply(i, &mixed);
            ok
        });
        if !ok {
            return Some(op.name().to_string());
        }
    }
    None
}

/// The ternary term clone of `algebra` as tables over `A^3`, each with a derivation.
struct CloneSearch<'a> {
    algebra: &'a FiniteAlgebra,
    tables: Vec<Vec<Elem>>,
    index: HashMap<Vec<Elem>, usize>,
    parents: Vec<Option<(usize, Vec<usize>)>>,
}

impl<'a> CloneSearch<'a> {
    fn new(algebra: &'a FiniteAlgebra) -> Self {
        let n = algebra.size();
        let mut s = CloneSearch {
            algebra,
            tables: Vec::new(),
            index: HashMap::new(),
            parents: Vec::new(),
        };
        for p in 0..3 {
            let table: Vec<Elem> = (0..n * n * n)
                .map(|i| match p {
                    0 => i / (n * n),
                    1 => (i / n) % n,
                    _ => i % n,
                } as Elem)
                .collect();
            s.push(table, None);
        }
        for (i, op) in algebra.ops().iter().enumerate() {
            if op.arity() == 0 {
                let c = algebra.apply(i, &[]);
                s.push(vec![c; n * n * n], Some((i, Vec::new())));
            }
        }
        s
    }

    fn push(&mut self, table: Vec<Elem>, parent: Option<(usize, Vec<usize>)>) -> Option<usize> {
        if self.index.contains_key(&table) {
            return None;
        }
        let id = self.tables.len();
        self.index.insert(table.clone(), id);
        self.tables.push(table);
        self.parents.push(parent);
        Some(id)
    }

    fn term(&self, id: usize) -> Term {
        match &self.parents[id] {
            None => Term::Var(id),
            Some((op, args)) => Term::Apply {
                op: *op,
                args: args.iter().map(|&a| self.term(a)).collect(),
            },
        }
    }

    /// Semi-naive closure; `stop` is consulted on every new table.
    fn run(&mut self, budget: Budget, mut stop: impl FnMut(&[Elem]) -> bool) -> Result<Option<usize>> {
        for id in 0..self.tables.len() {
            if stop(&self.tables[id]) {
                return Ok(Some(id));
            }
        }
        let len = self.algebra.size().pow(3);
        let mut processed = 0;
        let mut args = Vec::new();
        while processed < self.tables.len() {
            let i = processed;
            for (op_index, op) in self.algebra.ops().iter().enumerate() {
                let m = op.arity();
                if m == 0 {
                    continue;
                }
                let mut fresh: Vec<(Vec<Elem>, Vec<usize>)> = Vec::new();
                let tables = &self.tables;
                let index = &self.index;
                let algebra = self.algebra;
                args.resize(m, 0);
                for_each_tuple_with_max(i, m, |picks| {
                    let table: Vec<Elem> = (0..len)
                        .map(|cell| {
                            for (a, &p) in args.iter_mut().zip(picks) {
                                *a = tables[p][cell];
                            }
                            algebra.apply(op_index, &args)
                        })
                        .collect();
                    if !index.contains_key(&table) {
                        fresh.push((table, picks.to_vec()));
                    }
                });
                for (table, picks) in fresh {
                    if let Some(id) = self.push(table, Some((op_index, picks))) {
                        budget.check("ternary clone elements", self.tables.len() as u128)?;
                        if stop(&self.tables[id]) {
                            return Ok(Some(id));
                        }
                    }
                }
            }
            processed += 1;
        }
        Ok(None)
    }
}

fn check_clone_budget(algebra: &FiniteAlgebra, budget: Budget) -> Result<()> {
    // A clone of up to n^3 tables of n^3 entries each.
    let n = algebra.size() as u128;
    budget.check_with_hint(
        &format!("ternary clone cells of {}", algebra.name()),
        n.pow(6),
        Some("|A|^6 must fit the budget"),
    )
}

fn operation_from_search(search: &CloneSearch<'_>, id: usize) -> Result<TernaryTermOperation> {
    TernaryTermOperation::from_table(search.algebra.size(), search.tables[id].clone())?
        .with_provenance(search.algebra, search.term(id))
}

/// Finds the affine term of `algebra`, or `None` if it has none.
///
/// The ternary clone is grown from the three projections until a Mal'cev
/// table appears. In an affine algebra every Mal'cev term operation coincides
/// with the affine one (`m(x,y,z) = m(t(x,y,y), t(y,y,y), t(y,y,z)) =
/// t(m(x,y,y), m(y,y,y), m(y,y,z)) = t(x,y,z)`), so the first Mal'cev table
/// found decides: it is the affine term if it commutes with every basic
/// operation, and otherwise no affine term exists.
pub fn find_affine_term(
    algebra: &FiniteAlgebra,
    budget: Budget,
) -> Result<Option<TernaryTermOperation>> {
    check_clone_budget(algebra, budget)?;
    let n = algebra.size();
    let maltsev = |table: &[Elem]| {
        let t = |x: usize, y: usize, z: usize| table[(x * n + y) * n + z] as usize;
        (0..n).all(|x| (0..n).all(|y| t(x, y, y) == x && t(y, y, x) == x))
    };
    let mut search = CloneSearch::new(algebra);
    match search.run(budget, maltsev)? {
        None => Ok(None),
        Some(id) => {
            let candidate = operation_from_search(&search, id)?;
            if affine_violation(algebra, &candidate).is_none() {
                Ok(Some(candidate))
            } else {
                Ok(None)
            }
        }
    }
}

/// Every affine table in the full ternary clone (exhaustive; for small algebras).
pub fn affine_terms_in_clone(
    algebra: &FiniteAlgebra,
    budget: Budget,
) -> Result<Vec<TernaryTermOperation>> {
    check_clone_budget(algebra, budget)?;
    let mut search = CloneSearch::new(algebra);
    search.run(budget, |_| false)?;
    let mut out = Vec::new();
    for id in 0..search.tables.len() {
        let t = operation_from_search(&search, id)?;
        if is_affine_term(algebra, &t) {
            out.push(t);
        }
    }
    out.sort_by(|a, b| a.table.cmp(&b.table));
    Ok(out)
}

/// Number of elements of the ternary term clone.
pub fn ternary_clone_size(algebra: &FiniteAlgebra, budget: Budget) -> Result<usize> {
    check_clone_budget(algebra, budget)?;
    let mut search = CloneSearch::new(algebra);
    search.run(budget, |_| false)?;
    Ok(search.tables.len())
}

/// An Abelian group `⟨A; add, neg, neutral⟩`, verified exhaustively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupStructure {
    base_size: usize,
    neutral: Elem,
    add: Vec<Elem>,
    neg: Vec<Elem>,
    exponent: u64,
}

impl GroupStructure {
    /// `x + y := t(x, c, y)`, `-x := t(c, x, c)`, neutral `c`.
    pub fn from_affine(t: &TernaryTermOperation, c: Elem) -> Result<Self> {
        let n = t.base_size();
        if c as usize >= n {
            return Err(invalid(format!("neutral {c} outside universe")));
        }
        let add = (0..n * n)
            .map(|i| t.apply((i / n) as Elem, c, (i % n) as Elem))
            .collect();
        let neg = (0..n as Elem).map(|x| t.apply(c, x, c)).collect();
        Self::from_tables(n, c, add, neg)
    }

    /// Verifies the Abelian group axioms on explicit tables.
    pub fn from_tables(base_size: usize, neutral: Elem, add: Vec<Elem>, neg: Vec<Elem>) -> Result<Self> {
        let n = base_size;
        if add.len() != n * n || neg.len() != n {
            return Err(invalid("group tables have the wrong length"));
        }
        let g = GroupStructure {
            base_size,
            neutral,
            add,
            neg,
            exponent: 1,
        };
        let e = neutral;
        for x in 0..n as Elem {
            if g.add(x, e) != x {
                return Err(invariant(format!("{e} is not neutral for {x}")));
            }
            if g.add(x, g.neg(x)) != e {
                return Err(invariant(format!("-{x} is not an inverse")));
            }
            for y in 0..n as Elem {
                if g.add(x, y) != g.add(y, x) {
                    return Err(invariant(format!("addition is not commutative at ({x},{y})")));
                }
                for z in 0..n as Elem {
                    if g.add(g.add(x, y), z) != g.add(x, g.add(y, z)) {
                        return Err(invariant(format!(
                            "addition is not associative at ({x},{y},{z})"
                        )));
                    }
                }
            }
        }
        let exponent = (0..n as Elem).map(|x| g.order(x)).fold(1, lcm);
        Ok(GroupStructure { exponent, ..g })
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn neutral(&self) -> Elem {
        self.neutral
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        self.add[x as usize * self.base_size + y as usize]
    }

    #[inline]
    pub fn neg(&self, x: Elem) -> Elem {
        self.neg[x as usize]
    }

    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    pub fn order(&self, x: Elem) -> u64 {
        let mut acc = x;
        let mut k = 1;
        while acc != self.neutral {
            acc = self.add(acc, x);
            k += 1;
        }
        k
    }

    /// `u · x` for any integer `u`.
    pub fn scale(&self, u: i64, x: Elem) -> Elem {
        let e = self.exponent as i64;
        let mut k = u.rem_euclid(e);
        let mut acc = self.neutral;
        let mut base = x;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    /// `Σ u_k x_k`.
    pub fn linear_combination(&self, coeffs: &[i64], args: &[Elem]) -> Elem {
        coeffs
            .iter()
            .zip(args)
            .fold(self.neutral, |acc, (&u, &x)| self.add(acc, self.scale(u, x)))
    }

    /// `⟨A; add, neg, zero⟩` as an algebra.
    pub fn to_algebra(&self, name: &str) -> FiniteAlgebra {
        FiniteAlgebra::new(
            name,
            self.base_size,
            vec![
                ("add".into(), 2, self.add.clone()),
                ("neg".into(), 1, self.neg.clone()),
                ("zero".into(), 0, vec![self.neutral]),
            ],
        )
        .expect("verified group tables")
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Integer coefficients `u_1..u_n` with `Σ u_k = 1`, read as `Σ u_k x_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineTerm {
    coeffs: Vec<i64>,
}

impl AffineTerm {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        let sum: i64 = coeffs.iter().sum();
        if sum != 1 {
            return Err(invalid(format!(
                "affine coefficients must sum to 1, got {sum} for {coeffs:?}"
            )));
        }
        Ok(AffineTerm { coeffs })
    }

    /// The projection onto coordinate `i` of an `arity`-ary tuple.
    pub fn projection(arity: usize, i: usize) -> Self {
        let mut coeffs = vec![0; arity];
        coeffs[i] = 1;
        AffineTerm { coeffs }
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// The same combination as a composition of `t` (operation symbol 0).
    ///
    /// Uses `Σ u_k x_k = x_1 + Σ_k u_k (x_k - x_1)` with `t(x_k, x_1, acc) = acc + x_k - x_1`;
    /// coefficients are reduced modulo `modulus`, which must be a multiple of the
    /// group exponent (the universe size always is).
    pub fn to_term(&self, modulus: u64) -> Term {
        let mut acc = Term::Var(0);
        for (k, &u) in self.coeffs.iter().enumerate().skip(1) {
            let reps = u.rem_euclid(modulus as i64);
            for _ in 0..reps {
                acc = Term::Apply {
                    op: 0,
                    args: vec![Term::Var(k), Term::Var(0), acc],
                };
            }
        }
        acc
    }
}

impl fmt::Display for AffineTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|u| u.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `Σ u_k x_k` computed in the group `(t, c)`; independent of `c`.
pub fn eval_affine_combination(
    term: &AffineTerm,
    t: &TernaryTermOperation,
    c: Elem,
    args: &[Elem],
) -> Result<Elem> {
    if args.len() != term.arity() {
        return Err(invalid(format!(
            "affine term of arity {} applied to {} arguments",
            term.arity(),
            args.len()
        )));
    }
    let sum: i64 = term.coeffs.iter().sum();
    if sum != 1 {
        return Err(invalid(format!("coefficients sum to {sum}, not 1")));
    }
    let g = GroupStructure::from_affine(t, c)?;
    Ok(g.linear_combination(&term.coeffs, args))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn minus_plus_oracle(n: usize, add: impl Fn(usize, usize) -> usize, neg: impl Fn(usize) -> usize) -> Vec<Elem> {
        let mut v = Vec::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    v.push(add(add(x, neg(y)), z) as Elem);
                }
            }
        }
        v
    }

    #[test]
    fn z4_term_is_x_minus_y_plus_z() {
        let t = find_affine_term(&catalog::cyclic_group(4), Budget::default())
            .unwrap()
            .unwrap();
        assert_eq!(t.table(), minus_plus_oracle(4, |a, b| (a + b) % 4, |a| (4 - a) % 4));
        assert!(t.provenance().is_some());
    }

    #[test]
    fn klein_term_is_sum() {
        let t = find_affine_term(&catalog::klein_group(), Budget::default())
            .unwrap()
            .unwrap();
        assert_eq!(t.table(), minus_plus_oracle(4, |a, b| a ^ b, |a| a));
    }

    #[test]
    fn non_abelian_inputs_have_none() {
        let b = Budget::default();
        assert!(find_affine_term(&catalog::semilattice2(), b).unwrap().is_none());
        assert!(find_affine_term(&catalog::symmetric_group_s3(), b).unwrap().is_none());
        // the semilattice clone is small enough to scan: x∧y∧z and friends, 7 tables
        assert_eq!(ternary_clone_size(&catalog::semilattice2(), b).unwrap(), 7);
    }

    #[test]
    fn clone_budget_rejects_eleven_elements() {
        let err = find_affine_term(&catalog::cyclic_group(11), Budget::default()).unwrap_err();
        assert!(matches!(err, crate::Error::BudgetExceeded { .. }));
        assert!(find_affine_term(&catalog::cyclic_group(10), Budget::default()).is_ok());
    }

    #[test]
    fn affine_term_is_unique_in_the_clone() {
        for a in [
            catalog::cyclic_group(2),
            catalog::cyclic_group(3),
            catalog::cyclic_group(4),
            catalog::klein_group(),
            catalog::cyclic_affine(4),
        ] {
            let all = affine_terms_in_clone(&a, Budget::default()).unwrap();
            assert_eq!(all.len(), 1, "{}", a.name());
            let found = find_affine_term(&a, Budget::default()).unwrap().unwrap();
            assert_eq!(all[0].table(), found.table());
        }
    }

    #[test]
    fn groups_from_z4_term() {
        let t = find_affine_term(&catalog::cyclic_group(4), Budget::default())
            .unwrap()
            .unwrap();
        let g0 = GroupStructure::from_affine(&t, 0).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(g0.add(x, y), (x + y) % 4);
            }
        }
        let g1 = GroupStructure::from_affine(&t, 1).unwrap();
        assert_eq!(g1.neutral(), 1);
        // x +^1 y = x + y - 1; cyclic of order 4 generated by 0
        assert_eq!(g1.order(0), 4);
        assert_eq!(g1.exponent(), 4);
    }

    #[test]
    fn klein_groups_for_every_neutral() {
        let t = find_affine_term(&catalog::klein_group(), Budget::default())
            .unwrap()
            .unwrap();
        for c in 0..4 {
            let g = GroupStructure::from_affine(&t, c).unwrap();
            assert_eq!(g.exponent(), 2);
            assert!((0..4).all(|x| g.add(x, x) == c));
        }
    }

    #[test]
    fn non_affine_table_fails_group_axioms() {
        let t = TernaryTermOperation::from_table(2, vec![0; 8]).unwrap();
        assert!(GroupStructure::from_affine(&t, 0).is_err());
    }

    #[test]
    fn affine_combinations() {
        let t = find_affine_term(&catalog::cyclic_group(4), Budget::default())
            .unwrap()
            .unwrap();
        let proj = AffineTerm::new(vec![1, 0, 0]).unwrap();
        assert_eq!(eval_affine_combination(&proj, &t, 0, &[3, 1, 2]).unwrap(), 3);
        let tt = AffineTerm::new(vec![1, -1, 1]).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                for z in 0..4 {
                    assert_eq!(eval_affine_combination(&tt, &t, 2, &[x, y, z]).unwrap(), t.apply(x, y, z));
                }
            }
        }
        let u = AffineTerm::new(vec![3, -1, -1]).unwrap();
        assert_eq!(eval_affine_combination(&u, &t, 0, &[1, 2, 3]).unwrap(), 2);
        assert!(AffineTerm::new(vec![1, 1]).is_err());
    }

    #[test]
    fn power_of_term_is_the_term_of_the_power() {
        let z2 = catalog::cyclic_group(2);
        let t = find_affine_term(&z2, Budget::default()).unwrap().unwrap();
        let sq = z2.power(2, Budget::default()).unwrap();
        let t2 = find_affine_term(&sq, Budget::default()).unwrap().unwrap();
        assert_eq!(t.power(2, Budget::default()).unwrap().table(), t2.table());
        assert!(is_affine_term(&sq, &t.power(2, Budget::default()).unwrap()));
    }

    #[test]
    fn term_syntax_round_trips() {
        let t = Term::parse("f0(x1, f2(), f1(x3))").unwrap();
        assert_eq!(t.render(), "f0(x1,f2(),f1(x3))");
        assert_eq!(Term::parse(&t.render()).unwrap(), t);
        assert_eq!(t.var_count(), 3);
        assert_eq!(t.max_op(), Some(2));
        assert!(Term::parse("x0").is_err());
        assert!(Term::parse("f0(x1").is_err());
    }

    #[test]
    fn induced_term_on_quotient() {
        let z4 = catalog::cyclic_group(4);
        let t = find_affine_term(&z4, Budget::default()).unwrap().unwrap();
        let theta = Congruence::new(&z4, vec![0, 1, 0, 1]).unwrap();
        let s = t.induced(&theta).unwrap();
        let z2_t = find_affine_term(&catalog::cyclic_group(2), Budget::default())
            .unwrap()
            .unwrap();
        assert_eq!(s.table(), z2_t.table());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn combination_is_independent_of_neutral(
                coeffs in proptest::collection::vec(-7i64..8, 1..5),
                args in proptest::collection::vec(0u32..6, 5),
                which in 0usize..3,
            ) {
                let mut coeffs = coeffs;
                let s: i64 = coeffs.iter().sum();
                coeffs[0] += 1 - s;
                let algebra = [catalog::cyclic_group(6), catalog::klein_group(), catalog::cyclic_group(5)][which].clone();
                let n = algebra.size() as u32;
                let t = find_affine_term(&algebra, Budget::default()).unwrap().unwrap();
                let term = AffineTerm::new(coeffs.clone()).unwrap();
                let args: Vec<Elem> = args[..coeffs.len()].iter().map(|a| a % n).collect();
                let first = eval_affine_combination(&term, &t, 0, &args).unwrap();
                for c in 1..n {
                    prop_assert_eq!(eval_affine_combination(&term, &t, c, &args).unwrap(), first);
                }
                // the composition in t computes the same value
                let tree = term.to_term(n as u64);
                prop_assert_eq!(tree.eval_with(&args, &|_, a| t.apply(a[0], a[1], a[2])), first);
            }
        }
    }
}
