//! Finite algebras with explicit operation tables, their powers and subalgebras.
//!
//! The universe of an algebra of size `n` is `{0, .., n-1}`. Operation tables
//! list results in lexicographic order of argument tuples, first argument most
//! significant. Elements of a power `A^k` are encoded in base `|A|`, first
//! coordinate most significant, so that numeric order on codes coincides with
//! lexicographic order on tuples.

use std::sync::Arc;

use crate::budget::{checked_pow, Budget};
use crate::error::{invalid, Result};

/// An element of a finite universe.
pub type Elem = u32;

/// Powers whose operation tables have at most this many entries get explicit
/// tables; larger ones are evaluated coordinatewise on demand.
const MATERIALIZE_LIMIT: u128 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Table {
    Explicit(Vec<Elem>),
    Coordinatewise,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    name: String,
    arity: usize,
    table: Table,
}

impl Operation {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct PowerOf {
    base: FiniteAlgebra,
    exponent: usize,
}

/// A finite algebra `⟨{0..n-1}; F⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    ops: Vec<Operation>,
    power: Option<Arc<PowerOf>>,
}

impl FiniteAlgebra {
    /// Builds an algebra from `(name, arity, table)` triples, validating every table.
    pub fn new<S: Into<String>>(
        name: S,
        size: usize,
        ops: Vec<(String, usize, Vec<Elem>)>,
    ) -> Result<Self> {
        let name = name.into();
        if size == 0 {
            return Err(invalid(format!("algebra {name}: size must be positive")));
        }
        let mut checked = Vec::with_capacity(ops.len());
        for (op_name, arity, table) in ops {
            if checked.iter().any(|o: &Operation| o.name == op_name) {
                return Err(invalid(format!(
                    "algebra {name}: duplicate operation name {op_name}"
                )));
            }
            let expected = checked_pow(size as u128, arity as u128);
            if table.len() as u128 != expected {
                return Err(invalid(format!(
                    "algebra {name}: operation {op_name} of arity {arity} needs {expected} table entries, got {}",
                    table.len()
                )));
            }
            if let Some(bad) = table.iter().find(|&&v| v as usize >= size) {
                return Err(invalid(format!(
                    "algebra {name}: operation {op_name} has entry {bad} outside universe of size {size}"
                )));
            }
            checked.push(Operation {
                name: op_name,
                arity,
                table: Table::Explicit(table),
            });
        }
        Ok(FiniteAlgebra {
            name,
            size,
            ops: checked,
            power: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name<S: Into<String>>(mut self, name: S) -> Self {
        self.name = name.into();
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    pub fn has_constants(&self) -> bool {
        self.ops.iter().any(|o| o.arity == 0)
    }

    pub fn max_arity(&self) -> usize {
        self.ops.iter().map(|o| o.arity).max().unwrap_or(0)
    }

    /// `(base, exponent)` when this algebra was built by [`FiniteAlgebra::power`].
    pub fn power_of(&self) -> Option<(&FiniteAlgebra, usize)> {
        self.power.as_ref().map(|p| (&p.base, p.exponent))
    }

    /// Size of the algebra whose tuples make up this universe (itself when not a power).
    pub fn coordinate_size(&self) -> usize {
        self.power_of().map_or(self.size, |(b, _)| b.size)
    }

    /// Number of coordinates of each element (1 when not a power).
    pub fn coordinate_count(&self) -> usize {
        self.power_of().map_or(1, |(_, k)| k)
    }

    /// Applies operation `op` to `args`.
    #[inline]
    pub fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let operation = &self.ops[op];
        debug_assert_eq!(args.len(), operation.arity);
        match &operation.table {
            Table::Explicit(t) => t[table_index(self.size, args)],
            Table::Coordinatewise => {
                let p = self.power.as_ref().expect("coordinatewise op without base");
                let base_size = p.base.size;
                let coords: Vec<Vec<Elem>> = args
                    .iter()
                    .map(|&a| decode(base_size, p.exponent, a))
                    .collect();
                let mut column = vec![0; operation.arity];
                let mut out = Vec::with_capacity(p.exponent);
                for j in 0..p.exponent {
                    for (slot, c) in column.iter_mut().zip(&coords) {
                        *slot = c[j];
                    }
                    out.push(p.base.apply(op, &column));
                }
                encode(base_size, &out)
            }
        }
    }

    /// The full table of operation `op`, materialized if necessary.
    pub fn table(&self, op: usize, budget: Budget) -> Result<Vec<Elem>> {
        match &self.ops[op].table {
            Table::Explicit(t) => Ok(t.clone()),
            Table::Coordinatewise => {
                let arity = self.ops[op].arity;
                let len = checked_pow(self.size as u128, arity as u128);
                budget.check(&format!("table of {}", self.ops[op].name), len)?;
                let mut args = vec![0; arity];
                let mut out = Vec::with_capacity(len as usize);
                for idx in 0..len as usize {
                    index_to_args(self.size, idx, &mut args);
                    out.push(self.apply(op, &args));
                }
                Ok(out)
            }
        }
    }

    /// The power `A^n`; universe encoded base `|A|`, first coordinate most significant.
    pub fn power(&self, n: usize, budget: Budget) -> Result<FiniteAlgebra> {
        if n == 0 {
            return Err(invalid("power exponent must be at least 1"));
        }
        let size = checked_pow(self.size as u128, n as u128);
        budget.check(&format!("universe of {}^{}", self.name, n), size)?;
        if n == 1 {
            return Ok(self.clone());
        }
        let (base, exponent) = match self.power_of() {
            // (A^k)^n is re-expressed as A^(k n) so coordinates stay flat.
            Some((b, k)) => (b.clone(), k * n),
            None => (self.clone(), n),
        };
        let size = size as usize;
        let mut algebra = FiniteAlgebra {
            name: format!("{}^{}", self.name, n),
            size,
            ops: self
                .ops
                .iter()
                .map(|o| Operation {
                    name: o.name.clone(),
                    arity: o.arity,
                    table: Table::Coordinatewise,
                })
                .collect(),
            power: Some(Arc::new(PowerOf { base, exponent })),
        };
        for i in 0..algebra.ops.len() {
            let len = checked_pow(size as u128, algebra.ops[i].arity as u128);
            if len <= MATERIALIZE_LIMIT {
                let table = algebra.table(i, Budget(u64::MAX))?;
                algebra.ops[i].table = Table::Explicit(table);
            }
        }
        Ok(algebra)
    }

    /// The subalgebra on `carrier`, re-indexed so that `carrier[i]` becomes `i`.
    pub fn subalgebra(&self, carrier: &[Elem], name: &str) -> Result<FiniteAlgebra> {
        if carrier.is_empty() {
            return Err(invalid("subalgebra carrier must be nonempty"));
        }
        let mut position = vec![u32::MAX; self.size];
        for (i, &e) in carrier.iter().enumerate() {
            if e as usize >= self.size {
                return Err(invalid(format!("element {e} outside universe")));
            }
            position[e as usize] = i as Elem;
        }
        let m = carrier.len();
        let mut ops = Vec::with_capacity(self.ops.len());
        for (i, op) in self.ops.iter().enumerate() {
            let len = m.pow(op.arity as u32);
            let mut local = vec![0; op.arity];
            let mut global = vec![0; op.arity];
            let mut table = Vec::with_capacity(len);
            for idx in 0..len {
                index_to_args(m, idx, &mut local);
                for (g, &l) in global.iter_mut().zip(&local) {
                    *g = carrier[l as usize];
                }
                let r = self.apply(i, &global);
                let p = position[r as usize];
                if p == u32::MAX {
                    return Err(invalid(format!(
                        "carrier is not closed under {}: result {r}",
                        op.name
                    )));
                }
                table.push(p);
            }
            ops.push((op.name.clone(), op.arity, table));
        }
        FiniteAlgebra::new(name, m, ops)
    }

    /// Direct product `A × B`, encoded as `a * |B| + b`. Signatures must agree.
    pub fn product(&self, other: &FiniteAlgebra, name: &str) -> Result<FiniteAlgebra> {
        same_signature(self, other)?;
        let size = self.size * other.size;
        let mut ops = Vec::new();
        for (i, op) in self.ops.iter().enumerate() {
            let j = other.op_index(&op.name).expect("checked signature");
            let len = size.pow(op.arity as u32);
            let mut args = vec![0; op.arity];
            let mut left = vec![0; op.arity];
            let mut right = vec![0; op.arity];
            let mut table = Vec::with_capacity(len);
            for idx in 0..len {
                index_to_args(size, idx, &mut args);
                for k in 0..op.arity {
                    left[k] = args[k] / other.size as Elem;
                    right[k] = args[k] % other.size as Elem;
                }
                let a = self.apply(i, &left);
                let b = other.apply(j, &right);
                table.push(a * other.size as Elem + b);
            }
            ops.push((op.name.clone(), op.arity, table));
        }
        FiniteAlgebra::new(name, size, ops)
    }
}

/// Fails unless both algebras have the same operation names with the same arities.
pub fn same_signature(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<()> {
    if a.ops.len() != b.ops.len() {
        return Err(invalid(format!(
            "{} and {} have different signatures",
            a.name, b.name
        )));
    }
    for op in &a.ops {
        match b.op_index(&op.name) {
            Some(j) if b.ops[j].arity == op.arity => {}
            _ => {
                return Err(invalid(format!(
                    "{} and {} have different signatures (operation {})",
                    a.name, b.name, op.name
                )))
            }
        }
    }
    Ok(())
}

/// Position of `args` in a table over a universe of size `size`.
#[inline]
pub fn table_index(size: usize, args: &[Elem]) -> usize {
    args.iter().fold(0usize, |acc, &a| acc * size + a as usize)
}

/// Inverse of [`table_index`]; writes the argument tuple into `args`.
#[inline]
pub fn index_to_args(size: usize, mut idx: usize, args: &mut [Elem]) {
    for slot in args.iter_mut().rev() {
        *slot = (idx % size) as Elem;
        idx /= size;
    }
}

/// Encodes a tuple over `{0..base-1}` as an integer, first coordinate most significant.
#[inline]
pub fn encode(base: usize, tuple: &[Elem]) -> Elem {
    table_index(base, tuple) as Elem
}

/// Decodes `code` into a tuple of `len` coordinates.
pub fn decode(base: usize, len: usize, code: Elem) -> Vec<Elem> {
    let mut out = vec![0; len];
    index_to_args(base, code as usize, &mut out);
    out
}

/// Calls `f` on every tuple of `{0..size-1}^len`; stops early if `f` returns false.
pub(crate) fn for_each_tuple(size: usize, len: usize, mut f: impl FnMut(&[Elem]) -> bool) {
    if len == 0 {
        f(&[]);
        return;
    }
    if size == 0 {
        return;
    }
    let mut t = vec![0 as Elem; len];
    loop {
        if !f(&t) {
            return;
        }
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            t[pos] += 1;
            if (t[pos] as usize) < size {
                break;
            }
            t[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn power_one_is_identity() {
        let z2 = catalog::cyclic_group(2);
        let p = z2.power(1, Budget::default()).unwrap();
        assert_eq!(p, z2);
    }

    #[test]
    fn power_of_z2_adds_coordinatewise() {
        let z2 = catalog::cyclic_group(2);
        let p = z2.power(2, Budget::default()).unwrap();
        let add = p.op_index("add").unwrap();
        assert_eq!(p.size(), 4);
        // (0,1) + (1,1) = (1,0)
        assert_eq!(p.apply(add, &[1, 3]), 2);
    }

    #[test]
    fn power_of_z3_adds_coordinatewise() {
        let z3 = catalog::cyclic_group(3);
        let p = z3.power(2, Budget::default()).unwrap();
        let add = p.op_index("add").unwrap();
        assert_eq!(p.size(), 9);
        assert_eq!(p.apply(add, &[4, 4]), 8);
        // independent oracle: decode, add mod 3, encode
        for x in 0..9u32 {
            for y in 0..9u32 {
                let (a, b) = (x / 3, x % 3);
                let (c, d) = (y / 3, y % 3);
                assert_eq!(p.apply(add, &[x, y]), ((a + c) % 3) * 3 + (b + d) % 3);
            }
        }
    }

    #[test]
    fn power_budget_names_size() {
        let z4 = catalog::cyclic_group(4);
        let err = z4.power(11, Budget::default()).unwrap_err();
        match err {
            crate::Error::BudgetExceeded { count, .. } => assert_eq!(count, 4u128.pow(11)),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn lazy_power_matches_materialized() {
        let z2 = catalog::cyclic_group(2);
        // 2^12 elements: binary table has 2^24 entries, above the materialize limit
        let p = z2.power(12, Budget::default()).unwrap();
        let add = p.op_index("add").unwrap();
        assert_eq!(p.apply(add, &[0b1010_1010_1010, 0b0110_0110_0110]), 0b1100_1100_1100);
        let sq = z2.power(6, Budget::default()).unwrap().power(2, Budget::default()).unwrap();
        assert_eq!(sq.power_of().unwrap().1, 12);
        assert_eq!(sq.apply(add, &[4095, 1]), 4094);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteAlgebra::new("x", 2, vec![("f".into(), 1, vec![0, 2])]).is_err());
        assert!(FiniteAlgebra::new("x", 2, vec![("f".into(), 1, vec![0])]).is_err());
        assert!(FiniteAlgebra::new(
            "x",
            2,
            vec![("f".into(), 1, vec![0, 1]), ("f".into(), 1, vec![1, 0])]
        )
        .is_err());
    }

    #[test]
    fn tuples_iterate_in_lex_order() {
        let mut seen = Vec::new();
        for_each_tuple(3, 2, |t| {
            seen.push(encode(3, t));
            true
        });
        assert_eq!(seen, (0..9).collect::<Vec<_>>());
        let mut count = 0;
        for_each_tuple(2, 0, |t| {
            assert!(t.is_empty());
            count += 1;
            true
        });
        assert_eq!(count, 1);
    }
}
