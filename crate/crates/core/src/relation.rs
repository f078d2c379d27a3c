use std::fmt;

use crate::algebra::{decode, encode, for_each_tuple, Elem, FiniteAlgebra};
use crate::error::{invalid, Result};

/// A finite set of `arity`-tuples over `{0..base_size-1}`, kept sorted and deduplicated.
///
/// Relation equality is set equality because the tuple order is canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    arity: usize,
    base_size: usize,
    tuples: Vec<Vec<Elem>>,
}

impl Relation {
    pub fn new(arity: usize, base_size: usize, mut tuples: Vec<Vec<Elem>>) -> Result<Self> {
        if arity == 0 {
            return Err(invalid("relation arity must be positive"));
        }
        for t in &tuples {
            if t.len() != arity {
                return Err(invalid(format!(
                    "tuple {t:?} has length {} but relation arity is {arity}",
                    t.len()
                )));
            }
            if let Some(bad) = t.iter().find(|&&v| v as usize >= base_size) {
                return Err(invalid(format!(
                    "tuple entry {bad} outside universe of size {base_size}"
                )));
            }
        }
        tuples.sort_unstable();
        tuples.dedup();
        Ok(Relation {
            arity,
            base_size,
            tuples,
        })
    }

    /// Builds a relation from element codes of `A^arity`.
    pub fn from_codes(arity: usize, base_size: usize, codes: &[Elem]) -> Self {
        let mut tuples: Vec<Vec<Elem>> = codes
            .iter()
            .map(|&c| decode(base_size, arity, c))
            .collect();
        tuples.sort_unstable();
        tuples.dedup();
        Relation {
            arity,
            base_size,
            tuples,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn tuples(&self) -> &[Vec<Elem>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[Elem]) -> bool {
        self.tuples
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .is_ok()
    }

    /// Element codes in `A^arity`, ascending.
    pub fn codes(&self) -> Vec<Elem> {
        self.tuples.iter().map(|t| encode(self.base_size, t)).collect()
    }

    pub fn is_full(&self) -> bool {
        self.tuples.len() as u128 == (self.base_size as u128).pow(self.arity as u32)
    }

    /// `A^arity`.
    pub fn full(arity: usize, base_size: usize) -> Self {
        let mut tuples = Vec::new();
        for_each_tuple(base_size, arity, |t| {
            tuples.push(t.to_vec());
            true
        });
        Relation {
            arity,
            base_size,
            tuples,
        }
    }

    /// `{(x, .., x)}`.
    pub fn diagonal(arity: usize, base_size: usize) -> Self {
        Relation {
            arity,
            base_size,
            tuples: (0..base_size as Elem).map(|x| vec![x; arity]).collect(),
        }
    }

    /// The graph `{(x⃗, f(x⃗))}` of operation `op` of `algebra`.
    pub fn graph_of(algebra: &FiniteAlgebra, op: usize) -> Self {
        let arity = algebra.ops()[op].arity();
        let mut tuples = Vec::new();
        for_each_tuple(algebra.size(), arity, |args| {
            let mut t = args.to_vec();
            t.push(algebra.apply(op, args));
            tuples.push(t);
            true
        });
        Relation {
            arity: arity + 1,
            base_size: algebra.size(),
            tuples,
        }
    }

    /// The graph of an operation given by its table.
    pub fn graph_of_table(base_size: usize, arity: usize, table: &[Elem]) -> Self {
        let mut tuples = Vec::with_capacity(table.len());
        let mut i = 0;
        for_each_tuple(base_size, arity, |args| {
            let mut t = args.to_vec();
            t.push(table[i]);
            i += 1;
            tuples.push(t);
            true
        });
        Relation {
            arity: arity + 1,
            base_size,
            tuples,
        }
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        if self.arity != other.arity || self.base_size != other.base_size {
            return Err(invalid(format!(
                "cannot intersect relations of arity {} and {}",
                self.arity, other.arity
            )));
        }
        let tuples = self
            .tuples
            .iter()
            .filter(|t| other.contains(t))
            .cloned()
            .collect();
        Ok(Relation {
            arity: self.arity,
            base_size: self.base_size,
            tuples,
        })
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.arity == other.arity && self.tuples.iter().all(|t| other.contains(t))
    }

    /// `{(x_1, .., x_n, x_n) : (x_1, .., x_n) ∈ R}`.
    pub fn pad_last(&self) -> Relation {
        let tuples = self
            .tuples
            .iter()
            .map(|t| {
                let mut p = t.clone();
                p.push(*t.last().expect("arity is positive"));
                p
            })
            .collect();
        Relation {
            arity: self.arity + 1,
            base_size: self.base_size,
            tuples,
        }
    }

    /// Inverse of [`Relation::pad_last`]; fails unless the last two coordinates agree everywhere.
    pub fn strip_last(&self) -> Result<Relation> {
        if self.arity < 2 {
            return Err(invalid("cannot strip a coordinate from a unary relation"));
        }
        if let Some(t) = self
            .tuples
            .iter()
            .find(|t| t[self.arity - 1] != t[self.arity - 2])
        {
            return Err(invalid(format!(
                "last coordinate is not a duplicate of the previous one in {t:?}"
            )));
        }
        let tuples = self
            .tuples
            .iter()
            .map(|t| t[..self.arity - 1].to_vec())
            .collect();
        Ok(Relation {
            arity: self.arity - 1,
            base_size: self.base_size,
            tuples,
        })
    }

    /// Reads the relation as the graph of a total function on its first `arity-1` coordinates.
    pub fn to_function_table(&self) -> Result<Vec<Elem>> {
        if self.arity < 1 {
            return Err(invalid("relation has no coordinates"));
        }
        let k = self.arity - 1;
        let expected = (self.base_size as u128).pow(k as u32);
        if self.tuples.len() as u128 != expected {
            return Err(invalid(format!(
                "relation has {} tuples; the graph of a total {k}-ary function has {expected}",
                self.tuples.len()
            )));
        }
        let mut table = Vec::with_capacity(expected as usize);
        let mut i = 0usize;
        let mut ok = true;
        // Sorted order lists argument tuples lexicographically, so the i-th tuple
        // must start with the i-th argument tuple.
        for_each_tuple(self.base_size, k, |args| {
            let t = &self.tuples[i];
            if &t[..k] != args {
                ok = false;
                return false;
            }
            table.push(t[k]);
            i += 1;
            true
        });
        if !ok {
            return Err(invalid("relation is not the graph of a function"));
        }
        Ok(table)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.tuples.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, v) in t.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

/// True iff `relation` is closed under every operation of `algebra` acting coordinatewise.
pub fn is_compatible_relation(algebra: &FiniteAlgebra, relation: &Relation) -> Result<bool> {
    if relation.base_size() != algebra.size() {
        return Err(invalid(format!(
            "relation is over a universe of size {} but {} has size {}",
            relation.base_size(),
            algebra.name(),
            algebra.size()
        )));
    }
    Ok(compatibility_witness(algebra, relation).is_none())
}

/// A violating application `(operation name, argument tuples, result)` if one exists.
pub fn compatibility_witness(
    algebra: &FiniteAlgebra,
    relation: &Relation,
) -> Option<(String, Vec<Vec<Elem>>, Vec<Elem>)> {
    let rows = relation.tuples();
    let k = relation.arity();
    for (i, op) in algebra.ops().iter().enumerate() {
        let m = op.arity();
        let mut witness = None;
        let mut column = vec![0; m];
        let mut image = vec![0; k];
        for_each_tuple(rows.len(), m, |picks| {
            for j in 0..k {
                for (slot, &p) in column.iter_mut().zip(picks) {
                    *slot = rows[p as usize][j];
                }
                image[j] = algebra.apply(i, &column);
            }
            if relation.contains(&image) {
                true
            } else {
                witness = Some((
                    op.name().to_string(),
                    picks.iter().map(|&p| rows[p as usize].clone()).collect(),
                    image.clone(),
                ));
                false
            }
        });
        if witness.is_some() {
            return witness;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn rel(arity: usize, base: usize, t: &[&[Elem]]) -> Relation {
        Relation::new(arity, base, t.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    #[test]
    fn diagonal_is_compatible() {
        let z2 = catalog::cyclic_group(2);
        assert!(is_compatible_relation(&z2, &Relation::diagonal(2, 2)).unwrap());
    }

    #[test]
    fn coset_of_diagonal_needs_the_affine_reduct() {
        let coset = rel(2, 4, &[&[0, 2], &[1, 3], &[2, 0], &[3, 1]]);
        // With the constant 0 in the signature the coset misses (0,0).
        let z4 = catalog::cyclic_group(4);
        let w = compatibility_witness(&z4, &coset).unwrap();
        assert_eq!(w.0, "add");
        // The affine reduct has no constants, and t maps the coset into itself.
        assert!(is_compatible_relation(&catalog::cyclic_affine(4), &coset).unwrap());
    }

    #[test]
    fn subgroup_and_non_subgroup_of_z2_squared() {
        let z2 = catalog::cyclic_group(2);
        // {0} × Z2 is a subgroup
        assert!(is_compatible_relation(&z2, &rel(2, 2, &[&[0, 0], &[0, 1]])).unwrap());
        // (1,1) + (0,1) = (1,0) escapes
        let bad = rel(2, 2, &[&[0, 0], &[0, 1], &[1, 1]]);
        let w = compatibility_witness(&z2, &bad).unwrap();
        assert_eq!(w.0, "add");
        assert_eq!(w.2, vec![1, 0]);
    }

    #[test]
    fn base_mismatch_is_an_error() {
        let z2 = catalog::cyclic_group(2);
        assert!(is_compatible_relation(&z2, &Relation::diagonal(2, 3)).is_err());
    }

    #[test]
    fn pad_strip_and_graph() {
        let z2 = catalog::cyclic_group(2);
        let g = Relation::graph_of(&z2, 0);
        assert_eq!(g.arity(), 3);
        assert_eq!(g.to_function_table().unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(g.pad_last().strip_last().unwrap(), g);
        assert!(g.strip_last().is_err());
        let not_fn = rel(2, 2, &[&[0, 0], &[0, 1], &[1, 1]]);
        assert!(not_fn.to_function_table().is_err());
    }

    #[test]
    fn rejects_out_of_range_tuples() {
        assert!(Relation::new(2, 2, vec![vec![0, 2]]).is_err());
        assert!(Relation::new(2, 2, vec![vec![0]]).is_err());
        assert!(Relation::new(0, 2, vec![]).is_err());
    }
}
