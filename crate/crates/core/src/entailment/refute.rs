//! Searching for a map that preserves every premise but not the target.
//!
//! A witness proves that the premises do not entail the target. Running out
//! of maps proves nothing about larger arities.

use rayon::prelude::*;

use super::Value;
use crate::algebra::{for_each_tuple, table_index, Elem};
use crate::budget::{checked_pow, Budget};
use crate::error::{invalid, Result};
use crate::relation::Relation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefutationOutcome {
    /// `map` is the table of an `arity`-ary operation preserving every premise but not the target.
    Witness { arity: usize, map: Vec<Elem> },
    /// Every map of arity up to `max_arity` that preserves the premises also preserves the target.
    NoWitness { max_arity: usize, maps_checked: u128 },
}

/// Whether the `m`-ary operation with table `map` preserves `rel`: applying it
/// to any `m` rows of `rel`, coordinate by coordinate, stays in `rel`.
pub fn preserves(base_size: usize, m: usize, map: &[Elem], rel: &Relation) -> bool {
    let rows = rel.tuples();
    let k = rel.arity();
    let mut column = vec![0; m];
    let mut image = vec![0; k];
    let mut ok = true;
    for_each_tuple(rows.len(), m, |picks| {
        for j in 0..k {
            for (slot, &p) in column.iter_mut().zip(picks) {
                *slot = rows[p as usize][j];
            }
            image[j] = map[table_index(base_size, &column)];
        }
        ok = rel.contains(&image);
        ok
    });
    ok
}

fn map_from_index(base: usize, len: usize, mut idx: u64) -> Vec<Elem> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (idx % base as u64) as Elem;
        idx /= base as u64;
    }
    out
}

/// Looks for the first map (by arity, then by table in lexicographic order)
/// of arity at most `max_arity` preserving all `premises` but not `target`.
/// Operations are treated through their graphs.
pub fn refute_entailment(
    base_size: usize,
    premises: &[Value],
    target: &Value,
    max_arity: usize,
    budget: Budget,
) -> Result<RefutationOutcome> {
    if base_size == 0 {
        return Err(invalid("empty universe"));
    }
    if premises.iter().chain([target]).any(|v| v.base_size() != base_size) {
        return Err(invalid("premise or target over a different universe"));
    }
    let mut total: u128 = 0;
    for m in 1..=max_arity {
        let entries = checked_pow(base_size as u128, m as u128);
        total = total.saturating_add(checked_pow(base_size as u128, entries));
    }
    budget.check_with_hint(
        &format!("candidate maps A^m -> A for m <= {max_arity}"),
        total,
        Some("lower the maximum arity"),
    )?;
    let premises: Vec<Relation> = premises.iter().map(Value::to_relation).collect();
    let target = target.to_relation();
    for m in 1..=max_arity {
        let len = base_size.pow(m as u32);
        let count = checked_pow(base_size as u128, len as u128) as u64;
        let found = (0..count).into_par_iter().find_first(|&idx| {
            let map = map_from_index(base_size, len, idx);
            !preserves(base_size, m, &map, &target)
                && premises.iter().all(|r| preserves(base_size, m, &map, r))
        });
        if let Some(idx) = found {
            return Ok(RefutationOutcome::Witness {
                arity: m,
                map: map_from_index(base_size, len, idx),
            });
        }
    }
    Ok(RefutationOutcome::NoWitness {
        max_arity,
        maps_checked: total,
    })
}
