use crate::algebra::{for_each_tuple, same_signature, Elem, FiniteAlgebra};
use crate::budget::{checked_pow, Budget};
use crate::error::{invalid, Result};
use crate::subuniverse::{for_each_tuple_with_max, generating_set};

/// A map between universes that commutes with every operation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Homomorphism {
    domain_size: usize,
    codomain_size: usize,
    map: Vec<Elem>,
}

impl Homomorphism {
    /// Verifies `map` exhaustively against every operation before accepting it.
    pub fn new(domain: &FiniteAlgebra, codomain: &FiniteAlgebra, map: Vec<Elem>) -> Result<Self> {
        if map.len() != domain.size() {
            return Err(invalid(format!(
                "map has {} entries but {} has {} elements",
                map.len(),
                domain.name(),
                domain.size()
            )));
        }
        if let Some(bad) = map.iter().find(|&&v| v as usize >= codomain.size()) {
            return Err(invalid(format!("image {bad} outside {}", codomain.name())));
        }
        if let Some((op, args)) = hom_violation(domain, codomain, &map)? {
            return Err(invalid(format!(
                "map does not preserve {op} at arguments {args:?}"
            )));
        }
        Ok(Self::from_verified(domain.size(), codomain.size(), map))
    }

    /// Checks only sizes and ranges. The caller is responsible for the morphism
    /// property, e.g. by exhibiting the map as `g ∘ (p_1, …, p_m)` with `g` a
    /// verified morphism and the `p_j` terms.
    pub fn unchecked(domain_size: usize, codomain_size: usize, map: Vec<Elem>) -> Result<Self> {
        if map.len() != domain_size {
            return Err(invalid(format!("map has {} entries, domain has {domain_size}", map.len())));
        }
        if let Some(bad) = map.iter().find(|&&v| v as usize >= codomain_size) {
            return Err(invalid(format!("image {bad} outside a codomain of size {codomain_size}")));
        }
        Ok(Self::from_verified(domain_size, codomain_size, map))
    }

    pub(crate) fn from_verified(domain_size: usize, codomain_size: usize, map: Vec<Elem>) -> Self {
        Homomorphism {
            domain_size,
            codomain_size,
            map,
        }
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain_size
    }

    pub fn map(&self) -> &[Elem] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.map[x as usize]
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain_size];
        for &v in &self.map {
            hit[v as usize] = true;
        }
        hit.into_iter().all(|h| h)
    }
}

/// First `(operation, arguments)` where `map` fails to commute, if any.
pub fn hom_violation(
    domain: &FiniteAlgebra,
    codomain: &FiniteAlgebra,
    map: &[Elem],
) -> Result<Option<(String, Vec<Elem>)>> {
    same_signature(domain, codomain)?;
    for (i, op) in domain.ops().iter().enumerate() {
        let j = codomain.op_index(op.name()).expect("same signature");
        let mut image = vec![0; op.arity()];
        let mut bad = None;
        for_each_tuple(domain.size(), op.arity(), |args| {
            for (s, &a) in image.iter_mut().zip(args) {
                *s = map[a as usize];
            }
            if map[domain.apply(i, args) as usize] != codomain.apply(j, &image) {
                bad = Some(args.to_vec());
                false
            } else {
                true
            }
        });
        if let Some(args) = bad {
            return Ok(Some((op.name().to_string(), args)));
        }
    }
    Ok(None)
}

/// Extends generator images to the whole domain, or `None` on a conflict.
///
/// Every operation instance over the domain is visited once, so a successful
/// extension is a homomorphism.
fn extend_from_generators(
    domain: &FiniteAlgebra,
    codomain: &FiniteAlgebra,
    op_pairs: &[(usize, usize)],
    gens: &[Elem],
    images: &[Elem],
) -> Option<Vec<Elem>> {
    const UNSET: Elem = Elem::MAX;
    let mut map = vec![UNSET; domain.size()];
    let mut order: Vec<Elem> = Vec::with_capacity(domain.size());
    let assign = |map: &mut Vec<Elem>, order: &mut Vec<Elem>, x: Elem, v: Elem| -> bool {
        let slot = &mut map[x as usize];
        if *slot == UNSET {
            *slot = v;
            order.push(x);
            true
        } else {
            *slot == v
        }
    };
    for &(i, j) in op_pairs {
        if domain.ops()[i].arity() == 0 {
            let x = domain.apply(i, &[]);
            let v = codomain.apply(j, &[]);
            if !assign(&mut map, &mut order, x, v) {
                return None;
            }
        }
    }
    for (&g, &v) in gens.iter().zip(images) {
        if !assign(&mut map, &mut order, g, v) {
            return None;
        }
    }
    let mut processed = 0;
    let mut args = Vec::new();
    let mut image = Vec::new();
    while processed < order.len() {
        let idx = processed;
        for &(i, j) in op_pairs {
            let m = domain.ops()[i].arity();
            if m == 0 {
                continue;
            }
            args.resize(m, 0);
            image.resize(m, 0);
            let mut pending = Vec::new();
            let mut conflict = false;
            for_each_tuple_with_max(idx, m, |picks| {
                if conflict {
                    return;
                }
                for k in 0..m {
                    args[k] = order[picks[k]];
                    image[k] = map[args[k] as usize];
                }
                let r = domain.apply(i, &args);
                let v = codomain.apply(j, &image);
                let cur = map[r as usize];
                if cur == UNSET {
                    pending.push((r, v));
                } else if cur != v {
                    conflict = true;
                }
            });
            if conflict {
                return None;
            }
            for (r, v) in pending {
                if !assign(&mut map, &mut order, r, v) {
                    return None;
                }
            }
        }
        processed += 1;
    }
    if order.len() == domain.size() {
        Some(map)
    } else {
        None
    }
}

/// All homomorphisms `domain → codomain`, sorted by map table.
///
/// Backtracks over images of a greedily chosen generating set, so the cost is
/// `|codomain|^(#generators)` extensions rather than `|codomain|^|domain|` maps.
pub fn enumerate_homs(
    domain: &FiniteAlgebra,
    codomain: &FiniteAlgebra,
    budget: Budget,
) -> Result<Vec<Homomorphism>> {
    same_signature(domain, codomain)?;
    let op_pairs: Vec<(usize, usize)> = domain
        .ops()
        .iter()
        .enumerate()
        .map(|(i, o)| (i, codomain.op_index(o.name()).expect("same signature")))
        .collect();
    let gens = generating_set(domain);
    let candidates = checked_pow(codomain.size() as u128, gens.len() as u128);
    budget.check_with_hint(
        &format!(
            "generator images for Hom({}, {}) ({} generators)",
            domain.name(),
            codomain.name(),
            gens.len()
        ),
        candidates,
        Some("raise --budget or supply a smaller generating set"),
    )?;
    let mut out = Vec::new();
    for_each_tuple(codomain.size(), gens.len(), |images| {
        if let Some(map) = extend_from_generators(domain, codomain, &op_pairs, &gens, images) {
            out.push(Homomorphism::from_verified(
                domain.size(),
                codomain.size(),
                map,
            ));
        }
        true
    });
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn brute_force_homs(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Vec<Vec<Elem>> {
        let mut out = Vec::new();
        for_each_tuple(b.size(), a.size(), |map| {
            if hom_violation(a, b, map).unwrap().is_none() {
                out.push(map.to_vec());
            }
            true
        });
        out
    }

    #[test]
    fn hom_z2_to_z4() {
        let homs = enumerate_homs(
            &catalog::cyclic_group(2),
            &catalog::cyclic_group(4),
            Budget::default(),
        )
        .unwrap();
        let maps: Vec<_> = homs.iter().map(|h| h.map().to_vec()).collect();
        assert_eq!(maps, vec![vec![0, 0], vec![0, 2]]);
    }

    #[test]
    fn endomorphisms_of_z4_are_multiplications() {
        let z4 = catalog::cyclic_group(4);
        let homs = enumerate_homs(&z4, &z4, Budget::default()).unwrap();
        let mut expected: Vec<Vec<Elem>> = (0..4)
            .map(|u| (0..4).map(|x| (u * x) % 4).collect())
            .collect();
        expected.sort();
        let maps: Vec<_> = homs.iter().map(|h| h.map().to_vec()).collect();
        assert_eq!(maps, expected);
    }

    #[test]
    fn matches_brute_force_filter() {
        let algebras = [
            catalog::cyclic_group(2),
            catalog::cyclic_group(3),
            catalog::cyclic_group(4),
            catalog::klein_group(),
        ];
        for a in &algebras {
            for b in &algebras {
                let fast: Vec<_> = enumerate_homs(a, b, Budget::default())
                    .unwrap()
                    .into_iter()
                    .map(|h| h.map().to_vec())
                    .collect();
                assert_eq!(fast, brute_force_homs(a, b), "{} -> {}", a.name(), b.name());
            }
        }
        for a in [catalog::cyclic_affine(2), catalog::cyclic_affine(3), catalog::cyclic_affine(4)] {
            for b in [catalog::cyclic_affine(2), catalog::cyclic_affine(4)] {
                let fast: Vec<_> = enumerate_homs(&a, &b, Budget::default())
                    .unwrap()
                    .into_iter()
                    .map(|h| h.map().to_vec())
                    .collect();
                assert_eq!(fast, brute_force_homs(&a, &b), "{} -> {}", a.name(), b.name());
            }
        }
    }

    #[test]
    fn identity_is_always_a_hom() {
        for a in [catalog::symmetric_group_s3(), catalog::semilattice2(), catalog::klein_group()] {
            let id: Vec<Elem> = (0..a.size() as Elem).collect();
            let homs = enumerate_homs(&a, &a, Budget::default()).unwrap();
            assert!(homs.iter().any(|h| h.map() == id.as_slice()));
            assert!(Homomorphism::new(&a, &a, id).is_ok());
        }
    }

    #[test]
    fn constructor_rejects_non_homs() {
        let z4 = catalog::cyclic_group(4);
        assert!(Homomorphism::new(&z4, &z4, vec![0, 1, 1, 0]).is_err());
        assert!(Homomorphism::new(&z4, &z4, vec![0, 1]).is_err());
        assert!(Homomorphism::new(&z4, &catalog::semilattice2(), vec![0, 0, 0, 0]).is_err());
    }

    #[test]
    fn budget_error_carries_hint() {
        let a = catalog::cyclic_group(2).power(6, Budget::default()).unwrap();
        let err = enumerate_homs(&a, &catalog::cyclic_group(4), Budget(100)).unwrap_err();
        assert!(err.to_string().contains("generat"));
    }
}
