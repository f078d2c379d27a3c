//! Counting homomorphisms between Abelian algebras, generating families of
//! finite Abelian groups, and the groups `𝓗_k(A², S)` of binary morphisms
//! restricting to `k` on the diagonal.

use std::collections::{HashMap, VecDeque};

use crate::affine::{GroupStructure, TernaryTermOperation};
use crate::algebra::{Elem, FiniteAlgebra};
use crate::budget::Budget;
use crate::error::{invalid, invariant, Error, Result};
use crate::hom::{enumerate_homs, Homomorphism};
use crate::report::{Report, Verdict};

/// `n = Π p_i^{α_i}` with distinct primes in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSignature {
    pub factors: Vec<(u64, u32)>,
}

impl PrimeSignature {
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| *q == p)
            .map_or(0, |&(_, a)| a)
    }

    pub fn max_exponent(&self) -> u32 {
        self.factors.iter().map(|&(_, a)| a).max().unwrap_or(0)
    }

    pub fn value(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, a)| (p as u128).pow(a))
            .product()
    }
}

pub fn prime_signature(mut n: u64) -> PrimeSignature {
    assert!(n >= 1, "prime signature of 0");
    let mut factors = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut a = 0;
            while n % p == 0 {
                n /= p;
                a += 1;
            }
            factors.push((p, a));
        }
        p += 1;
    }
    if n > 1 {
        factors.push((n, 1));
    }
    PrimeSignature { factors }
}

fn primes_of(a: &PrimeSignature, b: &PrimeSignature) -> Vec<u64> {
    let mut ps: Vec<u64> = a.factors.iter().chain(&b.factors).map(|&(p, _)| p).collect();
    ps.sort_unstable();
    ps.dedup();
    ps
}

fn pow_exact(p: u64, e: u32) -> Result<u128> {
    (p as u128)
        .checked_pow(e)
        .ok_or_else(|| invalid(format!("{p}^{e} overflows 128 bits")))
}

/// `Π p^{e(α_p, β_p)}` over all primes dividing either size.
fn prime_product(a: u64, b: u64, exponent: impl Fn(u32, u32) -> u32) -> Result<u128> {
    let (sa, sb) = (prime_signature(a), prime_signature(b));
    let mut acc: u128 = 1;
    for p in primes_of(&sa, &sb) {
        let e = exponent(sa.exponent_of(p), sb.exponent_of(p));
        acc = acc
            .checked_mul(pow_exact(p, e)?)
            .ok_or_else(|| invalid("divisibility bound overflows 128 bits"))?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    /// Bound `Π p^{α β}` for group homomorphisms.
    Group,
    /// Bound `Π p^{(α+1) β}` for morphisms of Abelian algebras.
    Abelian,
}

/// The bound `|Hom(A,B)|` must divide, from the sizes of `A` and `B`.
pub fn hom_count_bound(a_size: u64, b_size: u64, mode: CountMode) -> Result<u128> {
    prime_product(a_size, b_size, |a, b| match mode {
        CountMode::Group => a * b,
        CountMode::Abelian => (a + 1) * b,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityCheck {
    pub claim: String,
    pub value: u128,
    pub bound: u128,
}

impl DivisibilityCheck {
    pub fn holds(&self) -> bool {
        self.bound % self.value == 0
    }

    pub fn to_report(&self) -> Report {
        Report::new(self.claim.clone(), Verdict::from_bool(self.holds())).with_section(
            "values",
            [
                format!("count = {}", self.value),
                format!("bound = {}", self.bound),
                format!("divides = {}", self.holds()),
            ],
        )
    }
}

/// Counts `Hom(A,B)` and compares with the divisibility bound for `mode`.
pub fn hom_divisibility_check(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    mode: CountMode,
    budget: Budget,
) -> Result<DivisibilityCheck> {
    let count = enumerate_homs(a, b, budget)?.len() as u128;
    let bound = hom_count_bound(a.size() as u64, b.size() as u64, mode)?;
    Ok(DivisibilityCheck {
        claim: format!(
            "|Hom({}, {})| divides the {} bound",
            a.name(),
            b.name(),
            match mode {
                CountMode::Group => "group",
                CountMode::Abelian => "abelian",
            }
        ),
        value: count,
        bound,
    })
}

/// `Π p_i^{α_i²}`, the bound on subdirectly irreducibles in the variety of `A`.
pub fn cardinal_si_bound(size: u64) -> Result<u128> {
    prime_product(size, 1, |a, _| a * a)
}

/// `|S|` divides `|End⟨A; +⟩|` for the group structure given by `t`.
pub fn endomorphism_divisibility_check(
    a: &FiniteAlgebra,
    t: &TernaryTermOperation,
    s: &FiniteAlgebra,
    budget: Budget,
) -> Result<DivisibilityCheck> {
    if t.base_size() != a.size() {
        return Err(invalid("affine term over a different universe"));
    }
    let group = GroupStructure::from_affine(t, 0)?.to_algebra(&format!("{}+", a.name()));
    let ends = enumerate_homs(&group, &group, budget)?.len() as u128;
    Ok(DivisibilityCheck {
        claim: format!("|{}| divides |End⟨{}; +⟩|", s.name(), a.name()),
        value: s.size() as u128,
        bound: ends,
    })
}

/// Generators `h_1..h_N` of a finite Abelian group with an expression for every element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingFamily {
    pub generators: Vec<Elem>,
    pub orders: Vec<u64>,
    /// `expressions[x]` gives coefficients with `x = Σ u_j h_j`, each `0 <= u_j < order_j`.
    pub expressions: Vec<Vec<i64>>,
}

impl GeneratingFamily {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn evaluate(&self, group: &GroupStructure, coeffs: &[i64]) -> Elem {
        group.linear_combination(coeffs, &self.generators)
    }

    /// The same family extended by copies of the neutral element up to `len`
    /// generators (any family can be padded this way without losing the span).
    pub fn padded_to(&self, len: usize, neutral: Elem) -> GeneratingFamily {
        let mut out = self.clone();
        while out.generators.len() < len {
            out.generators.push(neutral);
            out.orders.push(1);
            for e in &mut out.expressions {
                e.push(0);
            }
        }
        out
    }

    /// Coefficients of `x` over the generators.
    pub fn decompose(&self, x: Elem) -> Result<Vec<i64>> {
        self.expressions
            .get(x as usize)
            .cloned()
            .ok_or_else(|| invalid(format!("{x} is not an element of the group")))
    }
}

/// Greedy family: repeatedly adds the element of largest order modulo the
/// span of those already chosen (smallest element on ties).
///
/// Taking the largest order *in the quotient* splits off a cyclic summand of
/// every Sylow subgroup at each step, so at most `max α_i` generators are
/// used for a group of order `Π p_i^{α_i}`.
pub fn generating_family(group: &GroupStructure) -> Result<GeneratingFamily> {
    let n = group.base_size();
    let mut in_span = vec![false; n];
    in_span[group.neutral() as usize] = true;
    let mut span = vec![group.neutral()];
    let mut generators = Vec::new();
    while span.len() < n {
        let coset_order = |x: Elem| {
            let mut acc = x;
            let mut k = 1;
            while !in_span[acc as usize] {
                acc = group.add(acc, x);
                k += 1;
            }
            k
        };
        let (best, _) = (0..n as Elem)
            .map(|x| (x, coset_order(x)))
            .fold((0, 0), |(bx, bo), (x, o)| if o > bo { (x, o) } else { (bx, bo) });
        generators.push(best);
        // span := span + <best>
        let mut next = Vec::new();
        for &s in &span {
            let mut acc = s;
            loop {
                acc = group.add(acc, best);
                if in_span[acc as usize] {
                    break;
                }
                in_span[acc as usize] = true;
                next.push(acc);
            }
        }
        span.extend(next);
    }
    let bound = prime_signature(n as u64).max_exponent() as usize;
    if generators.len() > bound {
        return Err(invariant(format!(
            "generating family of size {} exceeds the bound {bound}",
            generators.len()
        )));
    }
    let orders: Vec<u64> = generators.iter().map(|&h| group.order(h)).collect();

    // breadth-first search over the Cayley graph
    let mut expressions: Vec<Option<Vec<i64>>> = vec![None; n];
    expressions[group.neutral() as usize] = Some(vec![0; generators.len()]);
    let mut queue = VecDeque::from([group.neutral()]);
    while let Some(x) = queue.pop_front() {
        let ex = expressions[x as usize].clone().expect("visited");
        for (j, &h) in generators.iter().enumerate() {
            let y = group.add(x, h);
            if expressions[y as usize].is_none() {
                let mut e = ex.clone();
                e[j] = (e[j] + 1) % orders[j] as i64;
                expressions[y as usize] = Some(e);
                queue.push_back(y);
            }
        }
    }
    let expressions: Vec<Vec<i64>> = expressions
        .into_iter()
        .map(|e| e.ok_or_else(|| invariant("generators do not span the group")))
        .collect::<Result<_>>()?;
    let family = GeneratingFamily {
        generators,
        orders,
        expressions,
    };
    for x in 0..n as Elem {
        if family.evaluate(group, &family.expressions[x as usize]) != x {
            return Err(invariant(format!("expression for {x} does not evaluate back")));
        }
    }
    Ok(family)
}

/// `𝓗_k(A², S)` with addition `f +^k̄ g = t(f, k̄, g)`.
#[derive(Debug, Clone)]
pub struct HkGroup {
    a_size: usize,
    k: Homomorphism,
    elements: Vec<Homomorphism>,
    index: HashMap<Vec<Elem>, usize>,
    group: GroupStructure,
}

impl HkGroup {
    pub fn k(&self) -> &Homomorphism {
        &self.k
    }

    pub fn elements(&self) -> &[Homomorphism] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The group on element indices.
    pub fn group(&self) -> &GroupStructure {
        &self.group
    }

    pub fn neutral(&self) -> usize {
        self.group.neutral() as usize
    }

    pub fn index_of(&self, map: &[Elem]) -> Option<usize> {
        self.index.get(map).copied()
    }

    /// `f(x, y)` for the element with index `i`.
    pub fn eval(&self, i: usize, x: Elem, y: Elem) -> Elem {
        self.elements[i].apply(x * self.a_size as Elem + y)
    }
}

fn bar(k: &Homomorphism, a_size: usize) -> Vec<Elem> {
    (0..a_size * a_size).map(|c| k.apply((c % a_size) as Elem)).collect()
}

fn pointwise(t: &TernaryTermOperation, f: &[Elem], g: &[Elem], h: &[Elem]) -> Vec<Elem> {
    f.iter()
        .zip(g)
        .zip(h)
        .map(|((&x, &y), &z)| t.apply(x, y, z))
        .collect()
}

/// Builds `𝓗_k(A², S)` and verifies that `f ↦ f_a` (with `a = 0`) embeds it into
/// `Hom(⟨A;+^a⟩, ⟨S;+^{k(a)}⟩)` and that `f ↦ t(f, k̄, j̄)` is an isomorphism onto
/// `𝓗_j(A², S)` for every morphism `j: A -> S`.
pub fn build_hk_group(
    a: &FiniteAlgebra,
    s: &FiniteAlgebra,
    t_a: &TernaryTermOperation,
    t_s: &TernaryTermOperation,
    k: &Homomorphism,
    budget: Budget,
) -> Result<HkGroup> {
    let n = a.size();
    if t_a.base_size() != n || t_s.base_size() != s.size() {
        return Err(invalid("affine terms do not match the algebras"));
    }
    if k.domain_size() != n || k.codomain_size() != s.size() {
        return Err(invalid("k is not a map from A to S"));
    }
    let a2 = a.power(2, budget)?;
    let all = enumerate_homs(&a2, s, budget)?;
    let on_diagonal = |f: &Homomorphism, j: &Homomorphism| {
        (0..n as Elem).all(|x| f.apply(x * n as Elem + x) == j.apply(x))
    };
    let elements: Vec<Homomorphism> = all.iter().filter(|f| on_diagonal(f, k)).cloned().collect();
    let index: HashMap<Vec<Elem>, usize> = elements
        .iter()
        .enumerate()
        .map(|(i, f)| (f.map().to_vec(), i))
        .collect();
    let k_bar = bar(k, n);
    let neutral = *index
        .get(&k_bar)
        .ok_or_else(|| invariant("k̄ is not an element of 𝓗_k"))?;
    let m = elements.len();
    let lookup = |map: Vec<Elem>| {
        index
            .get(&map)
            .copied()
            .ok_or_else(|| invariant("𝓗_k is not closed under t"))
    };
    let mut add = Vec::with_capacity(m * m);
    for f in &elements {
        for g in &elements {
            add.push(lookup(pointwise(t_s, f.map(), &k_bar, g.map()))? as Elem);
        }
    }
    let neg = elements
        .iter()
        .map(|f| lookup(pointwise(t_s, &k_bar, f.map(), &k_bar)).map(|i| i as Elem))
        .collect::<Result<Vec<_>>>()?;
    let group = GroupStructure::from_tables(m, neutral as Elem, add, neg)?;
    let hk = HkGroup {
        a_size: n,
        k: k.clone(),
        elements,
        index,
        group,
    };
    check_restriction_embedding(&hk, t_a, t_s)?;
    for j in enumerate_homs(a, s, budget)? {
        let target: Vec<&Homomorphism> = all.iter().filter(|f| on_diagonal(f, &j)).collect();
        check_base_change(&hk, t_s, &j, &target)?;
    }
    Ok(hk)
}

fn check_restriction_embedding(
    hk: &HkGroup,
    t_a: &TernaryTermOperation,
    t_s: &TernaryTermOperation,
) -> Result<()> {
    let n = hk.a_size as Elem;
    let a: Elem = 0;
    let ka = hk.k.apply(a);
    let ga = GroupStructure::from_affine(t_a, a)?;
    let gs = GroupStructure::from_affine(t_s, ka)?;
    let restrict = |i: usize| -> Vec<Elem> { (0..n).map(|x| hk.eval(i, a, x)).collect() };
    let k_map: Vec<Elem> = (0..n).map(|x| hk.k.apply(x)).collect();
    let mut seen = HashMap::new();
    for i in 0..hk.len() {
        let fa = restrict(i);
        for x in 0..n {
            for y in 0..n {
                if fa[ga.add(x, y) as usize] != gs.add(fa[x as usize], fa[y as usize]) {
                    return Err(invariant(format!("f_a is not a group morphism for element {i}")));
                }
            }
        }
        if fa == k_map && i != hk.neutral() {
            return Err(invariant("kernel of f ↦ f_a is larger than {k̄}"));
        }
        if let Some(j) = seen.insert(fa.clone(), i) {
            return Err(invariant(format!("f ↦ f_a identifies elements {j} and {i}")));
        }
        for j in 0..hk.len() {
            let sum = restrict(hk.group.add(i as Elem, j as Elem) as usize);
            let gb = restrict(j);
            let expected: Vec<Elem> = (0..n as usize)
                .map(|x| t_s.apply(fa[x], k_map[x], gb[x]))
                .collect();
            if sum != expected {
                return Err(invariant("f ↦ f_a does not preserve addition"));
            }
        }
    }
    Ok(())
}

fn check_base_change(
    hk: &HkGroup,
    t_s: &TernaryTermOperation,
    j: &Homomorphism,
    target: &[&Homomorphism],
) -> Result<()> {
    let n = hk.a_size;
    let k_bar = bar(&hk.k, n);
    let j_bar = bar(j, n);
    let target_index: HashMap<&[Elem], usize> =
        target.iter().enumerate().map(|(i, f)| (f.map(), i)).collect();
    if target.len() != hk.len() {
        return Err(invariant("𝓗_k and 𝓗_j have different sizes"));
    }
    let phi: Vec<usize> = hk
        .elements
        .iter()
        .map(|f| {
            let img = pointwise(t_s, f.map(), &k_bar, &j_bar);
            let back = pointwise(t_s, &img, &j_bar, &k_bar);
            if back != f.map() {
                return Err(invariant("t(t(f,k̄,j̄),j̄,k̄) ≠ f"));
            }
            target_index
                .get(img.as_slice())
                .copied()
                .ok_or_else(|| invariant("t(f,k̄,j̄) is not in 𝓗_j"))
        })
        .collect::<Result<_>>()?;
    let mut hit = vec![false; target.len()];
    for &p in &phi {
        if std::mem::replace(&mut hit[p], true) {
            return Err(invariant("f ↦ t(f,k̄,j̄) is not injective"));
        }
    }
    if target_index.get(j_bar.as_slice()) != Some(&phi[hk.neutral()]) {
        return Err(invariant("k̄ is not sent to j̄"));
    }
    // additivity: Φ(f + g) = t(Φf, j̄, Φg)
    for f in 0..hk.len() {
        for g in 0..hk.len() {
            let lhs = phi[hk.group.add(f as Elem, g as Elem) as usize];
            let rhs = pointwise(t_s, target[phi[f]].map(), &j_bar, target[phi[g]].map());
            if target[lhs].map() != rhs.as_slice() {
                return Err(invariant("f ↦ t(f,k̄,j̄) does not preserve addition"));
            }
        }
    }
    Ok(())
}

/// Size of `𝓗(A², S)` against `Π p^{α β}` and its generating family against `max α β`.
pub fn hk_bound_check(a_size: u64, s_size: u64, hk: &HkGroup) -> Result<(DivisibilityCheck, usize, u32)> {
    let bound = hom_count_bound(a_size, s_size, CountMode::Group)?;
    let (sa, ss) = (prime_signature(a_size), prime_signature(s_size));
    let max_ab = primes_of(&sa, &ss)
        .into_iter()
        .map(|p| sa.exponent_of(p) * ss.exponent_of(p))
        .max()
        .unwrap_or(0);
    let family = generating_family(hk.group())?;
    Ok((
        DivisibilityCheck {
            claim: "|𝓗(A²,S)| divides Π p^{αβ}".into(),
            value: hk.len() as u128,
            bound,
        },
        family.len(),
        max_ab,
    ))
}

impl From<DivisibilityCheck> for Error {
    fn from(d: DivisibilityCheck) -> Self {
        invariant(format!("{}: {} does not divide {}", d.claim, d.value, d.bound))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::find_affine_term;
    use crate::catalog;

    fn term(a: &FiniteAlgebra) -> TernaryTermOperation {
        find_affine_term(a, Budget::default()).unwrap().unwrap()
    }

    #[test]
    fn signatures() {
        assert_eq!(prime_signature(4).factors, vec![(2, 2)]);
        assert_eq!(prime_signature(12).factors, vec![(2, 2), (3, 1)]);
        assert!(prime_signature(1).factors.is_empty());
        assert_eq!(prime_signature(97).factors, vec![(97, 1)]);
        for n in 1..200u64 {
            assert_eq!(prime_signature(n).value(), n as u128);
        }
    }

    #[test]
    fn divisibility_examples() {
        let b = Budget::default();
        let (z2, z3, z4) = (catalog::cyclic_group(2), catalog::cyclic_group(3), catalog::cyclic_group(4));
        let c = hom_divisibility_check(&z4, &z4, CountMode::Group, b).unwrap();
        assert_eq!((c.value, c.bound), (4, 16));
        let c = hom_divisibility_check(&z2, &z4, CountMode::Group, b).unwrap();
        assert_eq!((c.value, c.bound), (2, 4));
        let c = hom_divisibility_check(&z2, &z3, CountMode::Group, b).unwrap();
        assert_eq!((c.value, c.bound), (1, 1));
        // affine reducts: Hom(Z4aff, Z4aff) = 4 * 4 maps x -> ux + v
        let a4 = catalog::cyclic_affine(4);
        let c = hom_divisibility_check(&a4, &a4, CountMode::Abelian, b).unwrap();
        assert_eq!((c.value, c.bound), (16, 64));
        assert!(c.holds());
    }

    #[test]
    fn si_bounds() {
        assert_eq!(cardinal_si_bound(4).unwrap(), 16);
        assert_eq!(cardinal_si_bound(2).unwrap(), 2);
        assert_eq!(cardinal_si_bound(6).unwrap(), 6);
        assert_eq!(cardinal_si_bound(1).unwrap(), 1);
    }

    #[test]
    fn endomorphism_divisibility_examples() {
        let z4 = catalog::cyclic_group(4);
        let t = term(&z4);
        let c = endomorphism_divisibility_check(&z4, &t, &catalog::cyclic_group(2), Budget::default()).unwrap();
        assert_eq!((c.value, c.bound), (2, 4));
        let c = endomorphism_divisibility_check(&z4, &t, &z4, Budget::default()).unwrap();
        assert!(c.holds());
    }

    #[test]
    fn generating_families() {
        let t4 = term(&catalog::cyclic_group(4));
        let g = GroupStructure::from_affine(&t4, 0).unwrap();
        let fam = generating_family(&g).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam.orders, vec![4]);
        let h = fam.generators[0];
        assert_eq!(fam.decompose(g.add(h, h)).unwrap(), vec![2]);
        assert_eq!(fam.decompose(0).unwrap(), vec![0]);
        assert_eq!(fam.decompose(h).unwrap(), vec![1]);

        let kt = term(&catalog::klein_group());
        let fam = generating_family(&GroupStructure::from_affine(&kt, 0).unwrap()).unwrap();
        assert_eq!(fam.len(), 2);

        let trivial = GroupStructure::from_tables(1, 0, vec![0], vec![0]).unwrap();
        let fam = generating_family(&trivial).unwrap();
        assert!(fam.is_empty());
        assert_eq!(fam.expressions, vec![Vec::<i64>::new()]);
    }

    #[test]
    fn largest_order_in_the_quotient_keeps_the_bound() {
        // Z2 x Z4 (order 8 = 2^3): rank 2
        let z2 = catalog::cyclic_group(2);
        let z4 = catalog::cyclic_group(4);
        let p = z2.product(&z4, "Z2xZ4").unwrap();
        let g = GroupStructure::from_affine(&term(&p), 0).unwrap();
        let fam = generating_family(&g).unwrap();
        assert_eq!(fam.len(), 2);
        // Z2 x Z6 = Z2 x Z2 x Z3
        let z6 = catalog::cyclic_group(6);
        let p = z2.product(&z6, "Z2xZ6").unwrap();
        let b = Budget::default();
        let g = GroupStructure::from_tables(12, 0, p.table(0, b).unwrap(), p.table(1, b).unwrap()).unwrap();
        let fam = generating_family(&g).unwrap();
        assert_eq!(fam.len(), 2);
        for x in 0..12 {
            assert_eq!(fam.evaluate(&g, &fam.decompose(x).unwrap()), x);
        }
    }

    fn identity(n: usize) -> Homomorphism {
        Homomorphism::from_verified(n, n, (0..n as Elem).collect())
    }

    #[test]
    fn hk_examples() {
        let b = Budget::default();
        let z2 = catalog::cyclic_group(2);
        let t2 = term(&z2);
        let hk = build_hk_group(&z2, &z2, &t2, &t2, &identity(2), b).unwrap();
        // f(x,y) = ax + by with a + b = 1, codes x*2+y
        let maps: Vec<Vec<Elem>> = hk.elements().iter().map(|f| f.map().to_vec()).collect();
        assert_eq!(maps, vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]]);
        assert_eq!(hk.elements()[hk.neutral()].map(), &[0, 1, 0, 1]);

        let z4 = catalog::cyclic_group(4);
        let t4 = term(&z4);
        let hk = build_hk_group(&z4, &z4, &t4, &t4, &identity(4), b).unwrap();
        assert_eq!(hk.len(), 4);
        let oracle: Vec<Vec<Elem>> = {
            let mut v: Vec<Vec<Elem>> = (0..4)
                .map(|a| (0..16).map(|c| ((a * (c / 4) + (5 - a) * (c % 4)) % 4) as Elem).collect())
                .collect();
            v.sort();
            v
        };
        let maps: Vec<Vec<Elem>> = hk.elements().iter().map(|f| f.map().to_vec()).collect();
        assert_eq!(maps, oracle);
        let (d, fam, max_ab) = hk_bound_check(4, 4, &hk).unwrap();
        assert!(d.holds());
        assert!(fam as u32 <= max_ab);

        let z3 = catalog::cyclic_group(3);
        let zero = Homomorphism::new(&z2, &z3, vec![0, 0]).unwrap();
        let hk = build_hk_group(&z2, &z3, &t2, &term(&z3), &zero, b).unwrap();
        assert_eq!(hk.len(), 1);
    }

    #[test]
    fn hk_on_affine_reducts_with_several_base_maps() {
        // Z2aff has 4 endomorphisms, so the base change is checked against 4 groups
        let a = catalog::cyclic_affine(2);
        let t = term(&a);
        for k in enumerate_homs(&a, &a, Budget::default()).unwrap() {
            let hk = build_hk_group(&a, &a, &t, &t, &k, Budget::default()).unwrap();
            assert_eq!(hk.len(), 2);
        }
        let a = catalog::cyclic_affine(4);
        let t = term(&a);
        let k = Homomorphism::new(&a, &a, vec![1, 3, 1, 3]).unwrap();
        let hk = build_hk_group(&a, &a, &t, &t, &k, Budget::default()).unwrap();
        assert_eq!(hk.len(), 4);
    }
}
