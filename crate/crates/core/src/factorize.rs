//! Factoring a morphism `f: A^n -> S` as `g ∘ (p_1, .., p_{N+1})` with
//! `g: A^{N+1} -> S` and affine terms `p_j`, where `N` is the size of a
//! generating family of `𝓗(A², S)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affine::{AffineTerm, GroupStructure, TernaryTermOperation};
use crate::algebra::{decode, encode, for_each_tuple, Elem, FiniteAlgebra};
use crate::budget::{checked_pow, Budget};
use crate::error::{invalid, invariant, Result};
use crate::hom::Homomorphism;
use crate::homgroups::{GeneratingFamily, HkGroup};

/// Number of random points checked when `A^n` is too large to scan.
pub const SAMPLE_COUNT: usize = 10_000;

/// Largest `|A|^n` for which the `h_j ∘ p_j` identity is checked on every input.
pub const HJPJ_CHECK_LIMIT: u128 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    Exhaustive { inputs: u64 },
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: usize,
    pub f: Homomorphism,
    pub g: Homomorphism,
    /// `p_1..p_{N+1}`, each of arity `n`; the last is the first projection.
    pub terms: Vec<AffineTerm>,
    /// `coefficient_matrix[j][i]` is `u_j^i`.
    pub coefficient_matrix: Vec<Vec<i64>>,
    pub verification: Verification,
}

impl Factorization {
    /// Number of generators `N` (so `g` has arity `N + 1`).
    pub fn generator_count(&self) -> usize {
        self.terms.len() - 1
    }

    /// `p(x⃗)` encoded as an element of `A^{N+1}`.
    pub fn apply_terms(&self, group: &GroupStructure, x: &[Elem]) -> Elem {
        let ys: Vec<Elem> = self
            .terms
            .iter()
            .map(|p| group.linear_combination(p.coeffs(), x))
            .collect();
        encode(group.base_size(), &ys)
    }
}

/// Coefficients of `Σ_i (u^i x_i − u^i x_1) + x_1` for one row `u` of the matrix.
fn term_from_row(row: &[i64]) -> Result<AffineTerm> {
    let total: i64 = row.iter().sum();
    let mut coeffs = row.to_vec();
    coeffs[0] += 1 - total;
    AffineTerm::new(coeffs)
}

/// Coefficients of `x` over the family, for an element of `𝓗_k(A², S)`.
pub fn decompose_in_group(hk: &HkGroup, gens: &GeneratingFamily, element: &Homomorphism) -> Result<Vec<i64>> {
    let i = hk
        .index_of(element.map())
        .ok_or_else(|| invalid("map is not an element of 𝓗_k(A², S)"))?;
    gens.decompose(i as Elem)
}

/// Builds and verifies the factorization of `f: A^n -> S`.
///
/// `hk` must be built with `k(x) = f(x, .., x)`; `gens` generates it.
#[allow(clippy::too_many_arguments)]
pub fn factor_morphism(
    a: &FiniteAlgebra,
    s: &FiniteAlgebra,
    t_a: &TernaryTermOperation,
    t_s: &TernaryTermOperation,
    f: &Homomorphism,
    n: usize,
    hk: &HkGroup,
    gens: &GeneratingFamily,
    seed: u64,
    budget: Budget,
) -> Result<Factorization> {
    let q = a.size();
    if n == 0 {
        return Err(invalid("f needs at least one argument"));
    }
    let domain = checked_pow(q as u128, n as u128);
    if f.domain_size() as u128 != domain || f.codomain_size() != s.size() {
        return Err(invalid(format!(
            "f is not a map A^{n} -> S ({} -> {} elements)",
            f.domain_size(),
            f.codomain_size()
        )));
    }
    let ga = GroupStructure::from_affine(t_a, 0)?;
    let gs = GroupStructure::from_affine(t_s, 0)?;
    let diag = |x: Elem| encode(q, &vec![x; n]);
    let k: Vec<Elem> = (0..q as Elem).map(|x| f.apply(diag(x))).collect();
    if hk.k().map() != k.as_slice() {
        return Err(invalid("𝓗_k was built for a different k than the diagonal of f"));
    }
    let big_n = gens.len();
    let hj = |j: usize, x: Elem, y: Elem| hk.eval(gens.generators[j] as usize, x, y);

    // f_i(x, y) = f(y, .., x at i, .., y) and its coordinates over the family
    let mut columns = Vec::with_capacity(n);
    let mut args = vec![0; n];
    for i in 0..n {
        let map: Vec<Elem> = (0..(q * q) as Elem)
            .map(|c| {
                let (x, y) = (c / q as Elem, c % q as Elem);
                args.iter_mut().for_each(|v| *v = y);
                args[i] = x;
                f.apply(encode(q, &args))
            })
            .collect();
        let idx = hk
            .index_of(&map)
            .ok_or_else(|| invariant(format!("f_{} is not in 𝓗_k; f is not a morphism", i + 1)))?;
        columns.push(gens.decompose(idx as Elem)?);
    }
    let coefficient_matrix: Vec<Vec<i64>> = (0..big_n)
        .map(|j| columns.iter().map(|col| col[j]).collect())
        .collect();
    let mut terms = coefficient_matrix
        .iter()
        .map(|row| term_from_row(row))
        .collect::<Result<Vec<_>>>()?;
    terms.push(AffineTerm::projection(n, 0));

    // g(y_1..y_N, z) = Σ_j (h_j(y_j, z) − h_j(z, z)) + k(z)
    let power = a.power(big_n + 1, budget)?;
    let mut g_map = Vec::with_capacity(power.size());
    let mut coeffs = vec![1i64; big_n];
    coeffs.extend(std::iter::repeat(-1).take(big_n));
    coeffs.push(1);
    let mut vals = vec![0; 2 * big_n + 1];
    for code in 0..power.size() as Elem {
        let ys = decode(q, big_n + 1, code);
        let z = ys[big_n];
        for j in 0..big_n {
            vals[j] = hj(j, ys[j], z);
            vals[big_n + j] = hj(j, z, z);
        }
        vals[2 * big_n] = k[z as usize];
        g_map.push(gs.linear_combination(&coeffs, &vals));
    }
    let g = Homomorphism::new(&power, s, g_map)
        .map_err(|e| invariant(format!("g is not a morphism: {e}")))?;

    let fact = Factorization {
        n,
        f: f.clone(),
        g,
        terms,
        coefficient_matrix,
        verification: Verification::Exhaustive { inputs: 0 },
    };

    let check_hjpj = domain <= HJPJ_CHECK_LIMIT;
    let check = |x: &[Elem]| -> Result<()> {
        let fx = f.apply(encode(q, x));
        // telescoping: f(x⃗) = Σ_i (f_i(x_i, x_1) − f_i(x_1, x_1)) + k(x_1)
        let mut acc = k[x[0] as usize];
        for (i, &xi) in x.iter().enumerate() {
            let fi = |u: Elem, v: Elem| {
                let mut w = vec![v; n];
                w[i] = u;
                f.apply(encode(q, &w))
            };
            acc = gs.add(acc, gs.sub(fi(xi, x[0]), fi(x[0], x[0])));
        }
        if acc != fx {
            return Err(invariant(format!("telescoping identity fails at {x:?}")));
        }
        if fact.g.apply(fact.apply_terms(&ga, x)) != fx {
            return Err(invariant(format!("f ≠ g∘p at {x:?}")));
        }
        if check_hjpj {
            for (j, row) in fact.coefficient_matrix.iter().enumerate() {
                let pj = ga.linear_combination(fact.terms[j].coeffs(), x);
                for z in 0..q as Elem {
                    let lhs = gs.sub(hj(j, pj, z), hj(j, x[0], z));
                    let rhs = row.iter().zip(x).fold(gs.neutral(), |s, (&u, &xi)| {
                        gs.add(s, gs.scale(u, gs.sub(hj(j, xi, z), hj(j, x[0], z))))
                    });
                    if lhs != rhs {
                        return Err(invariant(format!("h_j∘p_j identity fails at {x:?}, z = {z}")));
                    }
                }
            }
        }
        Ok(())
    };

    let verification = if domain <= budget.limit() as u128 {
        let mut result = Ok(());
        for_each_tuple(q, n, |x| {
            result = check(x);
            result.is_ok()
        });
        result?;
        Verification::Exhaustive {
            inputs: domain as u64,
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0; n];
        for _ in 0..SAMPLE_COUNT {
            x.iter_mut().for_each(|v| *v = rng.gen_range(0..q as Elem));
            check(&x)?;
        }
        Verification::Sampled {
            samples: SAMPLE_COUNT as u64,
            seed,
        }
    };
    Ok(Factorization {
        verification,
        ..fact
    })
}
