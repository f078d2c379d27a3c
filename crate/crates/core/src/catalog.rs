//! A handful of small algebras used throughout tests, examples and the CLI.

use crate::algebra::{Elem, FiniteAlgebra};

/// `Z_n` as a group with signature `{add/2, neg/1, zero/0}`.
pub fn cyclic_group(n: usize) -> FiniteAlgebra {
    assert!(n >= 1);
    let add = (0..n * n).map(|i| ((i / n + i % n) % n) as Elem).collect();
    let neg = (0..n).map(|x| ((n - x) % n) as Elem).collect();
    FiniteAlgebra::new(
        format!("Z{n}"),
        n,
        vec![
            ("add".into(), 2, add),
            ("neg".into(), 1, neg),
            ("zero".into(), 0, vec![0]),
        ],
    )
    .expect("cyclic group tables are valid")
}

/// The affine reduct `⟨Z_n; x - y + z⟩`.
pub fn cyclic_affine(n: usize) -> FiniteAlgebra {
    assert!(n >= 1);
    let t = (0..n * n * n)
        .map(|i| {
            let (x, y, z) = (i / (n * n), (i / n) % n, i % n);
            ((x + n - y + z) % n) as Elem
        })
        .collect();
    FiniteAlgebra::new(format!("Z{n}aff"), n, vec![("t".into(), 3, t)])
        .expect("affine table is valid")
}

/// `Z_2 × Z_2` with the group signature; `(a, b)` is encoded as `2a + b`.
pub fn klein_group() -> FiniteAlgebra {
    let z2 = cyclic_group(2);
    z2.product(&z2, "Z2xZ2").expect("same signature")
}

/// The two-element meet semilattice `⟨{0,1}; ∧⟩`.
pub fn semilattice2() -> FiniteAlgebra {
    FiniteAlgebra::new("SL2", 2, vec![("meet".into(), 2, vec![0, 0, 0, 1])])
        .expect("valid table")
}

/// The symmetric group on three letters with signature `{mul/2, inv/1, one/0}`.
///
/// Elements are the permutations of `{0,1,2}` in lexicographic order of their
/// images; `mul(p, q)` is `p ∘ q` (apply `q` first).
pub fn symmetric_group_s3() -> FiniteAlgebra {
    let perms: Vec<[usize; 3]> = vec![
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap() as Elem;
    let mut mul = Vec::with_capacity(36);
    for p in &perms {
        for q in &perms {
            mul.push(index([p[q[0]], p[q[1]], p[q[2]]]));
        }
    }
    let inv = perms
        .iter()
        .map(|p| {
            let mut r = [0; 3];
            for (i, &v) in p.iter().enumerate() {
                r[v] = i;
            }
            index(r)
        })
        .collect();
    FiniteAlgebra::new(
        "S3",
        6,
        vec![
            ("mul".into(), 2, mul),
            ("inv".into(), 1, inv),
            ("one".into(), 0, vec![0]),
        ],
    )
    .expect("valid tables")
}

/// Looks up a catalog algebra by name (`Z<n>`, `Z<n>aff`, `Z2xZ2`, `SL2`, `S3`).
pub fn by_name(name: &str) -> Option<FiniteAlgebra> {
    match name {
        "Z2xZ2" => Some(klein_group()),
        "SL2" => Some(semilattice2()),
        "S3" => Some(symmetric_group_s3()),
        _ => {
            let rest = name.strip_prefix('Z')?;
            if let Some(n) = rest.strip_suffix("aff") {
                n.parse().ok().filter(|&n| n >= 1).map(cyclic_affine)
            } else {
                rest.parse().ok().filter(|&n| n >= 1).map(cyclic_group)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_is_a_group() {
        let s3 = symmetric_group_s3();
        let (mul, inv) = (0, 1);
        for a in 0..6 {
            assert_eq!(s3.apply(mul, &[a, 0]), a);
            assert_eq!(s3.apply(mul, &[a, s3.apply(inv, &[a])]), 0);
            for b in 0..6 {
                for c in 0..6 {
                    let ab = s3.apply(mul, &[a, b]);
                    let bc = s3.apply(mul, &[b, c]);
                    assert_eq!(s3.apply(mul, &[ab, c]), s3.apply(mul, &[a, bc]));
                }
            }
        }
        // non-commutative
        assert_ne!(s3.apply(mul, &[1, 2]), s3.apply(mul, &[2, 1]));
    }

    #[test]
    fn lookup() {
        assert_eq!(by_name("Z4").unwrap().size(), 4);
        assert_eq!(by_name("Z4aff").unwrap().ops().len(), 1);
        assert!(by_name("Q8").is_none());
        assert!(by_name("Z0").is_none());
    }
}
