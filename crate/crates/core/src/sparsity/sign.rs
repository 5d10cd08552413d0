use std::collections::BTreeMap;

use crate::poly::{Exponent, MonomialPair};

/// A basis of the sign symmetries `R ⊆ ℤ₂ⁿ` of a support set: all `r` with
/// `rᵀ(β+γ) ≡ 0 (mod 2)` for every `(β, γ)` in the set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSymmetry {
    n: usize,
    basis: Vec<Vec<bool>>,
}

impl SignSymmetry {
    pub fn nvars(&self) -> usize {
        self.n
    }

    /// Basis vectors of `R` over GF(2).
    pub fn basis(&self) -> &[Vec<bool>] {
        &self.basis
    }

    /// `Rᵀβ mod 2`.
    pub fn signature(&self, beta: &Exponent) -> Vec<bool> {
        let parity = beta.parity();
        self.basis
            .iter()
            .map(|r| r.iter().zip(&parity).filter(|(a, b)| **a && **b).count() % 2 == 1)
            .collect()
    }

    /// True iff `Rᵀ(β+γ) ≡ 0 (mod 2)`.
    pub fn admits(&self, beta: &Exponent, gamma: &Exponent) -> bool {
        self.signature(beta) == self.signature(gamma)
    }
}

/// Null space over GF(2) of the matrix with rows `(β+γ) mod 2`.
pub fn sign_symmetries<'a>(
    n: usize,
    support: impl IntoIterator<Item = &'a MonomialPair>,
) -> SignSymmetry {
    let mut rows: Vec<Vec<bool>> = support
        .into_iter()
        .map(MonomialPair::parity)
        .filter(|r| r.iter().any(|&b| b))
        .collect();
    rows.sort();
    rows.dedup();

    // reduced row echelon form
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= *y;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }

    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![false; n];
        v[free] = true;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = rows[r][free];
        }
        basis.push(v);
    }
    SignSymmetry { n, basis }
}

/// Groups `basis` by `Rᵀβ mod 2`; blocks keep basis order and are listed by
/// their first member.
pub fn sign_symmetry_partition(r: &SignSymmetry, basis: &[Exponent]) -> Vec<Vec<Exponent>> {
    let mut groups: BTreeMap<Vec<bool>, (usize, Vec<Exponent>)> = BTreeMap::new();
    for (i, b) in basis.iter().enumerate() {
        groups
            .entry(r.signature(b))
            .or_insert_with(|| (i, Vec::new()))
            .1
            .push(b.clone());
    }
    let mut blocks: Vec<(usize, Vec<Exponent>)> = groups.into_values().collect();
    blocks.sort_by_key(|(first, _)| *first);
    blocks.into_iter().map(|(_, b)| b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::monomial_basis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(v: &[u8]) -> Exponent {
        Exponent::from_vec(v.to_vec())
    }

    fn pair(b: &[u8], g: &[u8]) -> MonomialPair {
        MonomialPair::new(e(b), e(g))
    }

    #[test]
    fn toy_symmetries() {
        let supp = [
            pair(&[1, 0], &[0, 0]),
            pair(&[0, 0], &[1, 0]),
            pair(&[0, 0], &[0, 0]),
            pair(&[1, 0], &[1, 0]),
            pair(&[0, 1], &[0, 1]),
        ];
        let r = sign_symmetries(2, &supp);
        assert_eq!(r.basis(), &[vec![false, true]]);
        let parts = sign_symmetry_partition(&r, &monomial_basis(2, 2));
        assert_eq!(parts.len(), 2);
        let sets: Vec<Vec<Exponent>> = parts;
        assert_eq!(
            sets[0],
            vec![e(&[0, 0]), e(&[0, 2]), e(&[1, 0]), e(&[2, 0])]
        );
        assert_eq!(sets[1], vec![e(&[0, 1]), e(&[1, 1])]);
    }

    #[test]
    fn all_linear_terms_kill_symmetry() {
        let n = 3;
        let supp: Vec<MonomialPair> = (0..n)
            .map(|i| MonomialPair::new(Exponent::unit(n, i), Exponent::zero(n)))
            .collect();
        let r = sign_symmetries(n, &supp);
        assert!(r.basis().is_empty());
        let parts = sign_symmetry_partition(&r, &monomial_basis(n, 2));
        assert_eq!(parts.len(), 1);
    }

    #[test]
    fn full_group_at_degree_one() {
        let n = 3;
        let r = sign_symmetries(n, &[]);
        assert_eq!(r.basis().len(), n);
        let parts = sign_symmetry_partition(&r, &monomial_basis(n, 1));
        // every exponent of degree ≤ 1 has a distinct parity pattern
        assert_eq!(parts.len(), n + 1);
        assert!(parts.iter().all(|p| p.len() == 1));
        // at degree 2, squares join the constant
        let parts2 = sign_symmetry_partition(&r, &monomial_basis(n, 2));
        assert_eq!(parts2[0].len(), 1 + n);
    }

    #[test]
    fn random_supports_satisfy_defining_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6);
            let supp: Vec<MonomialPair> = (0..rng.gen_range(0..8))
                .map(|_| {
                    let b: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
                    let g: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
                    MonomialPair::new(Exponent::from_vec(b), Exponent::from_vec(g))
                })
                .collect();
            let r = sign_symmetries(n, &supp);
            for v in r.basis() {
                for m in &supp {
                    let dot = v.iter().zip(m.parity()).filter(|(a, b)| **a && *b).count();
                    assert_eq!(dot % 2, 0);
                }
            }
            // dimension check against brute force
            let count = (0u32..(1 << n))
                .filter(|mask| {
                    supp.iter().all(|m| {
                        m.parity()
                            .iter()
                            .enumerate()
                            .filter(|(i, &b)| b && mask & (1 << i) != 0)
                            .count()
                            % 2
                            == 0
                    })
                })
                .count();
            assert_eq!(count, 1 << r.basis().len());
        }
    }
}
