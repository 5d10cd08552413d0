//! Seeded random instances.
//!
//! Every generator draws from `ChaCha8Rng::seed_from_u64(seed)`, so the same
//! seed produces the same polynomials on every platform.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::{clique_basis, Cpop, HermitianPoly, MonomialPair, Poly};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// `1 − Σ_{i ∈ vars} |z_i|²`.
pub fn ball(n: usize, vars: &[usize]) -> HermitianPoly {
    vars.iter()
        .fold(HermitianPoly::constant(n, 1.0), |acc, &i| {
            acc.sub(&HermitianPoly::norm_sq(n, i))
        })
}

/// A Hermitian polynomial with `2 * pairs` terms: `pairs` distinct
/// off-diagonal canonical monomials `z^β z̄^γ` with `|β|, |γ| ≤ half` over
/// `vars`, each with a coefficient uniform on `[−1, 1] + i[−1, 1]`, plus
/// their conjugates.
///
/// Panics if the window has fewer than `pairs` off-diagonal monomials.
pub fn random_hermitian(
    rng: &mut ChaCha8Rng,
    n: usize,
    vars: &[usize],
    half: u32,
    pairs: usize,
) -> HermitianPoly {
    let basis = clique_basis(vars, n, half);
    let available = basis.len() * (basis.len() - 1) / 2;
    assert!(
        pairs <= available,
        "only {available} off-diagonal pairs available"
    );
    let mut chosen = BTreeSet::new();
    let mut p = Poly::zero(n);
    while chosen.len() < pairs {
        let a = rng.gen_range(0..basis.len());
        let b = rng.gen_range(0..basis.len());
        if a == b {
            continue;
        }
        let (m, _) = MonomialPair::new(basis[a].clone(), basis[b].clone()).canonical();
        if !chosen.insert(m.clone()) {
            continue;
        }
        let c = uniform_complex(rng);
        p.add_term(m.conjugate(), c.conj());
        p.add_term(m, c);
    }
    HermitianPoly::new(p).expect("conjugate pairs are Hermitian")
}

/// The multi-ball instance family: `n = 5(l + 1)` variables, objective
/// `Σ_j f_j` where `f_j` has 40 terms of degree ≤ 4 on the window
/// `z_{5j}, …, z_{5j+9}`, and one ball constraint per window.
pub fn random_cpop(l: usize, seed: u64) -> Cpop {
    assert!(l >= 1, "need at least one block");
    let n = 5 * (l + 1);
    let mut rng = rng(seed);
    let mut f = HermitianPoly::zero(n);
    let mut g = Vec::with_capacity(l);
    for j in 0..l {
        let window: Vec<usize> = (5 * j..5 * j + 10).collect();
        f = f.add(&random_hermitian(&mut rng, n, &window, 2, 20));
        g.push(ball(n, &window));
    }
    Cpop::new(n, f, g, vec![]).expect("well-formed instance")
}

/// A dense quartic instance on `n` variables with one ball constraint.
pub fn random_quartic(n: usize, pairs: usize, seed: u64) -> Cpop {
    let mut rng = rng(seed);
    let vars: Vec<usize> = (0..n).collect();
    let f = random_hermitian(&mut rng, n, &vars, 2, pairs);
    Cpop::new(n, f, vec![ball(n, &vars)], vec![]).expect("well-formed instance")
}

/// A complex QCQP on `n ≥ 2` variables: a sparse quadratic objective,
/// overlapping two- and three-variable balls covering every variable, and
/// one random quadratic constraint that holds at the origin.
pub fn random_qcqp(n: usize, seed: u64) -> Cpop {
    assert!(n >= 2);
    let mut rng = rng(seed);
    let mut f = HermitianPoly::zero(n);
    for i in 0..n - 1 {
        f = f.add(&random_hermitian(&mut rng, n, &[i, i + 1], 1, 2));
    }
    let mut g = Vec::new();
    let mut start = 0;
    while start + 1 < n {
        let width = rng.gen_range(2..=3).min(n - start);
        let vars: Vec<usize> = (start..start + width).collect();
        g.push(ball(n, &vars));
        start += width - 1;
    }
    let a = rng.gen_range(0..n);
    let b = (a + 1 + rng.gen_range(0..n - 1)) % n;
    let mut lo = [a, b];
    lo.sort_unstable();
    let q = random_hermitian(&mut rng, n, &lo, 1, 2).scale(0.3);
    g.push(HermitianPoly::constant(n, 0.5).sub(&q));
    Cpop::new(n, f, g, vec![]).expect("well-formed instance")
}
