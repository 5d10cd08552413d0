//! Exponents, monomial bases and polynomials in `(z, z̄)`.
//!
//! A term `c · z^β z̄^γ` is keyed by the [`MonomialPair`] `(β, γ)`. Hermitian
//! polynomials satisfy `c_{β,γ} = conj(c_{γ,β})` and are real valued on `ℂⁿ`.

mod cpop;
mod polynomial;

pub use cpop::{Cpop, CpopFile, TermJson};
pub use polynomial::{HermitianPoly, Poly, COEFF_EPS};

use std::fmt;

/// A multi-index `β ∈ ℕⁿ`. Ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent(Vec<u8>);

impl Exponent {
    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    /// The exponent of the single variable `z_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Exponent(e)
    }

    pub fn from_vec(entries: Vec<u8>) -> Self {
        Exponent(entries)
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    /// Number of variables `n`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `|β|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Indices `i` with `β_i ≠ 0`.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, _)| i)
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.len(), other.len());
        Exponent(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    /// Zero-pads a clique-local exponent (indexed by `vars`) into `ℕⁿ`.
    pub fn embed(&self, vars: &[usize], n: usize) -> Exponent {
        debug_assert_eq!(self.len(), vars.len());
        let mut e = vec![0; n];
        for (local, &global) in vars.iter().enumerate() {
            e[global] = self.0[local];
        }
        Exponent(e)
    }

    /// Parity vector `β mod 2`.
    pub fn parity(&self) -> Vec<bool> {
        self.0.iter().map(|e| e % 2 == 1).collect()
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "z{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// The monomial `z^β z̄^γ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MonomialPair {
    pub beta: Exponent,
    pub gamma: Exponent,
}

impl MonomialPair {
    pub fn new(beta: Exponent, gamma: Exponent) -> Self {
        debug_assert_eq!(beta.len(), gamma.len());
        MonomialPair { beta, gamma }
    }

    pub fn constant(n: usize) -> Self {
        MonomialPair::new(Exponent::zero(n), Exponent::zero(n))
    }

    /// `(β, γ) ↦ (γ, β)`.
    pub fn conjugate(&self) -> Self {
        MonomialPair {
            beta: self.gamma.clone(),
            gamma: self.beta.clone(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.beta == self.gamma
    }

    /// True when `β ≤ γ`, i.e. this orientation is the stored one.
    pub fn is_canonical(&self) -> bool {
        self.beta <= self.gamma
    }

    /// The lexicographically smaller of `(β, γ)` and `(γ, β)`, together with
    /// a flag telling whether a swap happened.
    pub fn canonical(&self) -> (MonomialPair, bool) {
        if self.is_canonical() {
            (self.clone(), false)
        } else {
            (self.conjugate(), true)
        }
    }

    pub fn shift(&self, other: &MonomialPair) -> MonomialPair {
        MonomialPair {
            beta: self.beta.add(&other.beta),
            gamma: self.gamma.add(&other.gamma),
        }
    }

    /// `|β| + |γ|`.
    pub fn degree(&self) -> u32 {
        self.beta.degree() + self.gamma.degree()
    }

    /// `max(|β|, |γ|)`, the smallest moment-matrix order containing this pair.
    pub fn half_degree(&self) -> u32 {
        self.beta.degree().max(self.gamma.degree())
    }

    /// `supp(β) ∪ supp(γ)`, sorted.
    pub fn variables(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.beta.support().chain(self.gamma.support()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Parity of `β + γ`.
    pub fn parity(&self) -> Vec<bool> {
        self.beta
            .entries()
            .iter()
            .zip(self.gamma.entries())
            .map(|(a, b)| (a + b) % 2 == 1)
            .collect()
    }
}

/// All exponents of `ℕⁿ_d` in lexicographic order.
pub fn monomial_basis(n: usize, d: u32) -> Vec<Exponent> {
    fn fill(prefix: &mut Vec<u8>, n: usize, left: u32, out: &mut Vec<Exponent>) {
        if prefix.len() == n {
            out.push(Exponent(prefix.clone()));
            return;
        }
        for e in 0..=left {
            prefix.push(e as u8);
            fill(prefix, n, left - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(n), n, d, &mut out);
    out
}

/// `ℕ^{|vars|}_d` embedded into `ℕⁿ`, in lexicographic order of the ambient space.
pub fn clique_basis(vars: &[usize], n: usize, d: u32) -> Vec<Exponent> {
    let mut basis: Vec<Exponent> = monomial_basis(vars.len(), d)
        .iter()
        .map(|e| e.embed(vars, n))
        .collect();
    basis.sort();
    basis
}

/// `C(n + d, d)`.
pub fn basis_size(n: usize, d: u32) -> usize {
    let d = d as usize;
    let mut r: usize = 1;
    for i in 1..=d {
        r = r * (n + i) / i;
    }
    r
}
