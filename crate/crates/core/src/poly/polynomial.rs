use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Exponent, MonomialPair};
use crate::error::{Error, Result};

/// Coefficients with modulus below this are dropped.
pub const COEFF_EPS: f64 = 1e-14;

/// A general polynomial in `ℂ[z, z̄]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<MonomialPair, Complex64>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        let mut p = Poly::zero(n);
        p.add_term(MonomialPair::constant(n), c);
        p
    }

    /// The monomial `z_i`.
    pub fn var(n: usize, i: usize) -> Self {
        Poly::monomial(
            MonomialPair::new(Exponent::unit(n, i), Exponent::zero(n)),
            1.0.into(),
        )
    }

    /// The monomial `z̄_i`.
    pub fn conj_var(n: usize, i: usize) -> Self {
        Poly::monomial(
            MonomialPair::new(Exponent::zero(n), Exponent::unit(n, i)),
            1.0.into(),
        )
    }

    pub fn monomial(pair: MonomialPair, c: Complex64) -> Self {
        let mut p = Poly::zero(pair.beta.len());
        p.add_term(pair, c);
        p
    }

    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (MonomialPair, Complex64)>,
    ) -> Result<Self> {
        let mut p = Poly::zero(n);
        for (pair, c) in terms {
            if pair.beta.len() != n || pair.gamma.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: pair.beta.len().max(pair.gamma.len()),
                });
            }
            p.add_term(pair, c);
        }
        Ok(p)
    }

    /// Accumulates `c · z^β z̄^γ`, dropping the term if it cancels.
    pub fn add_term(&mut self, pair: MonomialPair, c: Complex64) {
        debug_assert_eq!(pair.beta.len(), self.n);
        let entry = self.terms.entry(pair);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = *o.get() + c;
                if v.norm() < COEFF_EPS {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                if c.norm() >= COEFF_EPS {
                    v.insert(c);
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialPair, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, pair: &MonomialPair) -> Complex64 {
        self.terms.get(pair).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &MonomialPair> {
        self.terms.keys()
    }

    /// Total degree `max |β| + |γ|`; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(MonomialPair::degree)
            .max()
            .unwrap_or(0)
    }

    /// Smallest order `d` with every term `(β, γ)` satisfying `|β|, |γ| ≤ d`.
    pub fn half_degree(&self) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self
            .terms
            .keys()
            .map(|p| p.half_degree().max(p.degree().div_ceil(2)))
            .max()
            .unwrap_or(0))
    }

    /// Sorted union of `supp(β) ∪ supp(γ)` over all terms.
    pub fn variables(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().flat_map(|p| p.variables()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// `Σ c̄ z^γ z̄^β`.
    pub fn conjugate(&self) -> Poly {
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(p, c)| (p.conjugate(), c.conj()))
                .collect(),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms
            .iter()
            .all(|(p, c)| self.terms.get(&p.conjugate()) == Some(&c.conj()))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.n, other.n, "variable count mismatch");
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale((-1.0).into()))
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        let mut out = Poly::zero(self.n);
        for (p, c) in &self.terms {
            out.add_term(p.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.n, other.n, "variable count mismatch");
        let mut out = Poly::zero(self.n);
        for (p, c) in &self.terms {
            for (q, d) in &other.terms {
                out.add_term(p.shift(q), c * d);
            }
        }
        out
    }

    /// `Σ c z^β z̄^γ` at `z`.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        let pow = |e: &Exponent, conj: bool| {
            e.entries().iter().zip(z).filter(|(k, _)| **k > 0).fold(
                Complex64::new(1.0, 0.0),
                |acc, (&k, &v)| {
                    let v = if conj { v.conj() } else { v };
                    acc * v.powu(u32::from(k))
                },
            )
        };
        Ok(self
            .terms
            .iter()
            .map(|(p, c)| c * pow(&p.beta, false) * pow(&p.gamma, true))
            .sum())
    }

    /// `(p + p̄) / 2`, always Hermitian.
    pub fn real_part(&self) -> HermitianPoly {
        HermitianPoly::hermitize(&self.add(&self.conjugate()).scale(0.5.into()))
    }

    /// `(p − p̄) / 2i`, always Hermitian.
    pub fn imag_part(&self) -> HermitianPoly {
        HermitianPoly::hermitize(&self.sub(&self.conjugate()).scale(Complex64::new(0.0, -0.5)))
    }
}

/// A polynomial with `c_{β,γ} = conj(c_{γ,β})`, hence real valued on `ℂⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianPoly(Poly);

impl HermitianPoly {
    /// Validates Hermitian closure exactly.
    pub fn new(p: Poly) -> Result<Self> {
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(format!(
                "{} terms without a matching conjugate",
                p.terms()
                    .filter(|(m, c)| p.coefficient(&m.conjugate()) != c.conj())
                    .count()
            )));
        }
        Ok(HermitianPoly(p))
    }

    /// Projects onto the Hermitian polynomials: `(p + p̄) / 2`, with the
    /// canonical orientation deciding each mirrored coefficient exactly.
    pub fn hermitize(p: &Poly) -> Self {
        let mut acc: BTreeMap<MonomialPair, Complex64> = BTreeMap::new();
        for (m, c) in p.terms() {
            let (canon, swapped) = m.canonical();
            let c = if swapped { c.conj() } else { *c };
            *acc.entry(canon).or_default() += c * 0.5;
        }
        let mut out = Poly::zero(p.nvars());
        for (m, c) in acc {
            if m.is_diagonal() {
                out.add_term(m, Complex64::new(2.0 * c.re, 0.0));
            } else {
                out.add_term(m.conjugate(), c.conj());
                out.add_term(m, c);
            }
        }
        HermitianPoly(out)
    }

    pub fn zero(n: usize) -> Self {
        HermitianPoly(Poly::zero(n))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        HermitianPoly(Poly::constant(n, c.into()))
    }

    /// `|z_i|² = z_i z̄_i`.
    pub fn norm_sq(n: usize, i: usize) -> Self {
        HermitianPoly(Poly::monomial(
            MonomialPair::new(Exponent::unit(n, i), Exponent::unit(n, i)),
            1.0.into(),
        ))
    }

    pub fn as_poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.nvars()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialPair, &Complex64)> {
        self.0.terms()
    }

    /// Terms with `β ≤ γ` only; the mirrored half is implied.
    pub fn canonical_terms(&self) -> impl Iterator<Item = (&MonomialPair, &Complex64)> {
        self.0.terms().filter(|(m, _)| m.is_canonical())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn degree(&self) -> u32 {
        self.0.degree()
    }

    pub fn half_degree(&self) -> Result<u32> {
        self.0.half_degree()
    }

    pub fn variables(&self) -> Vec<usize> {
        self.0.variables()
    }

    pub fn add(&self, other: &HermitianPoly) -> HermitianPoly {
        HermitianPoly::hermitize(&self.0.add(&other.0))
    }

    pub fn sub(&self, other: &HermitianPoly) -> HermitianPoly {
        HermitianPoly::hermitize(&self.0.sub(&other.0))
    }

    pub fn scale(&self, s: f64) -> HermitianPoly {
        HermitianPoly::hermitize(&self.0.scale(s.into()))
    }

    pub fn mul(&self, other: &HermitianPoly) -> HermitianPoly {
        HermitianPoly::hermitize(&self.0.mul(&other.0))
    }

    /// The constant coefficient.
    pub fn constant_term(&self) -> f64 {
        self.0.coefficient(&MonomialPair::constant(self.nvars())).re
    }

    /// Real value at `z` (the imaginary part vanishes up to rounding).
    pub fn evaluate(&self, z: &[Complex64]) -> Result<f64> {
        Ok(self.0.evaluate(z)?.re)
    }

    /// The terms accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(&MonomialPair) -> bool) -> HermitianPoly {
        let mut out = Poly::zero(self.nvars());
        for (m, c) in self.0.terms() {
            if keep(m) {
                out.add_term(m.clone(), *c);
            }
        }
        HermitianPoly(out)
    }
}

impl TryFrom<Poly> for HermitianPoly {
    type Error = Error;

    fn try_from(p: Poly) -> Result<Self> {
        HermitianPoly::new(p)
    }
}
