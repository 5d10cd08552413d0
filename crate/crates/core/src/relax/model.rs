use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poly::{Exponent, HermitianPoly, MonomialPair, Poly};

/// The canonical orientation `(β, γ)`, `β ≤lex γ`, of a moment `y_{β,γ}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MomentKey(MonomialPair);

impl MomentKey {
    /// Canonical key of `y_{β,γ}` and whether the requested orientation is
    /// the conjugate of the stored one.
    pub fn of(pair: &MonomialPair) -> (MomentKey, bool) {
        let (c, swapped) = pair.canonical();
        (MomentKey(c), swapped)
    }

    pub fn pair(&self) -> &MonomialPair {
        &self.0
    }

    pub fn is_real(&self) -> bool {
        self.0.is_diagonal()
    }
}

/// What a real decision variable stands for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VarInfo {
    /// Real or imaginary part of a moment.
    Moment {
        beta: Vec<u8>,
        gamma: Vec<u8>,
        imag: bool,
    },
    /// A modelling variable that is not a moment.
    Aux { label: String },
}

/// Real affine function `c + Σ a_i x_i`, terms sorted by variable.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinExpr {
    pub constant: f64,
    pub terms: Vec<(usize, f64)>,
}

impl LinExpr {
    pub fn constant(c: f64) -> Self {
        LinExpr {
            constant: c,
            terms: Vec::new(),
        }
    }

    pub fn var(i: usize) -> Self {
        LinExpr {
            constant: 0.0,
            terms: vec![(i, 1.0)],
        }
    }

    fn from_map(constant: f64, map: BTreeMap<usize, f64>) -> Self {
        LinExpr {
            constant,
            terms: map.into_iter().filter(|&(_, a)| a != 0.0).collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(i, a)| a * x[i]).sum::<f64>()
    }

    pub fn scale(&self, s: f64) -> LinExpr {
        LinExpr {
            constant: self.constant * s,
            terms: self.terms.iter().map(|&(i, a)| (i, a * s)).collect(),
        }
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut map: BTreeMap<usize, f64> = self.terms.iter().copied().collect();
        for &(i, a) in &other.terms {
            *map.entry(i).or_insert(0.0) += a;
        }
        LinExpr::from_map(self.constant + other.constant, map)
    }
}

/// Complex affine function of the real variables, `c + Σ a_i x_i`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AffineExpr {
    pub constant: Complex64,
    pub terms: BTreeMap<usize, Complex64>,
}

impl AffineExpr {
    pub fn constant(c: Complex64) -> Self {
        AffineExpr {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    pub fn real(e: &LinExpr) -> Self {
        AffineExpr {
            constant: Complex64::new(e.constant, 0.0),
            terms: e
                .terms
                .iter()
                .map(|&(i, a)| (i, Complex64::new(a, 0.0)))
                .collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &AffineExpr, s: Complex64) {
        self.constant += other.constant * s;
        for (&i, &a) in &other.terms {
            let e = self.terms.entry(i).or_insert(Complex64::new(0.0, 0.0));
            *e += a * s;
            if *e == Complex64::new(0.0, 0.0) {
                self.terms.remove(&i);
            }
        }
    }

    pub fn conj(&self) -> AffineExpr {
        AffineExpr {
            constant: self.constant.conj(),
            terms: self.terms.iter().map(|(&i, a)| (i, a.conj())).collect(),
        }
    }

    pub fn re(&self) -> LinExpr {
        LinExpr::from_map(
            self.constant.re,
            self.terms.iter().map(|(&i, a)| (i, a.re)).collect(),
        )
    }

    pub fn im(&self) -> LinExpr {
        LinExpr::from_map(
            self.constant.im,
            self.terms.iter().map(|(&i, a)| (i, a.im)).collect(),
        )
    }

    /// True when the imaginary part vanishes identically.
    pub fn is_real(&self) -> bool {
        self.constant.im == 0.0 && self.terms.values().all(|a| a.im == 0.0)
    }

    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        self.constant + self.terms.iter().map(|(&i, a)| a * x[i]).sum::<Complex64>()
    }
}

/// Provenance of a PSD block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BlockLabel {
    /// (Part of) the moment matrix of a variable clique.
    Moment { clique: usize },
    /// (Part of) the localizing matrix of an inequality.
    Localizing { clique: usize, constraint: usize },
    /// The first-order moment matrix added per clique.
    FirstOrder { clique: usize },
    /// Any other block added by a front end.
    Custom { name: String },
}

/// A Hermitian matrix whose entries are complex affine expressions. Only the
/// upper triangle is stored; entry `(b, a)` is the conjugate of `(a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBlock {
    pub label: BlockLabel,
    dim: usize,
    upper: Vec<AffineExpr>,
}

impl ComplexBlock {
    /// Builds from a function giving entry `(a, b)` for `a ≤ b`. Diagonal
    /// entries must be real expressions.
    pub fn from_fn(
        label: BlockLabel,
        dim: usize,
        mut f: impl FnMut(usize, usize) -> AffineExpr,
    ) -> Self {
        let mut upper = Vec::with_capacity(dim * (dim + 1) / 2);
        for a in 0..dim {
            for b in a..dim {
                let e = f(a, b);
                debug_assert!(a != b || e.is_real(), "non-real diagonal entry");
                upper.push(e);
            }
        }
        ComplexBlock { label, dim, upper }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn offset(&self, a: usize, b: usize) -> usize {
        // row-major packed upper triangle
        a * self.dim - a * (a + 1) / 2 + b
    }

    pub fn entry(&self, a: usize, b: usize) -> AffineExpr {
        if a <= b {
            self.upper[self.offset(a, b)].clone()
        } else {
            self.upper[self.offset(b, a)].conj()
        }
    }

    pub(crate) fn upper_ref(&self, a: usize, b: usize) -> &AffineExpr {
        debug_assert!(a <= b);
        &self.upper[self.offset(a, b)]
    }

    /// True when every entry has an identically zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.upper.iter().all(AffineExpr::is_real)
    }

    /// Numeric value at `x` as a dense row-major matrix.
    pub fn evaluate(&self, x: &[f64]) -> Vec<Complex64> {
        let r = self.dim;
        let mut m = vec![Complex64::new(0.0, 0.0); r * r];
        for a in 0..r {
            for b in a..r {
                let v = self.upper_ref(a, b).evaluate(x);
                m[a * r + b] = v;
                m[b * r + a] = v.conj();
            }
        }
        m
    }
}

/// Sizes of an assembled model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statistics {
    /// Largest PSD block, in complex dimensions.
    pub mb: usize,
    pub blocks: usize,
    pub variables: usize,
    pub inequalities: usize,
    pub equalities: usize,
}

/// A complex moment relaxation over real decision variables.
///
/// Every moment `y_{β,γ}` with `(β,γ) ≠ (0,0)` owns one real variable when
/// `β = γ` and a real/imaginary pair otherwise; `y_{0,0}` is the constant 1.
#[derive(Clone, Debug, Default)]
pub struct ComplexSdp {
    vars: Vec<VarInfo>,
    index: HashMap<MomentKey, (usize, Option<usize>)>,
    objective: LinExpr,
    blocks: Vec<ComplexBlock>,
    inequalities: Vec<LinExpr>,
    equalities: Vec<LinExpr>,
}

impl ComplexSdp {
    pub fn new() -> Self {
        ComplexSdp::default()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_info(&self) -> &[VarInfo] {
        &self.vars
    }

    pub fn objective(&self) -> &LinExpr {
        &self.objective
    }

    pub fn blocks(&self) -> &[ComplexBlock] {
        &self.blocks
    }

    /// Scalar constraints `e ≥ 0`.
    pub fn inequalities(&self) -> &[LinExpr] {
        &self.inequalities
    }

    /// Scalar constraints `e = 0`.
    pub fn equalities(&self) -> &[LinExpr] {
        &self.equalities
    }

    /// Variable indices `(re, im)` of a moment, if it has been created.
    pub fn lookup(&self, pair: &MonomialPair) -> Option<(usize, Option<usize>)> {
        self.index.get(&MomentKey::of(pair).0).copied()
    }

    /// `y_{β,γ}` as an affine expression, creating its variables on first use.
    pub fn moment(&mut self, pair: &MonomialPair) -> AffineExpr {
        if pair.beta.is_zero() && pair.gamma.is_zero() {
            return AffineExpr::constant(Complex64::new(1.0, 0.0));
        }
        let (key, swapped) = MomentKey::of(pair);
        let (re, im) = match self.index.get(&key) {
            Some(&v) => v,
            None => {
                let beta = key.pair().beta.entries().to_vec();
                let gamma = key.pair().gamma.entries().to_vec();
                let re = self.vars.len();
                self.vars.push(VarInfo::Moment {
                    beta: beta.clone(),
                    gamma: gamma.clone(),
                    imag: false,
                });
                let im = if key.is_real() {
                    None
                } else {
                    self.vars.push(VarInfo::Moment {
                        beta,
                        gamma,
                        imag: true,
                    });
                    Some(re + 1)
                };
                self.index.insert(key, (re, im));
                (re, im)
            }
        };
        let mut e = AffineExpr::default();
        e.terms.insert(re, Complex64::new(1.0, 0.0));
        if let Some(im) = im {
            let s = if swapped { -1.0 } else { 1.0 };
            e.terms.insert(im, Complex64::new(0.0, s));
        }
        e
    }

    /// `L_y(p)` for an arbitrary polynomial.
    pub fn linear_functional(&mut self, p: &Poly) -> AffineExpr {
        let mut e = AffineExpr::default();
        for (m, &c) in p.terms() {
            let y = self.moment(m);
            e.add_scaled(&y, c);
        }
        e
    }

    /// `L_y(g)` for a Hermitian polynomial, which is real.
    pub fn real_functional(&mut self, g: &HermitianPoly) -> LinExpr {
        self.linear_functional(g.as_poly()).re()
    }

    /// Localizing matrix entry `L_y(g z^β z̄^γ)`.
    pub fn localizing_entry(
        &mut self,
        g: &HermitianPoly,
        beta: &Exponent,
        gamma: &Exponent,
    ) -> AffineExpr {
        let mut e = AffineExpr::default();
        for (m, &c) in g.terms() {
            let y = self.moment(&MonomialPair::new(beta.add(&m.beta), gamma.add(&m.gamma)));
            e.add_scaled(&y, c);
        }
        e
    }

    /// The localizing matrix of `g` (the moment matrix for `g = 1`) on rows
    /// and columns `nodes`.
    pub fn localizing_block(
        &mut self,
        label: BlockLabel,
        g: &HermitianPoly,
        nodes: &[Exponent],
    ) -> ComplexBlock {
        ComplexBlock::from_fn(label, nodes.len(), |a, b| {
            self.localizing_entry(g, &nodes[a], &nodes[b])
        })
    }

    /// Adds a non-moment variable.
    pub fn add_aux(&mut self, label: impl Into<String>) -> usize {
        self.vars.push(VarInfo::Aux {
            label: label.into(),
        });
        self.vars.len() - 1
    }

    pub fn push_block(&mut self, block: ComplexBlock) {
        self.blocks.push(block);
    }

    pub fn push_inequality(&mut self, e: LinExpr) {
        self.inequalities.push(e);
    }

    pub fn push_equality(&mut self, e: LinExpr) {
        self.equalities.push(e);
    }

    pub fn set_objective(&mut self, e: LinExpr) {
        self.objective = e;
    }

    pub fn add_to_objective(&mut self, e: &LinExpr) {
        self.objective = self.objective.add(e);
    }

    pub fn statistics(&self) -> Statistics {
        Statistics {
            mb: self.blocks.iter().map(ComplexBlock::dim).max().unwrap_or(0),
            blocks: self.blocks.len(),
            variables: self.vars.len(),
            inequalities: self.inequalities.len(),
            equalities: self.equalities.len(),
        }
    }

    /// Value of `y_{β,γ}` under the real variable vector `x`; `None` when the
    /// moment was never used.
    pub fn moment_value(&self, pair: &MonomialPair, x: &[f64]) -> Option<Complex64> {
        if pair.beta.is_zero() && pair.gamma.is_zero() {
            return Some(Complex64::new(1.0, 0.0));
        }
        let (key, swapped) = MomentKey::of(pair);
        let &(re, im) = self.index.get(&key)?;
        let imv = im.map_or(0.0, |i| x[i]);
        Some(Complex64::new(x[re], if swapped { -imv } else { imv }))
    }
}
