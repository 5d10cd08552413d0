use std::collections::BTreeSet;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Exponent, HermitianPoly, MonomialPair, Poly};
use crate::error::{Error, Result};

/// A complex polynomial optimization problem
/// `inf f(z, z̄) s.t. g_j(z, z̄) ≥ 0, h_i(z, z̄) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpop {
    n: usize,
    objective: HermitianPoly,
    inequalities: Vec<HermitianPoly>,
    equalities: Vec<HermitianPoly>,
}

impl Cpop {
    pub fn new(
        n: usize,
        objective: HermitianPoly,
        inequalities: Vec<HermitianPoly>,
        equalities: Vec<HermitianPoly>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOptions(
                "a CPOP needs at least one variable".into(),
            ));
        }
        for p in std::iter::once(&objective)
            .chain(&inequalities)
            .chain(&equalities)
        {
            if p.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.nvars(),
                });
            }
        }
        if inequalities
            .iter()
            .chain(&equalities)
            .any(HermitianPoly::is_zero)
        {
            return Err(Error::ZeroPolynomial);
        }
        Ok(Cpop {
            n,
            objective,
            inequalities,
            equalities,
        })
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn objective(&self) -> &HermitianPoly {
        &self.objective
    }

    pub fn inequalities(&self) -> &[HermitianPoly] {
        &self.inequalities
    }

    pub fn equalities(&self) -> &[HermitianPoly] {
        &self.equalities
    }

    /// Replaces the objective, keeping the constraints.
    pub fn with_objective(&self, objective: HermitianPoly) -> Result<Cpop> {
        Cpop::new(
            self.n,
            objective,
            self.inequalities.clone(),
            self.equalities.clone(),
        )
    }

    /// `d_j = ⌈deg(g_j)/2⌉` for each inequality.
    pub fn constraint_half_degrees(&self) -> Vec<u32> {
        self.inequalities
            .iter()
            .map(|g| g.half_degree().unwrap_or(0))
            .collect()
    }

    /// `d_min = max(⌈deg(f)/2⌉, d_1, …, d_m)`, including equalities.
    pub fn min_order(&self) -> u32 {
        let obj = self.objective.half_degree().unwrap_or(0);
        self.inequalities
            .iter()
            .chain(&self.equalities)
            .map(|g| g.half_degree().unwrap_or(0))
            .fold(obj, u32::max)
    }

    /// `supp(f) ∪ ⋃ supp(g_j) ∪ ⋃ supp(h_i)`, both orientations.
    pub fn support(&self) -> BTreeSet<MonomialPair> {
        std::iter::once(&self.objective)
            .chain(&self.inequalities)
            .chain(&self.equalities)
            .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
            .collect()
    }

    /// Checks `g_j(z) ≥ −tol` and `|h_i(z)| ≤ tol`.
    pub fn is_feasible(&self, z: &[Complex64], tol: f64) -> Result<bool> {
        for g in &self.inequalities {
            if g.evaluate(z)? < -tol {
                return Ok(false);
            }
        }
        for h in &self.equalities {
            if h.evaluate(z)?.abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_file(&self) -> CpopFile {
        let terms = |p: &HermitianPoly| -> Vec<TermJson> {
            p.terms()
                .map(|(m, c)| TermJson {
                    beta: m.beta.entries().iter().map(|&e| u32::from(e)).collect(),
                    gamma: m.gamma.entries().iter().map(|&e| u32::from(e)).collect(),
                    re: c.re,
                    im: c.im,
                })
                .collect()
        };
        CpopFile {
            n: self.n,
            objective: terms(&self.objective),
            ineq: self.inequalities.iter().map(terms).collect(),
            eq: self.equalities.iter().map(terms).collect(),
        }
    }

    pub fn from_file(file: &CpopFile) -> Result<Self> {
        let n = file.n;
        let poly = |what: &str, ts: &[TermJson]| -> Result<HermitianPoly> {
            let mut p = Poly::zero(n);
            for t in ts {
                if t.beta.len() != n || t.gamma.len() != n {
                    return Err(Error::Parse(format!(
                        "{what}: exponent length {} / {} does not match n = {n}",
                        t.beta.len(),
                        t.gamma.len()
                    )));
                }
                let cvt = |v: &[u32]| -> Result<Exponent> {
                    v.iter()
                        .map(|&e| {
                            u8::try_from(e).map_err(|_| {
                                Error::Parse(format!("{what}: exponent {e} too large"))
                            })
                        })
                        .collect::<Result<Vec<u8>>>()
                        .map(Exponent::from_vec)
                };
                p.add_term(
                    MonomialPair::new(cvt(&t.beta)?, cvt(&t.gamma)?),
                    Complex64::new(t.re, t.im),
                );
            }
            HermitianPoly::new(p).map_err(|e| Error::NotHermitian(format!("{what}: {e}")))
        };
        let objective = poly("objective", &file.objective)?;
        let ineq = file
            .ineq
            .iter()
            .enumerate()
            .map(|(j, ts)| poly(&format!("ineq[{j}]"), ts))
            .collect::<Result<Vec<_>>>()?;
        let eq = file
            .eq
            .iter()
            .enumerate()
            .map(|(j, ts)| poly(&format!("eq[{j}]"), ts))
            .collect::<Result<Vec<_>>>()?;
        Cpop::new(n, objective, ineq, eq)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CpopFile = serde_json::from_str(text)?;
        Cpop::from_file(&file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Cpop::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// On-disk CPOP layout.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CpopFile {
    pub n: usize,
    pub objective: Vec<TermJson>,
    #[serde(default)]
    pub ineq: Vec<Vec<TermJson>>,
    #[serde(default)]
    pub eq: Vec<Vec<TermJson>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub beta: Vec<u32>,
    pub gamma: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(n: usize) -> HermitianPoly {
        (0..n).fold(HermitianPoly::constant(n, 1.0), |acc, i| {
            acc.sub(&HermitianPoly::norm_sq(n, i))
        })
    }

    fn example() -> Cpop {
        let f = HermitianPoly::new(Poly::var(2, 0).add(&Poly::conj_var(2, 0))).unwrap();
        Cpop::new(2, f, vec![ball(2)], vec![]).unwrap()
    }

    #[test]
    fn orders() {
        let p = example();
        assert_eq!(p.constraint_half_degrees(), vec![1]);
        assert_eq!(p.min_order(), 1);
        assert_eq!(p.support().len(), 5);
    }

    #[test]
    fn json_round_trip() {
        let p = example();
        let text = p.to_json().unwrap();
        assert_eq!(Cpop::from_json(&text).unwrap(), p);
    }

    #[test]
    fn loader_rejects_non_hermitian() {
        let text = r#"{"n": 1, "objective": [{"beta": [1], "gamma": [0], "re": 1.0, "im": 0.0}]}"#;
        assert!(matches!(Cpop::from_json(text), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn loader_rejects_bad_lengths() {
        let text = r#"{"n": 2, "objective": [{"beta": [1], "gamma": [1], "re": 1.0}]}"#;
        assert!(matches!(Cpop::from_json(text), Err(Error::Parse(_))));
    }

    #[test]
    fn feasibility() {
        let p = example();
        let z = [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(p.is_feasible(&z, 1e-12).unwrap());
        let far = [Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(!p.is_feasible(&far, 1e-12).unwrap());
    }
}
