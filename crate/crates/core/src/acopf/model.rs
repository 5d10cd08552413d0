//! The voltage-only AC-OPF as a complex polynomial problem.
//!
//! Generator injections are eliminated: at bus `i` the injection equals
//! `S^d_i + conj(Y^s_i)|V_i|² + Σ S_flow`, so generation bounds become
//! bounds on Hermitian quadratics in `V` and the cost becomes a quartic.

use num_complex::Complex64;

use super::matpower::NetworkCase;
use crate::error::{Error, Result};
use crate::poly::{Cpop, Exponent, HermitianPoly, MonomialPair, Poly};

/// `c · V_i V̄_j`.
fn vv(n: usize, i: usize, j: usize, c: Complex64) -> Poly {
    Poly::monomial(
        MonomialPair::new(Exponent::unit(n, i), Exponent::unit(n, j)),
        c,
    )
}

/// Apparent power flowing into a branch end, with its limit.
#[derive(Clone, Debug)]
pub struct FlowLimit {
    pub branch: usize,
    /// True for the `from` end.
    pub from_side: bool,
    /// Complex power `S` as a quadratic form in `V`.
    pub flow: Poly,
    /// `s^u`, per-unit.
    pub rate: f64,
}

/// Active-power cost of one generator: `c2 P² + c1 P + c0`, `P` per-unit.
#[derive(Clone, Debug)]
pub struct GeneratorCost {
    pub bus: usize,
    /// `Re` of the eliminated injection.
    pub p: HermitianPoly,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

/// The CPOP pieces of one network. Constraints are kept in groups so the
/// Shor builder can drop the quartic flow limits.
#[derive(Clone, Debug)]
pub struct AcopfModel {
    pub n: usize,
    /// Injection expression per bus.
    pub injections: Vec<Poly>,
    /// Quadratic inequalities: voltage, generation and angle bounds.
    pub quadratic: Vec<HermitianPoly>,
    /// Power balance and fixed generation.
    pub equalities: Vec<HermitianPoly>,
    pub flows: Vec<FlowLimit>,
    pub costs: Vec<GeneratorCost>,
}

impl AcopfModel {
    pub fn new(case: &NetworkCase) -> Result<Self> {
        let n = case.buses.len();
        let one = Complex64::new(1.0, 0.0);
        let mut injections: Vec<Poly> = case
            .buses
            .iter()
            .enumerate()
            .map(|(i, b)| Poly::constant(n, b.load).add(&vv(n, i, i, b.shunt.conj())))
            .collect();
        let mut flows = Vec::new();
        let mut quadratic = Vec::new();
        for (k, br) in case.branches.iter().enumerate() {
            let (i, j) = (br.from, br.to);
            let ys = br.y.conj() - Complex64::new(0.0, br.charging / 2.0);
            let sf = vv(n, i, i, ys / br.tap.norm_sqr()).add(&vv(n, i, j, -br.y.conj() / br.tap));
            let st = vv(n, j, j, ys).add(&vv(n, j, i, -br.y.conj() / br.tap.conj()));
            injections[i] = injections[i].add(&sf);
            injections[j] = injections[j].add(&st);
            if let Some(rate) = br.rate {
                flows.push(FlowLimit {
                    branch: k,
                    from_side: true,
                    flow: sf,
                    rate,
                });
                flows.push(FlowLimit {
                    branch: k,
                    from_side: false,
                    flow: st,
                    rate,
                });
            }
            let w = vv(n, i, j, one);
            let (re, im) = (w.real_part(), w.imag_part());
            for (bound, upper) in [(br.angmax, true), (br.angmin, false)] {
                let Some(theta) = bound else { continue };
                if theta.abs() >= 90.0 {
                    return Err(Error::Network(format!(
                        "branch {}: angle bound {theta} outside (-90, 90)",
                        k + 1
                    )));
                }
                let t = theta.to_radians().tan();
                quadratic.push(if upper {
                    re.scale(t).sub(&im)
                } else {
                    im.sub(&re.scale(t))
                });
            }
        }

        let mut equalities = Vec::new();
        let mut costs = Vec::new();
        for (i, bus) in case.buses.iter().enumerate() {
            let m = HermitianPoly::norm_sq(n, i);
            quadratic.push(m.sub(&HermitianPoly::constant(n, bus.vmin * bus.vmin)));
            quadratic.push(HermitianPoly::constant(n, bus.vmax * bus.vmax).sub(&m));

            let (p, q) = (injections[i].real_part(), injections[i].imag_part());
            let zero = Complex64::new(0.0, 0.0);
            let (lo, hi) = match case.generator_at(i) {
                Some(g) => (g.smin, g.smax),
                None => (zero, zero),
            };
            for (e, l, u) in [(&p, lo.re, hi.re), (&q, lo.im, hi.im)] {
                if l == u {
                    push_row(
                        &mut equalities,
                        e.sub(&HermitianPoly::constant(n, l)),
                        true,
                        i,
                    )?;
                } else {
                    push_row(
                        &mut quadratic,
                        e.sub(&HermitianPoly::constant(n, l)),
                        false,
                        i,
                    )?;
                    push_row(
                        &mut quadratic,
                        HermitianPoly::constant(n, u).sub(e),
                        false,
                        i,
                    )?;
                }
            }
            if let Some(g) = case.generator_at(i) {
                let base = case.base_mva;
                costs.push(GeneratorCost {
                    bus: i,
                    p,
                    c2: g.cost[0] * base * base,
                    c1: g.cost[1] * base,
                    c0: g.cost[2],
                });
            }
        }
        Ok(AcopfModel {
            n,
            injections,
            quadratic,
            equalities,
            flows,
            costs,
        })
    }

    /// `Σ c1 P + c0`.
    pub fn linear_cost(&self) -> HermitianPoly {
        self.costs
            .iter()
            .fold(HermitianPoly::zero(self.n), |acc, g| {
                acc.add(&g.p.scale(g.c1))
                    .add(&HermitianPoly::constant(self.n, g.c0))
            })
    }

    /// `Σ c2 P² + c1 P + c0`.
    pub fn cost(&self) -> HermitianPoly {
        self.costs
            .iter()
            .filter(|g| g.c2 != 0.0)
            .fold(self.linear_cost(), |acc, g| {
                acc.add(&g.p.mul(&g.p).scale(g.c2))
            })
    }

    /// `(s^u)² − |S|²` for every limited branch end.
    pub fn quartic_flow_limits(&self) -> Vec<HermitianPoly> {
        self.flows
            .iter()
            .map(|f| {
                let sq = HermitianPoly::hermitize(&f.flow.mul(&f.flow.conjugate()));
                HermitianPoly::constant(self.n, f.rate * f.rate).sub(&sq)
            })
            .collect()
    }

    /// The full problem: quartic cost, quadratic bounds and quartic flow
    /// limits.
    pub fn cpop(&self) -> Result<Cpop> {
        let mut g = self.quadratic.clone();
        g.extend(self.quartic_flow_limits());
        Cpop::new(self.n, self.cost(), g, self.equalities.clone())
    }

    /// The quadratic part only; `objective` replaces the cost when given.
    pub fn qcqp(&self, objective: Option<HermitianPoly>) -> Result<Cpop> {
        let f = objective.unwrap_or_else(|| self.linear_cost());
        Cpop::new(self.n, f, self.quadratic.clone(), self.equalities.clone())
    }
}

fn push_row(
    out: &mut Vec<HermitianPoly>,
    e: HermitianPoly,
    equality: bool,
    bus: usize,
) -> Result<()> {
    if e.is_zero() {
        return Ok(());
    }
    if e.degree() == 0 {
        // a bus without branches or shunt: the row is a constant
        let c = e.constant_term();
        if c < 0.0 || (equality && c != 0.0) {
            return Err(Error::Network(format!(
                "bus index {bus} cannot balance its load"
            )));
        }
        return Ok(());
    }
    out.push(e);
    Ok(())
}

/// Builds the voltage-only CPOP of `case`.
pub fn build_cpop(case: &NetworkCase) -> Result<Cpop> {
    AcopfModel::new(case)?.cpop()
}
