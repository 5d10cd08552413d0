//! Embedded SDP solver and model export.

mod ipm;
mod sdpa;

pub use sdpa::{export_sdpa, read_sdpa, write_sdpa, ExportMeta};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::relax::RealSdp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    /// Stopped early with all measures within `near_tol`.
    NearOptimal,
    MaxIterations,
    InfeasibleDetected,
    NumericalFailure,
}

impl Status {
    pub fn is_success(self) -> bool {
        matches!(self, Status::Optimal | Status::NearOptimal)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Optimal => "optimal",
            Status::NearOptimal => "near-optimal",
            Status::MaxIterations => "max-iterations",
            Status::InfeasibleDetected => "infeasible-detected",
            Status::NumericalFailure => "numerical-failure",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iters: usize,
    /// Accepted as near-optimal when the run stops before `gap_tol`.
    pub near_tol: f64,
    /// Fraction of the distance to the boundary taken per step.
    pub step_fraction: f64,
    /// Print one line per iteration to stderr.
    pub verbose: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            max_iters: 200,
            near_tol: 1e-6,
            step_fraction: 0.98,
            verbose: false,
        }
    }
}

impl Settings {
    /// Sets both the gap and feasibility tolerances.
    pub fn tol(mut self, tol: f64) -> Self {
        self.gap_tol = tol;
        self.feas_tol = tol;
        self.near_tol = self.near_tol.max(tol);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: Status,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|p − d| / (1 + |p| + |d|)` on the scaled model.
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
    /// Wall time in seconds.
    pub time: f64,
    /// Final primal point, indexed like the model variables.
    #[serde(skip)]
    pub x: Vec<f64>,
}

impl SolveReport {
    /// Value of the relaxation at the final iterate.
    pub fn objective(&self) -> f64 {
        self.primal_objective
    }
}

/// Solves `min cᵀx + c₀` over the blocks, inequalities and equalities of
/// `sdp` with a primal-dual interior-point method.
pub fn solve(sdp: &RealSdp, settings: &Settings) -> Result<SolveReport> {
    ipm::run(sdp, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Cpop, HermitianPoly, Poly};
    use crate::relax::{assemble, complex_to_real, LinExpr, RealBlock, RelaxOptions, Sparsity};
    use crate::sparsity::Rounds;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ball(n: usize) -> HermitianPoly {
        (0..n).fold(HermitianPoly::constant(n, 1.0), |acc, i| {
            acc.sub(&HermitianPoly::norm_sq(n, i))
        })
    }

    fn two_re(n: usize) -> HermitianPoly {
        HermitianPoly::new(Poly::var(n, 0).add(&Poly::conj_var(n, 0))).unwrap()
    }

    fn bound(cpop: &Cpop, opts: &RelaxOptions) -> SolveReport {
        let r = assemble(cpop, opts).unwrap();
        let (real, _) = complex_to_real(&r.sdp);
        solve(&real, &Settings::default()).unwrap()
    }

    #[test]
    fn unit_disc() {
        let p = Cpop::new(1, two_re(1), vec![ball(1)], vec![]).unwrap();
        let rep = bound(&p, &RelaxOptions::new(Sparsity::Dense).order(1));
        assert_eq!(rep.status, Status::Optimal);
        assert!((rep.objective() + 2.0).abs() < 1e-6, "{rep:?}");
    }

    #[test]
    fn toy_all_modes() {
        let p = Cpop::new(2, two_re(2), vec![ball(2)], vec![]).unwrap();
        for mode in [Sparsity::Dense, Sparsity::Cs, Sparsity::Ts, Sparsity::CsTs] {
            for d in 1..=3 {
                let opts = RelaxOptions::new(mode)
                    .order(d)
                    .rounds(Rounds::UntilStable { max: 10 });
                let rep = bound(&p, &opts);
                assert_eq!(rep.status, Status::Optimal, "{mode} d={d}");
                assert!(
                    (rep.objective() + 2.0).abs() < 1e-6,
                    "{mode} d={d}: {rep:?}"
                );
            }
        }
    }

    #[test]
    fn diagonal_lp_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let m = rng.gen_range(1..8);
            let c: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lo: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..0.0)).collect();
            let hi: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..2.0)).collect();
            // lo_i ≤ y_i ≤ hi_i as a diagonal block plus scalar rows
            let mut coeffs = Vec::new();
            for i in 0..m {
                coeffs.push((i, vec![(i, i, 1.0)]));
            }
            let block = RealBlock {
                dim: m,
                constant: (0..m).map(|i| (i, i, -lo[i])).collect(),
                coeffs,
            };
            let ineq = (0..m)
                .map(|i| LinExpr {
                    constant: hi[i],
                    terms: vec![(i, -1.0)],
                })
                .collect();
            let sdp = RealSdp {
                nvars: m,
                objective: LinExpr {
                    constant: 0.0,
                    terms: c.iter().copied().enumerate().collect(),
                },
                blocks: vec![block],
                inequalities: ineq,
                equalities: vec![],
            };
            let oracle: f64 = (0..m)
                .map(|i| {
                    if c[i] >= 0.0 {
                        c[i] * lo[i]
                    } else {
                        c[i] * hi[i]
                    }
                })
                .sum();
            let rep = solve(&sdp, &Settings::default()).unwrap();
            assert_eq!(rep.status, Status::Optimal);
            assert!((rep.objective() - oracle).abs() < 1e-6 * (1.0 + oracle.abs()));
        }
    }

    #[test]
    fn equality_rows() {
        // min x0 + x1 s.t. x0 − x1 = 1, [[1, x0],[x0, 1]] ⪰ 0
        let sdp = RealSdp {
            nvars: 2,
            objective: LinExpr {
                constant: 0.5,
                terms: vec![(0, 1.0), (1, 1.0)],
            },
            blocks: vec![RealBlock {
                dim: 2,
                constant: vec![(0, 0, 1.0), (1, 1, 1.0)],
                coeffs: vec![(0, vec![(0, 1, 1.0)])],
            }],
            inequalities: vec![],
            equalities: vec![LinExpr {
                constant: -1.0,
                terms: vec![(0, 1.0), (1, -1.0)],
            }],
        };
        let rep = solve(&sdp, &Settings::default()).unwrap();
        assert_eq!(rep.status, Status::Optimal);
        // x0 = −1, x1 = −2
        assert!((rep.objective() - (-2.5)).abs() < 1e-7, "{rep:?}");
    }

    #[test]
    fn deterministic_iterates() {
        let p = Cpop::new(2, two_re(2), vec![ball(2)], vec![]).unwrap();
        let a = bound(&p, &RelaxOptions::new(Sparsity::Dense).order(2));
        let b = bound(&p, &RelaxOptions::new(Sparsity::Dense).order(2));
        assert_eq!(a.x, b.x);
        assert_eq!(a.iterations, b.iterations);
    }
}
