//! Complex moment relaxations and their real counterparts.
//!
//! [`assemble`] turns a [`Cpop`] into a [`ComplexSdp`] whose PSD blocks are
//! (sub)matrices of moment and localizing matrices chosen by the requested
//! sparsity scheme; [`complex_to_real`] produces the real model handed to the
//! solver.

mod model;
mod real;

pub use model::{
    AffineExpr, BlockLabel, ComplexBlock, ComplexSdp, LinExpr, MomentKey, Statistics, VarInfo,
};
pub use real::{
    complex_to_real, realify_block, BlockOrigin, RealBlock, RealSdp, Sidecar, SymEntries,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Extension;
use crate::poly::{clique_basis, Cpop, HermitianPoly};
use crate::sparsity::{min_relaxation_orders, ts_iterate, CorrelativePattern, Rounds, TermPattern};

/// Which hierarchy to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sparsity {
    Dense,
    Cs,
    Ts,
    CsTs,
    /// CS-TSSOS plus a full first-order moment matrix per clique.
    CsTsExtra,
    /// Per-clique minimum orders on the icsp cliques.
    MinInitial,
}

impl FromStr for Sparsity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dense" => Ok(Sparsity::Dense),
            "cs" => Ok(Sparsity::Cs),
            "ts" => Ok(Sparsity::Ts),
            "cs-ts" => Ok(Sparsity::CsTs),
            "cs-ts-extra" => Ok(Sparsity::CsTsExtra),
            "min" | "min-initial" => Ok(Sparsity::MinInitial),
            other => Err(format!("unknown sparsity mode '{other}'")),
        }
    }
}

impl fmt::Display for Sparsity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sparsity::Dense => "dense",
            Sparsity::Cs => "cs",
            Sparsity::Ts => "ts",
            Sparsity::CsTs => "cs-ts",
            Sparsity::CsTsExtra => "cs-ts-extra",
            Sparsity::MinInitial => "min",
        };
        f.write_str(s)
    }
}

impl Sparsity {
    pub fn uses_terms(self) -> bool {
        !matches!(self, Sparsity::Dense | Sparsity::Cs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxOptions {
    pub sparsity: Sparsity,
    /// Relaxation order `d`; `None` means `d_min`. Ignored by `MinInitial`.
    pub order: Option<u32>,
    /// Sparse order `k`; ignored by `Dense` and `Cs`.
    pub rounds: Rounds,
    /// Chordal extension of the term sparsity graphs.
    pub ts_extension: Extension,
    /// Chordal extension of the variable graph.
    pub cs_extension: Extension,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        RelaxOptions {
            sparsity: Sparsity::Dense,
            order: None,
            rounds: Rounds::Fixed(1),
            ts_extension: Extension::Maximal,
            cs_extension: Extension::MinDegree,
        }
    }
}

impl RelaxOptions {
    pub fn new(sparsity: Sparsity) -> Self {
        RelaxOptions {
            sparsity,
            ..Default::default()
        }
    }

    pub fn order(mut self, d: u32) -> Self {
        self.order = Some(d);
        self
    }

    pub fn rounds(mut self, rounds: Rounds) -> Self {
        self.rounds = rounds;
        self
    }

    pub fn ts_extension(mut self, ext: Extension) -> Self {
        self.ts_extension = ext;
        self
    }

    pub fn cs_extension(mut self, ext: Extension) -> Self {
        self.cs_extension = ext;
        self
    }
}

/// An assembled relaxation together with the patterns that shaped it.
#[derive(Clone, Debug)]
pub struct Relaxation {
    pub sdp: ComplexSdp,
    pub pattern: CorrelativePattern,
    pub orders: Vec<u32>,
    pub terms: Option<TermPattern>,
}

impl Relaxation {
    pub fn statistics(&self) -> Statistics {
        self.sdp.statistics()
    }
}

/// Builds the relaxation selected by `opts`.
pub fn assemble(cpop: &Cpop, opts: &RelaxOptions) -> Result<Relaxation> {
    let d_min = cpop.min_order();
    let d = opts.order.unwrap_or(d_min);
    if opts.sparsity != Sparsity::MinInitial && d < d_min {
        return Err(Error::OrderTooLow {
            order: d,
            min_order: d_min,
        });
    }
    let ts = Some((opts.rounds, opts.ts_extension));
    match opts.sparsity {
        Sparsity::Dense => {
            let pattern = CorrelativePattern::dense(cpop);
            assemble_with(cpop, pattern, vec![d], None, false)
        }
        Sparsity::Cs => {
            let pattern = CorrelativePattern::csp(cpop, d, opts.cs_extension)?;
            let orders = vec![d; pattern.num_cliques()];
            assemble_with(cpop, pattern, orders, None, false)
        }
        Sparsity::Ts => {
            let pattern = CorrelativePattern::dense(cpop);
            assemble_with(cpop, pattern, vec![d], ts, false)
        }
        Sparsity::CsTs | Sparsity::CsTsExtra => {
            let pattern = CorrelativePattern::csp(cpop, d, opts.cs_extension)?;
            let orders = vec![d; pattern.num_cliques()];
            let extra = opts.sparsity == Sparsity::CsTsExtra;
            assemble_with(cpop, pattern, orders, ts, extra)
        }
        Sparsity::MinInitial => {
            let pattern = CorrelativePattern::icsp(cpop, opts.cs_extension)?;
            let orders = min_relaxation_orders(cpop, &pattern)?;
            assemble_with(cpop, pattern, orders, ts, true)
        }
    }
}

/// Builds a relaxation on a given variable pattern with per-clique orders.
///
/// With `ts` set, blocks come from the term sparsity iteration; otherwise
/// each clique gets full moment and localizing matrices. `first_order` adds
/// a full `M_1(y, I_l)` per clique (skipped when it would duplicate a
/// principal submatrix of a full block).
pub fn assemble_with(
    cpop: &Cpop,
    pattern: CorrelativePattern,
    orders: Vec<u32>,
    ts: Option<(Rounds, Extension)>,
    first_order: bool,
) -> Result<Relaxation> {
    if cpop.objective().is_zero() {
        return Err(Error::EmptyObjective);
    }
    if orders.len() != pattern.num_cliques() {
        return Err(Error::DimensionMismatch {
            expected: pattern.num_cliques(),
            got: orders.len(),
        });
    }
    let n = cpop.nvars();
    let one = HermitianPoly::constant(n, 1.0);
    let dj = cpop.constraint_half_degrees();
    let mut sdp = ComplexSdp::new();

    let terms = match ts {
        Some((rounds, ext)) => Some(ts_iterate(cpop, &pattern, &orders, rounds, ext)?),
        None => None,
    };
    match &terms {
        None => {
            for (l, clique) in pattern.cliques.iter().enumerate() {
                let d = orders[l];
                let nodes = clique_basis(clique, n, d);
                let b = sdp.localizing_block(BlockLabel::Moment { clique: l }, &one, &nodes);
                sdp.push_block(b);
                for &j in &pattern.assignment[l] {
                    if dj[j] > d {
                        return Err(Error::OrderTooLow {
                            order: d,
                            min_order: dj[j],
                        });
                    }
                    let nodes = clique_basis(clique, n, d - dj[j]);
                    let label = BlockLabel::Localizing {
                        clique: l,
                        constraint: j,
                    };
                    let b = sdp.localizing_block(label, &cpop.inequalities()[j], &nodes);
                    sdp.push_block(b);
                }
            }
        }
        Some(tp) => {
            for owner in &tp.owners {
                let (g, label) = match owner.constraint {
                    None => (
                        &one,
                        BlockLabel::Moment {
                            clique: owner.clique,
                        },
                    ),
                    Some(j) => (
                        &cpop.inequalities()[j],
                        BlockLabel::Localizing {
                            clique: owner.clique,
                            constraint: j,
                        },
                    ),
                };
                for nodes in owner.block_exponents() {
                    let b = sdp.localizing_block(label.clone(), g, &nodes);
                    sdp.push_block(b);
                }
            }
        }
    }
    if first_order {
        for (l, clique) in pattern.cliques.iter().enumerate() {
            if terms.is_none() && orders[l] >= 1 {
                continue;
            }
            let nodes = clique_basis(clique, n, 1);
            let b = sdp.localizing_block(BlockLabel::FirstOrder { clique: l }, &one, &nodes);
            sdp.push_block(b);
        }
    }
    for &j in &pattern.residual {
        let e = sdp.real_functional(&cpop.inequalities()[j]);
        sdp.push_inequality(e);
    }
    for h in cpop.equalities() {
        let e = sdp.real_functional(h);
        sdp.push_equality(e);
    }
    let obj = sdp.real_functional(cpop.objective());
    sdp.set_objective(obj);
    Ok(Relaxation {
        sdp,
        pattern,
        orders,
        terms,
    })
}
