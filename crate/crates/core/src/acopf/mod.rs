//! AC optimal power flow: Matpower input, the voltage-only CPOP, its Shor
//! and 1.5th-order relaxations, and optimality gaps against local optima.

mod matpower;
mod model;

pub use matpower::{parse_matpower, Branch, Bus, Generator, NetworkCase};
pub use model::{build_cpop, AcopfModel, FlowLimit, GeneratorCost};

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Extension;
use crate::poly::{Cpop, HermitianPoly};
use crate::relax::{
    assemble, assemble_with, complex_to_real, AffineExpr, BlockLabel, ComplexBlock, ComplexSdp,
    LinExpr, RelaxOptions, Sparsity,
};
use crate::solver::{solve, Settings, SolveReport, Status};
use crate::sparsity::{assign_constraints, CorrelativePattern, PatternKind, Rounds};

/// Which relaxation of the AC-OPF to solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcopfOrder {
    /// First order on the bus stars with one term sparsity round, quartic
    /// cost lowered by epigraphs and flow limits by 2×2 blocks.
    Shor,
    /// Minimum orders on the icsp cliques with one term sparsity round.
    OneAndHalf,
    /// CS-TSSOS at order `d` with sparse order `k`.
    Sparse { d: u32, k: usize },
}

impl fmt::Display for AcopfOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcopfOrder::Shor => f.write_str("1st"),
            AcopfOrder::OneAndHalf => f.write_str("1.5th"),
            AcopfOrder::Sparse { d, k } => write!(f, "d={d},k={k}"),
        }
    }
}

impl FromStr for AcopfOrder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "shor" | "1" | "1st" => Ok(AcopfOrder::Shor),
            "1.5" | "1.5th" | "min" => Ok(AcopfOrder::OneAndHalf),
            other => Err(format!("unknown AC-OPF order '{other}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcopfOptions {
    /// Chordal extension of the icsp graph; the first order uses the bus
    /// stars directly.
    pub cs_extension: Extension,
    /// Chordal extension of the term sparsity graphs.
    pub ts_extension: Extension,
    pub settings: Settings,
}

impl Default for AcopfOptions {
    fn default() -> Self {
        AcopfOptions {
            cs_extension: Extension::MinDegree,
            ts_extension: Extension::Maximal,
            // objectives near 1e5 $/h stall with dual residuals around 1e-6
            settings: Settings {
                near_tol: 1e-5,
                ..Settings::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcopfReport {
    pub case: String,
    pub order: String,
    /// Lower bound in $/h.
    pub opt: f64,
    /// Local optimum the gap is measured against.
    pub ac: Option<f64>,
    /// Percentage.
    pub gap: Option<f64>,
    /// Gap strictly below 1%.
    pub global: Option<bool>,
    pub mb: usize,
    pub blocks: usize,
    pub variables: usize,
    /// Wall time in seconds, assembly included.
    pub time: f64,
    pub status: Status,
}

impl AcopfReport {
    /// Attaches a local optimum and the resulting gap.
    pub fn with_ac(mut self, ac: f64) -> Result<Self> {
        let gap = optimality_gap(ac, self.opt)?;
        self.ac = Some(ac);
        self.gap = Some(gap);
        self.global = Some(gap_accepted(gap));
        Ok(self)
    }
}

/// `(AC − opt) / AC × 100`.
pub fn optimality_gap(ac: f64, opt: f64) -> Result<f64> {
    if ac == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((ac - opt) / ac * 100.0)
}

/// A relaxation bound within 1% of a local optimum certifies it as global.
pub fn gap_accepted(gap: f64) -> bool {
    gap < 1.0
}

#[derive(Deserialize)]
struct AcRow {
    case: String,
    ac_objective: f64,
}

/// Parses a `case,ac_objective` table.
pub fn parse_ac_table(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = BTreeMap::new();
    for row in rdr.deserialize::<AcRow>() {
        let row = row.map_err(|e| Error::Parse(format!("AC table: {e}")))?;
        out.insert(row.case, row.ac_objective);
    }
    Ok(out)
}

pub fn load_ac_table(path: impl AsRef<Path>) -> Result<BTreeMap<String, f64>> {
    parse_ac_table(&std::fs::read_to_string(path)?)
}

fn flow_blocks(sdp: &mut ComplexSdp, model: &AcopfModel) {
    for f in &model.flows {
        let s = sdp.linear_functional(&f.flow);
        let u = AffineExpr::constant(Complex64::new(f.rate, 0.0));
        let side = if f.from_side { "from" } else { "to" };
        let label = BlockLabel::Custom {
            name: format!("flow {} {side}", f.branch),
        };
        sdp.push_block(ComplexBlock::from_fn(label, 2, |a, b| {
            if a == b {
                u.clone()
            } else {
                s.clone()
            }
        }));
    }
}

/// The inclusion-maximal variable sets of the constraints and objective
/// terms. For a network these are the bus stars; no chordal extension is
/// taken, which keeps every block at star size.
fn support_cliques(cpop: &Cpop) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = cpop
        .objective()
        .terms()
        .map(|(m, _)| m.variables())
        .chain(
            cpop.inequalities()
                .iter()
                .chain(cpop.equalities())
                .map(|p| p.variables()),
        )
        .filter(|v| !v.is_empty())
        .collect();
    sets.sort_by_key(|v| std::cmp::Reverse(v.len()));
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for s in sets {
        if !cliques.iter().any(|c| s.iter().all(|v| c.contains(v))) {
            cliques.push(s);
        }
    }
    cliques.sort();
    cliques
}

fn shor(model: &AcopfModel, opts: &AcopfOptions) -> Result<ComplexSdp> {
    let linear = model.linear_cost();
    let placeholder = linear.is_zero();
    let qcqp = if placeholder {
        model.qcqp(Some(HermitianPoly::norm_sq(model.n, 0)))?
    } else {
        model.qcqp(None)?
    };
    let cliques = support_cliques(&qcqp);
    let (assignment, residual) = assign_constraints(&cliques, &qcqp, PatternKind::Csp, 1)?;
    let orders = vec![1; cliques.len()];
    let pattern = CorrelativePattern {
        kind: PatternKind::Csp,
        cliques,
        assignment,
        residual,
    };
    // one term sparsity round splits the constant off the voltage block
    let ts = Some((Rounds::Fixed(1), opts.ts_extension));
    let mut sdp = assemble_with(&qcqp, pattern, orders, ts, false)?.sdp;
    if placeholder {
        sdp.set_objective(LinExpr::constant(0.0));
    }
    for g in model.costs.iter().filter(|g| g.c2 != 0.0) {
        if g.c2 < 0.0 {
            return Err(Error::Network(format!(
                "generator at bus index {} has a concave cost",
                g.bus
            )));
        }
        // t ≥ P² as [[t, P], [P, 1]] ⪰ 0
        let p = AffineExpr::real(&sdp.real_functional(&g.p));
        let t = sdp.add_aux(format!("cost epigraph {}", g.bus));
        let te = AffineExpr::real(&LinExpr::var(t));
        let one = AffineExpr::constant(Complex64::new(1.0, 0.0));
        let label = BlockLabel::Custom {
            name: format!("cost {}", g.bus),
        };
        sdp.push_block(ComplexBlock::from_fn(label, 2, |a, b| match (a, b) {
            (0, 0) => te.clone(),
            (1, 1) => one.clone(),
            _ => p.clone(),
        }));
        sdp.add_to_objective(&LinExpr::var(t).scale(g.c2));
    }
    flow_blocks(&mut sdp, model);
    Ok(sdp)
}

/// Assembles the requested relaxation of `case`.
pub fn relaxation(
    case: &NetworkCase,
    order: AcopfOrder,
    opts: &AcopfOptions,
) -> Result<ComplexSdp> {
    let model = AcopfModel::new(case)?;
    let mut sdp = match order {
        AcopfOrder::Shor => return shor(&model, opts),
        AcopfOrder::OneAndHalf => {
            let ro = RelaxOptions::new(Sparsity::MinInitial)
                .rounds(Rounds::Fixed(1))
                .ts_extension(opts.ts_extension)
                .cs_extension(opts.cs_extension);
            assemble(&model.cpop()?, &ro)?.sdp
        }
        AcopfOrder::Sparse { d, k } => {
            let ro = RelaxOptions::new(Sparsity::CsTs)
                .order(d)
                .rounds(Rounds::Fixed(k))
                .ts_extension(opts.ts_extension)
                .cs_extension(opts.cs_extension);
            assemble(&model.cpop()?, &ro)?.sdp
        }
    };
    flow_blocks(&mut sdp, &model);
    Ok(sdp)
}

/// Solves a relaxation and returns its bound. The gap is filled in by
/// [`AcopfReport::with_ac`].
pub fn relax_and_solve(
    case: &NetworkCase,
    order: AcopfOrder,
    opts: &AcopfOptions,
) -> Result<AcopfReport> {
    let (report, _, _) = relax_and_solve_full(case, order, opts)?;
    Ok(report)
}

/// Like [`relax_and_solve`], also returning the model and the solver output.
pub fn relax_and_solve_full(
    case: &NetworkCase,
    order: AcopfOrder,
    opts: &AcopfOptions,
) -> Result<(AcopfReport, ComplexSdp, SolveReport)> {
    let start = Instant::now();
    let sdp = relaxation(case, order, opts)?;
    let stats = sdp.statistics();
    let (real, _) = complex_to_real(&sdp);
    let sol = solve(&real, &opts.settings)?;
    let report = AcopfReport {
        case: case.name.clone(),
        order: order.to_string(),
        opt: sol.objective(),
        ac: None,
        gap: None,
        global: None,
        mb: stats.mb,
        blocks: stats.blocks,
        variables: stats.variables,
        time: start.elapsed().as_secs_f64(),
        status: sol.status,
    };
    Ok((report, sdp, sol))
}
