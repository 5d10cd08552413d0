use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{chordal_extension, Extension, Graph};
use crate::poly::{Cpop, HermitianPoly};

/// Which rule set produced a variable pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKind {
    /// A single clique holding every variable.
    Dense,
    /// Correlative sparsity at a fixed relaxation order.
    Csp,
    /// The monomial-wise graph used by the minimum-initial relaxation.
    Icsp,
}

/// Variable cliques `I_l` and the constraint partition `(J_1, …, J_p, J')`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelativePattern {
    pub kind: PatternKind,
    /// Sorted variable indices of each clique.
    pub cliques: Vec<Vec<usize>>,
    /// `J_l`: inequality indices owned by clique `l`.
    pub assignment: Vec<Vec<usize>>,
    /// `J'`: inequalities entering only as scalar constraints.
    pub residual: Vec<usize>,
}

impl CorrelativePattern {
    /// One clique `[n]` owning every inequality.
    pub fn dense(cpop: &Cpop) -> Self {
        CorrelativePattern {
            kind: PatternKind::Dense,
            cliques: vec![(0..cpop.nvars()).collect()],
            assignment: vec![(0..cpop.inequalities().len()).collect()],
            residual: Vec::new(),
        }
    }

    /// Correlative pattern at order `d`: csp graph, chordal extension,
    /// maximal cliques, constraint partition.
    pub fn csp(cpop: &Cpop, d: u32, ext: Extension) -> Result<Self> {
        let g = csp_graph(cpop, d)?;
        let cliques = chordal_extension(&g, ext).into_parts().1;
        let (assignment, residual) = assign_constraints(&cliques, cpop, PatternKind::Csp, d)?;
        Ok(CorrelativePattern {
            kind: PatternKind::Csp,
            cliques,
            assignment,
            residual,
        })
    }

    /// Pattern from the icsp graph; constraints fitting no clique go to `J'`.
    pub fn icsp(cpop: &Cpop, ext: Extension) -> Result<Self> {
        let g = icsp_graph(cpop);
        let cliques = chordal_extension(&g, ext).into_parts().1;
        let (assignment, residual) = assign_constraints(&cliques, cpop, PatternKind::Icsp, 0)?;
        Ok(CorrelativePattern {
            kind: PatternKind::Icsp,
            cliques,
            assignment,
            residual,
        })
    }

    pub fn num_cliques(&self) -> usize {
        self.cliques.len()
    }

    /// Lowest-index clique containing all of `vars`.
    pub fn clique_containing(&self, vars: &[usize]) -> Option<usize> {
        self.cliques.iter().position(|c| is_subset(vars, c))
    }
}

fn is_subset(vars: &[usize], clique: &[usize]) -> bool {
    vars.iter().all(|v| clique.binary_search(v).is_ok())
}

fn connect_all(g: &mut Graph, vars: &[usize]) {
    for (i, &a) in vars.iter().enumerate() {
        for &b in &vars[i + 1..] {
            g.add_edge(a, b);
        }
    }
}

fn connect_monomials(g: &mut Graph, p: &HermitianPoly) {
    for (m, _) in p.terms() {
        connect_all(g, &m.variables());
    }
}

/// Correlative sparsity graph at order `d`: monomial-wise edges from `f`,
/// from the constraints with `d_j = d` and from equalities; all-pairs edges
/// over the variables of every other inequality.
pub fn csp_graph(cpop: &Cpop, d: u32) -> Result<Graph> {
    let min_order = cpop.min_order();
    if d < min_order {
        return Err(Error::OrderTooLow {
            order: d,
            min_order,
        });
    }
    let mut g = Graph::new(cpop.nvars());
    connect_monomials(&mut g, cpop.objective());
    for (gj, dj) in cpop
        .inequalities()
        .iter()
        .zip(cpop.constraint_half_degrees())
    {
        if dj == d {
            connect_monomials(&mut g, gj);
        } else {
            connect_all(&mut g, &gj.variables());
        }
    }
    for h in cpop.equalities() {
        connect_monomials(&mut g, h);
    }
    Ok(g)
}

/// Edge `{i, j}` iff a single monomial of some polynomial involves both.
pub fn icsp_graph(cpop: &Cpop) -> Graph {
    let mut g = Graph::new(cpop.nvars());
    for p in std::iter::once(cpop.objective())
        .chain(cpop.inequalities())
        .chain(cpop.equalities())
    {
        connect_monomials(&mut g, p);
    }
    g
}

/// Splits the inequalities into `J_1, …, J_p` and `J'`.
///
/// In csp mode `J' = {j : d_j = d}` and every other constraint must fit a
/// clique; in icsp mode `J'` collects the constraints that fit none. Ties go
/// to the lowest clique index.
pub fn assign_constraints(
    cliques: &[Vec<usize>],
    cpop: &Cpop,
    mode: PatternKind,
    d: u32,
) -> Result<(Vec<Vec<usize>>, Vec<usize>)> {
    let mut assignment = vec![Vec::new(); cliques.len()];
    let mut residual = Vec::new();
    let dj = cpop.constraint_half_degrees();
    for (j, g) in cpop.inequalities().iter().enumerate() {
        if mode == PatternKind::Csp && dj[j] == d {
            residual.push(j);
            continue;
        }
        let vars = g.variables();
        match cliques.iter().position(|c| is_subset(&vars, c)) {
            Some(l) => assignment[l].push(j),
            None if mode == PatternKind::Icsp => residual.push(j),
            None => return Err(Error::UnassignableConstraint(j)),
        }
    }
    Ok((assignment, residual))
}

/// Minimum relaxation orders `o_l = max({d_j : j ∈ J_l} ∪ {⌈deg(f_l)/2⌉})`,
/// with each objective term given to the lowest-index clique covering it.
/// Orders are floored at 1.
pub fn min_relaxation_orders(cpop: &Cpop, pattern: &CorrelativePattern) -> Result<Vec<u32>> {
    let mut orders = vec![1u32; pattern.num_cliques()];
    let dj = cpop.constraint_half_degrees();
    for (l, js) in pattern.assignment.iter().enumerate() {
        for &j in js {
            orders[l] = orders[l].max(dj[j]);
        }
    }
    for (m, _) in cpop.objective().terms() {
        let vars = m.variables();
        let l = pattern
            .clique_containing(&vars)
            .ok_or(Error::UnassignableObjectiveTerm(vars))?;
        orders[l] = orders[l].max(m.half_degree());
    }
    Ok(orders)
}
