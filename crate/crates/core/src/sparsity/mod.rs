//! Correlative and term sparsity patterns.
//!
//! A [`CorrelativePattern`] splits the variables into cliques and the
//! inequalities into per-clique groups plus a scalar remainder `J'`. A
//! [`TermPattern`] then partitions each clique's monomial basis into blocks
//! via the support-extension iteration.

mod correlative;
mod sign;
mod term;

pub use correlative::{
    assign_constraints, csp_graph, icsp_graph, min_relaxation_orders, CorrelativePattern,
    PatternKind,
};
pub use sign::{sign_symmetries, sign_symmetry_partition, SignSymmetry};
pub use term::{g_support, ts_iterate, tsp_graph, BlockOwner, Rounds, TermPattern};

use serde::{Deserialize, Serialize};

/// Human-readable summary of a pattern.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SparsityReport {
    /// 1-based variable indices per clique.
    pub cliques: Vec<Vec<usize>>,
    pub orders: Vec<u32>,
    /// 1-based constraint indices per clique.
    pub assignment: Vec<Vec<usize>>,
    pub residual: Vec<usize>,
    pub owners: Vec<OwnerReport>,
    pub k: Option<usize>,
    pub stabilized: Option<bool>,
    /// Largest block size.
    pub mb: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OwnerReport {
    pub clique: usize,
    /// 0 for the moment matrix, otherwise the 1-based constraint index.
    pub constraint: usize,
    pub nodes: usize,
    pub blocks: Vec<usize>,
}

impl SparsityReport {
    pub fn new(pattern: &CorrelativePattern, orders: &[u32], terms: Option<&TermPattern>) -> Self {
        let one_based = |v: &Vec<usize>| v.iter().map(|i| i + 1).collect::<Vec<_>>();
        let owners: Vec<OwnerReport> = match terms {
            Some(tp) => tp
                .owners
                .iter()
                .map(|o| OwnerReport {
                    clique: o.clique + 1,
                    constraint: o.constraint.map_or(0, |j| j + 1),
                    nodes: o.nodes.len(),
                    blocks: o.block_sizes(),
                })
                .collect(),
            None => Vec::new(),
        };
        let mb = match terms {
            Some(tp) => tp.max_block(),
            None => pattern
                .cliques
                .iter()
                .zip(orders)
                .map(|(c, &d)| crate::poly::basis_size(c.len(), d))
                .max()
                .unwrap_or(0),
        };
        SparsityReport {
            cliques: pattern.cliques.iter().map(one_based).collect(),
            orders: orders.to_vec(),
            assignment: pattern.assignment.iter().map(one_based).collect(),
            residual: pattern.residual.iter().map(|j| j + 1).collect(),
            owners,
            k: terms.map(|t| t.k),
            stabilized: terms.map(|t| t.stabilized),
            mb,
        }
    }
}
