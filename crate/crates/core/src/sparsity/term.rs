use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::CorrelativePattern;
use crate::error::{Error, Result};
use crate::graph::{chordal_extension, chordal_extension_greedy, Extension, Graph};
use crate::poly::{clique_basis, Cpop, Exponent, HermitianPoly, MonomialPair};

/// How many support-extension rounds to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rounds {
    Fixed(usize),
    /// Iterate until no owner graph changes, at most `max` rounds.
    UntilStable {
        max: usize,
    },
}

/// A block graph `G^{(k)}_{d,l,j}` together with its node labels and blocks.
#[derive(Clone, Debug)]
pub struct BlockOwner {
    pub clique: usize,
    /// `None` for the moment matrix (`g_0 = 1`), otherwise the inequality index.
    pub constraint: Option<usize>,
    /// Degree bound of the node set, `d_l − d_j`.
    pub degree: u32,
    /// Embedded basis `ℕ^{n_l}_{d_l − d_j}` in lexicographic order.
    pub nodes: Vec<Exponent>,
    pub graph: Graph,
    /// Maximal cliques of `graph`, as sorted node indices.
    pub blocks: Vec<Vec<usize>>,
}

impl BlockOwner {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Blocks as lists of exponents.
    pub fn block_exponents(&self) -> Vec<Vec<Exponent>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&i| self.nodes[i].clone()).collect())
            .collect()
    }
}

/// Result of the term sparsity iteration.
#[derive(Clone, Debug)]
pub struct TermPattern {
    pub owners: Vec<BlockOwner>,
    /// Number of completed rounds.
    pub k: usize,
    /// True iff one more round would change no edge set.
    pub stabilized: bool,
}

impl TermPattern {
    /// Largest block over all owners.
    pub fn max_block(&self) -> usize {
        self.owners
            .iter()
            .flat_map(|o| o.blocks.iter().map(Vec::len))
            .max()
            .unwrap_or(0)
    }
}

/// Term sparsity pattern graph: nodes `basis`, one edge per off-diagonal
/// pair of `support` whose endpoints are both nodes.
pub fn tsp_graph<'a>(
    support: impl IntoIterator<Item = &'a MonomialPair>,
    basis: &[Exponent],
) -> Graph {
    let index: HashMap<&Exponent, usize> = basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut g = Graph::new(basis.len());
    for m in support {
        if m.is_diagonal() {
            continue;
        }
        if let (Some(&a), Some(&b)) = (index.get(&m.beta), index.get(&m.gamma)) {
            g.add_edge(a, b);
        }
    }
    g
}

/// `supp_g(G)`: all `(β+β′, γ+γ′)` with `β = γ` or `{β, γ} ∈ E(G)` and
/// `(β′, γ′) ∈ supp(g)`. Both orientations are returned.
pub fn g_support(g: &HermitianPoly, nodes: &[Exponent], graph: &Graph) -> BTreeSet<MonomialPair> {
    let mut out = HashSet::new();
    let supp: Vec<MonomialPair> = g.terms().map(|(m, _)| m.clone()).collect();
    add_g_support(&supp, nodes, graph, &mut out);
    out.into_iter()
        .flat_map(|m| {
            let c = m.conjugate();
            [m, c]
        })
        .collect()
}

/// Accumulates canonical representatives of `supp_g(G)`.
fn add_g_support(
    supp: &[MonomialPair],
    nodes: &[Exponent],
    graph: &Graph,
    out: &mut HashSet<MonomialPair>,
) {
    let mut push = |beta: &Exponent, gamma: &Exponent| {
        for s in supp {
            let m = MonomialPair::new(beta.add(&s.beta), gamma.add(&s.gamma));
            out.insert(m.canonical().0);
        }
    };
    for b in nodes {
        push(b, b);
    }
    for (a, b) in graph.edges() {
        // the conjugate orientation is covered by canonicalization
        push(&nodes[a], &nodes[b]);
    }
}

struct OwnerSpec {
    clique: usize,
    constraint: Option<usize>,
    degree: u32,
    nodes: Vec<Exponent>,
    supp: Vec<MonomialPair>,
}

/// Runs the support-extension / chordal-extension chain for every owner of
/// `pattern` (one moment graph per clique, one graph per `j ∈ J_l`).
///
/// `orders[l]` is the relaxation order used on clique `l`. Before each
/// chordal extension the previous graph's edges are merged in, so greedy
/// heuristics still yield an ascending chain.
pub fn ts_iterate(
    cpop: &Cpop,
    pattern: &CorrelativePattern,
    orders: &[u32],
    rounds: Rounds,
    ext: Extension,
) -> Result<TermPattern> {
    if orders.len() != pattern.num_cliques() {
        return Err(Error::DimensionMismatch {
            expected: pattern.num_cliques(),
            got: orders.len(),
        });
    }
    if let Rounds::Fixed(0) = rounds {
        return Err(Error::InvalidOptions(
            "sparse order k must be at least 1".into(),
        ));
    }
    let n = cpop.nvars();
    let dj = cpop.constraint_half_degrees();
    let support = cpop.support();

    let mut specs = Vec::new();
    for (l, clique) in pattern.cliques.iter().enumerate() {
        let d = orders[l];
        specs.push(OwnerSpec {
            clique: l,
            constraint: None,
            degree: d,
            nodes: clique_basis(clique, n, d),
            supp: vec![MonomialPair::constant(n)],
        });
        for &j in &pattern.assignment[l] {
            if dj[j] > d {
                return Err(Error::OrderTooLow {
                    order: d,
                    min_order: dj[j],
                });
            }
            specs.push(OwnerSpec {
                clique: l,
                constraint: Some(j),
                degree: d - dj[j],
                nodes: clique_basis(clique, n, d - dj[j]),
                supp: cpop.inequalities()[j]
                    .terms()
                    .map(|(m, _)| m.clone())
                    .collect(),
            });
        }
    }

    let mut graphs: Vec<Graph> = specs
        .iter()
        .map(|s| {
            if s.constraint.is_none() {
                let clique = &pattern.cliques[s.clique];
                let restricted = support.iter().filter(|m| {
                    m.variables()
                        .iter()
                        .all(|v| clique.binary_search(v).is_ok())
                });
                tsp_graph(restricted, &s.nodes)
            } else {
                Graph::new(s.nodes.len())
            }
        })
        .collect();

    let max_rounds = match rounds {
        Rounds::Fixed(k) => k,
        Rounds::UntilStable { max } => max.max(1),
    };
    let mut blocks: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut k = 0;
    let mut stabilized = false;
    while k < max_rounds {
        let (next, next_blocks) = extend_round(&specs, &graphs, ext);
        k += 1;
        let changed = next != graphs;
        graphs = next;
        blocks = next_blocks;
        if !changed && k > 1 {
            stabilized = true;
            if matches!(rounds, Rounds::UntilStable { .. }) {
                k -= 1;
                break;
            }
        }
    }
    if !stabilized {
        let (next, _) = extend_round(&specs, &graphs, ext);
        stabilized = next == graphs;
    }

    let owners = specs
        .into_iter()
        .zip(graphs)
        .zip(blocks)
        .map(|((s, graph), blocks)| BlockOwner {
            clique: s.clique,
            constraint: s.constraint,
            degree: s.degree,
            nodes: s.nodes,
            graph,
            blocks,
        })
        .collect();
    Ok(TermPattern {
        owners,
        k,
        stabilized,
    })
}

/// One round: collect `𝒞^{(k−1)}`, build every `F^{(k)}`, extend chordally.
fn extend_round(
    specs: &[OwnerSpec],
    graphs: &[Graph],
    ext: Extension,
) -> (Vec<Graph>, Vec<Vec<Vec<usize>>>) {
    let mut covered = HashSet::new();
    for (s, g) in specs.iter().zip(graphs) {
        add_g_support(&s.supp, &s.nodes, g, &mut covered);
    }
    let mut out_graphs = Vec::with_capacity(specs.len());
    let mut out_blocks = Vec::with_capacity(specs.len());
    for (s, prev) in specs.iter().zip(graphs) {
        let mut f = prev.clone();
        for a in 0..s.nodes.len() {
            for b in a + 1..s.nodes.len() {
                if f.has_edge(a, b) {
                    continue;
                }
                let hit = s.supp.iter().any(|t| {
                    let m = MonomialPair::new(s.nodes[a].add(&t.beta), s.nodes[b].add(&t.gamma));
                    covered.contains(&m.canonical().0)
                });
                if hit {
                    f.add_edge(a, b);
                }
            }
        }
        let cg = match ext {
            Extension::Maximal => chordal_extension(&f, ext),
            _ => chordal_extension_greedy(&f, ext),
        };
        let (g, cliques) = cg.into_parts();
        out_graphs.push(g);
        out_blocks.push(cliques);
    }
    (out_graphs, out_blocks)
}
