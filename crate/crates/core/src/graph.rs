//! Undirected graphs on `0..n`, chordal extensions and maximal cliques.
//!
//! Node labels are indices; callers that work with exponent-labelled nodes
//! keep a sorted label table alongside the graph, so "smallest label" and
//! "smallest index" coincide.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// Simple undirected graph without self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Graph::new(n);
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Adds `{a, b}`; self-loops are ignored. Returns whether the edge is new.
    pub fn add_edge(&mut self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        let new = self.adj[a].insert(b);
        self.adj[b].insert(a);
        new
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.range(a + 1..).map(move |&b| (a, b)))
    }

    /// Same node count and `E(self) ⊆ E(other)`.
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.num_nodes() == other.num_nodes() && self.edges().all(|(a, b)| other.has_edge(a, b))
    }

    /// Adds every edge of `other`.
    pub fn union_with(&mut self, other: &Graph) {
        for (a, b) in other.edges() {
            self.add_edge(a, b);
        }
    }
}

/// Connected components, each sorted, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.num_nodes();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &u in g.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                    stack.push(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// How to extend a graph to a chordal one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extension {
    /// Complete every connected component.
    Maximal,
    /// Greedy minimum-degree elimination.
    MinDegree,
    /// Greedy minimum fill-in elimination.
    MinFill,
}

impl std::str::FromStr for Extension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" | "maximal" => Ok(Extension::Maximal),
            "md" | "min-degree" | "min" => Ok(Extension::MinDegree),
            "mf" | "min-fill" => Ok(Extension::MinFill),
            other => Err(format!("unknown chordal extension '{other}'")),
        }
    }
}

/// A chordal graph together with a perfect elimination ordering and its
/// maximal cliques.
#[derive(Clone, Debug)]
pub struct ChordalGraph {
    graph: Graph,
    order: Vec<usize>,
    cliques: Vec<Vec<usize>>,
}

impl ChordalGraph {
    /// Builds from a graph and an ordering; `None` unless the ordering is a
    /// perfect elimination ordering of the graph.
    pub fn from_elimination_order(graph: Graph, order: Vec<usize>) -> Option<Self> {
        if !is_perfect_elimination_order(&graph, &order) {
            return None;
        }
        let cliques = cliques_from_order(&graph, &order);
        Some(ChordalGraph {
            graph,
            order,
            cliques,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn elimination_order(&self) -> &[usize] {
        &self.order
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    pub fn into_parts(self) -> (Graph, Vec<Vec<usize>>) {
        (self.graph, self.cliques)
    }

    /// Size of the largest clique (0 for the empty graph).
    pub fn clique_number(&self) -> usize {
        self.cliques.iter().map(Vec::len).max().unwrap_or(0)
    }
}

pub fn chordal_extension(g: &Graph, ext: Extension) -> ChordalGraph {
    match ext {
        Extension::Maximal => chordal_extension_maximal(g),
        Extension::MinDegree | Extension::MinFill => chordal_extension_greedy(g, ext),
    }
}

/// Completes every connected component.
pub fn chordal_extension_maximal(g: &Graph) -> ChordalGraph {
    let comps = connected_components(g);
    let mut h = Graph::new(g.num_nodes());
    for comp in &comps {
        for (i, &a) in comp.iter().enumerate() {
            for &b in &comp[i + 1..] {
                h.add_edge(a, b);
            }
        }
    }
    let order: Vec<usize> = comps.iter().flatten().copied().collect();
    ChordalGraph {
        graph: h,
        order,
        cliques: comps,
    }
}

/// Greedy elimination; ties are broken by the smallest node index.
/// `Extension::Maximal` is treated as `MinDegree` here.
pub fn chordal_extension_greedy(g: &Graph, heuristic: Extension) -> ChordalGraph {
    let n = g.num_nodes();
    let mut work: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let mut out = g.clone();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let use_fill = heuristic == Extension::MinFill;

    let fill_of = |work: &[BTreeSet<usize>], v: usize| -> usize {
        let ns: Vec<usize> = work[v].iter().copied().collect();
        let mut missing = 0;
        for (i, &a) in ns.iter().enumerate() {
            for &b in &ns[i + 1..] {
                if !work[a].contains(&b) {
                    missing += 1;
                }
            }
        }
        missing
    };
    let mut fill: Vec<usize> = if use_fill {
        (0..n).map(|v| fill_of(&work, v)).collect()
    } else {
        Vec::new()
    };

    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| {
                let score = if use_fill { fill[v] } else { work[v].len() };
                (score, work[v].len(), v)
            })
            .expect("a live vertex remains");
        alive[v] = false;
        order.push(v);
        let ns: Vec<usize> = work[v].iter().copied().collect();
        for (i, &a) in ns.iter().enumerate() {
            for &b in &ns[i + 1..] {
                if work[a].insert(b) {
                    work[b].insert(a);
                    out.add_edge(a, b);
                }
            }
        }
        for &a in &ns {
            work[a].remove(&v);
        }
        work[v].clear();
        if use_fill {
            let mut touched: BTreeSet<usize> = ns.iter().copied().collect();
            for &a in &ns {
                touched.extend(work[a].iter().copied());
            }
            for u in touched {
                fill[u] = fill_of(&work, u);
            }
        }
    }
    let cliques = cliques_from_order(&out, &order);
    ChordalGraph {
        graph: out,
        order,
        cliques,
    }
}

/// The maximal cliques stored on a chordal graph.
pub fn maximal_cliques(cg: &ChordalGraph) -> &[Vec<usize>] {
    cg.cliques()
}

/// True iff every vertex's later neighbours form a clique.
pub fn is_perfect_elimination_order(g: &Graph, order: &[usize]) -> bool {
    let n = g.num_nodes();
    if order.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return false;
        }
        pos[v] = i;
    }
    for &v in order {
        let later: Vec<usize> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| pos[u] > pos[v])
            .collect();
        for (i, &a) in later.iter().enumerate() {
            for &b in &later[i + 1..] {
                if !g.has_edge(a, b) {
                    return false;
                }
            }
        }
    }
    true
}

fn cliques_from_order(g: &Graph, order: &[usize]) -> Vec<Vec<usize>> {
    let n = g.num_nodes();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut candidates: Vec<Vec<usize>> = order
        .iter()
        .map(|&v| {
            let mut c: Vec<usize> = std::iter::once(v)
                .chain(g.neighbors(v).iter().copied().filter(|&u| pos[u] > pos[v]))
                .collect();
            c.sort_unstable();
            c
        })
        .collect();
    candidates.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for c in candidates {
        let contained = kept.iter().any(|k| is_sorted_subset(&c, k));
        if !contained {
            kept.push(c);
        }
    }
    kept.sort();
    kept
}

fn is_sorted_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}
