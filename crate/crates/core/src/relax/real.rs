use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::{BlockLabel, ComplexBlock, ComplexSdp, LinExpr, VarInfo};

/// Upper-triangle entries `(row, col, value)` with `row ≤ col`.
pub type SymEntries = Vec<(usize, usize, f64)>;

/// A real symmetric linear matrix inequality `F_0 + Σ x_i F_i ⪰ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealBlock {
    pub dim: usize,
    pub constant: SymEntries,
    /// `(variable, F_i)` sorted by variable.
    pub coeffs: Vec<(usize, SymEntries)>,
}

impl RealBlock {
    fn from_entries(dim: usize, entries: Vec<(usize, usize, LinExpr)>) -> Self {
        let mut constant = Vec::new();
        let mut by_var: BTreeMap<usize, SymEntries> = BTreeMap::new();
        for (p, q, e) in entries {
            debug_assert!(p <= q);
            if e.constant != 0.0 {
                constant.push((p, q, e.constant));
            }
            for (i, a) in e.terms {
                by_var.entry(i).or_default().push((p, q, a));
            }
        }
        RealBlock {
            dim,
            constant,
            coeffs: by_var.into_iter().collect(),
        }
    }

    /// Dense row-major value of the block at `x`.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let r = self.dim;
        let mut m = vec![0.0; r * r];
        let mut put = |p: usize, q: usize, v: f64| {
            m[p * r + q] += v;
            if p != q {
                m[q * r + p] += v;
            }
        };
        for &(p, q, v) in &self.constant {
            put(p, q, v);
        }
        for (i, f) in &self.coeffs {
            for &(p, q, v) in f {
                put(p, q, v * x[*i]);
            }
        }
        m
    }
}

/// A real SDP in inequality form:
/// minimize `cᵀx + c_0` subject to LMI blocks, `a_kᵀx + b_k ≥ 0` and
/// `e_kᵀx + f_k = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSdp {
    pub nvars: usize,
    pub objective: LinExpr,
    pub blocks: Vec<RealBlock>,
    pub inequalities: Vec<LinExpr>,
    pub equalities: Vec<LinExpr>,
}

impl RealSdp {
    /// Objective coefficient vector `c`.
    pub fn cost(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.nvars];
        for &(i, a) in &self.objective.terms {
            c[i] += a;
        }
        c
    }
}

/// Where each real block came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockOrigin {
    pub label: BlockLabel,
    /// Complex dimension `r`.
    pub complex_dim: usize,
    /// `r` if the block was purely real, `2r` otherwise.
    pub real_dim: usize,
}

/// Maps real variables and blocks back to the complex model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub variables: Vec<VarInfo>,
    pub blocks: Vec<BlockOrigin>,
    /// Indices of the scalar inequalities that came from 1×1 blocks.
    pub scalar_blocks: Vec<usize>,
}

fn push(entries: &mut Vec<(usize, usize, LinExpr)>, p: usize, q: usize, e: LinExpr) {
    if !(e.constant == 0.0 && e.terms.is_empty()) {
        entries.push((p, q, e));
    }
}

/// `A + iB ⪰ 0` as `[[A, −B], [B, A]] ⪰ 0`, or as `A ⪰ 0` when `B ≡ 0`.
pub fn realify_block(block: &ComplexBlock) -> RealBlock {
    let r = block.dim();
    let mut entries = Vec::new();
    if block.is_real() {
        for p in 0..r {
            for q in p..r {
                push(&mut entries, p, q, block.upper_ref(p, q).re());
            }
        }
        return RealBlock::from_entries(r, entries);
    }
    for p in 0..r {
        for q in p..r {
            let e = block.upper_ref(p, q);
            let a = e.re();
            push(&mut entries, p, q, a.clone());
            push(&mut entries, p + r, q + r, a);
            if p != q {
                let b = e.im();
                push(&mut entries, p, q + r, b.scale(-1.0));
                push(&mut entries, q, p + r, b);
            }
        }
    }
    RealBlock::from_entries(2 * r, entries)
}

/// Converts a complex model to a real one with the same optimum. 1×1 blocks
/// become scalar inequalities.
pub fn complex_to_real(sdp: &ComplexSdp) -> (RealSdp, Sidecar) {
    let mut blocks = Vec::new();
    let mut origins = Vec::new();
    let mut inequalities = Vec::new();
    let mut scalar_blocks = Vec::new();
    for b in sdp.blocks() {
        if b.dim() == 1 {
            scalar_blocks.push(inequalities.len());
            inequalities.push(b.upper_ref(0, 0).re());
            continue;
        }
        let rb = realify_block(b);
        origins.push(BlockOrigin {
            label: b.label.clone(),
            complex_dim: b.dim(),
            real_dim: rb.dim,
        });
        blocks.push(rb);
    }
    inequalities.extend(sdp.inequalities().iter().cloned());
    let real = RealSdp {
        nvars: sdp.num_vars(),
        objective: sdp.objective().clone(),
        blocks,
        inequalities,
        equalities: sdp.equalities().to_vec(),
    };
    let sidecar = Sidecar {
        variables: sdp.var_info().to_vec(),
        blocks: origins,
        scalar_blocks,
    };
    (real, sidecar)
}
