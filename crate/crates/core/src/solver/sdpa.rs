//! Sparse SDPA (`.dat-s`) text export.
//!
//! SDPA reads `min cᵀx s.t. Σ x_i F_i − F_0 ⪰ 0`, so our constant block term
//! is written negated as matrix 0. Scalar inequalities and both halves of
//! each equality share one trailing diagonal block, in that order. The
//! objective constant and the row counts travel in [`ExportMeta`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relax::{LinExpr, RealBlock, RealSdp};

/// What the text format cannot carry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportMeta {
    pub objective_constant: f64,
    pub inequalities: usize,
    /// Each equality occupies two diagonal entries: `e ≥ 0` then `−e ≥ 0`.
    pub equalities: usize,
}

type Key = (usize, usize, usize, usize);

fn put(entries: &mut BTreeMap<Key, f64>, key: Key, v: f64) {
    if v != 0.0 {
        *entries.entry(key).or_insert(0.0) += v;
    }
}

/// Renders `sdp` as SDPA sparse text.
pub fn write_sdpa(sdp: &RealSdp) -> (String, ExportMeta) {
    let mut diag: Vec<LinExpr> = sdp.inequalities.clone();
    for e in &sdp.equalities {
        diag.push(e.clone());
        diag.push(e.scale(-1.0));
    }
    let mut sizes: Vec<i64> = sdp.blocks.iter().map(|b| b.dim as i64).collect();
    if !diag.is_empty() || sizes.is_empty() {
        sizes.push(-(diag.len().max(1) as i64));
    }

    // (matrix, block, i, j), all 1-based, i ≤ j
    let mut entries = BTreeMap::new();
    for (b, blk) in sdp.blocks.iter().enumerate() {
        for &(p, q, v) in &blk.constant {
            put(&mut entries, (0, b + 1, p + 1, q + 1), -v);
        }
        for (i, f) in &blk.coeffs {
            for &(p, q, v) in f {
                put(&mut entries, (i + 1, b + 1, p + 1, q + 1), v);
            }
        }
    }
    let db = sdp.blocks.len() + 1;
    for (k, e) in diag.iter().enumerate() {
        put(&mut entries, (0, db, k + 1, k + 1), -e.constant);
        for &(i, a) in &e.terms {
            put(&mut entries, (i + 1, db, k + 1, k + 1), a);
        }
    }

    let mut out = String::new();
    out.push_str("\"cpop relaxation\n");
    let _ = writeln!(out, "{}", sdp.nvars);
    let _ = writeln!(out, "{}", sizes.len());
    let sizes: Vec<String> = sizes.iter().map(i64::to_string).collect();
    let _ = writeln!(out, "{}", sizes.join(" "));
    let c: Vec<String> = sdp.cost().iter().map(|v| format!("{v:e}")).collect();
    let _ = writeln!(out, "{}", c.join(" "));
    for ((m, b, i, j), v) in entries {
        if v != 0.0 {
            let _ = writeln!(out, "{m} {b} {i} {j} {v:e}");
        }
    }
    let meta = ExportMeta {
        objective_constant: sdp.objective.constant,
        inequalities: sdp.inequalities.len(),
        equalities: sdp.equalities.len(),
    };
    (out, meta)
}

/// Writes `sdp` to `path` and returns the metadata needed to read it back.
pub fn export_sdpa(sdp: &RealSdp, path: &Path) -> Result<ExportMeta> {
    let (text, meta) = write_sdpa(sdp);
    std::fs::write(path, text)?;
    Ok(meta)
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse(format!("sdpa line {line}: {msg}"))
}

/// Reads SDPA sparse text back into a model. With `meta` the trailing
/// diagonal block is split into inequalities and equalities again;
/// without it every diagonal entry becomes an inequality.
pub fn read_sdpa(text: &str, meta: Option<&ExportMeta>) -> Result<RealSdp> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('"') && !l.starts_with('*'));
    let tokens = |l: &str| -> Vec<String> {
        l.split(|c: char| c.is_whitespace() || ",{}()".contains(c))
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect()
    };
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::Parse(format!("sdpa: missing {what}")))
    };
    let (ln, l) = next("variable count")?;
    let m: usize = tokens(l)
        .first()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(ln, "bad variable count"))?;
    let (ln, l) = next("block count")?;
    let nb: usize = tokens(l)
        .first()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(ln, "bad block count"))?;
    let (ln, l) = next("block sizes")?;
    let sizes: Vec<i64> = tokens(l)
        .iter()
        .take(nb)
        .map(|t| t.parse().map_err(|_| parse_err(ln, "bad block size")))
        .collect::<Result<_>>()?;
    if sizes.len() != nb {
        return Err(parse_err(ln, "too few block sizes"));
    }
    let (ln, l) = next("cost vector")?;
    let c: Vec<f64> = tokens(l)
        .iter()
        .take(m)
        .map(|t| t.parse().map_err(|_| parse_err(ln, "bad cost")))
        .collect::<Result<_>>()?;
    if c.len() != m {
        return Err(parse_err(ln, "too few costs"));
    }

    let mut blocks: Vec<Option<RealBlock>> = Vec::new();
    let mut diag: Vec<Vec<LinExpr>> = Vec::new();
    for &s in &sizes {
        if s > 0 {
            blocks.push(Some(RealBlock {
                dim: s as usize,
                constant: Vec::new(),
                coeffs: Vec::new(),
            }));
            diag.push(Vec::new());
        } else {
            blocks.push(None);
            diag.push(vec![LinExpr::constant(0.0); s.unsigned_abs() as usize]);
        }
    }
    let mut coeffs: Vec<BTreeMap<usize, Vec<(usize, usize, f64)>>> = vec![BTreeMap::new(); nb];
    for (ln, l) in lines {
        let t = tokens(l);
        if t.len() < 5 {
            return Err(parse_err(ln, "expected 'mat block i j value'"));
        }
        let idx = |k: usize| -> Result<usize> {
            t[k].parse::<usize>()
                .map_err(|_| parse_err(ln, "bad index"))
        };
        let (mat, b, i, j) = (idx(0)?, idx(1)?, idx(2)?, idx(3)?);
        let v: f64 = t[4].parse().map_err(|_| parse_err(ln, "bad value"))?;
        if mat > m || b == 0 || b > nb || i == 0 || j == 0 {
            return Err(parse_err(ln, "index out of range"));
        }
        let bi = b - 1;
        let dim = sizes[bi].unsigned_abs() as usize;
        let (p, q) = (i.min(j) - 1, i.max(j) - 1);
        if q >= dim {
            return Err(parse_err(ln, "entry outside block"));
        }
        match &mut blocks[bi] {
            Some(blk) => {
                if mat == 0 {
                    blk.constant.push((p, q, -v));
                } else {
                    coeffs[bi].entry(mat - 1).or_default().push((p, q, v));
                }
            }
            None => {
                if p != q {
                    return Err(parse_err(ln, "off-diagonal entry in diagonal block"));
                }
                let e = &mut diag[bi][p];
                if mat == 0 {
                    e.constant -= v;
                } else {
                    e.terms.push((mat - 1, v));
                }
            }
        }
    }
    let mut out_blocks = Vec::new();
    let mut rows = Vec::new();
    for (bi, blk) in blocks.into_iter().enumerate() {
        match blk {
            Some(mut b) => {
                b.coeffs = std::mem::take(&mut coeffs[bi]).into_iter().collect();
                out_blocks.push(b);
            }
            None => rows.extend(std::mem::take(&mut diag[bi])),
        }
    }
    let objective = LinExpr {
        constant: meta.map_or(0.0, |m| m.objective_constant),
        terms: c
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect(),
    };
    let (inequalities, equalities) = match meta {
        None => (rows, Vec::new()),
        Some(meta) => {
            let need = meta.inequalities + 2 * meta.equalities;
            if rows.len() < need {
                return Err(Error::Parse(
                    "sdpa: fewer diagonal rows than metadata".into(),
                ));
            }
            let eqs = (0..meta.equalities)
                .map(|k| rows[meta.inequalities + 2 * k].clone())
                .collect();
            rows.truncate(meta.inequalities);
            (rows, eqs)
        }
    };
    Ok(RealSdp {
        nvars: m,
        objective,
        blocks: out_blocks,
        inequalities,
        equalities,
    })
}
