//! Infeasible primal-dual interior-point method for
//!
//! ```text
//! min cᵀx  s.t.  S_b = F0_b + Σ x_i F_i^b ⪰ 0,  s = A x + b ≥ 0,  E x + f = 0
//! ```
//!
//! with dual variables `X_b ⪰ 0`, `z ≥ 0`, `w` free. Directions use
//! Nesterov–Todd scaling and a Mehrotra predictor-corrector; the Schur
//! complement is dense and factored by Cholesky.

use std::time::Instant;

use faer::prelude::*;
use faer::{Mat, Side};

use super::{Settings, SolveReport, Status};
use crate::error::{Error, Result};
use crate::relax::RealSdp;

/// Symmetric matrix given by `(p, q, v)` entries with both orientations
/// listed for off-diagonal positions.
type Full = Vec<(usize, usize, f64)>;

struct Block {
    dim: usize,
    f0: Mat<f64>,
    /// `(variable, F_i)` with both orientations listed.
    coeffs: Vec<(usize, Full)>,
}

struct Problem {
    m: usize,
    c: Vec<f64>,
    c0: f64,
    obj_scale: f64,
    blocks: Vec<Block>,
    lp_a: Vec<Vec<(usize, f64)>>,
    lp_b: Vec<f64>,
    eq_e: Vec<Vec<(usize, f64)>>,
    eq_f: Vec<f64>,
}

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |a, b| a.max(b.abs()))
}

impl Problem {
    /// Copies the model, normalizing each block, row and the objective so
    /// that the largest coefficient is 1. None of this changes `x`.
    fn new(sdp: &RealSdp) -> Result<Problem> {
        let m = sdp.nvars;
        let check = |i: usize| -> Result<()> {
            if i >= m {
                Err(Error::Solver(format!("variable index {i} out of range")))
            } else {
                Ok(())
            }
        };
        let mut blocks = Vec::with_capacity(sdp.blocks.len());
        for b in &sdp.blocks {
            if b.dim == 0 {
                return Err(Error::Solver("block of dimension 0".into()));
            }
            let scale = max_abs(b.coeffs.iter().flat_map(|(_, f)| f.iter().map(|e| e.2)));
            let scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };
            let mut f0 = Mat::<f64>::zeros(b.dim, b.dim);
            for &(p, q, v) in &b.constant {
                f0[(p, q)] += v * scale;
                if p != q {
                    f0[(q, p)] += v * scale;
                }
            }
            let mut coeffs = Vec::with_capacity(b.coeffs.len());
            for (i, f) in &b.coeffs {
                check(*i)?;
                let mut full = Vec::with_capacity(2 * f.len());
                for &(p, q, v) in f {
                    if p >= b.dim || q >= b.dim {
                        return Err(Error::Solver("block entry out of range".into()));
                    }
                    full.push((p, q, v * scale));
                    if p != q {
                        full.push((q, p, v * scale));
                    }
                }
                coeffs.push((*i, full));
            }
            blocks.push(Block {
                dim: b.dim,
                f0,
                coeffs,
            });
        }
        let mut lp_a = Vec::new();
        let mut lp_b = Vec::new();
        for e in &sdp.inequalities {
            let s = max_abs(e.terms.iter().map(|t| t.1));
            if s == 0.0 {
                if e.constant < 0.0 {
                    return Err(Error::Solver("constant inequality is violated".into()));
                }
                continue;
            }
            for &(i, _) in &e.terms {
                check(i)?;
            }
            lp_a.push(e.terms.iter().map(|&(i, a)| (i, a / s)).collect());
            lp_b.push(e.constant / s);
        }
        let mut eq_e = Vec::new();
        let mut eq_f = Vec::new();
        for e in &sdp.equalities {
            let s = max_abs(e.terms.iter().map(|t| t.1));
            if s == 0.0 {
                if e.constant.abs() > 1e-12 {
                    return Err(Error::Solver("constant equality is violated".into()));
                }
                continue;
            }
            for &(i, _) in &e.terms {
                check(i)?;
            }
            eq_e.push(e.terms.iter().map(|&(i, a)| (i, a / s)).collect());
            eq_f.push(e.constant / s);
        }
        let mut c = sdp.cost();
        let cs = max_abs(c.iter().copied());
        let obj_scale = if cs > 0.0 { cs } else { 1.0 };
        for v in &mut c {
            *v /= obj_scale;
        }
        Ok(Problem {
            m,
            c,
            c0: sdp.objective.constant,
            obj_scale,
            blocks,
            lp_a,
            lp_b,
            eq_e,
            eq_f,
        })
    }

    fn nu(&self) -> f64 {
        (self.blocks.iter().map(|b| b.dim).sum::<usize>() + self.lp_b.len()) as f64
    }

    /// `Σ x_i F_i` on block `b`.
    fn apply(&self, b: &Block, x: &[f64]) -> Mat<f64> {
        let mut out = Mat::<f64>::zeros(b.dim, b.dim);
        for (i, f) in &b.coeffs {
            let xi = x[*i];
            if xi != 0.0 {
                for &(p, q, v) in f {
                    out[(p, q)] += v * xi;
                }
            }
        }
        out
    }

    /// Adds `⟨F_i, Y⟩` into `out[i]`.
    fn adjoint_into(b: &Block, y: &Mat<f64>, out: &mut [f64]) {
        for (i, f) in &b.coeffs {
            out[*i] += f.iter().map(|&(p, q, v)| v * y[(p, q)]).sum::<f64>();
        }
    }

    fn lp_apply(&self, x: &[f64]) -> Vec<f64> {
        self.lp_a
            .iter()
            .map(|row| row.iter().map(|&(i, a)| a * x[i]).sum())
            .collect()
    }

    fn eq_apply(&self, x: &[f64]) -> Vec<f64> {
        self.eq_e
            .iter()
            .map(|row| row.iter().map(|&(i, a)| a * x[i]).sum())
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn frob(m: &Mat<f64>) -> f64 {
    m.norm_l2()
}

fn inner(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)] * b[(i, j)];
        }
    }
    s
}

fn symmetrize(m: &mut Mat<f64>) {
    let r = m.nrows();
    for i in 0..r {
        for j in i + 1..r {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Nesterov–Todd scaling of one block: `W = G Gᵀ` with `W S W = X`,
/// `Gᵀ S G = G⁻¹ X G⁻ᵀ = Λ`.
struct Scaling {
    g: Mat<f64>,
    w: Vec<f64>,
    lambda: Vec<f64>,
}

fn nt_scaling(x: &Mat<f64>, s: &Mat<f64>) -> Option<Scaling> {
    let r = x.nrows();
    let lx = x.llt(Side::Lower).ok()?;
    let ls = s.llt(Side::Lower).ok()?;
    let l = lx.L().to_owned();
    let rr = ls.L().to_owned();
    let prod = rr.transpose() * &l;
    let svd = prod.svd().ok()?;
    let sig: Vec<f64> = (0..r).map(|i| svd.S().column_vector()[i]).collect();
    if sig.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return None;
    }
    let v = svd.V();
    let g = Mat::from_fn(r, r, |i, j| {
        // L is lower triangular
        let mut acc = 0.0;
        for k in 0..=i {
            acc += l[(i, k)] * v[(k, j)];
        }
        acc / sig[j].sqrt()
    });
    let wm = &g * g.transpose();
    let mut w = vec![0.0; r * r];
    for i in 0..r {
        for j in 0..r {
            w[i * r + j] = 0.5 * (wm[(i, j)] + wm[(j, i)]);
        }
    }
    Some(Scaling { g, w, lambda: sig })
}

/// Largest `α ≤ 1/τ`-capped step keeping `Λ + α D ⪰ 0`.
fn max_step(lambda: &[f64], d: &Mat<f64>) -> f64 {
    let r = lambda.len();
    let mut t = Mat::from_fn(r, r, |i, j| d[(i, j)] / (lambda[i] * lambda[j]).sqrt());
    symmetrize(&mut t);
    match t.self_adjoint_eigenvalues(Side::Lower) {
        Ok(ev) => {
            let mn = ev.iter().copied().fold(f64::INFINITY, f64::min);
            if mn >= 0.0 {
                f64::INFINITY
            } else {
                -1.0 / mn
            }
        }
        Err(_) => 0.0,
    }
}

fn max_step_lp(v: &[f64], dv: &[f64]) -> f64 {
    v.iter()
        .zip(dv)
        .filter(|(_, &d)| d < 0.0)
        .map(|(&a, &d)| -a / d)
        .fold(f64::INFINITY, f64::min)
}

/// Dense Cholesky of the Schur complement with a diagonal regularization
/// ladder; solves are refined against the unregularized matrix.
struct Factor {
    llt: faer::linalg::solvers::Llt<f64>,
    m: Mat<f64>,
}

impl Factor {
    fn new(m: Mat<f64>, ladder: &[f64]) -> Option<Factor> {
        let n = m.nrows();
        let floor = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max) * 1e-14;
        for &delta in ladder {
            let mut a = m.clone();
            for i in 0..n {
                a[(i, i)] += delta * m[(i, i)].abs().max(floor).max(1e-300);
            }
            if let Ok(llt) = a.llt(Side::Lower) {
                return Some(Factor { llt, m });
            }
        }
        None
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let b = Mat::from_fn(n, 1, |i, _| rhs[i]);
        let mut x = b.clone();
        self.llt.solve_in_place(x.as_mut());
        let bnorm = b.norm_l2();
        let mut best = f64::INFINITY;
        for _ in 0..REFINE_STEPS {
            let mut r = &b - &self.m * &x;
            let rn = r.norm_l2();
            if !(rn < best) || rn <= 1e-15 * bnorm {
                break;
            }
            best = rn;
            self.llt.solve_in_place(r.as_mut());
            x += &r;
        }
        (0..n).map(|i| x[(i, 0)]).collect()
    }
}

const REFINE_STEPS: usize = 3;

const LADDER: [f64; 5] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// Reduced system for the equality multipliers.
struct EqSystem {
    /// `M⁻¹ Eᵀ`, one column per equality.
    minv_et: Vec<Vec<f64>>,
    factor: Option<Factor>,
}

struct Direction {
    dx: Vec<f64>,
    dw: Vec<f64>,
    ds: Vec<Mat<f64>>,
    dxm: Vec<Mat<f64>>,
    ds_lp: Vec<f64>,
    dz_lp: Vec<f64>,
    /// Scaled `G⁻¹ ΔX G⁻ᵀ` and `Gᵀ ΔS G` per block.
    dx_scaled: Vec<Mat<f64>>,
    ds_scaled: Vec<Mat<f64>>,
}

#[derive(Clone)]
struct State {
    x: Vec<f64>,
    w: Vec<f64>,
    s: Vec<Mat<f64>>,
    xm: Vec<Mat<f64>>,
    s_lp: Vec<f64>,
    z_lp: Vec<f64>,
}

struct Residuals {
    rp: Vec<Mat<f64>>,
    rp_lp: Vec<f64>,
    r_eq: Vec<f64>,
    rd: Vec<f64>,
    pinf: f64,
    dinf: f64,
    pobj: f64,
    dobj: f64,
    gap: f64,
    mu: f64,
}

fn residuals(p: &Problem, st: &State, norm_b: f64, norm_c: f64) -> Residuals {
    let mut rp = Vec::with_capacity(p.blocks.len());
    let mut sq = 0.0;
    for (k, b) in p.blocks.iter().enumerate() {
        let mut r = p.apply(b, &st.x);
        r += &b.f0;
        r -= &st.s[k];
        sq += frob(&r).powi(2);
        rp.push(r);
    }
    let ax = p.lp_apply(&st.x);
    let rp_lp: Vec<f64> = (0..p.lp_b.len())
        .map(|k| ax[k] + p.lp_b[k] - st.s_lp[k])
        .collect();
    let ex = p.eq_apply(&st.x);
    let r_eq: Vec<f64> = (0..p.eq_f.len()).map(|k| -(ex[k] + p.eq_f[k])).collect();
    sq += dot(&rp_lp, &rp_lp) + dot(&r_eq, &r_eq);
    let pinf = sq.sqrt() / (1.0 + norm_b);

    let mut at = vec![0.0; p.m];
    for (k, b) in p.blocks.iter().enumerate() {
        Problem::adjoint_into(b, &st.xm[k], &mut at);
    }
    for (row, &z) in p.lp_a.iter().zip(&st.z_lp) {
        for &(i, a) in row {
            at[i] += a * z;
        }
    }
    for (row, &w) in p.eq_e.iter().zip(&st.w) {
        for &(i, a) in row {
            at[i] += a * w;
        }
    }
    let rd: Vec<f64> = (0..p.m).map(|i| p.c[i] - at[i]).collect();
    let dinf = norm(&rd) / (1.0 + norm_c);

    let pobj = dot(&p.c, &st.x);
    let dobj = -p
        .blocks
        .iter()
        .zip(&st.xm)
        .map(|(b, x)| inner(&b.f0, x))
        .sum::<f64>()
        - dot(&p.lp_b, &st.z_lp)
        - dot(&p.eq_f, &st.w);
    let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
    let comp: f64 = st
        .xm
        .iter()
        .zip(&st.s)
        .map(|(x, s)| inner(x, s))
        .sum::<f64>()
        + dot(&st.z_lp, &st.s_lp);
    let mu = comp / p.nu().max(1.0);
    Residuals {
        rp,
        rp_lp,
        r_eq,
        rd,
        pinf,
        dinf,
        pobj,
        dobj,
        gap,
        mu,
    }
}

/// Schur complement `M_ij = Σ_b ⟨F_i, W F_j W⟩ + Σ_k a_ki a_kj z_k / s_k`.
fn schur(p: &Problem, scal: &[Scaling], st: &State) -> Mat<f64> {
    let mut m = Mat::<f64>::zeros(p.m, p.m);
    for (b, sc) in p.blocks.iter().zip(scal) {
        let r = b.dim;
        let w = &sc.w;
        for (ai, (i, fi)) in b.coeffs.iter().enumerate() {
            for (j, fj) in &b.coeffs[ai..] {
                let mut acc = 0.0;
                for &(pp, q, v) in fi {
                    for &(s, t, u) in fj {
                        acc += v * u * w[q * r + s] * w[t * r + pp];
                    }
                }
                m[(*i, *j)] += acc;
                if i != j {
                    m[(*j, *i)] += acc;
                }
            }
        }
    }
    for (k, row) in p.lp_a.iter().enumerate() {
        let d = st.z_lp[k] / st.s_lp[k];
        for &(i, a) in row {
            for &(j, b) in row {
                m[(i, j)] += a * b * d;
            }
        }
    }
    m
}

/// `W Y W` for a dense block.
fn wyw(sc: &Scaling, y: &Mat<f64>) -> Mat<f64> {
    let r = y.nrows();
    let w = Mat::from_fn(r, r, |i, j| sc.w[i * r + j]);
    let mut out = &w * y * &w;
    symmetrize(&mut out);
    out
}

const KKT_REFINE_STEPS: usize = 4;

fn mat_vec(m: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m.nrows()];
    for j in 0..m.ncols() {
        let xj = x[j];
        if xj != 0.0 {
            for (o, i) in out.iter_mut().zip(0..m.nrows()) {
                *o += m[(i, j)] * xj;
            }
        }
    }
    out
}

/// `M dx − Eᵀ dw = r1`, `E dx = r2` by elimination of `dx`.
fn kkt_solve(
    p: &Problem,
    factor: &Factor,
    eqs: &EqSystem,
    r1: &[f64],
    r2: &[f64],
) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut dx = factor.solve(r1);
    let dw = if p.eq_e.is_empty() {
        Vec::new()
    } else {
        let e_minv = p.eq_apply(&dx);
        let r: Vec<f64> = (0..p.eq_e.len()).map(|k| r2[k] - e_minv[k]).collect();
        eqs.factor.as_ref()?.solve(&r)
    };
    for (k, col) in eqs.minv_et.iter().enumerate() {
        for i in 0..p.m {
            dx[i] += col[i] * dw[k];
        }
    }
    Some((dx, dw))
}

/// Solves the Newton system for the given complementarity right-hand sides
/// `H_b` (scaled) and `hz` (LP).
#[allow(clippy::too_many_arguments)]
fn direction(
    p: &Problem,
    st: &State,
    res: &Residuals,
    scal: &[Scaling],
    factor: &Factor,
    eqs: &EqSystem,
    h: &[Mat<f64>],
    hz: &[f64],
) -> Option<Direction> {
    // rhs = 𝒜*(G H Gᵀ − W Rp W) + Aᵀ(hz − (z/s) rp) − rd
    let mut rhs = vec![0.0; p.m];
    let mut ghg = Vec::with_capacity(p.blocks.len());
    for (k, b) in p.blocks.iter().enumerate() {
        let sc = &scal[k];
        let mut t = &sc.g * &h[k] * sc.g.transpose();
        symmetrize(&mut t);
        let y = &t - wyw(sc, &res.rp[k]);
        Problem::adjoint_into(b, &y, &mut rhs);
        ghg.push(t);
    }
    for (k, row) in p.lp_a.iter().enumerate() {
        let v = hz[k] - st.z_lp[k] / st.s_lp[k] * res.rp_lp[k];
        for &(i, a) in row {
            rhs[i] += a * v;
        }
    }
    for i in 0..p.m {
        rhs[i] -= res.rd[i];
    }
    // M dx − Eᵀ dw = rhs,  E dx = r_eq
    let (mut dx, mut dw) = kkt_solve(p, factor, eqs, &rhs, &res.r_eq)?;
    for _ in 0..KKT_REFINE_STEPS {
        let mdx = mat_vec(&factor.m, &dx);
        let mut r1: Vec<f64> = (0..p.m).map(|i| rhs[i] - mdx[i]).collect();
        for (row, &w) in p.eq_e.iter().zip(&dw) {
            for &(i, a) in row {
                r1[i] += a * w;
            }
        }
        let edx = p.eq_apply(&dx);
        let r2: Vec<f64> = (0..p.eq_e.len()).map(|k| res.r_eq[k] - edx[k]).collect();
        if norm(&r1) + norm(&r2) <= 1e-14 * (1.0 + norm(&rhs)) {
            break;
        }
        let (cx, cw) = kkt_solve(p, factor, eqs, &r1, &r2)?;
        for (a, b) in dx.iter_mut().zip(&cx) {
            *a += b;
        }
        for (a, b) in dw.iter_mut().zip(&cw) {
            *a += b;
        }
    }
    if dx.iter().any(|v| !v.is_finite()) {
        return None;
    }

    let mut ds = Vec::with_capacity(p.blocks.len());
    let mut dxm = Vec::with_capacity(p.blocks.len());
    let mut dx_scaled = Vec::with_capacity(p.blocks.len());
    let mut ds_scaled = Vec::with_capacity(p.blocks.len());
    for (k, b) in p.blocks.iter().enumerate() {
        let sc = &scal[k];
        let mut d = p.apply(b, &dx);
        d += &res.rp[k];
        symmetrize(&mut d);
        let mut dxk = &ghg[k] - wyw(sc, &d);
        symmetrize(&mut dxk);
        let mut dss = sc.g.transpose() * &d * &sc.g;
        symmetrize(&mut dss);
        let dxs = &h[k] - &dss;
        ds.push(d);
        dxm.push(dxk);
        dx_scaled.push(dxs);
        ds_scaled.push(dss);
    }
    let adx = p.lp_apply(&dx);
    let ds_lp: Vec<f64> = (0..p.lp_b.len()).map(|k| adx[k] + res.rp_lp[k]).collect();
    let dz_lp: Vec<f64> = (0..p.lp_b.len())
        .map(|k| hz[k] - st.z_lp[k] / st.s_lp[k] * ds_lp[k])
        .collect();
    Some(Direction {
        dx,
        dw,
        ds,
        dxm,
        ds_lp,
        dz_lp,
        dx_scaled,
        ds_scaled,
    })
}

fn step_lengths(st: &State, scal: &[Scaling], dir: &Direction) -> (f64, f64) {
    let mut ap = max_step_lp(&st.s_lp, &dir.ds_lp);
    let mut ad = max_step_lp(&st.z_lp, &dir.dz_lp);
    for (k, sc) in scal.iter().enumerate() {
        ap = ap.min(max_step(&sc.lambda, &dir.ds_scaled[k]));
        ad = ad.min(max_step(&sc.lambda, &dir.dx_scaled[k]));
    }
    (ap, ad)
}

fn initial_state(p: &Problem) -> State {
    let mut s = Vec::new();
    let mut xm = Vec::new();
    for b in &p.blocks {
        let r = b.dim as f64;
        let fmax = b
            .coeffs
            .iter()
            .map(|(_, f)| f.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let xi = 10f64.max(r.sqrt()).max(fmax).max(frob(&b.f0));
        let mut eta = 10f64.max(r.sqrt());
        for (i, f) in &b.coeffs {
            let nf = f.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt();
            eta = eta.max(r.sqrt() * (1.0 + p.c[*i].abs()) / (1.0 + nf));
        }
        s.push(Mat::from_fn(
            b.dim,
            b.dim,
            |i, j| if i == j { xi } else { 0.0 },
        ));
        xm.push(Mat::from_fn(
            b.dim,
            b.dim,
            |i, j| if i == j { eta } else { 0.0 },
        ));
    }
    let nlp = p.lp_b.len();
    let s_lp = (0..nlp).map(|k| 10f64.max(p.lp_b[k].abs())).collect();
    let z_lp = vec![10.0; nlp];
    State {
        x: vec![0.0; p.m],
        w: vec![0.0; p.eq_e.len()],
        s,
        xm,
        s_lp,
        z_lp,
    }
}

fn eq_system(p: &Problem, factor: &Factor) -> Option<EqSystem> {
    let ne = p.eq_e.len();
    let mut minv_et = Vec::with_capacity(ne);
    for row in &p.eq_e {
        let mut col = vec![0.0; p.m];
        for &(i, a) in row {
            col[i] = a;
        }
        minv_et.push(factor.solve(&col));
    }
    if ne == 0 {
        return Some(EqSystem {
            minv_et,
            factor: None,
        });
    }
    let mut k = Mat::<f64>::zeros(ne, ne);
    for (a, col) in minv_et.iter().enumerate() {
        let e_col = p.eq_apply(col);
        for b in 0..ne {
            k[(b, a)] = e_col[b];
        }
    }
    let mut ks = k.clone();
    for a in 0..ne {
        for b in 0..ne {
            ks[(a, b)] = 0.5 * (k[(a, b)] + k[(b, a)]);
        }
    }
    let f = Factor::new(ks, &LADDER)?;
    Some(EqSystem {
        minv_et,
        factor: Some(f),
    })
}

fn merit(res: &Residuals) -> f64 {
    res.gap.max(res.pinf).max(res.dinf)
}

pub(super) fn run(sdp: &RealSdp, settings: &Settings) -> Result<SolveReport> {
    let start = Instant::now();
    let p = Problem::new(sdp)?;
    let norm_b = (p.blocks.iter().map(|b| frob(&b.f0).powi(2)).sum::<f64>()
        + dot(&p.lp_b, &p.lp_b)
        + dot(&p.eq_f, &p.eq_f))
    .sqrt();
    let norm_c = norm(&p.c);
    let mut st = initial_state(&p);
    let nu = p.nu();
    let tau = settings.step_fraction;

    let mut status = Status::MaxIterations;
    let mut iters = 0;
    let mut res = residuals(&p, &st, norm_b, norm_c);
    let mut best: Option<(f64, State)> = None;
    let mut since_best = 0;
    let mut stalls = 0;
    let mut blocked = false;
    loop {
        let m_now = merit(&res);
        if best.as_ref().is_none_or(|(b, _)| m_now < *b) {
            best = Some((m_now, st.clone()));
            since_best = 0;
        } else {
            since_best += 1;
        }
        let converged = res.gap <= settings.gap_tol
            && res.pinf <= settings.feas_tol
            && res.dinf <= settings.feas_tol;
        if converged {
            status = Status::Optimal;
            break;
        }
        let best_merit = best.as_ref().map_or(f64::INFINITY, |b| b.0);
        // late iterations that keep losing accuracy
        if best_merit < 1e-4 && (m_now > 100.0 * best_merit || since_best >= 3 || blocked) {
            status = Status::NumericalFailure;
            break;
        }
        if iters >= settings.max_iters {
            break;
        }
        let xnorm = max_abs(st.x.iter().copied());
        let xmnorm = st.xm.iter().map(frob).fold(0.0, f64::max);
        if xnorm > 1e12 || xmnorm > 1e12 {
            status = Status::InfeasibleDetected;
            break;
        }
        iters += 1;

        let Some(scal) = p
            .blocks
            .iter()
            .enumerate()
            .map(|(k, _)| nt_scaling(&st.xm[k], &st.s[k]))
            .collect::<Option<Vec<_>>>()
        else {
            status = Status::NumericalFailure;
            break;
        };
        let m = schur(&p, &scal, &st);
        let Some(factor) = Factor::new(m, &LADDER) else {
            status = Status::NumericalFailure;
            break;
        };
        let Some(eqs) = eq_system(&p, &factor) else {
            status = Status::NumericalFailure;
            break;
        };

        // predictor
        let h_aff: Vec<Mat<f64>> = scal
            .iter()
            .map(|sc| {
                let r = sc.lambda.len();
                Mat::from_fn(r, r, |i, j| if i == j { -sc.lambda[i] } else { 0.0 })
            })
            .collect();
        let hz_aff: Vec<f64> = st.z_lp.iter().map(|z| -z).collect();
        let Some(aff) = direction(&p, &st, &res, &scal, &factor, &eqs, &h_aff, &hz_aff) else {
            status = Status::NumericalFailure;
            break;
        };
        let (ap, ad) = step_lengths(&st, &scal, &aff);
        let ap = ap.min(1.0);
        let ad = ad.min(1.0);
        let mut comp_aff = 0.0;
        for k in 0..p.blocks.len() {
            let xn = &st.xm[k] + &aff.dxm[k] * faer::Scale(ad);
            let sn = &st.s[k] + &aff.ds[k] * faer::Scale(ap);
            comp_aff += inner(&xn, &sn);
        }
        for k in 0..p.lp_b.len() {
            comp_aff += (st.z_lp[k] + ad * aff.dz_lp[k]) * (st.s_lp[k] + ap * aff.ds_lp[k]);
        }
        let mu_aff = (comp_aff / nu).max(0.0);
        let sigma = if res.mu > 0.0 {
            (mu_aff / res.mu).powi(3).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let target = sigma * res.mu;

        // corrector
        let h: Vec<Mat<f64>> = scal
            .iter()
            .enumerate()
            .map(|(k, sc)| {
                let r = sc.lambda.len();
                let xa = &aff.dx_scaled[k];
                let sa = &aff.ds_scaled[k];
                let cross = xa * sa + sa * xa;
                Mat::from_fn(r, r, |i, j| {
                    let mut v = -cross[(i, j)];
                    if i == j {
                        v += 2.0 * target - 2.0 * sc.lambda[i] * sc.lambda[i];
                    }
                    v / (sc.lambda[i] + sc.lambda[j])
                })
            })
            .collect();
        let hz: Vec<f64> = (0..p.lp_b.len())
            .map(|k| (target - st.z_lp[k] * st.s_lp[k] - aff.dz_lp[k] * aff.ds_lp[k]) / st.s_lp[k])
            .collect();
        let Some(dir) = direction(&p, &st, &res, &scal, &factor, &eqs, &h, &hz) else {
            status = Status::NumericalFailure;
            break;
        };
        let (ap_max, ad_max) = step_lengths(&st, &scal, &dir);
        let ap = (tau * ap_max).min(1.0);
        let ad = (tau * ad_max).min(1.0);

        for i in 0..p.m {
            st.x[i] += ap * dir.dx[i];
        }
        for k in 0..p.eq_e.len() {
            st.w[k] += ad * dir.dw[k];
        }
        for k in 0..p.blocks.len() {
            st.s[k] += &dir.ds[k] * faer::Scale(ap);
            st.xm[k] += &dir.dxm[k] * faer::Scale(ad);
            symmetrize(&mut st.s[k]);
            symmetrize(&mut st.xm[k]);
        }
        for k in 0..p.lp_b.len() {
            st.s_lp[k] += ap * dir.ds_lp[k];
            st.z_lp[k] += ad * dir.dz_lp[k];
        }
        res = residuals(&p, &st, norm_b, norm_c);
        if settings.verbose {
            eprintln!(
                "{iters:3} pobj {:+.8e} dobj {:+.8e} gap {:.1e} pinf {:.1e} dinf {:.1e} mu {:.1e} ap {:.2} ad {:.2}",
                res.pobj * p.obj_scale + p.c0,
                res.dobj * p.obj_scale + p.c0,
                res.gap,
                res.pinf,
                res.dinf,
                res.mu,
                ap,
                ad
            );
        }
        blocked = ap.max(ad) < 1e-2;
        if ap < 1e-7 && ad < 1e-7 {
            stalls += 1;
            if stalls >= 3 {
                status = Status::NumericalFailure;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    if status != Status::Optimal && status != Status::InfeasibleDetected {
        if let Some((_, b)) = best {
            st = b;
            res = residuals(&p, &st, norm_b, norm_c);
        }
        let near = res.gap <= settings.near_tol
            && res.pinf <= settings.near_tol
            && res.dinf <= settings.near_tol;
        if near {
            status = Status::NearOptimal;
        }
    }
    Ok(SolveReport {
        status,
        primal_objective: res.pobj * p.obj_scale + p.c0,
        dual_objective: res.dobj * p.obj_scale + p.c0,
        gap: res.gap,
        primal_infeasibility: res.pinf,
        dual_infeasibility: res.dinf,
        iterations: iters,
        time: start.elapsed().as_secs_f64(),
        x: st.x,
    })
}
