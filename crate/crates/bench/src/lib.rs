//! Shared fixtures for the benchmarks.

use std::path::{Path, PathBuf};

use cpop_core::{Cpop, HermitianPoly, Poly};

/// `min z1 + z̄1` over the unit ball in `ℂ²`.
pub fn ball_example() -> Cpop {
    let n = 2;
    let f = HermitianPoly::new(Poly::var(n, 0).add(&Poly::conj_var(n, 0))).expect("hermitian");
    let g = HermitianPoly::constant(n, 1.0)
        .sub(&HermitianPoly::norm_sq(n, 0))
        .sub(&HermitianPoly::norm_sq(n, 1));
    Cpop::new(n, f, vec![g], vec![]).expect("well-formed")
}

pub fn case14_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/pglib_opf_case14_ieee.m")
}
