pub mod acopf;
pub mod error;
pub mod graph;
pub mod poly;
pub mod random;
pub mod relax;
pub mod solver;
pub mod sparsity;

pub use acopf::{AcopfOptions, AcopfOrder, AcopfReport, NetworkCase};
pub use error::{Error, Result};
pub use graph::{Extension, Graph};
pub use poly::{Cpop, Exponent, HermitianPoly, MonomialPair, Poly};
pub use relax::{
    assemble, complex_to_real, ComplexSdp, RealSdp, RelaxOptions, Relaxation, Sparsity, Statistics,
};
pub use solver::{solve, Settings, SolveReport, Status};
pub use sparsity::{Rounds, SparsityReport};
