//! Quantum measurement scoring game.
//!
//! Layers, bottom up:
//!
//! - [`linalg`]: dense complex vectors/matrices and a Hermitian Jacobi eigensolver.
//! - [`quantum`]: kets, observables, ensembles, density operators, Born-rule sampling.
//! - [`entropy`]: self-information, Shannon and von Neumann entropy.
//! - [`game`]: payoffs, Monte Carlo play, strategy optimization and reference curves.

pub mod entropy;
pub mod error;
pub mod game;
pub mod linalg;
pub mod quantum;
pub mod random;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::{Complex, ComplexMatrix, ComplexVector, SpectralDecomposition};
pub use quantum::{DensityOperator, Ensemble, Ket, Observable};
