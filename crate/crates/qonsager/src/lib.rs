//! Numerical verification toolkit for twisted open spin-1/2 chains.
//!
//! Builds the twisted six-vertex R-matrix, the spin-1/2 Lax operators,
//! c-number and dressed K-matrices, the q-Onsager generators of the dressed
//! solution, the open transfer matrix and the generalized McCoy-Wu
//! Hamiltonian, all as dense complex matrices, and checks the identities that
//! relate them on seeded random parameter samples.
//!
//! Site 1 is the rightmost Kronecker factor of a chain operator.
//!
//! ```
//! use qonsager::{check_ybe, c};
//! let r = check_ybe(c(1.2, 0.3), c(0.6, 0.8), c(0.9, 0.1), c(1.1, -0.2), c(0.7, 0.4)).unwrap();
//! assert!(r < 1e-12);
//! ```

pub mod boundary;
pub mod config;
pub mod error;
pub mod lax;
pub mod linalg;
pub mod onsager;
pub mod params;
pub mod report;
pub mod suites;
pub mod transfer;
pub mod yang_baxter;

pub use boundary::{build_kminus_c, build_kplus_c, dress, dressed_kminus, dualize, DressedK};
pub use config::{RunConfig, SUITES};
pub use error::{Error, Result};
pub use lax::{build_lax, build_lax_tilde, spin_half_rep, CasimirSet, SklyaninRep};
pub use linalg::{c, embed_site, kron, rel_residual, AuxOperator, CMatrix, QOperator, C64};
pub use onsager::{charges, generators, ChargeConvention, GeneratorFamily};
pub use params::{BoundaryParams, ModelParams, Sampler};
pub use report::{emit_report, CheckRecord, Format, Verdict, VerificationReport};
pub use suites::{export_spectrum, list_suites, run_suite, WORKERS_ENV};
pub use transfer::{diagonalize, mccoy_wu_hamiltonian, transfer, Spectrum};
pub use yang_baxter::{build_r, check_ybe, r_matrix, RMatrix};
