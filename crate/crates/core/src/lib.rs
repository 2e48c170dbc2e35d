//! Simulation of Simon-style quantum distinguishers for Feistel schemes.
//!
//! The crate is organised bottom-up:
//!
//! - [`oracle`]: balanced, VFS and unbalanced contracting Feistel schemes and
//!   random permutations, all fully tabulated from a 64-bit seed.
//! - [`qsim`]: a sparse statevector engine over multi-register layouts and a
//!   dense reference engine with the same interface.
//! - [`gf2`]: packed GF(2) matrices for the post-processing step.
//! - [`distinguish`]: the quantum distinguishers, their budgets and censuses.
//! - [`classical`]: the collision-counting baselines.
//! - [`parallel`]: the index-ordered map used for Monte Carlo batches.

pub mod classical;
pub mod distinguish;
pub mod error;
pub mod gf2;
pub mod oracle;
pub mod parallel;
pub mod qsim;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
