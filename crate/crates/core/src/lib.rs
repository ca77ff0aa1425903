//! Phase-estimation precision of a Mach-Zehnder interferometer with photon loss
//! in the sensing arm.
//!
//! The crate compares four ways of spending a photon budget `N`:
//!
//! - **classical**: coherent light with Poissonian counting, input split tuned to
//!   the loss ([`classical`]),
//! - **noon**: the state `(|N,0> + |0,N>)/sqrt(2)`,
//! - **optimal**: the `N`-photon state maximizing the quantum Fisher information
//!   after loss ([`strategies::optimize_probe`]),
//! - **multipass**: single photons passing the lossy phase shifter several times.
//!
//! Lossy probe states are handled through their [`loss::BlockDecomposition`],
//! whose quantum Fisher information has a closed form. [`fisher::qfi_oracle`]
//! recomputes it from the full density matrix for cross-checking.
//! [`sim`] checks the classical bounds operationally by simulating photocounts
//! and estimating the phase by maximum likelihood.
//!
//! ```
//! use lossy_mz::strategies::noon_precision;
//!
//! let r = noon_precision(4, 1.0).unwrap();
//! assert!((r.delta_phi - 0.25).abs() < 1e-12);
//! ```

pub mod classical;
pub mod error;
pub mod exec;
pub mod fisher;
pub mod fock;
pub mod loss;
pub mod report;
pub mod sim;
pub mod simplex;
pub mod strategies;

pub use error::{Error, Result};
pub use exec::Exec;
pub use fock::TwoModeFockState;
pub use loss::{BlockDecomposition, LossChannel};
pub use strategies::{Strategy, StrategyResult};
