//! Exact simulation toolkit for quantum-private distributed sensing.
//!
//! A group of `n` sensor nodes shares copies of an `n`-qubit GHZ state
//! handed out by an untrusted server. An honest verifier spends half of the
//! copies on stabilizer tests, and if the failure rate is low enough the
//! nodes imprint their local phases `θ_i` on one untested copy and measure
//! in the `X` basis. The parity of the outcomes estimates the global phase
//! `φ = Σ θ_i` without revealing any individual `θ_i`.
//!
//! Everything here is dense and exact at `2^n` dimension:
//!
//! - [`linalg`]: complex matrices, Hermitian eigendecomposition, states and
//!   trace functionals.
//! - [`states`]: GHZ and product states, Pauli strings, noise channels and
//!   local phase encoding.
//! - [`verification`]: stabilizer tests, failure rate, and the closed-form
//!   fidelity / privacy / integrity bounds derived from it.
//! - [`qfi`]: quantum Fisher information and the direct privacy parameter.
//! - [`estimation`]: parity estimator, variance scaling, integrity checks.
//! - [`protocol`]: message-driven multi-party harness with adversarial
//!   sources.

pub mod error;
pub mod estimation;
pub mod export;
pub mod linalg;
pub mod protocol;
pub mod qfi;
pub mod rng;
pub mod states;
pub mod tolerances;
pub mod verification;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, EigenDecomposition, PureState};
pub use rng::SeedStream;
pub use states::{NoiseKind, NoiseModel, Pauli, PauliString, PhaseVector};
