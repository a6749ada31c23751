//! Lieb-Robinson bounds for power-law interacting lattice Hamiltonians,
//! together with an exact small-system dynamics oracle to test them against.
//!
//! * [`lattice`] and [`hamiltonian`]: geometry, coupling ensembles, range buckets.
//! * [`pauli`]: Pauli-string expansion and the spatial projector `P_r`.
//! * [`dynamics`]: exact Heisenberg evolution and spreading functionals.
//! * [`bounds`]: velocity recursion, composition rules, exponent tightening,
//!   the final envelope and the bound comparison table.
//! * [`verify`]: parameter sweeps that test the bounds against the oracle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod hamiltonian;
pub mod lattice;
pub mod linalg;
pub mod pauli;
pub mod verify;

pub use error::{Error, Result};
pub use hamiltonian::{CouplingTerm, Ensemble, PowerLawHamiltonian};
pub use lattice::{Lattice, LatticeSpec, Metric};
pub use dynamics::{EvolutionContext, LeakageCurve, NormKind};
pub use pauli::{OperatorDecomposition, Pauli, PauliString};
pub use verify::{SweepConfig, VerificationReport};
